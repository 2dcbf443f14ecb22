// Acceptance suite: one PASS/FAIL line per criterion with its runtime
// against the budget. Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "reclab/experiments.hpp"
#include "reclab/recurrence.hpp"
#include "reclab/signal.hpp"

using namespace reclab;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

/// Reports shared between criteria so the determinism check reruns each
/// experiment only at the second worker count.
std::map<std::string, Report> serial_reports;

const Report& serial(const std::string& name) {
    auto it = serial_reports.find(name);
    if (it == serial_reports.end())
        it = serial_reports.emplace(name, run_experiment(name, nlohmann::json::object(), {1})).first;
    return it->second;
}

/// The verdict whose claim contains `needle`; a missing claim counts as failed.
bool verdict(const Report& r, const std::string& needle, std::ostringstream& why) {
    for (const auto& v : r.verdicts) {
        if (v.claim.find(needle) == std::string::npos) continue;
        if (!v.passed) why << "failed: " << v.claim << " (" << v.detail << "); ";
        return v.passed;
    }
    why << "missing verdict: " << needle << "; ";
    return false;
}

Outcome verdicts(const Report& r, const std::vector<std::string>& needles) {
    std::ostringstream why;
    bool ok = true;
    for (const auto& n : needles) ok = verdict(r, n, why) && ok;
    if (ok) why << needles.size() << " verdicts passed";
    return {ok, why.str()};
}

Signal to_signal(const std::vector<oracle::Term>& terms) {
    std::vector<TrigTerm> out;
    for (const auto& t : terms) {
        TrigTerm x;
        x.kind = t.kind == oracle::Term::Exp   ? TrigTerm::Kind::Exp
                 : t.kind == oracle::Term::Cos ? TrigTerm::Kind::Cos
                                               : TrigTerm::Kind::Sin;
        x.omega = t.omega;
        x.coeff = {t.coeff};
        out.push_back(x);
    }
    return Signal::trig(out);
}

Signal quasi() { return Signal::sine() + Signal::sine(std::numbers::sqrt2); }

// 1. Operator identities on random trig polynomials.
Outcome operator_identities() {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> step(0.3, 3.0);
    double worst_identity = 0.0, worst_oracle = 0.0;
    int monotone = 0;
    const int count = 10;
    for (int s = 0; s < count; ++s) {
        const auto terms = oracle::random_trig(rng);
        const Signal f = to_signal(terms);
        const double h = step(rng);
        const Signal mean = running_mean(f, h);
        const Signal diff = difference(indefinite_integral(f, 0.0), h);
        for (double t = -30.0; t <= 30.0; t += 0.25) {
            const Complex m = mean.eval(t)[0];
            worst_identity = std::max(worst_identity, std::abs(h * m - diff.eval(t)[0]));
            worst_oracle = std::max(worst_oracle, std::abs(m - oracle::running_mean(terms, h, t)));
        }

        // Cesaro: (f - M_k f) - (1/n) sum_j (f - f_{kj/n}) -> 0 as n grows.
        const double k = 1.0;
        const Signal mk = running_mean(f, k);
        std::vector<double> sups;
        for (int n : {4, 16, 64}) {
            std::vector<Signal> shifted;
            for (int j = 1; j <= n; ++j) shifted.push_back(translate(f, k * j / n));
            const Signal avg = (1.0 / n) * Signal::sum(shifted);
            double sup = 0.0;
            for (double t = -20.0; t <= 20.0; t += 0.1) {
                const Complex lib = (f.eval(t)[0] - mk.eval(t)[0]) - (f.eval(t)[0] - avg.eval(t)[0]);
                Complex riemann{};
                for (int j = 1; j <= n; ++j) riemann += oracle::value(terms, t + k * j / n);
                const Complex exact = oracle::running_mean(terms, k, t) - riemann / static_cast<double>(n);
                worst_oracle = std::max(worst_oracle, std::abs(lib + exact));
                sup = std::max(sup, std::abs(lib));
            }
            sups.push_back(sup);
        }
        if (sups[0] > sups[1] && sups[1] > sups[2]) ++monotone;
    }
    std::ostringstream d;
    d << "max |h M_h f - Delta_h Pf| " << worst_identity << ", max oracle deviation " << worst_oracle
      << ", Cesaro decreasing in " << monotone << "/" << count;
    return {worst_identity <= 1e-6 && worst_oracle <= 1e-6 && monotone == count, d.str()};
}

Outcome hierarchy() {
    return verdicts(serial("hierarchy"), {"sin: L(eps, K) stable", "pi(phi): L(eps, K) grows",
                                          "chirp fails the continuous rung", "chirp passes the discrete probe scan"});
}

Outcome nonlinearity() {
    const Report& r = serial("nonlinearity");
    auto o = verdicts(r, {"g1 ladder passes rung 2", "g2 ladder passes rung 2", "g1 - g2 has no almost periods"});
    const auto& scan = r.table("tent_scan");
    const auto& row = scan.rows.front();
    const auto col = std::find(scan.columns.begin(), scan.columns.end(), "max_gap") - scan.columns.begin();
    const bool sentinel = row.at(col) == "inf";
    o.detail += sentinel ? ", tent gap +inf" : ", tent gap finite";
    return {o.passed && sentinel, o.detail};
}

Outcome lacunary() {
    return verdicts(serial("lacunary"), {"max gap >= 2^(N-1) on [0, 2^N]", "Pf gap at eps = 0.2 is K-stable"});
}

Outcome bbak() {
    return verdicts(serial("bbak"), {"L(1/2, K) for Pf_d strictly increases", "positive branch: P cos ladder passes"});
}

Outcome bohr_neugebauer() {
    return verdicts(serial("bohr_neugebauer"),
                    {"solver residual", "gap tables within factor 2", "y'+y = sin: ||y|| = sqrt(2)/2"});
}

Outcome esclangon() {
    return verdicts(serial("esclangon"), {"y and y' ladders pass", "sup|y''| <= ||f|| + 3 sup|y'| + 2 sup|y|"});
}

Outcome inclusion() {
    int cases = 0, failures = 0;
    std::size_t checked = 0;
    std::ostringstream d;
    const std::vector<std::pair<std::string, Signal>> signals = {{"sin", Signal::sine()}, {"sin+sin(sqrt2)", quasi()}};
    for (const auto& [label, g] : signals) {
        const Interval range = label == "sin" ? Interval{0.0, 60.0} : Interval{0.0, 200.0};
        for (double h : {0.5, 1.0}) {
            for (int n : {2, 3}) {
                const auto r = difference_period_inclusion(g, h, n, range);
                ++cases;
                checked += r.checked;
                if (!r.holds) {
                    ++failures;
                    d << label << " h=" << h << " n=" << n << " violator " << r.violator.value_or(NAN) << "; ";
                }
            }
        }
    }
    d << cases << " cases, " << checked << " members checked, " << failures << " with violators";
    return {failures == 0 && checked > 0, d.str()};
}

Outcome cover() {
    const auto r = cover_inclusion_search(Signal::sine(), 0.2, ProbeWindow::symmetric(2.0), {oracle::kPi},
                                          {0.8, 0.4, 0.2}, {0.0, 60.0});
    std::size_t violators = 0;
    for (const auto& t : r.trials)
        if (t.delta == 0.4) violators = t.violators;
    std::ostringstream d;
    d << "verified " << r.verified << ", largest passing delta " << r.delta << ", violators at 0.4: " << violators;
    return {r.verified && r.delta >= 0.4 && violators == 0, d.str()};
}

Outcome chirp_integral() {
    const Complex lib = indefinite_integral(Signal::chirp(), 0.0).eval(100.0)[0];
    const Complex ref = oracle::fresnel(100.0);
    const double to_limit = std::abs(lib - oracle::fresnel_limit());
    const double to_oracle = std::abs(lib - ref);
    std::ostringstream d;
    d << "|Pg(100) - limit| " << to_limit << ", |Pg(100) - oracle| " << to_oracle;
    return {to_limit <= 0.01 && to_oracle <= 1e-6, d.str()};
}

Outcome determinism() {
    std::vector<std::string> differing;
    std::size_t count = 0;
    for (const auto& e : experiment_registry()) {
        const std::string a = serial(e.name).to_json().dump();
        const std::string b = run_experiment(e.name, nlohmann::json::object(), {4}).to_json().dump();
        ++count;
        if (a != b) differing.push_back(e.name);
    }
    const bool shared =
        serial("hierarchy").table("sin_reference").rows == serial("bbak").table("sin_reference").rows;
    std::ostringstream d;
    d << count << " experiments compared at workers 1 and 4, " << differing.size() << " differ";
    for (const auto& n : differing) d << " " << n;
    d << "; sin reference tables " << (shared ? "identical" : "differ");
    return {differing.empty() && shared, d.str()};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget;  // seconds
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "operator identities", 10, operator_identities},
        {2, "hierarchy separation", 120, hierarchy},
        {3, "non-linearity", 120, nonlinearity},
        {4, "lacunary example", 60, lacunary},
        {5, "finite-dimensional integral theorem", 180, bbak},
        {6, "bounded solutions", 120, bohr_neugebauer},
        {7, "bounded derivatives", 60, esclangon},
        {8, "period inclusion", 60, inclusion},
        {9, "cover inclusion", 30, cover},
        {10, "chirp integral", 30, chirp_integral},
        {11, "determinism", 0, determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_budget = c.budget <= 0 || secs < c.budget;
        const bool ok = o.passed && in_budget;
        failed += ok ? 0 : 1;
        std::printf("criterion %2d %-38s %s  %7.2fs", c.id, c.name, ok ? "PASS" : "FAIL", secs);
        if (c.budget > 0) std::printf(" (budget %.0fs)", c.budget);
        std::printf("  %s%s\n", o.detail.c_str(), in_budget ? "" : " [over budget]");
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
