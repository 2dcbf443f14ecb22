#include "reclab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "reclab/neutral.hpp"
#include "reclab/recurrence.hpp"
#include "reclab/signal.hpp"

namespace reclab {

namespace {

const double kSqrt2 = std::numbers::sqrt2;

double get(const ojson& p, const char* key) { return p.at(key).get<double>(); }
int get_int(const ojson& p, const char* key) { return p.at(key).get<int>(); }
std::vector<double> get_list(const ojson& p, const char* key) { return p.at(key).get<std::vector<double>>(); }

ojson scan_defaults() { return {{"tau_step", 0.01}, {"window_step", 0.01}}; }

ScanOptions scan_options(const ojson& p, const RunContext& ctx) {
    ScanOptions o;
    o.tau_step = get(p.at("scan"), "tau_step");
    o.workers = ctx.workers;
    if (!(o.tau_step > 0.0)) throw ConfigError("scan.tau_step must be positive");
    return o;
}

double window_step(const ojson& p) {
    const double s = get(p.at("scan"), "window_step");
    if (!(s > 0.0)) throw ConfigError("scan.window_step must be positive");
    return s;
}

LadderPolicy ladder_policy(const ojson& p, const RunContext& ctx) {
    LadderPolicy policy;
    policy.window_step = window_step(p);
    policy.scan = scan_options(p, ctx);
    return policy;
}

ProbeWindow window(const ojson& p, double half) { return ProbeWindow::symmetric(half, window_step(p)); }

Report start(const std::string& id, const ojson& p) {
    Report r(id);
    r.parameters = p;
    const LadderPolicy d;
    r.provenance = {
        {"tau_step", get(p.at("scan"), "tau_step")},
        {"window_step", get(p.at("scan"), "window_step")},
        {"refinement", "golden-section within one window step of the worst grid point"},
        {"quad_tol", kDefaultQuadTol},
        {"checkpoint_spacing", kCheckpointSpacing},
        {"ladder", {{"eps", "2^-n"},
                    {"window", "[-2n, 2n]"},
                    {"range", "min(base_range * growth^n, s_cap)"},
                    {"base_range", d.base_range},
                    {"growth", d.range_growth},
                    {"s_cap", d.s_cap},
                    {"gap_fraction", d.gap_fraction}}},
    };
    return r;
}

// ----------------------------------------------------------- table rows

const std::vector<std::string> kGapColumns{"signal", "eps",   "window_lo", "window_hi", "range_lo",
                                           "range_hi", "step", "members", "max_gap"};

std::size_t gap_row(ReportTable& t, const std::string& label, const AlmostPeriodSet& set) {
    const Interval k = set.window.bounds();
    return t.add({label, set.eps, k.lo, k.hi, set.range.lo, set.range.hi, set.step,
                  set.members.size(), num(set.max_gap)});
}

const std::vector<std::string> kLadderColumns{"signal", "rung",    "eps",       "window_lo", "window_hi",
                                              "range",  "members", "max_gap",   "gap_bound", "passed"};

/// Appends one row per rung; returns the row indices.
std::vector<std::size_t> ladder_rows(Report& r, const std::string& label, const LadderVerdict& v) {
    auto& t = r.table("ladders", kLadderColumns);
    std::vector<std::size_t> rows;
    for (const auto& rung : v.rungs)
        rows.push_back(t.add({label, rung.n, rung.eps, rung.window.lo, rung.window.hi, rung.range,
                              rung.members, num(rung.max_gap), rung.gap_bound, rung.passed}));
    return rows;
}

/// Ladder on a trajectory component, with the range capped to the grid.
LadderVerdict trajectory_ladder(const Trajectory& traj, int k, int depth, LadderPolicy policy) {
    const double room = ladder_room(traj, depth, policy.half_line);
    if (!(room > 0.0)) throw ConfigError("trajectory too short for the requested ladder");
    policy.s_cap = std::min(policy.s_cap, room);
    return recurrence_ladder(traj.as_signal(k), depth, policy);
}

bool strictly_increasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1])) return false;
    return true;
}

std::string fmt(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

/// Gap table of sin at one eps over a window ladder. Shared by the
/// hierarchy and BBAK experiments so both produce identical rows.
std::vector<std::size_t> sin_reference(Report& r, const ojson& ref, const ojson& p, const ScanOptions& opt,
                                       std::vector<double>* gaps) {
    auto& t = r.table("sin_reference", kGapColumns);
    std::vector<std::size_t> rows;
    for (double half : get_list(ref, "windows")) {
        const auto set = almost_period_set(Signal::sine(), get(ref, "eps"), window(p, half),
                                           {0.0, get(ref, "range")}, opt);
        rows.push_back(gap_row(t, "sin", set));
        if (gaps) gaps->push_back(set.max_gap);
    }
    return rows;
}

ojson sin_reference_defaults() { return {{"eps", 0.1}, {"windows", {5, 20, 80}}, {"range", 6000}}; }

// ------------------------------------------------------------ hierarchy

Report hierarchy(const ojson& p, const RunContext& ctx) {
    Report r = start("hierarchy", p);
    const auto opt = scan_options(p, ctx);
    const ojson ref = {{"eps", p.at("eps")}, {"windows", p.at("windows")}, {"range", p.at("range")}};

    std::vector<double> sin_gaps;
    const auto sin_rows = sin_reference(r, ref, p, opt, &sin_gaps);
    const auto [smin, smax] = std::minmax_element(sin_gaps.begin(), sin_gaps.end());
    const double variation = *smax / *smin - 1.0;
    r.verdict("sin: L(eps, K) stable across the window ladder", variation < get(p, "sin_variation_max"),
              "sin_reference", sin_rows, "relative variation " + fmt(variation));

    auto& pt = r.table("pi_phi_gaps", kGapColumns);
    const Signal pi_phi = Signal::aa_step(AaBranch::Phi);
    std::vector<double> pi_gaps;
    std::vector<std::size_t> pi_rows;
    for (double half : get_list(p, "windows")) {
        const auto set = almost_period_set(pi_phi, get(p, "eps"), window(p, half), {0.0, get(p, "range")}, opt);
        pi_rows.push_back(gap_row(pt, "pi_phi", set));
        pi_gaps.push_back(set.max_gap);
    }
    const double growth = pi_gaps.back() / pi_gaps.front();
    r.verdict("pi(phi): L(eps, K) grows with K", growth >= get(p, "pi_growth_min"), "pi_phi_gaps", pi_rows,
              "growth factor " + fmt(growth));

    const auto policy = ladder_policy(p, ctx);
    const int depth = get_int(p, "ladder_depth");
    const auto sin_ladder = recurrence_ladder(Signal::sine(), depth, policy);
    r.verdict("sin ladder passes", sin_ladder.recurrent, "ladders", ladder_rows(r, "sin", sin_ladder),
              sin_ladder.describe());
    const auto pi_ladder = recurrence_ladder(pi_phi, depth, policy);
    r.verdict("pi(phi) ladder passes", pi_ladder.recurrent, "ladders", ladder_rows(r, "pi_phi", pi_ladder),
              pi_ladder.describe());
    const Signal chirp = Signal::chirp();
    const auto chirp_ladder = recurrence_ladder(chirp, depth, policy);
    r.verdict("chirp ladder fails", !chirp_ladder.recurrent, "ladders", ladder_rows(r, "chirp", chirp_ladder),
              chirp_ladder.describe());

    auto& ct = r.table("chirp_scans", {"mode", "eps", "window", "range", "step", "members", "max_gap",
                                       "gap_bound", "passed"});
    const double ceps = get(p, "chirp_eps");
    const double crange = get(p, "chirp_range");
    const auto cont = almost_period_set(chirp, ceps, window(p, get(p, "chirp_window")), {0.0, crange}, opt);
    const double cbound = LadderPolicy{}.gap_fraction * crange;
    const bool cont_pass = cont.max_gap <= cbound;
    const auto crow = ct.add({"continuous", ceps, "[-" + fmt(get(p, "chirp_window")) + ", " + fmt(get(p, "chirp_window")) + "]",
                              crange, cont.step, cont.members.size(), num(cont.max_gap), cbound, cont_pass});
    r.verdict("chirp fails the continuous rung", !cont_pass, "chirp_scans", {crow},
              "max_gap " + fmt(cont.max_gap) + " > bound " + fmt(cbound));

    ScanOptions popt = opt;
    popt.tau_step = get(p, "probe_step");
    const double prange = get(p, "probe_range");
    const auto probes = get_list(p, "probes");
    const auto disc = discrete_period_scan(chirp, ceps, probes, {0.0, prange}, popt);
    const double pbound = get(p, "probe_gap_fraction") * prange;
    const bool disc_pass = std::isfinite(disc.max_gap) && disc.max_gap <= pbound;
    std::string label = "{";
    for (std::size_t i = 0; i < probes.size(); ++i) label += (i ? ", " : "") + fmt(probes[i]);
    label += "}";
    const auto drow = ct.add({"discrete", ceps, label, prange, disc.step, disc.members.size(),
                              num(disc.max_gap), pbound, disc_pass});
    r.verdict("chirp passes the discrete probe scan with finite gap", disc_pass, "chirp_scans", {drow},
              "max_gap " + fmt(disc.max_gap));
    return r;
}

// ---------------------------------------------------------- nonlinearity

Report nonlinearity(const ojson& p, const RunContext& ctx) {
    Report r = start("nonlinearity", p);
    const auto policy = ladder_policy(p, ctx);
    const int depth = get_int(p, "ladder_depth");
    const Signal g1 = Signal::aa_step(AaBranch::Psi1);
    const Signal g2 = Signal::aa_step(AaBranch::Psi2);

    for (const auto& [label, g] : {std::pair{"g1", g1}, std::pair{"g2", g2}}) {
        const auto v = recurrence_ladder(g, depth, policy);
        const bool ok = v.recurrent && static_cast<int>(v.rungs.size()) == depth;
        r.verdict(std::string(label) + " ladder passes rung " + std::to_string(depth), ok, "ladders",
                  ladder_rows(r, label, v), v.describe());
    }

    const Signal tent = g1 - g2;
    auto& prof = r.table("tent_profile", {"t", "re", "im"});
    std::vector<std::size_t> prof_rows;
    bool shape = true;
    for (double t : {-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5}) {
        const Complex z = tent.eval(t)[0];
        prof_rows.push_back(prof.add({t, z.real(), z.imag()}));
        const Complex expect = Complex{0.0, 2.0 * std::max(0.0, 1.0 - std::abs(t))};
        shape = shape && std::abs(z - expect) <= 1e-12;
    }
    r.verdict("g1 - g2 is the tent supported on (-1, 1) with peak 2i", shape, "tent_profile", prof_rows);

    const auto range = get_list(p, "tent_range");
    const auto set = almost_period_set(tent, get(p, "tent_eps"), window(p, get(p, "tent_window")),
                                       {range.at(0), range.at(1)}, scan_options(p, ctx));
    auto& gt = r.table("tent_scan", kGapColumns);
    const auto row = gap_row(gt, "g1-g2", set);
    r.verdict("g1 - g2 has no almost periods in the range (gap +inf)",
              set.members.empty() && std::isinf(set.max_gap), "tent_scan", {row});

    const auto joint = recurrence_ladder(joint_tuple({g1, g2}), get_int(p, "joint_depth"), policy);
    r.verdict("joint tuple (g1, g2) fails at eps = 0.5", !joint.recurrent && joint.rejected_at == 1,
              "ladders", ladder_rows(r, "(g1,g2)", joint), joint.describe());
    return r;
}

// -------------------------------------------------------------- lacunary

Report lacunary(const ojson& p, const RunContext& ctx) {
    const int order = get_int(p, "order");
    if (order < 4 || order > 16) throw ConfigError("lacunary: order must lie in [4, 16]");
    Report r = start("lacunary", p);
    const auto opt = scan_options(p, ctx);
    const double reach = std::ldexp(1.0, order);
    const Signal f = Signal::lacunary(order);

    const auto set = almost_period_set(f, get(p, "eps"), window(p, get(p, "window")), {0.0, reach}, opt);
    auto& ft = r.table("f_scan", kGapColumns);
    const auto frow = gap_row(ft, "f", set);
    const double gap_min = std::ldexp(1.0, order - 1);
    r.verdict("E(f, eps, K) has max gap >= 2^(N-1) on [0, 2^N]", set.max_gap >= gap_min, "f_scan", {frow},
              "max_gap " + fmt(set.max_gap) + " vs " + fmt(gap_min));

    const auto v = recurrence_ladder(f, get_int(p, "ladder_depth"), ladder_policy(p, ctx));
    r.verdict("f ladder fails", !v.recurrent, "ladders", ladder_rows(r, "f", v), v.describe());

    const auto zero = get_list(p, "zero_interval");
    const ProbeWindow zw = ProbeWindow::interval(zero.at(0), zero.at(1), window_step(p));
    const double zero_sup = sup_distance(f, Signal::zero(), zw);
    auto& zt = r.table("zero_check", {"lo", "hi", "samples", "sup_abs"});
    const auto zrow = zt.add({zero.at(0), zero.at(1), zw.cells() + 1, zero_sup});
    r.verdict("f vanishes on the zero interval", zero_sup <= 1e-12, "zero_check", {zrow},
              "sup " + fmt(zero_sup));

    const Signal pf = indefinite_integral(f, 0.0);
    const auto windows = get_list(p, "integral_windows");
    const double irange = get(p, "integral_range");
    for (double half : windows)
        if (half + irange > reach) throw ConfigError("lacunary: integral windows must stay inside [-2^N, 2^N]");
    auto& pt = r.table("pf_gaps", kGapColumns);
    for (double eps : get_list(p, "integral_eps")) {
        std::vector<double> gaps;
        std::vector<std::size_t> rows;
        for (double half : windows) {
            const auto s = almost_period_set(pf, eps, window(p, half), {0.0, irange}, opt);
            rows.push_back(gap_row(pt, "Pf", s));
            gaps.push_back(s.max_gap);
        }
        const auto [lo, hi] = std::minmax_element(gaps.begin(), gaps.end());
        const double ratio = *hi / *lo;
        r.verdict("Pf gap at eps = " + fmt(eps) + " is K-stable", ratio <= get(p, "stability_factor"), "pf_gaps",
                  rows, "max/min " + fmt(ratio));
    }
    return r;
}

// ------------------------------------------------------------------ BBAK

Signal bbak_forcing(int d) {
    std::vector<Signal> parts;
    for (int k = 1; k <= d; ++k) parts.push_back(Signal::cosine(1.0 / k, 1.0 / k));
    return Signal::stack(parts);
}

Signal bbak_integral(int d) {
    std::vector<Signal> parts;
    for (int k = 1; k <= d; ++k) parts.push_back(Signal::sine(1.0 / k));
    return Signal::stack(parts);
}

Report bbak(const ojson& p, const RunContext& ctx) {
    const auto dims = p.at("dims").get<std::vector<int>>();
    if (dims.empty()) throw ConfigError("bbak: dims must be non-empty");
    for (int d : dims)
        if (d < 1) throw ConfigError("bbak: dims must be positive");
    Report r = start("bbak", p);
    const auto opt = scan_options(p, ctx);
    const auto policy = ladder_policy(p, ctx);

    // Positive branch: bounded integral of a mean-zero ap function.
    const Signal pcos = indefinite_integral(Signal::cosine(), 0.0);
    const auto pv = recurrence_ladder(pcos, get_int(p, "positive_ladder_depth"), policy);
    r.verdict("positive branch: P cos ladder passes", pv.recurrent, "ladders", ladder_rows(r, "P cos", pv),
              pv.describe());

    auto& gt = r.table("pf_gaps", {"d", "eps", "window_lo", "window_hi", "range_lo", "range_hi", "step",
                                   "members", "max_gap"});
    auto& it = r.table("integral_check", {"d", "sup_pf", "quadrature_vs_closed_form"});
    std::vector<double> gaps;
    std::vector<std::size_t> gap_rows, sup_rows, check_rows;
    const double check_half = get(p, "integral_check_window");
    bool bounded = true, integral_ok = true, fd_ok = true;
    std::vector<std::size_t> fd_rows;
    for (int d : dims) {
        const Signal pf = bbak_integral(d);
        const auto set = almost_period_set(pf, get(p, "eps"), window(p, get(p, "window")),
                                           {0.0, get(p, "range")}, opt);
        const Interval k = set.window.bounds();
        gap_rows.push_back(gt.add({d, set.eps, k.lo, k.hi, set.range.lo, set.range.hi, set.step,
                                   set.members.size(), num(set.max_gap)}));
        gaps.push_back(set.max_gap);

        const auto block = pf.sample(0.0, 0.1, static_cast<std::size_t>(get(p, "range") * 10.0) + 1);
        double sup = 0.0;
        for (const auto& z : block.data) sup = std::max(sup, std::abs(z));
        const double diff = sup_distance(indefinite_integral(bbak_forcing(d), 0.0), pf,
                                         ProbeWindow::symmetric(check_half, window_step(p)));
        const auto row = it.add({d, sup, diff});
        sup_rows.push_back(row);
        bounded = bounded && sup <= 1.0;
        integral_ok = integral_ok && diff <= get(p, "integral_tol");

        const auto fv = recurrence_ladder(bbak_forcing(d), get_int(p, "fd_ladder_depth"), policy);
        const auto rows = ladder_rows(r, "f_" + std::to_string(d), fv);
        fd_rows.insert(fd_rows.end(), rows.begin(), rows.end());
        fd_ok = fd_ok && fv.recurrent;
    }
    r.verdict("f_d ladder passes for every d", fd_ok, "ladders", fd_rows);
    r.verdict("||Pf_d|| <= 1 for every d", bounded, "integral_check", sup_rows);
    r.verdict("quadrature Pf_d matches the closed form", integral_ok, "integral_check", sup_rows,
              "tolerance " + fmt(get(p, "integral_tol")));
    r.verdict("L(1/2, K) for Pf_d strictly increases with d", strictly_increasing(gaps), "pf_gaps", gap_rows);

    sin_reference(r, p.at("sin_reference"), p, opt, nullptr);
    return r;
}

// ------------------------------------------------- difference property

Report difference_property(const ojson& p, const RunContext& ctx) {
    Report r = start("difference_property", p);
    const auto policy = ladder_policy(p, ctx);
    const int depth = get_int(p, "ladder_depth");
    const ojson& steps = p.at("h");
    struct Case {
        const char* name;
        Signal f;
        bool expect;
    };
    const std::vector<Case> cases{{"sin", Signal::sine(), true},
                                  {"pi_phi", Signal::aa_step(AaBranch::Phi), true},
                                  {"chirp", Signal::chirp(), false}};
    for (const auto& c : cases) {
        const double h = get(steps, c.name);
        if (!(h > 0.0)) throw ConfigError("difference_property: steps must be positive");
        const auto fv = recurrence_ladder(c.f, depth, policy);
        const auto dv = recurrence_ladder(difference(c.f, h), depth, policy);
        auto rows = ladder_rows(r, c.name, fv);
        const auto drows = ladder_rows(r, std::string("D_") + fmt(h) + " " + c.name, dv);
        rows.insert(rows.end(), drows.begin(), drows.end());
        if (c.expect) {
            r.verdict(std::string(c.name) + ": F and its difference both pass", fv.recurrent && dv.recurrent,
                      "ladders", rows, fv.describe() + "; " + dv.describe());
        } else {
            r.verdict(std::string(c.name) + ": difference fails at the eps = 0.5 rung, consistent with F",
                      !dv.recurrent && dv.rejected_at == 1 && !fv.recurrent, "ladders", rows,
                      fv.describe() + "; " + dv.describe());
        }
    }
    return r;
}

// ------------------------------------------------------ bounded solutions

struct NamedSignal {
    std::string name;
    Signal f;
};

struct NamedOde {
    std::string name;
    OdeSystem ode;
};

std::vector<NamedSignal> bn_forcings() {
    return {{"sin+sin(sqrt2 t)", Signal::sine() + Signal::sine(kSqrt2)},
            {"pi_phi", Signal::aa_step(AaBranch::Phi)}};
}

std::vector<NamedOde> bn_odes() {
    return {{"y'+2y", OdeSystem::scalar({2.0})}, {"y''+3y'+2y", OdeSystem::scalar({2.0, 3.0})}};
}

GreenOptions green_options(const ojson& p) {
    GreenOptions g;
    g.step = get(p, "step");
    return g;
}

double closed_form_error(const Trajectory& traj, int k, const std::function<double(double)>& exact) {
    double err = 0.0;
    for (std::size_t i = 0; i < traj.count(); ++i)
        err = std::max(err, std::abs(traj.at(k, 0, i) - Complex{exact(traj.time(i)), 0.0}));
    return err;
}

double forcing_sup(const Signal& f, const Trajectory& traj) {
    const auto block = f.sample(traj.t0(), traj.step(), traj.count());
    double sup = 0.0;
    for (const auto& z : block.data) sup = std::max(sup, std::abs(z));
    return sup;
}

Report bohr_neugebauer(const ojson& p, const RunContext& ctx) {
    Report r = start("bohr_neugebauer", p);
    const auto opt = scan_options(p, ctx);
    const auto policy = ladder_policy(p, ctx);
    const auto gopt = green_options(p);
    const double horizon = get(p, "horizon");
    const int depth = get_int(p, "ladder_depth");
    const double half = get(p, "window");
    const double trange = get(p, "transfer_range");

    auto& st = r.table("solves", {"forcing", "ode", "residual", "sup_y", "sup_dy", "grows", "kernel_l1",
                                  "tail", "tail_mass", "ladder"});
    auto& tt = r.table("transfer", {"forcing", "ode", "eps_f", "window_f", "gap_f", "eps_y", "window_y",
                                    "gap_y", "ratio", "checked", "violators", "worst_excess"});
    auto& mt = r.table("modulus", {"forcing", "ode", "delta", "modulus", "lipschitz_bound"});

    std::vector<std::size_t> solve_rows, ladder_rows_all, transfer_rows, modulus_rows, example_rows;
    bool residual_ok = true, bounded = true, ladders_ok = true, inclusion_ok = true, one_sided = true,
         modulus_ok = true, example_ok = true;
    for (const auto& forcing : bn_forcings()) {
        for (const auto& sys : bn_odes()) {
            const auto info = green_kernel_info(sys.ode, gopt);
            const Trajectory traj = green_bounded_solve(sys.ode, forcing.f, horizon, gopt);
            const auto v = trajectory_ladder(traj, 0, depth, policy);
            const auto lrows = ladder_rows(r, "y: " + sys.name + " = " + forcing.name, v);
            ladder_rows_all.insert(ladder_rows_all.end(), lrows.begin(), lrows.end());
            const double eta = gopt.tail_mass / info.min_abs_re;
            const auto row = st.add({forcing.name, sys.name, traj.error_estimate, traj.sup(0), traj.sup(1),
                                     traj.grows(0), info.kernel_l1, info.tail, eta, v.describe()});
            solve_rows.push_back(row);
            residual_ok = residual_ok && traj.error_estimate <= get(p, "residual_max");
            bounded = bounded && !traj.grows(0) && std::isfinite(traj.sup(0));
            ladders_ok = ladders_ok && v.recurrent;

            const Signal y = traj.as_signal(0);
            const auto mod = uc_modulus(y, window(p, half), get_list(p, "modulus_deltas"));
            for (const auto& e : mod) {
                // sup|y'| is taken on the grid; the slack covers its O(step^2) miss.
                const double bound = e.delta * traj.sup(1) * (1.0 + get(p, "modulus_slack"));
                modulus_rows.push_back(mt.add({forcing.name, sys.name, e.delta, e.modulus, bound}));
                modulus_ok = modulus_ok && e.modulus <= bound;
            }

            // Almost periods of f on the widened window are almost periods
            // of y at the transferred level.
            const double pad = std::ceil(info.tail);
            const double fsup = forcing_sup(forcing.f, traj);
            for (double eps : get_list(p, "transfer_eps")) {
                const auto ef = almost_period_set(forcing.f, eps, window(p, half + pad), {0.0, trange}, opt);
                const double eps_y = info.kernel_l1 * eps + 2.0 * eta * fsup;
                const auto ey = almost_period_set(y, eps_y, window(p, half), {0.0, trange}, opt);
                std::size_t violators = 0;
                double excess = -std::numeric_limits<double>::infinity();
                const double slack = 10.0 * get(p, "residual_max");
                for (double tau : ef.members) {
                    const double d = sup_distance(translate(y, tau), y, window(p, half));
                    excess = std::max(excess, d - eps_y);
                    if (d > eps_y + slack) ++violators;
                }
                const double ratio = ey.max_gap / ef.max_gap;
                const auto trow = tt.add({forcing.name, sys.name, eps, half + pad, num(ef.max_gap), eps_y, half,
                                          num(ey.max_gap), num(ratio), ef.members.size(), violators, num(excess)});
                transfer_rows.push_back(trow);
                inclusion_ok = inclusion_ok && violators == 0;
                one_sided = one_sided && ey.max_gap <= get(p, "transfer_factor") * ef.max_gap;
                if (forcing.name == "pi_phi" && sys.name == "y'+2y") {
                    example_rows.push_back(trow);
                    const double f = get(p, "transfer_factor");
                    example_ok = example_ok && ratio <= f && ratio >= 1.0 / f;
                }
            }
        }
    }
    r.verdict("solver residual ||Ly - f|| within bound", residual_ok, "solves", solve_rows,
              "bound " + fmt(get(p, "residual_max")));
    r.verdict("solutions bounded (no growth on the horizon)", bounded, "solves", solve_rows);
    r.verdict("y ladders pass", ladders_ok, "ladders", ladder_rows_all);
    r.verdict("uc modulus of y within delta * sup|y'| (relative slack modulus_slack)", modulus_ok, "modulus", modulus_rows);
    r.verdict("transfer inclusion: every scanned almost period of f moves y by at most g1 * eps + 2 eta ||f||",
              inclusion_ok, "transfer", transfer_rows);
    r.verdict("gap of y at transferred level <= factor * gap of f", one_sided, "transfer", transfer_rows);
    r.verdict("y'+2y = pi(phi): gap tables within factor 2 (both directions)", example_ok, "transfer",
              example_rows);

    auto& ct = r.table("closed_form", {"case", "quantity", "measured", "expected", "error"});
    const double tol = get(p, "closed_form_tol");
    {
        const auto traj = green_bounded_solve(OdeSystem::scalar({1.0}), Signal::sine(), 100.0, gopt);
        const double expect = std::sqrt(0.5);
        const auto row = ct.add({"y'+y = sin", "sup |y|", traj.sup(0), expect, std::abs(traj.sup(0) - expect)});
        r.verdict("y'+y = sin: ||y|| = sqrt(2)/2", std::abs(traj.sup(0) - expect) <= tol, "closed_form", {row});
    }
    {
        const auto traj = green_bounded_solve(OdeSystem::scalar({2.0}), Signal::sine(), 100.0, gopt);
        const double err =
            closed_form_error(traj, 0, [](double t) { return (2.0 * std::sin(t) - std::cos(t)) / 5.0; });
        const auto row = ct.add({"y'+2y = sin", "sup |y - (2 sin - cos)/5|", err, 0.0, err});
        r.verdict("y'+2y = sin matches (2 sin t - cos t)/5", err <= tol, "closed_form", {row});
    }
    return r;
}

// ------------------------------------------------------ Esclangon-Landau

Report esclangon(const ojson& p, const RunContext& ctx) {
    Report r = start("esclangon", p);
    const auto policy = ladder_policy(p, ctx);
    const auto gopt = green_options(p);
    const int depth = get_int(p, "ladder_depth");
    const OdeSystem ode = OdeSystem::scalar({2.0, 3.0});

    auto& st = r.table("derivatives", {"forcing", "order", "sup", "grows", "ladder"});
    auto& bt = r.table("triangle_bound", {"forcing", "sup_f", "sup_y", "sup_dy", "sup_d2y", "bound"});
    bool ladders_ok = true, bounded = true, triangle_ok = true;
    std::vector<std::size_t> ladder_rows_all, deriv_rows, bound_rows, pi_rows;
    for (const auto& forcing : bn_forcings()) {
        const Trajectory traj = green_bounded_solve(ode, forcing.f, get(p, "horizon"), gopt);
        const auto checks = esclangon_check(traj, 2, depth, policy);
        for (const auto& c : checks) {
            deriv_rows.push_back(st.add({forcing.name, c.order, c.sup, c.growth_flag,
                                         c.has_ladder ? c.ladder.describe() : "-"}));
            bounded = bounded && !c.growth_flag && std::isfinite(c.sup);
            if (c.has_ladder) {
                const auto rows = ladder_rows(r, "y^(" + std::to_string(c.order) + "): " + forcing.name, c.ladder);
                ladder_rows_all.insert(ladder_rows_all.end(), rows.begin(), rows.end());
                ladders_ok = ladders_ok && c.ladder.recurrent;
                if (c.order == 1 && forcing.name == "pi_phi") pi_rows = rows;
            }
        }
        // The equation gives y'' = f - 3y' - 2y pointwise on the grid.
        const double fsup = forcing_sup(forcing.f, traj);
        const double bound = fsup + 3.0 * checks[1].sup + 2.0 * checks[0].sup;
        bound_rows.push_back(bt.add({forcing.name, fsup, checks[0].sup, checks[1].sup, checks[2].sup, bound}));
        // Rounding of the three-term sum is the only slack.
        triangle_ok = triangle_ok && checks[2].sup <= bound * (1.0 + 8.0 * std::numeric_limits<double>::epsilon());
    }
    r.verdict("y and y' ladders pass", ladders_ok, "ladders", ladder_rows_all);
    r.verdict("y, y', y'' bounded", bounded, "derivatives", deriv_rows);
    r.verdict("sup|y''| <= ||f|| + 3 sup|y'| + 2 sup|y|", triangle_ok, "triangle_bound", bound_rows);
    r.verdict("y' ladder passes rung 2 for f = pi(phi)",
              !pi_rows.empty() && r.table("ladders").rows[pi_rows.back()][9].get<bool>() && pi_rows.size() >= 2,
              "ladders", pi_rows);

    auto& ct = r.table("closed_form", {"case", "order", "error"});
    const auto traj = green_bounded_solve(ode, Signal::sine(), 100.0, gopt);
    const double e0 = closed_form_error(traj, 0, [](double t) { return 0.1 * std::sin(t) - 0.3 * std::cos(t); });
    const double e1 = closed_form_error(traj, 1, [](double t) { return 0.1 * std::cos(t) + 0.3 * std::sin(t); });
    const auto r0 = ct.add({"y''+3y'+2y = sin", 0, e0});
    const auto r1 = ct.add({"y''+3y'+2y = sin", 1, e1});
    r.verdict("y''+3y'+2y = sin: y and y' match the closed form",
              std::max(e0, e1) <= get(p, "closed_form_tol"), "closed_form", {r0, r1});
    return r;
}

// ------------------------------------------------------------- half line

Report halfline(const ojson& p, const RunContext& ctx) {
    Report r = start("halfline", p);
    const double horizon = get(p, "horizon");
    const double step = get(p, "step");
    const int depth = get_int(p, "ladder_depth");
    LadderPolicy policy = ladder_policy(p, ctx);
    policy.half_line = true;
    r.provenance["half_line"] = "tau >= 0, windows [0, 4n]";

    const OdeSystem ode = OdeSystem::scalar({1.0, 0.0});
    auto& sp = r.table("spectrum", {"ode", "re", "im", "multiplicity"});
    std::vector<std::size_t> sp_rows;
    bool on_axis = true;
    for (const auto& root : spectrum(ode)) {
        sp_rows.push_back(sp.add({"y''+y", root.value.real(), root.value.imag(), root.multiplicity}));
        on_axis = on_axis && std::abs(root.value.real()) <= 1e-12 && root.value.real() >= -1e-12;
    }
    r.verdict("spectrum of y''+y lies in Re lambda >= 0 (on the imaginary axis)", on_axis, "spectrum", sp_rows);

    const Signal f = Signal::sine(kSqrt2);
    auto& bt = r.table("branches", {"branch", "init_y", "init_dy", "sup_y", "grows", "closed_form_error",
                                    "gap_fraction", "ladder"});

    const Trajectory matched = ivp_halfline_solve(ode, f, {{0.0}, {-kSqrt2}}, 0.0, horizon, step);
    double err = 0.0;
    for (std::size_t i = 0; i < matched.count() && matched.time(i) <= get(p, "check_end") + 1e-9; ++i)
        err = std::max(err, std::abs(matched.at(0, 0, i) + std::sin(kSqrt2 * matched.time(i))));
    const auto mv = trajectory_ladder(matched, 0, depth, policy);
    const auto mrow = bt.add({"matched", 0.0, -kSqrt2, matched.sup(0), matched.grows(0), err, policy.gap_fraction,
                              mv.describe()});
    r.verdict("matched data reproduces y_p = -sin(sqrt2 t)", err <= get(p, "closed_form_tol"), "branches", {mrow},
              "error " + fmt(err));
    r.verdict("matched trajectory ladder passes on the half line", mv.recurrent, "ladders",
              ladder_rows(r, "matched", mv), mv.describe());

    const Trajectory mixed = ivp_halfline_solve(ode, f, {{0.0}, {1.0 - kSqrt2}}, 0.0, horizon, step);
    const auto strict = trajectory_ladder(mixed, 0, depth, policy);
    bt.add({"mixed (default gap fraction)", 0.0, 1.0 - kSqrt2, mixed.sup(0), mixed.grows(0), "-",
            policy.gap_fraction, strict.describe()});
    LadderPolicy relaxed = policy;
    relaxed.gap_fraction = get(p, "mixed_gap_fraction");
    const auto xv = trajectory_ladder(mixed, 0, depth, relaxed);
    const auto xrow = bt.add({"mixed", 0.0, 1.0 - kSqrt2, mixed.sup(0), mixed.grows(0), "-", relaxed.gap_fraction,
                              xv.describe()});
    auto rows = ladder_rows(r, "mixed", xv);
    rows.push_back(xrow);
    r.verdict("adding sin t keeps a bounded, ladder-passing trajectory", xv.recurrent && !mixed.grows(0), "ladders",
              rows, xv.describe());

    const Trajectory blow = ivp_halfline_solve(OdeSystem::scalar({-1.0}), Signal::sine(), {{0.0}}, 0.0,
                                               get(p, "blowup_horizon"), step);
    const auto brow = bt.add({"y'-y = sin", 0.0, "-", blow.sup(0), blow.grows(0), "-", "-", "-"});
    r.verdict("y'-y with bounded forcing grows and is flagged outside the hypotheses", blow.grows(0), "branches",
              {brow}, "sup " + fmt(blow.sup(0)));
    return r;
}

// ---------------------------------------------------------- chirp integral

Report chirp_integral(const ojson& p, const RunContext& ctx) {
    Report r = start("chirp_integral", p);
    const Signal pg = indefinite_integral(Signal::chirp(), 0.0);
    const Complex limit = std::sqrt(2.0 * std::numbers::pi) / 4.0 * Complex{1.0, 1.0};

    auto& vt = r.table("values", {"t", "re", "im", "abs_minus_limit"});
    const Complex at0 = pg.eval(0.0)[0];
    const auto r0 = vt.add({0.0, at0.real(), at0.imag(), std::abs(at0 - limit)});
    r.verdict("Pg(0) = 0", at0 == Complex{}, "values", {r0});
    const double tp = get(p, "t_probe");
    const Complex atp = pg.eval(tp)[0];
    const auto rp = vt.add({tp, atp.real(), atp.imag(), std::abs(atp - limit)});
    r.verdict("|Pg(t_probe) - (sqrt(2 pi)/4)(1 + i)| within tolerance", std::abs(atp - limit) <= get(p, "limit_tol"),
              "values", {rp}, "distance " + fmt(std::abs(atp - limit)));
    const Complex atm = pg.eval(-tp)[0];
    const auto rm = vt.add({-tp, atm.real(), atm.imag(), std::abs(atm - limit)});
    r.verdict("Pg is odd: Pg(-t) = -Pg(t)", std::abs(atm + atp) <= 1e-9, "values", {rp, rm});

    const double dt = get(p, "sweep_step");
    const double end = get(p, "sweep_end");
    const auto count = static_cast<std::size_t>(std::llround(end / dt)) + 1;
    const auto block = pg.sample(0.0, dt, count);
    double sup = 0.0, sup_t = 0.0, tail = 0.0, tail_t = 0.0;
    const double t_start = get(p, "tail_start");
    for (std::size_t i = 0; i < count; ++i) {
        const double t = dt * static_cast<double>(i);
        const double a = std::abs(block.data[i]);
        if (a > sup) {
            sup = a;
            sup_t = t;
        }
        if (t >= t_start) {
            const double scaled = std::abs(block.data[i] - limit) * t;
            if (scaled > tail) {
                tail = scaled;
                tail_t = t;
            }
        }
    }
    auto& st = r.table("sweep", {"quantity", "value", "at_t", "bound"});
    const double c = get(p, "tail_constant");
    const auto trow = st.add({"max t |Pg(t) - limit| on [tail_start, sweep_end]", tail, tail_t, c});
    r.verdict("tail bound |Pg(t) - limit| <= c / t", tail <= c, "sweep", {trow}, "max t|Pg - limit| " + fmt(tail));
    // Beyond the sweep the tail bound caps |Pg| by |limit| + c / sweep_end.
    const double beyond = std::abs(limit) + c / end;
    const auto srow = st.add({"sup |Pg| on [0, sweep_end]", sup, sup_t, get(p, "sup_bound")});
    const auto brow = st.add({"|limit| + c / sweep_end", beyond, end, get(p, "sup_bound")});
    r.verdict("Pg bounded by sup_bound", sup <= get(p, "sup_bound") && beyond <= get(p, "sup_bound"), "sweep",
              {srow, brow}, "sup " + fmt(sup) + " at t = " + fmt(sup_t));

    const auto v = recurrence_ladder(pg, get_int(p, "ladder_depth"), ladder_policy(p, ctx));
    r.verdict("Pg ladder is rejected (bounded without recurrence)", !v.recurrent, "ladders",
              ladder_rows(r, "Pg", v), v.describe());
    return r;
}

// ------------------------------------------------------------- registry

std::vector<ExperimentEntry> build_registry() {
    std::vector<ExperimentEntry> reg;
    reg.push_back({"hierarchy", "AP / AA / REC separation with sin, pi(phi) and the chirp",
                   {{"eps", 0.1},
                    {"windows", {5, 20, 80}},
                    {"range", 6000},
                    {"sin_variation_max", 0.10},
                    {"pi_growth_min", 3.0},
                    {"ladder_depth", 3},
                    {"chirp_eps", 0.5},
                    {"chirp_window", 2},
                    {"chirp_range", 800},
                    {"probes", {0.0, 1.0, kSqrt2}},
                    {"probe_range", 400},
                    {"probe_step", 1e-4},
                    {"probe_gap_fraction", 0.05},
                    {"scan", scan_defaults()}},
                   hierarchy});
    reg.push_back({"nonlinearity", "psi_1, psi_2 extensions: each recurrent, difference and pair not",
                   {{"ladder_depth", 2},
                    {"tent_eps", 0.5},
                    {"tent_window", 2},
                    {"tent_range", {5, 10000}},
                    {"joint_depth", 2},
                    {"scan", scan_defaults()}},
                   nonlinearity});
    reg.push_back({"lacunary", "non-recurrent lacunary sum with almost periodic integral",
                   {{"order", 8},
                    {"eps", 0.5},
                    {"window", 4},
                    {"ladder_depth", 2},
                    {"zero_interval", {-4, 3}},
                    {"integral_eps", {0.2, 0.1, 0.05}},
                    {"integral_windows", {8, 32}},
                    {"integral_range", 200},
                    {"stability_factor", 2.0},
                    {"scan", scan_defaults()}},
                   lacunary});
    reg.push_back({"bbak", "bounded integrals: positive branch and the truncated c0 shadow",
                   {{"dims", {1, 2, 4, 8, 16}},
                    {"eps", 0.5},
                    {"window", 5},
                    {"range", 20000},
                    {"fd_ladder_depth", 1},
                    {"positive_ladder_depth", 2},
                    {"integral_check_window", 20},
                    {"integral_tol", 1e-6},
                    {"sin_reference", sin_reference_defaults()},
                    {"scan", scan_defaults()}},
                   bbak});
    reg.push_back({"difference_property", "recurrent differences and recurrent functions",
                   {{"h", {{"sin", 1.0}, {"pi_phi", 0.5}, {"chirp", 1.0}}},
                    {"ladder_depth", 2},
                    {"scan", scan_defaults()}},
                   difference_property});
    reg.push_back({"bohr_neugebauer", "bounded solutions of hyperbolic ODEs inherit recurrence",
                   {{"horizon", 3300},
                    {"step", 0.01},
                    {"residual_max", 1e-5},
                    {"ladder_depth", 2},
                    {"window", 5},
                    {"transfer_eps", {0.4, 0.2, 0.1}},
                    {"transfer_range", 2000},
                    {"transfer_factor", 2.0},
                    {"modulus_deltas", {0.01, 0.1, 0.5}},
                    {"modulus_slack", 1e-3},
                    {"closed_form_tol", 1e-6},
                    {"scan", scan_defaults()}},
                   bohr_neugebauer});
    reg.push_back({"esclangon", "derivatives of bounded solutions are bounded and recurrent",
                   {{"horizon", 3300},
                    {"step", 0.01},
                    {"ladder_depth", 2},
                    {"closed_form_tol", 1e-6},
                    {"scan", scan_defaults()}},
                   esclangon});
    reg.push_back({"halfline", "half-line solutions of y''+y = sin(sqrt2 t)",
                   {{"horizon", 3300},
                    {"step", 0.01},
                    {"check_end", 200},
                    {"closed_form_tol", 1e-5},
                    {"ladder_depth", 2},
                    {"mixed_gap_fraction", 0.1},
                    {"blowup_horizon", 40},
                    {"scan", scan_defaults()}},
                   halfline});
    reg.push_back({"chirp_integral", "convergent, bounded, non-recurrent integral of the chirp",
                   {{"t_probe", 100},
                    {"limit_tol", 0.01},
                    {"tail_start", 10},
                    {"tail_constant", 0.8},
                    {"sweep_end", 1000},
                    {"sweep_step", 0.05},
                    {"sup_bound", 1.19},
                    {"ladder_depth", 1},
                    {"scan", scan_defaults()}},
                   chirp_integral});
    return reg;
}

}  // namespace

const std::vector<ExperimentEntry>& experiment_registry() {
    static const std::vector<ExperimentEntry> reg = build_registry();
    return reg;
}

Report run_hierarchy(const RunContext& ctx) { return run_experiment("hierarchy", ojson::object(), ctx); }
Report run_nonlinearity(const RunContext& ctx) { return run_experiment("nonlinearity", ojson::object(), ctx); }

Report run_lacunary(int order, const RunContext& ctx) {
    nlohmann::json o = {{"order", order}};
    if (order < 8) {
        // Keep the integral windows inside [-2^N, 2^N].
        const double s = std::ldexp(1.0, order - 8);
        o["integral_windows"] = {8 * s, 32 * s};
        o["integral_range"] = 200 * s;
    }
    return run_experiment("lacunary", o, ctx);
}

Report run_bbak(const std::vector<int>& dims, const RunContext& ctx) {
    return run_experiment("bbak", {{"dims", dims}}, ctx);
}

Report run_difference_property(std::optional<double> h0, const RunContext& ctx) {
    nlohmann::json o = nlohmann::json::object();
    if (h0) o["h"] = {{"sin", *h0}, {"pi_phi", *h0}, {"chirp", *h0}};
    return run_experiment("difference_property", o, ctx);
}

Report run_bohr_neugebauer(const RunContext& ctx) { return run_experiment("bohr_neugebauer", ojson::object(), ctx); }
Report run_esclangon(const RunContext& ctx) { return run_experiment("esclangon", ojson::object(), ctx); }
Report run_halfline(const RunContext& ctx) { return run_experiment("halfline", ojson::object(), ctx); }
Report run_chirp_integral(const RunContext& ctx) { return run_experiment("chirp_integral", ojson::object(), ctx); }

}  // namespace reclab
