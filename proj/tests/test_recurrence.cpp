#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "reclab/recurrence.hpp"

using namespace reclab;

namespace {

const double kTwoPi = 2.0 * oracle::kPi;

Signal tent() { return Signal::aa_step(AaBranch::Psi1) - Signal::aa_step(AaBranch::Psi2); }

Signal quasi() { return Signal::sine() + Signal::sine(std::numbers::sqrt2); }

}  // namespace

TEST_SUITE("gaps and distances") {
    TEST_CASE("max_gap by definition") {
        CHECK(max_gap({0.0, kTwoPi, 2 * kTwoPi}, {0.0, 2 * kTwoPi}) == doctest::Approx(kTwoPi));
        CHECK(std::isinf(max_gap({}, {0.0, 10.0})));
        CHECK(max_gap({0.0, 1.0, 10.0}, {0.0, 10.0}) == 9.0);
        CHECK(max_gap({3.0}, {0.0, 10.0}) == oracle::max_gap({3.0}, 0.0, 10.0));
    }

    TEST_CASE("sup_distance") {
        const Signal s = Signal::sine();
        const auto k = ProbeWindow::interval(-oracle::kPi, oracle::kPi, 1e-3);
        CHECK(sup_distance(s, s, k) == 0.0);
        CHECK(sup_distance(s, Signal::zero(), k) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(sup_distance(s, translate(s, oracle::kPi), k) == doctest::Approx(2.0).epsilon(1e-6));
    }
}

TEST_SUITE("almost-period scans") {
    TEST_CASE("sin: exact periods near 0 and 2 pi") {
        ScanOptions opt;
        opt.tau_step = 1e-3;
        const auto set = almost_period_set(Signal::sine(), 1e-3, ProbeWindow::symmetric(10.0, 1e-3), {0.0, 20.0}, opt);
        REQUIRE(!set.members.empty());
        // sup_t |sin(t + tau) - sin t| = 2|sin(tau/2)| on any window of length >= 2 pi.
        for (double tau : set.members) CHECK(2.0 * std::abs(std::sin(tau / 2.0)) <= 1e-3 + 1e-12);
        CHECK(set.members.front() < 1e-3);
        const bool near_2pi = std::any_of(set.members.begin(), set.members.end(),
                                          [](double t) { return std::abs(t - kTwoPi) < 1e-3; });
        CHECK(near_2pi);
        CHECK(set.max_gap == doctest::Approx(kTwoPi).epsilon(1e-3));
    }

    TEST_CASE("sin: members agree with the closed-form criterion away from the boundary") {
        const double eps = 0.3;
        const auto set = almost_period_set(Signal::sine(), eps, ProbeWindow::symmetric(5.0), {0.0, 60.0});
        for (std::size_t i = 0; i <= 6000; ++i) {
            const double tau = 0.01 * static_cast<double>(i);
            const double d = 2.0 * std::abs(std::sin(tau / 2.0));
            const bool member = std::binary_search(set.members.begin(), set.members.end(), tau,
                                                   [](double a, double b) { return a < b - 1e-9; });
            if (d < eps - 1e-3) CHECK(member);
            if (d > eps + 1e-3) CHECK(!member);
        }
    }

    TEST_CASE("tent: no members, gap sentinel") {
        const auto set = almost_period_set(tent(), 0.5, ProbeWindow::symmetric(2.0), {5.0, 1000.0});
        CHECK(set.members.empty());
        CHECK(std::isinf(set.max_gap));
    }

    TEST_CASE("quasi-periodic signal has a finite gap") {
        const auto set = almost_period_set(quasi(), 0.3, ProbeWindow::symmetric(5.0), {0.0, 500.0});
        CHECK(!set.members.empty());
        CHECK(std::isfinite(set.max_gap));
        // Each member approximates both frequencies simultaneously.
        for (double tau : set.members) {
            CHECK(2.0 * std::abs(std::sin(tau / 2.0)) <= 0.3 + 1e-9);
            CHECK(2.0 * std::abs(std::sin(std::numbers::sqrt2 * tau / 2.0)) <= 0.3 + 1e-9);
        }
    }

    TEST_CASE("joint tuple scans the intersection") {
        const auto k = ProbeWindow::symmetric(5.0);
        const Interval range{0.0, 300.0};
        const auto a = almost_period_set(Signal::sine(), 0.3, k, range);
        const auto b = almost_period_set(Signal::sine(std::numbers::sqrt2), 0.3, k, range);
        const auto j = almost_period_set(joint_tuple({Signal::sine(), Signal::sine(std::numbers::sqrt2)}), 0.3, k, range);
        std::vector<double> both;
        std::set_intersection(a.members.begin(), a.members.end(), b.members.begin(), b.members.end(),
                              std::back_inserter(both));
        CHECK(j.members == both);
        const auto dup = almost_period_set(joint_tuple({Signal::sine(), Signal::sine()}), 0.3, k, range);
        CHECK(dup.members == a.members);
    }

    TEST_CASE("worker count does not change results") {
        ScanOptions one, four;
        four.workers = 4;
        one.block = four.block = 1024;
        const auto k = ProbeWindow::symmetric(4.0);
        const auto a = almost_period_set(quasi(), 0.4, k, {0.0, 400.0}, one);
        const auto b = almost_period_set(quasi(), 0.4, k, {0.0, 400.0}, four);
        CHECK(a.members == b.members);
        CHECK(a.max_gap == b.max_gap);
        REQUIRE(a.candidates.size() == b.candidates.size());
        for (std::size_t i = 0; i < a.candidates.size(); ++i)
            CHECK(a.candidates[i].refined_sup == b.candidates[i].refined_sup);
    }

    TEST_CASE("invalid scans are rejected") {
        CHECK_THROWS_AS(almost_period_set(Signal::sine(), -1.0, ProbeWindow::symmetric(1.0), {0.0, 1.0}), ConfigError);
        CHECK_THROWS_AS(almost_period_set(Signal::sine(), 0.1, ProbeWindow::symmetric(1.0), {2.0, 1.0}), ConfigError);
    }
}

TEST_SUITE("discrete probe scans") {
    TEST_CASE("chirp on three probes has a finite gap") {
        const std::vector<double> probes{0.0, 1.0, std::numbers::sqrt2};
        const auto set = discrete_period_scan(Signal::chirp(), 0.1, probes, {0.0, 1e5});
        CHECK(!set.members.empty());
        CHECK(std::isfinite(set.max_gap));
        for (double tau : set.members)
            for (double p : probes)
                CHECK(std::abs(std::polar(1.0, (p + tau) * (p + tau)) - std::polar(1.0, p * p)) <= 0.1 + 1e-9);
    }

    TEST_CASE("sin at probe 0 contains the grid points nearest 2 pi Z") {
        const auto set = discrete_period_scan(Signal::sine(), 0.01, {0.0}, {0.0, 40.0});
        for (int k = 0; k * kTwoPi <= 40.0; ++k) {
            const double near = std::round(k * kTwoPi / 0.01) * 0.01;
            CHECK(std::any_of(set.members.begin(), set.members.end(),
                              [&](double t) { return std::abs(t - near) < 1e-9; }));
        }
    }

    TEST_CASE("tent at probe 0 has no members") {
        const auto set = discrete_period_scan(tent(), 0.5, {0.0}, {5.0, 100.0});
        CHECK(set.members.empty());
    }
}

TEST_SUITE("ladders") {
    TEST_CASE("sin passes with gaps near 2 pi") {
        const auto v = recurrence_ladder(Signal::sine(), 2);
        CHECK(v.recurrent);
        REQUIRE(v.rungs.size() == 2);
        for (const auto& r : v.rungs) CHECK(r.max_gap <= kTwoPi + 0.05);
        CHECK(v.describe() == "empirically-recurrent (up to rung 2, range 3200)");
    }

    TEST_CASE("chirp is rejected at the first rung") {
        const auto v = recurrence_ladder(Signal::chirp(), 2);
        CHECK(!v.recurrent);
        CHECK(v.rejected_at == 1);
        CHECK(v.describe() == "rejected-at-rung-1");
    }

    TEST_CASE("joint tuples") {
        CHECK(recurrence_ladder(joint_tuple({Signal::sine(), Signal::cosine()}), 1).recurrent);
        const auto v = recurrence_ladder(joint_tuple({Signal::aa_step(AaBranch::Psi1), Signal::aa_step(AaBranch::Psi2)}), 1);
        CHECK(!v.recurrent);
    }

    TEST_CASE("rung schedule") {
        LadderPolicy p;
        p.s_cap = 1000.0;
        const auto v = recurrence_ladder(Signal::sine(), 3, p);
        REQUIRE(v.rungs.size() == 3);
        CHECK(v.rungs[0].eps == 0.5);
        CHECK(v.rungs[2].eps == 0.125);
        CHECK(v.rungs[1].window.lo == -4.0);
        CHECK(v.rungs[0].range == 800.0);
        CHECK(v.rungs[1].range == 1000.0);
        CHECK(v.rungs[1].gap_bound == 50.0);
        p.half_line = true;
        const auto h = recurrence_ladder(Signal::sine(), 1, p);
        CHECK(h.rungs[0].window.lo == 0.0);
        CHECK(h.rungs[0].window.hi == 4.0);
    }
}

TEST_SUITE("metric and inclusions") {
    TEST_CASE("metric d") {
        CHECK(metric_d(Signal::sine(), Signal::sine(), 5).value == 0.0);
        const auto d = metric_d(Signal::sine(), Signal::zero(), 6);
        CHECK(d.value == doctest::Approx(std::sin(1.0)).epsilon(1e-6));
        CHECK(d.achieving_n == 1);
        CHECK(metric_d(Signal::chirp(), Signal::zero(), 6).value <= 1.0);
    }

    TEST_CASE("inclusion of E(g) into E(Delta_h P g)") {
        const auto r = difference_period_inclusion(Signal::sine(), 1.0, 3, {0.0, 60.0});
        CHECK(r.holds);
        CHECK(r.m == 5);
        CHECK(r.checked > 0);
        CHECK(difference_period_inclusion(Signal::constant({1.0}), 0.5, 2, {0.0, 20.0}).holds);
        CHECK(difference_period_inclusion(quasi(), 0.5, 2, {0.0, 200.0}).holds);
    }

    TEST_CASE("cover inclusion search") {
        const auto k = ProbeWindow::symmetric(2.0);
        const auto r = cover_inclusion_search(Signal::sine(), 0.2, k, {oracle::kPi}, {0.8, 0.4, 0.2}, {0.0, 60.0});
        CHECK(r.verified);
        CHECK(r.delta == 0.4);
        CHECK(r.trials.back().violators == 0);
        const auto c = cover_inclusion_search(Signal::constant({2.0}), 0.1, k, {1.0}, {5.0}, {0.0, 10.0});
        CHECK(c.verified);
        const auto q = cover_inclusion_search(quasi(), 0.3, k, {1.0, std::numbers::sqrt2},
                                              {0.4, 0.2, 0.1, 0.05}, {0.0, 300.0});
        CHECK(q.verified);
        CHECK(q.delta > 0.0);
    }
}

TEST_SUITE("means, nets and moduli") {
    TEST_CASE("ergodic means") {
        const auto s = ergodic_mean(Signal::sine(), {10.0, 100.0, 1000.0}, {0.0, 3.0}, 1e-2, CVector{0.0});
        CHECK(std::abs(s.mean[0]) < 1e-3);
        for (std::size_t i = 0; i < s.deviations.size(); ++i)
            CHECK(s.deviations[i] <= 1.0 / std::vector<double>{10.0, 100.0, 1000.0}[i] + 1e-8);
        CHECK(s.ergodic);
        const auto c = ergodic_mean(Signal::constant({Complex{2.0, 1.0}}), {10.0, 100.0}, {0.0, 5.0});
        CHECK(std::abs(c.mean[0] - Complex{2.0, 1.0}) < 1e-9);
        CHECK(c.deviations.back() < 1e-9);
        const auto e = ergodic_mean(Signal::exponential(1.0), {10.0, 37.0}, {0.0, 1.0}, 1e-2, CVector{0.0});
        CHECK(e.deviations[0] == doctest::Approx(std::abs(std::sin(10.0)) / 10.0).epsilon(1e-6));
        CHECK(e.deviations[1] == doctest::Approx(std::abs(std::sin(37.0)) / 37.0).epsilon(1e-6));
        // Without a known mean a single probe cannot measure spread.
        CHECK_THROWS_AS(ergodic_mean(Signal::sine(), {10.0}, {0.0}), ConfigError);
        const auto spread = ergodic_mean(Signal::sine(), {10.0, 1000.0}, {0.0, 1.0, 2.0});
        CHECK(spread.ergodic);
    }

    TEST_CASE("range nets") {
        CHECK(range_net(Signal::constant({1.0}), 0.0, 0.1, 100, 0.1) == 1);
        const auto n = range_net(Signal::sine(), 0.0, 0.001, 10000, 0.1);
        CHECK(n >= 10);
        CHECK(n <= 40);
        CHECK(range_net(Signal::chirp(), 0.0, 0.001, 100001, 0.1) <= 127);
    }

    TEST_CASE("uniform-continuity modulus") {
        const auto k = ProbeWindow::symmetric(5.0);
        for (const auto& e : uc_modulus(Signal::constant({1.0}), k, {0.1, 0.5})) CHECK(e.modulus == 0.0);
        for (const auto& e : uc_modulus(Signal::sine(), k, {0.01, 0.1, 0.5})) CHECK(e.modulus <= e.delta + 1e-12);
        const auto c = uc_modulus(Signal::chirp(), ProbeWindow::interval(0.0, 100.0), {0.01});
        // |e^{i(t+s)^2} - e^{it^2}| = 2|sin(ts + s^2/2)|, about 2 sin(1) at t = 100.
        CHECK(c[0].modulus == doctest::Approx(2.0 * std::sin(1.00005)).epsilon(2e-2));
    }
}
