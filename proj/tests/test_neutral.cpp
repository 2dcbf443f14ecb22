#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "reclab/neutral.hpp"

using namespace reclab;

namespace {

ComplexMatrix scalar(Complex a) {
    ComplexMatrix m(1, 1);
    m(0, 0) = a;
    return m;
}

/// r = 1 neutral system with the given (delay, {a_0 .. a_n}) terms.
NeutralSystem scalar_neutral(int order, std::vector<std::pair<double, std::vector<Complex>>> terms) {
    NeutralSystem sys;
    sys.order = order;
    for (auto& [delay, coeffs] : terms) {
        sys.delays.push_back(delay);
        std::vector<ComplexMatrix> row;
        for (const auto& c : coeffs) row.push_back(scalar(c));
        sys.coeffs.push_back(row);
    }
    return sys;
}

double max_error(const Trajectory& traj, int k, const std::function<double(double)>& exact,
                 double lo = -1e300, double hi = 1e300) {
    double e = 0.0;
    for (std::size_t i = 0; i < traj.count(); ++i) {
        const double t = traj.time(i);
        if (t < lo || t > hi) continue;
        e = std::max(e, std::abs(traj.at(k, 0, i) - exact(t)));
    }
    return e;
}

}  // namespace

TEST_SUITE("neutral systems") {
    TEST_CASE("characteristic matrix") {
        const auto id = scalar_neutral(1, {{0.0, {0.0, 1.0}}});
        for (double w : {-3.0, 0.0, 2.5}) CHECK(std::abs(characteristic_matrix(id, w)(0, 0) - 1.0) < 1e-15);
        const auto cancel = scalar_neutral(1, {{0.0, {0.0, 1.0}}, {oracle::kPi, {0.0, 1.0}}});
        CHECK(std::abs(characteristic_matrix(cancel, 1.0)(0, 0)) < 1e-15);
        const auto strong = scalar_neutral(1, {{0.0, {0.0, 2.0}}, {1.0, {0.0, 1.0}}});
        CHECK(std::abs(characteristic_matrix(strong, 0.7)(0, 0) - (2.0 + std::polar(1.0, 0.7))) < 1e-15);
    }

    TEST_CASE("nondegeneracy grid check") {
        const auto id = scalar_neutral(1, {{0.0, {0.0, 1.0}}});
        const auto a = leading_symbol_nondegenerate(id);
        CHECK(a.holds);
        CHECK(a.min_abs_det == doctest::Approx(1.0));
        const auto cancel = scalar_neutral(1, {{0.0, {0.0, 1.0}}, {oracle::kPi, {0.0, 1.0}}});
        const auto b = leading_symbol_nondegenerate(cancel);
        CHECK(!b.holds);
        CHECK(b.min_abs_det < 1e-12);
        CHECK(std::abs(std::remainder(b.omega_at_min - 1.0, 2.0)) < 1e-9);
        const auto strong = scalar_neutral(1, {{0.0, {0.0, 2.0}}, {1.0, {0.0, 1.0}}});
        const auto c = leading_symbol_nondegenerate(strong, {-50.0, 50.0}, 1e-2, 0.5);
        CHECK(c.holds);
        // |2 + e^{i w}| >= 1 with equality at w = pi (mod 2 pi); the grid misses it by O(step^2).
        CHECK(c.min_abs_det == doctest::Approx(1.0).epsilon(1e-4));
    }

    TEST_CASE("forward operator") {
        const auto ode = as_neutral(OdeSystem::scalar({1.0}));
        const Signal r = apply_operator(ode, Signal::sine());
        for (double t = -5; t <= 5; t += 0.37) CHECK(std::abs(r.eval(t)[0] - (std::cos(t) + std::sin(t))) < 1e-14);

        const auto sys = scalar_neutral(1, {{-1.0, {0.0, 1.0}}, {0.0, {1.0, 1.0}}});
        const Signal n = apply_operator(sys, Signal::sine());
        for (double t = -5; t <= 5; t += 0.37)
            CHECK(std::abs(n.eval(t)[0] - (std::cos(t) + std::cos(t - 1.0) + std::sin(t))) < 1e-14);

        // Characters are eigenfunctions.
        const double w = 1.7;
        const auto mixed = scalar_neutral(2, {{0.0, {2.0, 0.5, 1.0}}, {0.8, {0.0, 1.0, 0.3}}});
        const Signal e = apply_operator(mixed, Signal::exponential(w));
        const Complex iw{0.0, w};
        const Complex symbol = (2.0 + 0.5 * iw + iw * iw) + (iw + 0.3 * iw * iw) * std::polar(1.0, 0.8 * w);
        for (double t = -3; t <= 3; t += 0.5) CHECK(std::abs(e.eval(t)[0] - symbol * std::polar(1.0, w * t)) < 1e-13);
    }

    TEST_CASE("validation") {
        NeutralSystem bad = scalar_neutral(1, {{1.0, {0.0, 1.0}}, {0.0, {0.0, 1.0}}});
        CHECK_THROWS_AS(bad.validate(), ConfigError);
        NeutralSystem zero_lead = scalar_neutral(1, {{0.0, {1.0, 0.0}}});
        CHECK_THROWS_AS(zero_lead.validate(), ConfigError);
    }
}

TEST_SUITE("spectrum") {
    TEST_CASE("scalar roots") {
        const auto [r1, r2] = oracle::quadratic_roots(3.0, 2.0);
        const auto roots = spectrum(OdeSystem::scalar({2.0, 3.0}));
        REQUIRE(roots.size() == 2);
        CHECK(std::abs(roots[0].value - r1) < 1e-12);
        CHECK(std::abs(roots[1].value - r2) < 1e-12);
        CHECK(std::abs(spectrum(OdeSystem::scalar({1.0}))[0].value + 1.0) < 1e-14);
        CHECK(std::abs(spectrum(OdeSystem::scalar({-1.0}))[0].value - 1.0) < 1e-14);
        const auto osc = spectrum(OdeSystem::scalar({1.0, 0.0}));
        REQUIRE(osc.size() == 2);
        CHECK(std::abs(std::abs(osc[0].value.imag()) - 1.0) < 1e-12);
        const auto dbl = spectrum(OdeSystem::scalar({1.0, 2.0}));
        REQUIRE(dbl.size() == 1);
        CHECK(dbl[0].multiplicity == 2);
        CHECK(std::abs(dbl[0].value + 1.0) < 1e-6);
    }

    TEST_CASE("block system roots are determinant zeros") {
        OdeSystem ode;
        ode.order = 1;
        ode.block = 2;
        ComplexMatrix a(2, 2);
        a(0, 0) = 1.0, a(0, 1) = 2.0, a(1, 0) = 0.0, a(1, 1) = 3.0;
        ode.coeffs = {a};
        const auto roots = spectrum(ode);
        REQUIRE(roots.size() == 2);
        CHECK(std::abs(roots[0].value + 3.0) < 1e-12);
        CHECK(std::abs(roots[1].value + 1.0) < 1e-12);
        for (const auto& r : roots) CHECK(r.residual < 1e-10);
    }
}

TEST_SUITE("bounded solutions") {
    TEST_CASE("y' + y = sin") {
        const auto traj = green_bounded_solve(OdeSystem::scalar({1.0}), Signal::sine(), 100.0);
        CHECK(max_error(traj, 0, [](double t) { return (std::sin(t) - std::cos(t)) / 2.0; }) < 1e-6);
        CHECK(traj.sup(0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-6));
        CHECK(traj.error_estimate <= 1e-5);
        CHECK(!traj.grows(0));
    }

    TEST_CASE("y' + y = 0 has only the zero bounded solution") {
        const auto traj = green_bounded_solve(OdeSystem::scalar({1.0}), Signal::zero(), 50.0);
        CHECK(traj.sup(0) == 0.0);
    }

    TEST_CASE("y'' + 3y' + 2y = cos") {
        const auto traj = green_bounded_solve(OdeSystem::scalar({2.0, 3.0}), Signal::cosine(), 100.0);
        CHECK(max_error(traj, 0, [](double t) { return (std::cos(t) + 3.0 * std::sin(t)) / 10.0; }) < 1e-6);
        CHECK(max_error(traj, 1, [](double t) { return (-std::sin(t) + 3.0 * std::cos(t)) / 10.0; }) < 1e-6);
        CHECK(traj.error_estimate <= 1e-5);
    }

    TEST_CASE("unstable root solves backward: y' - y = sin") {
        const auto traj = green_bounded_solve(OdeSystem::scalar({-1.0}), Signal::sine(), 60.0);
        // Bounded solution -(sin + cos)/2.
        CHECK(max_error(traj, 0, [](double t) { return -(std::sin(t) + std::cos(t)) / 2.0; }) < 1e-6);
    }

    TEST_CASE("kernel constants") {
        const auto info = green_kernel_info(OdeSystem::scalar({2.0}));
        CHECK(info.min_abs_re == doctest::Approx(2.0));
        CHECK(info.kernel_l1 == doctest::Approx(0.5).epsilon(1e-3));
    }

    TEST_CASE("spectrum on the imaginary axis is outside the hypotheses") {
        CHECK_THROWS_AS(green_bounded_solve(OdeSystem::scalar({1.0, 0.0}), Signal::sine(), 10.0), HypothesisError);
    }

    TEST_CASE("oversized forcing trips the numeric guard") {
        GreenOptions g;
        g.forcing_guard = 10.0;
        CHECK_THROWS_AS(green_bounded_solve(OdeSystem::scalar({1.0}), 100.0 * Signal::sine(), 10.0, g),
                        NumericGuardError);
    }
}

TEST_SUITE("initial value problems") {
    TEST_CASE("closed forms") {
        const auto c = ivp_halfline_solve(OdeSystem::scalar({0.0}), Signal::zero(), {{1.0}}, 0.0, 10.0, 0.01);
        CHECK(max_error(c, 0, [](double) { return 1.0; }) < 1e-14);
        const auto s = ivp_halfline_solve(OdeSystem::scalar({0.0}), Signal::cosine(), {{0.0}}, 0.0, 100.0, 1e-3);
        CHECK(max_error(s, 0, [](double t) { return std::sin(t); }) < 1e-6);
        const auto h = ivp_halfline_solve(OdeSystem::scalar({1.0, 0.0}), Signal::zero(), {{0.0}, {1.0}}, 0.0, 100.0, 0.01);
        CHECK(max_error(h, 0, [](double t) { return std::sin(t); }) < 1e-6);
        CHECK(max_error(h, 1, [](double t) { return std::cos(t); }) < 1e-6);
    }

    TEST_CASE("growth is flagged") {
        const auto lin = ivp_halfline_solve(OdeSystem::scalar({0.0}), Signal::constant({1.0}), {{0.0}}, 0.0, 100.0, 0.01);
        CHECK(lin.grows(0));
        const auto e = ivp_halfline_solve(OdeSystem::scalar({-1.0}), Signal::sine(), {{0.0}}, 0.0, 40.0, 0.01);
        CHECK(e.grows(0));
        CHECK_THROWS_AS(ivp_halfline_solve(OdeSystem::scalar({-1.0}), Signal::sine(), {{0.0}}, 0.0, 1000.0, 0.01),
                        NumericGuardError);
    }

    TEST_CASE("bad initial data") {
        CHECK_THROWS_AS(ivp_halfline_solve(OdeSystem::scalar({1.0, 0.0}), Signal::zero(), {{0.0}}, 0.0, 1.0, 0.01),
                        ConfigError);
    }
}

TEST_SUITE("Esclangon-Landau") {
    TEST_CASE("derivatives of y = sin") {
        const auto traj = ivp_halfline_solve(OdeSystem::scalar({1.0, 0.0}), Signal::zero(), {{0.0}, {1.0}}, 0.0,
                                             1000.0, 0.01);
        LadderPolicy p;
        p.half_line = true;
        p.s_cap = 800.0;
        const auto checks = esclangon_check(traj, 1, 1, p);
        REQUIRE(checks.size() == 2);
        CHECK(checks[1].sup <= 1.0 + 1e-9);
        CHECK(checks[0].has_ladder);
        CHECK(checks[0].ladder.recurrent);
        CHECK(!checks[1].growth_flag);
    }

    TEST_CASE("y' + y = pi(phi): derivative bounded and recurrent") {
        const Signal f = Signal::aa_step(AaBranch::Phi);
        const auto traj = green_bounded_solve(OdeSystem::scalar({1.0}), f, 1700.0);
        const auto checks = esclangon_check(traj, 1, 2);
        REQUIRE(checks.size() == 2);
        CHECK(checks[1].sup <= 1.0 + checks[0].sup + 1e-9);
        CHECK(checks[0].ladder.recurrent);
        CHECK(checks[0].ladder.rungs.size() == 2);
    }
}

TEST_SUITE("formats") {
    TEST_CASE("ode and neutral descriptors round trip") {
        const nlohmann::json ode = {{"kind", "ode"}, {"block", 1}, {"coeffs", {2.0, 3.0}}};
        const OdeSystem o = ode_from_json(ode);
        CHECK(o.order == 2);
        CHECK(ode_from_json(ode_to_json(o)).coeffs == o.coeffs);
        const nlohmann::json neutral = {
            {"kind", "neutral"}, {"order", 1},
            {"terms", {{{"delay", -1.0}, {"coeffs", {0.0, 1.0}}}, {{"delay", 0.0}, {"coeffs", {1.0, 1.0}}}}}};
        const NeutralSystem n = neutral_system_from_json(neutral);
        CHECK(n.delays == std::vector<double>{-1.0, 0.0});
        CHECK(neutral_system_to_json(neutral_system_from_json(neutral_system_to_json(n))) == neutral_system_to_json(n));
        CHECK_THROWS_AS(ode_from_json({{"kind", "ode"}, {"coeffs", {1.0}}, {"extra", 1}}), ConfigError);
        CHECK_THROWS_AS(ode_from_json({{"kind", "neutral"}}), ConfigError);
    }

    TEST_CASE("trajectory CSV") {
        const auto traj = ivp_halfline_solve(OdeSystem::scalar({0.0}), Signal::cosine(), {{0.0}}, 0.0, 0.02, 0.01);
        std::ostringstream out;
        write_trajectory_csv(out, traj);
        const std::string csv = out.str();
        CHECK(csv.rfind("t,d0_0_re,d0_0_im,d1_0_re,d1_0_im\n", 0) == 0);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
        CHECK(trajectory_meta(traj).at("count") == 3);
    }
}
