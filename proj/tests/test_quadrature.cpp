#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "reclab/quadrature.hpp"

using namespace reclab;

TEST_SUITE("quadrature") {
    TEST_CASE("adaptive Simpson against closed forms") {
        const auto sine = [](double t, std::span<Complex> out) { out[0] = std::sin(t); };
        CHECK(std::abs(adaptive_simpson(sine, 0.0, oracle::kPi, 1, 1e-10)[0] - 2.0) < 1e-9);
        // Reversed bounds give the signed integral.
        CHECK(std::abs(adaptive_simpson(sine, oracle::kPi, 0.0, 1, 1e-10)[0] + 2.0) < 1e-9);
        CHECK(adaptive_simpson(sine, 1.0, 1.0, 1, 1e-10)[0] == Complex{});

        const auto vec = [](double t, std::span<Complex> out) {
            out[0] = std::exp(t);
            out[1] = Complex{0.0, 1.0} * t * t;
        };
        const auto v = adaptive_simpson(vec, 0.0, 2.0, 2, 1e-10);
        CHECK(std::abs(v[0] - (std::exp(2.0) - 1.0)) < 1e-9);
        CHECK(std::abs(v[1] - Complex{0.0, 8.0 / 3.0}) < 1e-9);
    }

    TEST_CASE("frequency-limited panels resolve fast oscillation") {
        const double w = 400.0;
        const auto f = [w](double t, std::span<Complex> out) { out[0] = std::cos(w * t); };
        const auto r = adaptive_simpson(f, 0.0, 3.0, 1, 1e-10, panel_width(w));
        CHECK(std::abs(r[0] - std::sin(w * 3.0) / w) < 1e-9);
        CHECK(panel_width(0.0) == doctest::Approx(0.125));
        CHECK(panel_width(100.0) == doctest::Approx(0.01));
    }

    TEST_CASE("checkpoint cache is independent of access order") {
        const auto f = [](double t, std::span<Complex> out) { out[0] = std::cos(t) + Complex{0.0, 1.0} * t; };
        CumulativeIntegralCache a(0.5, 1.0, 1, 1e-10), b(0.5, 1.0, 1, 1e-10);
        const auto far = a.checkpoint(7, f);
        for (long k = -5; k <= 7; ++k) b.checkpoint(k, f);
        CHECK(b.checkpoint(7, f) == far);
        CHECK(a.checkpoint(-3, f) == b.checkpoint(-3, f));
        const double t = a.node(7);
        CHECK(std::abs(far[0] - (std::sin(t) - std::sin(0.5) + Complex{0.0, (t * t - 0.25) / 2.0})) < 1e-9);
    }

    TEST_CASE("Gauss-Legendre 4 integrates cubics exactly") {
        double s = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            const double x = GaussLegendre4::nodes[i];
            s += GaussLegendre4::weights[i] * (x * x * x * x * x * x * x - 3.0 * x * x);
        }
        CHECK(s == doctest::Approx(1.0 / 8.0 - 1.0).epsilon(1e-14));
    }
}
