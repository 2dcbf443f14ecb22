#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "reclab/signal.hpp"
#include "reclab/signal_config.hpp"

using namespace reclab;

namespace {

Complex at(const Signal& f, double t) { return f.eval(t)[0]; }

Signal from_oracle(const std::vector<oracle::Term>& terms) {
    std::vector<TrigTerm> out;
    for (const auto& t : terms)
        out.push_back({static_cast<TrigTerm::Kind>(t.kind), t.omega, {t.coeff}});
    return Signal::trig(out);
}

std::vector<double> grid(double a, double b, int n) {
    std::vector<double> g;
    for (int i = 0; i <= n; ++i) g.push_back(a + (b - a) * i / n);
    return g;
}

}  // namespace

TEST_SUITE("signal generators") {
    TEST_CASE("closed-form generators at reference points") {
        CHECK(at(Signal::chirp(), 0.0) == Complex{1.0, 0.0});
        CHECK(std::abs(at(Signal::sine(), oracle::kPi / 2) - 1.0) < 1e-15);
        CHECK(std::abs(at(Signal::exponential(2.0), 0.3) - std::polar(1.0, 0.6)) < 1e-15);
        CHECK(std::abs(at(Signal::chirp({1.0, Complex{0.0, 2.0}}, 0.5), 1.5) -
                       Complex{1.0, 3.0} * std::polar(1.0, 0.5 * 2.25)) < 1e-14);
    }

    TEST_CASE("trig polynomials match the oracle") {
        std::mt19937_64 rng(7);
        for (int k = 0; k < 5; ++k) {
            const auto terms = oracle::random_trig(rng);
            const Signal f = from_oracle(terms);
            for (double t : grid(-20, 20, 97)) CHECK(std::abs(at(f, t) - oracle::value(terms, t)) < 1e-13);
        }
    }

    TEST_CASE("aa step sequences") {
        // psi_1(0) = i, psi_2(0) = -i as stated in the source example.
        CHECK(std::abs(at(Signal::aa_step(AaBranch::Psi1), 0.0) - Complex{0.0, 1.0}) < 1e-15);
        CHECK(std::abs(at(Signal::aa_step(AaBranch::Psi2), 0.0) - Complex{0.0, -1.0}) < 1e-15);
        CHECK(std::abs(at(Signal::aa_step(AaBranch::Phi), 0.0) - 1.0) < 1e-15);
        const Sequence phi = Sequence::aa_step(AaBranch::Phi);
        for (long n = -200; n <= 200; ++n) {
            CHECK(std::abs(std::abs(phi.at(n)[0]) - 1.0) < 1e-14);
            CHECK(std::abs(phi.at(n)[0] - oracle::phi(n)) < 1e-14);
        }
        const Signal g1 = Signal::aa_step(AaBranch::Psi1);
        for (double t : grid(-30, 30, 613))
            CHECK(std::abs(at(g1, t) - oracle::extension([](long n) { return oracle::psi(n, 1); }, t)) < 1e-14);
    }

    TEST_CASE("piecewise-linear extensions") {
        const Signal ramp = Signal::linear_extension(Sequence::affine({1.0}, {0.0}));
        CHECK(std::abs(at(ramp, 0.5) - 0.5) < 1e-15);
        const Signal c = Signal::linear_extension(Sequence::table({{Complex{2.0, 1.0}}}, 0, true));
        for (double t : grid(-5, 5, 37)) CHECK(std::abs(at(c, t) - Complex{2.0, 1.0}) < 1e-15);
        const Signal tent = Signal::aa_step(AaBranch::Psi1) - Signal::aa_step(AaBranch::Psi2);
        CHECK(std::abs(at(tent, 0.0) - Complex{0.0, 2.0}) < 1e-15);
        CHECK(std::abs(at(tent, 0.5) - Complex{0.0, 1.0}) < 1e-15);
        for (double t : {-7.3, -1.0, 1.0, 2.5, 40.0}) CHECK(std::abs(at(tent, t)) < 1e-15);
    }

    TEST_CASE("lacunary sum") {
        const Signal f = Signal::lacunary(8);
        CHECK(std::abs(at(f, 0.0)) == 0.0);
        for (double t : grid(-4, 3, 700)) CHECK(std::abs(at(f, t)) < 1e-12);
        for (double t : grid(-300, 300, 6007)) CHECK(std::abs(at(f, t) - oracle::lacunary(8, t)) < 1e-9);
        // Top bump on [2^N - 1, 2^N] reaches modulus 1.
        double top = 0.0;
        for (double t : grid(255, 256, 4096)) top = std::max(top, std::abs(at(f, t)));
        CHECK(top >= 1.0 - 1e-6);
    }
}

TEST_SUITE("signal combinators") {
    TEST_CASE("translate") {
        const Signal s = Signal::sine();
        const Signal shifted = translate(s, 2 * oracle::kPi);
        for (double t : grid(-10, 10, 101)) CHECK(std::abs(at(shifted, t) - at(s, t)) < 1e-14);
        const Signal c = Signal::constant({Complex{3.0, -1.0}});
        CHECK(at(translate(c, 5.5), -2.0) == Complex{3.0, -1.0});
        CHECK(std::abs(at(translate(Signal::chirp(), 1.0), 0.0) - std::polar(1.0, 1.0)) < 1e-15);
    }

    TEST_CASE("difference") {
        const Signal s = Signal::sine();
        for (double t : grid(-10, 10, 101)) {
            CHECK(std::abs(at(difference(s, 2 * oracle::kPi), t)) < 1e-14);
            CHECK(std::abs(at(difference(s, oracle::kPi), t) + 2.0 * std::sin(t)) < 1e-14);
        }
        const double w = 1.3, h = 0.7;
        const Signal e = Signal::exponential(w);
        for (double t : grid(-3, 3, 31))
            CHECK(std::abs(at(difference(e, h), t) - (std::polar(1.0, w * h) - 1.0) * std::polar(1.0, w * t)) < 1e-14);
        CHECK(std::abs(at(difference(Signal::exponential(2 * oracle::kPi / h), h), 0.4)) < 1e-13);
        CHECK_THROWS_AS(difference(s, 0.0), ConfigError);
    }

    TEST_CASE("running mean") {
        const Signal c = Signal::constant({Complex{1.5, 0.5}});
        CHECK(std::abs(at(running_mean(c, 2.0), 3.0) - Complex{1.5, 0.5}) < 1e-12);
        const Signal s = Signal::sine();
        for (double t : grid(-5, 5, 11)) CHECK(std::abs(at(running_mean(s, 2 * oracle::kPi), t)) < 1e-8);
        CHECK(std::abs(at(running_mean(s, oracle::kPi), 0.0) - 2.0 / oracle::kPi) < 1e-8);
        CHECK_THROWS_AS(running_mean(s, -1.0), ConfigError);
    }

    TEST_CASE("indefinite integral") {
        const Signal p = indefinite_integral(Signal::sine(), 0.0);
        CHECK(std::abs(at(p, oracle::kPi) - 2.0) < 1e-8);
        CHECK(std::abs(at(p, 0.0)) == 0.0);
        CHECK(std::abs(at(indefinite_integral(Signal::zero(), 0.0), 12.0)) == 0.0);
        const Signal pg = indefinite_integral(Signal::chirp(), 0.0);
        CHECK(std::abs(at(pg, 30.0) - oracle::fresnel(30.0)) < 1e-6);
        CHECK(std::abs(at(pg, 100.0) - oracle::fresnel_limit()) <= 0.01);
    }

    TEST_CASE("mean identity h M_h f = Delta_h P f") {
        std::mt19937_64 rng(11);
        const auto terms = oracle::random_trig(rng);
        const Signal f = from_oracle(terms);
        const double h = 0.8;
        const Signal lhs = scale(running_mean(f, h), h);
        const Signal rhs = difference(indefinite_integral(f, 0.0), h);
        for (double t : grid(-15, 15, 61)) {
            CHECK(std::abs(at(lhs, t) - at(rhs, t)) < 1e-7);
            CHECK(std::abs(at(lhs, t) - h * oracle::running_mean(terms, h, t)) < 1e-7);
        }
    }

    TEST_CASE("character multiply, scale, matrix map and stacking") {
        CHECK(at(character_multiply(Signal::sine(), 0.0), 0.7) == at(Signal::sine(), 0.7));
        const Signal one = Signal::constant({1.0});
        CHECK(std::abs(at(character_multiply(one, 2.0), 0.3) - std::polar(1.0, 0.6)) < 1e-15);
        CHECK(std::abs(at(character_multiply(Signal::sine(), 1.0), oracle::kPi / 2) - Complex{0.0, 1.0}) < 1e-15);

        const Signal st = Signal::stack({Signal::sine(), Signal::cosine()});
        CHECK(st.dim() == 2);
        const auto v = st.eval(0.4);
        CHECK(std::abs(v[0] - std::sin(0.4)) < 1e-15);
        CHECK(std::abs(v[1] - std::cos(0.4)) < 1e-15);
        ComplexMatrix rot(2, 2);
        rot(0, 0) = 0.0, rot(0, 1) = 1.0, rot(1, 0) = 1.0, rot(1, 1) = 0.0;
        const auto w = matrix_map(st, rot).eval(0.4);
        CHECK(std::abs(w[0] - std::cos(0.4)) < 1e-15);
        CHECK(std::abs(at(component(st, 1), 0.4) - std::cos(0.4)) < 1e-15);
        CHECK_THROWS_AS(Signal::sine() + st, ConfigError);
    }

    TEST_CASE("derivatives from generator rules") {
        const Signal d = derivative(Signal::sine(2.0), 1);
        CHECK(std::abs(at(d, 0.3) - 2.0 * std::cos(0.6)) < 1e-14);
        const Signal dc = derivative(Signal::chirp(), 1);
        CHECK(std::abs(at(dc, 0.5) - Complex{0.0, 1.0} * std::polar(1.0, 0.25)) < 1e-14);
        CHECK_THROWS_AS(derivative(Signal::aa_step(AaBranch::Phi), 1), ConfigError);
    }

    TEST_CASE("sampling agrees with pointwise evaluation") {
        const Signal f = indefinite_integral(Signal::sine() + Signal::sine(std::numbers::sqrt2), 0.0);
        const auto block = f.sample(-7.0, 0.05, 401);
        for (std::size_t i = 0; i < block.count; i += 20)
            CHECK(std::abs(block.data[i] - at(f, -7.0 + 0.05 * static_cast<double>(i))) < 1e-7);
    }

    TEST_CASE("sampled adapter interpolates") {
        auto table = std::make_shared<SampleTable>();
        table->t0 = 0.0;
        table->dt = 0.1;
        table->count = 101;
        for (std::size_t i = 0; i < table->count; ++i) {
            const double t = 0.1 * static_cast<double>(i);
            table->values.push_back(std::sin(t));
            table->slopes.push_back(std::cos(t));
        }
        const Signal s = Signal::sampled(table);
        for (double t : grid(0, 10, 77)) CHECK(std::abs(at(s, t) - std::sin(t)) < 1e-5);
    }
}

TEST_SUITE("signal descriptors") {
    TEST_CASE("round trip is stable") {
        const nlohmann::json doc = {
            {"generator", "trig"},
            {"terms", {{{"kind", "sin"}, {"omega", 1.0}, {"coeff", {{1.0, 0.0}}}}}},
            {"ops", {{{"op", "translate"}, {"s", 2.0}}, {{"op", "integral"}, {"alpha", 0.0}}}}};
        const Signal f = signal_from_json(doc);
        const auto once = signal_to_json(f);
        CHECK(signal_to_json(signal_from_json(once)) == once);
        CHECK(std::abs(at(f, 1.0) - (std::cos(2.0) - std::cos(3.0))) < 1e-8);
    }

    TEST_CASE("malformed descriptors are rejected") {
        CHECK_THROWS_AS(signal_from_json({{"generator", "bogus"}}), ConfigError);
        CHECK_THROWS_AS(signal_from_json({{"generator", "sin"}, {"omeg", 1.0}}), ConfigError);
        CHECK_THROWS_AS(signal_from_json({{"generator", "lacunary"}, {"order", 2.5}}), ConfigError);
        CHECK_THROWS_AS(signal_from_json({{"generator", "sin"}, {"ops", {{{"op", "difference"}, {"h", 0}}}}}),
                        ConfigError);
        CHECK_THROWS_AS(signal_from_json(nlohmann::json::array()), ConfigError);
    }
}
