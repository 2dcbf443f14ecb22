#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "reclab/types.hpp"

namespace reclab {

namespace detail {
struct Node;
}

inline constexpr double kDefaultQuadTol = 1e-8;
inline constexpr double kCheckpointSpacing = 1.0;

/// Dense complex matrix, row-major. Used by the matrix-map combinator.
struct ComplexMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<Complex> data;

    ComplexMatrix() = default;
    ComplexMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}

    static ComplexMatrix identity(std::size_t n);

    Complex& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;
};

enum class AaBranch { Phi, Psi1, Psi2 };

/// Integer-indexed sequence Z -> C^d, input of the piecewise-linear
/// extension.
class Sequence {
public:
    enum class Kind { AaStep, Table, Affine };

    /// phi(n) = (1 + e^{in}) / |1 + e^{in}|; psi(n) = (1 - e^{in}) / |1 - e^{in}| for n != 0
    /// with psi_1(0) = i and psi_2(0) = -i.
    static Sequence aa_step(AaBranch branch);
    /// values[k] sits at index first + k. Outside the table the sequence is
    /// periodic (period = table size) or holds the end values.
    static Sequence table(std::vector<CVector> values, long first = 0, bool periodic = false);
    /// n -> slope * n + intercept.
    static Sequence affine(CVector slope, CVector intercept);

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] std::size_t dim() const { return dim_; }
    [[nodiscard]] AaBranch branch() const { return branch_; }
    [[nodiscard]] const std::vector<CVector>& values() const { return values_; }
    [[nodiscard]] long first() const { return first_; }
    [[nodiscard]] bool periodic() const { return periodic_; }
    [[nodiscard]] const CVector& slope() const { return slope_; }
    [[nodiscard]] const CVector& intercept() const { return intercept_; }

    void at(long n, std::span<Complex> out) const;
    [[nodiscard]] CVector at(long n) const;

private:
    Kind kind_ = Kind::Table;
    std::size_t dim_ = 1;
    AaBranch branch_ = AaBranch::Phi;
    std::vector<CVector> values_;
    long first_ = 0;
    bool periodic_ = false;
    CVector slope_;
    CVector intercept_;
};

/// One term coeff * {e^{i omega t}, cos(omega t), sin(omega t)} of a
/// vector trigonometric polynomial.
struct TrigTerm {
    enum class Kind { Exp, Cos, Sin };
    Kind kind = Kind::Exp;
    double omega = 0.0;
    CVector coeff;

    friend bool operator==(const TrigTerm&, const TrigTerm&) = default;
};

/// Uniformly sampled values (and optionally slopes) of a C^d-valued
/// function; the data behind a sampled-trajectory signal.
struct SampleTable {
    double t0 = 0.0;
    double dt = 1.0;
    std::size_t count = 0;
    std::size_t dim = 1;
    std::vector<Complex> values;  // values[c * count + i]
    std::vector<Complex> slopes;  // empty, or same layout as values

    [[nodiscard]] double t_end() const { return t0 + dt * static_cast<double>(count - 1); }
};

/// Sampled block of a signal on t0 + i * dt, i < count.
struct SampleBlock {
    std::size_t dim = 0;
    std::size_t count = 0;
    std::vector<Complex> data;  // data[c * count + i]

    [[nodiscard]] std::span<const Complex> component(std::size_t c) const {
        return {data.data() + c * count, count};
    }
    [[nodiscard]] std::span<Complex> component(std::size_t c) {
        return {data.data() + c * count, count};
    }
};

/// Immutable, evaluable function R -> C^dim built from exact generator
/// formulas and operator combinators. Copies share the underlying tree;
/// evaluation is const and safe from any number of threads.
class Signal {
public:
    // Generators.
    static Signal constant(CVector value);
    static Signal zero(std::size_t dim = 1);
    static Signal trig(std::vector<TrigTerm> terms);
    static Signal sine(double omega = 1.0, Complex amplitude = 1.0);
    static Signal cosine(double omega = 1.0, Complex amplitude = 1.0);
    /// e^{i omega t}.
    static Signal exponential(double omega, Complex amplitude = 1.0);
    /// p(t) e^{i rate t^2}, p given by ascending coefficients.
    static Signal chirp(std::vector<Complex> poly = {Complex{1.0, 0.0}}, double rate = 1.0);
    /// Continuous piecewise-linear extension of an integer-indexed sequence.
    static Signal linear_extension(Sequence seq);
    /// Extension of the phi / psi_1 / psi_2 step sequences.
    static Signal aa_step(AaBranch branch);
    /// Order-N truncation sum_{n=2}^N h_n of the lacunary bump series;
    /// 2 <= N <= 24.
    static Signal lacunary(int order);
    /// Interpolating adapter over sampled data (cubic Hermite when slopes
    /// are present, linear otherwise); constant beyond the sample range.
    static Signal sampled(std::shared_ptr<const SampleTable> table);
    /// Stacked tuple (f_1, ..., f_n), dim = sum of dims.
    static Signal stack(const std::vector<Signal>& parts);
    /// f_1 + ... + f_n (equal dims).
    static Signal sum(const std::vector<Signal>& terms);

    [[nodiscard]] std::size_t dim() const;
    [[nodiscard]] double quad_tol() const;

    [[nodiscard]] CVector eval(double t) const;
    void eval_into(double t, std::span<Complex> out) const;
    /// Values on t0 + i * dt. Integral nodes are integrated cumulatively
    /// along the grid in fixed-size chunks, so a block is deterministic in
    /// (t0, dt, count) and agrees with eval() to the quadrature tolerance.
    [[nodiscard]] SampleBlock sample(double t0, double dt, std::size_t count) const;
    /// Upper bound on the angular frequency on [lo, hi] (0: slowly varying).
    [[nodiscard]] double frequency_bound(double lo, double hi) const;

    [[nodiscard]] const detail::Node& node() const { return *node_; }
    [[nodiscard]] const std::shared_ptr<const detail::Node>& node_ptr() const { return node_; }
    explicit Signal(std::shared_ptr<const detail::Node> node);

private:
    std::shared_ptr<const detail::Node> node_;
};

// Combinators. All preserve dim unless noted.

/// t -> f(t + s).
Signal translate(const Signal& f, double s);
/// t -> f(t + h) - f(t); h != 0.
Signal difference(const Signal& f, double h);
/// t -> (1/h) int_0^h f(t + s) ds; h > 0. `tol` defaults to f.quad_tol().
Signal running_mean(const Signal& f, double h, double tol = 0.0);
/// t -> int_alpha^t f(s) ds via checkpointed cumulative quadrature.
Signal indefinite_integral(const Signal& f, double alpha, double tol = 0.0);
/// t -> e^{i omega t} f(t).
Signal character_multiply(const Signal& f, double omega);
Signal scale(const Signal& f, Complex factor);
/// t -> M f(t); dim becomes M.rows.
Signal matrix_map(const Signal& f, const ComplexMatrix& m);
/// Component c of f as a scalar signal.
Signal component(const Signal& f, std::size_t c);
/// k-th derivative built from generator-level rules. Throws ConfigError
/// for generators without closed-form derivatives (sequence extensions,
/// lacunary bumps, sampled data).
Signal derivative(const Signal& f, int order = 1);

Signal operator+(const Signal& a, const Signal& b);
Signal operator-(const Signal& a, const Signal& b);
Signal operator*(Complex factor, const Signal& f);

}  // namespace reclab
