#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace reclab {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

/// Malformed descriptor, unknown key, or invalid argument.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computation left its numeric safety envelope (non-finite values,
/// oversized grids, unbounded forcing).
class NumericGuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The request falls outside the hypotheses of the method (e.g. a
/// dichotomy solve for a spectrum touching the imaginary axis).
class HypothesisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sup norm on C^d.
inline double sup_norm(std::span<const Complex> v) {
    double m = 0.0;
    for (const auto& z : v) m = std::max(m, std::abs(z));
    return m;
}

/// Closed interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] double length() const { return hi - lo; }
    [[nodiscard]] bool contains(double t) const { return lo <= t && t <= hi; }
};

/// The compact set K of an almost-period test: either a sampled interval
/// or a finite set of probe points (discrete-topology semantics).
class ProbeWindow {
public:
    enum class Kind { Interval, Probes };

    static ProbeWindow symmetric(double half_width, double sample_step = 1e-2);
    static ProbeWindow interval(double lo, double hi, double sample_step = 1e-2);
    static ProbeWindow probes(std::vector<double> points);

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] bool is_interval() const { return kind_ == Kind::Interval; }
    [[nodiscard]] Interval bounds() const { return bounds_; }
    [[nodiscard]] double sample_step() const { return step_; }
    [[nodiscard]] const std::vector<double>& points() const { return points_; }

    /// Number of sample intervals of the interval grid; the grid is
    /// lo + i * (hi - lo) / cells for i = 0..cells, endpoints exact.
    [[nodiscard]] std::size_t cells() const;
    /// Grid spacing actually used (close to sample_step).
    [[nodiscard]] double grid_step() const;
    /// Sample points: the interval grid or the probe set.
    [[nodiscard]] std::vector<double> samples() const;

    /// Same kind, interval widened by `pad` on each side. The widened grid
    /// contains the original grid points when pad is a multiple of the step.
    [[nodiscard]] ProbeWindow widened(double pad) const;

    friend bool operator==(const ProbeWindow&, const ProbeWindow&) = default;

private:
    Kind kind_ = Kind::Interval;
    Interval bounds_{};
    double step_ = 1e-2;
    std::vector<double> points_;
};

}  // namespace reclab
