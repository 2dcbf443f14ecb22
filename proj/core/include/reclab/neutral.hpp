#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "reclab/recurrence.hpp"
#include "reclab/signal.hpp"

namespace reclab {

/// sum_{j,k} a_{jk} y^{(k)}(t + t_j) = f(t), with r x r blocks.
struct NeutralSystem {
    int order = 0;                // highest derivative n
    std::size_t block = 1;        // r
    std::vector<double> delays;   // t_1 < ... < t_m
    /// coeffs[j][k] multiplies y^{(k)}(t + t_j), k = 0..n.
    std::vector<std::vector<ComplexMatrix>> coeffs;

    /// Throws ConfigError unless delays increase strictly, every block is
    /// r x r and some leading block a_{jn} is non-zero.
    void validate() const;
};

/// y^{(n)} + sum_{k<n} a_k y^{(k)} = f.
struct OdeSystem {
    int order = 1;
    std::size_t block = 1;
    std::vector<ComplexMatrix> coeffs;  // a_0 .. a_{n-1}

    void validate() const;
    /// Scalar equation from ascending coefficients a_0 .. a_{n-1}.
    static OdeSystem scalar(std::vector<Complex> coeffs);
};

/// Uniformly sampled solution with its derivative stack.
class Trajectory {
public:
    Trajectory(double t0, double step, std::size_t count, std::size_t block, int orders);

    [[nodiscard]] double t0() const { return t0_; }
    [[nodiscard]] double step() const { return step_; }
    [[nodiscard]] std::size_t count() const { return count_; }
    [[nodiscard]] std::size_t block() const { return block_; }
    /// Number of stored derivative orders (0..orders-1).
    [[nodiscard]] int orders() const { return orders_; }
    [[nodiscard]] double time(std::size_t i) const { return t0_ + step_ * static_cast<double>(i); }
    [[nodiscard]] double t_end() const { return time(count_ - 1); }

    Complex& at(int k, std::size_t c, std::size_t i) { return data_[index(k, c, i)]; }
    [[nodiscard]] Complex at(int k, std::size_t c, std::size_t i) const { return data_[index(k, c, i)]; }

    /// max_i ||y^{(k)}(t_i)|| over the grid.
    [[nodiscard]] double sup(int k) const;
    /// Interpolating signal of y^{(k)}; cubic Hermite when y^{(k+1)} is stored.
    [[nodiscard]] Signal as_signal(int k) const;

    /// Largest gap between a fourth-order finite difference of y^{(k)} and
    /// the stored y^{(k+1)} over the grid (k < orders - 1). At each node
    /// the stencil (centered, forward or backward) with the smallest
    /// mismatch is used, so isolated kinks in the top order are not
    /// charged to the lower ones.
    [[nodiscard]] double consistency(int k) const;

    std::string solver;
    double error_estimate = 0.0;  // residual ||Ly - f|| estimate for Green and IVP solves

    /// Growth heuristic: sup of ||y^{(k)}|| over the second half of the grid
    /// exceeds 1.5 x the sup over the first half.
    [[nodiscard]] bool grows(int k) const;

private:
    [[nodiscard]] std::size_t index(int k, std::size_t c, std::size_t i) const {
        return (static_cast<std::size_t>(k) * block_ + c) * count_ + i;
    }

    double t0_;
    double step_;
    std::size_t count_;
    std::size_t block_;
    int orders_;
    std::vector<Complex> data_;
};

// ------------------------------------------------------- neutral systems

/// Leading symbol sum_j a_{jn} e^{i omega t_j}.
ComplexMatrix characteristic_matrix(const NeutralSystem& sys, double omega);

struct NondegeneracyCheck {
    bool holds = false;
    double min_abs_det = 0.0;
    double omega_at_min = 0.0;
    std::size_t grid_points = 0;
};

/// Grid check of det(characteristic_matrix) != 0: holds iff the minimum of
/// |det| over omega = i * step in [lo, hi] is at least `floor`. A heuristic
/// certificate only.
NondegeneracyCheck leading_symbol_nondegenerate(const NeutralSystem& sys, Interval omega_range = {-50.0, 50.0},
                             double omega_step = 1e-2, double floor = 1e-6);

/// f = sum_{j,k} a_{jk} y^{(k)}(. + t_j). y must have closed-form derivatives
/// up to the system order.
Signal apply_operator(const NeutralSystem& sys, const Signal& y);

/// The ODE system viewed as a neutral system with the single delay 0.
NeutralSystem as_neutral(const OdeSystem& ode);

// ------------------------------------------------------------ ODE systems

struct SpectralRoot {
    Complex value;
    int multiplicity = 1;
    double residual = 0.0;  // |det(lambda^n I + sum lambda^k a_k)|
};

/// Roots of det(lambda^n I + sum_k lambda^k a_k) = 0, from the eigenvalues
/// of the rn x rn companion matrix, clustered into multiplicities. Sorted by
/// real part, then imaginary part.
std::vector<SpectralRoot> spectrum(const OdeSystem& ode);

/// lambda^n I + sum_k lambda^k a_k.
ComplexMatrix characteristic_polynomial(const OdeSystem& ode, Complex lambda);

struct GreenOptions {
    double step = 1e-2;
    double dichotomy_floor = 1e-3;
    double tail_mass = 1e-8;
    /// Forcing samples larger than this are treated as unbounded input.
    double forcing_guard = 1e12;
};

/// Constants of the exponential-dichotomy kernel actually used.
struct GreenKernelInfo {
    double min_abs_re = 0.0;
    double kernel_scale = 0.0;  // ||P_s|| + ||P_u||, operator norms for the sup norm
    double tail = 0.0;
    double kernel_l1 = 0.0;     // int ||G(t)|| dt for the y block, by quadrature
};

GreenKernelInfo green_kernel_info(const OdeSystem& ode, const GreenOptions& options = {});

/// Unique bounded solution on [-horizon, horizon] (grid t = i * step),
/// computed as the convolution of f with the dichotomy Green kernel,
/// truncated at the kernel tail. Throws HypothesisError when some root has
/// |Re lambda| below the dichotomy floor, NumericGuardError when the
/// forcing exceeds its guard.
Trajectory green_bounded_solve(const OdeSystem& ode, const Signal& f, double horizon,
                               const GreenOptions& options = {});

/// Initial-value solution on [alpha, alpha + horizon] from y^{(k)}(alpha),
/// k < n, by an exponential march with Gauss-Legendre forcing quadrature.
Trajectory ivp_halfline_solve(const OdeSystem& ode, const Signal& f,
                              const std::vector<CVector>& init, double alpha, double horizon,
                              double step);

// --------------------------------------------------- Esclangon-Landau

struct DerivativeCheck {
    int order = 0;
    double sup = 0.0;
    bool growth_flag = false;
    bool has_ladder = false;
    LadderVerdict ladder;
};

/// Sup norms of y^{(k)} for k <= order and recurrence ladders for k < order,
/// scanned on the trajectory through its interpolating adapter. The ladder
/// range is capped so every scan stays on the trajectory grid.
std::vector<DerivativeCheck> esclangon_check(const Trajectory& traj, int order, int ladder_depth,
                                             const LadderPolicy& policy = {});

/// Largest ladder range S such that rungs with windows up to depth fit on
/// the trajectory.
double ladder_room(const Trajectory& traj, int depth, bool half_line);

// -------------------------------------------------------------- formats

NeutralSystem neutral_system_from_json(const nlohmann::json& doc);
nlohmann::json neutral_system_to_json(const NeutralSystem& sys);
OdeSystem ode_from_json(const nlohmann::json& doc);
nlohmann::json ode_to_json(const OdeSystem& ode);

/// CSV with columns t, then d<k>_<c>_re, d<k>_<c>_im per order and component.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
nlohmann::json trajectory_meta(const Trajectory& traj);

}  // namespace reclab
