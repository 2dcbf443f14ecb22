#include "reclab/neutral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "reclab/quadrature.hpp"
#include "reclab/signal_config.hpp"

namespace reclab {

using nlohmann::json;

namespace {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

Mat to_eigen(const ComplexMatrix& m) {
    Mat out(static_cast<Eigen::Index>(m.rows), static_cast<Eigen::Index>(m.cols));
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
    return out;
}

/// Operator norm induced by the sup norm: largest absolute row sum.
double row_norm(const Mat& m) {
    double best = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) best = std::max(best, m.row(i).cwiseAbs().sum());
    return best;
}

bool is_zero(const ComplexMatrix& m) {
    return std::all_of(m.data.begin(), m.data.end(), [](Complex z) { return z == Complex{}; });
}

void check_block(const ComplexMatrix& m, std::size_t r, const char* what) {
    if (m.rows != r || m.cols != r) throw ConfigError(std::string(what) + ": coefficient blocks must be r x r");
    for (const auto& z : m.data)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw ConfigError(std::string(what) + ": coefficients must be finite");
}

/// Companion matrix of Y = (y, y', ..., y^{(n-1)}).
Mat companion(const OdeSystem& ode) {
    const auto r = static_cast<Eigen::Index>(ode.block);
    const auto n = static_cast<Eigen::Index>(ode.order);
    Mat c = Mat::Zero(n * r, n * r);
    for (Eigen::Index k = 0; k + 1 < n; ++k) c.block(k * r, (k + 1) * r, r, r).setIdentity();
    for (Eigen::Index k = 0; k < n; ++k)
        c.block((n - 1) * r, k * r, r, r) = -to_eigen(ode.coeffs[static_cast<std::size_t>(k)]);
    return c;
}

/// Input map B: forcing enters the last block row.
Mat input_map(const OdeSystem& ode) {
    const auto r = static_cast<Eigen::Index>(ode.block);
    const auto n = static_cast<Eigen::Index>(ode.order);
    Mat b = Mat::Zero(n * r, r);
    b.block((n - 1) * r, 0, r, r).setIdentity();
    return b;
}

/// Matrix sign function by the scaled Newton iteration.
Mat matrix_sign(const Mat& a) {
    const auto n = a.rows();
    Mat x = a;
    for (int it = 0; it < 100; ++it) {
        Eigen::PartialPivLU<Mat> lu(x);
        double log_det = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) log_det += std::log(std::abs(lu.matrixLU()(i, i)));
        const double mu = std::exp(-log_det / static_cast<double>(n));
        const Mat next = 0.5 * (mu * x + lu.inverse() / mu);
        const double change = (next - x).cwiseAbs().sum();
        x = next;
        if (change <= 1e-13 * x.cwiseAbs().sum()) break;
    }
    return x;
}

struct Dichotomy {
    Mat c, b, ps, pu;
    double min_abs_re = 0.0;
};

Dichotomy dichotomy(const OdeSystem& ode, double floor) {
    Dichotomy d;
    d.c = companion(ode);
    d.b = input_map(ode);
    d.min_abs_re = std::numeric_limits<double>::infinity();
    for (const auto& root : spectrum(ode)) d.min_abs_re = std::min(d.min_abs_re, std::abs(root.value.real()));
    if (d.min_abs_re < floor)
        throw HypothesisError("no exponential dichotomy: spectrum within " + std::to_string(floor) +
                              " of the imaginary axis");
    const Mat s = matrix_sign(d.c);
    const Mat id = Mat::Identity(d.c.rows(), d.c.cols());
    d.ps = 0.5 * (id - s);
    d.pu = 0.5 * (id + s);
    return d;
}

double tail_length(const Dichotomy& d, double tail_mass) {
    const double scale = row_norm(d.ps) + row_norm(d.pu);
    return std::log(std::max(scale, 1.0) / tail_mass) / d.min_abs_re;
}

std::size_t steps_for(double length, double h) {
    return static_cast<std::size_t>(std::ceil(length / h - 1e-9));
}

/// Forcing sampled at the four Gauss-Legendre nodes of each step
/// [start + i h, start + (i + 1) h], i < steps.
std::array<SampleBlock, 4> gauss_samples(const Signal& f, double start, double h, std::size_t steps,
                                         double guard) {
    std::array<SampleBlock, 4> out;
    for (std::size_t q = 0; q < 4; ++q) {
        out[q] = f.sample(start + GaussLegendre4::nodes[q] * h, h, steps);
        for (const auto& z : out[q].data)
            if (!(std::abs(z) <= guard)) throw NumericGuardError("forcing exceeds its guard or is not finite");
    }
    return out;
}

Vec forcing_at(const SampleBlock& s, std::size_t i) {
    Vec v(static_cast<Eigen::Index>(s.dim));
    for (std::size_t c = 0; c < s.dim; ++c) v(static_cast<Eigen::Index>(c)) = s.data[c * s.count + i];
    return v;
}

/// Fills derivative orders 0..n-1 from the state and order n from the
/// equation, then records the residual.
void finish_trajectory(Trajectory& traj, const OdeSystem& ode, const std::vector<Vec>& states,
                       const SampleBlock& forcing) {
    const std::size_t r = ode.block;
    const int n = ode.order;
    std::vector<Mat> a;
    for (const auto& m : ode.coeffs) a.push_back(to_eigen(m));
    for (std::size_t i = 0; i < traj.count(); ++i) {
        const Vec& y = states[i];
        Vec top = forcing_at(forcing, i);
        for (int k = 0; k < n; ++k) {
            const Vec part = y.segment(static_cast<Eigen::Index>(k) * static_cast<Eigen::Index>(r),
                                       static_cast<Eigen::Index>(r));
            for (std::size_t c = 0; c < r; ++c) traj.at(k, c, i) = part(static_cast<Eigen::Index>(c));
            top -= a[static_cast<std::size_t>(k)] * part;
        }
        for (std::size_t c = 0; c < r; ++c) traj.at(n, c, i) = top(static_cast<Eigen::Index>(c));
    }
    traj.error_estimate = traj.consistency(n - 1);
}

std::size_t eval_dim(const Signal& f, std::size_t r, const char* what) {
    if (f.dim() != r) throw ConfigError(std::string(what) + ": forcing dimension must equal the block size");
    return r;
}

}  // namespace

// ------------------------------------------------------------ systems

void NeutralSystem::validate() const {
    if (order < 0) throw ConfigError("neutral system: order must be non-negative");
    if (block < 1) throw ConfigError("neutral system: block size must be positive");
    if (delays.empty()) throw ConfigError("neutral system: at least one delay is required");
    if (coeffs.size() != delays.size()) throw ConfigError("neutral system: one coefficient list per delay");
    for (std::size_t j = 0; j < delays.size(); ++j) {
        if (!std::isfinite(delays[j])) throw ConfigError("neutral system: delays must be finite");
        if (j > 0 && !(delays[j] > delays[j - 1]))
            throw ConfigError("neutral system: delays must increase strictly");
        if (coeffs[j].size() != static_cast<std::size_t>(order) + 1)
            throw ConfigError("neutral system: each delay needs coefficients for k = 0..n");
        for (const auto& m : coeffs[j]) check_block(m, block, "neutral system");
    }
    const bool leading = std::any_of(coeffs.begin(), coeffs.end(),
                                     [&](const auto& row) { return !is_zero(row.back()); });
    if (!leading) throw ConfigError("neutral system: every leading block a_{jn} is zero");
}

void OdeSystem::validate() const {
    if (order < 1) throw ConfigError("ode: order must be at least 1");
    if (block < 1) throw ConfigError("ode: block size must be positive");
    if (coeffs.size() != static_cast<std::size_t>(order))
        throw ConfigError("ode: expected one coefficient block per order below n");
    for (const auto& m : coeffs) check_block(m, block, "ode");
}

OdeSystem OdeSystem::scalar(std::vector<Complex> coeffs) {
    OdeSystem ode;
    ode.order = static_cast<int>(coeffs.size());
    ode.block = 1;
    for (Complex a : coeffs) {
        ComplexMatrix m(1, 1);
        m(0, 0) = a;
        ode.coeffs.push_back(m);
    }
    ode.validate();
    return ode;
}

// --------------------------------------------------------- trajectories

Trajectory::Trajectory(double t0, double step, std::size_t count, std::size_t block, int orders)
    : t0_(t0), step_(step), count_(count), block_(block), orders_(orders),
      data_(static_cast<std::size_t>(orders) * block * count) {
    if (count < 2 || !(step > 0.0) || block < 1 || orders < 1)
        throw ConfigError("trajectory: invalid grid");
}

double Trajectory::sup(int k) const {
    double best = 0.0;
    for (std::size_t c = 0; c < block_; ++c)
        for (std::size_t i = 0; i < count_; ++i) best = std::max(best, std::abs(at(k, c, i)));
    return best;
}

bool Trajectory::grows(int k) const {
    const std::size_t half = count_ / 2;
    double first = 0.0, second = 0.0;
    for (std::size_t c = 0; c < block_; ++c)
        for (std::size_t i = 0; i < count_; ++i) {
            double& slot = i < half ? first : second;
            slot = std::max(slot, std::abs(at(k, c, i)));
        }
    return second > 1.5 * first && second > 1e-12;
}

Signal Trajectory::as_signal(int k) const {
    if (k < 0 || k >= orders_) throw ConfigError("trajectory: derivative order not stored");
    auto table = std::make_shared<SampleTable>();
    table->t0 = t0_;
    table->dt = step_;
    table->count = count_;
    table->dim = block_;
    table->values.assign(data_.begin() + static_cast<std::ptrdiff_t>(index(k, 0, 0)),
                         data_.begin() + static_cast<std::ptrdiff_t>(index(k, 0, 0) + block_ * count_));
    if (k + 1 < orders_)
        table->slopes.assign(data_.begin() + static_cast<std::ptrdiff_t>(index(k + 1, 0, 0)),
                             data_.begin() + static_cast<std::ptrdiff_t>(index(k + 1, 0, 0) + block_ * count_));
    return Signal::sampled(std::move(table));
}

double Trajectory::consistency(int k) const {
    if (k < 0 || k + 1 >= orders_) throw ConfigError("trajectory: consistency needs orders k and k + 1");
    if (count_ < 5) return 0.0;
    const double inv = 1.0 / (12.0 * step_);
    double worst = 0.0;
    for (std::size_t c = 0; c < block_; ++c) {
        auto y = [&](std::size_t i) { return at(k, c, i); };
        for (std::size_t i = 0; i < count_; ++i) {
            double best = std::numeric_limits<double>::infinity();
            const Complex stored = at(k + 1, c, i);
            if (i >= 2 && i + 2 < count_) {
                const Complex d = (y(i - 2) - 8.0 * y(i - 1) + 8.0 * y(i + 1) - y(i + 2)) * inv;
                best = std::min(best, std::abs(d - stored));
            }
            if (i + 4 < count_) {
                const Complex d =
                    (-25.0 * y(i) + 48.0 * y(i + 1) - 36.0 * y(i + 2) + 16.0 * y(i + 3) - 3.0 * y(i + 4)) * inv;
                best = std::min(best, std::abs(d - stored));
            }
            if (i >= 4) {
                const Complex d =
                    (25.0 * y(i) - 48.0 * y(i - 1) + 36.0 * y(i - 2) - 16.0 * y(i - 3) + 3.0 * y(i - 4)) * inv;
                best = std::min(best, std::abs(d - stored));
            }
            worst = std::max(worst, best);
        }
    }
    return worst;
}

// ------------------------------------------------------- neutral systems

ComplexMatrix characteristic_matrix(const NeutralSystem& sys, double omega) {
    ComplexMatrix out(sys.block, sys.block);
    for (std::size_t j = 0; j < sys.delays.size(); ++j) {
        const Complex phase = std::exp(Complex{0.0, omega * sys.delays[j]});
        const ComplexMatrix& a = sys.coeffs[j][static_cast<std::size_t>(sys.order)];
        for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += a.data[i] * phase;
    }
    return out;
}

NondegeneracyCheck leading_symbol_nondegenerate(const NeutralSystem& sys, Interval range, double step, double floor) {
    sys.validate();
    if (!(step > 0.0) || !(range.hi >= range.lo)) throw ConfigError("leading_symbol_nondegenerate: invalid omega grid");
    NondegeneracyCheck out;
    out.min_abs_det = std::numeric_limits<double>::infinity();
    const auto first = static_cast<long>(std::ceil(range.lo / step - 1e-9));
    const auto last = static_cast<long>(std::floor(range.hi / step + 1e-9));
    for (long i = first; i <= last; ++i) {
        const double omega = static_cast<double>(i) * step;
        const double det = std::abs(to_eigen(characteristic_matrix(sys, omega)).determinant());
        ++out.grid_points;
        if (det < out.min_abs_det) {
            out.min_abs_det = det;
            out.omega_at_min = omega;
        }
    }
    out.holds = out.min_abs_det >= floor;
    return out;
}

Signal apply_operator(const NeutralSystem& sys, const Signal& y) {
    sys.validate();
    if (y.dim() != sys.block) throw ConfigError("apply_operator: signal dimension must equal the block size");
    std::vector<Signal> terms;
    std::vector<Signal> derivs;
    for (int k = 0; k <= sys.order; ++k) derivs.push_back(k == 0 ? y : derivative(y, k));
    for (std::size_t j = 0; j < sys.delays.size(); ++j)
        for (int k = 0; k <= sys.order; ++k) {
            const ComplexMatrix& a = sys.coeffs[j][static_cast<std::size_t>(k)];
            if (is_zero(a)) continue;
            Signal term = sys.delays[j] == 0.0 ? derivs[static_cast<std::size_t>(k)]
                                               : translate(derivs[static_cast<std::size_t>(k)], sys.delays[j]);
            terms.push_back(matrix_map(term, a));
        }
    return Signal::sum(terms);
}

NeutralSystem as_neutral(const OdeSystem& ode) {
    ode.validate();
    NeutralSystem sys;
    sys.order = ode.order;
    sys.block = ode.block;
    sys.delays = {0.0};
    sys.coeffs.emplace_back(ode.coeffs);
    sys.coeffs[0].push_back(ComplexMatrix::identity(ode.block));
    return sys;
}

// ------------------------------------------------------------ spectrum

ComplexMatrix characteristic_polynomial(const OdeSystem& ode, Complex lambda) {
    ComplexMatrix out = ComplexMatrix::identity(ode.block);
    for (auto& z : out.data) z *= std::pow(lambda, ode.order);
    Complex power = 1.0;
    for (const auto& a : ode.coeffs) {
        for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += power * a.data[i];
        power *= lambda;
    }
    return out;
}

std::vector<SpectralRoot> spectrum(const OdeSystem& ode) {
    ode.validate();
    const Mat c = companion(ode);
    Eigen::ComplexEigenSolver<Mat> solver(c, false);
    if (solver.info() != Eigen::Success) throw NumericGuardError("spectrum: eigenvalue solver failed");
    std::vector<Complex> eig(solver.eigenvalues().begin(), solver.eigenvalues().end());
    std::sort(eig.begin(), eig.end(), [](Complex a, Complex b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    const double scale = 1.0 + row_norm(c);
    const double cluster = 1e-6 * scale;
    std::vector<SpectralRoot> roots;
    std::vector<bool> used(eig.size(), false);
    for (std::size_t i = 0; i < eig.size(); ++i) {
        if (used[i]) continue;
        Complex sum = eig[i];
        int count = 1;
        used[i] = true;
        for (std::size_t j = i + 1; j < eig.size(); ++j)
            if (!used[j] && std::abs(eig[j] - eig[i]) <= cluster) {
                used[j] = true;
                sum += eig[j];
                ++count;
            }
        SpectralRoot root;
        root.value = sum / static_cast<double>(count);
        root.multiplicity = count;
        root.residual = std::abs(to_eigen(characteristic_polynomial(ode, root.value)).determinant());
        roots.push_back(root);
    }
    std::sort(roots.begin(), roots.end(), [](const SpectralRoot& a, const SpectralRoot& b) {
        return a.value.real() != b.value.real() ? a.value.real() < b.value.real()
                                                : a.value.imag() < b.value.imag();
    });
    return roots;
}

// -------------------------------------------------------- Green solver

GreenKernelInfo green_kernel_info(const OdeSystem& ode, const GreenOptions& opt) {
    ode.validate();
    const Dichotomy d = dichotomy(ode, opt.dichotomy_floor);
    GreenKernelInfo info;
    info.min_abs_re = d.min_abs_re;
    info.kernel_scale = row_norm(d.ps) + row_norm(d.pu);
    info.tail = tail_length(d, opt.tail_mass);

    // Trapezoid sum of ||G(t)|| for the y block on both half lines.
    const auto r = static_cast<Eigen::Index>(ode.block);
    const double h = opt.step;
    const std::size_t steps = steps_for(info.tail, h);
    const Mat fwd = (d.c * h).exp();
    const Mat bwd = (-d.c * h).exp();
    Mat gs = d.ps * d.b;
    Mat gu = d.pu * d.b;
    double l1 = 0.0;
    for (std::size_t i = 0; i <= steps; ++i) {
        const double w = (i == 0 || i == steps) ? 0.5 * h : h;
        l1 += w * (row_norm(gs.topRows(r)) + row_norm(gu.topRows(r)));
        gs = fwd * gs;
        gu = bwd * gu;
    }
    info.kernel_l1 = l1;
    return info;
}

Trajectory green_bounded_solve(const OdeSystem& ode, const Signal& f, double horizon,
                               const GreenOptions& opt) {
    ode.validate();
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("green solve: horizon must be positive");
    if (!(opt.step > 0.0)) throw ConfigError("green solve: step must be positive");
    eval_dim(f, ode.block, "green solve");
    const Dichotomy d = dichotomy(ode, opt.dichotomy_floor);
    const double h = opt.step;
    const std::size_t half = steps_for(horizon, h);
    const std::size_t tail = steps_for(tail_length(d, opt.tail_mass), h);
    const std::size_t count = 2 * half + 1;
    const std::size_t total = 2 * (half + tail);  // march steps over the padded grid
    const double start = -static_cast<double>(half + tail) * h;

    const auto gl = gauss_samples(f, start, h, total, opt.forcing_guard);
    const Mat ms = (d.c * h).exp() * d.ps;
    const Mat mu = (-d.c * h).exp() * d.pu;
    std::array<Mat, 4> ks, ku;
    for (std::size_t q = 0; q < 4; ++q) {
        const double x = GaussLegendre4::nodes[q];
        const double w = GaussLegendre4::weights[q];
        ks[q] = h * w * (d.c * (h * (1.0 - x))).exp() * d.ps * d.b;
        ku[q] = h * w * (-d.c * (h * x)).exp() * d.pu * d.b;
    }

    const auto n = d.c.rows();
    std::vector<Vec> states(count, Vec::Zero(n));
    // Stable part, forward from the left end of the padding.
    Vec y = Vec::Zero(n);
    for (std::size_t i = 0; i < total; ++i) {
        if (i >= tail && i - tail < count) states[i - tail] = y;
        Vec next = ms * y;
        for (std::size_t q = 0; q < 4; ++q) next += ks[q] * forcing_at(gl[q], i);
        y = next;
    }
    if (total - tail < count) states[total - tail] = y;
    // Unstable part, backward from the right end.
    y = Vec::Zero(n);
    for (std::size_t i = total; i-- > 0;) {
        Vec next = mu * y;
        for (std::size_t q = 0; q < 4; ++q) next -= ku[q] * forcing_at(gl[q], i);
        y = next;
        if (i >= tail && i - tail < count) states[i - tail] += y;
    }

    Trajectory traj(-static_cast<double>(half) * h, h, count, ode.block, ode.order + 1);
    traj.solver = "green-dichotomy";
    const SampleBlock nodes = f.sample(traj.t0(), h, count);
    finish_trajectory(traj, ode, states, nodes);
    return traj;
}

Trajectory ivp_halfline_solve(const OdeSystem& ode, const Signal& f, const std::vector<CVector>& init,
                              double alpha, double horizon, double step) {
    ode.validate();
    if (!(step > 0.0) || !(horizon > 0.0) || !std::isfinite(alpha))
        throw ConfigError("ivp solve: step and horizon must be positive");
    eval_dim(f, ode.block, "ivp solve");
    if (init.size() != static_cast<std::size_t>(ode.order))
        throw ConfigError("ivp solve: need initial values y^(k)(alpha) for k < n");
    const auto r = static_cast<Eigen::Index>(ode.block);
    const Mat c = companion(ode);
    const Mat b = input_map(ode);
    Vec y(c.rows());
    for (std::size_t k = 0; k < init.size(); ++k) {
        if (init[k].size() != ode.block) throw ConfigError("ivp solve: initial value dimension mismatch");
        for (Eigen::Index j = 0; j < r; ++j)
            y(static_cast<Eigen::Index>(k) * r + j) = init[k][static_cast<std::size_t>(j)];
    }
    const std::size_t steps = steps_for(horizon, step);
    const auto gl = gauss_samples(f, alpha, step, steps, std::numeric_limits<double>::max());
    const Mat e = (c * step).exp();
    std::array<Mat, 4> k;
    for (std::size_t q = 0; q < 4; ++q)
        k[q] = step * GaussLegendre4::weights[q] * (c * (step * (1.0 - GaussLegendre4::nodes[q]))).exp() * b;

    std::vector<Vec> states;
    states.reserve(steps + 1);
    states.push_back(y);
    for (std::size_t i = 0; i < steps; ++i) {
        Vec next = e * y;
        for (std::size_t q = 0; q < 4; ++q) next += k[q] * forcing_at(gl[q], i);
        if (!next.allFinite()) throw NumericGuardError("ivp solve: solution overflowed");
        y = next;
        states.push_back(y);
    }
    Trajectory traj(alpha, step, steps + 1, ode.block, ode.order + 1);
    traj.solver = "ivp-exponential";
    finish_trajectory(traj, ode, states, f.sample(alpha, step, steps + 1));
    return traj;
}

// --------------------------------------------------- Esclangon-Landau

double ladder_room(const Trajectory& traj, int depth, bool half_line) {
    const double reach = 4.0 * depth;
    if (half_line) return traj.t0() <= 0.0 ? traj.t_end() - reach : 0.0;
    if (traj.t0() > -0.5 * reach) return 0.0;
    return traj.t_end() - 0.5 * reach;
}

std::vector<DerivativeCheck> esclangon_check(const Trajectory& traj, int order, int depth,
                                             const LadderPolicy& policy) {
    if (order < 0 || order >= traj.orders())
        throw ConfigError("esclangon check: requested order exceeds the derivative stack");
    LadderPolicy capped = policy;
    if (order > 0) {
        const double room = ladder_room(traj, depth, policy.half_line);
        if (!(room > 0.0)) throw ConfigError("esclangon check: trajectory too short for the ladder");
        capped.s_cap = std::min(policy.s_cap, room);
    }
    std::vector<DerivativeCheck> out;
    for (int k = 0; k <= order; ++k) {
        DerivativeCheck check;
        check.order = k;
        check.sup = traj.sup(k);
        check.growth_flag = traj.grows(k);
        if (k < order) {
            check.has_ladder = true;
            check.ladder = recurrence_ladder(traj.as_signal(k), depth, capped);
        }
        out.push_back(std::move(check));
    }
    return out;
}

// -------------------------------------------------------------- formats

namespace {

ComplexMatrix block_from_json(const json& j, std::size_t r) {
    if (r == 1 && (j.is_number() || (j.is_array() && j.size() == 2 && j[0].is_number()))) {
        ComplexMatrix m(1, 1);
        m(0, 0) = complex_from_json(j);
        return m;
    }
    return cmatrix_from_json(j);
}

std::size_t block_size(const json& doc) {
    if (!doc.contains("block")) return 1;
    const json& b = doc.at("block");
    if (!b.is_number_integer() || b.get<long>() < 1) throw ConfigError("system: 'block' must be a positive integer");
    return b.get<std::size_t>();
}

void require_kind(const json& doc, const char* kind) {
    if (!doc.is_object()) throw ConfigError("system descriptor: expected an object");
    if (!doc.contains("kind") || doc.at("kind") != kind)
        throw ConfigError(std::string("system descriptor: expected kind '") + kind + "'");
}

}  // namespace

OdeSystem ode_from_json(const json& doc) {
    try {
        require_kind(doc, "ode");
        reject_unknown_keys(doc, {"kind", "block", "coeffs"}, "ode");
        OdeSystem ode;
        ode.block = block_size(doc);
        const json& coeffs = doc.at("coeffs");
        if (!coeffs.is_array() || coeffs.empty()) throw ConfigError("ode: 'coeffs' must list a_0 .. a_{n-1}");
        for (const auto& m : coeffs) ode.coeffs.push_back(block_from_json(m, ode.block));
        ode.order = static_cast<int>(ode.coeffs.size());
        ode.validate();
        return ode;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("ode descriptor: ") + e.what());
    }
}

json ode_to_json(const OdeSystem& ode) {
    json coeffs = json::array();
    for (const auto& m : ode.coeffs) coeffs.push_back(cmatrix_to_json(m));
    return {{"kind", "ode"}, {"block", ode.block}, {"coeffs", coeffs}};
}

NeutralSystem neutral_system_from_json(const json& doc) {
    try {
        require_kind(doc, "neutral");
        reject_unknown_keys(doc, {"kind", "block", "order", "terms"}, "neutral system");
        NeutralSystem sys;
        sys.block = block_size(doc);
        const json& order = doc.at("order");
        if (!order.is_number_integer()) throw ConfigError("neutral system: 'order' must be an integer");
        sys.order = order.get<int>();
        for (const auto& term : doc.at("terms")) {
            reject_unknown_keys(term, {"delay", "coeffs"}, "neutral term");
            sys.delays.push_back(term.at("delay").get<double>());
            std::vector<ComplexMatrix> row;
            for (const auto& m : term.at("coeffs")) row.push_back(block_from_json(m, sys.block));
            sys.coeffs.push_back(std::move(row));
        }
        sys.validate();
        return sys;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("neutral system descriptor: ") + e.what());
    }
}

json neutral_system_to_json(const NeutralSystem& sys) {
    json terms = json::array();
    for (std::size_t j = 0; j < sys.delays.size(); ++j) {
        json coeffs = json::array();
        for (const auto& m : sys.coeffs[j]) coeffs.push_back(cmatrix_to_json(m));
        terms.push_back({{"delay", sys.delays[j]}, {"coeffs", coeffs}});
    }
    return {{"kind", "neutral"}, {"block", sys.block}, {"order", sys.order}, {"terms", terms}};
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << "t";
    for (int k = 0; k < traj.orders(); ++k)
        for (std::size_t c = 0; c < traj.block(); ++c) out << ",d" << k << '_' << c << "_re,d" << k << '_' << c << "_im";
    out << '\n';
    char buf[32];
    for (std::size_t i = 0; i < traj.count(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", traj.time(i));
        out << buf;
        for (int k = 0; k < traj.orders(); ++k)
            for (std::size_t c = 0; c < traj.block(); ++c) {
                const Complex z = traj.at(k, c, i);
                std::snprintf(buf, sizeof buf, ",%.17g", z.real());
                out << buf;
                std::snprintf(buf, sizeof buf, ",%.17g", z.imag());
                out << buf;
            }
        out << '\n';
    }
}

json trajectory_meta(const Trajectory& traj) {
    json sups = json::array();
    for (int k = 0; k < traj.orders(); ++k) sups.push_back(traj.sup(k));
    return {{"solver", traj.solver},     {"t0", traj.t0()},
            {"step", traj.step()},       {"count", traj.count()},
            {"block", traj.block()},     {"orders", traj.orders()},
            {"residual", traj.error_estimate}, {"sup_by_order", sups}};
}

}  // namespace reclab
