#include "reclab/recurrence.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "reclab/parallel.hpp"
#include "reclab/quadrature.hpp"

namespace reclab {

namespace {

constexpr double kGolden = 0.61803398874989484820;
constexpr int kGoldenIterations = 12;

void validate_scan(double eps, Interval range, const ScanOptions& opt) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw ConfigError("eps must be positive");
    if (!(opt.tau_step > 0.0) || !std::isfinite(opt.tau_step))
        throw ConfigError("tau step must be positive");
    if (!std::isfinite(range.lo) || !std::isfinite(range.hi))
        throw ConfigError("scan range must be finite");
    if (range.hi < range.lo) throw ConfigError("scan range is empty");
    if (opt.block == 0) throw ConfigError("scan block size must be positive");
}

std::size_t tau_count(Interval range, double dtau, const ScanOptions& opt) {
    const double span = (range.hi - range.lo) / dtau;
    if (span + 1.0 > static_cast<double>(opt.max_tau_points))
        throw NumericGuardError("scan would exceed the tau point limit");
    return static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
}

/// Maximum of phi on [a, b] by golden-section search, seeded with a known
/// value so the result never drops below the grid estimate.
template <class Phi>
double golden_max(const Phi& phi, double a, double b, double seed) {
    double best = seed;
    double x1 = b - kGolden * (b - a);
    double x2 = a + kGolden * (b - a);
    double f1 = phi(x1);
    double f2 = phi(x2);
    best = std::max({best, f1, f2});
    for (int it = 0; it < kGoldenIterations; ++it) {
        if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kGolden * (b - a);
            f1 = phi(x1);
            best = std::max(best, f1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kGolden * (b - a);
            f2 = phi(x2);
            best = std::max(best, f2);
        }
    }
    return best;
}

/// Per-coordinate refinement of sup_t |f_c(t + tau) - f_c(t)| around the
/// worst grid point of each coordinate. Working coordinate-wise keeps the
/// decision for a stacked tuple identical to the conjunction of the
/// decisions for its parts.
double refine_sup(const Signal& f, double tau, Interval k, double dk,
                  const std::vector<std::size_t>& argmax, const std::vector<double>& grid_max) {
    const std::size_t dim = f.dim();
    CVector a(dim), b(dim);
    double best = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
        const double t = k.lo + static_cast<double>(argmax[c]) * dk;
        const double lo = std::max(k.lo, t - dk);
        const double hi = std::min(k.hi, t + dk);
        auto phi = [&](double s) {
            f.eval_into(s + tau, a);
            f.eval_into(s, b);
            return std::abs(a[c] - b[c]);
        };
        const double refined = hi > lo ? golden_max(phi, lo, hi, grid_max[c]) : grid_max[c];
        best = std::max(best, refined);
    }
    return best;
}

void finish(AlmostPeriodSet& set, std::vector<std::vector<ScanCandidate>>& blocks) {
    for (auto& b : blocks)
        for (auto& c : b) {
            if (c.accepted) set.members.push_back(c.tau);
            set.candidates.push_back(c);
        }
    set.max_gap = max_gap(set.members, set.range);
}

}  // namespace

double max_gap(const std::vector<double>& members, Interval range) {
    if (members.empty()) return kNoGap;
    double gap = std::max(members.front() - range.lo, range.hi - members.back());
    for (std::size_t i = 1; i < members.size(); ++i) gap = std::max(gap, members[i] - members[i - 1]);
    return gap;
}

double max_gap(const AlmostPeriodSet& set) { return max_gap(set.members, set.range); }

double sup_distance(const Signal& f, const Signal& g, const ProbeWindow& window) {
    if (f.dim() != g.dim()) throw ConfigError("sup_distance: dimension mismatch");
    double sup = 0.0;
    if (window.is_interval()) {
        const std::size_t n = window.cells() + 1;
        const auto a = f.sample(window.bounds().lo, window.grid_step(), n);
        const auto b = g.sample(window.bounds().lo, window.grid_step(), n);
        for (std::size_t i = 0; i < a.data.size(); ++i) sup = std::max(sup, std::abs(a.data[i] - b.data[i]));
        return sup;
    }
    CVector a(f.dim()), b(f.dim());
    for (double t : window.points()) {
        f.eval_into(t, a);
        g.eval_into(t, b);
        for (std::size_t c = 0; c < a.size(); ++c) sup = std::max(sup, std::abs(a[c] - b[c]));
    }
    return sup;
}

AlmostPeriodSet almost_period_set(const Signal& f, double eps, const ProbeWindow& window,
                                  Interval range, const ScanOptions& opt) {
    if (!window.is_interval()) return discrete_period_scan(f, eps, window.points(), range, opt);
    validate_scan(eps, range, opt);

    const Interval k = window.bounds();
    const std::size_t nk = window.cells() + 1;
    const double dk = window.grid_step();
    const auto ratio = static_cast<std::size_t>(std::max(1.0, std::round(opt.tau_step / dk)));
    const double dtau = static_cast<double>(ratio) * dk;
    const std::size_t count = tau_count(range, dtau, opt);
    const std::size_t dim = f.dim();
    const double eps2 = eps * eps;

    AlmostPeriodSet set;
    set.eps = eps;
    set.window = window;
    set.range = range;
    set.step = dtau;
    set.refined = opt.refine;

    const SampleBlock base = f.sample(k.lo, dk, nk);
    const std::size_t blocks = (count + opt.block - 1) / opt.block;
    std::vector<std::vector<ScanCandidate>> found(blocks);

    parallel_for(blocks, opt.workers, [&](std::size_t b) {
        const std::size_t j0 = b * opt.block;
        const std::size_t j1 = std::min(count, j0 + opt.block);
        const std::size_t span = (j1 - 1 - j0) * ratio + nk;
        const SampleBlock shifted =
            f.sample(k.lo + range.lo + static_cast<double>(j0) * dtau, dk, span);
        std::vector<std::size_t> argmax(dim);
        std::vector<double> grid_max(dim);
        for (std::size_t j = j0; j < j1; ++j) {
            const std::size_t off = (j - j0) * ratio;
            bool ok = true;
            double sup2 = 0.0;
            for (std::size_t i = 0; i < nk && ok; ++i) {
                for (std::size_t c = 0; c < dim; ++c) {
                    const double d2 = std::norm(shifted.data[c * span + off + i] - base.data[c * nk + i]);
                    if (d2 > eps2) {
                        ok = false;
                        break;
                    }
                    sup2 = std::max(sup2, d2);
                }
            }
            if (!ok) continue;
            ScanCandidate cand;
            cand.tau = range.lo + static_cast<double>(j) * dtau;
            cand.grid_sup = std::sqrt(sup2);
            cand.refined_sup = cand.grid_sup;
            if (opt.refine) {
                std::fill(grid_max.begin(), grid_max.end(), -1.0);
                for (std::size_t c = 0; c < dim; ++c)
                    for (std::size_t i = 0; i < nk; ++i) {
                        const double d = std::abs(shifted.data[c * span + off + i] - base.data[c * nk + i]);
                        if (d > grid_max[c]) {
                            grid_max[c] = d;
                            argmax[c] = i;
                        }
                    }
                cand.refined_sup = refine_sup(f, cand.tau, k, dk, argmax, grid_max);
            }
            cand.accepted = cand.refined_sup <= eps;
            found[b].push_back(cand);
        }
    });
    finish(set, found);
    return set;
}

AlmostPeriodSet discrete_period_scan(const Signal& f, double eps, const std::vector<double>& probes,
                                     Interval range, const ScanOptions& opt) {
    const ProbeWindow window = ProbeWindow::probes(probes);
    validate_scan(eps, range, opt);
    const double dtau = opt.tau_step;
    const std::size_t count = tau_count(range, dtau, opt);
    const std::size_t dim = f.dim();
    const auto& points = window.points();
    const double eps2 = eps * eps;

    AlmostPeriodSet set;
    set.eps = eps;
    set.window = window;
    set.range = range;
    set.step = dtau;
    set.refined = false;

    std::vector<CVector> base;
    for (double p : points) base.push_back(f.eval(p));

    const std::size_t blocks = (count + opt.block - 1) / opt.block;
    std::vector<std::vector<ScanCandidate>> found(blocks);
    parallel_for(blocks, opt.workers, [&](std::size_t b) {
        const std::size_t j0 = b * opt.block;
        const std::size_t j1 = std::min(count, j0 + opt.block);
        CVector v(dim);
        for (std::size_t j = j0; j < j1; ++j) {
            const double tau = range.lo + static_cast<double>(j) * dtau;
            bool ok = true;
            double sup2 = 0.0;
            for (std::size_t p = 0; p < points.size() && ok; ++p) {
                f.eval_into(points[p] + tau, v);
                for (std::size_t c = 0; c < dim; ++c) {
                    const double d2 = std::norm(v[c] - base[p][c]);
                    if (d2 > eps2) {
                        ok = false;
                        break;
                    }
                    sup2 = std::max(sup2, d2);
                }
            }
            if (!ok) continue;
            const double sup = std::sqrt(sup2);
            found[b].push_back({tau, sup, sup, true});
        }
    });
    finish(set, found);
    return set;
}

Signal joint_tuple(const std::vector<Signal>& parts) { return Signal::stack(parts); }

// ------------------------------------------------------------ ladders

std::string LadderVerdict::describe() const {
    std::ostringstream os;
    if (recurrent) {
        os << "empirically-recurrent (up to rung " << rungs.size();
        if (!rungs.empty()) os << ", range " << rungs.back().range;
        os << ")";
    } else {
        os << "rejected-at-rung-" << rejected_at;
    }
    return os.str();
}

LadderVerdict recurrence_ladder(const Signal& f, int n_max, const LadderPolicy& policy) {
    if (n_max < 1) throw ConfigError("ladder depth must be at least 1");
    if (!(policy.gap_fraction > 0.0) || !(policy.s_cap > 0.0) || !(policy.base_range > 0.0) ||
        !(policy.range_growth > 0.0) || !(policy.window_step > 0.0))
        throw ConfigError("ladder policy values must be positive");
    LadderVerdict verdict;
    verdict.recurrent = true;
    for (int n = 1; n <= n_max; ++n) {
        LadderRung rung;
        rung.n = n;
        rung.eps = std::ldexp(1.0, -n);
        const double half = 2.0 * n;
        rung.window = policy.half_line ? Interval{0.0, 2.0 * half} : Interval{-half, half};
        rung.range = std::min(policy.base_range * std::pow(policy.range_growth, n), policy.s_cap);
        const auto window = ProbeWindow::interval(rung.window.lo, rung.window.hi, policy.window_step);
        const auto set = almost_period_set(f, rung.eps, window, {0.0, rung.range}, policy.scan);
        rung.max_gap = set.max_gap;
        rung.members = set.members.size();
        rung.gap_bound = policy.gap_fraction * rung.range;
        rung.passed = rung.max_gap <= rung.gap_bound;
        verdict.rungs.push_back(rung);
        if (!rung.passed) {
            verdict.recurrent = false;
            verdict.rejected_at = n;
            break;
        }
    }
    return verdict;
}

// ------------------------------------------------------------ metric

MetricResult metric_d(const Signal& f, const Signal& g, int n_max, double sample_step) {
    if (f.dim() != g.dim()) throw ConfigError("metric_d: dimension mismatch");
    if (n_max < 1) throw ConfigError("metric_d: n_max must be at least 1");
    MetricResult out;
    out.value = -1.0;
    for (int n = 1; n <= n_max; ++n) {
        const double sup = sup_distance(f, g, ProbeWindow::symmetric(n, sample_step));
        const double term = std::min(1.0 / n, sup);
        out.terms.push_back(term);
        if (term > out.value) {
            out.value = term;
            out.achieving_n = n;
        }
    }
    return out;
}

// ------------------------------------------------------- inclusion checks

InclusionReport difference_period_inclusion(const Signal& g, double h, int n, Interval range,
                                     const ScanOptions& opt) {
    if (n < 1) throw ConfigError("inclusion level n must be at least 1");
    if (h == 0.0 || !std::isfinite(h)) throw ConfigError("inclusion step h must be non-zero");
    InclusionReport rep;
    rep.m = n + static_cast<int>(std::floor(std::abs(h))) + 1;
    rep.bound = 1.0 / n;

    const auto outer = almost_period_set(g, 1.0 / rep.m, ProbeWindow::symmetric(rep.m), range, opt);
    const Signal target = difference(indefinite_integral(g, 0.0), h);
    const ProbeWindow inner = ProbeWindow::symmetric(n);
    const std::size_t nk = inner.cells() + 1;
    const double dk = inner.grid_step();
    const SampleBlock base = target.sample(-n, dk, nk);
    // Quadrature noise allowance on a difference of two integrals.
    const double slack = 10.0 * target.quad_tol();

    std::vector<double> sups(outer.members.size());
    parallel_for(outer.members.size(), opt.workers, [&](std::size_t idx) {
        const SampleBlock moved = target.sample(-n + outer.members[idx], dk, nk);
        double sup = 0.0;
        for (std::size_t i = 0; i < moved.data.size(); ++i)
            sup = std::max(sup, std::abs(moved.data[i] - base.data[i]));
        sups[idx] = sup;
    });
    rep.checked = sups.size();
    for (std::size_t idx = 0; idx < sups.size(); ++idx) {
        rep.worst_sup = std::max(rep.worst_sup, sups[idx]);
        if (sups[idx] > rep.bound + slack && !rep.violator) {
            rep.holds = false;
            rep.violator = outer.members[idx];
        }
    }
    return rep;
}

CoverResult cover_inclusion_search(const Signal& f, double eps, const ProbeWindow& window,
                                   const std::vector<double>& shifts, std::vector<double> delta_grid,
                                   Interval range, const ScanOptions& opt) {
    if (!window.is_interval()) throw ConfigError("cover search needs an interval window");
    if (shifts.empty()) throw ConfigError("cover search needs at least one shift");
    if (delta_grid.empty()) throw ConfigError("cover search needs a delta grid");
    double reach = 0.0;
    for (double s : shifts) reach = std::max(reach, std::abs(s));
    const double dk = window.grid_step();
    const double pad = std::ceil(reach / dk - 1e-9) * dk;

    CoverResult result;
    result.widened = ProbeWindow::interval(window.bounds().lo - pad, window.bounds().hi + pad,
                                           window.sample_step());
    std::vector<Signal> diffs;
    for (double s : shifts) diffs.push_back(difference(f, s));
    const Signal joint = joint_tuple(diffs);

    std::sort(delta_grid.begin(), delta_grid.end(), std::greater<>());
    const std::size_t nk = window.cells() + 1;
    const SampleBlock base = f.sample(window.bounds().lo, dk, nk);
    for (double delta : delta_grid) {
        if (!(delta > 0.0)) throw ConfigError("delta grid values must be positive");
        const auto inter = almost_period_set(joint, delta, result.widened, range, opt);
        CoverTrial trial;
        trial.delta = delta;
        trial.intersection = inter.members.size();
        std::vector<double> sups(inter.members.size());
        parallel_for(inter.members.size(), opt.workers, [&](std::size_t idx) {
            const SampleBlock moved = f.sample(window.bounds().lo + inter.members[idx], dk, nk);
            double sup = 0.0;
            for (std::size_t i = 0; i < moved.data.size(); ++i)
                sup = std::max(sup, std::abs(moved.data[i] - base.data[i]));
            sups[idx] = sup;
        });
        for (std::size_t idx = 0; idx < sups.size(); ++idx) {
            if (sups[idx] > eps) {
                ++trial.violators;
                if (!trial.first_violator) trial.first_violator = inter.members[idx];
            }
        }
        trial.passed = trial.violators == 0;
        result.trials.push_back(trial);
        if (trial.passed) {
            result.verified = true;
            result.delta = delta;
            break;
        }
    }
    return result;
}

// ---------------------------------------------------- means and moduli

ErgodicResult ergodic_mean(const Signal& f, const std::vector<double>& horizons,
                           const std::vector<double>& probes, double tolerance,
                           const std::optional<CVector>& reference) {
    if (horizons.empty() || probes.empty()) throw ConfigError("ergodic mean needs horizons and probes");
    if (!reference && probes.size() < 2)
        throw ConfigError("ergodic mean needs two or more probes when the mean is not known");
    if (reference && reference->size() != f.dim()) throw ConfigError("ergodic reference has the wrong dimension");
    for (std::size_t i = 0; i < horizons.size(); ++i) {
        if (!(horizons[i] > 0.0)) throw ConfigError("ergodic horizons must be positive");
        if (i > 0 && !(horizons[i] > horizons[i - 1]))
            throw ConfigError("ergodic horizons must be increasing");
    }
    const std::size_t dim = f.dim();
    const VectorIntegrand g = [&f](double s, std::span<Complex> o) { f.eval_into(s, o); };
    std::vector<std::vector<CVector>> means(horizons.size());
    for (std::size_t h = 0; h < horizons.size(); ++h) {
        const double T = horizons[h];
        for (double x : probes) {
            CVector v = adaptive_simpson(g, x - T, x + T, dim, f.quad_tol() * 2.0 * T,
                                         panel_width(f.frequency_bound(x - T, x + T)));
            for (auto& z : v) z /= 2.0 * T;
            means[h].push_back(std::move(v));
        }
    }
    ErgodicResult out;
    out.mean.assign(dim, Complex{});
    for (const auto& v : means.back())
        for (std::size_t c = 0; c < dim; ++c) out.mean[c] += v[c];
    for (auto& z : out.mean) z /= static_cast<double>(probes.size());
    const CVector& m = reference ? *reference : out.mean;
    for (const auto& per_probe : means) {
        double dev = 0.0;
        for (const auto& v : per_probe)
            for (std::size_t c = 0; c < dim; ++c) dev = std::max(dev, std::abs(v[c] - m[c]));
        out.deviations.push_back(dev);
    }
    out.ergodic = out.deviations.back() <= tolerance && out.deviations.back() <= out.deviations.front();
    return out;
}

std::size_t range_net(const Signal& f, double t0, double dt, std::size_t count, double eps) {
    if (!(eps > 0.0)) throw ConfigError("net radius must be positive");
    const auto block = f.sample(t0, dt, count);
    const std::size_t dim = f.dim();
    std::vector<CVector> centers;
    CVector v(dim);
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t c = 0; c < dim; ++c) v[c] = block.data[c * count + i];
        const bool covered = std::any_of(centers.begin(), centers.end(), [&](const CVector& z) {
            for (std::size_t c = 0; c < dim; ++c)
                if (std::abs(z[c] - v[c]) > eps) return false;
            return true;
        });
        if (!covered) centers.push_back(v);
    }
    return centers.size();
}

std::vector<ModulusEntry> uc_modulus(const Signal& f, const ProbeWindow& window,
                                     std::vector<double> deltas) {
    if (!window.is_interval()) throw ConfigError("uc_modulus needs an interval window");
    std::sort(deltas.begin(), deltas.end());
    const std::size_t nk = window.cells() + 1;
    const double dk = window.grid_step();
    const double lo = window.bounds().lo;
    const SampleBlock base = f.sample(lo, dk, nk);
    std::vector<ModulusEntry> table;
    double running = 0.0;
    for (double delta : deltas) {
        if (!(delta >= 0.0)) throw ConfigError("moduli deltas must be non-negative");
        const int steps = static_cast<int>(std::clamp(std::ceil(delta / dk), 4.0, 64.0));
        double sup = 0.0;
        if (delta > 0.0) {
            for (int j = -steps; j <= steps; ++j) {
                const double s = delta * j / steps;
                const SampleBlock moved = f.sample(lo + s, dk, nk);
                for (std::size_t i = 0; i < moved.data.size(); ++i)
                    sup = std::max(sup, std::abs(moved.data[i] - base.data[i]));
            }
        }
        running = std::max(running, sup);
        table.push_back({delta, running});
    }
    return table;
}

}  // namespace reclab
