#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "reclab/signal.hpp"
#include "reclab/types.hpp"

namespace reclab {

inline constexpr double kNoGap = std::numeric_limits<double>::infinity();

struct ScanOptions {
    /// tau grid step; rounded to a whole multiple of the window grid step so
    /// shifted samples land on one common grid.
    double tau_step = 1e-2;
    /// Confirm each grid-accepted tau with a golden-section search for the
    /// sup near the worst grid point (interval windows only).
    bool refine = true;
    unsigned workers = 1;
    /// tau values per work block. Blocks are fixed by this size alone, so
    /// results do not depend on the worker count.
    std::size_t block = std::size_t{1} << 14;
    /// Refuse scans with more tau points than this.
    std::size_t max_tau_points = std::size_t{200'000'000};
};

/// A tau that passed the grid criterion.
struct ScanCandidate {
    double tau = 0.0;
    double grid_sup = 0.0;     // max over grid points of ||f(t + tau) - f(t)||
    double refined_sup = 0.0;  // after local refinement (== grid_sup when off)
    bool accepted = false;     // refined_sup <= eps
};

/// Scan result: the grid points of E(f, eps, K) in a tau range.
struct AlmostPeriodSet {
    double eps = 0.0;
    ProbeWindow window = ProbeWindow::symmetric(1.0);
    Interval range{};
    double step = 0.0;  // tau grid step actually used
    std::vector<ScanCandidate> candidates;
    std::vector<double> members;  // accepted taus, strictly ascending
    double max_gap = kNoGap;
    bool refined = false;
};

/// Smallest L such that every length-L subinterval of `range` meets the
/// members, range endpoints counting as gap boundaries. +inf when empty.
double max_gap(const std::vector<double>& members, Interval range);
double max_gap(const AlmostPeriodSet& set);

/// max over the window samples of ||f(t) - g(t)|| (sup norm on C^dim).
double sup_distance(const Signal& f, const Signal& g, const ProbeWindow& window);

/// Grid scan of E(f, eps, K) over tau in `range`.
AlmostPeriodSet almost_period_set(const Signal& f, double eps, const ProbeWindow& window,
                                  Interval range, const ScanOptions& options = {});

/// Same scan with K a finite probe set: no neighborhood, no refinement.
AlmostPeriodSet discrete_period_scan(const Signal& f, double eps, const std::vector<double>& probes,
                                     Interval range, const ScanOptions& options = {});

/// Stacked tuple (f_1, ..., f_n). With the max-of-components norm its
/// almost-period set is the intersection of the components' sets.
Signal joint_tuple(const std::vector<Signal>& parts);

// ------------------------------------------------------------ ladders

/// Rung n uses eps_n = 2^-n, K_n = [-2n, 2n] (or [0, 4n] on a half line) and
/// tau range [0, S_n] with S_n = min(base_range * growth^n, s_cap). A rung
/// passes iff its max gap is at most gap_fraction * S_n.
struct LadderPolicy {
    double gap_fraction = 1.0 / 20.0;
    double s_cap = 1e6;
    double base_range = 200.0;
    double range_growth = 4.0;
    double window_step = 1e-2;
    bool half_line = false;
    ScanOptions scan{};
};

struct LadderRung {
    int n = 0;
    double eps = 0.0;
    Interval window{};
    double range = 0.0;
    double max_gap = kNoGap;
    double gap_bound = 0.0;
    std::size_t members = 0;
    bool passed = false;
};

/// Empirical outcome: "recurrent" only means every scanned rung passed.
struct LadderVerdict {
    std::vector<LadderRung> rungs;
    bool recurrent = false;
    int rejected_at = 0;  // first failing rung, 0 if none

    [[nodiscard]] std::string describe() const;
};

LadderVerdict recurrence_ladder(const Signal& f, int n_max, const LadderPolicy& policy = {});

// ------------------------------------------------------------ metric

struct MetricResult {
    double value = 0.0;
    int achieving_n = 1;
    std::vector<double> terms;  // min{1/n, sup_{|t|<=n} ||f - g||} for n = 1..n_max
};

/// d(f, g) = max_{n <= n_max} min{1/n, sup_{|t| <= n} ||f(t) - g(t)||}.
MetricResult metric_d(const Signal& f, const Signal& g, int n_max, double sample_step = 1e-2);

// ------------------------------------------------------- inclusion checks

struct InclusionReport {
    bool holds = true;
    int m = 0;                      // outer level n + floor(|h|) + 1
    std::size_t checked = 0;        // members of E(g, 1/m, [-m, m]) tested
    double worst_sup = 0.0;         // largest sup of Delta_h P g differences seen
    double bound = 0.0;             // 1/n
    std::optional<double> violator; // first tau outside E(Delta_h P g, 1/n, [-n, n])
};

/// Checks E(g, 1/m, [-m, m]) subset E(Delta_h P g, 1/n, [-n, n]) with
/// m = n + floor(|h|) + 1 on the scanned tau range.
InclusionReport difference_period_inclusion(const Signal& g, double h, int n, Interval range,
                                     const ScanOptions& options = {});

struct CoverTrial {
    double delta = 0.0;
    std::size_t intersection = 0;  // scanned taus in the intersection
    std::size_t violators = 0;
    std::optional<double> first_violator;
    bool passed = false;
};

struct CoverResult {
    bool verified = false;
    double delta = 0.0;  // largest passing delta (0 when none)
    ProbeWindow widened = ProbeWindow::symmetric(1.0);
    std::vector<CoverTrial> trials;  // in the order tried (descending delta)
};

/// Searches delta on `delta_grid` such that the intersection over j of
/// E(Delta_{s_j} f, delta, K_*) lies inside E(f, eps, K), with K_* the window
/// widened by max |s_j| (rounded up to the grid).
CoverResult cover_inclusion_search(const Signal& f, double eps, const ProbeWindow& window,
                                   const std::vector<double>& shifts,
                                   std::vector<double> delta_grid, Interval range,
                                   const ScanOptions& options = {});

// ---------------------------------------------------- means and moduli

struct ErgodicResult {
    CVector mean;                    // estimate at the largest T, averaged over probes
    std::vector<double> deviations;  // sup_x ||(1/2T) int_{-T}^{T} f(t + x) dt - m|| per T
    bool ergodic = false;            // deviations decrease and end below tolerance
};

/// Windowed means over horizons T at probe offsets x. Deviations are taken
/// against `reference` when the mean is known, otherwise against the
/// estimate at the largest horizon, which needs at least two probes.
ErgodicResult ergodic_mean(const Signal& f, const std::vector<double>& horizons,
                           const std::vector<double>& probes, double tolerance = 1e-2,
                           const std::optional<CVector>& reference = std::nullopt);

/// Size of the greedy eps-net of the values f(t0 + i dt), i < count.
std::size_t range_net(const Signal& f, double t0, double dt, std::size_t count, double eps);

struct ModulusEntry {
    double delta = 0.0;
    double modulus = 0.0;
};

/// delta -> sup_{|s| <= delta, t in K} ||f(t + s) - f(t)||, ascending in
/// delta and made monotone by running maximum.
std::vector<ModulusEntry> uc_modulus(const Signal& f, const ProbeWindow& window,
                                     std::vector<double> deltas);

}  // namespace reclab
