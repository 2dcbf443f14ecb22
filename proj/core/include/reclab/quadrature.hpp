#pragma once

#include <array>
#include <functional>
#include <shared_mutex>
#include <vector>

#include "reclab/types.hpp"

namespace reclab {

/// Vector-valued integrand: writes f(t) into `out` (size = dim).
using VectorIntegrand = std::function<void(double, std::span<Complex>)>;

/// Largest initial panel for an integrand oscillating at angular frequency
/// at most `omega`: one radian per panel, never wider than 1/8.
double panel_width(double omega);

/// (a, b) -> largest initial panel width on [a, b].
using PanelRule = std::function<double(double, double)>;

/// Adaptive composite Simpson quadrature of a C^dim-valued integrand over
/// [a, b] (a > b allowed, giving the signed integral). The error target is
/// an absolute sup-norm tolerance on the whole integral; panels are split
/// until the Richardson estimate |S2 - S1| / 15 is below their share.
CVector adaptive_simpson(const VectorIntegrand& f, double a, double b, std::size_t dim,
                         double tol, double max_panel = 0.125);

/// 4-point Gauss-Legendre rule on [0, 1]: nodes and weights.
struct GaussLegendre4 {
    static constexpr std::array<double, 4> nodes{
        0.069431844202973712388, 0.33000947820757186760, 0.66999052179242813240,
        0.93056815579702628761};
    static constexpr std::array<double, 4> weights{
        0.17392742256872692869, 0.32607257743127307131, 0.32607257743127307131,
        0.17392742256872692869};
};

/// Checkpoint table for t -> int_alpha^t f, with checkpoints at
/// alpha + k * spacing. The table grows lazily in both directions; each new
/// checkpoint is the previous one plus one adaptive cell integral, always
/// built outward from alpha, so values never depend on access order.
/// Readers share a lock; extension takes it exclusively.
class CumulativeIntegralCache {
public:
    CumulativeIntegralCache(double alpha, double spacing, std::size_t dim, double tol,
                            PanelRule panels = {});

    /// Integral from alpha to the checkpoint alpha + k * spacing.
    CVector checkpoint(long k, const VectorIntegrand& f) const;

    [[nodiscard]] double alpha() const { return alpha_; }
    [[nodiscard]] double spacing() const { return spacing_; }
    [[nodiscard]] double tol() const { return tol_; }
    [[nodiscard]] double node(long k) const { return alpha_ + static_cast<double>(k) * spacing_; }

private:
    void extend_to(long k, const VectorIntegrand& f) const;

    double alpha_;
    double spacing_;
    std::size_t dim_;
    double tol_;
    PanelRule panels_;
    mutable std::shared_mutex mutex_;
    // forward_[k] = checkpoint k >= 0, backward_[k] = checkpoint -(k + 1)
    mutable std::vector<CVector> forward_;
    mutable std::vector<CVector> backward_;
};

}  // namespace reclab
