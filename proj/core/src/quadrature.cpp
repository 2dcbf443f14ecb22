#include "reclab/quadrature.hpp"

#include <cmath>
#include <mutex>

namespace reclab {

namespace {

constexpr int kMaxDepth = 48;
constexpr int kMinDepth = 2;

/// Adaptive Simpson over one call. Values live in a flat per-level
/// workspace: level d holds the two new quarter-point values and the two
/// half-panel estimates, so recursion allocates nothing.
class Simpson {
public:
    Simpson(const VectorIntegrand& f, std::size_t dim)
        : f_(f), dim_(dim), work_(static_cast<std::size_t>(kMaxDepth + 2) * 4 * dim + 3 * dim) {}

    Complex* slot(int level, int which) {
        return work_.data() + (static_cast<std::size_t>(level) * 4 + static_cast<std::size_t>(which)) * dim_;
    }
    // Three scratch vectors for the top-level panel.
    Complex* top(int which) {
        return work_.data() + static_cast<std::size_t>(kMaxDepth + 2) * 4 * dim_ +
               static_cast<std::size_t>(which) * dim_;
    }

    void eval(double t, Complex* out) const { f_(t, std::span<Complex>(out, dim_)); }

    void whole(double a, double b, const Complex* fa, const Complex* fm, const Complex* fb,
               Complex* out) const {
        const double w = (b - a) / 6.0;
        for (std::size_t i = 0; i < dim_; ++i) out[i] = w * (fa[i] + 4.0 * fm[i] + fb[i]);
    }

    void recurse(double a, double b, const Complex* fa, const Complex* fm, const Complex* fb,
                 const Complex* est, double tol, int depth, CVector& acc) {
        const double m = 0.5 * (a + b);
        Complex* flm = slot(depth, 0);
        Complex* frm = slot(depth, 1);
        Complex* sl = slot(depth, 2);
        Complex* sr = slot(depth, 3);
        eval(0.5 * (a + m), flm);
        eval(0.5 * (m + b), frm);
        whole(a, m, fa, flm, fm, sl);
        whole(m, b, fm, frm, fb, sr);
        double err = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) err = std::max(err, std::abs(sl[i] + sr[i] - est[i]));
        if (depth >= kMaxDepth || (depth >= kMinDepth && err <= 15.0 * tol) || a == m || m == b) {
            for (std::size_t i = 0; i < dim_; ++i) {
                const Complex two = sl[i] + sr[i];
                acc[i] += two + (two - est[i]) / 15.0;
            }
            return;
        }
        recurse(a, m, fa, flm, fm, sl, 0.5 * tol, depth + 1, acc);
        recurse(m, b, fm, frm, fb, sr, 0.5 * tol, depth + 1, acc);
    }

private:
    const VectorIntegrand& f_;
    std::size_t dim_;
    std::vector<Complex> work_;
};

}  // namespace

double panel_width(double omega) {
    const double w = std::abs(omega);
    return w > 8.0 ? 1.0 / w : 0.125;
}

CVector adaptive_simpson(const VectorIntegrand& f, double a, double b, std::size_t dim,
                         double tol, double max_panel) {
    CVector acc(dim, Complex{0.0, 0.0});
    if (a == b) return acc;
    if (!(tol > 0.0)) throw ConfigError("quadrature tolerance must be positive");
    if (!(max_panel > 0.0)) throw ConfigError("quadrature panel width must be positive");
    const double sign = b > a ? 1.0 : -1.0;
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    // Narrow initial panels keep the start grid from aliasing oscillatory
    // integrands.
    const auto panels = static_cast<std::size_t>(std::max(1.0, std::ceil((hi - lo) / max_panel)));
    const double width = (hi - lo) / static_cast<double>(panels);
    const double panel_tol = tol / static_cast<double>(panels);
    Simpson s(f, dim);
    Complex* fa = s.top(0);
    Complex* fb = s.top(1);
    Complex* fm = s.top(2);
    std::vector<Complex> est(dim);
    s.eval(lo, fa);
    for (std::size_t k = 0; k < panels; ++k) {
        const double pa = lo + static_cast<double>(k) * width;
        const double pb = (k + 1 == panels) ? hi : lo + static_cast<double>(k + 1) * width;
        s.eval(0.5 * (pa + pb), fm);
        s.eval(pb, fb);
        s.whole(pa, pb, fa, fm, fb, est.data());
        s.recurse(pa, pb, fa, fm, fb, est.data(), panel_tol, 0, acc);
        std::swap(fa, fb);
    }
    for (auto& z : acc) z *= sign;
    return acc;
}

CumulativeIntegralCache::CumulativeIntegralCache(double alpha, double spacing, std::size_t dim,
                                                 double tol, PanelRule panels)
    : alpha_(alpha), spacing_(spacing), dim_(dim), tol_(tol), panels_(std::move(panels)) {
    if (!panels_) panels_ = [](double, double) { return 0.125; };
    if (!(spacing > 0.0)) throw ConfigError("checkpoint spacing must be positive");
    forward_.emplace_back(dim_, Complex{0.0, 0.0});
}

CVector CumulativeIntegralCache::checkpoint(long k, const VectorIntegrand& f) const {
    {
        std::shared_lock lock(mutex_);
        if (k >= 0 && static_cast<std::size_t>(k) < forward_.size()) return forward_[k];
        if (k < 0 && static_cast<std::size_t>(-k - 1) < backward_.size())
            return backward_[-k - 1];
    }
    extend_to(k, f);
    std::shared_lock lock(mutex_);
    return k >= 0 ? forward_[k] : backward_[-k - 1];
}

void CumulativeIntegralCache::extend_to(long k, const VectorIntegrand& f) const {
    std::unique_lock lock(mutex_);
    if (k >= 0) {
        while (forward_.size() <= static_cast<std::size_t>(k)) {
            const long j = static_cast<long>(forward_.size());
            CVector cell = adaptive_simpson(f, node(j - 1), node(j), dim_, tol_, panels_(node(j - 1), node(j)));
            CVector next = forward_.back();
            for (std::size_t i = 0; i < dim_; ++i) next[i] += cell[i];
            forward_.push_back(std::move(next));
        }
    } else {
        while (backward_.size() < static_cast<std::size_t>(-k)) {
            const long j = -static_cast<long>(backward_.size()) - 1;  // checkpoint index to add
            CVector cell = adaptive_simpson(f, node(j + 1), node(j), dim_, tol_, panels_(node(j), node(j + 1)));
            CVector next = backward_.empty() ? forward_.front() : backward_.back();
            for (std::size_t i = 0; i < dim_; ++i) next[i] += cell[i];
            backward_.push_back(std::move(next));
        }
    }
}

}  // namespace reclab
