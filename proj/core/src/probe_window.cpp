#include <algorithm>
#include <cmath>

#include "reclab/types.hpp"

namespace reclab {

ProbeWindow ProbeWindow::symmetric(double half_width, double sample_step) {
    if (!(half_width > 0.0)) throw ConfigError("window half-width T must be positive");
    return interval(-half_width, half_width, sample_step);
}

ProbeWindow ProbeWindow::interval(double lo, double hi, double sample_step) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo))
        throw ConfigError("window interval must satisfy lo < hi");
    if (!(sample_step > 0.0) || !std::isfinite(sample_step))
        throw ConfigError("window sample step must be positive");
    ProbeWindow w;
    w.kind_ = Kind::Interval;
    w.bounds_ = {lo, hi};
    w.step_ = sample_step;
    return w;
}

ProbeWindow ProbeWindow::probes(std::vector<double> points) {
    if (points.empty()) throw ConfigError("probe set must be non-empty");
    for (double p : points)
        if (!std::isfinite(p)) throw ConfigError("probe points must be finite");
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    ProbeWindow w;
    w.kind_ = Kind::Probes;
    w.bounds_ = {points.front(), points.back()};
    w.points_ = std::move(points);
    return w;
}

std::size_t ProbeWindow::cells() const {
    if (!is_interval()) return points_.size() - 1;
    return static_cast<std::size_t>(std::max(1.0, std::round(bounds_.length() / step_)));
}

double ProbeWindow::grid_step() const {
    if (!is_interval()) return 0.0;
    return bounds_.length() / static_cast<double>(cells());
}

std::vector<double> ProbeWindow::samples() const {
    if (!is_interval()) return points_;
    const std::size_t n = cells();
    std::vector<double> out(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        out[i] = bounds_.lo + bounds_.length() * static_cast<double>(i) / static_cast<double>(n);
    out.back() = bounds_.hi;
    return out;
}

ProbeWindow ProbeWindow::widened(double pad) const {
    if (pad < 0.0) throw ConfigError("window padding must be non-negative");
    if (!is_interval()) {
        // A probe set has no neighborhood to fatten.
        return *this;
    }
    return interval(bounds_.lo - pad, bounds_.hi + pad, step_);
}

}  // namespace reclab
