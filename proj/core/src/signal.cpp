#include "reclab/signal.hpp"

#include <cmath>
#include <numbers>

#include "signal_nodes.hpp"

namespace reclab {

using namespace detail;

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr std::size_t kIntegralChunk = 256;

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw ConfigError(std::string(what) + " must be finite");
}

double min_tol(const std::vector<NodePtr>& nodes) {
    double tol = nodes.front()->quad_tol;
    for (const auto& n : nodes) tol = std::min(tol, n->quad_tol);
    return tol;
}

}  // namespace

// ---------------------------------------------------------------- matrices

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

// --------------------------------------------------------------- sequences

Sequence Sequence::aa_step(AaBranch branch) {
    Sequence s;
    s.kind_ = Kind::AaStep;
    s.dim_ = 1;
    s.branch_ = branch;
    return s;
}

Sequence Sequence::table(std::vector<CVector> values, long first, bool periodic) {
    if (values.empty()) throw ConfigError("sequence table must be non-empty");
    const std::size_t dim = values.front().size();
    if (dim == 0) throw ConfigError("sequence values must have positive dimension");
    for (const auto& v : values)
        if (v.size() != dim) throw ConfigError("sequence table rows must share one dimension");
    Sequence s;
    s.kind_ = Kind::Table;
    s.dim_ = dim;
    s.values_ = std::move(values);
    s.first_ = first;
    s.periodic_ = periodic;
    return s;
}

Sequence Sequence::affine(CVector slope, CVector intercept) {
    if (slope.empty() || slope.size() != intercept.size())
        throw ConfigError("affine sequence needs slope and intercept of equal positive dimension");
    Sequence s;
    s.kind_ = Kind::Affine;
    s.dim_ = slope.size();
    s.slope_ = std::move(slope);
    s.intercept_ = std::move(intercept);
    return s;
}

void Sequence::at(long n, std::span<Complex> out) const {
    switch (kind_) {
        case Kind::AaStep: {
            const double x = static_cast<double>(n);
            const Complex e{std::cos(x), std::sin(x)};
            if (branch_ == AaBranch::Phi) {
                const Complex z = 1.0 + e;
                out[0] = z / std::abs(z);
            } else if (n == 0) {
                out[0] = branch_ == AaBranch::Psi1 ? kI : -kI;
            } else {
                const Complex z = 1.0 - e;
                out[0] = z / std::abs(z);
            }
            return;
        }
        case Kind::Table: {
            const long size = static_cast<long>(values_.size());
            long k = n - first_;
            if (periodic_) {
                k %= size;
                if (k < 0) k += size;
            } else {
                k = std::clamp(k, 0L, size - 1);
            }
            std::copy(values_[k].begin(), values_[k].end(), out.begin());
            return;
        }
        case Kind::Affine: {
            const double x = static_cast<double>(n);
            for (std::size_t c = 0; c < dim_; ++c) out[c] = slope_[c] * x + intercept_[c];
            return;
        }
    }
}

CVector Sequence::at(long n) const {
    CVector v(dim_);
    at(n, v);
    return v;
}

// ------------------------------------------------------------ node bodies

namespace detail {

void Node::sample(double t0, double dt, SampleBlock& out) const {
    Scratch buf(dim);
    auto v = buf.span();
    for (std::size_t i = 0; i < out.count; ++i) {
        eval(t0 + static_cast<double>(i) * dt, v);
        for (std::size_t c = 0; c < dim; ++c) out.data[c * out.count + i] = v[c];
    }
}

SampleBlock sample_node(const Node& node, double t0, double dt, std::size_t count) {
    SampleBlock block;
    block.dim = node.dim;
    block.count = count;
    block.data.assign(node.dim * count, Complex{});
    if (count > 0) node.sample(t0, dt, block);
    return block;
}

ConstantNode::ConstantNode(CVector v, double tol)
    : Node(NodeKind::Constant, v.size(), tol), value(std::move(v)) {}

void ConstantNode::eval(double, std::span<Complex> out) const {
    std::copy(value.begin(), value.end(), out.begin());
}

void ConstantNode::sample(double, double, SampleBlock& out) const {
    for (std::size_t c = 0; c < dim; ++c)
        std::fill_n(out.data.begin() + static_cast<long>(c * out.count), out.count, value[c]);
}

TrigNode::TrigNode(std::vector<TrigTerm> t, double tol)
    : Node(NodeKind::Trig, t.front().coeff.size(), tol), terms(std::move(t)) {}

void TrigNode::eval(double t, std::span<Complex> out) const {
    std::fill(out.begin(), out.end(), Complex{});
    for (const auto& term : terms) {
        const double x = term.omega * t;
        Complex basis;
        switch (term.kind) {
            case TrigTerm::Kind::Exp: basis = {std::cos(x), std::sin(x)}; break;
            case TrigTerm::Kind::Cos: basis = std::cos(x); break;
            case TrigTerm::Kind::Sin: basis = std::sin(x); break;
        }
        for (std::size_t c = 0; c < dim; ++c) out[c] += term.coeff[c] * basis;
    }
}

ChirpNode::ChirpNode(std::vector<Complex> p, double r, double tol)
    : Node(NodeKind::Chirp, 1, tol), poly(std::move(p)), rate(r) {}

void ChirpNode::eval(double t, std::span<Complex> out) const {
    Complex p{};
    for (auto it = poly.rbegin(); it != poly.rend(); ++it) p = p * t + *it;
    const double phase = rate * t * t;
    out[0] = p * Complex{std::cos(phase), std::sin(phase)};
}

LinearExtensionNode::LinearExtensionNode(Sequence s, double tol)
    : Node(NodeKind::LinearExtension, s.dim(), tol), seq(std::move(s)) {}

void LinearExtensionNode::eval(double t, std::span<Complex> out) const {
    const double base = std::floor(t);
    const double w = t - base;
    const long n = static_cast<long>(base);
    seq.at(n, out);
    if (w == 0.0) return;
    Scratch next(dim);
    auto v = next.span();
    seq.at(n + 1, v);
    for (std::size_t c = 0; c < dim; ++c) out[c] = (1.0 - w) * out[c] + w * v[c];
}

LacunaryNode::LacunaryNode(int n, double tol) : Node(NodeKind::Lacunary, 1, tol), order(n) {}

void LacunaryNode::eval(double t, std::span<Complex> out) const {
    double acc = 0.0;
    for (int n = 2; n <= order; ++n) {
        const double half = std::ldexp(1.0, n);  // 2^n
        const double period = 2.0 * half;
        // Reduce into [-2^n, 2^n).
        const double u = t - period * std::floor((t + half) / period);
        if (u >= half - 1.0) acc += std::sin(half * std::numbers::pi * (u - half));
    }
    out[0] = acc;
}

SampledNode::SampledNode(std::shared_ptr<const SampleTable> t, double tol)
    : Node(NodeKind::Sampled, t->dim, tol), table(std::move(t)) {}

void SampledNode::eval(double t, std::span<Complex> out) const {
    const auto& tab = *table;
    const double x = (t - tab.t0) / tab.dt;
    if (x <= 0.0 || tab.count == 1) {
        for (std::size_t c = 0; c < dim; ++c) out[c] = tab.values[c * tab.count];
        return;
    }
    const auto last = tab.count - 1;
    if (x >= static_cast<double>(last)) {
        for (std::size_t c = 0; c < dim; ++c) out[c] = tab.values[c * tab.count + last];
        return;
    }
    auto i = static_cast<std::size_t>(x);
    if (i >= last) i = last - 1;
    const double w = x - static_cast<double>(i);
    if (tab.slopes.empty()) {
        for (std::size_t c = 0; c < dim; ++c) {
            const auto* row = tab.values.data() + c * tab.count;
            out[c] = (1.0 - w) * row[i] + w * row[i + 1];
        }
        return;
    }
    // Cubic Hermite basis on [0, 1].
    const double w2 = w * w, w3 = w2 * w;
    const double h00 = 2 * w3 - 3 * w2 + 1, h10 = w3 - 2 * w2 + w;
    const double h01 = -2 * w3 + 3 * w2, h11 = w3 - w2;
    for (std::size_t c = 0; c < dim; ++c) {
        const auto* row = tab.values.data() + c * tab.count;
        const auto* der = tab.slopes.data() + c * tab.count;
        out[c] = h00 * row[i] + h10 * tab.dt * der[i] + h01 * row[i + 1] + h11 * tab.dt * der[i + 1];
    }
}

SumNode::SumNode(std::vector<NodePtr> t, double tol)
    : Node(NodeKind::Sum, t.front()->dim, tol), terms(std::move(t)) {}

void SumNode::eval(double t, std::span<Complex> out) const {
    terms.front()->eval(t, out);
    Scratch buf(dim);
    auto v = buf.span();
    for (std::size_t k = 1; k < terms.size(); ++k) {
        terms[k]->eval(t, v);
        for (std::size_t c = 0; c < dim; ++c) out[c] += v[c];
    }
}

void SumNode::sample(double t0, double dt, SampleBlock& out) const {
    out = sample_node(*terms.front(), t0, dt, out.count);
    for (std::size_t k = 1; k < terms.size(); ++k) {
        const auto part = sample_node(*terms[k], t0, dt, out.count);
        for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += part.data[i];
    }
}

ScaleNode::ScaleNode(NodePtr c, Complex f)
    : Node(NodeKind::Scale, c->dim, c->quad_tol), child(std::move(c)), factor(f) {}

void ScaleNode::eval(double t, std::span<Complex> out) const {
    child->eval(t, out);
    for (auto& z : out) z *= factor;
}

void ScaleNode::sample(double t0, double dt, SampleBlock& out) const {
    out = sample_node(*child, t0, dt, out.count);
    for (auto& z : out.data) z *= factor;
}

MatrixMapNode::MatrixMapNode(NodePtr c, ComplexMatrix m)
    : Node(NodeKind::MatrixMap, m.rows, c->quad_tol), child(std::move(c)), matrix(std::move(m)) {}

void MatrixMapNode::eval(double t, std::span<Complex> out) const {
    Scratch buf(child->dim);
    auto v = buf.span();
    child->eval(t, v);
    for (std::size_t i = 0; i < matrix.rows; ++i) {
        Complex acc{};
        for (std::size_t j = 0; j < matrix.cols; ++j) acc += matrix(i, j) * v[j];
        out[i] = acc;
    }
}

void MatrixMapNode::sample(double t0, double dt, SampleBlock& out) const {
    const auto in = sample_node(*child, t0, dt, out.count);
    for (std::size_t i = 0; i < matrix.rows; ++i) {
        auto dst = out.component(i);
        std::fill(dst.begin(), dst.end(), Complex{});
        for (std::size_t j = 0; j < matrix.cols; ++j) {
            const Complex a = matrix(i, j);
            if (a == Complex{}) continue;
            const auto src = in.component(j);
            for (std::size_t k = 0; k < out.count; ++k) dst[k] += a * src[k];
        }
    }
}

TranslateNode::TranslateNode(NodePtr c, double s)
    : Node(NodeKind::Translate, c->dim, c->quad_tol), child(std::move(c)), shift(s) {}

void TranslateNode::eval(double t, std::span<Complex> out) const { child->eval(t + shift, out); }

void TranslateNode::sample(double t0, double dt, SampleBlock& out) const {
    out = sample_node(*child, t0 + shift, dt, out.count);
}

DifferenceNode::DifferenceNode(NodePtr c, double h)
    : Node(NodeKind::Difference, c->dim, c->quad_tol), child(std::move(c)), step(h) {}

void DifferenceNode::eval(double t, std::span<Complex> out) const {
    child->eval(t + step, out);
    Scratch buf(dim);
    auto v = buf.span();
    child->eval(t, v);
    for (std::size_t c = 0; c < dim; ++c) out[c] -= v[c];
}

void DifferenceNode::sample(double t0, double dt, SampleBlock& out) const {
    out = sample_node(*child, t0 + step, dt, out.count);
    const auto base = sample_node(*child, t0, dt, out.count);
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] -= base.data[i];
}

RunningMeanNode::RunningMeanNode(NodePtr c, double h, double tol)
    : Node(NodeKind::RunningMean, c->dim, tol), child(std::move(c)), width(h) {}

void RunningMeanNode::eval(double t, std::span<Complex> out) const {
    const Node& f = *child;
    const VectorIntegrand g = [&f](double s, std::span<Complex> o) { f.eval(s, o); };
    const CVector integral = adaptive_simpson(g, t, t + width, dim, quad_tol * width,
                                              panel_width(f.frequency(t, t + width)));
    for (std::size_t c = 0; c < dim; ++c) out[c] = integral[c] / width;
}

IntegralNode::IntegralNode(NodePtr c, double a, double tol)
    : Node(NodeKind::Integral, c->dim, tol), child(std::move(c)), alpha(a) {
    const Node* f = child.get();
    integrand = [f](double s, std::span<Complex> o) { f->eval(s, o); };
    cache = std::make_unique<CumulativeIntegralCache>(
        alpha, kCheckpointSpacing, dim, quad_tol,
        [f](double lo, double hi) { return panel_width(f->frequency(lo, hi)); });
}

void IntegralNode::eval(double t, std::span<Complex> out) const {
    const long k = std::lround((t - alpha) / cache->spacing());
    const CVector base = cache->checkpoint(k, integrand);
    const double a = cache->node(k);
    const CVector local = adaptive_simpson(integrand, a, t, dim, quad_tol,
                                           panel_width(child->frequency(std::min(a, t), std::max(a, t))));
    for (std::size_t c = 0; c < dim; ++c) out[c] = base[c] + local[c];
}

void IntegralNode::sample(double t0, double dt, SampleBlock& out) const {
    const std::size_t n = out.count;
    // Per-cell tolerance scaled so a unit length accumulates about quad_tol.
    const double cell_tol = quad_tol * std::min(1.0, std::abs(dt));
    Scratch buf(dim);
    auto v = buf.span();
    for (std::size_t start = 0; start < n; start += kIntegralChunk) {
        const std::size_t stop = std::min(n, start + kIntegralChunk);
        double t = t0 + static_cast<double>(start) * dt;
        eval(t, v);
        for (std::size_t c = 0; c < dim; ++c) out.data[c * n + start] = v[c];
        for (std::size_t i = start + 1; i < stop; ++i) {
            const double next = t0 + static_cast<double>(i) * dt;
            const CVector cell = adaptive_simpson(integrand, t, next, dim, cell_tol,
                                                  panel_width(child->frequency(std::min(t, next), std::max(t, next))));
            for (std::size_t c = 0; c < dim; ++c) {
                v[c] += cell[c];
                out.data[c * n + i] = v[c];
            }
            t = next;
        }
    }
}

CharacterNode::CharacterNode(NodePtr c, double w)
    : Node(NodeKind::Character, c->dim, c->quad_tol), child(std::move(c)), omega(w) {}

void CharacterNode::eval(double t, std::span<Complex> out) const {
    child->eval(t, out);
    const double x = omega * t;
    const Complex e{std::cos(x), std::sin(x)};
    for (auto& z : out) z *= e;
}

void CharacterNode::sample(double t0, double dt, SampleBlock& out) const {
    out = sample_node(*child, t0, dt, out.count);
    for (std::size_t i = 0; i < out.count; ++i) {
        const double x = omega * (t0 + static_cast<double>(i) * dt);
        const Complex e{std::cos(x), std::sin(x)};
        for (std::size_t c = 0; c < dim; ++c) out.data[c * out.count + i] *= e;
    }
}

StackNode::StackNode(std::vector<NodePtr> p, double tol)
    : Node(NodeKind::Stack, 0, tol), parts(std::move(p)) {
    for (const auto& part : parts) dim += part->dim;
}

void StackNode::eval(double t, std::span<Complex> out) const {
    std::size_t offset = 0;
    for (const auto& part : parts) {
        part->eval(t, out.subspan(offset, part->dim));
        offset += part->dim;
    }
}

void StackNode::sample(double t0, double dt, SampleBlock& out) const {
    std::size_t offset = 0;
    for (const auto& part : parts) {
        const auto block = sample_node(*part, t0, dt, out.count);
        std::copy(block.data.begin(), block.data.end(),
                  out.data.begin() + static_cast<long>(offset * out.count));
        offset += part->dim;
    }
}

}  // namespace detail

// ------------------------------------------------------------- generators

Signal::Signal(std::shared_ptr<const Node> node) : node_(std::move(node)) {
    if (!node_ || node_->dim == 0) throw ConfigError("signals must have positive dimension");
}

Signal Signal::constant(CVector value) {
    if (value.empty()) throw ConfigError("constant signal needs a non-empty value");
    return Signal(std::make_shared<ConstantNode>(std::move(value), kDefaultQuadTol));
}

Signal Signal::zero(std::size_t dim) { return constant(CVector(dim, Complex{})); }

Signal Signal::trig(std::vector<TrigTerm> terms) {
    if (terms.empty()) throw ConfigError("trigonometric polynomial needs at least one term");
    const std::size_t dim = terms.front().coeff.size();
    if (dim == 0) throw ConfigError("trigonometric coefficients must be non-empty");
    for (const auto& term : terms) {
        if (term.coeff.size() != dim) throw ConfigError("trigonometric terms must share one dimension");
        require_finite(term.omega, "frequency");
    }
    return Signal(std::make_shared<TrigNode>(std::move(terms), kDefaultQuadTol));
}

Signal Signal::sine(double omega, Complex amplitude) {
    return trig({TrigTerm{TrigTerm::Kind::Sin, omega, {amplitude}}});
}

Signal Signal::cosine(double omega, Complex amplitude) {
    return trig({TrigTerm{TrigTerm::Kind::Cos, omega, {amplitude}}});
}

Signal Signal::exponential(double omega, Complex amplitude) {
    return trig({TrigTerm{TrigTerm::Kind::Exp, omega, {amplitude}}});
}

Signal Signal::chirp(std::vector<Complex> poly, double rate) {
    if (poly.empty()) poly.push_back(0.0);
    require_finite(rate, "chirp rate");
    return Signal(std::make_shared<ChirpNode>(std::move(poly), rate, kDefaultQuadTol));
}

Signal Signal::linear_extension(Sequence seq) {
    return Signal(std::make_shared<LinearExtensionNode>(std::move(seq), kDefaultQuadTol));
}

Signal Signal::aa_step(AaBranch branch) { return linear_extension(Sequence::aa_step(branch)); }

Signal Signal::lacunary(int order) {
    if (order < 2 || order > 24) throw ConfigError("lacunary order must lie in [2, 24]");
    return Signal(std::make_shared<LacunaryNode>(order, kDefaultQuadTol));
}

Signal Signal::sampled(std::shared_ptr<const SampleTable> table) {
    if (!table || table->count == 0 || table->dim == 0)
        throw ConfigError("sampled signal needs a non-empty table");
    if (!(table->dt > 0.0)) throw ConfigError("sample spacing must be positive");
    if (table->values.size() != table->dim * table->count ||
        (!table->slopes.empty() && table->slopes.size() != table->values.size()))
        throw ConfigError("sample table layout mismatch");
    return Signal(std::make_shared<SampledNode>(std::move(table), kDefaultQuadTol));
}

Signal Signal::stack(const std::vector<Signal>& parts) {
    if (parts.empty()) throw ConfigError("joint tuple needs at least one component");
    std::vector<NodePtr> nodes;
    for (const auto& p : parts) nodes.push_back(p.node_ptr());
    if (parts.size() == 1) return parts.front();
    const double tol = min_tol(nodes);
    return Signal(std::make_shared<StackNode>(std::move(nodes), tol));
}

Signal Signal::sum(const std::vector<Signal>& terms) {
    if (terms.empty()) throw ConfigError("sum needs at least one term");
    std::vector<NodePtr> nodes;
    for (const auto& t : terms) {
        if (t.dim() != terms.front().dim()) throw ConfigError("sum requires equal dimensions");
        nodes.push_back(t.node_ptr());
    }
    if (terms.size() == 1) return terms.front();
    const double tol = min_tol(nodes);
    return Signal(std::make_shared<SumNode>(std::move(nodes), tol));
}

std::size_t Signal::dim() const { return node_->dim; }

double Signal::quad_tol() const { return node_->quad_tol; }

CVector Signal::eval(double t) const {
    CVector v(dim());
    node_->eval(t, v);
    return v;
}

void Signal::eval_into(double t, std::span<Complex> out) const { node_->eval(t, out); }

SampleBlock Signal::sample(double t0, double dt, std::size_t count) const {
    return sample_node(*node_, t0, dt, count);
}

// ------------------------------------------------------ frequency bounds

double ConstantNode::frequency(double, double) const { return 0.0; }

double TrigNode::frequency(double, double) const {
    double w = 0.0;
    for (const auto& term : terms) w = std::max(w, std::abs(term.omega));
    return w;
}

double ChirpNode::frequency(double lo, double hi) const {
    return 2.0 * std::abs(rate) * std::max(std::abs(lo), std::abs(hi));
}

double LinearExtensionNode::frequency(double, double) const { return 0.0; }

double LacunaryNode::frequency(double lo, double hi) const {
    // Term n is non-zero only on [2^n - 1, 2^n) modulo 2^{n+1}.
    double w = 0.0;
    for (int n = 2; n <= order; ++n) {
        const double half = std::ldexp(1.0, n);
        const double period = 2.0 * half;
        if (hi - lo >= period) {
            w = half * std::numbers::pi;
            continue;
        }
        const double u = lo - period * std::floor((lo + half) / period);  // in [-2^n, 2^n)
        const double v = u + (hi - lo);
        const bool hit = (v >= half - 1.0 && u < half) || v >= period + half - 1.0;
        if (hit) w = half * std::numbers::pi;
    }
    return w;
}

double SampledNode::frequency(double, double) const { return std::numbers::pi / table->dt; }

double SumNode::frequency(double lo, double hi) const {
    double w = 0.0;
    for (const auto& term : terms) w = std::max(w, term->frequency(lo, hi));
    return w;
}

double ScaleNode::frequency(double lo, double hi) const { return child->frequency(lo, hi); }

double MatrixMapNode::frequency(double lo, double hi) const { return child->frequency(lo, hi); }

double TranslateNode::frequency(double lo, double hi) const {
    return child->frequency(lo + shift, hi + shift);
}

double DifferenceNode::frequency(double lo, double hi) const {
    return std::max(child->frequency(lo, hi), child->frequency(lo + step, hi + step));
}

double RunningMeanNode::frequency(double lo, double hi) const {
    return child->frequency(lo, hi + width);
}

double IntegralNode::frequency(double lo, double hi) const { return child->frequency(lo, hi); }

double CharacterNode::frequency(double lo, double hi) const {
    return child->frequency(lo, hi) + std::abs(omega);
}

double StackNode::frequency(double lo, double hi) const {
    double w = 0.0;
    for (const auto& part : parts) w = std::max(w, part->frequency(lo, hi));
    return w;
}

double Signal::frequency_bound(double lo, double hi) const {
    return node_->frequency(std::min(lo, hi), std::max(lo, hi));
}

// ------------------------------------------------------------ combinators

Signal translate(const Signal& f, double s) {
    require_finite(s, "shift");
    return Signal(std::make_shared<TranslateNode>(f.node_ptr(), s));
}

Signal difference(const Signal& f, double h) {
    require_finite(h, "difference step");
    if (h == 0.0) throw ConfigError("difference step must be non-zero");
    return Signal(std::make_shared<DifferenceNode>(f.node_ptr(), h));
}

Signal running_mean(const Signal& f, double h, double tol) {
    require_finite(h, "mean width");
    if (!(h > 0.0)) throw ConfigError("running mean width must be positive");
    if (tol < 0.0) throw ConfigError("quadrature tolerance must be positive");
    return Signal(std::make_shared<RunningMeanNode>(f.node_ptr(), h, tol > 0.0 ? tol : f.quad_tol()));
}

Signal indefinite_integral(const Signal& f, double alpha, double tol) {
    require_finite(alpha, "integral base point");
    if (tol < 0.0) throw ConfigError("quadrature tolerance must be positive");
    return Signal(std::make_shared<IntegralNode>(f.node_ptr(), alpha, tol > 0.0 ? tol : f.quad_tol()));
}

Signal character_multiply(const Signal& f, double omega) {
    require_finite(omega, "character frequency");
    return Signal(std::make_shared<CharacterNode>(f.node_ptr(), omega));
}

Signal scale(const Signal& f, Complex factor) {
    return Signal(std::make_shared<ScaleNode>(f.node_ptr(), factor));
}

Signal matrix_map(const Signal& f, const ComplexMatrix& m) {
    if (m.cols != f.dim() || m.rows == 0 || m.data.size() != m.rows * m.cols)
        throw ConfigError("matrix shape does not match signal dimension");
    return Signal(std::make_shared<MatrixMapNode>(f.node_ptr(), m));
}

Signal component(const Signal& f, std::size_t c) {
    if (c >= f.dim()) throw ConfigError("component index out of range");
    ComplexMatrix pick(1, f.dim());
    pick(0, c) = 1.0;
    return matrix_map(f, pick);
}

Signal operator+(const Signal& a, const Signal& b) { return Signal::sum({a, b}); }

Signal operator-(const Signal& a, const Signal& b) { return Signal::sum({a, scale(b, -1.0)}); }

Signal operator*(Complex factor, const Signal& f) { return scale(f, factor); }

// ------------------------------------------------------------ derivatives

namespace {

Signal derive_once(const Signal& f) {
    const Node& node = f.node();
    switch (node.kind) {
        case NodeKind::Constant: return Signal::zero(node.dim);
        case NodeKind::Trig: {
            const auto& src = static_cast<const TrigNode&>(node);
            std::vector<TrigTerm> out;
            for (const auto& term : src.terms) {
                TrigTerm d = term;
                switch (term.kind) {
                    case TrigTerm::Kind::Exp:
                        for (auto& c : d.coeff) c *= kI * term.omega;
                        break;
                    case TrigTerm::Kind::Cos:
                        d.kind = TrigTerm::Kind::Sin;
                        for (auto& c : d.coeff) c *= -term.omega;
                        break;
                    case TrigTerm::Kind::Sin:
                        d.kind = TrigTerm::Kind::Cos;
                        for (auto& c : d.coeff) c *= term.omega;
                        break;
                }
                out.push_back(std::move(d));
            }
            return Signal::trig(std::move(out));
        }
        case NodeKind::Chirp: {
            // (p e^{i r t^2})' = (p' + 2 i r t p) e^{i r t^2}
            const auto& src = static_cast<const ChirpNode&>(node);
            std::vector<Complex> poly(src.poly.size() + 1, Complex{});
            for (std::size_t k = 1; k < src.poly.size(); ++k)
                poly[k - 1] += static_cast<double>(k) * src.poly[k];
            for (std::size_t k = 0; k < src.poly.size(); ++k)
                poly[k + 1] += 2.0 * kI * src.rate * src.poly[k];
            return Signal::chirp(std::move(poly), src.rate);
        }
        case NodeKind::LinearExtension:
        case NodeKind::Lacunary:
        case NodeKind::Sampled:
            throw ConfigError("signal has no generator-level derivative");
        case NodeKind::Sum: {
            const auto& src = static_cast<const SumNode&>(node);
            std::vector<Signal> parts;
            for (const auto& t : src.terms) parts.push_back(derive_once(Signal(t)));
            return Signal::sum(parts);
        }
        case NodeKind::Scale: {
            const auto& src = static_cast<const ScaleNode&>(node);
            return scale(derive_once(Signal(src.child)), src.factor);
        }
        case NodeKind::MatrixMap: {
            const auto& src = static_cast<const MatrixMapNode&>(node);
            return matrix_map(derive_once(Signal(src.child)), src.matrix);
        }
        case NodeKind::Translate: {
            const auto& src = static_cast<const TranslateNode&>(node);
            return translate(derive_once(Signal(src.child)), src.shift);
        }
        case NodeKind::Difference: {
            const auto& src = static_cast<const DifferenceNode&>(node);
            return difference(derive_once(Signal(src.child)), src.step);
        }
        case NodeKind::RunningMean: {
            // (M_h f)' = (f(t + h) - f(t)) / h
            const auto& src = static_cast<const RunningMeanNode&>(node);
            return scale(difference(Signal(src.child), src.width), 1.0 / src.width);
        }
        case NodeKind::Integral: return Signal(static_cast<const IntegralNode&>(node).child);
        case NodeKind::Character: {
            const auto& src = static_cast<const CharacterNode&>(node);
            const Signal inner(src.child);
            return character_multiply(scale(inner, kI * src.omega) + derive_once(inner), src.omega);
        }
        case NodeKind::Stack: {
            const auto& src = static_cast<const StackNode&>(node);
            std::vector<Signal> parts;
            for (const auto& p : src.parts) parts.push_back(derive_once(Signal(p)));
            return Signal::stack(parts);
        }
    }
    throw ConfigError("unknown signal node");
}

}  // namespace

Signal derivative(const Signal& f, int order) {
    if (order < 0) throw ConfigError("derivative order must be non-negative");
    Signal out = f;
    for (int k = 0; k < order; ++k) out = derive_once(out);
    return out;
}

}  // namespace reclab
