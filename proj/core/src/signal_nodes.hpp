#pragma once

// Expression-tree nodes behind reclab::Signal. Shared by the evaluator and
// the descriptor serializer.

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "reclab/quadrature.hpp"
#include "reclab/signal.hpp"

namespace reclab::detail {

enum class NodeKind {
    Constant,
    Trig,
    Chirp,
    LinearExtension,
    Lacunary,
    Sampled,
    Sum,
    Scale,
    MatrixMap,
    Translate,
    Difference,
    RunningMean,
    Integral,
    Character,
    Stack,
};

/// Scratch buffer for intermediate values; stays on the stack for small dims.
class Scratch {
public:
    explicit Scratch(std::size_t n) : size_(n) {
        if (n > local_.size()) heap_.resize(n);
    }
    std::span<Complex> span() {
        return heap_.empty() ? std::span<Complex>(local_.data(), size_)
                             : std::span<Complex>(heap_.data(), size_);
    }

private:
    std::array<Complex, 16> local_{};
    std::vector<Complex> heap_;
    std::size_t size_;
};

using NodePtr = std::shared_ptr<const Node>;

struct Node {
    Node(NodeKind kind, std::size_t dim, double quad_tol)
        : kind(kind), dim(dim), quad_tol(quad_tol) {}
    virtual ~Node() = default;

    virtual void eval(double t, std::span<Complex> out) const = 0;
    /// Default: pointwise evaluation on the grid.
    virtual void sample(double t0, double dt, SampleBlock& out) const;
    /// Upper bound on the angular frequency of the node on [lo, hi], used to
    /// size quadrature panels. 0 means slowly varying.
    [[nodiscard]] virtual double frequency(double lo, double hi) const = 0;

    NodeKind kind;
    std::size_t dim;
    double quad_tol;
};

SampleBlock sample_node(const Node& node, double t0, double dt, std::size_t count);

struct ConstantNode final : Node {
    explicit ConstantNode(CVector v, double tol);
    void eval(double t, std::span<Complex> out) const override;
    [[nodiscard]] double frequency(double lo, double hi) const override;
    void sample(double t0, double dt, SampleBlock& out) const override;
    CVector value;
};

struct TrigNode final : Node {
    TrigNode(std::vector<TrigTerm> terms, double tol);
    void eval(double t, std::span<Complex> out) const override;
    [[nodiscard]] double frequency(double lo, double hi) const override;
    std::vector<TrigTerm> terms;
};

struct ChirpNode final : Node {
    ChirpNode(std::vector<Complex> poly, double rate, double tol);
    void eval(double t, std::span<Complex> out) const override;
    [[nodiscard]] double frequency(double lo, double hi) const override;
    std::vector<Complex> poly;
    double rate;
};

struct LinearExtensionNode final : Node {
    LinearExtensionNode(Sequence seq, double tol);
    void eval(double t, std::span<Complex> out) const override;
    [[nodiscard]] double frequency(double lo, double hi) const override;
    Sequence seq;
};

struct LacunaryNode final : Node {
    LacunaryNode(int order, double tol);
    void eval(double t, std::span<Complex> out) const override;
    [[nodiscard]] double frequency(double lo, double hi) const override;
    int order;
};

struct SampledNode final : Node {
    SampledNode(std::shared_ptr<const SampleTable> table, double tol);
    void eval(double t, std::span<Complex> out) const override;
    [[nodiscard]] double frequency(double lo, double hi) const override;
    std::shared_ptr<const SampleTable> table;
};

struct SumNode final : Node {
    SumNode(std::vector<NodePtr> terms, double tol);
    void eval(double t, std::span<Complex> out) const override;
    [[nodiscard]] double frequency(double lo, double hi) const override;
    void sample(double t0, double dt, SampleBlock& out) const override;
    std::vector<NodePtr> terms;
};

struct ScaleNode final : Node {
    ScaleNode(NodePtr child, Complex factor);
    void eval(double t, std::span<Complex> out) const override;
    [[nodiscard]] double frequency(double lo, double hi) const override;
    void sample(double t0, double dt, SampleBlock& out) const override;
    NodePtr child;
    Complex factor;
};

struct MatrixMapNode final : Node {
    MatrixMapNode(NodePtr child, ComplexMatrix m);
    void eval(double t, std::span<Complex> out) const override;
    [[nodiscard]] double frequency(double lo, double hi) const override;
    void sample(double t0, double dt, SampleBlock& out) const override;
    NodePtr child;
    ComplexMatrix matrix;
};

struct TranslateNode final : Node {
    TranslateNode(NodePtr child, double shift);
    void eval(double t, std::span<Complex> out) const override;
    [[nodiscard]] double frequency(double lo, double hi) const override;
    void sample(double t0, double dt, SampleBlock& out) const override;
    NodePtr child;
    double shift;
};

struct DifferenceNode final : Node {
    DifferenceNode(NodePtr child, double step);
    void eval(double t, std::span<Complex> out) const override;
    [[nodiscard]] double frequency(double lo, double hi) const override;
    void sample(double t0, double dt, SampleBlock& out) const override;
    NodePtr child;
    double step;
};

struct RunningMeanNode final : Node {
    RunningMeanNode(NodePtr child, double width, double tol);
    void eval(double t, std::span<Complex> out) const override;
    [[nodiscard]] double frequency(double lo, double hi) const override;
    NodePtr child;
    double width;
};

struct IntegralNode final : Node {
    IntegralNode(NodePtr child, double alpha, double tol);
    void eval(double t, std::span<Complex> out) const override;
    [[nodiscard]] double frequency(double lo, double hi) const override;
    void sample(double t0, double dt, SampleBlock& out) const override;
    NodePtr child;
    double alpha;
    VectorIntegrand integrand;
    std::unique_ptr<CumulativeIntegralCache> cache;
};

struct CharacterNode final : Node {
    CharacterNode(NodePtr child, double omega);
    void eval(double t, std::span<Complex> out) const override;
    [[nodiscard]] double frequency(double lo, double hi) const override;
    void sample(double t0, double dt, SampleBlock& out) const override;
    NodePtr child;
    double omega;
};

struct StackNode final : Node {
    StackNode(std::vector<NodePtr> parts, double tol);
    void eval(double t, std::span<Complex> out) const override;
    [[nodiscard]] double frequency(double lo, double hi) const override;
    void sample(double t0, double dt, SampleBlock& out) const override;
    std::vector<NodePtr> parts;
};

}  // namespace reclab::detail
