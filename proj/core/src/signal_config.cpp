#include "reclab/signal_config.hpp"

#include <algorithm>
#include <string>

#include "signal_nodes.hpp"

namespace reclab {

using nlohmann::json;
using namespace detail;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("signal descriptor: " + msg); }

const json& require(const json& obj, const char* key) {
    if (!obj.contains(key)) fail(std::string("missing key '") + key + "'");
    return obj.at(key);
}

double number(const json& obj, const char* key) {
    const json& v = require(obj, key);
    if (!v.is_number()) fail(std::string("'") + key + "' must be a number");
    return v.get<double>();
}

double number_or(const json& obj, const char* key, double fallback) {
    return obj.contains(key) ? number(obj, key) : fallback;
}

AaBranch branch_from(const json& v) {
    const auto name = v.get<std::string>();
    if (name == "phi") return AaBranch::Phi;
    if (name == "psi1") return AaBranch::Psi1;
    if (name == "psi2") return AaBranch::Psi2;
    fail("unknown aa_step branch '" + name + "'");
}

const char* branch_name(AaBranch b) {
    switch (b) {
        case AaBranch::Phi: return "phi";
        case AaBranch::Psi1: return "psi1";
        case AaBranch::Psi2: return "psi2";
    }
    return "phi";
}

TrigTerm::Kind trig_kind_from(const std::string& name) {
    if (name == "exp") return TrigTerm::Kind::Exp;
    if (name == "cos") return TrigTerm::Kind::Cos;
    if (name == "sin") return TrigTerm::Kind::Sin;
    fail("unknown trig term kind '" + name + "'");
}

const char* trig_kind_name(TrigTerm::Kind k) {
    switch (k) {
        case TrigTerm::Kind::Exp: return "exp";
        case TrigTerm::Kind::Cos: return "cos";
        case TrigTerm::Kind::Sin: return "sin";
    }
    return "exp";
}

Sequence sequence_from(const json& doc) {
    if (!doc.is_object()) fail("sequence must be an object");
    const auto kind = require(doc, "kind").get<std::string>();
    if (kind == "aa_step") {
        reject_unknown_keys(doc, {"kind", "branch"}, "sequence");
        return Sequence::aa_step(branch_from(require(doc, "branch")));
    }
    if (kind == "table") {
        reject_unknown_keys(doc, {"kind", "values", "first", "periodic"}, "sequence");
        std::vector<CVector> rows;
        for (const auto& r : require(doc, "values")) rows.push_back(cvector_from_json(r));
        const long first = doc.value("first", 0L);
        const bool periodic = doc.value("periodic", false);
        return Sequence::table(std::move(rows), first, periodic);
    }
    if (kind == "affine") {
        reject_unknown_keys(doc, {"kind", "slope", "intercept"}, "sequence");
        return Sequence::affine(cvector_from_json(require(doc, "slope")),
                                cvector_from_json(require(doc, "intercept")));
    }
    fail("unknown sequence kind '" + kind + "'");
}

json sequence_to(const Sequence& s) {
    switch (s.kind()) {
        case Sequence::Kind::AaStep: return {{"kind", "aa_step"}, {"branch", branch_name(s.branch())}};
        case Sequence::Kind::Table: {
            json rows = json::array();
            for (const auto& r : s.values()) rows.push_back(cvector_to_json(r));
            return {{"kind", "table"}, {"values", rows}, {"first", s.first()}, {"periodic", s.periodic()}};
        }
        case Sequence::Kind::Affine:
            return {{"kind", "affine"},
                    {"slope", cvector_to_json(s.slope())},
                    {"intercept", cvector_to_json(s.intercept())}};
    }
    return {};
}

Signal generator_from(const json& doc) {
    const auto name = require(doc, "generator").get<std::string>();
    if (name == "constant") {
        reject_unknown_keys(doc, {"generator", "value", "ops"}, "constant");
        return Signal::constant(cvector_from_json(require(doc, "value")));
    }
    if (name == "trig") {
        reject_unknown_keys(doc, {"generator", "terms", "ops"}, "trig");
        std::vector<TrigTerm> terms;
        for (const auto& t : require(doc, "terms")) {
            reject_unknown_keys(t, {"kind", "omega", "coeff"}, "trig term");
            terms.push_back({trig_kind_from(require(t, "kind").get<std::string>()), number(t, "omega"),
                             cvector_from_json(require(t, "coeff"))});
        }
        return Signal::trig(std::move(terms));
    }
    if (name == "sin" || name == "cos" || name == "exp") {
        reject_unknown_keys(doc, {"generator", "omega", "amplitude", "ops"}, name.c_str());
        const double omega = number_or(doc, "omega", 1.0);
        const Complex amp = doc.contains("amplitude") ? complex_from_json(doc.at("amplitude")) : 1.0;
        return Signal::trig({TrigTerm{trig_kind_from(name), omega, {amp}}});
    }
    if (name == "chirp") {
        reject_unknown_keys(doc, {"generator", "poly", "rate", "ops"}, "chirp");
        CVector poly = doc.contains("poly") ? cvector_from_json(doc.at("poly")) : CVector{1.0};
        return Signal::chirp(std::move(poly), number_or(doc, "rate", 1.0));
    }
    if (name == "aa_step") {
        reject_unknown_keys(doc, {"generator", "branch", "ops"}, "aa_step");
        return Signal::aa_step(branch_from(require(doc, "branch")));
    }
    if (name == "extension") {
        reject_unknown_keys(doc, {"generator", "sequence", "ops"}, "extension");
        return Signal::linear_extension(sequence_from(require(doc, "sequence")));
    }
    if (name == "lacunary") {
        reject_unknown_keys(doc, {"generator", "order", "ops"}, "lacunary");
        const json& order = require(doc, "order");
        if (!order.is_number_integer()) fail("'order' must be an integer");
        return Signal::lacunary(order.get<int>());
    }
    if (name == "stack" || name == "sum") {
        const char* key = name == "stack" ? "parts" : "terms";
        reject_unknown_keys(doc, {"generator", key, "ops"}, name.c_str());
        const json& list = require(doc, key);
        if (!list.is_array() || list.empty()) fail(std::string("'") + key + "' must be a non-empty array");
        std::vector<Signal> parts;
        for (const auto& p : list) parts.push_back(signal_from_json(p));
        return name == "stack" ? Signal::stack(parts) : Signal::sum(parts);
    }
    fail("unknown generator '" + name + "'");
}

Signal apply_op(const Signal& f, const json& op) {
    if (!op.is_object()) fail("op must be an object");
    const auto name = require(op, "op").get<std::string>();
    if (name == "translate") {
        reject_unknown_keys(op, {"op", "s", "of"}, "translate");
        return translate(f, number(op, "s"));
    }
    if (name == "difference") {
        reject_unknown_keys(op, {"op", "h", "of"}, "difference");
        return difference(f, number(op, "h"));
    }
    if (name == "mean") {
        reject_unknown_keys(op, {"op", "h", "quad_tol", "of"}, "mean");
        return running_mean(f, number(op, "h"), number_or(op, "quad_tol", 0.0));
    }
    if (name == "integral") {
        reject_unknown_keys(op, {"op", "alpha", "quad_tol", "of"}, "integral");
        return indefinite_integral(f, number_or(op, "alpha", 0.0), number_or(op, "quad_tol", 0.0));
    }
    if (name == "character") {
        reject_unknown_keys(op, {"op", "omega", "of"}, "character");
        return character_multiply(f, number(op, "omega"));
    }
    if (name == "scale") {
        reject_unknown_keys(op, {"op", "factor", "of"}, "scale");
        return scale(f, complex_from_json(require(op, "factor")));
    }
    if (name == "matrix") {
        reject_unknown_keys(op, {"op", "matrix", "of"}, "matrix");
        return matrix_map(f, cmatrix_from_json(require(op, "matrix")));
    }
    if (name == "derivative") {
        reject_unknown_keys(op, {"op", "order", "of"}, "derivative");
        return derivative(f, op.value("order", 1));
    }
    fail("unknown op '" + name + "'");
}

json node_to_json(const Node& node) {
    auto wrap = [](const char* op, const NodePtr& child, json fields) {
        fields["op"] = op;
        fields["of"] = node_to_json(*child);
        return fields;
    };
    switch (node.kind) {
        case NodeKind::Constant:
            return {{"generator", "constant"},
                    {"value", cvector_to_json(static_cast<const ConstantNode&>(node).value)}};
        case NodeKind::Trig: {
            json terms = json::array();
            for (const auto& t : static_cast<const TrigNode&>(node).terms)
                terms.push_back({{"kind", trig_kind_name(t.kind)},
                                 {"omega", t.omega},
                                 {"coeff", cvector_to_json(t.coeff)}});
            return {{"generator", "trig"}, {"terms", terms}};
        }
        case NodeKind::Chirp: {
            const auto& c = static_cast<const ChirpNode&>(node);
            return {{"generator", "chirp"}, {"poly", cvector_to_json(c.poly)}, {"rate", c.rate}};
        }
        case NodeKind::LinearExtension: {
            const auto& seq = static_cast<const LinearExtensionNode&>(node).seq;
            if (seq.kind() == Sequence::Kind::AaStep)
                return {{"generator", "aa_step"}, {"branch", branch_name(seq.branch())}};
            return {{"generator", "extension"}, {"sequence", sequence_to(seq)}};
        }
        case NodeKind::Lacunary:
            return {{"generator", "lacunary"}, {"order", static_cast<const LacunaryNode&>(node).order}};
        case NodeKind::Sampled:
            throw ConfigError("sampled-data signals have no declarative descriptor");
        case NodeKind::Sum: {
            json terms = json::array();
            for (const auto& t : static_cast<const SumNode&>(node).terms) terms.push_back(node_to_json(*t));
            return {{"generator", "sum"}, {"terms", terms}};
        }
        case NodeKind::Stack: {
            json parts = json::array();
            for (const auto& p : static_cast<const StackNode&>(node).parts) parts.push_back(node_to_json(*p));
            return {{"generator", "stack"}, {"parts", parts}};
        }
        case NodeKind::Scale: {
            const auto& n = static_cast<const ScaleNode&>(node);
            return wrap("scale", n.child, {{"factor", complex_to_json(n.factor)}});
        }
        case NodeKind::MatrixMap: {
            const auto& n = static_cast<const MatrixMapNode&>(node);
            return wrap("matrix", n.child, {{"matrix", cmatrix_to_json(n.matrix)}});
        }
        case NodeKind::Translate: {
            const auto& n = static_cast<const TranslateNode&>(node);
            return wrap("translate", n.child, {{"s", n.shift}});
        }
        case NodeKind::Difference: {
            const auto& n = static_cast<const DifferenceNode&>(node);
            return wrap("difference", n.child, {{"h", n.step}});
        }
        case NodeKind::RunningMean: {
            const auto& n = static_cast<const RunningMeanNode&>(node);
            return wrap("mean", n.child, {{"h", n.width}, {"quad_tol", n.quad_tol}});
        }
        case NodeKind::Integral: {
            const auto& n = static_cast<const IntegralNode&>(node);
            return wrap("integral", n.child, {{"alpha", n.alpha}, {"quad_tol", n.quad_tol}});
        }
        case NodeKind::Character: {
            const auto& n = static_cast<const CharacterNode&>(node);
            return wrap("character", n.child, {{"omega", n.omega}});
        }
    }
    throw ConfigError("unknown signal node");
}

}  // namespace

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const char* context) {
    if (!obj.is_object()) throw ConfigError(std::string(context) + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(),
                                       [&](const char* a) { return key == a; });
        if (!known) throw ConfigError(std::string(context) + ": unknown key '" + key + "'");
    }
}

Complex complex_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw ConfigError("expected a complex number [re, im]");
}

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

CVector cvector_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw ConfigError("expected a non-empty array of [re, im] pairs");
    CVector v;
    for (const auto& z : j) v.push_back(complex_from_json(z));
    return v;
}

json cvector_to_json(const CVector& v) {
    json out = json::array();
    for (const auto& z : v) out.push_back(complex_to_json(z));
    return out;
}

ComplexMatrix cmatrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw ConfigError("matrix must be a non-empty array of rows");
    const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
    if (cols == 0) throw ConfigError("matrix rows must be non-empty arrays");
    ComplexMatrix m(j.size(), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array() || j[r].size() != cols) throw ConfigError("matrix rows must have equal length");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = complex_from_json(j[r][c]);
    }
    return m;
}

json cmatrix_to_json(const ComplexMatrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows; ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < m.cols; ++c) row.push_back(complex_to_json(m(r, c)));
        rows.push_back(row);
    }
    return rows;
}

Signal signal_from_json(const json& doc) {
    try {
        if (!doc.is_object()) fail("expected an object");
        if (doc.contains("op")) {
            // Canonical nested combinator.
            return apply_op(signal_from_json(require(doc, "of")), doc);
        }
        Signal f = generator_from(doc);
        if (doc.contains("ops")) {
            const json& ops = doc.at("ops");
            if (!ops.is_array()) fail("'ops' must be an array");
            for (const auto& op : ops) {
                if (op.contains("of")) fail("pipeline ops must not carry 'of'");
                f = apply_op(f, op);
            }
        }
        return f;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("signal descriptor: ") + e.what());
    }
}

json signal_to_json(const Signal& f) { return node_to_json(f.node()); }

}  // namespace reclab
