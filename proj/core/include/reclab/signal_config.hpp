#pragma once

#include <nlohmann/json.hpp>

#include "reclab/signal.hpp"

namespace reclab {

/// Declarative signal descriptors.
///
/// A descriptor is a JSON object naming a generator, optionally followed by
/// an "ops" pipeline applied in order:
///
///   {"generator": "trig", "terms": [{"kind": "sin", "omega": 1, "coeff": [[1, 0]]}],
///    "ops": [{"op": "translate", "s": 2}, {"op": "integral", "alpha": 0}]}
///
/// Complex numbers are [re, im] pairs; vectors are arrays of pairs. The full
/// schema is documented in docs/config.md. Serialization always emits the
/// canonical nested form, in which each combinator is an object with "op"
/// and its operand under "of"; parsing accepts both forms, so
/// serialize(parse(serialize(x))) == serialize(x).
Signal signal_from_json(const nlohmann::json& doc);
nlohmann::json signal_to_json(const Signal& f);

/// [re, im] helpers shared by the system and report formats.
Complex complex_from_json(const nlohmann::json& j);
nlohmann::json complex_to_json(Complex z);
CVector cvector_from_json(const nlohmann::json& j);
nlohmann::json cvector_to_json(const CVector& v);
/// Matrix as an array of rows, each row an array of [re, im] pairs.
ComplexMatrix cmatrix_from_json(const nlohmann::json& j);
nlohmann::json cmatrix_to_json(const ComplexMatrix& m);

/// Throws ConfigError naming the first key of `obj` outside `allowed`.
void reject_unknown_keys(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                         const char* context);

}  // namespace reclab
