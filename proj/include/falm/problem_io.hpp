#pragma once

// JSON documents:
//   Problem  {"n", "p", "A": row-major array, "b": array,
//             "objective": {"kind": "quadratic", "Q", "c"} | {"kind": "least_squares", "M", "d"},
//             "lipschitz"?: number}
//   GenSpec  {"kind", "n", "p", "seed", "cond"}
//   Rule     {"rule": "nesterov" | "chambolle_dossal" | "attouch_cabot" | "constant", "alpha"?, "m"?}
// Matrices are accepted flat (row-major) or as arrays of rows and written flat.
// When "lipschitz" is absent it is computed exactly from the dense data.

#include "json.hpp"

#include "falm/benchgen.hpp"
#include "falm/inertial.hpp"
#include "falm/problem.hpp"

namespace falm {

using json = nlohmann::json;

json problem_to_json(const Problem& prob);
Problem problem_from_json(const json& doc);

/// The QP view of a quadratic or least-squares Problem whose A is dense.
std::optional<QpInstance> qp_view(const Problem& prob);

json genspec_to_json(const GenSpec& spec);
GenSpec genspec_from_json(const json& doc);

json rule_to_json(const InertialRule& rule);
InertialRule rule_from_json(const json& doc);

}  // namespace falm
