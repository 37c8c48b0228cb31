#pragma once

#include <string>

#include <json.hpp>

#include "curvop/operators.hpp"

namespace curvop {

using ojson = nlohmann::ordered_json;

// Operator-spec file format.  Complex numbers are explicit {"re":, "im":}
// objects; unknown fields are rejected; parse(emit(x)) is the identity on
// the canonical form.
//
//   {"kind":"dense","matrix":[[{"re":..,"im":..},...],...]}
//   {"kind":"shift","variant":"unilateral"|"bilateral","overrides":{"<index>":{..}}}
//   {"kind":"direct_sum","parts":[...]}
//   {"kind":"extension","inner":{...}}
//   {"kind":"named","name":"...","params":{...}}
//
// Named specs expand to their structural form on emission, except
// shift_power and backward_shift, whose exact application rules have no
// structural encoding; they stay in named form (which is their canonical
// form).

OperatorSpec parse_spec(const ojson& j);
ojson emit_spec(const OperatorSpec& t);
std::string canonical_spec_string(const OperatorSpec& t);

// Builders for {"kind":"named"}; also used by the CLI `example` command.
OperatorSpec build_named(const std::string& name, const ojson& params);

// path == "-" reads stdin.
OperatorSpec load_spec_file(const std::string& path);

}  // namespace curvop
