#include "curvop/specfile.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "curvop/corpus.hpp"
#include "curvop/defect.hpp"
#include "curvop/errors.hpp"

namespace curvop {

namespace {

void reject_unknown_keys(const ojson& j, const std::set<std::string>& allowed,
                         const std::string& where) {
  if (!j.is_object()) throw DomainError(where + ": expected a JSON object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw DomainError(where + ": unknown field '" + key + "'");
}

double number_field(const ojson& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw DomainError(where + ": missing numeric field '" + key + "'");
  const double v = j.at(key).get<double>();
  if (!std::isfinite(v)) throw DomainError(where + ": field '" + key + "' is not finite");
  return v;
}

cplx parse_complex(const ojson& j, const std::string& where) {
  reject_unknown_keys(j, {"re", "im"}, where);
  return cplx{number_field(j, "re", where), number_field(j, "im", where)};
}

ojson emit_complex(cplx z) {
  ojson j;
  j["re"] = z.real();
  j["im"] = z.imag();
  return j;
}

long long integer_param(const ojson& params, const char* key, const std::string& where) {
  if (!params.contains(key) || !params.at(key).is_number_integer())
    throw DomainError(where + ": missing integer parameter '" + key + "'");
  return params.at(key).get<long long>();
}

}  // namespace

OperatorSpec build_named(const std::string& name, const ojson& params) {
  const std::string where = "named operator '" + name + "'";
  if (name == "kappa_example") {
    reject_unknown_keys(params, {"kappa"}, where);
    return kappa_example(number_field(params, "kappa", where));
  }
  if (name == "unilateral_shift") {
    reject_unknown_keys(params, {}, where);
    return unilateral_shift();
  }
  if (name == "shift_power") {
    reject_unknown_keys(params, {"m"}, where);
    return shift_power(static_cast<int>(integer_param(params, "m", where)));
  }
  if (name == "backward_shift") {
    reject_unknown_keys(params, {}, where);
    return backward_shift_op();
  }
  if (name == "jordan_nilpotent") {
    reject_unknown_keys(params, {"n"}, where);
    return jordan_nilpotent(static_cast<int>(integer_param(params, "n", where)));
  }
  if (name == "dft_unitary") {
    reject_unknown_keys(params, {"n"}, where);
    return dft_unitary(static_cast<int>(integer_param(params, "n", where)));
  }
  if (name == "random_contraction") {
    reject_unknown_keys(params, {"dim", "seed"}, where);
    return random_contraction(static_cast<int>(integer_param(params, "dim", where)),
                              static_cast<std::uint64_t>(integer_param(params, "seed", where)));
  }
  throw DomainError("unknown named operator '" + name + "'");
}

OperatorSpec parse_spec(const ojson& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw DomainError("operator spec: missing 'kind'");
  const std::string kind = j.at("kind").get<std::string>();

  if (kind == "dense") {
    reject_unknown_keys(j, {"kind", "matrix"}, "dense spec");
    if (!j.contains("matrix") || !j.at("matrix").is_array() || j.at("matrix").empty())
      throw DomainError("dense spec: 'matrix' must be a nonempty array of rows");
    const auto& rows = j.at("matrix");
    const std::size_t n = rows.size();
    CMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!rows[i].is_array() || rows[i].size() != n)
        throw DomainError("dense spec: matrix must be square");
      for (std::size_t k = 0; k < n; ++k)
        m.at(i, k) = parse_complex(rows[i][k], "dense spec entry");
    }
    return OperatorSpec::dense(std::move(m));
  }

  if (kind == "shift") {
    reject_unknown_keys(j, {"kind", "variant", "overrides"}, "shift spec");
    if (!j.contains("variant") || !j.at("variant").is_string())
      throw DomainError("shift spec: missing 'variant'");
    const std::string variant = j.at("variant").get<std::string>();
    WeightedShiftSpec s;
    if (variant == "unilateral") s.variant = WeightedShiftSpec::Variant::unilateral;
    else if (variant == "bilateral") s.variant = WeightedShiftSpec::Variant::bilateral;
    else throw DomainError("shift spec: variant must be 'unilateral' or 'bilateral'");
    if (j.contains("overrides")) {
      if (!j.at("overrides").is_object()) throw DomainError("shift spec: 'overrides' object");
      for (const auto& [key, value] : j.at("overrides").items()) {
        std::size_t pos = 0;
        std::int64_t idx = 0;
        try {
          idx = std::stoll(key, &pos);
        } catch (const std::exception&) {
          throw DomainError("shift spec: override index '" + key + "' is not an integer");
        }
        if (pos != key.size())
          throw DomainError("shift spec: override index '" + key + "' is not an integer");
        s.overrides[idx] = parse_complex(value, "shift weight");
      }
    }
    return OperatorSpec::shift(std::move(s));
  }

  if (kind == "direct_sum") {
    reject_unknown_keys(j, {"kind", "parts"}, "direct_sum spec");
    if (!j.contains("parts") || !j.at("parts").is_array() || j.at("parts").empty())
      throw DomainError("direct_sum spec: 'parts' must be a nonempty array");
    std::vector<OperatorSpec> parts;
    for (const auto& p : j.at("parts")) parts.push_back(parse_spec(p));
    return direct_sum(std::move(parts));
  }

  if (kind == "extension") {
    reject_unknown_keys(j, {"kind", "inner"}, "extension spec");
    if (!j.contains("inner")) throw DomainError("extension spec: missing 'inner'");
    return extend_to_partial_isometry(parse_spec(j.at("inner")));
  }

  if (kind == "named") {
    reject_unknown_keys(j, {"kind", "name", "params"}, "named spec");
    if (!j.contains("name") || !j.at("name").is_string())
      throw DomainError("named spec: missing 'name'");
    const ojson params = j.contains("params") ? j.at("params") : ojson::object();
    return build_named(j.at("name").get<std::string>(), params);
  }

  throw DomainError("operator spec: unknown kind '" + kind + "'");
}

ojson emit_spec(const OperatorSpec& t) {
  ojson j;
  if (const auto* d = t.get_if<DenseOperator>()) {
    j["kind"] = "dense";
    ojson rows = ojson::array();
    for (std::size_t i = 0; i < d->m.rows; ++i) {
      ojson row = ojson::array();
      for (std::size_t k = 0; k < d->m.cols; ++k) row.push_back(emit_complex(d->m.at(i, k)));
      rows.push_back(std::move(row));
    }
    j["matrix"] = std::move(rows);
    return j;
  }
  if (const auto* s = t.get_if<WeightedShiftSpec>()) {
    j["kind"] = "shift";
    j["variant"] =
        s->variant == WeightedShiftSpec::Variant::unilateral ? "unilateral" : "bilateral";
    ojson overrides = ojson::object();
    for (const auto& [n, w] : s->overrides) overrides[std::to_string(n)] = emit_complex(w);
    j["overrides"] = std::move(overrides);
    return j;
  }
  if (const auto* p = t.get_if<StepShiftSpec>()) {
    j["kind"] = "named";
    j["name"] = "shift_power";
    j["params"] = ojson::object();
    j["params"]["m"] = p->step;
    return j;
  }
  if (t.is<BackwardShiftSpec>()) {
    j["kind"] = "named";
    j["name"] = "backward_shift";
    j["params"] = ojson::object();
    return j;
  }
  if (const auto* ds = t.get_if<DirectSumSpec>()) {
    j["kind"] = "direct_sum";
    ojson parts = ojson::array();
    for (const auto& p : ds->parts) parts.push_back(emit_spec(p));
    j["parts"] = std::move(parts);
    return j;
  }
  const auto& ext = std::get<ExtensionSpec>(t.node);
  j["kind"] = "extension";
  j["inner"] = emit_spec(ext.inner());
  return j;
}

std::string canonical_spec_string(const OperatorSpec& t) { return emit_spec(t).dump(2); }

OperatorSpec load_spec_file(const std::string& path) {
  ojson j;
  try {
    if (path == "-") {
      j = ojson::parse(std::cin);
    } else {
      std::ifstream in(path);
      if (!in) throw DomainError("cannot open spec file '" + path + "'");
      j = ojson::parse(in);
    }
  } catch (const nlohmann::json::exception& e) {
    // Covers syntax errors and unrepresentable numbers (e.g. 1e400).
    throw DomainError(std::string("spec file is not valid JSON: ") + e.what());
  }
  return parse_spec(j);
}

}  // namespace curvop
