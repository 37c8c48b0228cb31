#pragma once

#include <cmath>
#include <vector>

#include "curvop/cmat.hpp"
#include "curvop/operators.hpp"
#include "curvop/prng.hpp"

namespace testutil {

using curvop::CMat;
using curvop::cplx;

inline CMat diag(std::initializer_list<double> entries) {
  CMat m(entries.size(), entries.size());
  std::size_t i = 0;
  for (double v : entries) {
    m.at(i, i) = v;
    ++i;
  }
  return m;
}

inline CMat random_matrix(std::size_t n, std::uint64_t seed) {
  curvop::SplitMix64 rng(seed);
  CMat m(n, n);
  for (auto& v : m.a) v = cplx{rng.sym(), rng.sym()};
  return m;
}

inline CMat dft(std::size_t n) {
  CMat m(n, n);
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) {
      const double ang = -2.0 * M_PI * static_cast<double>(j * k) / static_cast<double>(n);
      m.at(j, k) = s * cplx{std::cos(ang), std::sin(ang)};
    }
  return m;
}

inline curvop::OperatorSpec bilateral_shift(std::map<std::int64_t, cplx> overrides) {
  curvop::WeightedShiftSpec s;
  s.variant = curvop::WeightedShiftSpec::Variant::bilateral;
  s.overrides = std::move(overrides);
  return curvop::OperatorSpec::shift(std::move(s));
}

inline curvop::OperatorSpec unilateral_shift_with(std::map<std::int64_t, cplx> overrides) {
  curvop::WeightedShiftSpec s;
  s.variant = curvop::WeightedShiftSpec::Variant::unilateral;
  s.overrides = std::move(overrides);
  return curvop::OperatorSpec::shift(std::move(s));
}

}  // namespace testutil
