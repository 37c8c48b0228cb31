#include "curvop/corpus.hpp"

#include <cmath>

#include "curvop/defect.hpp"
#include "curvop/errors.hpp"
#include "curvop/prng.hpp"

namespace curvop {

OperatorSpec kappa_example(double kappa) {
  if (!(kappa >= 0.0 && kappa <= 1.0))
    throw DomainError("kappa_example: kappa must lie in [0, 1]");
  WeightedShiftSpec s;
  s.variant = WeightedShiftSpec::Variant::bilateral;
  s.overrides[0] = cplx{std::sqrt(1.0 - kappa), 0.0};
  return OperatorSpec::shift(std::move(s));
}

OperatorSpec unilateral_shift() {
  WeightedShiftSpec s;
  s.variant = WeightedShiftSpec::Variant::unilateral;
  return OperatorSpec::shift(std::move(s));
}

OperatorSpec shift_power(int m) { return OperatorSpec::step_shift(m); }

OperatorSpec backward_shift_op() { return OperatorSpec::backward_shift(); }

OperatorSpec jordan_nilpotent(int n) {
  if (n < 1) throw DomainError("jordan_nilpotent: n must be positive");
  CMat m(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  for (int k = 0; k + 1 < n; ++k)
    m.at(static_cast<std::size_t>(k + 1), static_cast<std::size_t>(k)) = 1.0;
  return OperatorSpec::dense(std::move(m));
}

OperatorSpec dft_unitary(int n) {
  if (n < 1) throw DomainError("dft_unitary: n must be positive");
  CMat m(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      const double ang = -2.0 * M_PI * static_cast<double>(j) * static_cast<double>(k) /
                         static_cast<double>(n);
      m.at(static_cast<std::size_t>(j), static_cast<std::size_t>(k)) =
          scale * cplx{std::cos(ang), std::sin(ang)};
    }
  return OperatorSpec::dense(std::move(m));
}

OperatorSpec random_contraction(int dim, std::uint64_t seed) {
  if (dim < 1) throw DomainError("random_contraction: dim must be positive");
  SplitMix64 rng(seed);
  CMat m(static_cast<std::size_t>(dim), static_cast<std::size_t>(dim));
  for (auto& v : m.a) v = cplx{rng.sym(), rng.sym()};
  const double top = spectral_norm(m);
  kern::ops().scal(m.a.size(), cplx{0.95 / top, 0.0}, m.a.data());
  return OperatorSpec::dense(std::move(m));
}

OperatorSpec random_weighted_shift(std::uint64_t seed, int max_overrides) {
  SplitMix64 rng(seed);
  WeightedShiftSpec s;
  s.variant = WeightedShiftSpec::Variant::unilateral;
  const int count = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_overrides)));
  for (int i = 0; i < count; ++i) {
    const std::int64_t idx = 1 + static_cast<std::int64_t>(rng.below(10));
    const double mod = 0.3 + 0.69 * rng.unit();  // nonzero, strictly inside
    const double ang = 2.0 * M_PI * rng.unit();
    s.overrides[idx] = mod * cplx{std::cos(ang), std::sin(ang)};
  }
  return OperatorSpec::shift(std::move(s));
}

OperatorSpec kappa_target_sum(double target) {
  if (!(target >= 0.0) || !std::isfinite(target))
    throw DomainError("kappa_target_sum: target must be a finite nonnegative real");
  std::vector<OperatorSpec> parts;
  double whole;
  const double frac = std::modf(target, &whole);
  for (long i = 0; i < static_cast<long>(whole); ++i) parts.push_back(kappa_example(1.0));
  if (frac > 0.0 || parts.empty()) parts.push_back(kappa_example(frac));
  return direct_sum(std::move(parts));
}

namespace {

OperatorSpec diag_dense(std::vector<double> entries) {
  CMat m(entries.size(), entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) m.at(i, i) = entries[i];
  return OperatorSpec::dense(std::move(m));
}

OperatorSpec upper_nilpotent_2x2() {
  CMat m(2, 2);
  m.at(0, 1) = 1.0;
  return OperatorSpec::dense(std::move(m));
}

}  // namespace

std::vector<CorpusEntry> default_corpus() {
  std::vector<CorpusEntry> c;
  auto add = [&](std::string name, OperatorSpec spec, std::optional<double> k,
                 std::optional<int> index, std::optional<bool> pure, bool pi, bool integral) {
    c.push_back(CorpusEntry{std::move(name), std::move(spec), k, index, pure, pi, integral});
  };

  add("unilateral_shift", unilateral_shift(), 1.0, -1, true, true, true);
  add("shift_power_2", shift_power(2), 2.0, -2, true, true, false);
  add("shift_power_3", shift_power(3), 3.0, -3, true, true, false);
  add("shift_power_5", shift_power(5), 5.0, -5, true, true, false);
  add("backward_shift", backward_shift_op(), 0.0, 1, false, true, true);

  add("kappa_0", kappa_example(0.0), 0.0, 0, false, true, true);
  add("kappa_quarter", kappa_example(0.25), 0.25, 0, false, false, true);
  add("kappa_third", kappa_example(1.0 / 3.0), 1.0 / 3.0, 0, false, false, true);
  add("kappa_half", kappa_example(0.5), 0.5, 0, false, false, true);
  add("kappa_two_thirds", kappa_example(2.0 / 3.0), 2.0 / 3.0, 0, false, false, true);
  add("kappa_1", kappa_example(1.0), 1.0, 0, false, true, true);
  add("kappa_half_extension", extend_to_partial_isometry(kappa_example(0.5)), 0.5, 0, false,
      true, false);

  add("jordan_2", jordan_nilpotent(2), 0.0, 0, true, true, true);
  add("jordan_5", jordan_nilpotent(5), 0.0, 0, true, true, false);
  add("jordan_10", jordan_nilpotent(10), 0.0, 0, true, true, false);
  add("upper_nilpotent_2", upper_nilpotent_2x2(), 0.0, 0, true, true, true);
  add("dft_4", dft_unitary(4), 0.0, 0, false, true, true);
  add("dft_8", dft_unitary(8), 0.0, 0, false, true, true);
  add("diag_contraction", diag_dense({0.5, 0.25}), 0.0, 0, true, false, true);

  add("random_6", random_contraction(6, 1), std::nullopt, 0, true, false, false);
  add("random_8", random_contraction(8, 2), std::nullopt, 0, true, false, false);
  add("random_12", random_contraction(12, 3), std::nullopt, 0, true, false, false);
  add("random_6_extension", extend_to_partial_isometry(random_contraction(6, 4)), std::nullopt,
      0, true, true, false);

  add("sum_shift_shift", direct_sum({unilateral_shift(), unilateral_shift()}), 2.0, -2, true,
      true, true);
  add("sum_kappa_half_shift", direct_sum({kappa_example(0.5), unilateral_shift()}), 1.5, -1,
      false, false, true);
  return c;
}

std::vector<CorpusEntry> partial_isometry_corpus() {
  std::vector<CorpusEntry> out;
  for (CorpusEntry& e : default_corpus())
    if (e.partial_isometry) out.push_back(std::move(e));
  return out;
}

}  // namespace curvop
