#pragma once

// State families: maximally entangled / GHZ-type pure states, the shifted
// partner states that share no basis support with them, and rank-two
// mixtures of the two.

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sepdistill/numlin.hpp"

namespace sepdistill {

enum class Family {
  Thm1Sep,     // m (x) n, m + n = 3d, separable filter pair
  Thm1Locc,    // d (x) 2d, one-sided measurement
  Ex2x4,       // 2 (x) 4 worked example
  BellMix,     // mixture of two Bell states (no printed instrument)
  Thm2I,       // p = d, q = d + k2, r = d + k3
  Thm2II,      // all offsets positive
  Thm2III,     // d (x) d (x) 2d, one-sided measurement
  ThreeQubit,  // 2 (x) 2 (x) 2 with a conditional sigma_z correction
};

inline constexpr std::string_view family_name(Family f) {
  switch (f) {
    case Family::Thm1Sep: return "thm1-sep";
    case Family::Thm1Locc: return "thm1-locc";
    case Family::Ex2x4: return "ex-2x4";
    case Family::BellMix: return "bell-mix";
    case Family::Thm2I: return "thm2-i";
    case Family::Thm2II: return "thm2-ii";
    case Family::Thm2III: return "thm2-iii";
    case Family::ThreeQubit: return "three-qubit";
  }
  return "?";
}

inline std::optional<Family> parse_family(std::string_view name) {
  for (auto f : {Family::Thm1Sep, Family::Thm1Locc, Family::Ex2x4, Family::BellMix,
                 Family::Thm2I, Family::Thm2II, Family::Thm2III, Family::ThreeQubit})
    if (family_name(f) == name) return f;
  return std::nullopt;
}

class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Party dimensions together with the target level d. Each party dimension
/// is d plus a nonnegative offset.
struct DimsSpec {
  Dims dims;
  std::size_t d = 2;

  static DimsSpec from_offsets(std::size_t d, const std::vector<std::size_t>& offsets) {
    DimsSpec s{{}, d};
    for (auto k : offsets) s.dims.push_back(d + k);
    return s;
  }

  std::size_t parties() const { return dims.size(); }

  /// Offset k_i = dims[i] - d. Requires dims[i] >= d.
  std::size_t offset(std::size_t party) const { return dims.at(party) - d; }

  std::vector<std::size_t> offsets() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < dims.size(); ++i) out.push_back(offset(i));
    return out;
  }

  friend bool operator==(const DimsSpec&, const DimsSpec&) = default;
};

/// Canonical spec for families with fixed shape; the d-parameterized ones
/// are built from offsets by the caller.
inline DimsSpec canonical_spec(Family f, std::size_t d) {
  switch (f) {
    case Family::Thm1Locc: return {{d, 2 * d}, d};
    case Family::Ex2x4: return {{2, 4}, 2};
    case Family::BellMix: return {{2, 2}, 2};
    case Family::Thm2III: return {{d, d, 2 * d}, d};
    case Family::ThreeQubit: return {{2, 2, 2}, 2};
    default: break;
  }
  throw SpecError(std::string(family_name(f)) + " needs explicit offsets");
}

inline void validate_spec(Family f, const DimsSpec& s) {
  const std::string name(family_name(f));
  auto fail = [&](const std::string& why) {
    throw SpecError(name + ": invalid parameterization: " + why);
  };
  if (s.d < 2) fail("target level d must be at least 2");
  for (auto n : s.dims)
    if (n < s.d) fail("every party dimension must be >= d");

  const auto k = s.offsets();
  auto count = [&](std::size_t n) {
    if (s.parties() != n) fail("expected " + std::to_string(n) + " parties");
  };
  switch (f) {
    case Family::Thm1Sep:
      count(2);
      if (k[0] < 1 || k[1] < 1) fail("k1, k2 must be >= 1");
      if (k[0] + k[1] != s.d) fail("k1 + k2 must equal d");
      break;
    case Family::Thm1Locc:
      count(2);
      if (k[0] != 0 || k[1] != s.d) fail("dims must be (d, 2d)");
      break;
    case Family::Ex2x4:
      if (s != DimsSpec{{2, 4}, 2}) fail("dims must be (2, 4) with d = 2");
      break;
    case Family::BellMix:
      if (s != DimsSpec{{2, 2}, 2}) fail("dims must be (2, 2) with d = 2");
      break;
    case Family::Thm2I:
      count(3);
      if (k[0] != 0) fail("k1 must be 0");
      if (k[1] < 1 || k[2] < 1) fail("k2, k3 must be >= 1");
      if (k[1] + k[2] != s.d) fail("k2 + k3 must equal d");
      break;
    case Family::Thm2II:
      count(3);
      if (k[0] < 1 || k[1] < 1 || k[2] < 1) fail("all offsets must be >= 1");
      if (k[0] + k[1] + k[2] != s.d) fail("k1 + k2 + k3 must equal d");
      break;
    case Family::Thm2III:
      count(3);
      if (k[0] != 0 || k[1] != 0 || k[2] != s.d) fail("dims must be (d, d, 2d)");
      break;
    case Family::ThreeQubit:
      if (s != DimsSpec{{2, 2, 2}, 2}) fail("dims must be (2, 2, 2) with d = 2");
      break;
  }
}

struct PureState {
  Vector amplitudes;
  Dims dims;

  /// Validates shape and unit norm.
  static PureState make(Vector amplitudes, Dims dims, const NumericPolicy& policy = {}) {
    if (product(dims) != amplitudes.size())
      throw DimensionError("PureState: amplitude count does not match dims");
    if (std::abs(norm(amplitudes) - 1.0) > policy.state_tolerance)
      throw std::invalid_argument("PureState: amplitudes are not unit norm");
    return {std::move(amplitudes), std::move(dims)};
  }

  static PureState normalized(Vector amplitudes, Dims dims) {
    const double n = norm(amplitudes);
    if (n == 0.0) throw std::invalid_argument("PureState: zero vector");
    for (auto& z : amplitudes) z /= n;
    return make(std::move(amplitudes), std::move(dims));
  }

  ComplexMatrix projector() const { return ComplexMatrix::outer(amplitudes, amplitudes); }
};

class DensityMatrix {
 public:
  /// Validates Hermiticity, unit trace and positivity.
  DensityMatrix(ComplexMatrix matrix, Dims dims, const NumericPolicy& policy = {})
      : matrix_(std::move(matrix)), dims_(std::move(dims)) {
    if (!matrix_.square() || matrix_.rows() != product(dims_))
      throw DimensionError("DensityMatrix: side does not match dims");
    if (!matrix_.all_finite()) throw std::invalid_argument("DensityMatrix: non-finite entry");
    if (!is_hermitian(matrix_, policy.state_tolerance))
      throw std::invalid_argument("DensityMatrix: not Hermitian");
    if (std::abs(matrix_.trace() - 1.0) > policy.state_tolerance)
      throw std::invalid_argument("DensityMatrix: trace is not 1");
    if (!is_positive_semidefinite(matrix_, policy.tolerance))
      throw std::invalid_argument("DensityMatrix: negative eigenvalue");
  }

  static DensityMatrix pure(const PureState& psi) { return {psi.projector(), psi.dims}; }

  const ComplexMatrix& matrix() const { return matrix_; }
  const Dims& dims() const { return dims_; }

 private:
  ComplexMatrix matrix_;
  Dims dims_;
};

namespace detail {

inline std::size_t flat_index(std::span<const std::size_t> digits,
                              std::span<const std::size_t> dims) {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (digits[i] >= dims[i]) throw DimensionError("basis digit out of range");
    idx = idx * dims[i] + digits[i];
  }
  return idx;
}

// (1/sqrt(d)) sum_i |s_1(i), ..., s_n(i)> for per-party index maps s_j.
template <typename IndexMap>
PureState uniform_superposition(const Dims& dims, std::size_t d, IndexMap&& index) {
  Vector amps(product(dims));
  const double a = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<std::size_t> digits(dims.size());
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t p = 0; p < dims.size(); ++p) digits[p] = index(p, i);
    amps[flat_index(digits, dims)] += a;
  }
  return PureState::make(std::move(amps), dims);
}

}  // namespace detail

/// (1/sqrt(d)) sum_i |i, i, ..., i> embedded in arbitrary party dims >= d.
inline PureState maximally_correlated(const Dims& dims, std::size_t d) {
  return detail::uniform_superposition(dims, d, [](std::size_t, std::size_t i) { return i; });
}

inline PureState ghz(std::size_t n_parties, std::size_t d, const NumericPolicy& policy = {}) {
  if (n_parties < 2) throw SpecError("ghz: need at least two parties");
  if (d < 2) throw SpecError("ghz: level d must be at least 2");
  double total = 1.0;
  for (std::size_t i = 0; i < n_parties; ++i) total *= static_cast<double>(d);
  if (total > static_cast<double>(policy.max_dimension))
    throw DimensionError("ghz: total dimension exceeds cap");
  return maximally_correlated(Dims(n_parties, d), d);
}

/// Source index map of the shifted partner state psi_2, per party. The same
/// map gives the bra indices of the second filter operator.
inline std::size_t partner_index(Family f, const DimsSpec& s, std::size_t party,
                                 std::size_t i) {
  const std::size_t d = s.d;
  const auto& n = s.dims;
  switch (f) {
    case Family::Thm1Sep:
      return party == 0 ? s.offset(0) + i : (d + i) % n[1];
    case Family::Thm1Locc:
    case Family::Ex2x4:
      return party == 0 ? i : d + i;
    case Family::Thm2I:
      if (party == 0) return i;
      return party == 1 ? s.offset(1) + i : (d + i) % n[2];
    case Family::Thm2II:
      if (party == 0) return s.offset(0) + i;
      if (party == 1) return (s.offset(0) + s.offset(1) + i) % n[1];
      return (d + i) % n[2];
    case Family::Thm2III:
      return party < 2 ? i : d + i;
    case Family::BellMix:  // |01> + |10>
      return party == 0 ? i : 1 - i;
    case Family::ThreeQubit:  // |001> + |110>
      return party < 2 ? i : 1 - i;
  }
  throw SpecError("partner_index: unknown family");
}

inline std::pair<PureState, PureState> make_state_pair(Family f, const DimsSpec& s) {
  validate_spec(f, s);
  PureState psi1 = maximally_correlated(s.dims, s.d);
  PureState psi2 = detail::uniform_superposition(
      s.dims, s.d, [&](std::size_t party, std::size_t i) { return partner_index(f, s, party, i); });
  return {std::move(psi1), std::move(psi2)};
}

/// w |psi1><psi1| + (1 - w) |psi2><psi2| for orthogonal psi1, psi2.
inline DensityMatrix mix_pair(const PureState& psi1, const PureState& psi2, double w,
                              const NumericPolicy& policy = {}) {
  if (psi1.dims != psi2.dims) throw DimensionError("mix_pair: dims differ");
  if (!(w > 0.0 && w < 1.0)) throw std::invalid_argument("mix_pair: weight must lie in (0, 1)");
  if (std::abs(inner(psi1.amplitudes, psi2.amplitudes)) > policy.state_tolerance)
    throw std::invalid_argument("mix_pair: states are not orthogonal");
  ComplexMatrix rho = psi1.projector() * Complex(w) + psi2.projector() * Complex(1.0 - w);
  return {std::move(rho), psi1.dims, policy};
}

}  // namespace sepdistill
