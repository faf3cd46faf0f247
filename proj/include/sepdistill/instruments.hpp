#pragma once

// Product Kraus operators and the filter / measurement families that map
// the rank-two mixtures onto their maximally correlated component.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "sepdistill/numlin.hpp"
#include "sepdistill/protocol.hpp"
#include "sepdistill/states.hpp"

namespace sepdistill {

inline const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

/// One Kraus operator A_1 (x) ... (x) A_n, kept factored.
struct ProductKraus {
  std::vector<ComplexMatrix> locals;

  ComplexMatrix full(const NumericPolicy& policy = {}) const {
    return kron_all(locals, policy);
  }

  Vector apply(std::span<const Complex> v, std::span<const std::size_t> dims) const {
    if (locals.size() != dims.size()) throw DimensionError("ProductKraus: party count mismatch");
    Vector out(v.begin(), v.end());
    Dims current(dims.begin(), dims.end());
    for (std::size_t p = 0; p < locals.size(); ++p) {
      out = apply_local(locals[p], p, current, out);
      current[p] = locals[p].rows();
    }
    return out;
  }

  ProductKraus adjoint() const {
    ProductKraus out;
    for (const auto& a : locals) out.locals.push_back(a.adjoint());
    return out;
  }

  /// E^dagger E as a dense operator, formed factor by factor.
  ComplexMatrix effect(const NumericPolicy& policy = {}) const {
    std::vector<ComplexMatrix> grams;
    for (const auto& a : locals) grams.push_back(a.adjoint() * a);
    return kron_all(grams, policy);
  }
};

struct Instrument {
  std::vector<ProductKraus> kraus;
  Dims dims;

  void validate() const {
    if (kraus.empty()) throw std::invalid_argument("Instrument: no Kraus operators");
    for (const auto& k : kraus) {
      if (k.locals.size() != dims.size())
        throw DimensionError("Instrument: Kraus operator has wrong party count");
      for (std::size_t p = 0; p < dims.size(); ++p)
        if (k.locals[p].rows() != dims[p] || k.locals[p].cols() != dims[p])
          throw DimensionError("Instrument: local operator is not square of the party dimension");
    }
  }

  /// Sum of E^dagger E over all Kraus operators.
  ComplexMatrix effect_sum(const NumericPolicy& policy = {}) const {
    validate();
    const std::size_t n = product(dims);
    ComplexMatrix total(n, n);
    for (const auto& k : kraus) total += k.effect(policy);
    return total;
  }
};

/// Named per-index coefficient list, e.g. eta_i for i = 0..d-1.
struct CoefficientTable {
  std::string name;
  std::vector<double> values;
};

/// Piecewise-constant table: segment j covers [bound_{j-1}, bound_j).
struct Segment {
  std::size_t end;
  double value;
};

inline CoefficientTable piecewise(std::string name, std::size_t d,
                                  std::initializer_list<Segment> segments) {
  CoefficientTable t{std::move(name), {}};
  std::size_t begin = 0;
  for (const auto& s : segments) {
    for (std::size_t i = begin; i < s.end && i < d; ++i) t.values.push_back(s.value);
    begin = std::max(begin, s.end);
  }
  if (t.values.size() != d) throw SpecError("coefficient table " + t.name + " does not cover 0..d-1");
  return t;
}

/// The coefficient displays of the separable filter pairs, in the order
/// (first-operator tables..., second-operator tables...).
inline std::vector<CoefficientTable> coefficient_tables(Family f, const DimsSpec& s) {
  validate_spec(f, s);
  const std::size_t d = s.d;
  const double one = 1.0, h = kInvSqrt2;
  switch (f) {
    case Family::Thm1Sep: {
      const std::size_t k1 = s.offset(0), k2 = s.offset(1);
      return {piecewise("eta", d, {{k1, one}, {d, h}}),
              piecewise("nu", d, {{k1, h}, {d, one}}),
              piecewise("eta'", d, {{k2, h}, {d, one}}),
              piecewise("nu'", d, {{k2, one}, {d, h}})};
    }
    case Family::Thm2I: {
      const std::size_t k2 = s.offset(1), k3 = s.offset(2);
      return {piecewise("eta", d, {{k2, one}, {d, h}}),
              piecewise("nu", d, {{k2, h}, {d, one}}),
              piecewise("eta'", d, {{k3, h}, {d, one}}),
              piecewise("nu'", d, {{k3, one}, {d, h}})};
    }
    case Family::Thm2II: {
      const std::size_t k1 = s.offset(0), k2 = s.offset(1), k3 = s.offset(2);
      return {piecewise("alpha", d, {{k1, one}, {d, h}}),
              piecewise("beta", d, {{k1, h}, {k1 + k2, one}, {d, h}}),
              piecewise("gamma", d, {{k1 + k2, h}, {d, one}}),
              piecewise("alpha'", d, {{k2 + k3, h}, {d, one}}),
              piecewise("beta'", d, {{k3, h}, {k2 + k3, one}, {d, h}}),
              piecewise("gamma'", d, {{k3, one}, {d, h}})};
    }
    default:
      throw SpecError(std::string(family_name(f)) + " has no coefficient tables");
  }
}

/// sum_i c_i |i><i| on a space of dimension `dim`.
inline ComplexMatrix diagonal_filter(std::size_t dim, const std::vector<double>& coeffs) {
  if (coeffs.size() > dim) throw DimensionError("diagonal_filter: more coefficients than dim");
  ComplexMatrix m(dim, dim);
  for (std::size_t i = 0; i < coeffs.size(); ++i) m(i, i) = coeffs[i];
  return m;
}

/// sum_i c_i |i><source(i)| on a space of dimension `dim`.
template <typename SourceMap>
ComplexMatrix shift_filter(std::size_t dim, const std::vector<double>& coeffs, SourceMap&& source) {
  if (coeffs.size() > dim) throw DimensionError("shift_filter: more coefficients than dim");
  ComplexMatrix m(dim, dim);
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const std::size_t s = source(i);
    if (s >= dim) throw DimensionError("shift_filter: source index outside the party space");
    m(i, s) = coeffs[i];
  }
  return m;
}

namespace detail {

inline ComplexMatrix block_projector(std::size_t dim, std::size_t d, std::size_t from) {
  return shift_filter(dim, std::vector<double>(d, 1.0), [&](std::size_t i) { return from + i; });
}

// {I (x) ... (x) K_j (x) ... (x) I} for a measurement on one party.
inline Instrument one_sided(const Dims& dims, std::size_t party, std::vector<ComplexMatrix> ops) {
  Instrument inst{{}, dims};
  for (auto& op : ops) {
    ProductKraus k;
    for (std::size_t p = 0; p < dims.size(); ++p)
      k.locals.push_back(p == party ? op : ComplexMatrix::identity(dims[p]));
    inst.kraus.push_back(std::move(k));
  }
  return inst;
}

// Measurement {sum_i |i><i|, sum_i |i><d+i|} on a party of dimension 2d.
inline std::vector<ComplexMatrix> fold_measurement(std::size_t d) {
  return {block_projector(2 * d, d, 0), block_projector(2 * d, d, d)};
}

}  // namespace detail

inline Instrument make_instrument(Family f, const DimsSpec& s) {
  validate_spec(f, s);
  const std::size_t d = s.d;
  const auto& n = s.dims;
  auto source = [&](std::size_t party) {
    return [&, party](std::size_t i) { return partner_index(f, s, party, i); };
  };

  switch (f) {
    case Family::Thm1Sep: {
      const auto t = coefficient_tables(f, s);
      ProductKraus e1{{diagonal_filter(n[0], t[0].values), diagonal_filter(n[1], t[1].values)}};
      ProductKraus e2{{shift_filter(n[0], t[2].values, source(0)),
                       shift_filter(n[1], t[3].values, source(1))}};
      return {{std::move(e1), std::move(e2)}, n};
    }
    case Family::Thm1Locc:
    case Family::Ex2x4:
      return detail::one_sided(n, 1, detail::fold_measurement(d));
    case Family::Thm2I: {
      const auto t = coefficient_tables(f, s);
      ComplexMatrix a = ComplexMatrix::identity(n[0]) * Complex(kInvSqrt2);
      ProductKraus e1{{a, diagonal_filter(n[1], t[0].values), diagonal_filter(n[2], t[1].values)}};
      ProductKraus e2{{a, shift_filter(n[1], t[2].values, source(1)),
                       shift_filter(n[2], t[3].values, source(2))}};
      return {{std::move(e1), std::move(e2)}, n};
    }
    case Family::Thm2II: {
      const auto t = coefficient_tables(f, s);
      ProductKraus e1{{diagonal_filter(n[0], t[0].values), diagonal_filter(n[1], t[1].values),
                       diagonal_filter(n[2], t[2].values)}};
      ProductKraus e2{{shift_filter(n[0], t[3].values, source(0)),
                       shift_filter(n[1], t[4].values, source(1)),
                       shift_filter(n[2], t[5].values, source(2))}};
      return {{std::move(e1), std::move(e2)}, n};
    }
    case Family::Thm2III:
      return detail::one_sided(n, 2, detail::fold_measurement(d));
    case Family::BellMix:
    case Family::ThreeQubit:
      break;
  }
  throw SpecError(std::string(family_name(f)) + " has no single-round instrument");
}

/// Scalar s with K1 psi1 = s psi1 and K2 psi2 = s psi1 for a family's
/// two-outcome instrument.
inline double filter_scale(Family f) {
  switch (f) {
    case Family::Thm1Sep: return kInvSqrt2;
    case Family::Thm2I:
    case Family::Thm2II: return 0.5;
    case Family::Thm1Locc:
    case Family::Ex2x4:
    case Family::Thm2III: return 1.0;
    default: break;
  }
  throw SpecError(std::string(family_name(f)) + " has no two-outcome instrument");
}

/// Vector-norm errors of the four filtering identities
/// K1 psi1 = s psi1, K2 psi2 = s psi1, K1 psi2 = 0, K2 psi1 = 0.
struct FilteringCheck {
  double keep_first = 0.0;
  double map_second = 0.0;
  double kill_second = 0.0;
  double kill_first = 0.0;
  double max() const { return std::max({keep_first, map_second, kill_second, kill_first}); }
};

inline FilteringCheck check_filtering(Family f, const DimsSpec& s) {
  const auto [psi1, psi2] = make_state_pair(f, s);
  const auto inst = make_instrument(f, s);
  const Vector expected = scaled(psi1.amplitudes, filter_scale(f));
  const auto& k1 = inst.kraus.at(0);
  const auto& k2 = inst.kraus.at(1);
  return {distance(k1.apply(psi1.amplitudes, s.dims), expected),
          distance(k2.apply(psi2.amplitudes, s.dims), expected),
          norm(k1.apply(psi2.amplitudes, s.dims)),
          norm(k2.apply(psi1.amplitudes, s.dims))};
}

inline ComplexMatrix pauli_z() { return ComplexMatrix(2, 2, {1.0, 0.0, 0.0, -1.0}); }
inline ComplexMatrix pauli_x() { return ComplexMatrix(2, 2, {0.0, 1.0, 1.0, 0.0}); }

inline ProtocolProgram make_protocol(Family f, const DimsSpec& s) {
  validate_spec(f, s);
  ProtocolProgram prog;
  prog.dims = s.dims;

  if (f == Family::ThreeQubit) {
    const double h = kInvSqrt2;
    const Vector plus{h, h}, minus{h, -h};
    // Charlie measures in the +/- basis; on "-" Bob applies sigma_z.
    prog.rounds.push_back({2,
                           {ComplexMatrix::outer(plus, plus), ComplexMatrix::outer(minus, minus)},
                           {OutcomeAction{{}, std::nullopt}, OutcomeAction{{}, 1}}});
    prog.rounds.push_back({1, {pauli_z()}, {OutcomeAction{{}, std::nullopt}}});
    prog.trace_out = {2};
    prog.target = ghz(2, 2);
    validate_program(prog);
    return prog;
  }

  Instrument inst;
  std::size_t party = 0;
  switch (f) {
    case Family::Thm1Locc:
    case Family::Ex2x4:
      party = 1;
      break;
    case Family::Thm2III:
      party = 2;
      break;
    default:
      throw SpecError(std::string(family_name(f)) + " has no LOCC protocol");
  }
  inst = make_instrument(f, s);
  ProtocolRound round{party, {}, {}};
  for (const auto& k : inst.kraus) {
    round.measurement.push_back(k.locals[party]);
    round.outcomes.push_back({});
  }
  prog.rounds.push_back(std::move(round));
  prog.target = make_state_pair(f, s).first;
  validate_program(prog);
  return prog;
}

}  // namespace sepdistill
