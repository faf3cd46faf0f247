#pragma once

// Schmidt decomposition across party bipartitions, product-structure
// certification of operators, rank analysis of two-state pencils and the
// dimension bounds for pure-state distillation.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "sepdistill/numlin.hpp"
#include "sepdistill/states.hpp"

namespace sepdistill {

/// Parties on one side of a bipartition; the rest form the other side.
using Cut = std::vector<std::size_t>;

struct SchmidtData {
  Cut cut;
  std::vector<double> coefficients;  // descending
  std::size_t rank = 0;
};

namespace detail {

inline void validate_cut(const Cut& cut, std::size_t parties) {
  if (cut.empty() || cut.size() >= parties)
    throw std::invalid_argument("cut must leave both sides nonempty");
  std::vector<bool> seen(parties, false);
  for (auto p : cut) {
    if (p >= parties) throw std::invalid_argument("cut: party index out of range");
    if (seen[p]) throw std::invalid_argument("cut: repeated party");
    seen[p] = true;
  }
}

// Party order with the cut side first (each side in ascending order).
inline std::vector<std::size_t> cut_order(const Cut& cut, std::size_t parties) {
  std::vector<std::size_t> first(cut), second;
  std::sort(first.begin(), first.end());
  for (std::size_t p = 0; p < parties; ++p)
    if (std::find(first.begin(), first.end(), p) == first.end()) second.push_back(p);
  first.insert(first.end(), second.begin(), second.end());
  return first;
}

// Amplitude matrix psi[(cut side), (other side)].
inline ComplexMatrix reshape_across(std::span<const Complex> amps, const Dims& dims, const Cut& cut) {
  validate_cut(cut, dims.size());
  if (amps.size() != product(dims)) throw DimensionError("reshape: amplitude count mismatch");
  const auto order = cut_order(cut, dims.size());
  std::size_t rows = 1;
  for (std::size_t i = 0; i < cut.size(); ++i) rows *= dims[order[i]];
  const std::size_t cols = amps.size() / rows;

  // Strides of each party in the original flat index.
  std::vector<std::size_t> stride(dims.size(), 1);
  for (std::size_t p = dims.size(); p-- > 1;) stride[p - 1] = stride[p] * dims[p];

  ComplexMatrix m(rows, cols);
  std::vector<std::size_t> digit(dims.size(), 0);  // digits in permuted order
  for (std::size_t flat = 0; flat < amps.size(); ++flat) {
    std::size_t src = 0;
    for (std::size_t i = 0; i < order.size(); ++i) src += digit[i] * stride[order[i]];
    m.entries()[flat] = amps[src];
    for (std::size_t i = order.size(); i-- > 0;) {
      if (++digit[i] < dims[order[i]]) break;
      digit[i] = 0;
    }
  }
  return m;
}

}  // namespace detail

inline SchmidtData schmidt(std::span<const Complex> amps, const Dims& dims, const Cut& cut,
                           double threshold = 1e-10) {
  const auto m = detail::reshape_across(amps, dims, cut);
  SchmidtData out{cut, svd(m).singular_values, 0};
  out.rank = numerical_rank(out.coefficients, threshold, 1e-300);
  return out;
}

inline SchmidtData schmidt(const PureState& psi, const Cut& cut, double threshold = 1e-10) {
  return schmidt(psi.amplitudes, psi.dims, cut, threshold);
}

/// Every single-party cut {p} | rest; for two parties only {0} | {1}.
inline std::vector<Cut> single_party_cuts(std::size_t parties) {
  std::vector<Cut> cuts;
  const std::size_t n = parties == 2 ? 1 : parties;
  for (std::size_t p = 0; p < n; ++p) cuts.push_back({p});
  return cuts;
}

/// Schmidt rank across each single-party cut. For three parties this is the
/// GHZ-level tuple (A|BC, B|AC, C|AB).
inline std::vector<std::size_t> cut_ranks(std::span<const Complex> amps, const Dims& dims,
                                          double threshold = 1e-10) {
  std::vector<std::size_t> out;
  for (const auto& cut : single_party_cuts(dims.size()))
    out.push_back(schmidt(amps, dims, cut, threshold).rank);
  return out;
}

/// Rank of the operator realigned across the cut; 1 for product operators.
inline std::size_t operator_schmidt_rank(const ComplexMatrix& op, const Dims& dims, const Cut& cut,
                                         double threshold = 1e-10) {
  const std::size_t n = product(dims);
  if (!op.square() || op.rows() != n)
    throw DimensionError("operator_schmidt_rank: operator does not match dims");
  detail::validate_cut(cut, dims.size());
  // vec(op) lives on dims (x) dims; realign as (cut side in and out) x (rest).
  Dims doubled(dims);
  doubled.insert(doubled.end(), dims.begin(), dims.end());
  Cut doubled_cut;
  for (auto p : cut) {
    doubled_cut.push_back(p);
    doubled_cut.push_back(p + dims.size());
  }
  const auto realigned = detail::reshape_across(op.entries(), doubled, doubled_cut);
  return numerical_rank(svd(realigned).singular_values, threshold, 1e-300);
}

struct PencilResult {
  std::size_t min_rank = 0;
  Complex x = 1.0;
  Complex y = 0.0;
};

namespace detail {

inline std::size_t pencil_rank(const ComplexMatrix& m1, const ComplexMatrix& m2, double s1, double s2,
                               Complex x, Complex y, double threshold) {
  ComplexMatrix m = m1 * x + m2 * y;
  const double scale = std::abs(x) * s1 + std::abs(y) * s2;
  return numerical_rank(svd(m).singular_values, threshold, threshold * scale);
}

}  // namespace detail

/// Minimum Schmidt rank of x psi1 + y psi2 across `cut`, sampled over a
/// 64-point grid of ratios y/x on the unit circle, the two axis points,
/// `samples` seeded random complex ratios (each with its inverse), and, when
/// the reshaped matrices are 2x2, the exact roots of det(x M1 + y M2).
inline PencilResult pencil_min_rank(const PureState& psi1, const PureState& psi2, const Cut& cut,
                                    std::size_t samples, std::uint64_t seed,
                                    double threshold = 1e-10) {
  if (psi1.dims != psi2.dims) throw DimensionError("pencil_min_rank: dims differ");
  if (samples < 1) throw std::invalid_argument("pencil_min_rank: need at least one sample");
  const auto m1 = detail::reshape_across(psi1.amplitudes, psi1.dims, cut);
  const auto m2 = detail::reshape_across(psi2.amplitudes, psi2.dims, cut);
  const double s1 = svd(m1).singular_values.front();
  const double s2 = svd(m2).singular_values.front();

  PencilResult best{std::min(m1.rows(), m1.cols()) + 1, 1.0, 0.0};
  auto consider = [&](Complex x, Complex y) {
    const auto r = detail::pencil_rank(m1, m2, s1, s2, x, y, threshold);
    if (r < best.min_rank) best = {r, x, y};
  };

  consider(1.0, 0.0);
  consider(0.0, 1.0);
  constexpr int kGrid = 64;
  for (int k = 0; k < kGrid; ++k)
    consider(1.0, std::polar(1.0, 2.0 * std::numbers::pi * k / kGrid));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (std::size_t i = 0; i < samples; ++i) {
    Complex t(gauss(rng), gauss(rng));
    if (std::abs(t) == 0.0) continue;
    consider(1.0, t);
    consider(t, 1.0);
  }

  if (m1.rows() == 2 && m1.cols() == 2) {
    // det(x M1 + y M2) = a x^2 + b x y + c y^2.
    auto det = [](const ComplexMatrix& m) { return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0); };
    const Complex a = det(m1), c = det(m2), b = det(m1 + m2) - a - c;
    if (std::abs(c) > 0.0) {
      // roots t = y/x of c t^2 + b t + a = 0
      const Complex disc = std::sqrt(b * b - 4.0 * a * c);
      consider(1.0, (-b + disc) / (2.0 * c));
      consider(1.0, (-b - disc) / (2.0 * c));
    } else if (std::abs(b) > 0.0) {
      consider(1.0, -a / b);
      consider(0.0, 1.0);
    } else {
      consider(0.0, 1.0);
    }
    if (std::abs(a) == 0.0) consider(1.0, 0.0);
  }
  return best;
}

enum class BoundKind { BipartiteSep, BipartiteLocc, TripartiteSep, TripartiteLocc, NpartiteSep };

struct BoundQuery {
  BoundKind kind;
  Dims dims;
  std::size_t d;
};

inline constexpr std::string_view bound_kind_name(BoundKind k) {
  switch (k) {
    case BoundKind::BipartiteSep: return "bipartite-sep";
    case BoundKind::BipartiteLocc: return "bipartite-locc";
    case BoundKind::TripartiteSep: return "tripartite-sep";
    case BoundKind::TripartiteLocc: return "tripartite-locc";
    case BoundKind::NpartiteSep: return "npartite-sep";
  }
  return "?";
}

inline std::optional<BoundKind> parse_bound_kind(std::string_view s) {
  for (auto k : {BoundKind::BipartiteSep, BoundKind::BipartiteLocc, BoundKind::TripartiteSep,
                 BoundKind::TripartiteLocc, BoundKind::NpartiteSep})
    if (bound_kind_name(k) == s) return k;
  return std::nullopt;
}

/// Whether the dimension condition for deterministic distillation of a
/// level-d target holds.
inline bool bound_check(const BoundQuery& q) {
  if (q.d < 2) throw std::invalid_argument("bound_check: d must be at least 2");
  if (q.dims.empty() || std::find(q.dims.begin(), q.dims.end(), 0u) != q.dims.end())
    throw std::invalid_argument("bound_check: dims must be positive");
  auto need = [&](std::size_t n) {
    if (q.dims.size() != n)
      throw std::invalid_argument("bound_check: " + std::string(bound_kind_name(q.kind)) + " needs " +
                                  std::to_string(n) + " dims");
  };
  const std::size_t sum = std::accumulate(q.dims.begin(), q.dims.end(), std::size_t{0});
  const std::size_t lo = *std::min_element(q.dims.begin(), q.dims.end());
  const std::size_t hi = *std::max_element(q.dims.begin(), q.dims.end());
  const bool min_ok = lo >= q.d;
  switch (q.kind) {
    case BoundKind::BipartiteSep: need(2); return min_ok && sum >= 3 * q.d;
    case BoundKind::BipartiteLocc: need(2); return min_ok && hi >= 2 * q.d;
    case BoundKind::TripartiteSep: need(3); return min_ok && sum >= 4 * q.d;
    case BoundKind::TripartiteLocc: need(3); return min_ok && hi >= 2 * q.d;
    case BoundKind::NpartiteSep:
      if (q.dims.size() < 2) throw std::invalid_argument("bound_check: need at least two dims");
      return min_ok && sum >= (q.dims.size() + 1) * q.d;
  }
  return false;
}

}  // namespace sepdistill
