#pragma once

// Instrument application, completeness classification and distillation
// reports.

#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "sepdistill/analysis.hpp"
#include "sepdistill/instruments.hpp"
#include "sepdistill/locc.hpp"
#include "sepdistill/states.hpp"

namespace sepdistill {

struct OutcomeRecord {
  std::vector<std::size_t> label;  // {k} for instruments, outcome path for protocols
  double probability = 0.0;
  std::optional<DensityMatrix> post_state;  // absent below the probability floor
};

enum class Completeness { Complete, Subnormalized, Invalid };

inline constexpr std::string_view completeness_name(Completeness c) {
  switch (c) {
    case Completeness::Complete: return "COMPLETE";
    case Completeness::Subnormalized: return "SUBNORMALIZED";
    case Completeness::Invalid: return "INVALID";
  }
  return "?";
}

struct CompletenessReport {
  Completeness verdict = Completeness::Complete;
  std::vector<double> deficiency_spectrum;  // eigenvalues of I - sum E^dagger E, descending
  double deficiency_max_abs = 0.0;          // |D|_max
  double max_overshoot = 0.0;               // max(0, largest eigenvalue of sum E^dagger E - 1)
};

enum class DistillationVerdict { Deterministic, Conditional, Failed };

inline constexpr std::string_view distillation_verdict_name(DistillationVerdict v) {
  switch (v) {
    case DistillationVerdict::Deterministic: return "DETERMINISTIC";
    case DistillationVerdict::Conditional: return "CONDITIONAL";
    case DistillationVerdict::Failed: return "FAILED";
  }
  return "?";
}

struct DistillationReport {
  std::vector<OutcomeRecord> outcomes;
  double transferred_probability = 0.0;
  std::vector<std::optional<double>> fidelities;          // absent for unrealized outcomes
  std::vector<std::vector<std::size_t>> schmidt_ranks;    // single-party cut ranks of the dominant eigenvector
  DistillationVerdict verdict = DistillationVerdict::Failed;

  double min_fidelity() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& f : fidelities)
      if (f) m = std::min(m, *f);
    return m;
  }
};

inline ComplexMatrix conjugate_product(const ComplexMatrix& rho, const ProductKraus& k, const Dims& dims) {
  ComplexMatrix out = rho;
  for (std::size_t p = 0; p < k.locals.size(); ++p) out = conjugate_local(out, k.locals[p], p, dims);
  return out;
}

inline std::vector<OutcomeRecord> apply_instrument(const DensityMatrix& rho, const Instrument& inst,
                                                   const NumericPolicy& policy = {}) {
  inst.validate();
  if (rho.dims() != inst.dims) throw DimensionError("apply_instrument: dims mismatch");
  std::vector<OutcomeRecord> out;
  for (std::size_t k = 0; k < inst.kraus.size(); ++k) {
    ComplexMatrix image = conjugate_product(rho.matrix(), inst.kraus[k], inst.dims);
    OutcomeRecord rec{{k}, image.trace().real(), std::nullopt};
    if (rec.probability >= policy.probability_floor) {
      image = detail::hermitian_part(image) * Complex(1.0 / rec.probability);
      rec.post_state.emplace(std::move(image), inst.dims, policy);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

inline CompletenessReport completeness_report(const Instrument& inst, const NumericPolicy& policy = {}) {
  const ComplexMatrix effect = inst.effect_sum(policy);
  const ComplexMatrix deficiency = ComplexMatrix::identity(effect.rows()) - effect;
  CompletenessReport r;
  r.deficiency_spectrum = hermitian_eig(deficiency, policy).eigenvalues;
  r.deficiency_max_abs = deficiency.max_abs();
  r.max_overshoot = std::max(0.0, -r.deficiency_spectrum.back());
  if (r.deficiency_spectrum.back() < -policy.tolerance) {
    r.verdict = Completeness::Invalid;
  } else if (r.deficiency_max_abs <= policy.tolerance) {
    r.verdict = Completeness::Complete;
  } else {
    r.verdict = Completeness::Subnormalized;
  }
  return r;
}

inline double fidelity(const DensityMatrix& rho, const PureState& target) {
  if (rho.dims() != target.dims) throw DimensionError("fidelity: dims mismatch");
  return inner(target.amplitudes, rho.matrix() * std::span<const Complex>(target.amplitudes)).real();
}

namespace detail {

inline DistillationReport summarize(std::vector<OutcomeRecord> outcomes, const PureState& target,
                                    const NumericPolicy& policy) {
  DistillationReport rep;
  rep.outcomes = std::move(outcomes);
  bool all_faithful = true;
  for (const auto& rec : rep.outcomes) {
    rep.transferred_probability += rec.probability;
    if (!rec.post_state) {
      rep.fidelities.push_back(std::nullopt);
      rep.schmidt_ranks.push_back({});
      continue;
    }
    const double f = fidelity(*rec.post_state, target);
    rep.fidelities.push_back(f);
    all_faithful = all_faithful && f >= 1.0 - policy.tolerance;
    const auto spec = hermitian_eig(rec.post_state->matrix(), policy);
    const Vector lead = spec.eigenvectors.column(0);
    rep.schmidt_ranks.push_back(rec.post_state->dims().size() >= 2
                                    ? cut_ranks(lead, rec.post_state->dims(), policy.tolerance)
                                    : std::vector<std::size_t>{});
  }
  const bool realized_any = std::any_of(rep.fidelities.begin(), rep.fidelities.end(),
                                        [](const auto& f) { return f.has_value(); });
  if (!all_faithful || !realized_any) {
    rep.verdict = DistillationVerdict::Failed;
  } else if (std::abs(rep.transferred_probability - 1.0) <= policy.tolerance) {
    rep.verdict = DistillationVerdict::Deterministic;
  } else if (rep.transferred_probability < 1.0) {
    rep.verdict = DistillationVerdict::Conditional;
  } else {
    rep.verdict = DistillationVerdict::Failed;
  }
  return rep;
}

}  // namespace detail

inline DistillationReport distillation_report(const DensityMatrix& rho, const Instrument& inst,
                                              const PureState& target, const NumericPolicy& policy = {}) {
  if (target.dims != rho.dims()) throw DimensionError("distillation_report: target dims mismatch");
  return detail::summarize(apply_instrument(rho, inst, policy), target, policy);
}

inline DistillationReport distillation_report(const DensityMatrix& rho, const ProtocolProgram& prog,
                                              const NumericPolicy& policy = {}) {
  std::vector<OutcomeRecord> records;
  for (auto& leaf : simulate_protocol(rho, prog, policy))
    records.push_back({std::move(leaf.label), leaf.probability, std::move(leaf.final_state)});
  return detail::summarize(std::move(records), prog.target, policy);
}

}  // namespace sepdistill
