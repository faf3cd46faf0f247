#pragma once

// Branch-tree execution of finite LOCC protocol programs, and the check that
// every branch either keeps or annihilates both eigenstates of a rank-two
// mixture together.

#include <optional>
#include <string_view>
#include <vector>

#include "sepdistill/analysis.hpp"
#include "sepdistill/instruments.hpp"
#include "sepdistill/protocol.hpp"
#include "sepdistill/states.hpp"

namespace sepdistill {

struct BranchLeaf {
  std::vector<std::size_t> label;  // outcome index per round along the branch
  ProductKraus op;                 // accumulated operator, identities elsewhere
  double probability = 0.0;
  std::optional<DensityMatrix> final_state;  // on the kept parties
};

/// K rho K^dagger for K acting on one party.
inline ComplexMatrix conjugate_local(const ComplexMatrix& rho, const ComplexMatrix& op,
                                     std::size_t party, const Dims& dims) {
  const std::size_t n = rho.rows();
  ComplexMatrix x(n, n);  // op * rho
  for (std::size_t c = 0; c < n; ++c) {
    const auto col = apply_local(op, party, dims, rho.column(c));
    for (std::size_t r = 0; r < n; ++r) x(r, c) = col[r];
  }
  const ComplexMatrix xa = x.adjoint();
  ComplexMatrix z(n, n);  // op * (op * rho)^dagger = op rho^dagger op^dagger
  for (std::size_t c = 0; c < n; ++c) {
    const auto col = apply_local(op, party, dims, xa.column(c));
    for (std::size_t r = 0; r < n; ++r) z(r, c) = col[r];
  }
  return z.adjoint();
}

namespace detail {

inline ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  return (m + m.adjoint()) * Complex(0.5);
}

struct Walker {
  const ProtocolProgram& prog;
  const NumericPolicy& policy;
  std::vector<BranchLeaf> leaves;
  std::vector<std::size_t> keep;

  void visit(std::size_t r, const ComplexMatrix& rho, const ProductKraus& acc,
             std::vector<std::size_t>& label) {
    const auto& round = prog.rounds[r];
    for (std::size_t j = 0; j < round.measurement.size(); ++j) {
      label.push_back(j);
      ComplexMatrix next = conjugate_local(rho, round.measurement[j], round.party, prog.dims);
      ProductKraus op = acc;
      op.locals[round.party] = round.measurement[j] * op.locals[round.party];
      for (const auto& [party, u] : round.outcomes[j].corrections) {
        next = conjugate_local(next, u, party, prog.dims);
        op.locals[party] = u * op.locals[party];
      }
      if (round.outcomes[j].next) {
        visit(*round.outcomes[j].next, next, op, label);
      } else {
        leaf(std::move(next), std::move(op), label);
      }
      label.pop_back();
    }
  }

  void leaf(ComplexMatrix rho, ProductKraus op, const std::vector<std::size_t>& label) {
    BranchLeaf out{label, std::move(op), rho.trace().real(), std::nullopt};
    if (out.probability >= policy.probability_floor) {
      ComplexMatrix reduced = prog.trace_out.empty() ? std::move(rho)
                                                      : partial_trace(rho, prog.dims, keep);
      reduced = hermitian_part(reduced) * Complex(1.0 / out.probability);
      out.final_state.emplace(std::move(reduced), prog.kept_dims(), policy);
    }
    leaves.push_back(std::move(out));
  }
};

}  // namespace detail

/// Leaves in depth-first outcome order.
inline std::vector<BranchLeaf> simulate_protocol(const DensityMatrix& rho, const ProtocolProgram& prog,
                                                 const NumericPolicy& policy = {}) {
  validate_program(prog, policy);
  if (rho.dims() != prog.dims) throw DimensionError("simulate_protocol: dims mismatch");
  detail::Walker w{prog, policy, {}, {}};
  for (std::size_t p = 0; p < prog.dims.size(); ++p)
    if (std::find(prog.trace_out.begin(), prog.trace_out.end(), p) == prog.trace_out.end())
      w.keep.push_back(p);
  ProductKraus identity;
  for (auto n : prog.dims) identity.locals.push_back(ComplexMatrix::identity(n));
  std::vector<std::size_t> label;
  w.visit(0, rho.matrix(), identity, label);
  return std::move(w.leaves);
}

enum class SurvivalVerdict { Holds, BoundaryCase, NotApplicable };

inline constexpr std::string_view survival_verdict_name(SurvivalVerdict v) {
  switch (v) {
    case SurvivalVerdict::Holds: return "HOLDS";
    case SurvivalVerdict::BoundaryCase: return "BOUNDARY_CASE";
    case SurvivalVerdict::NotApplicable: return "NOT_APPLICABLE";
  }
  return "?";
}

struct BranchCheck {
  std::vector<std::size_t> label;  // branch prefix
  double norm1 = 0.0;              // |O psi1| / |psi1|
  double norm2 = 0.0;
  bool survives1 = false;
  bool survives2 = false;
  bool holds() const { return survives1 == survives2; }
};

struct SurvivalReport {
  SurvivalVerdict verdict = SurvivalVerdict::Holds;
  std::vector<BranchCheck> branches;
  std::string premise_failure;  // set when NOT_APPLICABLE
};

/// Entanglement level the target carries across `party` | rest: 1 for
/// discarded parties, otherwise the target's Schmidt rank across that cut.
inline std::size_t target_level(const ProtocolProgram& prog, std::size_t party) {
  const auto it = std::find(prog.trace_out.begin(), prog.trace_out.end(), party);
  if (it != prog.trace_out.end()) return 1;
  std::size_t kept_index = 0;
  for (std::size_t p = 0; p < party; ++p)
    if (std::find(prog.trace_out.begin(), prog.trace_out.end(), p) == prog.trace_out.end()) ++kept_index;
  if (prog.target.dims.size() < 2) return 1;
  return schmidt(prog.target, {kept_index}).rank;
}

/// For every branch prefix O: |O psi1| > eps iff |O psi2| > eps. The premise
/// is that each local operator has rank at least min(d, level the target
/// carries across the acting party's cut); otherwise NOT_APPLICABLE.
inline SurvivalReport branch_survival_check(const ProtocolProgram& prog, const PureState& psi1,
                                            const PureState& psi2, std::size_t d,
                                            const NumericPolicy& policy = {}) {
  validate_program(prog, policy);
  if (psi1.dims != prog.dims || psi2.dims != prog.dims)
    throw DimensionError("branch_survival_check: state dims do not match the program");
  SurvivalReport report;

  for (std::size_t r = 0; r < prog.rounds.size(); ++r) {
    const auto& round = prog.rounds[r];
    const std::size_t need = std::min(d, target_level(prog, round.party));
    for (std::size_t j = 0; j < round.measurement.size(); ++j) {
      const auto rank = matrix_rank(round.measurement[j], policy);
      if (rank < need) {
        report.verdict = SurvivalVerdict::NotApplicable;
        report.premise_failure = "round " + std::to_string(r) + " operator " + std::to_string(j) +
                                 " has rank " + std::to_string(rank) + " < " + std::to_string(need);
        return report;
      }
    }
  }

  const double n1 = norm(psi1.amplitudes), n2 = norm(psi2.amplitudes);
  auto walk = [&](auto&& self, std::size_t r, const Vector& v1, const Vector& v2,
                  std::vector<std::size_t>& label) -> void {
    const auto& round = prog.rounds[r];
    for (std::size_t j = 0; j < round.measurement.size(); ++j) {
      label.push_back(j);
      Vector w1 = apply_local(round.measurement[j], round.party, prog.dims, v1);
      Vector w2 = apply_local(round.measurement[j], round.party, prog.dims, v2);
      for (const auto& [party, u] : round.outcomes[j].corrections) {
        w1 = apply_local(u, party, prog.dims, w1);
        w2 = apply_local(u, party, prog.dims, w2);
      }
      BranchCheck check{label, norm(w1) / n1, norm(w2) / n2};
      check.survives1 = check.norm1 > policy.tolerance;
      check.survives2 = check.norm2 > policy.tolerance;
      report.branches.push_back(check);
      if (round.outcomes[j].next) self(self, *round.outcomes[j].next, w1, w2, label);
      label.pop_back();
    }
  };
  std::vector<std::size_t> label;
  walk(walk, 0, psi1.amplitudes, psi2.amplitudes, label);

  const bool all = std::all_of(report.branches.begin(), report.branches.end(),
                               [](const BranchCheck& b) { return b.holds(); });
  report.verdict = all ? SurvivalVerdict::Holds : SurvivalVerdict::BoundaryCase;
  return report;
}

}  // namespace sepdistill
