#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sepdistill/numlin.hpp"
#include "sepdistill/states.hpp"

namespace sepdistill {

/// What happens after one outcome of a round: optional local unitary
/// corrections, then either a follow-up round or a leaf.
struct OutcomeAction {
  std::vector<std::pair<std::size_t, ComplexMatrix>> corrections;  // (party, unitary)
  std::optional<std::size_t> next;                                 // index into rounds
};

/// One party measures with a local instrument and broadcasts the outcome.
struct ProtocolRound {
  std::size_t party = 0;
  std::vector<ComplexMatrix> measurement;
  std::vector<OutcomeAction> outcomes;  // one per measurement operator
};

/// Finite LOCC protocol tree. rounds[0] is the root; every other round is
/// reached from exactly one outcome of an earlier round.
struct ProtocolProgram {
  Dims dims;
  std::vector<ProtocolRound> rounds;
  std::vector<std::size_t> trace_out;  // parties discarded at every leaf
  PureState target;                    // on the kept parties

  Dims kept_dims() const {
    Dims out;
    for (std::size_t p = 0; p < dims.size(); ++p)
      if (std::find(trace_out.begin(), trace_out.end(), p) == trace_out.end())
        out.push_back(dims[p]);
    return out;
  }

  /// Rounds along the longest root-to-leaf path.
  std::size_t depth() const {
    auto walk = [&](auto&& self, std::size_t r) -> std::size_t {
      std::size_t best = 0;
      for (const auto& o : rounds[r].outcomes)
        if (o.next) best = std::max(best, self(self, *o.next));
      return best + 1;
    };
    return rounds.empty() ? 0 : walk(walk, 0);
  }
};

class ProtocolError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Checks tree shape, operator shapes, unitarity of corrections and that
/// each round's local instrument is complete (sum K^dagger K = I).
inline void validate_program(const ProtocolProgram& prog, const NumericPolicy& policy = {}) {
  if (prog.rounds.empty()) throw ProtocolError("protocol has no rounds");
  std::vector<int> referenced(prog.rounds.size(), 0);
  for (std::size_t r = 0; r < prog.rounds.size(); ++r) {
    const auto& round = prog.rounds[r];
    const std::string where = "round " + std::to_string(r) + ": ";
    if (round.party >= prog.dims.size()) throw ProtocolError(where + "party out of range");
    const std::size_t n = prog.dims[round.party];
    if (round.measurement.empty()) throw ProtocolError(where + "empty measurement");
    if (round.outcomes.size() != round.measurement.size())
      throw ProtocolError(where + "one outcome action per measurement operator required");
    ComplexMatrix effect(n, n);
    for (const auto& k : round.measurement) {
      if (k.rows() != n || k.cols() != n)
        throw ProtocolError(where + "measurement operator has wrong shape");
      effect += k.adjoint() * k;
    }
    if ((effect - ComplexMatrix::identity(n)).max_abs() > policy.tolerance)
      throw ProtocolError(where + "local instrument is not complete");
    for (const auto& o : round.outcomes) {
      for (const auto& [party, u] : o.corrections) {
        if (party >= prog.dims.size()) throw ProtocolError(where + "correction party out of range");
        const std::size_t m = prog.dims[party];
        if (u.rows() != m || u.cols() != m)
          throw ProtocolError(where + "correction has wrong shape");
        if ((u.adjoint() * u - ComplexMatrix::identity(m)).max_abs() > policy.tolerance)
          throw ProtocolError(where + "correction is not unitary");
      }
      if (o.next) {
        if (*o.next <= r || *o.next >= prog.rounds.size())
          throw ProtocolError(where + "follow-up round must come later in the list");
        ++referenced[*o.next];
      }
    }
  }
  for (std::size_t r = 1; r < prog.rounds.size(); ++r)
    if (referenced[r] != 1) throw ProtocolError("round " + std::to_string(r) + " is not a tree node");
  for (auto p : prog.trace_out)
    if (p >= prog.dims.size()) throw ProtocolError("trace-out party out of range");
  if (prog.target.dims != prog.kept_dims())
    throw ProtocolError("target dims do not match the kept parties");
}

}  // namespace sepdistill
