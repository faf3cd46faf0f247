#pragma once

// JSON documents for states, instruments, protocol programs and reports.
// Complex numbers are [re, im]; matrices are arrays of rows.

#include <cmath>
#include <cstdio>
#include <string>

#include <json.hpp>

#include "sepdistill/analysis.hpp"
#include "sepdistill/channel.hpp"
#include "sepdistill/instruments.hpp"
#include "sepdistill/locc.hpp"
#include "sepdistill/protocol.hpp"
#include "sepdistill/search.hpp"
#include "sepdistill/states.hpp"

namespace sepdistill {

using json = nlohmann::ordered_json;

inline json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("complex must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json vector_to_json(std::span<const Complex> v) {
  json out = json::array();
  for (const auto& z : v) out.push_back(complex_to_json(z));
  return out;
}

inline json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline ComplexMatrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("matrix must be a nonempty array of rows");
  const std::size_t rows = j.size(), cols = j[0].size();
  ComplexMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (j[r].size() != cols) throw std::invalid_argument("matrix rows differ in length");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = complex_from_json(j[r][c]);
  }
  return m;
}

inline json to_json(const PureState& s) {
  return {{"dims", s.dims}, {"amplitudes", vector_to_json(s.amplitudes)}};
}

inline PureState state_from_json(const json& j) {
  Vector amps;
  for (const auto& z : j.at("amplitudes")) amps.push_back(complex_from_json(z));
  return PureState::make(std::move(amps), j.at("dims").get<Dims>());
}

inline json to_json(const DensityMatrix& rho) {
  return {{"dims", rho.dims()}, {"matrix", matrix_to_json(rho.matrix())}};
}

inline json to_json(const Instrument& inst) {
  json kraus = json::array();
  for (const auto& k : inst.kraus) {
    json locals = json::array();
    for (const auto& m : k.locals) locals.push_back(matrix_to_json(m));
    kraus.push_back(std::move(locals));
  }
  return {{"dims", inst.dims}, {"kraus", std::move(kraus)}};
}

inline Instrument instrument_from_json(const json& j) {
  Instrument inst{{}, j.at("dims").get<Dims>()};
  for (const auto& locals : j.at("kraus")) {
    ProductKraus k;
    for (const auto& m : locals) k.locals.push_back(matrix_from_json(m));
    inst.kraus.push_back(std::move(k));
  }
  inst.validate();
  return inst;
}

inline json to_json(const ProtocolProgram& prog) {
  json rounds = json::array();
  for (const auto& r : prog.rounds) {
    json ops = json::array(), outcomes = json::array();
    for (const auto& m : r.measurement) ops.push_back(matrix_to_json(m));
    for (const auto& o : r.outcomes) {
      json corr = json::array();
      for (const auto& [party, u] : o.corrections)
        corr.push_back({{"party", party}, {"unitary", matrix_to_json(u)}});
      outcomes.push_back({{"corrections", std::move(corr)},
                          {"next", o.next ? json(*o.next) : json(nullptr)}});
    }
    rounds.push_back({{"party", r.party}, {"measurement", std::move(ops)}, {"outcomes", std::move(outcomes)}});
  }
  return {{"dims", prog.dims},
          {"rounds", std::move(rounds)},
          {"trace_out", prog.trace_out},
          {"target", to_json(prog.target)}};
}

inline ProtocolProgram program_from_json(const json& j) {
  ProtocolProgram prog;
  prog.dims = j.at("dims").get<Dims>();
  for (const auto& r : j.at("rounds")) {
    ProtocolRound round{r.at("party").get<std::size_t>(), {}, {}};
    for (const auto& m : r.at("measurement")) round.measurement.push_back(matrix_from_json(m));
    for (const auto& o : r.at("outcomes")) {
      OutcomeAction action;
      if (o.contains("corrections"))
        for (const auto& c : o.at("corrections"))
          action.corrections.emplace_back(c.at("party").get<std::size_t>(), matrix_from_json(c.at("unitary")));
      if (o.contains("next") && !o.at("next").is_null()) action.next = o.at("next").get<std::size_t>();
      round.outcomes.push_back(std::move(action));
    }
    prog.rounds.push_back(std::move(round));
  }
  if (j.contains("trace_out")) prog.trace_out = j.at("trace_out").get<std::vector<std::size_t>>();
  prog.target = state_from_json(j.at("target"));
  validate_program(prog);
  return prog;
}

inline json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline json to_json(const CompletenessReport& r) {
  return {{"verdict", completeness_name(r.verdict)},
          {"deficiency_spectrum", r.deficiency_spectrum},
          {"deficiency_max_abs", r.deficiency_max_abs},
          {"max_overshoot", r.max_overshoot}};
}

inline json to_json(const DistillationReport& r) {
  json outcomes = json::array();
  for (std::size_t i = 0; i < r.outcomes.size(); ++i) {
    outcomes.push_back({{"label", r.outcomes[i].label},
                        {"probability", r.outcomes[i].probability},
                        {"realized", r.outcomes[i].post_state.has_value()},
                        {"fidelity", optional_number(r.fidelities[i])},
                        {"schmidt_ranks", r.schmidt_ranks[i]}});
  }
  const double mf = r.min_fidelity();
  return {{"verdict", distillation_verdict_name(r.verdict)},
          {"transferred_probability", r.transferred_probability},
          {"min_fidelity", std::isfinite(mf) ? json(mf) : json(nullptr)},
          {"outcomes", std::move(outcomes)}};
}

inline json to_json(const SurvivalReport& r) {
  json branches = json::array();
  for (const auto& b : r.branches)
    branches.push_back({{"label", b.label},
                        {"norm_psi1", b.norm1},
                        {"norm_psi2", b.norm2},
                        {"survives_psi1", b.survives1},
                        {"survives_psi2", b.survives2},
                        {"holds", b.holds()}});
  json out = {{"verdict", survival_verdict_name(r.verdict)}, {"branches", std::move(branches)}};
  if (!r.premise_failure.empty()) out["premise_failure"] = r.premise_failure;
  return out;
}

inline json to_json(const std::vector<BranchLeaf>& leaves) {
  json out = json::array();
  for (const auto& l : leaves) {
    json ops = json::array();
    for (const auto& m : l.op.locals) ops.push_back(matrix_to_json(m));
    out.push_back({{"label", l.label},
                   {"probability", l.probability},
                   {"operator", std::move(ops)},
                   {"final_state", l.final_state ? to_json(*l.final_state) : json(nullptr)}});
  }
  return out;
}

inline json to_json(const PencilResult& p) {
  return {{"min_rank", p.min_rank}, {"x", complex_to_json(p.x)}, {"y", complex_to_json(p.y)}};
}

inline json to_json(const SearchConfig& c) {
  return {{"kraus_count", c.kraus_count},
          {"restarts", c.restarts},
          {"max_iterations", c.max_iterations},
          {"seed", c.seed},
          {"lambda_completeness", c.weights.completeness},
          {"lambda_determinism", c.weights.determinism},
          {"tolerance", c.tolerance},
          {"initial_step", c.initial_step},
          {"trace_stride", c.trace_stride}};
}

inline SearchConfig search_config_from_json(const json& j, SearchConfig c = {}) {
  if (j.contains("kraus_count")) c.kraus_count = j.at("kraus_count").get<std::size_t>();
  if (j.contains("restarts")) c.restarts = j.at("restarts").get<std::size_t>();
  if (j.contains("max_iterations")) c.max_iterations = j.at("max_iterations").get<std::size_t>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("lambda_completeness")) c.weights.completeness = j.at("lambda_completeness").get<double>();
  if (j.contains("lambda_determinism")) c.weights.determinism = j.at("lambda_determinism").get<double>();
  if (j.contains("tolerance")) c.tolerance = j.at("tolerance").get<double>();
  if (j.contains("initial_step")) c.initial_step = j.at("initial_step").get<double>();
  if (j.contains("trace_stride")) c.trace_stride = j.at("trace_stride").get<std::size_t>();
  c.validate();
  return c;
}

inline json to_json(const SearchResult& r) {
  json out = {{"verdict", search_verdict_name(r.verdict)},
              {"best_residual", r.best_residual},
              {"best_restart", r.best_restart},
              {"restart_residuals", r.restart_residuals},
              {"restart_traces", r.restart_traces},
              {"best_candidate", to_json(r.best_candidate)}};
  out["reverified_completeness"] =
      r.reverified_completeness ? json(completeness_name(*r.reverified_completeness)) : json(nullptr);
  out["reverified_distillation"] =
      r.reverified_distillation ? json(distillation_verdict_name(*r.reverified_distillation)) : json(nullptr);
  return out;
}

inline json to_json(const NumericPolicy& p) {
  return {{"tolerance", p.tolerance},
          {"state_tolerance", p.state_tolerance},
          {"probability_floor", p.probability_floor},
          {"max_dimension", p.max_dimension}};
}

namespace detail {

inline std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write(const json& j, std::string& out, int indent, int level) {
  const std::string pad(static_cast<std::size_t>(indent * (level + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * level), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) { out += "{}"; return; }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) { out += ","; out += nl; }
        first = false;
        out += pad + json(it.key()).dump() + (indent > 0 ? ": " : ":");
        write(it.value(), out, indent, level + 1);
      }
      out += nl + close + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) { out += "[]"; return; }
      // Arrays of scalars stay on one line.
      const bool flat = std::none_of(j.begin(), j.end(), [](const json& e) { return e.is_structured(); });
      out += "[";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",";
        if (!flat) out += nl + pad;
        first = false;
        write(e, out, flat ? 0 : indent, level + 1);
      }
      if (!flat) out += nl + close;
      out += "]";
      return;
    }
    case json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace detail

/// Serializes with every floating-point value at 17 significant digits.
inline std::string dump17(const json& j, int indent = 2) {
  std::string out;
  detail::write(j, out, indent, 0);
  return out;
}

}  // namespace sepdistill
