#pragma once

// Command-line front end. Every command writes one JSON document
//   {command, scenario, report, numeric_policy, seed}
// (or CSV for `sweep`) to the output stream.
//
// Exit codes: 0 ran and all asserted invariants held, 1 a verification
// verdict failed, 2 bad arguments.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sepdistill/analysis.hpp"
#include "sepdistill/channel.hpp"
#include "sepdistill/instruments.hpp"
#include "sepdistill/json_io.hpp"
#include "sepdistill/locc.hpp"
#include "sepdistill/search.hpp"
#include "sepdistill/states.hpp"

namespace sepdistill::cli {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Flags shared by the scenario-driven commands. Unset fields may be filled
/// from the --config file.
struct ScenarioSpec {
  std::optional<std::string> family;
  std::optional<std::size_t> d, k1, k2, k3;
  std::optional<double> w;
  std::optional<std::string> target;
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance;
  std::optional<double> probability_floor;
};

struct Scenario {
  Family family;
  DimsSpec spec;
  double w = 0.5;
  std::string target = "psi1";
  std::uint64_t seed = 1;
  NumericPolicy policy;
};

namespace detail {

template <typename T>
void fill(std::optional<T>& field, const json& config, const char* key) {
  if (!field && config.contains(key)) field = config.at(key).get<T>();
}

inline DimsSpec resolve_dims(Family f, const ScenarioSpec& s) {
  auto need_d = [&]() -> std::size_t {
    if (!s.d) throw UsageError(std::string(family_name(f)) + " requires --d");
    return *s.d;
  };
  switch (f) {
    case Family::Thm1Sep: {
      const std::size_t d = need_d();
      if (!s.k1) throw UsageError("thm1-sep requires --k1");
      if (*s.k1 > d) throw SpecError("thm1-sep: k1 exceeds d");
      return DimsSpec::from_offsets(d, {*s.k1, s.k2.value_or(d - *s.k1)});
    }
    case Family::Thm2I: {
      const std::size_t d = need_d();
      if (!s.k2) throw UsageError("thm2-i requires --k2");
      if (*s.k2 > d) throw SpecError("thm2-i: k2 exceeds d");
      return DimsSpec::from_offsets(d, {s.k1.value_or(0), *s.k2, s.k3.value_or(d - *s.k2)});
    }
    case Family::Thm2II: {
      const std::size_t d = need_d();
      if (!s.k1 || !s.k2) throw UsageError("thm2-ii requires --k1 and --k2");
      if (*s.k1 + *s.k2 > d) throw SpecError("thm2-ii: k1 + k2 exceeds d");
      return DimsSpec::from_offsets(d, {*s.k1, *s.k2, s.k3.value_or(d - *s.k1 - *s.k2)});
    }
    case Family::Thm1Locc:
    case Family::Thm2III:
      return canonical_spec(f, need_d());
    default:
      return canonical_spec(f, 2);
  }
}

inline Scenario resolve(ScenarioSpec s, const json& config) {
  fill(s.family, config, "family");
  fill(s.d, config, "d");
  fill(s.k1, config, "k1");
  fill(s.k2, config, "k2");
  fill(s.k3, config, "k3");
  fill(s.w, config, "w");
  fill(s.target, config, "target");
  fill(s.seed, config, "seed");
  fill(s.tolerance, config, "tolerance");
  fill(s.probability_floor, config, "probability_floor");
  if (!s.family) throw UsageError("--family is required");
  const auto f = parse_family(*s.family);
  if (!f) throw UsageError("unknown family: " + *s.family);
  Scenario out{*f, resolve_dims(*f, s), 0.5, "psi1", 1, {}};
  validate_spec(out.family, out.spec);
  out.w = s.w.value_or(0.5);
  if (!(out.w > 0.0 && out.w < 1.0)) throw UsageError("--w must lie in (0, 1)");
  out.target = s.target.value_or("psi1");
  if (out.target != "psi1" && out.target != "psi2") throw UsageError("--target must be psi1 or psi2");
  out.seed = s.seed.value_or(1);
  if (s.tolerance) out.policy.tolerance = *s.tolerance;
  if (s.probability_floor) out.policy.probability_floor = *s.probability_floor;
  return out;
}

inline json scenario_json(const Scenario& s) {
  return {{"family", family_name(s.family)},
          {"d", s.spec.d},
          {"dims", s.spec.dims},
          {"offsets", s.spec.offsets()},
          {"w", s.w},
          {"target", s.target}};
}

inline json envelope(const std::string& command, json scenario, json report, const NumericPolicy& policy,
                     std::uint64_t seed) {
  return {{"command", command},
          {"scenario", std::move(scenario)},
          {"report", std::move(report)},
          {"numeric_policy", to_json(policy)},
          {"seed", seed}};
}

inline bool has_instrument(Family f) { return f != Family::BellMix && f != Family::ThreeQubit; }
inline bool has_protocol(Family f) {
  return f == Family::ThreeQubit || f == Family::Thm1Locc || f == Family::Ex2x4 || f == Family::Thm2III;
}

inline PureState choose_target(const Scenario& s, const PureState& psi1, const PureState& psi2) {
  return s.target == "psi2" ? psi2 : psi1;
}

inline void add_scenario_flags(CLI::App* cmd, ScenarioSpec& s) {
  cmd->add_option("--family", s.family, "state family (thm1-sep, thm1-locc, ex-2x4, bell-mix, thm2-i, thm2-ii, thm2-iii, three-qubit)");
  cmd->add_option("--d", s.d, "target level");
  cmd->add_option("--k1", s.k1, "offset of party 1");
  cmd->add_option("--k2", s.k2, "offset of party 2");
  cmd->add_option("--k3", s.k3, "offset of party 3");
  cmd->add_option("--w", s.w, "mixing weight in (0, 1)");
  cmd->add_option("--target", s.target, "target state: psi1 (default) or psi2");
  cmd->add_option("--seed", s.seed, "random seed");
  cmd->add_option("--tol", s.tolerance, "numeric tolerance override");
  cmd->add_option("--probability-floor", s.probability_floor, "probability floor override");
}

struct SweepRow {
  std::string family;
  std::size_t d;
  std::vector<std::size_t> k;
  double w;
  std::string verdict;
  double transferred;
  double min_fidelity;
  bool filtering_ok;
  std::string completeness;
  bool schmidt_ok;
  bool ok;
};

inline std::vector<DimsSpec> family_grid(Family f, std::size_t d_min, std::size_t d_max) {
  std::vector<DimsSpec> out;
  for (std::size_t d = d_min; d <= d_max; ++d) {
    switch (f) {
      case Family::Thm1Sep:
        for (std::size_t k1 = 1; k1 < d; ++k1) out.push_back(DimsSpec::from_offsets(d, {k1, d - k1}));
        break;
      case Family::Thm2I:
        for (std::size_t k2 = 1; k2 < d; ++k2) out.push_back(DimsSpec::from_offsets(d, {0, k2, d - k2}));
        break;
      case Family::Thm2II:
        for (std::size_t k1 = 1; k1 < d; ++k1)
          for (std::size_t k2 = 1; k1 + k2 < d; ++k2)
            out.push_back(DimsSpec::from_offsets(d, {k1, k2, d - k1 - k2}));
        break;
      case Family::Thm1Locc:
      case Family::Thm2III:
        out.push_back(canonical_spec(f, d));
        break;
      default:
        if (d == d_min) out.push_back(canonical_spec(f, 2));
        break;
    }
  }
  return out;
}

}  // namespace detail

inline int execute_command(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Separable and LOCC distillation verification laboratory", "sepdistill"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  std::string config_path, format = "json";
  ScenarioSpec scen;

  auto* construct = app.add_subcommand("construct", "emit states, mixture and instrument for a scenario");
  auto* verify = app.add_subcommand("verify", "completeness and distillation reports");
  auto* protocol = app.add_subcommand("protocol", "LOCC branch-tree simulation and survival check");
  auto* pencil = app.add_subcommand("pencil", "minimum Schmidt rank over the two-state pencil");
  auto* bounds = app.add_subcommand("bounds", "dimension bound check");
  auto* search = app.add_subcommand("search", "numerical search for a deterministic separable instrument");
  auto* sweep = app.add_subcommand("sweep", "grid over d, splits and w");

  for (auto* cmd : {construct, verify, protocol, pencil, search}) detail::add_scenario_flags(cmd, scen);
  for (auto* cmd : {construct, verify, protocol, pencil, bounds, search, sweep}) {
    cmd->add_option("--config", config_path, "JSON file supplying defaults for unset flags");
    cmd->add_option("--format", format, "json (default) or csv")->check(CLI::IsMember({"json", "csv"}));
  }

  std::string program_path;
  protocol->add_option("--program", program_path, "protocol program JSON (replaces the family's program)");

  std::size_t samples = 1000;
  pencil->add_option("--samples", samples, "random pencil ratios in addition to the grid");

  std::string bound_kind;
  std::vector<std::size_t> bound_dims;
  std::optional<std::size_t> bound_d;
  std::uint64_t bound_seed = 0;
  bounds->add_option("--kind", bound_kind, "bipartite-sep, bipartite-locc, tripartite-sep, tripartite-locc, npartite-sep");
  bounds->add_option("--dims", bound_dims, "comma separated party dimensions")->delimiter(',');
  bounds->add_option("--d", bound_d, "target level");
  bounds->add_option("--seed", bound_seed, "recorded in the output only");

  SearchConfig search_cfg;
  std::optional<std::size_t> kraus_count, restarts, max_iter;
  std::optional<double> lambda_c, lambda_d, search_tol;
  std::string warm = "none";
  search->add_option("--T", kraus_count, "number of product Kraus operators");
  search->add_option("--restarts", restarts, "number of restarts");
  search->add_option("--max-iter", max_iter, "iteration cap per restart");
  search->add_option("--lambda-c", lambda_c, "completeness penalty weight");
  search->add_option("--lambda-d", lambda_d, "determinism penalty weight");
  search->add_option("--search-tol", search_tol, "residual threshold for FEASIBLE");
  search->add_option("--warm", warm, "warm start: none, lifted (one-round LOCC measurement), printed (family instrument)")
      ->check(CLI::IsMember({"none", "lifted", "printed"}));
  search->add_option("--threads", search_cfg.threads, "worker threads (0 = hardware)");

  std::string sweep_families = "thm1-sep,thm1-locc,ex-2x4,thm2-i,thm2-ii,thm2-iii,three-qubit";
  std::size_t d_min = 2, d_max = 4;
  std::vector<double> w_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  sweep->add_option("--families", sweep_families, "comma separated family list");
  sweep->add_option("--d-min", d_min, "smallest target level");
  sweep->add_option("--d-max", d_max, "largest target level");
  sweep->add_option("--w-grid", w_grid, "comma separated mixing weights")->delimiter(',');

  std::vector<std::string> args(argv.rbegin(), argv.rend());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }

  json config = json::object();
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw UsageError("cannot open config file " + config_path);
      config = json::parse(in);
      if (!config.is_object()) throw UsageError("config file must hold a JSON object");
    }
  } catch (const json::exception& e) {
    err << "error: bad config file: " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  const bool csv = format == "csv";
  auto emit = [&](const json& doc) { out << dump17(doc) << "\n"; };

  // Argument resolution: failures here are usage errors (exit 2).
  Scenario s;
  const bool scenario_command = !bounds->parsed() && !sweep->parsed();
  try {
    if (scenario_command) s = detail::resolve(scen, config);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (construct->parsed()) {
      const auto [psi1, psi2] = make_state_pair(s.family, s.spec);
      json report = {{"psi1", to_json(psi1)}, {"psi2", to_json(psi2)},
                     {"rho", to_json(mix_pair(psi1, psi2, s.w, s.policy))}};
      if (detail::has_instrument(s.family)) {
        report["instrument"] = to_json(make_instrument(s.family, s.spec));
        if (s.family == Family::Thm1Sep || s.family == Family::Thm2I || s.family == Family::Thm2II) {
          json tables = json::object();
          for (const auto& t : coefficient_tables(s.family, s.spec)) tables[t.name] = t.values;
          report["coefficients"] = std::move(tables);
        }
      }
      if (detail::has_protocol(s.family)) report["protocol"] = to_json(make_protocol(s.family, s.spec));
      if (csv) throw UsageError("construct supports only --format json");
      emit(detail::envelope("construct", detail::scenario_json(s), std::move(report), s.policy, s.seed));
      return 0;
    }

    if (verify->parsed()) {
      if (csv) throw UsageError("verify supports only --format json");
      const auto [psi1, psi2] = make_state_pair(s.family, s.spec);
      const auto rho = mix_pair(psi1, psi2, s.w, s.policy);
      json report = json::object();
      bool ok = true;
      if (s.family == Family::ThreeQubit) {
        const auto prog = make_protocol(s.family, s.spec);
        const auto dist = distillation_report(rho, prog, s.policy);
        report["protocol_rounds"] = prog.depth();
        report["distillation"] = to_json(dist);
        ok = dist.verdict != DistillationVerdict::Failed;
      } else if (detail::has_instrument(s.family)) {
        const auto inst = make_instrument(s.family, s.spec);
        const auto comp = completeness_report(inst, s.policy);
        const auto dist = distillation_report(rho, inst, detail::choose_target(s, psi1, psi2), s.policy);
        const auto filt = check_filtering(s.family, s.spec);
        report["completeness"] = to_json(comp);
        report["distillation"] = to_json(dist);
        report["filtering_max_error"] = filt.max();
        ok = comp.verdict != Completeness::Invalid && dist.verdict != DistillationVerdict::Failed;
      } else {
        throw UsageError(std::string(family_name(s.family)) + " has no instrument to verify; try `search`");
      }
      emit(detail::envelope("verify", detail::scenario_json(s), std::move(report), s.policy, s.seed));
      return ok ? 0 : 1;
    }

    if (protocol->parsed()) {
      if (csv) throw UsageError("protocol supports only --format json");
      const auto [psi1, psi2] = make_state_pair(s.family, s.spec);
      ProtocolProgram prog;
      if (!program_path.empty()) {
        std::ifstream in(program_path);
        if (!in) throw UsageError("cannot open program file " + program_path);
        prog = program_from_json(json::parse(in));
        if (prog.dims != s.spec.dims) throw UsageError("program dims do not match the scenario");
      } else if (detail::has_protocol(s.family)) {
        prog = make_protocol(s.family, s.spec);
      } else {
        throw UsageError(std::string(family_name(s.family)) + " has no LOCC protocol; pass --program");
      }
      const auto rho = mix_pair(psi1, psi2, s.w, s.policy);
      const auto leaves = simulate_protocol(rho, prog, s.policy);
      const auto dist = distillation_report(rho, prog, s.policy);
      const auto survival = branch_survival_check(prog, psi1, psi2, s.spec.d, s.policy);
      json report = {{"rounds", prog.depth()},
                     {"leaves", to_json(leaves)},
                     {"distillation", to_json(dist)},
                     {"survival", to_json(survival)}};
      emit(detail::envelope("protocol", detail::scenario_json(s), std::move(report), s.policy, s.seed));
      return dist.verdict == DistillationVerdict::Failed ? 1 : 0;
    }

    if (pencil->parsed()) {
      if (csv) throw UsageError("pencil supports only --format json");
      if (samples < 1) throw UsageError("--samples must be at least 1");
      const auto [psi1, psi2] = make_state_pair(s.family, s.spec);
      json cuts = json::array();
      for (const auto& cut : single_party_cuts(s.spec.parties())) {
        const auto res = pencil_min_rank(psi1, psi2, cut, samples, s.seed, s.policy.tolerance);
        json entry = to_json(res);
        entry["cut"] = cut;
        entry["psi1_rank"] = schmidt(psi1, cut, s.policy.tolerance).rank;
        entry["psi2_rank"] = schmidt(psi2, cut, s.policy.tolerance).rank;
        cuts.push_back(std::move(entry));
      }
      json report = {{"samples", samples}, {"cuts", std::move(cuts)}};
      emit(detail::envelope("pencil", detail::scenario_json(s), std::move(report), s.policy, s.seed));
      return 0;
    }

    if (bounds->parsed()) {
      if (csv) throw UsageError("bounds supports only --format json");
      if (bound_kind.empty() && config.contains("kind")) bound_kind = config.at("kind").get<std::string>();
      if (bound_dims.empty() && config.contains("dims")) bound_dims = config.at("dims").get<Dims>();
      if (!bound_d && config.contains("d")) bound_d = config.at("d").get<std::size_t>();
      const auto kind = parse_bound_kind(bound_kind);
      if (!kind) throw UsageError("--kind must be one of bipartite-sep, bipartite-locc, tripartite-sep, tripartite-locc, npartite-sep");
      if (bound_dims.empty() || !bound_d) throw UsageError("bounds requires --dims and --d");
      bool satisfied = false;
      try {
        satisfied = bound_check({*kind, bound_dims, *bound_d});
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      json scenario = {{"kind", bound_kind_name(*kind)}, {"dims", bound_dims}, {"d", *bound_d}};
      emit(detail::envelope("bounds", std::move(scenario), {{"satisfied", satisfied}}, NumericPolicy{}, bound_seed));
      return 0;
    }

    if (search->parsed()) {
      if (csv) throw UsageError("search supports only --format json");
      if (config.contains("search")) search_cfg = search_config_from_json(config.at("search"), search_cfg);
      if (kraus_count) search_cfg.kraus_count = *kraus_count;
      if (restarts) search_cfg.restarts = *restarts;
      if (max_iter) search_cfg.max_iterations = *max_iter;
      if (lambda_c) search_cfg.weights.completeness = *lambda_c;
      if (lambda_d) search_cfg.weights.determinism = *lambda_d;
      if (search_tol) search_cfg.tolerance = *search_tol;
      search_cfg.seed = s.seed;
      try {
        search_cfg.validate();
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      const auto [psi1, psi2] = make_state_pair(s.family, s.spec);
      const auto target = detail::choose_target(s, psi1, psi2);
      std::optional<Instrument> warm_start;
      if (warm == "lifted") {
        if (!detail::has_protocol(s.family) || s.family == Family::ThreeQubit)
          throw UsageError("--warm lifted needs a one-round LOCC family");
        warm_start = lift_single_round(make_protocol(s.family, s.spec));
      } else if (warm == "printed") {
        if (!detail::has_instrument(s.family)) throw UsageError("--warm printed needs a family with an instrument");
        warm_start = make_instrument(s.family, s.spec);
      }
      const auto res = sep_feasibility_search(psi1, psi2, target, search_cfg, warm_start);
      json report = {{"config", to_json(search_cfg)}, {"warm_start", warm}, {"result", to_json(res)}};
      emit(detail::envelope("search", detail::scenario_json(s), std::move(report), s.policy, s.seed));
      return 0;
    }

    if (sweep->parsed()) {
      if (d_min < 2 || d_max < d_min) throw UsageError("need 2 <= --d-min <= --d-max");
      for (double w : w_grid)
        if (!(w > 0.0 && w < 1.0)) throw UsageError("--w-grid values must lie in (0, 1)");
      std::vector<Family> families;
      std::stringstream list(sweep_families);
      for (std::string name; std::getline(list, name, ',');) {
        const auto f = parse_family(name);
        if (!f || *f == Family::BellMix) throw UsageError("sweep: unsupported family " + name);
        families.push_back(*f);
      }

      std::vector<detail::SweepRow> rows;
      for (auto f : families)
        for (const auto& spec : detail::family_grid(f, d_min, d_max)) {
          const auto [psi1, psi2] = make_state_pair(f, spec);
          bool schmidt_ok = true;
          for (const auto& cut : single_party_cuts(spec.parties()))
            schmidt_ok = schmidt_ok && schmidt(psi1, cut).rank == spec.d && schmidt(psi2, cut).rank == spec.d;
          bool filtering_ok = true;
          std::string completeness = "COMPLETE";
          std::optional<Instrument> inst;
          std::optional<ProtocolProgram> prog;
          if (f == Family::ThreeQubit) {
            prog = make_protocol(f, spec);
          } else {
            inst = make_instrument(f, spec);
            filtering_ok = check_filtering(f, spec).max() <= 1e-12;
            completeness = completeness_name(completeness_report(*inst).verdict);
          }
          for (double w : w_grid) {
            const auto rho = mix_pair(psi1, psi2, w);
            const auto dist = inst ? distillation_report(rho, *inst, psi1) : distillation_report(rho, *prog);
            detail::SweepRow row{std::string(family_name(f)), spec.d, spec.offsets(), w,
                                 std::string(distillation_verdict_name(dist.verdict)),
                                 dist.transferred_probability, dist.min_fidelity(), filtering_ok,
                                 completeness, schmidt_ok, false};
            while (row.k.size() < 3) row.k.push_back(0);
            row.ok = filtering_ok && schmidt_ok && completeness != "INVALID" && row.verdict != "FAILED";
            rows.push_back(std::move(row));
          }
        }

      const bool all_ok = std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.ok; });
      if (csv || format == "csv") {
        out << "family,d,k1,k2,k3,w,verdict,transferred,min_fidelity,filtering_ok,completeness,schmidt_ok,ok\n";
        for (const auto& r : rows) {
          out << r.family << ',' << r.d << ',' << r.k[0] << ',' << r.k[1] << ',' << r.k[2] << ','
              << sepdistill::detail::format_double(r.w) << ',' << r.verdict << ','
              << sepdistill::detail::format_double(r.transferred) << ','
              << sepdistill::detail::format_double(r.min_fidelity) << ',' << (r.filtering_ok ? "true" : "false")
              << ',' << r.completeness << ',' << (r.schmidt_ok ? "true" : "false") << ','
              << (r.ok ? "true" : "false") << '\n';
        }
      } else {
        json jrows = json::array();
        for (const auto& r : rows)
          jrows.push_back({{"family", r.family}, {"d", r.d}, {"k1", r.k[0]}, {"k2", r.k[1]}, {"k3", r.k[2]},
                           {"w", r.w}, {"verdict", r.verdict}, {"transferred", r.transferred},
                           {"min_fidelity", r.min_fidelity}, {"filtering_ok", r.filtering_ok},
                           {"completeness", r.completeness}, {"schmidt_ok", r.schmidt_ok}, {"ok", r.ok}});
        json scenario = {{"families", sweep_families}, {"d_min", d_min}, {"d_max", d_max}, {"w_grid", w_grid}};
        emit(detail::envelope("sweep", std::move(scenario), {{"rows", std::move(jrows)}}, NumericPolicy{}, 0));
      }
      return all_ok ? 0 : 1;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const SpecError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    err << "error: bad JSON input: " << e.what() << "\n";
    return 2;
  } catch (const ProtocolError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << app.help();
  return 2;
}

}  // namespace sepdistill::cli
