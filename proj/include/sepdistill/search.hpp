#pragma once

// Derivative-free search for trace-preserving separable instruments that map
// both eigenstates of a rank-two mixture onto a target pure state.
//
// Candidates are parameterized per party, so every candidate is exactly
// separable; only completeness and the conversion are penalized.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string_view>
#include <thread>
#include <vector>

#include "sepdistill/channel.hpp"
#include "sepdistill/instruments.hpp"
#include "sepdistill/states.hpp"

namespace sepdistill {

struct ResidualWeights {
  double completeness = 1.0;
  double determinism = 1.0;
};

struct SearchConfig {
  std::size_t kraus_count = 2;  // T
  std::size_t restarts = 8;
  std::size_t max_iterations = 20000;
  std::uint64_t seed = 1;
  ResidualWeights weights;
  double tolerance = 1e-12;     // FEASIBLE threshold on the residual
  double initial_step = 0.1;    // simplex edge length
  std::size_t trace_stride = 500;
  std::size_t threads = 0;      // 0 = hardware concurrency

  void validate() const {
    if (kraus_count < 1) throw std::invalid_argument("SearchConfig: need at least one Kraus operator");
    if (restarts < 1) throw std::invalid_argument("SearchConfig: need at least one restart");
    if (!(weights.completeness > 0.0 && weights.determinism > 0.0))
      throw std::invalid_argument("SearchConfig: penalty weights must be positive");
    if (!(tolerance > 0.0)) throw std::invalid_argument("SearchConfig: tolerance must be positive");
    if (!(initial_step > 0.0)) throw std::invalid_argument("SearchConfig: initial step must be positive");
    if (trace_stride < 1) throw std::invalid_argument("SearchConfig: trace stride must be positive");
  }
};

enum class SearchVerdict { Feasible, Inconclusive };

inline constexpr std::string_view search_verdict_name(SearchVerdict v) {
  return v == SearchVerdict::Feasible ? "FEASIBLE" : "INCONCLUSIVE";
}

struct SearchResult {
  double best_residual = 0.0;
  std::size_t best_restart = 0;
  Instrument best_candidate;
  std::vector<double> restart_residuals;            // final best per restart
  std::vector<std::vector<double>> restart_traces;  // best-so-far every trace_stride iterations
  SearchVerdict verdict = SearchVerdict::Inconclusive;
  std::optional<Completeness> reverified_completeness;
  std::optional<DistillationVerdict> reverified_distillation;
};

/// Zero iff the candidate is trace preserving and every Kraus operator maps
/// both psi1 and psi2 onto multiples of the target with weights summing to 1.
inline double residual(const Instrument& candidate, const PureState& psi1, const PureState& psi2,
                       const PureState& target, const ResidualWeights& weights = {}) {
  candidate.validate();
  if (psi1.dims != candidate.dims || psi2.dims != candidate.dims || target.dims != candidate.dims)
    throw DimensionError("residual: dims mismatch");
  const ComplexMatrix effect = candidate.effect_sum();
  const double completeness = std::pow((ComplexMatrix::identity(effect.rows()) - effect).frobenius_norm(), 2);

  double misfit = 0.0, mass1 = 0.0, mass2 = 0.0;
  for (const auto& k : candidate.kraus) {
    const Vector v1 = k.apply(psi1.amplitudes, candidate.dims);
    const Vector v2 = k.apply(psi2.amplitudes, candidate.dims);
    const Complex a1 = inner(target.amplitudes, v1);
    const Complex a2 = inner(target.amplitudes, v2);
    // |v - <t|v> t|^2, formed directly to avoid cancellation near zero.
    misfit += std::pow(norm(axpy(-a1, target.amplitudes, v1)), 2) +
              std::pow(norm(axpy(-a2, target.amplitudes, v2)), 2);
    mass1 += std::norm(a1);
    mass2 += std::norm(a2);
  }
  const double deficit = std::pow(1.0 - mass1, 2) + std::pow(1.0 - mass2, 2);
  return weights.completeness * completeness + weights.determinism * (misfit + deficit);
}

namespace detail {

inline std::size_t parameter_count(const Dims& dims, std::size_t kraus_count) {
  std::size_t per = 0;
  for (auto n : dims) per += 2 * n * n;
  return per * kraus_count;
}

inline Instrument unpack(std::span<const double> x, const Dims& dims, std::size_t kraus_count) {
  Instrument inst{{}, dims};
  std::size_t at = 0;
  for (std::size_t k = 0; k < kraus_count; ++k) {
    ProductKraus op;
    for (auto n : dims) {
      ComplexMatrix m(n, n);
      for (auto& z : m.entries()) {
        z = Complex(x[at], x[at + 1]);
        at += 2;
      }
      op.locals.push_back(std::move(m));
    }
    inst.kraus.push_back(std::move(op));
  }
  return inst;
}

inline void pack_into(const ProductKraus& op, std::vector<double>& out) {
  for (const auto& m : op.locals)
    for (const auto& z : m.entries()) {
      out.push_back(z.real());
      out.push_back(z.imag());
    }
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

struct DescentOutcome {
  std::vector<double> best_point;
  double best_value = 0.0;
  std::vector<double> trace;
};

/// Nelder-Mead simplex with reflection 1, expansion 2, contraction 1/2 and
/// shrink 1/2. Stops at the iteration cap, when the best value reaches
/// `target`, or when the simplex values collapse.
inline DescentOutcome nelder_mead(const std::function<double(std::span<const double>)>& f,
                                  std::vector<double> start, double step, std::size_t max_iterations,
                                  double target, std::size_t trace_stride) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> simplex(n + 1, start);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step;
  std::vector<double> value(n + 1);
  for (std::size_t i = 0; i <= n; ++i) value[i] = f(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  DescentOutcome out;
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return value[a] < value[b]; });
  };
  auto point = [&](const std::vector<double>& centroid, const std::vector<double>& from, double t) {
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = centroid[i] + t * (from[i] - centroid[i]);
    return p;
  };

  sort_simplex();
  std::vector<double> centroid(n);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    if (it % trace_stride == 0) out.trace.push_back(value[order[0]]);
    const double best = value[order[0]];
    const double worst = value[order[n]];
    if (best <= target) break;
    if (worst - best <= 1e-15 * (std::abs(best) + 1e-300) && it > 0) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[order[j]][i];
    for (auto& c : centroid) c /= static_cast<double>(n);

    const std::size_t w = order[n];
    const double second_worst = value[order[n - 1]];
    auto reflected = point(centroid, simplex[w], -1.0);
    const double fr = f(reflected);
    if (fr < best) {
      auto expanded = point(centroid, simplex[w], -2.0);
      const double fe = f(expanded);
      if (fe < fr) {
        simplex[w] = std::move(expanded);
        value[w] = fe;
      } else {
        simplex[w] = std::move(reflected);
        value[w] = fr;
      }
    } else if (fr < second_worst) {
      simplex[w] = std::move(reflected);
      value[w] = fr;
    } else {
      const bool outside = fr < worst;
      auto contracted = outside ? point(centroid, reflected, 0.5) : point(centroid, simplex[w], 0.5);
      const double fc = f(contracted);
      if (fc < std::min(fr, worst)) {
        simplex[w] = std::move(contracted);
        value[w] = fc;
      } else {
        const auto& keep = simplex[order[0]];
        for (std::size_t j = 1; j <= n; ++j) {
          auto& v = simplex[order[j]];
          for (std::size_t i = 0; i < n; ++i) v[i] = keep[i] + 0.5 * (v[i] - keep[i]);
          value[order[j]] = f(v);
        }
      }
    }
    sort_simplex();
  }
  out.best_point = simplex[order[0]];
  out.best_value = value[order[0]];
  out.trace.push_back(out.best_value);
  return out;
}

}  // namespace detail

/// Equal-weight mixture of the two eigenstates (or the pure state when they
/// coincide), used to re-verify a feasible candidate.
inline DensityMatrix verification_state(const PureState& psi1, const PureState& psi2) {
  ComplexMatrix rho = (psi1.projector() + psi2.projector()) * Complex(0.5);
  const double tr = rho.trace().real();
  return {rho * Complex(1.0 / tr), psi1.dims};
}

inline SearchResult sep_feasibility_search(const PureState& psi1, const PureState& psi2, const PureState& target,
                                           const SearchConfig& cfg,
                                           const std::optional<Instrument>& warm_start = std::nullopt) {
  cfg.validate();
  if (psi1.dims != psi2.dims || psi1.dims != target.dims) throw DimensionError("search: dims mismatch");
  const Dims& dims = psi1.dims;
  if (warm_start) {
    if (warm_start->dims != dims) throw DimensionError("search: warm start dims mismatch");
    if (warm_start->kraus.size() > cfg.kraus_count)
      throw std::invalid_argument("search: warm start has more Kraus operators than T");
    warm_start->validate();
  }
  const std::size_t n_params = detail::parameter_count(dims, cfg.kraus_count);
  const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.kraus_count * product(dims)));

  auto objective = [&](std::span<const double> x) {
    return residual(detail::unpack(x, dims, cfg.kraus_count), psi1, psi2, target, cfg.weights);
  };

  std::vector<detail::DescentOutcome> runs(cfg.restarts);
  auto run = [&](std::size_t r) {
    std::mt19937_64 rng(detail::splitmix64(cfg.seed + r));
    std::normal_distribution<double> gauss(0.0, scale);
    std::vector<double> start;
    start.reserve(n_params);
    if (r == 0 && warm_start)
      for (const auto& k : warm_start->kraus) detail::pack_into(k, start);
    while (start.size() < n_params) start.push_back(gauss(rng));
    // Descent stops well below the feasibility threshold.
    runs[r] = detail::nelder_mead(objective, std::move(start), cfg.initial_step, cfg.max_iterations,
                                  1e-4 * cfg.tolerance, cfg.trace_stride);
  };

  const std::size_t threads =
      std::max<std::size_t>(1, std::min(cfg.restarts, cfg.threads ? cfg.threads
                                                                   : std::max(1u, std::thread::hardware_concurrency())));
  if (threads == 1) {
    for (std::size_t r = 0; r < cfg.restarts; ++r) run(r);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t r = t; r < cfg.restarts; r += threads) run(r);
      });
    for (auto& th : pool) th.join();
  }

  SearchResult res;
  for (std::size_t r = 0; r < cfg.restarts; ++r) {
    res.restart_residuals.push_back(runs[r].best_value);
    res.restart_traces.push_back(runs[r].trace);
    // Ties keep the lowest restart index.
    if (r == 0 || runs[r].best_value < res.best_residual) {
      res.best_residual = runs[r].best_value;
      res.best_restart = r;
    }
  }
  res.best_candidate = detail::unpack(runs[res.best_restart].best_point, dims, cfg.kraus_count);

  if (res.best_residual <= cfg.tolerance) {
    res.reverified_completeness = completeness_report(res.best_candidate).verdict;
    res.reverified_distillation =
        distillation_report(verification_state(psi1, psi2), res.best_candidate, target).verdict;
    if (*res.reverified_completeness == Completeness::Complete &&
        *res.reverified_distillation == DistillationVerdict::Deterministic)
      res.verdict = SearchVerdict::Feasible;
  }
  return res;
}

/// Lifts a protocol's single-round measurement to a product instrument.
inline Instrument lift_single_round(const ProtocolProgram& prog) {
  if (prog.rounds.size() != 1) throw std::invalid_argument("lift_single_round: protocol has several rounds");
  Instrument inst{{}, prog.dims};
  const auto& round = prog.rounds.front();
  for (std::size_t j = 0; j < round.measurement.size(); ++j) {
    ProductKraus k;
    for (std::size_t p = 0; p < prog.dims.size(); ++p)
      k.locals.push_back(p == round.party ? round.measurement[j] : ComplexMatrix::identity(prog.dims[p]));
    for (const auto& [party, u] : round.outcomes[j].corrections) k.locals[party] = u * k.locals[party];
    inst.kraus.push_back(std::move(k));
  }
  return inst;
}

}  // namespace sepdistill
