#pragma once

// λ-sweeps of ground states against the Dirichlet problem on the potential
// well, convergence tables, and the nine-vertex reproduction run.

#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "nlsg/calculus.hpp"
#include "nlsg/graph.hpp"
#include "nlsg/solver.hpp"
#include "nlsg/variational.hpp"

namespace nlsg {

struct SweepMetrics {
  double m_lambda = 0.0;
  /// m_Ω − m_λ.
  double m_gap = 0.0;
  /// ∥u_λ − u₀∥_{W^{1,2}(V)} with u₀ zero-extended.
  double w12_distance = 0.0;
  /// max_{x∉Ω} |u_λ(x)|.
  double outside_max = 0.0;
  /// λ ∫_V a u_λ² dμ.
  double potential_mass = 0.0;
};

struct SweepResult {
  std::vector<double> lambdas;
  std::vector<GroundState> states;
  GroundState dirichlet_state;
  std::vector<SweepMetrics> metrics;
  Domain well;
};

class SweepAborted : public Error {
public:
  SweepAborted(const std::string& what, double lambda, SweepResult partial)
      : Error(what), lambda_(lambda), partial_(std::move(partial)) {}
  double failing_lambda() const noexcept { return lambda_; }
  const SweepResult& partial() const noexcept { return partial_; }

private:
  double lambda_;
  SweepResult partial_;
};

enum class StartMode { Warm, Cold };

inline SweepMetrics sweep_metrics(const WeightedGraph& graph,
                                  const Potential& potential, const Domain& well,
                                  double lambda, const GroundState& state,
                                  const GroundState& dirichlet) {
  SweepMetrics m;
  m.m_lambda = state.energy;
  m.m_gap = dirichlet.energy - state.energy;
  m.w12_distance = norm_w12(graph, state.u - dirichlet.u);
  for (VertexIndex x = 0; x < graph.size(); ++x) {
    if (!well.contains(x)) m.outside_max = std::max(m.outside_max, std::abs(state.u[x]));
    m.potential_mass += graph.mu(x) * potential[x] * state.u[x] * state.u[x];
  }
  m.potential_mass *= lambda;
  return m;
}

/// Solves the full-graph problem at each λ and the Dirichlet problem on the
/// potential well once. Warm mode seeds start 0 at each λ with the previous
/// solution; start 0 at the first λ uses config.initial_guess if set.
inline SweepResult lambda_sweep(const WeightedGraph& graph, const Potential& potential,
                                double p, const std::vector<double>& lambdas,
                                SolverConfig config,
                                Nonlinearity nl = Nonlinearity::Signed,
                                StartMode mode = StartMode::Warm) {
  if (lambdas.empty()) throw Error("sweep needs at least one lambda");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0)) throw Error("lambdas must be positive");
    if (i > 0 && !(lambdas[i] > lambdas[i - 1]))
      throw Error("lambdas must be strictly increasing");
  }
  if (potential.is_zero())
    throw Error("potential vanishes identically; the well is the whole graph");

  SweepResult out;
  out.well = potential_well(graph, potential);

  SolverConfig dcfg = config;
  const Problem dproblem = Problem::dirichlet(graph, out.well, p, nl);
  out.dirichlet_state = solve_ground_state(dproblem, dcfg);

  std::optional<VertexFunction> warm = config.initial_guess;
  for (double lambda : lambdas) {
    const Problem problem = Problem::full_graph(graph, potential, lambda, p, nl);
    SolverConfig cfg = config;
    cfg.initial_guess = mode == StartMode::Warm ? warm : config.initial_guess;
    GroundState s;
    try {
      s = solve_ground_state(problem, cfg);
    } catch (const SolverError& e) {
      throw SweepAborted(std::string("lambda = ") + detail::format_real(lambda) +
                             ": " + e.what(),
                         lambda, std::move(out));
    }
    warm = s.u;
    out.lambdas.push_back(lambda);
    out.metrics.push_back(
        sweep_metrics(graph, potential, out.well, lambda, s, out.dirichlet_state));
    out.states.push_back(std::move(s));
  }
  return out;
}

struct ConvergenceReport {
  SweepResult const* sweep = nullptr;
  double tolerance = 1e-3;
  /// Empty when the sweep has fewer than two points.
  std::optional<bool> converged;
  bool gaps_nonnegative = true;
};

inline ConvergenceReport convergence_report(const SweepResult& sweep,
                                            double tolerance = 1e-3) {
  ConvergenceReport rep;
  rep.sweep = &sweep;
  rep.tolerance = tolerance;
  for (const auto& m : sweep.metrics)
    if (m.m_gap < 0.0) rep.gaps_nonnegative = false;
  if (sweep.metrics.size() >= 2) {
    const auto& last = sweep.metrics.back();
    rep.converged = last.w12_distance <= tolerance && last.potential_mass <= tolerance;
  }
  return rep;
}

namespace detail {
inline std::string csv_real(double v) { return format_real(v); }
}  // namespace detail

inline std::string sweep_csv(const SweepResult& sweep) {
  std::ostringstream os;
  os << "lambda,m_lambda,m_gap,w12_distance,outside_max,potential_mass\n";
  for (std::size_t i = 0; i < sweep.lambdas.size(); ++i) {
    const auto& m = sweep.metrics[i];
    os << detail::csv_real(sweep.lambdas[i]) << ',' << detail::csv_real(m.m_lambda)
       << ',' << detail::csv_real(m.m_gap) << ',' << detail::csv_real(m.w12_distance)
       << ',' << detail::csv_real(m.outside_max) << ','
       << detail::csv_real(m.potential_mass) << '\n';
  }
  return os.str();
}

/// Per-λ solution values, one column per vertex: lambda,u1,...,un.
inline std::string trend_csv(const SweepResult& sweep) {
  std::ostringstream os;
  os << "lambda";
  const std::size_t n = sweep.states.empty() ? 0 : sweep.states.front().u.size();
  for (std::size_t i = 1; i <= n; ++i) os << ",u" << i;
  os << '\n';
  for (std::size_t k = 0; k < sweep.lambdas.size(); ++k) {
    os << detail::csv_real(sweep.lambdas[k]);
    for (std::size_t i = 0; i < n; ++i) os << ',' << detail::csv_real(sweep.states[k].u[i]);
    os << '\n';
  }
  return os.str();
}

/// Human-readable table plus verdict line.
inline void print_report(std::ostream& os, const ConvergenceReport& rep) {
  const SweepResult& s = *rep.sweep;
  os << "m_Omega = " << detail::csv_real(s.dirichlet_state.energy) << '\n';
  os << "lambda                 m_lambda               m_gap                  "
        "w12_distance           outside_max            potential_mass\n";
  for (std::size_t i = 0; i < s.lambdas.size(); ++i) {
    const auto& m = s.metrics[i];
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-22.15g %-22.15g %-22.15g %-22.15g %-22.15g %-22.15g\n",
                  s.lambdas[i], m.m_lambda, m.m_gap, m.w12_distance, m.outside_max,
                  m.potential_mass);
    os << buf;
  }
  if (!rep.converged)
    os << "verdict: withheld (need at least two lambda values)\n";
  else
    os << "verdict: " << (*rep.converged ? "converged" : "not converged")
       << " (tolerance " << rep.tolerance << ")\n";
}

inline std::string solution_csv(const Problem& problem, const VertexFunction& u,
                                const Potential& potential) {
  const auto& g = problem.graph();
  const VertexFunction r = el_residual(problem, u);
  std::ostringstream os;
  os << "vertex,u,a,residual\n";
  for (VertexIndex x = 0; x < g.size(); ++x)
    os << g.name(x) << ',' << detail::csv_real(u[x]) << ','
       << detail::csv_real(potential[x]) << ',' << detail::csv_real(r[x]) << '\n';
  return os.str();
}

/// Starting vector for the nine-vertex run.
inline VertexFunction g9_initial_guess() {
  return VertexFunction{8.1472, 9.0579, 1.2699, 9.1338, 6.3236,
                        0.9754, 2.7850, 5.4688, 9.5751};
}

inline std::vector<double> decade_lambdas(int first_exponent, int last_exponent) {
  std::vector<double> l;
  for (int k = first_exponent; k <= last_exponent; ++k) l.push_back(std::pow(10.0, k));
  return l;
}

struct G9Run {
  GraphWithPotential instance;
  SweepResult sweep;
  std::string sweep_csv;
  std::string trend_csv;
};

/// The nine-vertex reproduction: p = 2, positive-part nonlinearity, the
/// fixed starting vector at λ = 1, warm-started over λ = 10^0..10^9.
inline G9Run run_g9(SolverConfig config) {
  G9Run run{builtin_g9(), {}, {}, {}};
  config.initial_guess = g9_initial_guess();
  run.sweep = lambda_sweep(run.instance.graph, run.instance.potential, 2.0,
                           decade_lambdas(0, 9), config, Nonlinearity::PositivePart,
                           StartMode::Warm);
  run.sweep_csv = sweep_csv(run.sweep);
  run.trend_csv = trend_csv(run.sweep);
  return run;
}

}  // namespace nlsg
