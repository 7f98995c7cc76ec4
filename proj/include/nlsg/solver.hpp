#pragma once

// Ground-state computation on the Nehari manifold.
//
// Each start minimizes the scale-invariant quotient Q(u) = A(u) / B(u)^{2/(p+1)}
// (A the squared problem norm, B the nonlinear mass), which is equivalent to
// minimizing the energy over the Nehari manifold since
//   J(t*(u) u) = (p−1)/(2(p+1)) · Q(u)^{(p+1)/(p−1)}.
// The descent uses the problem's own quadratic form as preconditioner, so its
// rate does not degrade with λ. The minimizer is projected onto the manifold
// and polished by Newton on the pointwise equation.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nlsg/calculus.hpp"
#include "nlsg/random.hpp"
#include "nlsg/variational.hpp"

namespace nlsg {

struct SolverConfig {
  std::uint64_t seed = 1;
  int n_starts = 8;
  int max_outer_iterations = 5000;
  double el_tolerance = 1e-10;
  double nehari_tolerance = 1e-12;
  double descent_step_shrink = 0.5;
  /// Preconditioned-gradient size at which descent hands over to Newton.
  double descent_tolerance = 1e-8;
  int newton_max_steps = 50;
  std::optional<VertexFunction> initial_guess;

  void check() const {
    if (n_starts < 1) throw Error("n_starts must be >= 1");
    if (max_outer_iterations < 0) throw Error("max_outer_iterations must be >= 0");
    if (!(el_tolerance > 0.0) || !(nehari_tolerance > 0.0) ||
        !(descent_tolerance > 0.0))
      throw Error("tolerances must be positive");
    if (!(descent_step_shrink > 0.0 && descent_step_shrink < 1.0))
      throw Error("descent_step_shrink must lie in (0, 1)");
    if (newton_max_steps < 0) throw Error("newton_max_steps must be >= 0");
  }
};

struct GroundState {
  VertexFunction u;
  double energy = 0.0;
  /// |A − B| / max(A, B).
  double nehari_residual = 0.0;
  double el_residual_inf = 0.0;
  int iterations = 0;
  int starts_used = 0;
  int start_index = -1;
  std::uint64_t seed = 0;
  bool converged = false;
};

class SolverError : public Error {
public:
  using Error::Error;
};

class SingularJacobian : public SolverError {
public:
  using SolverError::SolverError;
};

class NewtonDivergence : public SolverError {
public:
  using SolverError::SolverError;
};

class NoConvergence : public SolverError {
public:
  NoConvergence(const std::string& what, double best_residual)
      : SolverError(what), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

private:
  double best_residual_;
};

class ZeroCollapse : public SolverError {
public:
  using SolverError::SolverError;
};

namespace detail {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Position of each vertex inside the active set, or npos.
inline std::vector<std::size_t> active_positions(const Problem& problem) {
  std::vector<std::size_t> pos(problem.graph().size(),
                               std::numeric_limits<std::size_t>::max());
  const auto& act = problem.active();
  for (std::size_t i = 0; i < act.size(); ++i) pos[act[i]] = i;
  return pos;
}

/// Matrix of the quadratic form A restricted to the active set:
/// weighted graph Laplacian (with boundary edges on the diagonal) + diag(μc).
inline Mat stiffness_matrix(const Problem& problem) {
  const auto& g = problem.graph();
  const auto& act = problem.active();
  const auto pos = active_positions(problem);
  Mat k = Mat::Zero(act.size(), act.size());
  for (std::size_t i = 0; i < act.size(); ++i) {
    const VertexIndex x = act[i];
    double diag = g.mu(x) * problem.coefficient(x);
    for (const auto& nb : g.neighbors(x)) {
      diag += nb.weight;
      if (pos[nb.vertex] != std::numeric_limits<std::size_t>::max())
        k(i, pos[nb.vertex]) -= nb.weight;
    }
    k(i, i) += diag;
  }
  return k;
}

inline Vec gather(const Problem& problem, const VertexFunction& u) {
  const auto& act = problem.active();
  Vec v(act.size());
  for (std::size_t i = 0; i < act.size(); ++i) v[i] = u[act[i]];
  return v;
}

inline VertexFunction scatter(const Problem& problem, const Vec& v) {
  VertexFunction u(problem.graph().size());
  const auto& act = problem.active();
  for (std::size_t i = 0; i < act.size(); ++i) u[act[i]] = v[i];
  return u;
}

/// Quotient evaluation on the active coordinates.
struct QuotientTerms {
  double a = 0.0;
  double b = 0.0;
  double q = std::numeric_limits<double>::infinity();
};

class QuotientDescent {
public:
  QuotientDescent(const Problem& problem, const SolverConfig& config)
      : problem_(problem),
        config_(config),
        k_(stiffness_matrix(problem)),
        chol_(k_),
        mu_(problem.active().size()) {
    if (chol_.info() != Eigen::Success)
      throw SolverError("quadratic form is not positive definite");
    for (std::size_t i = 0; i < problem.active().size(); ++i)
      mu_[i] = problem.graph().mu(problem.active()[i]);
  }

  QuotientTerms terms(const Vec& x) const {
    QuotientTerms t;
    t.a = x.dot(k_ * x);
    for (Eigen::Index i = 0; i < x.size(); ++i)
      t.b += mu_[i] * problem_.nonlinear_power(x[i]);
    if (t.b > 0.0) t.q = t.a / std::pow(t.b, 2.0 / (problem_.p() + 1.0));
    return t;
  }

  /// Runs up to `budget` iterations from x (in place); returns iterations used.
  int run(Vec& x, int budget) const {
    const double s = 2.0 / (problem_.p() + 1.0);
    int it = 0;
    int stalled = 0;
    normalize(x);
    QuotientTerms cur = terms(x);
    for (; it < budget; ++it) {
      if (!std::isfinite(cur.q)) break;
      Vec n(x.size());
      for (Eigen::Index i = 0; i < x.size(); ++i)
        n[i] = mu_[i] * problem_.nonlinear(x[i]);
      // d = −K⁻¹∇Q up to the positive factor B^s/2.
      const Vec d = (cur.a / cur.b) * chol_.solve(n) - x;
      const double dkd = d.dot(k_ * d);
      if (std::sqrt(dkd / cur.a) <= config_.descent_tolerance) break;
      const double slope = -2.0 * dkd / std::pow(cur.b, s);
      double tau = 1.0;
      bool accepted = false;
      for (int h = 0; h < 60; ++h, tau *= config_.descent_step_shrink) {
        Vec trial = x + tau * d;
        const QuotientTerms t = terms(trial);
        if (std::isfinite(t.q) && t.q <= cur.q + 1e-4 * tau * slope) {
          x = std::move(trial);
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
      normalize(x);
      const QuotientTerms next = terms(x);
      // Quotient no longer resolvable in floating point.
      stalled = cur.q - next.q <= 8.0 * std::numeric_limits<double>::epsilon() * cur.q
                    ? stalled + 1
                    : 0;
      cur = next;
      if (stalled >= 3) {
        ++it;
        break;
      }
    }
    return it;
  }

private:
  static void normalize(Vec& x) {
    const double m = x.cwiseAbs().maxCoeff();
    if (m > 0.0) x /= m;
  }

  const Problem& problem_;
  const SolverConfig& config_;
  Mat k_;
  Eigen::LLT<Mat> chol_;
  Vec mu_;
};

inline VertexFunction random_start(const Problem& problem, Rng& rng,
                                   double lo, double hi) {
  VertexFunction u(problem.graph().size());
  for (VertexIndex x : problem.active()) {
    if (problem.nonlinearity() == Nonlinearity::PositivePart) {
      u[x] = rng.uniform(lo, hi);
    } else {
      const double mag = rng.uniform(lo, hi);
      u[x] = rng.coin() ? mag : -mag;
    }
  }
  return u;
}

/// Peak of height 1 at `peak` over a background of magnitude below 0.3.
inline VertexFunction spike_start(const Problem& problem, Rng& rng, VertexIndex peak) {
  VertexFunction u = random_start(problem, rng, 0.0, 0.3);
  u[peak] = 1.0;
  return u;
}

inline void normalize_sign(const Problem& problem, VertexFunction& u) {
  if (problem.nonlinearity() != Nonlinearity::Signed) return;
  VertexIndex best = 0;
  for (VertexIndex x = 1; x < u.size(); ++x)
    if (std::abs(u[x]) > std::abs(u[best])) best = x;
  if (u[best] < 0.0) u *= -1.0;
}

inline double residual_inf(const Problem& problem, const VertexFunction& u) {
  return el_residual(problem, u).max_abs();
}

}  // namespace detail

struct NewtonResult {
  VertexFunction u;
  int steps = 0;
  double residual_inf = 0.0;
};

/// Damped Newton on the pointwise equation over the active set. The linear
/// system uses the (symmetric) Hessian of the energy,
///   K − diag(μ N'(u)),  K = graph Laplacian + diag(μ(λa+1)),
/// which is μ times the Jacobian of the residual.
inline NewtonResult newton_refine(const Problem& problem, const VertexFunction& u0,
                                  const SolverConfig& config) {
  using detail::Vec;
  problem.check(u0);
  const auto& g = problem.graph();
  const auto& act = problem.active();
  const detail::Mat k = detail::stiffness_matrix(problem);

  NewtonResult res;
  res.u = u0;
  VertexFunction r = el_residual(problem, res.u);
  auto merit = [&](const VertexFunction& rr) {
    double s = 0.0;
    for (VertexIndex x : act) s += rr[x] * rr[x];
    return std::sqrt(s);
  };
  auto done = [&](const VertexFunction& u, const VertexFunction& rr) {
    return rr.max_abs() <= config.el_tolerance &&
           (u.is_zero() ||
            nehari_residual_relative(problem, u) <= config.nehari_tolerance);
  };

  while (res.steps < config.newton_max_steps && !done(res.u, r)) {
    detail::Mat h = k;
    Vec rhs(act.size());
    for (std::size_t i = 0; i < act.size(); ++i) {
      const VertexIndex x = act[i];
      h(i, i) -= g.mu(x) * problem.nonlinear_derivative(res.u[x]);
      rhs[i] = -g.mu(x) * r[x];
    }
    Eigen::PartialPivLU<detail::Mat> lu(h);
    if (!(lu.rcond() > 1e-14)) throw SingularJacobian("singular Jacobian in Newton step");
    const Vec delta = lu.solve(rhs);
    if (!delta.allFinite()) throw SingularJacobian("non-finite Newton step");

    const double m0 = merit(r);
    double t = 1.0;
    bool accepted = false;
    for (int h_count = 0; h_count <= 30; ++h_count, t *= 0.5) {
      VertexFunction trial = res.u;
      for (std::size_t i = 0; i < act.size(); ++i) trial[act[i]] += t * delta[i];
      VertexFunction tr = el_residual(problem, trial);
      if (merit(tr) < m0) {
        res.u = std::move(trial);
        r = std::move(tr);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Roundoff floor: already within tolerance on the residual.
      if (r.max_abs() <= config.el_tolerance) break;
      throw NewtonDivergence("Newton failed to reduce the residual");
    }
    ++res.steps;
  }
  res.residual_inf = r.max_abs();
  return res;
}

namespace detail {

inline GroundState finish_state(const Problem& problem, VertexFunction u,
                                const SolverConfig& config) {
  normalize_sign(problem, u);
  GroundState s;
  s.energy = energy(problem, u);
  s.el_residual_inf = residual_inf(problem, u);
  s.nehari_residual = u.is_zero() ? 0.0 : nehari_residual_relative(problem, u);
  s.converged = !u.is_zero() && s.el_residual_inf <= config.el_tolerance &&
                s.nehari_residual <= config.nehari_tolerance;
  s.u = std::move(u);
  s.seed = config.seed;
  return s;
}

/// Deterministic reduction: least energy, then lowest start index.
inline bool better(const GroundState& a, const GroundState& b) {
  if (a.energy != b.energy) return a.energy < b.energy;
  return a.start_index < b.start_index;
}

}  // namespace detail

/// Least-energy solution found by multistart quotient descent + Newton.
inline GroundState solve_ground_state(const Problem& problem,
                                      const SolverConfig& config) {
  config.check();
  const auto& g = problem.graph();
  const detail::QuotientDescent descent(problem, config);

  std::optional<GroundState> best;
  double best_residual = std::numeric_limits<double>::infinity();
  int collapsed = 0;

  for (int start = 0; start < config.n_starts; ++start) {
    VertexFunction u0;
    if (start == 0 && config.initial_guess) {
      check_function(g, *config.initial_guess);
      u0 = problem.restrict_to_active(*config.initial_guess);
    } else {
      Rng rng(config.seed + static_cast<std::uint64_t>(start));
      if (start % 2 == 1) {
        const auto& active = problem.active();
        u0 = detail::spike_start(problem, rng,
                                 active[static_cast<std::size_t>(start / 2) % active.size()]);
      } else {
        u0 = detail::random_start(problem, rng, 0.1, 1.0);
      }
    }
    detail::Vec x = detail::gather(problem, u0);
    if (x.cwiseAbs().maxCoeff() == 0.0) {
      ++collapsed;
      continue;
    }

    int iterations = 0;
    std::optional<GroundState> found;
    // Newton failures fall back to a further round of descent.
    for (int round = 0; round < 2 && !found; ++round) {
      iterations += descent.run(x, config.max_outer_iterations);
      if (!x.allFinite() || x.cwiseAbs().maxCoeff() == 0.0) break;
      VertexFunction u = detail::scatter(problem, x);
      double t = 0.0;
      try {
        t = nehari_scale(problem, u);
      } catch (const Error&) {
        break;
      }
      u *= t;
      try {
        NewtonResult nr = newton_refine(problem, u, config);
        iterations += nr.steps;
        if (nr.u.max_abs() < 1e-8) {
          ++collapsed;
          break;
        }
        GroundState s = detail::finish_state(problem, std::move(nr.u), config);
        best_residual = std::min(best_residual, s.el_residual_inf);
        if (s.converged) found = std::move(s);
      } catch (const SolverError&) {
        x = detail::gather(problem, u);
      }
    }
    if (!found) continue;
    found->iterations = iterations;
    found->start_index = start;
    if (!best || detail::better(*found, *best)) best = std::move(found);
  }

  if (!best) {
    if (collapsed == config.n_starts)
      throw ZeroCollapse("every start collapsed to the zero function");
    throw NoConvergence("no start converged; best residual " +
                            detail::format_real(best_residual),
                        best_residual);
  }
  best->starts_used = config.n_starts;
  return *best;
}

/// Largest problem the brute-force oracle accepts (active vertices).
inline constexpr std::size_t kOracleMaxVertices = 12;

/// Every distinct nontrivial solution reached by Newton from wide random
/// starts, sorted by energy.
inline std::vector<GroundState> oracle_solutions(const Problem& problem,
                                                 const SolverConfig& config) {
  config.check();
  if (problem.active().size() > kOracleMaxVertices)
    throw Error("oracle is limited to " + std::to_string(kOracleMaxVertices) +
                " unknowns");
  SolverConfig newton_cfg = config;
  newton_cfg.newton_max_steps = std::max(config.newton_max_steps, 100);
  const int starts = std::max(config.n_starts, 600);
  const bool positive = problem.nonlinearity() == Nonlinearity::PositivePart;
  const auto& active = problem.active();

  std::vector<GroundState> found;
  Rng rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  for (int start = 0; start < starts; ++start) {
    // Three start families cycle: wide mixed-sign boxes, positive boxes and
    // single spikes on a small positive background.
    VertexFunction u(problem.graph().size());
    const int family = positive ? 1 + start % 2 : start % 3;
    for (VertexIndex x : active)
      u[x] = family == 0 ? rng.uniform(-3.0, 3.0)
           : family == 1 ? rng.uniform(0.1, 3.0)
                         : rng.uniform(0.0, 0.5);
    if (family == 2)
      u[active[static_cast<std::size_t>(rng.bits() % active.size())]] = rng.uniform(0.5, 4.0);
    NewtonResult nr;
    try {
      nr = newton_refine(problem, u, newton_cfg);
    } catch (const SolverError&) {
      continue;
    }
    if (nr.residual_inf > config.el_tolerance || nr.u.max_abs() <= 1e-6) continue;
    const bool seen = std::any_of(found.begin(), found.end(), [&](const GroundState& s) {
      return distance_inf(s.u, nr.u) <= 1e-6;
    });
    if (seen) continue;
    GroundState s;
    s.energy = energy(problem, nr.u);
    s.el_residual_inf = nr.residual_inf;
    s.nehari_residual = nehari_residual_relative(problem, nr.u);
    s.converged = true;
    s.iterations = nr.steps;
    s.start_index = start;
    s.seed = config.seed;
    s.u = std::move(nr.u);
    found.push_back(std::move(s));
  }
  std::stable_sort(found.begin(), found.end(),
                   [](const GroundState& a, const GroundState& b) {
                     return a.energy < b.energy;
                   });
  for (auto& s : found) s.starts_used = starts;
  return found;
}

/// Independent baseline: Newton from many wide random starts, keeping the
/// least-energy nontrivial solution.
inline GroundState oracle_least_energy(const Problem& problem,
                                       const SolverConfig& config) {
  auto all = oracle_solutions(problem, config);
  if (all.empty()) throw NoConvergence("oracle found no nontrivial solution",
                                       std::numeric_limits<double>::infinity());
  return all.front();
}

struct VerificationReport {
  double el_residual_inf = 0.0;
  double nehari_residual_rel = 0.0;
  double energy_identity_gap = 0.0;
  double norm = 0.0;
  double embedding_constant = 0.0;
  double sigma = 0.0;
  bool sigma_bound_ok = false;
  bool embedding_ok = false;
  bool pointwise_ok = false;
  bool nontrivial = false;

  bool passes(double el_tol, double nehari_tol, double identity_tol = 1e-10) const {
    return nontrivial && el_residual_inf <= el_tol &&
           nehari_residual_rel <= nehari_tol &&
           energy_identity_gap <= identity_tol && sigma_bound_ok &&
           embedding_ok && pointwise_ok;
  }
};

inline VerificationReport verify_solution(const Problem& problem,
                                          const VertexFunction& u) {
  problem.check(u);
  const auto& g = problem.graph();
  const double p = problem.p();
  VerificationReport rep;
  const VertexFunction r = el_residual(problem, u);
  rep.el_residual_inf = r.max_abs();
  rep.nontrivial = !u.is_zero();

  const double a = quadratic_part(problem, u);
  const double b = nonlinear_mass(problem, u);
  rep.norm = std::sqrt(a);
  rep.nehari_residual_rel =
      std::max(a, b) > 0.0 ? std::abs(a - b) / std::max(a, b) : 0.0;
  const double j = energy(problem, u);
  const double j_identity = nehari_energy_factor(p) * a;
  const double jscale = std::max(std::abs(j), std::abs(j_identity));
  rep.energy_identity_gap = jscale > 0.0 ? std::abs(j - j_identity) / jscale : 0.0;

  // ∥u∥_∞ ≤ μ_min^{-1/2}∥u∥ and interpolation give ∥u∥_{p+1} ≤ C∥u∥.
  const double mu_min = g.mu_min();
  rep.embedding_constant = std::pow(mu_min, -(p - 1.0) / (2.0 * (p + 1.0)));
  rep.sigma = std::pow(1.0 / rep.embedding_constant, (p + 1.0) / (p - 1.0));
  constexpr double slack = 1.0 + 1e-12;
  rep.sigma_bound_ok = rep.nontrivial && rep.norm * slack >= rep.sigma;

  const VertexSet all = g.all_vertices();
  const double inf = lp_norm(g, u, kInfinityNorm, all);
  const double l2 = lp_norm(g, u, 2.0, all);
  bool emb = inf <= std::pow(mu_min, -0.5) * rep.norm * slack;
  for (double q : {3.0, 4.0, 6.0, p + 1.0}) {
    const double lhs = std::pow(lp_norm(g, u, q, all), q);
    emb = emb && lhs <= std::pow(inf, q - 2.0) * l2 * l2 * slack;
  }
  emb = emb && lp_norm(g, u, p + 1.0, all) <= rep.embedding_constant * rep.norm * slack;
  rep.embedding_ok = emb;

  // Weak form tested against each coordinate indicator, assembled from the
  // gradient form, must equal μ(x) r(x).
  const VertexSet region = problem.is_dirichlet() ? problem.domain().closure() : all;
  bool pw = true;
  for (VertexIndex x : problem.active()) {
    VertexFunction delta(g.size());
    delta[x] = 1.0;
    double weak = 0.0, scale = 1.0;
    for (VertexIndex z : region) {
      const double t = g.mu(z) * gamma(g, u, delta, z);
      weak += t;
      scale += std::abs(t);
    }
    const double mass = g.mu(x) * (problem.coefficient(x) * u[x] - problem.nonlinear(u[x]));
    weak += mass;
    scale += std::abs(g.mu(x) * problem.coefficient(x) * u[x]) +
             std::abs(g.mu(x) * problem.nonlinear(u[x]));
    pw = pw && std::abs(weak - g.mu(x) * r[x]) <= 1e-12 * scale;
  }
  rep.pointwise_ok = pw;
  return rep;
}

}  // namespace nlsg
