#pragma once

// Energy functionals, Euler-Lagrange residuals and the Nehari constraint for
// the full-graph equation  −Δu + (λa+1)u = |u|^{p−1}u  and for its Dirichlet
// limit on a vertex domain.

#include <cmath>
#include <string>
#include <variant>

#include "nlsg/calculus.hpp"
#include "nlsg/graph.hpp"

namespace nlsg {

enum class Nonlinearity {
  Signed,        ///< |u|^{p−1} u
  PositivePart,  ///< (u₊)^p
};

inline const char* to_string(Nonlinearity n) {
  return n == Nonlinearity::Signed ? "signed" : "positive";
}

struct FullGraphTerms {
  Potential potential;
  double lambda = 1.0;
};

struct DirichletTerms {
  Domain domain;
};

/// A problem instance. Holds a non-owning pointer to the graph, which must
/// outlive the problem.
class Problem {
public:
  static Problem full_graph(const WeightedGraph& graph, Potential potential,
                            double lambda, double p,
                            Nonlinearity nl = Nonlinearity::Signed) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
      throw Error("lambda must be positive");
    if (potential.size() != graph.size())
      throw Error("potential size does not match graph");
    for (double v : potential.values)
      if (!(v >= 0.0)) throw Error("potential must be nonnegative");
    return Problem(graph, FullGraphTerms{std::move(potential), lambda}, p, nl);
  }

  static Problem dirichlet(const WeightedGraph& graph, Domain domain, double p,
                           Nonlinearity nl = Nonlinearity::Signed) {
    if (domain.interior.empty()) throw Error("domain interior is empty");
    for (VertexIndex x : domain.interior) graph.check_vertex(x);
    return Problem(graph, DirichletTerms{std::move(domain)}, p, nl);
  }

  const WeightedGraph& graph() const noexcept { return *graph_; }
  double p() const noexcept { return p_; }
  Nonlinearity nonlinearity() const noexcept { return nl_; }
  bool is_dirichlet() const noexcept {
    return std::holds_alternative<DirichletTerms>(terms_);
  }
  const FullGraphTerms& full() const { return std::get<FullGraphTerms>(terms_); }
  const Domain& domain() const { return std::get<DirichletTerms>(terms_).domain; }

  /// Vertices carrying unknowns: all of V, or Ω for the Dirichlet problem.
  const VertexSet& active() const noexcept { return active_; }

  /// Mass coefficient λa(x)+1 (full graph) or 1 (Dirichlet, on Ω).
  double coefficient(VertexIndex x) const {
    if (is_dirichlet()) return 1.0;
    const auto& f = full();
    return f.lambda * f.potential[x] + 1.0;
  }

  /// N(s) = |s|^{p−1}s or (s₊)^p.
  double nonlinear(double s) const {
    if (nl_ == Nonlinearity::PositivePart)
      return s > 0.0 ? std::pow(s, p_) : 0.0;
    return std::copysign(std::pow(std::abs(s), p_), s);
  }
  /// N'(s).
  double nonlinear_derivative(double s) const {
    if (nl_ == Nonlinearity::PositivePart)
      return s > 0.0 ? p_ * std::pow(s, p_ - 1.0) : 0.0;
    return p_ * std::pow(std::abs(s), p_ - 1.0);
  }
  /// Antiderivative integrand: |s|^{p+1} or (s₊)^{p+1}.
  double nonlinear_power(double s) const {
    if (nl_ == Nonlinearity::PositivePart)
      return s > 0.0 ? std::pow(s, p_ + 1.0) : 0.0;
    return std::pow(std::abs(s), p_ + 1.0);
  }

  /// Throws unless u lives on this graph (and vanishes off Ω when Dirichlet).
  void check(const VertexFunction& u) const {
    if (is_dirichlet())
      check_supported_in(*graph_, domain(), u);
    else
      check_function(*graph_, u);
  }

  /// Copy of u with values off the active set cleared.
  VertexFunction restrict_to_active(VertexFunction u) const {
    if (!is_dirichlet()) return u;
    std::vector<char> in(graph_->size(), 0);
    for (VertexIndex x : active_) in[x] = 1;
    for (VertexIndex x = 0; x < u.size(); ++x)
      if (!in[x]) u[x] = 0.0;
    return u;
  }

  /// Same problem with a different coupling λ.
  Problem with_lambda(double lambda) const {
    return full_graph(*graph_, full().potential, lambda, p_, nl_);
  }

private:
  Problem(const WeightedGraph& graph, std::variant<FullGraphTerms, DirichletTerms> terms,
          double p, Nonlinearity nl)
      : graph_(&graph), terms_(std::move(terms)), p_(p), nl_(nl) {
    if (!(p >= 2.0) || !std::isfinite(p)) throw Error("exponent p must be >= 2");
    active_ = is_dirichlet() ? domain().interior : graph.all_vertices();
  }

  const WeightedGraph* graph_;
  std::variant<FullGraphTerms, DirichletTerms> terms_;
  double p_;
  Nonlinearity nl_;
  VertexSet active_;
};

/// Squared problem norm: ∥u∥²_{E_λ}, or ∥u∥²_{W₀^{1,2}(Ω)} for Dirichlet.
inline double quadratic_part(const Problem& problem, const VertexFunction& u) {
  problem.check(u);
  const auto& g = problem.graph();
  if (problem.is_dirichlet()) {
    const double n = norm_w12_zero(g, problem.domain(), u);
    return n * n;
  }
  const double n =
      norm_e_lambda(g, u, problem.full().potential, problem.full().lambda);
  return n * n;
}

/// ∫ |u|^{p+1} dμ (or (u₊)^{p+1}) over the active set.
inline double nonlinear_mass(const Problem& problem, const VertexFunction& u) {
  const auto& g = problem.graph();
  double s = 0.0;
  for (VertexIndex x : problem.active())
    s += g.mu(x) * problem.nonlinear_power(u[x]);
  return s;
}

inline double energy(const Problem& problem, const VertexFunction& u) {
  return 0.5 * quadratic_part(problem, u) -
         nonlinear_mass(problem, u) / (problem.p() + 1.0);
}

/// r(x) = −Δu(x) + c(x)u(x) − N(u(x)) on the active set, zero elsewhere.
/// The Euclidean gradient of energy() is μ(x)·r(x).
inline VertexFunction el_residual(const Problem& problem,
                                  const VertexFunction& u) {
  problem.check(u);
  const auto& g = problem.graph();
  VertexFunction r(g.size());
  for (VertexIndex x : problem.active())
    r[x] = -laplacian(g, u, x) + problem.coefficient(x) * u[x] -
           problem.nonlinear(u[x]);
  return r;
}

/// A − B; zero exactly on the Nehari manifold.
inline double nehari_residual(const Problem& problem, const VertexFunction& u) {
  return quadratic_part(problem, u) - nonlinear_mass(problem, u);
}

/// |A − B| / max(A, B).
inline double nehari_residual_relative(const Problem& problem,
                                       const VertexFunction& u) {
  const double a = quadratic_part(problem, u);
  const double b = nonlinear_mass(problem, u);
  const double scale = std::max(a, b);
  return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

/// t* with t*·u on the Nehari manifold: t*^2 A = t*^{p+1} B.
inline double nehari_scale(const Problem& problem, const VertexFunction& u) {
  problem.check(u);
  if (u.is_zero()) throw Error("cannot project the zero function");
  const double a = quadratic_part(problem, u);
  const double b = nonlinear_mass(problem, u);
  if (!(b > 0.0))
    throw Error("function has no nonlinear mass to balance");
  return std::pow(a / b, 1.0 / (problem.p() - 1.0));
}

inline VertexFunction nehari_project(const Problem& problem,
                                     const VertexFunction& u) {
  return nehari_scale(problem, u) * u;
}

/// (p−1) / (2(p+1)): energy per unit squared norm on the Nehari manifold.
inline double nehari_energy_factor(double p) {
  return (p - 1.0) / (2.0 * (p + 1.0));
}

}  // namespace nlsg
