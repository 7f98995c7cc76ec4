#pragma once

// Discrete differential calculus on a measured weighted graph.

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <span>
#include <vector>

#include "nlsg/graph.hpp"

namespace nlsg {

/// A real value at every vertex of a graph.
class VertexFunction {
public:
  VertexFunction() = default;
  explicit VertexFunction(std::size_t n, double fill = 0.0) : v_(n, fill) {}
  explicit VertexFunction(std::vector<double> values) : v_(std::move(values)) {}
  VertexFunction(std::initializer_list<double> values) : v_(values) {}

  std::size_t size() const noexcept { return v_.size(); }
  double& operator[](VertexIndex x) { return v_[x]; }
  double operator[](VertexIndex x) const { return v_[x]; }
  std::span<const double> values() const noexcept { return v_; }
  std::vector<double>& raw() noexcept { return v_; }
  const std::vector<double>& raw() const noexcept { return v_; }

  bool finite() const {
    return std::all_of(v_.begin(), v_.end(),
                       [](double t) { return std::isfinite(t); });
  }
  double max_abs() const {
    double m = 0.0;
    for (double t : v_) m = std::max(m, std::abs(t));
    return m;
  }
  bool is_zero() const { return max_abs() == 0.0; }

  VertexFunction& operator+=(const VertexFunction& o) {
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
    return *this;
  }
  VertexFunction& operator-=(const VertexFunction& o) {
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
    return *this;
  }
  VertexFunction& operator*=(double s) {
    for (double& t : v_) t *= s;
    return *this;
  }
  friend VertexFunction operator+(VertexFunction a, const VertexFunction& b) {
    return a += b;
  }
  friend VertexFunction operator-(VertexFunction a, const VertexFunction& b) {
    return a -= b;
  }
  friend VertexFunction operator*(double s, VertexFunction a) { return a *= s; }
  friend bool operator==(const VertexFunction&, const VertexFunction&) = default;

private:
  std::vector<double> v_;
};

inline double distance_inf(const VertexFunction& a, const VertexFunction& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

inline void check_function(const WeightedGraph& graph, const VertexFunction& u) {
  if (u.size() != graph.size())
    throw Error("vertex function has " + std::to_string(u.size()) +
                " values, graph has " + std::to_string(graph.size()) +
                " vertices");
  if (!u.finite()) throw Error("vertex function has non-finite values");
}

/// Δu(x) = (1/μ(x)) Σ_{y∼x} w_xy (u(y) − u(x)).
inline double laplacian(const WeightedGraph& graph, const VertexFunction& u,
                        VertexIndex x) {
  graph.check_vertex(x);
  double s = 0.0;
  for (const auto& nb : graph.neighbors(x))
    s += nb.weight * (u[nb.vertex] - u[x]);
  return s / graph.mu(x);
}

inline VertexFunction laplacian(const WeightedGraph& graph,
                                const VertexFunction& u) {
  check_function(graph, u);
  VertexFunction out(graph.size());
  for (VertexIndex x = 0; x < graph.size(); ++x)
    out[x] = laplacian(graph, u, x);
  return out;
}

/// Γ(u,v)(x) = (1/(2μ(x))) Σ_{y∼x} w_xy (u(y)−u(x))(v(y)−v(x)).
inline double gamma(const WeightedGraph& graph, const VertexFunction& u,
                    const VertexFunction& v, VertexIndex x) {
  graph.check_vertex(x);
  double s = 0.0;
  for (const auto& nb : graph.neighbors(x))
    s += nb.weight * ((u[nb.vertex] - u[x]) * (v[nb.vertex] - v[x]));
  return s / (2.0 * graph.mu(x));
}

inline double gradient_length(const WeightedGraph& graph,
                              const VertexFunction& u, VertexIndex x) {
  return std::sqrt(gamma(graph, u, u, x));
}

/// Σ_{x∈region} μ(x) f(x).
inline double integrate(const WeightedGraph& graph, const VertexFunction& f,
                        const VertexSet& region) {
  double s = 0.0;
  for (VertexIndex x : region) {
    graph.check_vertex(x);
    s += graph.mu(x) * f[x];
  }
  return s;
}

inline double integrate(const WeightedGraph& graph, const VertexFunction& f) {
  return integrate(graph, f, graph.all_vertices());
}

inline constexpr double kInfinityNorm = std::numeric_limits<double>::infinity();

/// L^q norm over `region`; q = kInfinityNorm gives the max norm.
inline double lp_norm(const WeightedGraph& graph, const VertexFunction& u,
                      double q, const VertexSet& region) {
  if (!(q >= 1.0)) throw Error("L^q norm requires q >= 1");
  if (std::isinf(q)) {
    double m = 0.0;
    for (VertexIndex x : region) {
      graph.check_vertex(x);
      m = std::max(m, std::abs(u[x]));
    }
    return m;
  }
  double s = 0.0;
  for (VertexIndex x : region) {
    graph.check_vertex(x);
    s += graph.mu(x) * std::pow(std::abs(u[x]), q);
  }
  return std::pow(s, 1.0 / q);
}

inline double lp_norm(const WeightedGraph& graph, const VertexFunction& u,
                      double q) {
  return lp_norm(graph, u, q, graph.all_vertices());
}

/// ∫_region |∇u|² dμ.
inline double dirichlet_energy(const WeightedGraph& graph,
                               const VertexFunction& u,
                               const VertexSet& region) {
  double s = 0.0;
  for (VertexIndex x : region) s += graph.mu(x) * gamma(graph, u, u, x);
  return s;
}

inline double norm_w12(const WeightedGraph& graph, const VertexFunction& u) {
  check_function(graph, u);
  double s = 0.0;
  for (VertexIndex x = 0; x < graph.size(); ++x)
    s += graph.mu(x) * (gamma(graph, u, u, x) + u[x] * u[x]);
  return std::sqrt(s);
}

/// (∫_V |∇u|² + (λa+1)u² dμ)^{1/2}.
inline double norm_e_lambda(const WeightedGraph& graph, const VertexFunction& u,
                            const Potential& a, double lambda) {
  if (!(lambda > 0.0)) throw Error("lambda must be positive");
  check_function(graph, u);
  double s = 0.0;
  for (VertexIndex x = 0; x < graph.size(); ++x)
    s += graph.mu(x) *
         (gamma(graph, u, u, x) + (lambda * a[x] + 1.0) * u[x] * u[x]);
  return std::sqrt(s);
}

inline void check_supported_in(const WeightedGraph& graph, const Domain& domain,
                               const VertexFunction& u) {
  check_function(graph, u);
  std::vector<char> in(graph.size(), 0);
  for (VertexIndex x : domain.interior) in[x] = 1;
  for (VertexIndex x = 0; x < graph.size(); ++x)
    if (!in[x] && u[x] != 0.0)
      throw Error("function is nonzero at '" + graph.name(x) +
                  "' outside the domain");
}

/// (∫_{Ω∪∂Ω} |∇u|² dμ + ∫_Ω u² dμ)^{1/2} for u vanishing off Ω.
inline double norm_w12_zero(const WeightedGraph& graph, const Domain& domain,
                            const VertexFunction& u) {
  check_supported_in(graph, domain, u);
  double s = dirichlet_energy(graph, u, domain.closure());
  for (VertexIndex x : domain.interior) s += graph.mu(x) * u[x] * u[x];
  return std::sqrt(s);
}

namespace detail {
inline double relative_gap(double lhs, double rhs) {
  const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
  return std::abs(lhs - rhs) / scale;
}
}  // namespace detail

/// Relative discrepancy in ∫_V Γ(u,v) dμ = −∫_V (Δu) v dμ.
inline double check_integration_by_parts(const WeightedGraph& graph,
                                         const VertexFunction& u,
                                         const VertexFunction& v) {
  check_function(graph, u);
  check_function(graph, v);
  double lhs = 0.0, rhs = 0.0;
  for (VertexIndex x = 0; x < graph.size(); ++x) {
    lhs += graph.mu(x) * gamma(graph, u, v, x);
    rhs -= graph.mu(x) * laplacian(graph, u, x) * v[x];
  }
  return detail::relative_gap(lhs, rhs);
}

/// Relative discrepancy in ∫_{Ω∪∂Ω} Γ(u,v) dμ = −∫_Ω (Δu) v dμ for v
/// vanishing off Ω. Δu at x ∈ Ω sees every neighbor, including ∂Ω.
inline double check_integration_by_parts_dirichlet(const WeightedGraph& graph,
                                                   const Domain& domain,
                                                   const VertexFunction& u,
                                                   const VertexFunction& v) {
  check_function(graph, u);
  check_supported_in(graph, domain, v);
  double lhs = 0.0, rhs = 0.0;
  for (VertexIndex x : domain.closure())
    lhs += graph.mu(x) * gamma(graph, u, v, x);
  for (VertexIndex x : domain.interior)
    rhs -= graph.mu(x) * laplacian(graph, u, x) * v[x];
  return detail::relative_gap(lhs, rhs);
}

}  // namespace nlsg
