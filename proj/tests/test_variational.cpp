#include <gtest/gtest.h>

#include <cmath>

#include "nlsg/variational.hpp"
#include "test_support.hpp"

using namespace nlsg;

namespace {

const WeightedGraph& single_vertex() {
  static const WeightedGraph g({"x1"}, {1.0}, {});
  return g;
}
const WeightedGraph& k2() {
  static const WeightedGraph g({"x1", "x2"}, {1, 1}, {{0, 1, 1.0}});
  return g;
}
const WeightedGraph& p3() {
  static const WeightedGraph g({"x1", "x2", "x3"}, {1, 1, 1}, {{0, 1, 1.0}, {1, 2, 1.0}});
  return g;
}

Problem single_problem(double p = 2.0, Nonlinearity nl = Nonlinearity::Signed) {
  return Problem::full_graph(single_vertex(), Potential{{0.0}}, 1.0, p, nl);
}

Problem p3_dirichlet(double p = 2.0) {
  return Problem::dirichlet(p3(), boundary(p3(), VertexSet{1}), p);
}

double rel(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace

TEST(Problem, RejectsBadParameters) {
  EXPECT_THROW(Problem::full_graph(k2(), Potential{{0, 0}}, 0.0, 2.0), Error);
  EXPECT_THROW(Problem::full_graph(k2(), Potential{{0, 0}}, 1.0, 1.5), Error);
  EXPECT_THROW(Problem::full_graph(k2(), Potential{{0, -1}}, 1.0, 2.0), Error);
  EXPECT_THROW(Problem::full_graph(k2(), Potential{{0}}, 1.0, 2.0), Error);
  EXPECT_NO_THROW(Problem::full_graph(k2(), Potential{{0, 0}}, 0.5, 2.0));
}

TEST(Energy, HandValues) {
  EXPECT_DOUBLE_EQ(energy(single_problem(), VertexFunction{1.0}), 1.0 / 6.0);
  EXPECT_EQ(energy(single_problem(), VertexFunction{0.0}), 0.0);
  EXPECT_DOUBLE_EQ(energy(p3_dirichlet(), VertexFunction{0, 3, 0}), 4.5);
  EXPECT_THROW(energy(p3_dirichlet(), VertexFunction{1, 3, 0}), Error);
}

TEST(Energy, PositivePartKeepsQuadraticTerm) {
  auto pr = single_problem(2.0, Nonlinearity::PositivePart);
  EXPECT_DOUBLE_EQ(energy(pr, VertexFunction{-1.0}), 0.5);
  EXPECT_DOUBLE_EQ(energy(pr, VertexFunction{1.0}), 1.0 / 6.0);
}

TEST(ElResidual, KnownSolutions) {
  EXPECT_EQ(el_residual(single_problem(), VertexFunction{1.0})[0], 0.0);
  auto k2p = Problem::full_graph(k2(), Potential{{0, 0}}, 123.0, 2.0);
  auto r = el_residual(k2p, VertexFunction{1.0, 1.0});
  EXPECT_EQ(r[0], 0.0);
  EXPECT_EQ(r[1], 0.0);
  auto rd = el_residual(p3_dirichlet(), VertexFunction{0, 3, 0});
  EXPECT_EQ(rd[1], 0.0);
  EXPECT_EQ(rd[0], 0.0);  // off Ω the residual is not defined and reported as 0
}

TEST(NehariScale, HandValues) {
  // Single vertex, p = 2, u = 2: A = 4, B = 8.
  EXPECT_DOUBLE_EQ(nehari_scale(single_problem(), VertexFunction{2.0}), 0.5);
  EXPECT_DOUBLE_EQ(nehari_scale(single_problem(), VertexFunction{1.0}), 1.0);
  auto scaled = nehari_project(single_problem(), VertexFunction{2.0});
  EXPECT_DOUBLE_EQ(scaled[0], 1.0);
  EXPECT_THROW(nehari_scale(single_problem(), VertexFunction{0.0}), Error);
  EXPECT_THROW(nehari_scale(single_problem(2.0, Nonlinearity::PositivePart), VertexFunction{-1.0}),
               Error);
}

TEST(NehariResidual, HandValues) {
  EXPECT_EQ(nehari_residual(single_problem(), VertexFunction{1.0}), 0.0);
  EXPECT_EQ(nehari_residual(single_problem(), VertexFunction{2.0}), -4.0);
}

namespace {

/// Random problem alternating variant, nonlinearity and exponent.
Problem random_problem(const GraphWithPotential& inst, std::uint64_t seed) {
  const double p = (seed % 2 == 0) ? 2.0 : 3.0;
  const auto nl = (seed % 4 < 2) ? Nonlinearity::Signed : Nonlinearity::PositivePart;
  if (seed % 3 == 0) {
    auto omega = test_support::random_connected_subset(inst.graph, seed);
    return Problem::dirichlet(inst.graph, boundary(inst.graph, omega), p, nl);
  }
  const double lambda = (seed % 5 == 0) ? 10.0 : 1.0 + (seed % 7);
  return Problem::full_graph(inst.graph, inst.potential, lambda, p, nl);
}

VertexFunction random_admissible(const Problem& problem, Rng& rng, double lo = -2.0,
                                 double hi = 2.0) {
  auto u = test_support::random_function(problem.graph().size(), rng, lo, hi);
  return problem.restrict_to_active(u);
}

}  // namespace

TEST(Variational, GradientMatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto inst = test_support::random_instance(seed, 2, 8);
    auto problem = random_problem(inst, seed);
    Rng rng(seed + 1);
    auto u = random_admissible(problem, rng);
    auto r = el_residual(problem, u);
    for (VertexIndex x : problem.active()) {
      const double eps = 1e-6 * std::max(1.0, std::abs(u[x]));
      auto up = u, um = u;
      up[x] += eps;
      um[x] -= eps;
      const double fd = (energy(problem, up) - energy(problem, um)) / (2 * eps);
      const double an = inst.graph.mu(x) * r[x];
      EXPECT_LE(std::abs(fd - an), 1e-6 * std::max(1.0, std::abs(an)))
          << "seed " << seed << " vertex " << x;
    }
  }
}

TEST(Variational, NehariProjectionProperties) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto inst = test_support::random_instance(seed, 2, 10);
    auto problem = random_problem(inst, seed);
    Rng rng(seed + 2);
    auto u = random_admissible(problem, rng, 0.05, 2.0);
    const auto proj = nehari_project(problem, u);

    // Residual of the projection vanishes.
    EXPECT_LE(nehari_residual_relative(problem, proj), 1e-12) << "seed " << seed;

    // Scale invariance: t*(cu)·cu == t*(u)·u.
    const double c = rng.uniform(0.1, 10.0);
    const auto proj_c = nehari_project(problem, c * u);
    for (VertexIndex x = 0; x < u.size(); ++x)
      EXPECT_LE(std::abs(proj_c[x] - proj[x]), 1e-12 * std::max(1.0, std::abs(proj[x])));

    // On-manifold energy identity and positivity.
    const double a = quadratic_part(problem, proj);
    const double j = energy(problem, proj);
    EXPECT_LE(rel(j, nehari_energy_factor(problem.p()) * a), 1e-12);
    EXPECT_GT(j, 0.0);

    // The fiber map t ↦ J(tu) peaks at t*.
    const double t = nehari_scale(problem, u);
    EXPECT_GT(j, energy(problem, (0.5 * t) * u));
    EXPECT_GT(j, energy(problem, (2.0 * t) * u));
  }
}

TEST(Variational, EnergyMonotoneInLambda) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto inst = test_support::random_instance(seed, 3, 10);
    Rng rng(seed + 3);
    auto u = test_support::random_function(inst.graph.size(), rng);
    auto lo = Problem::full_graph(inst.graph, inst.potential, 1.0, 2.0);
    auto hi = Problem::full_graph(inst.graph, inst.potential, 10.0, 2.0);
    EXPECT_GE(energy(hi, u), energy(lo, u));
  }
}

TEST(Variational, DirichletMatchesFullGraphOnWellSupportedFunctions) {
  // For u supported in the well, J_λ(u) = J_Ω(u) for every λ.
  auto [g, a] = builtin_g9();
  auto well = potential_well(g, a);
  auto dp = Problem::dirichlet(g, well, 2.0);
  Rng rng(77);
  for (int k = 0; k < 10; ++k) {
    auto u = test_support::zero_outside(test_support::random_function(9, rng), well);
    for (double lambda : {1.0, 1e3, 1e9}) {
      auto fp = Problem::full_graph(g, a, lambda, 2.0);
      EXPECT_LE(rel(energy(fp, u), energy(dp, u)), 1e-14);
    }
  }
}
