// nlsg: ground states of −Δu + (λa+1)u = |u|^{p−1}u on weighted graphs.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "nlsg/experiment.hpp"

namespace fs = std::filesystem;
using namespace nlsg;

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

/// "1e0:1e9:x10" (geometric), "0.5:2:+0.5" (arithmetic) or "1,10,100".
std::vector<double> parse_lambdas(const std::string& spec) {
  auto to_real = [](const std::string& t) {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw Error("bad number '" + t + "' in lambda list");
    return v;
  };
  if (spec.find(':') == std::string::npos) {
    std::vector<double> out;
    for (const auto& t : split(spec, ',')) out.push_back(to_real(t));
    return out;
  }
  const auto parts = split(spec, ':');
  if (parts.size() != 3 || parts[2].size() < 2)
    throw Error("lambda range must look like START:END:xFACTOR or START:END:+STEP");
  const double start = to_real(parts[0]), end = to_real(parts[1]);
  const double step = to_real(parts[2].substr(1));
  std::vector<double> out;
  if (parts[2][0] == 'x') {
    if (!(step > 1.0)) throw Error("geometric factor must exceed 1");
    for (int k = 0;; ++k) {
      const double v = start * std::pow(step, k);
      if (v > end * (1 + 1e-12)) break;
      out.push_back(v);
    }
  } else if (parts[2][0] == '+') {
    if (!(step > 0.0)) throw Error("arithmetic step must be positive");
    for (int k = 0;; ++k) {
      const double v = start + k * step;
      if (v > end + 1e-12 * std::abs(end)) break;
      out.push_back(v);
    }
  } else {
    throw Error("lambda step must start with 'x' or '+'");
  }
  return out;
}

struct SolverFlags {
  std::uint64_t seed = 1;
  int starts = 8;
  double tol = 1e-10;

  void add(CLI::App* app) {
    app->add_option("--seed", seed, "random seed");
    app->add_option("--starts", starts, "number of multistart runs")->check(CLI::PositiveNumber);
    app->add_option("--tol", tol, "residual tolerance (max norm)")->check(CLI::PositiveNumber);
  }
  SolverConfig config() const {
    SolverConfig c;
    c.seed = seed;
    c.n_starts = starts;
    c.el_tolerance = tol;
    return c;
  }
};

void print_state(const WeightedGraph& g, const GroundState& s, const Problem& problem) {
  const auto rep = verify_solution(problem, s.u);
  std::printf("energy            %.17g\n", s.energy);
  std::printf("residual (max)    %.3e\n", s.el_residual_inf);
  std::printf("nehari (rel)      %.3e\n", s.nehari_residual);
  std::printf("norm / sigma      %.6g / %.6g\n", rep.norm, rep.sigma);
  std::printf("start / iters     %d / %d (seed %llu)\n", s.start_index, s.iterations,
              static_cast<unsigned long long>(s.seed));
  for (VertexIndex x = 0; x < g.size(); ++x)
    std::printf("  %-10s % .17g\n", g.name(x).c_str(), s.u[x]);
}

int run_verify(const GraphWithPotential& inst, int trials, std::uint64_t seed) {
  const auto& g = inst.graph;
  const auto report = validate(g);
  Rng rng(seed);
  auto random_fn = [&] {
    VertexFunction u(g.size());
    for (VertexIndex x = 0; x < g.size(); ++x) u[x] = rng.uniform(-2.0, 2.0);
    return u;
  };
  double ibp = 0, ibp_d = 0, sym = 0, div = 0;
  bool embedding = true;
  for (int t = 0; t < trials; ++t) {
    auto u = random_fn(), v = random_fn();
    ibp = std::max(ibp, check_integration_by_parts(g, u, v));
    // Random domain: breadth-first ball around a random root.
    const auto root = static_cast<VertexIndex>(rng.bits() % g.size());
    const auto target = 1 + static_cast<std::size_t>(rng.bits() % g.size());
    std::vector<VertexIndex> order{root};
    std::vector<char> in(g.size(), 0);
    in[root] = 1;
    for (std::size_t k = 0; k < order.size() && order.size() < target; ++k)
      for (const auto& nb : g.neighbors(order[k]))
        if (!in[nb.vertex] && order.size() < target) {
          in[nb.vertex] = 1;
          order.push_back(nb.vertex);
        }
    const Domain d = boundary(g, order);
    auto vd = v;
    for (VertexIndex x = 0; x < g.size(); ++x)
      if (!d.contains(x)) vd[x] = 0.0;
    ibp_d = std::max(ibp_d, check_integration_by_parts_dirichlet(g, d, u, vd));

    double scale = 1.0;
    for (VertexIndex x = 0; x < g.size(); ++x) {
      const double a = gamma(g, u, v, x), b = gamma(g, v, u, x);
      sym = std::max(sym, std::abs(a - b) / std::max(1.0, std::abs(a)));
      scale = std::max(scale, g.mu(x) * std::abs(laplacian(g, u, x)));
    }
    div = std::max(div, std::abs(integrate(g, laplacian(g, u))) / scale);

    const double lambda = std::pow(10.0, rng.uniform(0.0, 6.0));
    const double e = norm_e_lambda(g, u, inst.potential, lambda);
    const double sup = lp_norm(g, u, kInfinityNorm);
    const double l2 = lp_norm(g, u, 2.0);
    embedding = embedding && sup <= std::pow(g.mu_min(), -0.5) * e * (1 + 1e-12);
    for (double q : {3.0, 4.0, 6.0})
      embedding = embedding &&
                  std::pow(lp_norm(g, u, q), q) <= std::pow(sup, q - 2) * l2 * l2 * (1 + 1e-12);
  }
  auto line = [](bool ok, const char* what, double v) {
    std::printf("[%s] %-34s %.3e\n", ok ? "PASS" : "FAIL", what, v);
    return ok;
  };
  bool ok = true;
  std::printf("[%s] %-34s mu_min = %.17g\n", report.ok() ? "PASS" : "FAIL", "graph validation",
              report.mu_min);
  ok &= report.ok();
  ok &= line(ibp <= 1e-12, "integration by parts", ibp);
  ok &= line(ibp_d <= 1e-12, "integration by parts (Dirichlet)", ibp_d);
  ok &= line(sym <= 1e-13, "gradient form symmetry", sym);
  ok &= line(div <= 1e-13, "divergence theorem", div);
  std::printf("[%s] %-34s %d trials\n", embedding ? "PASS" : "FAIL", "embedding inequalities",
              trials);
  ok &= embedding;
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ground states of discrete nonlinear Schrodinger equations on graphs"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "ground state of the full-graph problem");
  std::string graph_file, out_file;
  double lambda = 1.0, p = 2.0;
  bool positive = false;
  SolverFlags solve_flags;
  solve->add_option("--graph", graph_file, "graph file")->required()->check(CLI::ExistingFile);
  solve->add_option("--lambda", lambda, "potential coupling")->required();
  solve->add_option("--p", p, "exponent p >= 2")->required();
  solve->add_flag("--positive", positive, "use the positive-part nonlinearity");
  solve->add_option("--out", out_file, "solution CSV")->required();
  solve_flags.add(solve);

  // dirichlet
  auto* dir = app.add_subcommand("dirichlet", "ground state of the Dirichlet problem on a domain");
  std::string omega;
  bool omega_from_well = false;
  SolverFlags dir_flags;
  dir->add_option("--graph", graph_file, "graph file")->required()->check(CLI::ExistingFile);
  auto* omega_opt = dir->add_option("--omega", omega, "comma-separated domain vertices");
  auto* well_opt = dir->add_flag("--omega-from-well", omega_from_well,
                                 "use the zero set of the potential");
  omega_opt->excludes(well_opt);
  dir->add_option("--p", p, "exponent p >= 2")->required();
  dir->add_flag("--positive", positive, "use the positive-part nonlinearity");
  dir->add_option("--out", out_file, "solution CSV")->required();
  dir_flags.add(dir);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "lambda sweep against the Dirichlet limit");
  std::string lambdas_spec, out_dir;
  bool cold = false;
  double report_tol = 1e-3;
  SolverFlags sweep_flags;
  sweep->add_option("--graph", graph_file, "graph file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--lambdas", lambdas_spec, "e.g. 1e0:1e9:x10 or 1,10,100")->required();
  sweep->add_option("--p", p, "exponent p >= 2")->required();
  sweep->add_flag("--positive", positive, "use the positive-part nonlinearity");
  sweep->add_flag("--cold", cold, "solve each lambda without warm start");
  sweep->add_option("--report-tol", report_tol, "tolerance of the convergence verdict");
  sweep->add_option("--out", out_dir, "output directory")->required();
  sweep_flags.add(sweep);

  // g9
  auto* g9 = app.add_subcommand("g9", "nine-vertex reproduction run");
  std::uint64_t g9_seed = 42;
  std::string g9_out = ".";
  g9->add_option("--seed", g9_seed, "random seed");
  g9->add_option("--out", g9_out, "output directory");
  g9->add_option("--report-tol", report_tol, "tolerance of the convergence verdict");

  // verify
  auto* verify = app.add_subcommand("verify", "discrete calculus identity checks");
  int trials = 100;
  std::uint64_t verify_seed = 1;
  verify->add_option("--graph", graph_file, "graph file")->required()->check(CLI::ExistingFile);
  verify->add_option("--trials", trials, "random trials")->check(CLI::PositiveNumber);
  verify->add_option("--seed", verify_seed, "random seed");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto nl = positive ? Nonlinearity::PositivePart : Nonlinearity::Signed;
    if (*solve) {
      const auto inst = parse_graph(read_text(graph_file));
      const auto problem = Problem::full_graph(inst.graph, inst.potential, lambda, p, nl);
      const auto s = solve_ground_state(problem, solve_flags.config());
      write_text(out_file, solution_csv(problem, s.u, inst.potential));
      print_state(inst.graph, s, problem);
    } else if (*dir) {
      if (omega.empty() && !omega_from_well)
        throw Error("one of --omega or --omega-from-well is required");
      const auto inst = parse_graph(read_text(graph_file));
      const Domain d = omega_from_well ? potential_well(inst.graph, inst.potential)
                                       : boundary(inst.graph, split(omega, ','));
      const auto problem = Problem::dirichlet(inst.graph, d, p, nl);
      const auto s = solve_ground_state(problem, dir_flags.config());
      write_text(out_file, solution_csv(problem, s.u, inst.potential));
      print_state(inst.graph, s, problem);
    } else if (*sweep) {
      const auto inst = parse_graph(read_text(graph_file));
      const auto lambdas = parse_lambdas(lambdas_spec);
      const auto result = lambda_sweep(inst.graph, inst.potential, p, lambdas,
                                       sweep_flags.config(), nl,
                                       cold ? StartMode::Cold : StartMode::Warm);
      write_text(fs::path(out_dir) / "sweep.csv", sweep_csv(result));
      print_report(std::cout, convergence_report(result, report_tol));
    } else if (*g9) {
      SolverConfig cfg;
      cfg.seed = g9_seed;
      const auto run = run_g9(cfg);
      write_text(fs::path(g9_out) / "sweep.csv", run.sweep_csv);
      write_text(fs::path(g9_out) / "trend.csv", run.trend_csv);
      print_report(std::cout, convergence_report(run.sweep, report_tol));
    } else if (*verify) {
      return run_verify(parse_graph(read_text(graph_file)), trials, verify_seed);
    }
  } catch (const SweepAborted& e) {
    std::cerr << "error: sweep aborted at lambda " << e.failing_lambda() << ": " << e.what()
              << " (" << e.partial().lambdas.size() << " lambdas completed)\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
