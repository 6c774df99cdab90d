#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "almlab/gallery.hpp"
#include "almlab/io.hpp"
#include "almlab/multipliers.hpp"
#include "almlab/ocp.hpp"

namespace fs = std::filesystem;
using namespace almlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitNoConvergence = 2;

std::string resolve_out_dir(std::string flag_value) {
  if (const char* env = std::getenv("ALMLAB_OUT_DIR")) return env;
  return flag_value;
}

struct SolveFlags {
  std::string problem_path;
  double beta = 1.0;
  int max_outer = 200;
  double tol_primal = 1e-8;
  double tol_step = 1e-10;
  double inner_tol = 1e-9;
  int probes = 0;  // 0 = default rule
  std::uint64_t seed = 0;
  std::string out_dir = ".";
};

Json config_json(const AlmConfig& cfg, std::uint64_t seed, std::size_t probe_count) {
  return Json{{"beta", cfg.beta},
              {"max_outer", cfg.max_outer},
              {"tol_primal", cfg.tol_primal},
              {"tol_step", cfg.tol_step},
              {"inner",
               {{"max_iter", cfg.inner.max_iter},
                {"tol_grad_abs", cfg.inner.tol_grad_abs},
                {"tighten_exponent", cfg.inner.tighten_exponent}}},
              {"seed", seed},
              {"probe_count", probe_count}};
}

int write_run_artifacts(const ModelProblem& problem, const AlmConfig& cfg,
                        const Solution& sol, const AlmTrace& trace,
                        std::uint64_t seed, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const std::string trace_path = (fs::path(out_dir) / "trace.csv").string();
  write_trace_csv(trace_path, trace);

  Json summary;
  summary["config"] = config_json(cfg, seed, trace.probes.size());
  summary["problem"] = problem_to_json(problem);
  summary["solution"] = {{"u", sol.u_final},
                         {"zeta", sol.zeta_final},
                         {"lambda", sol.lambda_final},
                         {"converged", sol.converged},
                         {"termination_reason", sol.termination_reason},
                         {"outer_iterations", trace.records.size()}};
  SamplePlan plan;
  plan.count = 64;
  plan.seed = seed;
  try {
    std::vector<Vector> extra;
    for (std::size_t i = trace.records.size() >= 4 ? trace.records.size() - 4 : 0;
         i < trace.records.size(); ++i)
      extra.push_back(trace.records[i].zeta);
    MultiplierReport report =
        essential_multiplier(problem, sol.u_final, 1e-8, plan, extra);
    summary["multiplier_report"] = multiplier_report_to_json(report);
  } catch (const Error& e) {
    summary["multiplier_report"] = {{"error", e.what()}};
  }
  summary["trace_csv"] = "trace.csv";
  summary["metadata"] = {
      {"timestamp",
       std::chrono::duration_cast<std::chrono::seconds>(
           std::chrono::system_clock::now().time_since_epoch())
           .count()}};

  std::ofstream out(fs::path(out_dir) / "summary.json");
  out << summary.dump(2) << "\n";
  return sol.converged ? kExitOk : kExitNoConvergence;
}

int cmd_solve(const SolveFlags& flags) {
  ModelProblem problem = load_problem_file(flags.problem_path);
  AlmConfig cfg;
  cfg.beta = flags.beta;
  cfg.max_outer = flags.max_outer;
  cfg.tol_primal = flags.tol_primal;
  cfg.tol_step = flags.tol_step;
  cfg.inner.tol_grad_abs = flags.inner_tol;

  std::vector<Vector> probes;
  if (flags.probes > 0) {
    const std::vector<Vector> pool = default_probes(problem.S.cols(), flags.seed);
    for (int i = 0; i < flags.probes && i < static_cast<int>(pool.size()); ++i)
      probes.push_back(pool[i]);
  }

  const std::string out_dir = resolve_out_dir(flags.out_dir);
  try {
    auto [sol, trace] = alm_solve(problem, cfg, probes);
    const int code = write_run_artifacts(problem, cfg, sol, trace, flags.seed, out_dir);
    std::cout << (sol.converged ? "converged" : "did not converge") << " after "
              << trace.records.size() << " outer iterations (r_norm "
              << format_sig17(trace.records.back().r_norm) << ")\n";
    return code;
  } catch (const AlmError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    if (!e.partial_trace.records.empty()) {
      Solution partial;
      partial.u_final = e.partial_trace.records.back().u;
      partial.zeta_final = e.partial_trace.records.back().zeta;
      partial.lambda_final = e.partial_trace.records.back().lambda;
      partial.converged = false;
      partial.termination_reason = e.what();
      write_run_artifacts(problem, cfg, partial, e.partial_trace, flags.seed, out_dir);
    }
    return kExitNoConvergence;
  }
}

struct ExampleFlags {
  std::string name;
  double alpha = 1.0;
  double r = 0.25;
  double beta = 1.0;
  int n = 63;
};

bool report_check(const std::string& label, bool ok) {
  std::cout << "  [" << (ok ? "ok" : "FAIL") << "] " << label << "\n";
  return ok;
}

int run_tangent_ball_example(double alpha) {
  std::cout << "objective 1/2[(x1-" << alpha << ")^2 + x2^2], S = [[1,0],[0,0]], "
            << "K = ball((0,1),1)\n";
  ModelProblem problem = gallery::tangent_ball(alpha);
  const Vector u_star{0.0, 0.0};
  SamplePlan plan;
  plan.count = 128;
  plan.seed = 17;
  MultiplierReport report = essential_multiplier(problem, u_star, 1e-10, plan);
  std::cout << "minimizer (0, 0); essential multiplier ("
            << format_sig17((*report.essential)[0]) << ", "
            << format_sig17((*report.essential)[1]) << ")\n";
  bool ok = report_check("essential multiplier equals (alpha, 0)",
                         std::abs((*report.essential)[0] - alpha) <= 1e-8 &&
                             std::abs((*report.essential)[1]) <= 1e-8);
  ok &= report_check("stationarity residual <= 1e-10",
                     report.stationarity_residual <= 1e-10);

  if (alpha == 0.0) {
    ProperCandidateAnalysis analysis =
        proper_candidate_check(problem, u_star, {0.0, 0.0}, 1e-8, plan);
    std::cout << "candidate (0,0): normal-cone residual "
              << format_sig17(analysis.normal_cone_residual) << "\n";
    ok &= report_check("zero candidate passes the proper-multiplier checks",
                       analysis.stationarity_residual <= 1e-8 &&
                           analysis.normal_cone_residual <= 1e-8);
  } else {
    bool all_fail = true;
    for (double t = -2.0; t <= 2.0 + 1e-9; t += 0.5) {
      ProperCandidateAnalysis analysis =
          proper_candidate_check(problem, u_star, {alpha, t}, 1e-8, plan);
      std::cout << "candidate (" << alpha << ", " << t << "): normal-cone residual "
                << format_sig17(analysis.normal_cone_residual) << "\n";
      all_fail &= analysis.normal_cone_residual > 1e-8;
    }
    ok &= report_check("every candidate (alpha, t) fails the normal-cone test",
                       all_fail);
    std::cout << "verdict: no proper Lagrange multiplier (alpha != 0)\n";
  }
  return ok ? kExitOk : kExitNoConvergence;
}

int run_tangent_ball_chord_example(double alpha) {
  std::cout << "objective 1/2[(x1-" << alpha << ")^2 + x2^2], "
            << "K = ball((0,1),1) cut by the chord z1 <= z2\n";
  ModelProblem problem = gallery::tangent_ball_chord(alpha);
  const Vector u_star{0.0, 0.0};
  SamplePlan plan;
  plan.count = 128;
  plan.seed = 17;
  MultiplierReport report = essential_multiplier(problem, u_star, 1e-10, plan);
  const Vector lambda_star = *report.essential;
  std::cout << "essential multiplier (" << format_sig17(lambda_star[0]) << ", "
            << format_sig17(lambda_star[1]) << ")\n";
  bool ok = report_check("essential multiplier equals (alpha, 0)",
                         std::abs(lambda_star[0] - alpha) <= 1e-8 &&
                             std::abs(lambda_star[1]) <= 1e-8);
  if (std::abs(alpha) <= 1e-12) {
    std::cout << "alpha = 0: essential multiplier vanishes, lambda = 0 is proper\n";
    return ok ? kExitOk : kExitNoConvergence;
  }

  const Vector zeta0 = lambda_star;  // lies in range(S), pairs positively with itself
  std::vector<Vector> candidates =
      normal_cone_candidates(problem.K, {0.0, 0.0}, 100, 17);
  int passes = 0;
  std::optional<Vector> constructed;
  for (const auto& lt : candidates) {
    try {
      CompatibilityResult res = compatibility_consistency_check(
          problem, u_star, lambda_star, lt, zeta0, 1e-8);
      if (res.compatibility && res.consistency) {
        ++passes;
        if (!constructed) constructed = res.constructed;
      }
    } catch (const Error&) {
    }
  }
  if (alpha < 0.0) {
    bool none = report_check(
        "consistency fails for every sampled normal-cone candidate", passes == 0);
    std::cout << "verdict: no proper Lagrange multiplier (alpha < 0)\n";
    return (ok && none) ? kExitOk : kExitNoConvergence;
  }
  bool built = report_check("compatibility + consistency produced a candidate",
                            passes > 0 && constructed.has_value());
  if (built) {
    std::cout << "constructed proper multiplier ("
              << format_sig17((*constructed)[0]) << ", "
              << format_sig17((*constructed)[1]) << ")\n";
  }
  return (ok && built) ? kExitOk : kExitNoConvergence;
}

int run_disk_example(const ExampleFlags& flags, bool half) {
  const double alpha = flags.alpha, r = flags.r;
  ModelProblem problem =
      half ? gallery::half_disk(alpha, r) : gallery::shifted_disk(alpha, r);
  std::cout << "objective 1/2[(x1-" << alpha << ")^2 + x2^2], K = "
            << (half ? "upper half of " : "") << "ball((" << r << ",0)," << r << ")\n";
  const Vector u_star{2.0 * r, 0.0};
  SamplePlan plan;
  plan.count = 128;
  plan.seed = 17;

  auto [certified, report] = optimality_certificate(problem, u_star, 1e-8, plan);
  std::cout << "minimizer (" << 2.0 * r << ", 0); certificate "
            << (certified ? "holds" : "fails") << "\n";
  bool ok = report_check("optimality certificate at (2r, 0)", certified);

  const Vector base{alpha - 2.0 * r, 0.0};
  ProperCandidateAnalysis analysis =
      proper_candidate_check(problem, u_star, base, 1e-8, plan);
  std::cout << "candidate (alpha-2r, 0): stationarity "
            << format_sig17(analysis.stationarity_residual) << ", normal-cone "
            << format_sig17(analysis.normal_cone_residual) << ", restriction gap "
            << format_sig17(analysis.restriction_gap) << "\n";
  ok &= report_check("(alpha-2r, 0) passes all proper-multiplier checks",
                     analysis.stationarity_residual <= 1e-8 &&
                         analysis.normal_cone_residual <= 1e-8 &&
                         analysis.restriction_gap <= 1e-8);

  if (!half) {
    for (double t : {0.1, -0.1}) {
      ProperCandidateAnalysis pert =
          proper_candidate_check(problem, u_star, {alpha - 2.0 * r, t}, 1e-8, plan);
      ok &= report_check("perturbed candidate t = " + std::to_string(t) + " fails",
                         pert.normal_cone_residual > 1e-8);
    }
    std::cout << "verdict: unique proper multiplier (alpha-2r, 0)\n";
  } else {
    for (double t : {-0.1, -0.5}) {
      ProperCandidateAnalysis good =
          proper_candidate_check(problem, u_star, {alpha - 2.0 * r, t}, 1e-8, plan);
      ok &= report_check("candidate t = " + std::to_string(t) + " passes",
                         good.stationarity_residual <= 1e-8 &&
                             good.normal_cone_residual <= 1e-8);
    }
    ProperCandidateAnalysis bad =
        proper_candidate_check(problem, u_star, {alpha - 2.0 * r, 0.1}, 1e-8, plan);
    ok &= report_check("candidate t = +0.1 fails", bad.normal_cone_residual > 1e-8);
    std::cout << "verdict: proper multipliers (alpha-2r, t) for every t <= 0\n";
  }
  return ok ? kExitOk : kExitNoConvergence;
}

int run_alm_toy_example(double beta) {
  std::cout << "min 1/2 x^2 s.t. x = 1, 2x = 2; beta = " << beta << "\n";
  ModelProblem problem = gallery::redundant_equalities();
  AlmConfig cfg;
  cfg.beta = beta;
  cfg.max_outer = 30;
  cfg.tol_primal = 1e-300;  // run the full 30 iterations
  cfg.tol_step = 1e-300;
  cfg.inner.tol_grad_abs = 1e-12;
  auto [sol, trace] = alm_solve(problem, cfg, {Vector{1.0}});

  const double contraction = 1.0 / (1.0 + 5.0 * beta);
  bool ok = true;
  // Ratios are meaningful while x^k - 1 stays well above the rounding floor
  // of doubles near 1; past that the closed-form trajectory is the check.
  double max_ratio_dev = 0.0, max_traj_dev = 0.0;
  double closed_form_gap = 1.0;  // x^k - 1 = -contraction^k
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    closed_form_gap *= contraction;
    max_traj_dev = std::max(
        max_traj_dev, std::abs(trace.records[i].u[0] - (1.0 - closed_form_gap)));
    if (i == 0) continue;
    const double prev = trace.records[i - 1].u[0] - 1.0;
    const double cur = trace.records[i].u[0] - 1.0;
    if (std::abs(prev) < 1e-5) break;
    max_ratio_dev = std::max(max_ratio_dev, std::abs(cur / prev - contraction));
  }
  std::cout << "max deviation of (x^{k+1}-1)/(x^k-1) from 1/(1+5 beta): "
            << format_sig17(max_ratio_dev) << " (while |x^k-1| >= 1e-5)\n";
  std::cout << "max deviation of x^k from the closed form 1 - (1+5 beta)^{-k}: "
            << format_sig17(max_traj_dev) << "\n";
  ok &= report_check("primal contraction factor matches to 1e-10", max_ratio_dev <= 1e-10);
  ok &= report_check("trajectory matches the closed form to 1e-10", max_traj_dev <= 1e-10);

  SamplePlan plan;
  plan.count = 16;
  plan.seed = 3;
  MultiplierReport report =
      essential_multiplier(problem, sol.u_final, 1e-10, plan);
  std::cout << "essential multiplier (" << format_sig17((*report.essential)[0]) << ", "
            << format_sig17((*report.essential)[1]) << ")\n";
  ok &= report_check("essential multiplier equals -(1/5)(1,2)",
                     std::abs((*report.essential)[0] + 0.2) <= 1e-8 &&
                         std::abs((*report.essential)[1] + 0.4) <= 1e-8);
  return ok ? kExitOk : kExitNoConvergence;
}

int run_eigen_example(int n) {
  EigenExampleReport report = eigen_example_check(n, 1e-8);
  const double h = 1.0 / (n + 1);
  std::cout << "first Dirichlet eigenvalue on " << n << " interior points: "
            << format_sig17(report.mu1) << "\n";
  std::cout << "closed form (2/h^2)(1-cos(pi h)): "
            << format_sig17(report.mu1_closed_form) << " (h = " << h << ")\n";
  std::cout << "surrogate stationarity residual with multiplier -mu1: "
            << format_sig17(report.stationarity_residual) << "\n";
  std::cout << "gap to the continuum eigenvalue pi^2: "
            << format_sig17(report.continuum_gap) << "\n";
  bool ok = report_check("eigenvalue matches the closed form to 1e-10",
                         std::abs(report.mu1 - report.mu1_closed_form) <= 1e-10);
  ok &= report_check("stationarity residual <= 1e-8",
                     report.stationarity_residual <= 1e-8);
  return ok ? kExitOk : kExitNoConvergence;
}

int cmd_example(const ExampleFlags& flags) {
  if (flags.name == "ex1-k1") return run_tangent_ball_example(flags.alpha);
  if (flags.name == "ex1-k2") return run_tangent_ball_chord_example(flags.alpha);
  if (flags.name == "ex2-k3") return run_disk_example(flags, false);
  if (flags.name == "ex2-k4") return run_disk_example(flags, true);
  if (flags.name == "alm-toy") return run_alm_toy_example(flags.beta);
  if (flags.name == "eigen") return run_eigen_example(flags.n);
  std::cerr << "unknown example '" << flags.name
            << "'; known: ex1-k1 ex1-k2 ex2-k3 ex2-k4 alm-toy eigen\n";
  return kExitInputError;
}

struct OcpFlags {
  std::string constraint = "control";
  std::vector<int> meshes;
  double alpha = 1e-2;
  double beta = 0.0;  // 0 = per-family default
  std::string out = "study.csv";
};

int cmd_ocp(const OcpFlags& flags) {
  if (flags.meshes.size() < 2) {
    std::cerr << "need at least 2 meshes for a trend\n";
    return kExitInputError;
  }
  OcpSpec spec;
  spec.alpha = flags.alpha;
  // The state block couples through the small singular values of the
  // solution operator: run it in the reduced form with a strong penalty.
  double beta = flags.beta;
  if (flags.constraint == "control") {
    spec.kind = OcpSpec::ConstraintKind::Control;
    spec.stacked = true;
    if (beta <= 0.0) beta = 8.0;
  } else if (flags.constraint == "state") {
    spec.kind = OcpSpec::ConstraintKind::State;
    spec.stacked = false;
    if (beta <= 0.0) beta = 512.0;
  } else {
    std::cerr << "constraint must be 'state' or 'control'\n";
    return kExitInputError;
  }

  // Bind the bounds to half of the unconstrained extrema on the finest mesh,
  // held fixed across the family.
  {
    OcpSpec probe = spec;
    probe.n = flags.meshes.back();
    probe.kind = OcpSpec::ConstraintKind::Control;
    probe.control_lo = -std::numeric_limits<double>::infinity();
    probe.control_hi = std::numeric_limits<double>::infinity();
    ModelProblem unconstrained = build_ocp(probe);
    AlmConfig cfg;
    cfg.beta = 8.0;
    cfg.max_outer = 60;
    cfg.tol_primal = 1e-9;
    cfg.tol_step = 1e-9;
    auto [sol, trace] = alm_solve(unconstrained, cfg);
    const double umax = linf_norm(sol.u_final);
    Vector diag, off;
    fd_laplacian_diagonals(probe.n, diag, off);
    LinearOperator li = LinearOperator::tridiagonal_inverse(diag, off);
    const double ymax = linf_norm(li.apply(sol.u_final));
    if (spec.kind == OcpSpec::ConstraintKind::Control) {
      spec.control_hi = 0.5 * umax;
      spec.control_lo = -0.5 * umax;
    } else {
      spec.state_hi = 0.5 * ymax;
      spec.state_lo = -10.0 * ymax;
    }
  }

  AlmConfig cfg;
  cfg.beta = beta;
  cfg.max_outer = flags.constraint == "state" ? 900 : 400;
  cfg.tol_primal = flags.constraint == "state" ? 1e-9 : 1e-8;
  cfg.tol_step = cfg.tol_primal;
  if (flags.constraint == "state") {
    cfg.inner.tol_grad_abs = 1e-7;
    cfg.inner.tighten_exponent = 1.0;
  } else {
    cfg.inner.tol_grad_abs = 1e-9;
  }
  std::vector<MeshStudyRow> rows = mesh_refinement_study(spec, flags.meshes, cfg);

  std::ofstream out(flags.out, std::ios::binary);
  if (!out) {
    std::cerr << "cannot open '" << flags.out << "' for writing\n";
    return kExitInputError;
  }
  out << study_csv(rows);

  bool all_solved = true;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  bool increasing = true;
  double prev = -1.0;
  for (const auto& r : rows) {
    all_solved &= r.solved;
    const double v = flags.constraint == "control" ? r.lambda_norm_control
                                                   : r.lambda_norm_state;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    if (prev >= 0.0 && v <= prev) increasing = false;
    prev = v;
    std::cout << "n = " << r.n << ": state-block |lambda| = "
              << format_sig17(r.lambda_norm_state) << ", control-block |lambda| = "
              << format_sig17(r.lambda_norm_control) << ", outer iterations "
              << r.iterations << (r.solved ? "" : "  [solver failed: " + r.note + "]")
              << "\n";
  }
  if (flags.constraint == "control") {
    std::cout << "trend: control multiplier norms stay bounded (max/min = "
              << (lo > 0 ? hi / lo : 0.0) << ")\n";
  } else {
    std::cout << "trend: state multiplier norms "
              << (increasing ? "grow with refinement (no limit multiplier in L2)"
                             : "do not grow monotonically")
              << "\n";
  }
  return all_solved ? kExitOk : kExitNoConvergence;
}

struct DiagnoseFlags {
  std::string summary_path;
  std::string candidate;  // JSON vector
  int samples = 64;
  std::uint64_t seed = 0;
};

int cmd_diagnose(const DiagnoseFlags& flags) {
  std::ifstream in(flags.summary_path);
  if (!in) {
    std::cerr << "cannot open summary '" << flags.summary_path << "'\n";
    return kExitInputError;
  }
  Json summary;
  try {
    summary = Json::parse(in);
  } catch (const Json::parse_error& e) {
    std::cerr << "malformed summary JSON: " << e.what() << "\n";
    return kExitInputError;
  }
  ModelProblem problem = problem_from_json(summary.at("problem"));
  const Vector u_final = summary.at("solution").at("u").get<Vector>();

  SamplePlan plan;
  plan.count = flags.samples;
  plan.seed = flags.seed;
  MultiplierReport report = essential_multiplier(problem, u_final, 1e-8, plan);
  Json out = multiplier_report_to_json(report);

  if (!flags.candidate.empty()) {
    Vector candidate;
    try {
      candidate = Json::parse(flags.candidate).get<Vector>();
    } catch (const Json::exception& e) {
      std::cerr << "bad --candidate vector: " << e.what() << "\n";
      return kExitInputError;
    }
    if (candidate.size() != problem.S.rows()) {
      std::cerr << "candidate dimension " << candidate.size() << " does not match "
                << problem.S.rows() << "\n";
      return kExitInputError;
    }
    ProperCandidateAnalysis analysis =
        proper_candidate_check(problem, u_final, candidate, 1e-8, plan);
    out["proper_candidate"] = proper_candidate_to_json(analysis);
  }

  const fs::path report_path =
      fs::path(flags.summary_path).parent_path() / "multiplier_report.json";
  std::ofstream rep(report_path);
  rep << out.dump(2) << "\n";
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"augmented Lagrangian solver with Lagrange-multiplier diagnostics"};
  app.require_subcommand(1);

  SolveFlags solve_flags;
  CLI::App* solve = app.add_subcommand("solve", "solve a problem JSON file");
  solve->add_option("problem", solve_flags.problem_path, "problem JSON path")
      ->required();
  solve->add_option("--beta", solve_flags.beta, "penalty parameter");
  solve->add_option("--max-outer", solve_flags.max_outer, "outer iteration cap");
  solve->add_option("--tol-primal", solve_flags.tol_primal, "primal residual tolerance");
  solve->add_option("--tol-step", solve_flags.tol_step, "step tolerance");
  solve->add_option("--inner-tol", solve_flags.inner_tol, "base inner gradient tolerance");
  solve->add_option("--probes", solve_flags.probes, "number of probe directions");
  solve->add_option("--seed", solve_flags.seed, "seed for sampling and probes");
  solve->add_option("--out-dir", solve_flags.out_dir,
                    "output directory (ALMLAB_OUT_DIR overrides)");

  ExampleFlags example_flags;
  CLI::App* example = app.add_subcommand("example", "run a built-in instance");
  example->add_option("name", example_flags.name,
                      "one of: ex1-k1 ex1-k2 ex2-k3 ex2-k4 alm-toy eigen")
      ->required();
  example->add_option("--alpha", example_flags.alpha, "objective shift");
  example->add_option("--r", example_flags.r, "disk radius");
  example->add_option("--beta", example_flags.beta, "penalty parameter");
  example->add_option("--n", example_flags.n, "mesh size");

  OcpFlags ocp_flags;
  CLI::App* ocp = app.add_subcommand("ocp", "run a mesh refinement study");
  ocp->add_option("--constraint", ocp_flags.constraint, "state|control");
  ocp->add_option("--meshes", ocp_flags.meshes, "interior mesh sizes")
      ->delimiter(',')
      ->required();
  ocp->add_option("--alpha", ocp_flags.alpha, "regularization");
  ocp->add_option("--beta", ocp_flags.beta, "penalty parameter");
  ocp->add_option("--out", ocp_flags.out, "study CSV path");

  DiagnoseFlags diagnose_flags;
  CLI::App* diagnose = app.add_subcommand("diagnose", "multiplier forensics on a run");
  diagnose->add_option("summary", diagnose_flags.summary_path, "summary.json path")
      ->required();
  diagnose->add_option("--candidate", diagnose_flags.candidate,
                       "candidate multiplier as a JSON vector");
  diagnose->add_option("--samples", diagnose_flags.samples, "sample count");
  diagnose->add_option("--seed", diagnose_flags.seed, "sampling seed");

  // Exit codes are {0 success, 1 input error, 2 non-convergence}; fold
  // CLI11's own parse-error codes into 1.
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_flags);
    if (example->parsed()) return cmd_example(example_flags);
    if (ocp->parsed()) return cmd_ocp(ocp_flags);
    if (diagnose->parsed()) return cmd_diagnose(diagnose_flags);
  } catch (const InvalidInputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const DimensionError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const NotSpdError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const FeasibilityError& e) {
    std::cerr << "infeasibility: " << e.what() << "\n";
    return kExitNoConvergence;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNoConvergence;
  }
  return kExitInputError;
}
