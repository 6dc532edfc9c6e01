#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "epiprox/ballproj.hpp"
#include "epiprox/image_io.hpp"
#include "epiprox/pulse.hpp"
#include "epiprox/restoration.hpp"
#include "epiprox/selftest.hpp"

using json = nlohmann::json;
using namespace epiprox;

namespace {

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("EPIPROX_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  return json::parse(in);
}

SolverConfig solver_from_json(const json& j) {
  SolverConfig cfg;
  cfg.trace_every = 1;
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    cfg.stop_rel = s.value("stop_rel", cfg.stop_rel);
    cfg.max_iters = s.value("max_iters", cfg.max_iters);
    cfg.trace_every = s.value("trace_every", cfg.trace_every);
  }
  cfg.validate();
  return cfg;
}

struct RestoreSetup {
  ImageGrid truth;
  Degraded degraded;
  TransformedConstraint tc;
  RestoreOptions opts;
  double eta = 0.0;
  std::string type;
};

RestoreSetup prepare_restore(const json& cfg, const std::string& method,
                             std::uint64_t seed_override, bool has_seed,
                             int threads) {
  RestoreSetup s;
  const std::string image = cfg.at("image").get<std::string>();
  if (image.rfind("synthetic:", 0) == 0) {
    const std::string dims = image.substr(10);
    const auto x = dims.find('x');
    if (x == std::string::npos)
      throw std::runtime_error("synthetic image spec must be ROWSxCOLS");
    s.truth = make_test_image(std::stoi(dims.substr(0, x)),
                              std::stoi(dims.substr(x + 1)));
  } else {
    s.truth = read_pgm(image);
  }

  DegradationSpec deg;
  if (cfg.contains("degradation")) {
    const auto& d = cfg.at("degradation");
    deg.blur_size = d.value("blur_size", deg.blur_size);
    deg.keep_fraction = d.value("keep_fraction", deg.keep_fraction);
    deg.noise_sigma = d.value("noise_sigma", deg.noise_sigma);
  }
  deg.seed = has_seed ? seed_override
                      : cfg.value("seed", static_cast<std::uint64_t>(0));
  deg.validate();
  s.degraded = degrade(s.truth, deg);

  const auto& c = cfg.at("constraint");
  s.type = c.at("type").get<std::string>();
  const BlockNorm p = (s.type == "tv2" || s.type == "nltv2")
                          ? BlockNorm::L2
                          : BlockNorm::Linf;
  if (s.type != "tv2" && s.type != "tvinf" && s.type != "nltv2" &&
      s.type != "nltvinf")
    throw std::runtime_error("constraint.type must be tv2|tvinf|nltv2|nltvinf");

  s.opts.method = method == "direct" ? Method::Direct : Method::Epigraphical;
  s.opts.solver = solver_from_json(cfg);
  s.opts.threads = threads;

  const int rows = s.truth.rows, cols = s.truth.cols;
  auto eta_for = [&](const TransformedConstraint& probe) {
    if (c.contains("eta")) return c.at("eta").get<double>();
    const double factor = c.value("eta_factor", 1.0);
    return factor *
           constraint_value(probe.constraint, probe.lifted.apply(s.truth.pixels));
  };

  if (s.type == "tv2" || s.type == "tvinf") {
    s.tc = build_tv_constraint(rows, cols, p, 1.0);
    s.eta = eta_for(s.tc);
    s.tc.constraint.eta = s.eta;
  } else {
    NltvSpec nspec;
    if (c.contains("nltv")) {
      const auto& nj = c.at("nltv");
      nspec.window = nj.value("window", nspec.window);
      nspec.patch = nj.value("patch", nspec.patch);
      nspec.delta = nj.value("delta", nspec.delta);
      nspec.max_neighbors = nj.value("max_neighbors", nspec.max_neighbors);
    }
    nspec.p = p;
    nspec.validate();
    // Pilot bound: a factor of the ℓ₂-TV of the zero-filled observation
    // unless the config names one explicitly.
    double tv_eta;
    if (c.contains("tv_eta")) {
      tv_eta = c.at("tv_eta").get<double>();
    } else {
      TransformedConstraint probe = build_tv_constraint(rows, cols,
                                                        BlockNorm::L2, 1.0);
      ImageGrid zf = zero_fill(s.degraded, rows, cols);
      tv_eta = c.value("tv_eta_factor", 0.56) *
               constraint_value(probe.constraint, probe.lifted.apply(zf.pixels));
    }
    SolverConfig pilot = s.opts.solver;
    pilot.trace_every = 0;
    NltvWeights w = estimate_weights(s.degraded, rows, cols, nspec, tv_eta,
                                     pilot);
    s.tc = build_nltv_constraint(rows, cols, w, p, 1.0);
    s.eta = eta_for(s.tc);
    s.tc.constraint.eta = s.eta;
  }
  return s;
}

int cmd_restore(const std::string& config_path, const std::string& out_dir,
                const std::string& method, std::uint64_t seed, bool has_seed,
                int threads) {
  RestoreSetup s;
  try {
    s = prepare_restore(load_config(config_path), method, seed, has_seed,
                        threads);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  s.opts.ground_truth = &s.truth;
  RestoredResult r = restore(s.degraded, s.truth.rows, s.truth.cols, s.tc,
                             s.opts);
  std::filesystem::create_directories(out_dir);
  write_pgm(r.image, out_dir + "/restored.pgm");
  write_trace_csv(r.trace, out_dir + "/trace.csv");
  json metrics{{"snr_db", r.snr_db},
               {"ssim", r.ssim},
               {"iters", r.trace.iters},
               {"wall_time_s", r.trace.wall_time_s},
               {"objective", r.objective},
               {"constraint_violation", r.constraint_violation},
               {"eta", s.eta},
               {"constraint", s.type},
               {"method", method},
               {"converged", r.trace.converged}};
  std::ofstream(out_dir + "/metrics.json") << metrics.dump(2) << "\n";
  return r.trace.converged ? 0 : 2;
}

int cmd_pulse(const std::string& config_path, const std::string& out_dir,
              double beta_override, double epsilon_override, int threads) {
  PulseSpec spec;
  SolverConfig cfg;
  try {
    json j = config_path.empty() ? json::object() : load_config(config_path);
    spec.n = j.value("n", spec.n);
    spec.fs = j.value("fs", spec.fs);
    spec.mask_limit = j.value("mask_limit", spec.mask_limit);
    spec.mask_above_hz = j.value("mask_above_hz", spec.mask_above_hz);
    spec.null_every_hz = j.value("null_every_hz", spec.null_every_hz);
    spec.energy_mu = j.value("energy_mu", spec.energy_mu);
    spec.zero_every_ms = j.value("zero_every_ms", spec.zero_every_ms);
    spec.duration_ms = j.value("duration_ms", spec.duration_ms);
    spec.beta = j.value("beta", spec.beta);
    spec.epsilon = j.value("epsilon", spec.epsilon);
    if (beta_override > 0.0) spec.beta = beta_override;
    if (epsilon_override > 0.0) spec.epsilon = epsilon_override;
    spec.validate();
    cfg = solver_from_json(j);
    cfg.trace_every = 0;
    if (!j.contains("solver")) {
      cfg.stop_rel = 1e-7;
      cfg.max_iters = 50000;
    }
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  PulseResult r = design_pulse(spec, cfg, threads);
  if (!r.report.feasible) {
    std::cerr << "hard constraints infeasible; preflight residual "
              << fmt(r.report.preflight_residual) << "\n";
    return 3;
  }
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream out(out_dir + "/pulse.csv");
    out << "index,time_ms,value\n";
    for (int t = 0; t < spec.n; ++t)
      out << t << ',' << fmt(t * 1000.0 / spec.fs) << ',' << fmt(r.x[t])
          << "\n";
  }
  {
    std::ofstream out(out_dir + "/spectrum.csv");
    out << "bin,hz,magnitude\n";
    for (const auto& row : spectrum_report(r.x, spec))
      out << row.bin << ',' << fmt(row.hz) << ',' << fmt(row.magnitude)
          << "\n";
  }
  json report{{"objective", r.report.objective},
              {"norm_x", r.report.norm_x},
              {"sum_dist_beta", r.report.sum_dist_beta},
              {"epsilon", r.report.epsilon},
              {"beta", r.report.beta},
              {"energy_mu", r.report.energy_mu},
              {"c1_inactive", r.report.c1_inactive},
              {"residual_nulls", r.report.residual_nulls},
              {"residual_zeros", r.report.residual_zeros},
              {"residual_energy", r.report.residual_energy},
              {"preflight_residual", r.report.preflight_residual},
              {"iters", r.report.iters},
              {"converged", r.report.converged}};
  std::ofstream(out_dir + "/report.json") << report.dump(2) << "\n";
  return r.report.converged ? 0 : 2;
}

int cmd_bench_proj(const std::string& p, const std::vector<int>& sizes,
                   int trials, std::uint64_t seed, int block_size,
                   int threads) {
  const double tol = 1e-6;
  std::printf("size,epi_us,direct_us,ratio\n");
  for (int size : sizes) {
    const int aligned = (size / block_size) * block_size;
    if (aligned < block_size) continue;
    auto layout = BlockLayout::uniform(aligned, block_size);
    const int L = layout.num_blocks();
    DecomposableConstraint c;
    c.layout = layout;
    if (p == "2") {
      c.kinds.assign(L, EuclideanNorm{1.0});
    } else {
      c.kinds.assign(L, WeightedInfNorm{Vec(block_size, 1.0)});
    }
    Rng rng(seed);
    Vec y = random_uniform(rng, aligned, -1.0, 1.0);
    c.eta = 0.5 * constraint_value(c, y);
    Vec zeta = init_zeta(c, y);
    auto sc = split(c, BudgetForm::Inequality, threads);

    auto median_us = [&](auto&& fn) {
      std::vector<double> ts(trials);
      for (int t = 0; t < trials; ++t) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        ts[t] = std::chrono::duration<double, std::micro>(t1 - t0).count();
      }
      std::sort(ts.begin(), ts.end());
      return ts[ts.size() / 2];
    };
    const double epi_us = median_us([&] {
      EpiState s{y, zeta};
      s = sc.epi_projector(std::move(s));
      s.zeta = sc.budget_projector(std::move(s.zeta));
    });
    const double direct_us = median_us([&] {
      if (p == "2")
        project_l12_ball(layout, c.eta, y);
      else
        project_l1inf_ball(layout, c.eta, y, tol);
    });
    std::printf("%d,%s,%s,%s\n", aligned, fmt(epi_us).c_str(),
                fmt(direct_us).c_str(),
                fmt(epi_us > 0.0 ? direct_us / epi_us : 0.0).c_str());
  }
  return 0;
}

int cmd_selftest(int threads) {
  auto results = run_selftests(threads);
  bool all = true;
  std::printf("%-12s %-6s %s\n", "suite", "result", "detail");
  for (const auto& r : results) {
    all = all && r.passed;
    std::printf("%-12s %-6s %s\n", r.suite.c_str(),
                r.passed ? "pass" : "FAIL", r.detail.c_str());
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"epiprox: epigraphical splitting experiments"};
  app.require_subcommand(1);
  app.fallthrough();  // --threads is valid anywhere on the line
  int threads_flag = 0;
  app.add_option("--threads", threads_flag,
                 "worker threads (default: EPIPROX_THREADS or hardware)");

  auto* restore_cmd = app.add_subcommand("restore", "constrained restoration");
  std::string r_config, r_out = ".", r_method = "epigraphical";
  std::uint64_t r_seed = 0;
  restore_cmd->add_option("--config", r_config, "JSON config")->required();
  restore_cmd->add_option("--out-dir", r_out, "output directory");
  auto* method_opt =
      restore_cmd->add_option("--method", r_method, "epigraphical|direct")
          ->check(CLI::IsMember({"epigraphical", "direct"}));
  auto* seed_opt = restore_cmd->add_option("--seed", r_seed, "degradation seed");
  (void)method_opt;

  auto* pulse_cmd = app.add_subcommand("pulse", "pulse shape design");
  std::string p_config, p_out = ".";
  double p_beta = 0.0, p_eps = 0.0;
  pulse_cmd->add_option("--config", p_config, "JSON config");
  pulse_cmd->add_option("--out-dir", p_out, "output directory");
  pulse_cmd->add_option("--beta", p_beta, "override beta");
  pulse_cmd->add_option("--epsilon", p_eps, "override epsilon");

  auto* bench_cmd = app.add_subcommand("bench-proj",
                                       "epigraphical vs direct projection");
  std::string b_p = "2";
  std::vector<int> b_sizes{100000};
  int b_trials = 5, b_block = 14;
  std::uint64_t b_seed = 1;
  bench_cmd->add_option("--p", b_p, "2|inf")
      ->check(CLI::IsMember({"2", "inf"}));
  bench_cmd->add_option("--sizes", b_sizes, "total entries per row");
  bench_cmd->add_option("--trials", b_trials, "timing repetitions");
  bench_cmd->add_option("--seed", b_seed, "input seed");
  bench_cmd->add_option("--block-size", b_block, "entries per block");

  auto* selftest_cmd = app.add_subcommand("selftest", "invariant suites");
  (void)selftest_cmd;

  CLI11_PARSE(app, argc, argv);
  const int threads = resolve_threads(threads_flag);

  try {
    if (restore_cmd->parsed())
      return cmd_restore(r_config, r_out, r_method, r_seed,
                         seed_opt->count() > 0, threads);
    if (pulse_cmd->parsed())
      return cmd_pulse(p_config, p_out, p_beta, p_eps, threads);
    if (bench_cmd->parsed())
      return cmd_bench_proj(b_p, b_sizes, b_trials, b_seed, b_block, threads);
    return cmd_selftest(threads);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
