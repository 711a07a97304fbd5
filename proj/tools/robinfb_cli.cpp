// Batch front end: reads a JSON run configuration, executes the requested
// mode, and writes machine-readable tables and rasters to the output
// directory. Exit codes: 0 ok, 2 config error, 3 solver error, 4 I/O error.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "robinfb/config.hpp"
#include "robinfb/conformal.hpp"
#include "robinfb/diagnostics.hpp"
#include "robinfb/energy.hpp"
#include "robinfb/io.hpp"
#include "robinfb/solver1d.hpp"
#include "robinfb/solver2d.hpp"

namespace fs = std::filesystem;
using namespace robinfb;

namespace {

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void emit_error(const std::string& kind, const std::string& field,
                const std::string& message) {
  nlohmann::json j;
  j["error"] = kind;
  if (!field.empty()) j["field"] = field;
  j["message"] = message;
  std::cout << j.dump() << "\n";
}

std::string oned_row(double beta, double eps, int n) {
  const Solve1DResult r = solve_1d_numeric(beta, eps, n);
  const double eps0 = interface_threshold(beta);
  std::string s;
  s += fmt17(beta) + "," + fmt17(eps) + "," + fmt17(r.energy_disjoint) + "," +
       fmt17(bridged_energy_optimal(beta, eps)) + "," +
       fmt17(optimal_ell(beta, eps)) + "," + winner_name(r.winner) + "," +
       fmt17(eps0) + "\n";
  return s;
}

constexpr const char* kOnedHeader =
    "beta,eps,energy_disjoint,energy_bridged_opt,ell_opt,winner,eps0_for_beta\n";

// Runs jobs over a small worker pool; rows come back in input order so the
// files never depend on scheduling.
template <class Job>
std::vector<std::string> run_pool(int workers, int njobs, Job&& job) {
  std::vector<std::string> rows(njobs);
  if (workers <= 1) {
    for (int k = 0; k < njobs; ++k) rows[k] = job(k);
    return rows;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      while (true) {
        const int k = next.fetch_add(1);
        if (k >= njobs) return;
        rows[k] = job(k);
      }
    });
  for (auto& t : pool) t.join();
  return rows;
}

void write_solve2d_artifacts(const fs::path& dir, const ProblemSpec& spec,
                             const ContinuationResult& result) {
  write_file((dir / "state.json").string(), state_to_json(result.state));
  write_file((dir / "trace.csv").string(), result.trace.to_csv());
  const EnergyBreakdown e = total_energy(result.state, spec.beta, spec.lambda,
                                         result.eps_final);
  write_file((dir / "energy.csv").string(),
             EnergyBreakdown::csv_header() + "\n" + e.csv_row() + "\n");
  write_file((dir / "u.pgm").string(), pgm_from_u(result.state));
  write_file((dir / "labels.pgm").string(), pgm_from_labels(result.state));
  if (result.trace.margin_warning)
    std::cerr << "warning: positivity set touches the margin ring\n";
}

int run(const RunConfig& cfg) {
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);

  switch (cfg.mode) {
    case RunMode::Solve1D: {
      std::string csv = kOnedHeader;
      for (const double b : cfg.oned_beta)
        for (const double e : cfg.oned_eps) csv += oned_row(b, e, cfg.oned_n);
      write_file((dir / "solve1d.csv").string(), csv);
      return 0;
    }
    case RunMode::Sweep1D: {
      std::vector<std::pair<double, double>> pts;
      for (const double b : cfg.oned_beta)
        for (const double e : cfg.oned_eps) pts.emplace_back(b, e);
      const std::vector<std::string> rows =
          run_pool(cfg.workers, static_cast<int>(pts.size()), [&](int k) {
            return oned_row(pts[k].first, pts[k].second, cfg.oned_n);
          });
      std::string csv = kOnedHeader;
      for (const std::string& r : rows) csv += r;
      write_file((dir / "sweep1d.csv").string(), csv);
      std::string curve = "beta,eps0\n";
      for (const double b : cfg.oned_beta)
        curve += fmt17(b) + "," + fmt17(interface_threshold(b)) + "\n";
      write_file((dir / "eps0_curve.csv").string(), curve);
      return 0;
    }
    case RunMode::Solve2D: {
      const ContinuationResult result = continuation(cfg.spec, cfg.params);
      write_solve2d_artifacts(dir, cfg.spec, result);
      return 0;
    }
    case RunMode::Sweep2D: {
      std::vector<double> betas =
          cfg.sweep_beta.empty() ? std::vector<double>{cfg.spec.beta}
                                 : cfg.sweep_beta;
      std::vector<double> lambdas =
          cfg.sweep_lambda.empty() ? std::vector<double>{cfg.spec.lambda}
                                   : cfg.sweep_lambda;
      std::vector<std::pair<double, double>> pts;
      for (const double b : betas)
        for (const double l : lambdas) pts.emplace_back(b, l);
      const std::vector<std::string> rows =
          run_pool(cfg.workers, static_cast<int>(pts.size()), [&](int k) {
            ProblemSpec sp = cfg.spec;
            sp.beta = pts[k].first;
            sp.lambda = pts[k].second;
            const ContinuationResult res = continuation(sp, cfg.params);
            const EnergyBreakdown e =
                total_energy(res.state, sp.beta, sp.lambda, res.eps_final);
            const bool bridged = e.interface_term > 0.0;
            return fmt17(sp.beta) + "," + fmt17(sp.lambda) + "," + e.csv_row() +
                   "," + (bridged ? "bridged" : "disjoint") + "," +
                   (res.trace.margin_warning ? "1" : "0") + "\n";
          });
      std::string csv = std::string("beta,lambda,") +
                        EnergyBreakdown::csv_header() +
                        ",configuration,margin_warning\n";
      for (const std::string& r : rows) csv += r;
      write_file((dir / "sweep2d.csv").string(), csv);
      return 0;
    }
    case RunMode::Diagnose: {
      State st;
      double eps_final = cfg.params.eps0 *
                         std::pow(cfg.params.eps_factor, cfg.params.eps_steps - 1);
      if (!cfg.state_path.empty()) {
        st = state_from_json(read_file(cfg.state_path));
      } else {
        const ContinuationResult res = continuation(cfg.spec, cfg.params);
        st = res.state;
        eps_final = res.eps_final;
        write_solve2d_artifacts(dir, cfg.spec, res);
      }
      const DiagnosticsReport rep = run_diagnostics(
          st, cfg.spec.beta, cfg.spec.lambda, eps_final, cfg.diagnostics);
      write_file((dir / "diagnostics.json").string(), rep.to_json());
      write_file((dir / "fb_residuals.csv").string(), fb_residuals_csv(rep));
      write_file((dir / "robin_residuals.csv").string(),
                 robin_residuals_csv(rep));
      write_file((dir / "weiss.csv").string(), weiss_csv(rep));
      write_file((dir / "blowup.csv").string(), blowup_csv(rep));
      write_file((dir / "density_growth.csv").string(),
                 density_growth_csv(rep));
      write_file((dir / "contact_angles.csv").string(),
                 contact_angles_csv(rep));
      return 0;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robinfb: two-phase free-boundary minimizer and diagnostics"};
  std::string config_path;
  std::string out_override;
  int workers_override = 0;
  bool print_schema = false;
  app.add_option("--config", config_path, "run configuration JSON");
  app.add_option("--out", out_override, "output directory (overrides config)");
  app.add_option("--workers", workers_override, "worker pool size for sweeps");
  app.add_flag("--print-schema", print_schema, "print the config schema");
  CLI11_PARSE(app, argc, argv);

  if (print_schema) {
    std::cout << config_schema();
    return 0;
  }
  if (config_path.empty()) {
    emit_error("config", "--config", "no configuration given");
    return 2;
  }

  RunConfig cfg;
  try {
    cfg = parse_config(read_file(config_path));
  } catch (const InputError& e) {
    emit_error("config", e.field, e.what());
    return 2;
  } catch (const std::exception& e) {
    emit_error("io", "", e.what());
    return 4;
  }
  if (!out_override.empty()) cfg.out_dir = out_override;
  if (workers_override > 0) cfg.workers = workers_override;

  try {
    return run(cfg);
  } catch (const InputError& e) {
    emit_error("config", e.field, e.what());
    return 2;
  } catch (const GeometryError& e) {
    emit_error("config", "spec", e.what());
    return 2;
  } catch (const SolverError& e) {
    emit_error("solver", "", e.what());
    return 3;
  } catch (const std::exception& e) {
    emit_error("io", "", e.what());
    return 4;
  }
}
