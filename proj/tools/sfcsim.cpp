#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "sfcdd/acceptance.hpp"
#include "sfcdd/config.hpp"
#include "sfcdd/errors.hpp"
#include "sfcdd/experiment.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "results";
  std::string format = "both";
  uint64_t seed = 0;
  bool seed_set = false;
  bool force = false;
  bool print_config = false;
};

void add_common(CLI::App* sub, CommonOpts& opts) {
  sub->add_option("config", opts.config_path, "experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--out-dir", opts.out_dir, "output directory")
      ->capture_default_str();
  sub->add_option("--format", opts.format, "output format: csv, json or both")
      ->check(CLI::IsMember({"csv", "json", "both"}))
      ->capture_default_str();
  sub->add_option("--seed", opts.seed, "override the config seed")
      ->each([&opts](const std::string&) { opts.seed_set = true; });
  sub->add_flag("--force", opts.force, "ignore the size safety caps");
  sub->add_flag("--print-config", opts.print_config,
                "print the resolved config and exit");
}

int execute(const CommonOpts& opts, bool single_point) {
  sfcdd::ExperimentConfig cfg = sfcdd::load_config(opts.config_path);
  if (opts.seed_set) cfg.seed = opts.seed;
  if (opts.print_config) {
    std::cout << sfcdd::dump_config(cfg);
    return 0;
  }
  if (single_point && (cfg.P_values.size() != 1 || cfg.p_fault.size() != 1))
    throw sfcdd::InvalidConfig(
        "run expects a single-point config (one P, one p_fault); "
        "use sweep for grids of points");

  sfcdd::RunLimits limits;
  limits.force = opts.force;
  sfcdd::ResultTable table = sfcdd::run_experiment(cfg, limits);
  sfcdd::emit_results(table, opts.out_dir, opts.format);
  {
    std::ofstream out(std::filesystem::path(opts.out_dir) / "config.txt");
    out << sfcdd::dump_config(cfg);
  }

  for (const sfcdd::PointAggregate& pt : table.points) {
    const sfcdd::RunRecord* first = nullptr;
    for (const sfcdd::RunRecord& rec : table.runs)
      if (rec.row.point == pt.point) {
        first = &rec;
        break;
      }
    if (!first) continue;
    std::printf(
        "point %d: N=%lld P=%d q=%d p_fault=%g  runs=%d discarded=%d  "
        "mean K=%.1f  mean rho_ave=%.3f\n",
        pt.point, (long long)first->row.N, first->row.P, first->row.q,
        first->row.p_fault, pt.runs, pt.discarded, pt.mean_iterations,
        pt.mean_rho_ave);
  }
  std::printf("wrote %s\n", opts.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "sfcsim: fault-tolerant two-level Schwarz experiments on "
      "space-filling-curve partitions"};
  app.require_subcommand(1);

  CommonOpts run_opts, sweep_opts;
  CLI::App* run = app.add_subcommand("run", "run a single experiment point");
  add_common(run, run_opts);
  CLI::App* sweep =
      app.add_subcommand("sweep", "run the full P x p_fault sweep");
  add_common(sweep, sweep_opts);
  CLI::App* verify =
      app.add_subcommand("verify", "run the acceptance criteria battery");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) {
      const auto results = sfcdd::run_acceptance(std::cout);
      return sfcdd::all_passed(results) ? 0 : 1;
    }
    if (run->parsed()) return execute(run_opts, true);
    return execute(sweep_opts, false);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
