// falm: batch front-end for the fast augmented Lagrangian solver.
//
//   falm run <config> [--runs a,b] [--output-dir DIR] [--threads N]
//   falm compare <config>
//   falm ratecheck <config> <thresholds>
//
// FALM_THREADS caps the number of runs executed in parallel.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "falm/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Fast augmented Lagrangian method: runs, comparisons and rate checks"};
  app.require_subcommand(1);

  std::string config;
  std::string thresholds;
  std::vector<std::string> only;
  std::string output_dir;
  int threads = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config, "experiment config (JSON)")->required();
    sub->add_option("--runs", only, "only these run labels")->delimiter(',');
    sub->add_option("--output-dir", output_dir, "override the config's output_dir");
    sub->add_option("--threads", threads, "parallel runs (default: FALM_THREADS or all cores)");
  };

  CLI::App* run = app.add_subcommand("run", "run every configuration, write CSV and summary.json");
  add_common(run);
  CLI::App* compare = app.add_subcommand("compare", "run and tabulate rate slopes per label");
  add_common(compare);
  CLI::App* ratecheck = app.add_subcommand("ratecheck", "exit 0 iff every threshold holds");
  add_common(ratecheck);
  ratecheck->add_option("thresholds", thresholds, "thresholds (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  falm::CliOptions opts;
  opts.only = only;
  opts.threads = threads;
  if (!output_dir.empty()) opts.output_dir = output_dir;

  if (run->parsed()) return falm::cmd_run(config, opts, std::cerr);
  if (compare->parsed()) return falm::cmd_compare(config, opts, std::cout);
  return falm::cmd_ratecheck(config, thresholds, opts, std::cout);
}
