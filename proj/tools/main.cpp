#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ehcr/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Energy-harvesting cognitive-radio rate model: analyze, optimize, simulate, sweep"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ehcr::kToolVersion));

  ehcr::CommandOptions opt;
  int grid_omega = 0, grid_theta = 0, refine = 0, max_sweeps = 0;
  std::vector<CLI::Option*> search_flags;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "Config file ([system], [su.N], [search])")->required();
    sub->add_option("--out", opt.out, "Output directory")->capture_default_str();
    sub->add_flag("--ideal-sensing", opt.ideal_sensing, "Force P_fa = 0 and P_d = 1");
  };
  auto search = [&](CLI::App* sub) {
    search_flags.push_back(sub->add_option("--grid-omega", grid_omega, "Coarse omega grid points (default 21)"));
    search_flags.push_back(sub->add_option("--grid-theta", grid_theta, "Coarse theta grid points (default 25)"));
    search_flags.push_back(sub->add_option("--refine", refine, "Local refinement levels (default 3)"));
    search_flags.push_back(sub->add_option("--max-sweeps", max_sweeps, "Coordinate sweep cap (default 50)"));
  };

  auto* analyze = app.add_subcommand("analyze", "Per-SU steady state, outages, R_LB and interference");
  common(analyze);
  analyze->add_flag("--dump-matrix", opt.dump_matrix, "Write each SU's transition matrix");

  auto* optimize = app.add_subcommand("optimize", "Maximize the sum rate under the interference cap");
  common(optimize);
  search(optimize);

  auto* sim = app.add_subcommand("simulate", "Monte Carlo run compared against the analysis");
  common(sim);
  sim->add_option("--seed", opt.seed, "RNG seed")->capture_default_str();
  sim->add_option("--slots", opt.slots, "Slots per SU after burn-in")->capture_default_str();
  sim->add_flag("--dump-trace", opt.dump_trace, "Write per-slot records");

  auto* sweep = app.add_subcommand("sweep", "One-axis sweep; K and I_av re-optimize at every point");
  common(sweep);
  search(sweep);
  sweep->add_option("--axis", opt.axis, "tau_s, alpha_t, omega, theta, K, rho or I_av")->required();
  sweep->add_option("--from", opt.from, "First axis value")->required();
  sweep->add_option("--to", opt.to, "Last axis value")->required();
  sweep->add_option("--points", opt.points, "Number of points")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ehcr::kExitValidation;
  }
  // Only flags given on the command line override the config's [search] section.
  for (const auto* f : search_flags) {
    if (f->count() == 0) continue;
    if (f->get_name() == "--grid-omega") opt.grid_omega = grid_omega;
    if (f->get_name() == "--grid-theta") opt.grid_theta = grid_theta;
    if (f->get_name() == "--refine") opt.refine = refine;
    if (f->get_name() == "--max-sweeps") opt.max_sweeps = max_sweeps;
  }

  const auto* chosen = app.get_subcommands().front();
  return ehcr::run_command(chosen->get_name(), opt, std::cout, std::cerr);
}
