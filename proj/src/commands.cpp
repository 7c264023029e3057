#include "ehcr/commands.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "ehcr/analysis.hpp"
#include "ehcr/battery.hpp"
#include "ehcr/optimizer.hpp"
#include "ehcr/simcore.hpp"

namespace ehcr {

namespace fs = std::filesystem;

namespace {

// Rejected before any work starts; mapped to the validation exit code.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CsvFile {
 public:
  CsvFile(const fs::path& path, const std::vector<std::string>& header) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
    row(header);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
  std::ofstream out_;
};

std::string num(double v) {
  if (std::isnan(v)) return "";
  return format_double(v);
}

// Commas and quotes would break the CSV; keep messages on one cell.
std::string cell_text(std::string s) {
  for (auto& ch : s) {
    if (ch == ',' || ch == '\n' || ch == '"') ch = ';';
  }
  return s;
}

struct Context {
  const CommandOptions& options;
  std::ostream& out;
  std::ostream& err;
  std::string command;
  RunConfig config;
  std::vector<std::string> outputs;
  nlohmann::json extra = nlohmann::json::object();
};

RunConfig resolve_config(const CommandOptions& options) {
  if (options.config.empty()) throw UsageError("--config is required");
  RunConfig cfg = load_config(options.config);
  if (options.ideal_sensing) cfg.system.ideal_sensing = true;
  if (options.grid_omega) cfg.search.grid_omega = *options.grid_omega;
  if (options.grid_theta) cfg.search.grid_theta = *options.grid_theta;
  if (options.refine) cfg.search.refine_levels = *options.refine;
  if (options.max_sweeps) cfg.search.max_sweeps = *options.max_sweeps;
  if (cfg.search.grid_omega < 1 || cfg.search.grid_theta < 1) throw UsageError("grid sizes must be >= 1");
  if (cfg.search.refine_levels < 0) throw UsageError("--refine must be >= 0");
  if (cfg.search.max_sweeps < 1) throw UsageError("sweep cap must be >= 1");
  return cfg;
}

fs::path output_path(Context& ctx, const std::string& name) {
  fs::create_directories(ctx.options.out);
  const auto p = ctx.options.out / name;
  ctx.outputs.push_back(p.string());
  return p;
}

void write_manifest(Context& ctx) {
  nlohmann::json m;
  m["tool"] = "ehcr";
  m["version"] = kToolVersion;
  m["command"] = ctx.command;
  m["config_path"] = ctx.options.config.string();
  m["config"] = format_config(ctx.config);
  if (ctx.command == "simulate") {
    m["seed"] = ctx.options.seed;
    m["slots"] = ctx.options.slots;
  }
  if (ctx.command == "sweep") {
    m["axis"] = ctx.options.axis;
    m["from"] = ctx.options.from;
    m["to"] = ctx.options.to;
    m["points"] = ctx.options.points;
  }
  m["outputs"] = ctx.outputs;
  for (const auto& [k, v] : ctx.extra.items()) m[k] = v;
  const auto path = output_path(ctx, "manifest.json");
  std::ofstream(path, std::ios::binary) << m.dump(2) << '\n';
}

void write_matrix(const fs::path& path, const Eigen::MatrixXd& m) {
  std::ofstream f(path, std::ios::binary);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) f << (j ? "," : "") << format_double(m(i, j));
    f << '\n';
  }
}

Model build_model(Context& ctx, const RunConfig& cfg) {
  auto model = validate(cfg.system, cfg.profiles);
  for (const auto& w : model.warnings) fmt::print(ctx.err, "warning: {}\n", w);
  return model;
}

int cmd_analyze(Context& ctx) {
  const auto model = build_model(ctx, ctx.config);
  const auto net = analyze_network(model, ctx.config.policies);
  CsvFile csv(output_path(ctx, "analyze.csv"),
              {"su", "omega", "theta", "p_fa", "p_d", "avg_energy", "battery_outage", "transmission_outage", "rate",
               "aic"});
  CsvFile zeta(output_path(ctx, "zeta.csv"), {"su", "k", "zeta"});
  fmt::print(ctx.out, "{:>4} {:>8} {:>8} {:>10} {:>10} {:>10} {:>14} {:>12}\n", "su", "omega", "theta", "B_avg",
             "P_b_out", "P_a_out", "R_LB [b/s]", "aic [W]");
  for (std::size_t n = 0; n < net.users.size(); ++n) {
    const auto& u = net.users[n];
    csv.row({std::to_string(n + 1), num(u.params.omega), num(u.params.theta), num(u.sensing.p_fa), num(u.sensing.p_d),
             num(u.chain.avg_energy), num(u.chain.battery_outage), num(u.transmission_outage), num(u.rate.total),
             num(u.interference)});
    for (Eigen::Index k = 0; k < u.chain.steady_state.size(); ++k) {
      zeta.row({std::to_string(n + 1), std::to_string(k), num(u.chain.steady_state[k])});
    }
    if (ctx.options.dump_matrix) write_matrix(output_path(ctx, fmt::format("transition_su{}.csv", n + 1)), u.chain.transition);
    fmt::print(ctx.out, "{:>4} {:>8.4g} {:>8.4g} {:>10.4f} {:>10.3e} {:>10.4f} {:>14.6g} {:>12.6g}\n", n + 1,
               u.params.omega, u.params.theta, u.chain.avg_energy, u.chain.battery_outage, u.transmission_outage,
               u.rate.total, u.interference);
  }
  csv.row({"total", "", "", "", "", "", "", "", num(net.totals.sum_rate), num(net.totals.aic_lhs)});
  fmt::print(ctx.out, "sum rate {:.6g} b/s, aic {:.6g} W (cap {}){}\n", net.totals.sum_rate, net.totals.aic_lhs,
             format_double(model.config.interference_cap), net.totals.aic_satisfied ? "" : " -- AIC VIOLATED");
  write_manifest(ctx);
  return kExitOk;
}

void write_optimum(Context& ctx, const OptimizationResult& r) {
  CsvFile csv(output_path(ctx, "optimize.csv"), {"su", "omega", "theta", "rate", "aic", "feasible"});
  for (std::size_t n = 0; n < r.params.size(); ++n) {
    csv.row({std::to_string(n + 1), num(r.params[n].omega), num(r.params[n].theta), num(r.per_su[n].rate),
             num(r.per_su[n].interference), r.feasible ? "1" : "0"});
  }
  csv.row({"total", "", "", num(r.rate), num(r.aic), r.feasible ? "1" : "0"});
  CsvFile traj(output_path(ctx, "trajectory.csv"), {"step", "rate"});
  for (std::size_t i = 0; i < r.diagnostics.trajectory.size(); ++i) {
    traj.row({std::to_string(i), num(r.diagnostics.trajectory[i])});
  }
  const auto& d = r.diagnostics;
  ctx.extra["search"] = {{"evaluations", d.evaluations},  {"failed_evaluations", d.failed_evaluations},
                         {"grid_omega", d.grid_omega},    {"grid_theta", d.grid_theta},
                         {"refine_levels", d.refine_levels}, {"sweeps", d.sweeps},
                         {"starts", d.starts},            {"omega_step", d.omega_step},
                         {"log_theta_step", d.log_theta_step}};
}

int cmd_optimize(Context& ctx) {
  const auto model = build_model(ctx, ctx.config);
  auto search = ctx.config.search;
  search.keep_trajectory = true;
  const auto r = solve_p1(model, search);
  write_optimum(ctx, r);
  for (std::size_t n = 0; n < r.params.size(); ++n) {
    fmt::print(ctx.out, "su.{}: omega* = {:.6g}, theta* = {:.6g}, R_LB = {:.6g} b/s, interference = {:.6g} W\n", n + 1,
               r.params[n].omega, r.params[n].theta, r.per_su[n].rate, r.per_su[n].interference);
  }
  fmt::print(ctx.out, "R*_LB = {:.6g} b/s, aic = {:.6g} W, cap = {}, {} evaluations\n", r.rate, r.aic,
             format_double(model.config.interference_cap), r.diagnostics.evaluations);
  write_manifest(ctx);
  if (!r.feasible) {
    fmt::print(ctx.err,
               "infeasible: no policy meets the interference cap {}; least achievable aic is {:.6g} W "
               "(reported point is the least-interference one)\n",
               format_double(model.config.interference_cap), r.aic);
    return kExitInfeasible;
  }
  return kExitOk;
}

int cmd_simulate(Context& ctx) {
  if (ctx.options.slots < 1) throw UsageError("--slots must be >= 1");
  const auto model = build_model(ctx, ctx.config);
  const auto net = analyze_network(model, ctx.config.policies);
  SimOptions opts;
  opts.slots = ctx.options.slots;
  opts.seed = ctx.options.seed;
  opts.record = ctx.options.dump_trace;
  const auto trace = simulate(model, ctx.config.policies, opts);
  std::vector<AnalyticSummary> analytic;
  for (const auto& u : net.users) analytic.push_back(AnalyticSummary::from(u));
  const auto report = compare(trace, analytic);

  CsvFile csv(output_path(ctx, "simulate.csv"),
              {"su", "quantity", "analytic", "empirical", "deviation", "tolerance", "kind", "pass"});
  for (const auto& i : report.items) {
    csv.row({std::to_string(i.su + 1), i.quantity, i.kind == "tv" ? "" : num(i.analytic),
             i.kind == "tv" ? "" : num(i.empirical), num(i.deviation), num(i.tolerance), i.kind, i.pass ? "1" : "0"});
    const auto values = i.kind == "tv" ? fmt::format("{:51}", "")
                                       : fmt::format("analytic {:>14.6g} empirical {:>14.6g}", i.analytic, i.empirical);
    fmt::print(ctx.out, "su.{} {:<20} {} {} dev {:.3g} (tol {}) {}\n", i.su + 1, i.quantity, values, i.kind,
               i.deviation, format_double(i.tolerance), i.pass ? "ok" : "FAIL");
  }
  nlohmann::json counters = nlohmann::json::array();
  for (const auto& u : trace.users) {
    counters.push_back({{"slots", u.slots},
                        {"transmissions", u.transmissions},
                        {"skipped_probes", u.skipped_probes},
                        {"overflow_events", u.overflow_events},
                        {"underflow_events", u.underflow_events}});
  }
  ctx.extra["counters"] = counters;
  ctx.extra["compare_pass"] = report.pass;
  if (ctx.options.dump_trace) {
    CsvFile t(output_path(ctx, "trace.csv"), {"slot", "su", "busy", "sensed_busy", "before", "after", "harvested",
                                             "probe", "spent", "gain", "rate", "interference"});
    for (const auto& r : trace.records) {
      t.row({std::to_string(r.slot), std::to_string(r.su + 1), std::to_string(r.busy), std::to_string(r.sensed_busy),
             std::to_string(r.before), std::to_string(r.after), std::to_string(r.harvested), std::to_string(r.probe),
             std::to_string(r.spent), num(r.gain), num(r.rate), num(r.interference)});
    }
  }
  write_manifest(ctx);
  fmt::print(ctx.out, "{}\n", report.pass ? "all comparisons within tolerance" : "comparison FAILED");
  return report.pass ? kExitOk : kExitOracle;
}

bool optimizing_axis(const std::string& axis) { return axis == "K" || axis == "I_av"; }

int cmd_sweep(Context& ctx) {
  const auto& axes = sweep_axes();
  const auto& axis = ctx.options.axis;
  if (std::find(axes.begin(), axes.end(), axis) == axes.end()) {
    throw UsageError(fmt::format("unknown sweep axis '{}'", axis));
  }
  if (!std::isfinite(ctx.options.from) || !std::isfinite(ctx.options.to)) throw UsageError("sweep range must be finite");
  if (ctx.options.points < 1) throw UsageError("--points must be >= 1");
  const auto values = axis_values(ctx.options.from, ctx.options.to, ctx.options.points);

  std::vector<std::string> header{axis, "status", "rate", "aic", "feasible", "avg_energy", "battery_outage",
                                  "transmission_outage"};
  for (std::size_t n = 0; n < ctx.config.profiles.size(); ++n) {
    header.push_back(fmt::format("omega_{}", n + 1));
    header.push_back(fmt::format("theta_{}", n + 1));
  }
  CsvFile csv(output_path(ctx, "sweep.csv"), header);
  std::vector<PolicyParams> previous;
  std::size_t flagged = 0;
  for (double v : values) {
    RunConfig cfg = ctx.config;
    std::vector<std::string> row{num(v)};
    try {
      apply_axis(cfg, axis, v);
      const auto model = validate(cfg.system, cfg.profiles);
      std::vector<PolicyParams> params = cfg.policies;
      std::string status = "ok";
      if (optimizing_axis(axis)) {
        auto search = cfg.search;
        if (!previous.empty()) search.warm_starts.push_back(previous);
        const auto r = solve_p1(model, search);
        params = r.params;
        if (r.feasible) {
          previous = r.params;
        } else {
          status = "infeasible";
        }
      }
      const auto net = analyze_network(model, params);
      double energy = 0.0, pb = 0.0, pa = 0.0;
      for (const auto& u : net.users) {
        energy += u.chain.avg_energy;
        pb += u.chain.battery_outage;
        pa += u.transmission_outage;
      }
      const double users = static_cast<double>(net.users.size());
      row.insert(row.end(), {status, num(net.totals.sum_rate), num(net.totals.aic_lhs),
                             net.totals.aic_satisfied ? "1" : "0", num(energy / users), num(pb / users),
                             num(pa / users)});
      for (const auto& p : params) {
        row.push_back(num(p.omega));
        row.push_back(num(p.theta));
      }
      fmt::print(ctx.out, "{} = {:<12.6g} R = {:<14.6g} aic = {:<12.6g} {}\n", axis, v,
                 net.totals.sum_rate, net.totals.aic_lhs, status);
    } catch (const ValidationError& e) {
      ++flagged;
      row.push_back(cell_text("invalid: " + std::string(e.what())));
      row.resize(header.size());
      fmt::print(ctx.out, "{} = {:<12.6g} invalid: {}\n", axis, v, e.what());
    } catch (const ChainError& e) {
      ++flagged;
      row.push_back(cell_text("invalid: " + std::string(e.what())));
      row.resize(header.size());
      fmt::print(ctx.out, "{} = {:<12.6g} invalid: {}\n", axis, v, e.what());
    }
    csv.row(row);
  }
  ctx.extra["flagged_rows"] = flagged;
  write_manifest(ctx);
  return kExitOk;
}

} // namespace

const std::vector<std::string>& sweep_axes() {
  static const std::vector<std::string> axes{"tau_s", "alpha_t", "omega", "theta", "K", "rho", "I_av"};
  return axes;
}

std::vector<double> axis_values(double from, double to, int points) {
  if (points < 1) throw std::invalid_argument("axis_values: points must be >= 1");
  if (points == 1) return {from};
  std::vector<double> v(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) v[i] = from + (to - from) * i / (points - 1);
  v.back() = to;
  return v;
}

void apply_axis(RunConfig& config, const std::string& axis, double value) {
  auto integral = [&](const char* name) {
    const double r = std::round(value);
    if (std::abs(r - value) > 1e-9 || std::abs(r) > 1e9) {
      throw ValidationError({fmt::format("{} must be an integer (got {})", name, format_double(value))});
    }
    return static_cast<int>(r);
  };
  if (axis == "tau_s") {
    config.system.sensing_duration = value;
  } else if (axis == "alpha_t") {
    config.system.probe_cells = integral("alpha_t");
  } else if (axis == "K") {
    config.system.battery_cells = integral("K");
  } else if (axis == "I_av") {
    config.system.interference_cap = value;
  } else if (axis == "rho") {
    for (auto& p : config.profiles) p.harvest_rate = value;
  } else if (axis == "omega") {
    if (!(value >= 0.0 && value <= 1.0)) throw ValidationError({fmt::format("omega must lie in [0,1] (got {})", value)});
    for (auto& p : config.policies) p.omega = value;
  } else if (axis == "theta") {
    if (!(value >= 0.0)) throw ValidationError({fmt::format("theta must be >= 0 (got {})", value)});
    for (auto& p : config.policies) p.theta = value;
  } else {
    throw std::invalid_argument(fmt::format("unknown sweep axis '{}'", axis));
  }
}

int run_command(const std::string& command, const CommandOptions& options, std::ostream& out, std::ostream& err) {
  try {
    Context ctx{options, out, err, command, resolve_config(options), {}};
    if (command == "analyze") return cmd_analyze(ctx);
    if (command == "optimize") return cmd_optimize(ctx);
    if (command == "simulate") return cmd_simulate(ctx);
    if (command == "sweep") return cmd_sweep(ctx);
    throw UsageError(fmt::format("unknown command '{}'", command));
  } catch (const ConfigError& e) {
    for (const auto& i : e.issues()) fmt::print(err, "error: {}\n", i);
    return kExitValidation;
  } catch (const ValidationError& e) {
    for (const auto& i : e.issues()) fmt::print(err, "error: {}\n", i);
    return kExitValidation;
  } catch (const UsageError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitValidation;
  } catch (const ChainError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitFailure;
  }
}

} // namespace ehcr
