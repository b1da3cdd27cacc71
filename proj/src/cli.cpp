// Copyright 2026 The Virtual Force Teleop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "teleop/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <system_error>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "teleop/ablation.hpp"
#include "teleop/bridge.hpp"
#include "teleop/config_text.hpp"
#include "teleop/metrics.hpp"
#include "teleop/scenario.hpp"
#include "teleop/teleop_loop.hpp"
#include "teleop/trace.hpp"

namespace teleop {

namespace {

// Bad flags or unreadable / invalid input files.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void configure_logging() {
  static const bool once = [] {
    auto logger = spdlog::stderr_color_st("teleop");
    spdlog::set_default_logger(logger);
    return true;
  }();
  (void)once;
  const char* level = std::getenv("TELEOP_LOG_LEVEL");
  if (level == nullptr) {
    spdlog::set_level(spdlog::level::warn);
    return;
  }
  const auto parsed = spdlog::level::from_str(level);
  // from_str maps unknown names to off.
  if (parsed == spdlog::level::off && std::string(level) != "off") {
    throw InputError(std::string("TELEOP_LOG_LEVEL: unknown level '") + level + "'");
  }
  spdlog::set_level(parsed);
}

std::string describe(const ConfigError& e) {
  std::string out;
  for (const auto& issue : e.issues()) out += "\n  " + issue;
  return out;
}

struct ScenarioFlags {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> transform;
  std::optional<int> tick_rate;
};

void add_scenario_flags(CLI::App* cmd, ScenarioFlags& f, const std::string& default_scenario) {
  auto* opt = cmd->add_option("--scenario", f.scenario, "Scenario name or path");
  if (default_scenario.empty()) {
    opt->required();
  } else {
    f.scenario = default_scenario;
    opt->capture_default_str();
  }
  cmd->add_option("--seed", f.seed, "RNG seed override");
  cmd->add_option("--tick-rate", f.tick_rate, "Control rate override, Hz [50, 1000]");
}

Scenario load_with_overrides(const ScenarioFlags& f) {
  const auto path = resolve_scenario(f.scenario);
  if (!std::filesystem::is_regular_file(path)) throw InputError("scenario file not found: " + path.string());
  Scenario s;
  try {
    s = load_scenario(path);
  } catch (const ConfigSyntaxError& e) {
    throw InputError(path.string() + ": " + e.what());
  } catch (const ConfigError& e) {
    throw InputError(path.string() + ": invalid scenario" + describe(e));
  } catch (const std::runtime_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  if (f.seed) s.seed = *f.seed;
  if (f.transform) {
    const auto t = parse_transform(*f.transform);
    if (!t) throw InputError("unknown transform '" + *f.transform + "' (abs, squared, exp, tanh)");
    s.feedback.transform = *t;
  }
  if (f.tick_rate) {
    try {
      set_tick_rate(s, *f.tick_rate);
    } catch (const ConfigError& e) {
      throw InputError("--tick-rate " + std::to_string(*f.tick_rate) + ":" + describe(e));
    }
  }
  return s;
}

std::vector<VelocityTransform> parse_transform_list(const std::string& list) {
  std::vector<VelocityTransform> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto t = parse_transform(item);
    if (!t) throw InputError("unknown transform '" + item + "' (abs, squared, exp, tanh)");
    out.push_back(*t);
  }
  if (out.empty()) throw InputError("--transforms needs at least one transform");
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

MetricsConfig metrics_config(double f_cutoff, int jerk_window) {
  MetricsConfig c;
  c.f_cutoff = f_cutoff;
  c.jerk_window_ticks = jerk_window;
  if (!(f_cutoff > 0.0)) throw InputError("--f-cutoff must be > 0");
  if (jerk_window < 1) throw InputError("--jerk-window must be >= 1");
  return c;
}

// Commands. Each returns an exit code; InputError maps to 1 and any other
// exception to 2 in run_cli.

struct RunArgs {
  ScenarioFlags scenario;
  std::string trace;
  std::string binary_trace;
  std::string report;
};

int cmd_run(const RunArgs& a, std::ostream& out) {
  const Scenario s = load_with_overrides(a.scenario);
  const std::filesystem::path trace_path = a.trace.empty() ? s.name + ".ndjson" : a.trace;
  NdjsonTraceWriter writer(trace_path);
  TeleopSession session(s);
  std::vector<TraceRecord> trace;
  trace.reserve(static_cast<std::size_t>(s.ticks()));
  for (std::int64_t k = 0; k < s.ticks(); ++k) {
    trace.push_back(session.step(scripted_sample(s, static_cast<double>(k) * s.dt())));
    writer.write(trace.back());
  }
  if (!a.binary_trace.empty()) write_binary(a.binary_trace, trace);

  double mean_factor = 0.0;
  std::size_t contact = 0;
  for (const auto& r : trace) {
    mean_factor += r.factor;
    contact += r.in_contact ? 1 : 0;
  }
  mean_factor /= static_cast<double>(std::max<std::size_t>(1, trace.size()));
  if (!a.report.empty() && trace.size() >= 2) {
    write_text(a.report, report_json(compute_stability_report(trace, s.name, s.feedback.transform)) + "\n");
  }
  char line[256];
  std::snprintf(line, sizeof line, "%s: %zu ticks, %.3f s, transform %s, mean factor %.6f, contact ticks %zu\n",
                s.name.c_str(), trace.size(), static_cast<double>(trace.size()) * s.dt(),
                std::string(to_string(s.feedback.transform)).c_str(), mean_factor, contact);
  out << line << "trace: " << trace_path.string() << "\n";
  return kExitOk;
}

struct AblateArgs {
  ScenarioFlags scenario;
  std::string transforms = "abs,squared,exp,tanh";
  std::string report = "ablation.ndjson";
  double f_cutoff = 5.0;
  int jerk_window = 20;
};

int cmd_ablate(const AblateArgs& a, std::ostream& out) {
  const Scenario s = load_with_overrides(a.scenario);
  const auto transforms = parse_transform_list(a.transforms);
  const MetricsConfig config = metrics_config(a.f_cutoff, a.jerk_window);
  const auto reports = ablation_report(s, transforms, config);
  std::string lines;
  for (const auto& r : reports) lines += report_json(r) + "\n";
  write_text(a.report, lines);
  out << comparison_table(reports) << "report: " << a.report << "\n";
  return kExitOk;
}

struct MetricsArgs {
  std::string trace;
  std::string scenario_name = "trace";
  std::string transform = "squared";
  std::string report;
  double f_cutoff = 5.0;
  int jerk_window = 20;
};

bool has_binary_magic(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[sizeof kBinaryTraceMagic] = {};
  in.read(magic, sizeof magic);
  return in.gcount() == static_cast<std::streamsize>(sizeof magic) &&
         std::equal(std::begin(magic), std::end(magic), std::begin(kBinaryTraceMagic));
}

int cmd_metrics(const MetricsArgs& a, std::ostream& out) {
  const auto transform = parse_transform(a.transform);
  if (!transform) throw InputError("unknown transform '" + a.transform + "' (abs, squared, exp, tanh)");
  const MetricsConfig config = metrics_config(a.f_cutoff, a.jerk_window);
  if (!std::filesystem::is_regular_file(a.trace)) throw InputError("trace file not found: " + a.trace);
  std::vector<TraceRecord> trace;
  try {
    trace = has_binary_magic(a.trace) ? read_binary(std::filesystem::path(a.trace))
                                      : read_ndjson(std::filesystem::path(a.trace));
  } catch (const std::exception& e) {
    throw InputError(a.trace + ": " + e.what());
  }
  if (trace.size() < 2) throw InputError(a.trace + ": trace has fewer than 2 records");
  StabilityReport rep;
  try {
    rep = compute_stability_report(trace, a.scenario_name, *transform, config);
  } catch (const std::invalid_argument& e) {
    throw InputError(a.trace + ": " + e.what());
  }
  const std::string json = report_json(rep);
  if (!a.report.empty()) write_text(a.report, json + "\n");
  out << json << "\n";
  if (!rep.feedback_correlation.defined) out << "feedback correlation: undefined (no contact variance)\n";
  return kExitOk;
}

struct BridgeArgs {
  ScenarioFlags scenario;
  BridgeOptions options;
  std::optional<std::int64_t> max_ticks;
  bool lockstep = false;
  std::string trace;
};

int cmd_bridge(const BridgeArgs& a, std::ostream& out) {
  const Scenario s = load_with_overrides(a.scenario);
  BridgeOptions opts = a.options;
  opts.max_ticks = a.max_ticks;
  opts.pacing = a.lockstep ? BridgePacing::Lockstep : BridgePacing::Realtime;
  if (!(opts.stream_hz >= 30.0)) throw InputError("--stream-hz must be >= 30");
  std::optional<Bridge> bridge;
  try {
    bridge.emplace(s, opts);
  } catch (const std::system_error& e) {
    throw std::runtime_error(std::string(e.what()) + " (port busy?)");
  }
  out << "bridge listening on ws://" << opts.address << ":" << bridge->port() << "\n" << std::flush;
  bridge->run();
  if (!a.trace.empty()) write_ndjson(std::filesystem::path(a.trace), bridge->trace());
  const auto st = bridge->stats();
  out << "bridge stopped: " << bridge->trace().size() << " ticks, " << st.poses_received << " poses in, "
      << st.records_queued << " records out, " << st.records_dropped << " dropped\n";
  return kExitOk;
}

}  // namespace

std::filesystem::path resolve_scenario(const std::string& name_or_path) {
  const std::filesystem::path p(name_or_path);
  if (p.has_parent_path() || p.has_extension()) return p;
  return std::filesystem::path(TELEOP_DEFAULT_CONFIG_DIR) / "scenarios" / (name_or_path + ".scenario");
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Virtual force teleoperation simulator"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run a scripted scenario and write its trace");
  add_scenario_flags(run, run_args.scenario, "");
  run->add_option("--transform", run_args.scenario.transform, "Velocity transform override");
  run->add_option("--trace", run_args.trace, "NDJSON trace output (default <scenario>.ndjson)");
  run->add_option("--binary-trace", run_args.binary_trace, "Compact binary trace output");
  run->add_option("--report", run_args.report, "Stability report output (JSON)");

  AblateArgs ablate_args;
  auto* ablate = app.add_subcommand("ablate", "Compare velocity transforms on one scenario");
  add_scenario_flags(ablate, ablate_args.scenario, "hidden_wall_drag");
  ablate->add_option("--transforms", ablate_args.transforms, "Comma-separated transforms")->capture_default_str();
  ablate->add_option("--report", ablate_args.report, "Report output, one JSON object per line")
      ->capture_default_str();
  ablate->add_option("--f-cutoff", ablate_args.f_cutoff, "High-band cutoff, Hz")->capture_default_str();
  ablate->add_option("--jerk-window", ablate_args.jerk_window, "Jerk window, ticks")->capture_default_str();

  MetricsArgs metrics_args;
  auto* metrics = app.add_subcommand("metrics", "Stability report of a stored trace");
  metrics->add_option("trace", metrics_args.trace, "NDJSON or binary trace")->required();
  metrics->add_option("--scenario-name", metrics_args.scenario_name, "Label for the report")->capture_default_str();
  metrics->add_option("--transform", metrics_args.transform, "Transform label for the report")
      ->capture_default_str();
  metrics->add_option("--report", metrics_args.report, "Report output (JSON)");
  metrics->add_option("--f-cutoff", metrics_args.f_cutoff, "High-band cutoff, Hz")->capture_default_str();
  metrics->add_option("--jerk-window", metrics_args.jerk_window, "Jerk window, ticks")->capture_default_str();

  BridgeArgs bridge_args;
  auto* bridge = app.add_subcommand("bridge", "Serve the loop to an operator console over WebSocket");
  add_scenario_flags(bridge, bridge_args.scenario, "free_sweep");
  bridge->add_option("--transform", bridge_args.scenario.transform, "Velocity transform override");
  bridge->add_option("--address", bridge_args.options.address, "Listen address")->capture_default_str();
  bridge->add_option("--port", bridge_args.options.port, "Listen port (0 picks one)")->capture_default_str();
  bridge->add_option("--stream-hz", bridge_args.options.stream_hz, "Record stream rate, >= 30")
      ->capture_default_str();
  bridge->add_option("--max-ticks", bridge_args.max_ticks, "Stop after this many ticks");
  bridge->add_flag("--lockstep", bridge_args.lockstep, "Advance one tick per received pose");
  bridge->add_option("--trace", bridge_args.trace, "NDJSON trace of the session, written on exit");

  std::vector<const char*> argv{"teleop"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    configure_logging();
    if (run->parsed()) return cmd_run(run_args, out);
    if (ablate->parsed()) return cmd_ablate(ablate_args, out);
    if (metrics->parsed()) return cmd_metrics(metrics_args, out);
    return cmd_bridge(bridge_args, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "runtime fault: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace teleop
