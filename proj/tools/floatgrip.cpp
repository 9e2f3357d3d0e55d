// floatgrip: run perch-and-maneuver scenarios, compare grippers, validate
// input files, list builtins and plot logs.
//
// Exit codes: 0 success, 1 usage or output-location problem, 2 parse or
// bind failure, 3 numerical or other runtime failure.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "floatgrip/astrobee.hpp"
#include "floatgrip/errors.hpp"
#include "floatgrip/metrics.hpp"
#include "floatgrip/model_io.hpp"
#include "floatgrip/plot.hpp"
#include "floatgrip/scenario.hpp"
#include "floatgrip/simrun.hpp"

namespace fs = std::filesystem;
using namespace floatgrip;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kInput = 2;
constexpr int kRuntime = 3;

constexpr const char* kOutEnv = "FLOATGRIP_OUT";

// Problems with the command line or the output location.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An input that cannot be read.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string default_out_dir() {
  const char* env = std::getenv(kOutEnv);
  return env && *env ? env : ".";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.close();
  if (!out) throw UsageError("cannot write '" + path.string() + "'");
}

// Creates the directory if needed and proves it accepts files.
fs::path prepare_out_dir(const std::string& dir) {
  const fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (!fs::is_directory(p)) throw UsageError("output directory '" + dir + "' cannot be created");
  const fs::path probe = p / ".floatgrip-write-probe";
  {
    std::ofstream out(probe);
    out << "probe";
    out.close();
    if (!out) throw UsageError("output directory '" + dir + "' is not writable");
  }
  fs::remove(probe, ec);
  return p;
}

// Builtin scenario names are safe; file-given names may not be.
std::string file_stem(const std::string& name) {
  std::string out;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    out += ok ? c : '_';
  }
  if (out.empty() || out.front() == '.') out.insert(0, "scenario");
  return out;
}

bool looks_like_scenario(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    return line.compare(first, 8, "scenario") == 0;
  }
  return false;
}

// A builtin scenario name or a scenario file. File scenarios resolve
// relative model paths against the file's directory.
ScenarioDef load_scenario(const std::string& input) {
  try {
    return builtin_scenario(input);
  } catch (const std::out_of_range&) {
  }
  ScenarioDef s = parse_scenario(read_file(input));
  if (!s.model.empty() && !is_builtin_model(s.model) && fs::path(s.model).is_relative()) {
    const fs::path beside = fs::path(input).parent_path() / s.model;
    if (fs::exists(beside)) s.model = beside.string();
  }
  return s;
}

struct RunResult {
  ScenarioDef scenario;
  TrajectoryLog log;
  std::optional<DeviationReport> report;
  double seconds = 0.0;
};

RunResult simulate(ScenarioDef scenario, std::optional<double> timestep, bool diagnostics) {
  if (timestep) scenario.timestep = *timestep;
  const ModelDef model = resolve_model(scenario);
  RunOptions options;
  options.diagnostics = diagnostics;
  const auto start = std::chrono::steady_clock::now();
  RunResult r;
  r.log = run_scenario(scenario, model, options);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (parse_maneuver(r.log.meta_value("maneuver"))) r.report = cross_axis_deviation(r.log);
  r.scenario = std::move(scenario);
  return r;
}

std::string plain_report(const RunResult& r) {
  std::string out = "scenario: " + r.scenario.name + "\nmodel: " + r.scenario.model + "\n";
  out += "maneuver: none (no single trapezoid joint command in the final phase)\n";
  const auto& first = r.log.rows.front();
  const auto& last = r.log.rows.back();
  char buf[128];
  std::snprintf(buf, sizeof buf, "final_base_displacement_mm: %.3f %.3f %.3f\n",
                (last[1] - first[1]) * 1000.0, (last[2] - first[2]) * 1000.0,
                (last[3] - first[3]) * 1000.0);
  return out + buf;
}

// Writes <stem>.csv and <stem>.report.txt.
void write_outputs(const fs::path& dir, const RunResult& r) {
  const std::string stem = file_stem(r.scenario.name);
  write_file(dir / (stem + ".csv"), write_csv(r.log));
  write_file(dir / (stem + ".report.txt"), r.report ? format_report(*r.report) : plain_report(r));
  std::cout << "wrote " << (dir / (stem + ".csv")).string() << " ("
            << r.log.rows.size() << " rows, " << r.seconds << " s)\n";
}

int cmd_run(const std::string& input, const std::string& out, std::optional<double> timestep,
            bool diagnostics) {
  const ScenarioDef scenario = load_scenario(input);
  const fs::path dir = prepare_out_dir(out);
  const RunResult r = simulate(scenario, timestep, diagnostics);
  write_outputs(dir, r);
  if (r.report) std::cout << format_report(*r.report);
  return kOk;
}

int cmd_compare(const std::string& maneuver, const std::string& out,
                std::optional<double> timestep, bool diagnostics) {
  const fs::path dir = prepare_out_dir(out);
  const ScenarioDef a = builtin_scenario("claw-" + maneuver);
  const ScenarioDef b = builtin_scenario("dexcohand-" + maneuver);
  auto fa = std::async(std::launch::async, simulate, a, timestep, diagnostics);
  auto fb = std::async(std::launch::async, simulate, b, timestep, diagnostics);
  const RunResult ra = fa.get();
  const RunResult rb = fb.get();
  write_outputs(dir, ra);
  write_outputs(dir, rb);
  const std::string table = format_comparison(compare(*ra.report, *rb.report));
  write_file(dir / ("compare-" + maneuver + ".txt"), table);
  std::cout << table;
  return kOk;
}

// Parses and binds without simulating.
std::string validate_one(const std::string& input) {
  try {
    const ScenarioDef s = builtin_scenario(input);
    BoundScenario(s, resolve_model(s));
    return "builtin scenario '" + s.name + "'";
  } catch (const std::out_of_range&) {
  }
  if (is_builtin_model(input)) {
    const ModelDef m = builtin_model(input);
    return "builtin model '" + input + "' (" + std::to_string(m.links.size()) + " links)";
  }
  const std::string text = read_file(input);
  if (looks_like_scenario(text)) {
    const ScenarioDef s = load_scenario(input);
    const ModelDef m = resolve_model(s);
    BoundScenario bound(s, m);
    return "scenario '" + s.name + "' (" + std::to_string(s.phases.size()) + " phases, " +
           std::to_string(bound.step_count()) + " steps)";
  }
  const ModelDef m = parse_model(text);
  return "model (" + std::to_string(m.links.size()) + " links, " + std::to_string(m.nv) +
         " dof)";
}

int cmd_validate(const std::vector<std::string>& inputs) {
  int rc = kOk;
  for (const auto& input : inputs) {
    try {
      const std::string summary = validate_one(input);
      std::cout << "ok " << input << ": " << summary << "\n";
    } catch (const ParseError& e) {
      std::cerr << "error: " << input << ":" << e.what() << "\n";
      rc = kInput;
    } catch (const ModelError& e) {
      std::cerr << "error: " << input << ": " << e.what() << "\n";
      rc = kInput;
    } catch (const BindError& e) {
      std::cerr << "error: " << input << ": " << e.what() << "\n";
      rc = kInput;
    } catch (const InputError& e) {
      std::cerr << "error: " << e.what() << "\n";
      rc = kInput;
    }
  }
  return rc;
}

int cmd_list() {
  std::cout << "scenarios:\n";
  for (const auto& s : builtin_scenarios()) {
    std::cout << "  " << s.name << "  model=" << s.model << "  duration=" << s.total_duration()
              << " s  phases=";
    for (size_t i = 0; i < s.phases.size(); ++i) std::cout << (i ? "," : "") << s.phases[i].name;
    std::cout << "\n";
  }
  std::cout << "models:\n";
  for (auto id : {kClawModelId, kDexCoHandModelId}) {
    const ModelDef m = builtin_model(id);
    std::cout << "  " << id << "  links=" << m.links.size() << "  dof=" << m.nv
              << "  gripper_joints=" << gripper_links(m).size() << "\n";
  }
  return kOk;
}

int cmd_plot(const std::string& csv, const std::vector<std::string>& channels,
             const std::string& out) {
  const TrajectoryLog log = read_csv(read_file(csv));
  std::string svg;
  try {
    svg = plot_svg(log, channels);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  fs::path target = out.empty() ? prepare_out_dir(default_out_dir()) /
                                      (fs::path(csv).stem().string() + ".svg")
                                : fs::path(out);
  if (target.has_parent_path()) prepare_out_dir(target.parent_path().string());
  write_file(target, svg);
  std::cout << "wrote " << target.string() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Floating-base gripper simulator: perch, pan and tilt on a handrail."};
  app.require_subcommand(1);
  app.footer("Default output directory: $" + std::string(kOutEnv) +
             " or the current directory.\nExit codes: 0 ok, 1 usage, 2 parse/bind, 3 numerical.");

  std::string out = default_out_dir();
  std::optional<double> timestep;
  bool diagnostics = false;
  std::string format = "csv";
  const auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("--out", out, "Output directory")->capture_default_str();
    cmd->add_option("--timestep", timestep, "Override the scenario timestep (s)")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--diagnostics", diagnostics, "Log solver iterations and residuals");
    cmd->add_option("--format", format, "Log format")->check(CLI::IsMember({"csv"}))
        ->capture_default_str();
  };

  std::string input;
  auto* run = app.add_subcommand("run", "Run a builtin scenario or a scenario file");
  run->add_option("scenario", input, "Builtin name or scenario file")->required();
  add_run_flags(run);

  std::string maneuver;
  auto* cmp = app.add_subcommand("compare", "Run claw and DexCoHand on one maneuver and compare");
  cmp->add_option("maneuver", maneuver, "tilt or pan")
      ->required()
      ->check(CLI::IsMember({"tilt", "pan"}));
  add_run_flags(cmp);

  std::vector<std::string> inputs;
  auto* val = app.add_subcommand("validate", "Parse and bind inputs without simulating");
  val->add_option("inputs", inputs, "Builtin ids, model files or scenario files")->required();

  app.add_subcommand("list", "List builtin scenarios and models");

  std::string csv;
  std::string svg_out;
  std::vector<std::string> channels{"px", "py", "pz"};
  auto* plot = app.add_subcommand("plot", "Plot log channels to SVG");
  plot->add_option("csv", csv, "Log written by run or compare")->required();
  plot->add_option("--channels", channels, "Columns to plot")->delimiter(',')->capture_default_str();
  plot->add_option("--out", svg_out, "SVG path (default <out dir>/<csv stem>.svg)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(input, out, timestep, diagnostics);
    if (*cmp) return cmd_compare(maneuver, out, timestep, diagnostics);
    if (*val) return cmd_validate(inputs);
    if (*plot) return cmd_plot(csv, channels, svg_out);
    return cmd_list();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kInput;
  } catch (const ModelError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return kInput;
  } catch (const BindError& e) {
    std::cerr << "bind error: " << e.what() << "\n";
    return kInput;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
}
