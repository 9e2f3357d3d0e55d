// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "floatgrip/astrobee.hpp"
#include "floatgrip/compliance.hpp"
#include "floatgrip/contact.hpp"
#include "floatgrip/dynamics.hpp"
#include "floatgrip/errors.hpp"
#include "floatgrip/metrics.hpp"
#include "floatgrip/model_io.hpp"
#include "floatgrip/scenario.hpp"
#include "floatgrip/simrun.hpp"
#include "floatgrip/text.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace floatgrip;
using testing_util::uniform;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string num(double v, const char* fmt = "%.3g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

// Central differences of forward kinematics along random velocities.
Outcome jacobian_oracle() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const ModelDef m = testing_util::random_model(rng, 1 + trial % 7);
    const State s = testing_util::random_state(m, rng);
    const int link = std::uniform_int_distribution<int>(0, static_cast<int>(m.links.size()) - 1)(rng);
    const auto poses = forward_kinematics(m, s);
    const Vec3 point = poses[link].translation + testing_util::random_vec(rng, 0.3);
    const Vec3 local = invert(poses[link]).apply(point);
    const Eigen::MatrixXd jac = point_jacobian(m, poses, link, point);
    const double h = 1e-6;
    const auto position_at = [&](double t) {
      State x = s;
      integrate_positions(m, x.q, s.v, t);
      return forward_kinematics(m, x)[link].apply(local);
    };
    const Vec3 fd = (position_at(h) - position_at(-h)) / (2 * h);
    worst = std::max(worst, (jac * s.v - fd).cwiseAbs().maxCoeff());
  }
  const double t = seconds_since(start);
  return {worst <= 1e-6 && t < 5.0, "max error " + num(worst) + " over 200 samples, " + num(t) + " s"};
}

Eigen::MatrixXd random_psd(std::mt19937_64& rng, int n) {
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = uniform(rng, -1.0, 1.0);
  }
  if (n > 1 && uniform(rng, 0, 1) < 0.5) a.col(0).setZero();
  return a * a.transpose();
}

Eigen::MatrixXd random_jacobian(std::mt19937_64& rng, int cols) {
  Eigen::MatrixXd j(3, cols);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < cols; ++c) j(r, c) = uniform(rng, -1.0, 1.0);
  }
  return j;
}

Outcome compliance_map() {
  std::mt19937_64 rng(7);
  double triple = 0.0;
  double min_eig = 0.0;
  double loewner = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 6;
    JointCompliance cq;
    cq.matrix = random_psd(rng, n);
    for (int k = 0; k < n; ++k) cq.columns.push_back(k);
    const Eigen::MatrixXd j = random_jacobian(rng, n);
    const Mat3 c = contact_compliance(j, cq).matrix;
    // Element-wise sum over joint pairs.
    Mat3 naive = Mat3::Zero();
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        for (int k = 0; k < n; ++k) {
          for (int l = 0; l < n; ++l) naive(a, b) += j(a, k) * cq.matrix(k, l) * j(b, l);
        }
      }
    }
    triple = std::max(triple, (c - naive).cwiseAbs().maxCoeff());
    min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<Mat3>(c).eigenvalues().minCoeff());
    if ((c - c.transpose()).cwiseAbs().maxCoeff() != 0.0) min_eig = -1.0;
    JointCompliance hi = cq;
    hi.matrix += random_psd(rng, n);
    const Mat3 diff = contact_compliance(j, hi).matrix - c;
    loewner = std::min(loewner, Eigen::SelfAdjointEigenSolver<Mat3>(diff).eigenvalues().minCoeff());
  }
  const bool pass = triple <= 1e-12 && min_eig >= -1e-12 && loewner >= -1e-10;
  return {pass, "triple product error " + num(triple) + ", min eigenvalue " + num(min_eig) +
                    ", min Loewner difference eigenvalue " + num(loewner)};
}

constexpr const char* kBlock = R"(
link base parent=world joint=free pos=0,0,0 quat=1,0,0,0 mass=9.58 com=0,0,0 inertia=0.153,0.143,0.162,0,0,0
)";

Outcome thrust_closed_form() {
  const ModelDef block = parse_model(kBlock);
  const ScenarioDef s =
      parse_scenario("scenario \"thrust\" { phase p { duration 5 thrust 0.1 0 0 0 0 0 hold } }");
  const TrajectoryLog log = run_scenario(s, block);
  const auto& a = log.rows[log.rows.size() - 2];
  const auto& b = log.rows.back();
  const double dt = s.timestep;
  const double v = Vec3(b[1] - a[1], b[2] - a[2], b[3] - a[3]).norm() / dt;
  const double expected = 0.1 * 5.0 / 9.58;
  return {std::abs(v - 0.052192) <= 1e-6 && std::abs(v - expected) <= 1e-6,
          "|v_b| = " + num(v, "%.9f") + " m/s, F*T/m = " + num(expected, "%.9f")};
}

constexpr const char* kBaseWithArm = R"(
link base parent=world joint=free pos=0.1,-0.2,0.3 quat=1,0,0,0 mass=9.58 com=0.01,0.02,-0.01 inertia=0.153,0.143,0.162,0.001,0,0.002
link pan parent=base joint=revolute axis=0,0,1 pos=-0.16,0.03,0 quat=1,0,0,0 mass=0.2 com=-0.05,0,0 inertia=2e-4,3e-4,3e-4,0,0,0
link tilt parent=pan joint=revolute axis=0,1,0 pos=-0.1,0,0 quat=1,0,0,0 mass=0.3 com=-0.06,0.01,0 inertia=3e-4,4e-4,4e-4,0,0,0
)";

Outcome momentum_conservation() {
  const ModelDef m = parse_model(kBaseWithArm);
  State s = initial_state(m);
  const MomentumRecord h0 = total_momentum(m, s);
  const double dt = 1e-3;
  double linear = 0.0;
  double angular = 0.0;
  double excursion = 0.0;
  for (int k = 0; k < 10000; ++k) {
    StepForces f;
    f.tau = Eigen::VectorXd::Zero(m.nv);
    const double t = k * dt;
    f.tau[m.links[1].v_offset] = 0.05 * std::sin(2.0 * t);
    f.tau[m.links[2].v_offset] = 0.03 * std::cos(3.0 * t);
    s = forward_dynamics(m, s, f, {}, std::nullopt, dt);
    const MomentumRecord h = total_momentum(m, s);
    linear = std::max(linear, (h.linear - h0.linear).norm());
    angular = std::max(angular, (h.angular - h0.angular).norm());
    excursion = std::max(excursion, std::abs(s.q[m.links[1].q_offset]));
  }
  return {linear <= 1e-9 && angular <= 1e-8 && excursion > 0.1,
          "linear drift " + num(linear) + " kg*m/s, angular " + num(angular) +
              " kg*m^2/s, pan excursion " + num(excursion) + " rad"};
}

// Body over a rail along x, spheres touching it from above.
std::string rail_scene(double z, const std::string& spheres, double friction) {
  return "material rubber stiffness=100000 damping=0 friction=" + format_double(friction) +
         "\nlink body parent=world joint=free pos=0,0," + format_double(z) +
         " quat=1,0,0,0 mass=9.58 com=0,0,0 inertia=0.153,0.143,0.162,0,0,0\n" + spheres +
         "geom world shape=cylinder size=0.011,0.3 pos=0,0,0 "
         "quat=0.7071067811865476,0,0.7071067811865476,0 material=rubber\n";
}

std::string sphere(double x, double z) {
  return "geom body shape=sphere size=0.008 pos=" + format_double(x) + ",0," + format_double(z) +
         " quat=1,0,0,0 material=rubber\n";
}

Outcome contact_solver() {
  const auto start = std::chrono::steady_clock::now();
  const double dt = 1e-3;
  // Single pressing contact against the closed-form regularized solve.
  double press_error = 0.0;
  for (double force : {0.1, 1.0, 5.0}) {
    for (double compliance : {0.0, 1e-3, 4e-3}) {
      const ModelDef m = parse_model(rail_scene(0.019 - 1e-5, sphere(0, 0), 0.8));
      const State s = initial_state(m);
      const ThrusterCommand thrust{Wrench{Vec3::Zero(), Vec3(0, 0, -force)}, 0.0, 1.0};
      const StepSystem sys(m, s, {}, thrust, dt);
      const auto contacts = detect_contacts(m, sys.poses());
      JointCompliance cq;
      if (compliance > 0.0) {
        cq.matrix = Eigen::MatrixXd::Constant(1, 1, compliance);
        cq.columns = {2};
      }
      SolverConfig cfg;
      const ContactSolution sol = solve_contacts(sys, contacts, cq, cfg);
      const double r = 1.0 / (contacts[0].material.stiffness * dt) + compliance / dt;
      const double expected =
          (force * dt / 9.58 + cfg.baumgarte * contacts[0].depth / dt) / (1.0 / 9.58 + r);
      press_error = std::max(press_error, std::abs(sol.impulses[0].normal - expected));
    }
  }

  // Three frictionless contacts against a brute-force grid of the LCP.
  ModelDef m = parse_model(
      rail_scene(0.019, sphere(-0.1, -2e-8) + sphere(0.0, -3e-8) + sphere(0.12, -1e-8), 0.0));
  m.links[0].inertia.com = Vec3(0.01, 0.0, 0.02);
  const ThrusterCommand thrust{Wrench{Vec3(0.01, -0.005, 0.0), Vec3(0.0, 0.0, -2.0)}, 0.0, 1.0};
  const StepSystem sys(m, initial_state(m), {}, thrust, dt);
  const auto contacts = detect_contacts(m, sys.poses());
  SolverConfig cfg;
  cfg.max_iterations = 2000;
  cfg.tolerance = 1e-14;
  const ContactSolution sol = solve_contacts(sys, contacts, {}, cfg);
  Eigen::MatrixXd jn(3, m.nv);
  Eigen::Vector3d bias;
  Eigen::Vector3d reg;
  for (int i = 0; i < 3; ++i) {
    jn.row(i) = contacts[i].normal.transpose() * point_jacobian(m, sys.poses(), 0, contacts[i].position);
    bias[i] = -cfg.baumgarte * contacts[i].depth / dt;
    reg[i] = 1.0 / (contacts[i].material.stiffness * dt);
  }
  const Eigen::Matrix3d w = jn * sys.effective_mass().inverse() * jn.transpose();
  const Eigen::Vector3d u0 = jn * sys.free_velocity() + bias;
  const auto residual = [&](const Eigen::Vector3d& p) {
    return p.cwiseMin(u0 + w * p + reg.cwiseProduct(p)).cwiseAbs().sum();
  };
  const double h = 1e-4;
  double best = 1e300;
  Eigen::Vector3d best_p = Eigen::Vector3d::Zero();
  for (int a = 0; a <= 60; ++a) {
    for (int b = 0; b <= 60; ++b) {
      for (int c = 0; c <= 60; ++c) {
        const Eigen::Vector3d p(a * h, b * h, c * h);
        const double r = residual(p);
        if (r < best) {
          best = r;
          best_p = p;
        }
      }
    }
  }
  const Eigen::Vector3d pgs(sol.impulses[0].normal, sol.impulses[1].normal, sol.impulses[2].normal);
  const double grid_gap = (pgs - best_p).cwiseAbs().maxCoeff();

  // Cone feasibility with friction on random velocities.
  const ModelDef rough = [] {
    ModelDef r = parse_model(
        rail_scene(0.019, sphere(-0.1, -2e-8) + sphere(0.0, -3e-8) + sphere(0.12, -1e-8), 0.8));
    r.links[0].inertia.com = Vec3(0.01, 0.0, 0.02);
    return r;
  }();
  std::mt19937_64 rng(31);
  double cone = -1e300;
  long checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    State s = initial_state(rough);
    for (int k = 0; k < 6; ++k) s.v[k] = uniform(rng, -0.2, 0.2);
    const StepSystem rs(rough, s, {}, thrust, dt);
    const auto cs = detect_contacts(rough, rs.poses());
    const ContactSolution rsol = solve_contacts(rs, cs, {});
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const auto& p = rsol.impulses[i];
      cone = std::max(cone, std::max(-p.normal, p.tangent.norm() - cs[i].material.friction * p.normal));
      ++checked;
    }
  }
  const double t = seconds_since(start);
  const bool pass = press_error <= 1e-9 && grid_gap <= h && cone <= 1e-12 && t < 10.0;
  return {pass, "press error " + num(press_error) + " N*s, grid gap " + num(grid_gap) +
                    " N*s (cell " + num(h) + "), worst cone violation " + num(cone) + " over " +
                    std::to_string(checked) + " impulses, " + num(t) + " s"};
}

Outcome column_space() {
  const auto ranks = [](const ModelDef& m) {
    const auto poses = forward_kinematics(m, perch_configuration(m));
    const auto grip = gripper_links(m);
    std::vector<int> out;
    for (const auto& [link, point] : fingertip_points(m, poses)) {
      const Eigen::MatrixXd j = point_jacobian(m, poses, link, point);
      Eigen::MatrixXd cols(3, static_cast<Eigen::Index>(grip.size()));
      for (size_t c = 0; c < grip.size(); ++c) cols.col(c) = j.col(m.links[grip[c]].v_offset);
      const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(cols).singularValues();
      out.push_back(static_cast<int>((sv.array() > 1e-9).count()));
    }
    return out;
  };
  const auto dex = ranks(build_astrobee_dexcohand());
  const auto claw = ranks(build_astrobee_claw());
  bool pass = !dex.empty() && !claw.empty();
  std::string detail = "DexCoHand fingertip ranks";
  for (int r : dex) {
    pass = pass && r == 3;
    detail += " " + std::to_string(r);
  }
  detail += ", claw fingertip ranks";
  for (int r : claw) {
    pass = pass && r <= 1;
    detail += " " + std::to_string(r);
  }
  return {pass, detail};
}

struct Run {
  TrajectoryLog log;
  RunStats stats;
};

Run run_builtin(const std::string& name) {
  const ScenarioDef s = builtin_scenario(name);
  Run r;
  r.log = run_scenario(s, resolve_model(s), {}, &r.stats);
  return r;
}

std::map<std::string, Run> g_runs;

Outcome maneuver_ordering() {
  std::string detail;
  bool pass = true;
  for (const std::string m : {"tilt", "pan"}) {
    const auto start = std::chrono::steady_clock::now();
    auto fa = std::async(std::launch::async, run_builtin, "claw-" + m);
    auto fb = std::async(std::launch::async, run_builtin, "dexcohand-" + m);
    g_runs["claw-" + m] = fa.get();
    g_runs["dexcohand-" + m] = fb.get();
    const double t = seconds_since(start);
    const DeviationReport a = cross_axis_deviation(g_runs["claw-" + m].log);
    const DeviationReport b = cross_axis_deviation(g_runs["dexcohand-" + m].log);
    const ComparisonReport c = compare(a, b);
    const bool done = a.maneuver_completed && b.maneuver_completed;
    const bool ordered = m == "tilt" ? c.headline.b * 2.0 <= c.headline.a : c.headline.b < c.headline.a;
    pass = pass && done && ordered && t < 60.0;
    if (!detail.empty()) detail += "; ";
    detail += m + ": " + c.headline.label + " claw " + num(c.headline.a, "%.3f") + " mm vs DexCoHand " +
              num(c.headline.b, "%.3f") + " mm (ratio " + num(c.headline.a / c.headline.b, "%.2f") +
              "), completed " + (done ? "both" : "not both") + ", " + num(t, "%.2f") + " s";
  }
  return {pass, detail};
}

Outcome compliance_softening() {
  const ScenarioDef s = builtin_scenario("dexcohand-tilt");
  const double base = g_runs.count("dexcohand-tilt") ? g_runs["dexcohand-tilt"].stats.peak_step_impulse
                                                     : run_builtin("dexcohand-tilt").stats.peak_step_impulse;
  AstrobeeParams soft;
  soft.dex_stiffness *= 0.5;
  RunStats stats;
  run_scenario(s, build_astrobee_dexcohand(soft), {}, &stats);
  return {stats.peak_step_impulse < base,
          "peak step impulse " + num(base, "%.4f") + " N*s at default, " +
              num(stats.peak_step_impulse, "%.4f") + " N*s with doubled joint compliance"};
}

int shell(const std::string& command) {
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Two CLI runs of every builtin into separate directories, plotted.
Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "floatgrip-acceptance";
  fs::remove_all(root);
  bool pass = true;
  std::string detail;
  for (const auto& s : builtin_scenarios()) {
    std::string csv[2];
    std::string svg[2];
    for (int k = 0; k < 2; ++k) {
      const fs::path dir = root / std::to_string(k);
      const std::string cli = FLOATGRIP_CLI;
      const int rc = shell(cli + " run " + s.name + " --out " + dir.string() + " >/dev/null") +
                     shell(cli + " plot " + (dir / (s.name + ".csv")).string() + " --out " +
                           (dir / (s.name + ".svg")).string() + " >/dev/null");
      if (rc != 0) pass = false;
      csv[k] = slurp(dir / (s.name + ".csv"));
      svg[k] = slurp(dir / (s.name + ".svg"));
    }
    const bool same = !csv[0].empty() && csv[0] == csv[1] && !svg[0].empty() && svg[0] == svg[1];
    // The library run in this process must agree with the CLI byte for byte.
    const bool matches = !g_runs.count(s.name) || write_csv(g_runs[s.name].log) == csv[0];
    pass = pass && same && matches;
    detail += (detail.empty() ? "" : ", ") + s.name + (same && matches ? " identical" : " DIFFERS");
  }
  fs::remove_all(root);
  return {pass, detail};
}

Outcome parser_suites() {
  std::mt19937_64 rng(4242);
  int model_trips = 0;
  int scenario_trips = 0;
  for (int i = 0; i < 100; ++i) {
    const ModelDef m = testing_util::random_model(rng, 1 + i % 8);
    const std::string text = serialize_model(m);
    const ModelDef back = parse_model(text);
    if (structurally_equal(m, back) && serialize_model(back) == text) ++model_trips;
    const ScenarioDef s = testing_util::random_scenario(rng);
    const std::string stext = serialize_scenario(s);
    const ScenarioDef sback = parse_scenario(stext);
    if (sback == s && serialize_scenario(sback) == stext) ++scenario_trips;
  }

  static const char* model_words[] = {"material", "link", "geom", "world", "parent=world",
                                      "joint=free", "joint=revolute", "axis=0,0,1", "pos=0,0,0",
                                      "quat=1,0,0,0", "mass=1", "com=0,0,0", "inertia=1,1,1,0,0,0",
                                      "shape=sphere", "size=0.1", "material=m", "limits=1,0",
                                      "couple=g:1", "actuated", "\n", "#", "=", ","};
  static const char* scenario_words[] = {"scenario", "\"x\"", "{", "}", "phase", "p", "duration",
                                         "1", "-1", "thrust", "hold", "ramp", "joint", "step",
                                         "trapezoid", "0.25", "gripper", "open", "close", "log",
                                         "joints", "model", "timestep", "gravity", "seed", "#", "\n"};
  const std::string model_base = serialize_model(build_astrobee_dexcohand());
  const std::string scenario_base = serialize_scenario(builtin_scenario("claw-tilt"));
  int model_failures = 0;
  int scenario_failures = 0;
  for (int i = 0; i < 100000; ++i) {
    const std::string mt = testing_util::fuzz_input(rng, model_base, model_words, i);
    try {
      parse_model(mt);
    } catch (const ParseError&) {
    } catch (...) {
      ++model_failures;
    }
    const std::string st = testing_util::fuzz_input(rng, scenario_base, scenario_words, i);
    try {
      parse_scenario(st);
    } catch (const ParseError&) {
    } catch (...) {
      ++scenario_failures;
    }
  }
  const bool pass = model_trips == 100 && scenario_trips == 100 && model_failures == 0 &&
                    scenario_failures == 0;
  return {pass, "round trips model " + std::to_string(model_trips) + "/100, scenario " +
                    std::to_string(scenario_trips) + "/100; fuzz 100000 inputs each, unexpected "
                    "exceptions model " + std::to_string(model_failures) + ", scenario " +
                    std::to_string(scenario_failures)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> checks[] = {
      {"point-jacobian-finite-differences", jacobian_oracle},
      {"contact-compliance-map", compliance_map},
      {"thrust-closed-form", thrust_closed_form},
      {"momentum-conservation", momentum_conservation},
      {"contact-solver", contact_solver},
      {"gripper-column-space", column_space},
      {"tilt-pan-ordering", maneuver_ordering},
      {"compliance-softening", compliance_softening},
      {"determinism", determinism},
      {"parser-suites", parser_suites},
  };
  int failures = 0;
  for (const auto& [name, check] : checks) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
