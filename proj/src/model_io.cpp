#include "floatgrip/model_io.hpp"

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "floatgrip/errors.hpp"
#include "floatgrip/text.hpp"

namespace floatgrip {
namespace {

[[noreturn]] void syntax_error(int line, int column, const std::string& message) {
  throw ParseError(ParseError::Kind::Syntax, line, column, message);
}

[[noreturn]] void semantic_error(int line, int column, const std::string& message) {
  throw ParseError(ParseError::Kind::Semantic, line, column, message);
}

struct KeyValue {
  std::string_view key;
  std::string_view value;
  int column = 1;
  int value_column = 1;
  bool has_value = false;
};

KeyValue split_key_value(const Token& token) {
  KeyValue kv;
  kv.column = token.column;
  const auto eq = token.text.find('=');
  if (eq == std::string_view::npos) {
    kv.key = token.text;
    return kv;
  }
  kv.key = token.text.substr(0, eq);
  kv.value = token.text.substr(eq + 1);
  kv.value_column = token.column + static_cast<int>(eq) + 1;
  kv.has_value = true;
  return kv;
}

std::vector<double> parse_numbers(const KeyValue& kv, int line, std::size_t expected) {
  if (!kv.has_value || kv.value.empty()) {
    syntax_error(line, kv.column, "'" + std::string(kv.key) + "' needs a value");
  }
  std::vector<double> out;
  int column = kv.value_column;
  for (std::string_view part : split(kv.value, ',')) {
    const auto v = parse_double(part);
    if (!v) {
      syntax_error(line, column, "expected a number, got '" + std::string(part) + "'");
    }
    out.push_back(*v);
    column += static_cast<int>(part.size()) + 1;
  }
  if (expected != 0 && out.size() != expected) {
    syntax_error(line, kv.value_column,
                 "'" + std::string(kv.key) + "' expects " + std::to_string(expected) +
                     " values, got " + std::to_string(out.size()));
  }
  return out;
}

Vec3 parse_vec3(const KeyValue& kv, int line) {
  const auto v = parse_numbers(kv, line, 3);
  return {v[0], v[1], v[2]};
}

UnitQuaternion parse_quat(const KeyValue& kv, int line) {
  const auto v = parse_numbers(kv, line, 4);
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]);
  if (!std::isfinite(n) || n == 0.0) {
    syntax_error(line, kv.value_column, "quaternion norm must be finite and nonzero");
  }
  return {v[0], v[1], v[2], v[3]};
}

double parse_scalar(const KeyValue& kv, int line) {
  return parse_numbers(kv, line, 1)[0];
}

std::string_view require_name(const std::vector<Token>& tokens, std::size_t index,
                              int line, std::string_view what) {
  if (index >= tokens.size()) {
    const int column = tokens.empty() ? 1
                                      : tokens.back().column +
                                            static_cast<int>(tokens.back().text.size());
    syntax_error(line, column, "expected " + std::string(what));
  }
  const Token& t = tokens[index];
  if (t.text.find('=') != std::string_view::npos) {
    syntax_error(line, t.column, "expected " + std::string(what) + ", got '" +
                                     std::string(t.text) + "'");
  }
  return t.text;
}

std::optional<JointKind> parse_joint_kind(std::string_view s) {
  if (s == "free") return JointKind::Free;
  if (s == "revolute") return JointKind::Revolute;
  if (s == "prismatic") return JointKind::Prismatic;
  if (s == "fixed") return JointKind::Fixed;
  return std::nullopt;
}

std::optional<Shape> parse_shape(std::string_view s) {
  if (s == "sphere") return Shape::Sphere;
  if (s == "capsule") return Shape::Capsule;
  if (s == "cylinder") return Shape::Cylinder;
  if (s == "box") return Shape::Box;
  return std::nullopt;
}

struct ParsedLink {
  LinkDef link;
  int line = 0;
  int column = 1;
  int parent_column = 1;
};

struct ParsedGeom {
  std::string owner;
  GeomDef geom;
  int line = 0;
  int column = 1;
};

void check_unique_key(std::set<std::string_view>& seen, const KeyValue& kv, int line) {
  if (!seen.insert(kv.key).second) {
    syntax_error(line, kv.column, "duplicate attribute '" + std::string(kv.key) + "'");
  }
}

Material parse_material_line(const std::vector<Token>& tokens, int line) {
  Material m;
  m.name = std::string(require_name(tokens, 1, line, "material name"));
  std::set<std::string_view> seen;
  for (std::size_t i = 2; i < tokens.size(); ++i) {
    const KeyValue kv = split_key_value(tokens[i]);
    check_unique_key(seen, kv, line);
    if (kv.key == "stiffness") {
      m.stiffness = parse_scalar(kv, line);
    } else if (kv.key == "damping") {
      m.damping = parse_scalar(kv, line);
    } else if (kv.key == "friction") {
      m.friction = parse_scalar(kv, line);
    } else {
      syntax_error(line, kv.column, "unknown material attribute '" + std::string(kv.key) + "'");
    }
  }
  return m;
}

ParsedLink parse_link_line(const std::vector<Token>& tokens, int line) {
  ParsedLink out;
  out.line = line;
  out.column = tokens[0].column;
  LinkDef& link = out.link;
  link.name = std::string(require_name(tokens, 1, line, "link name"));
  std::set<std::string_view> seen;
  bool have_parent = false;
  bool have_joint = false;
  bool have_mass = false;
  bool have_inertia = false;
  for (std::size_t i = 2; i < tokens.size(); ++i) {
    const KeyValue kv = split_key_value(tokens[i]);
    check_unique_key(seen, kv, line);
    JointDef& j = link.joint;
    if (kv.key == "parent") {
      if (!kv.has_value || kv.value.empty()) syntax_error(line, kv.column, "'parent' needs a value");
      link.parent = kv.value == "world" ? std::string() : std::string(kv.value);
      out.parent_column = kv.value_column;
      have_parent = true;
    } else if (kv.key == "joint") {
      const auto kind = parse_joint_kind(kv.value);
      if (!kind) {
        syntax_error(line, kv.value_column, "unknown joint type '" + std::string(kv.value) + "'");
      }
      j.kind = *kind;
      have_joint = true;
    } else if (kv.key == "axis") {
      j.axis = parse_vec3(kv, line);
    } else if (kv.key == "pos") {
      link.joint_pose.translation = parse_vec3(kv, line);
    } else if (kv.key == "quat") {
      link.joint_pose.rotation = parse_quat(kv, line);
    } else if (kv.key == "mass") {
      link.inertia.mass = parse_scalar(kv, line);
      have_mass = true;
    } else if (kv.key == "com") {
      link.inertia.com = parse_vec3(kv, line);
    } else if (kv.key == "inertia") {
      const auto v = parse_numbers(kv, line, 6);
      link.inertia.rot_inertia << v[0], v[3], v[4],
                                  v[3], v[1], v[5],
                                  v[4], v[5], v[2];
      have_inertia = true;
    } else if (kv.key == "limits") {
      const auto v = parse_numbers(kv, line, 2);
      j.limits = JointLimits{v[0], v[1]};
    } else if (kv.key == "damping") {
      j.damping = parse_scalar(kv, line);
    } else if (kv.key == "actuated") {
      if (kv.has_value) syntax_error(line, kv.column, "'actuated' takes no value");
      j.actuated = true;
    } else if (kv.key == "couple") {
      const auto colon = kv.value.rfind(':');
      if (!kv.has_value || colon == std::string_view::npos || colon == 0) {
        syntax_error(line, kv.value_column, "'couple' expects <group>:<ratio>");
      }
      const auto ratio = parse_double(kv.value.substr(colon + 1));
      if (!ratio) {
        syntax_error(line, kv.value_column + static_cast<int>(colon) + 1,
                     "coupling ratio must be a number");
      }
      j.coupling = Coupling{std::string(kv.value.substr(0, colon)), *ratio};
    } else if (kv.key == "kp") {
      j.stiffness = parse_scalar(kv, line);
    } else if (kv.key == "kv") {
      j.actuator_damping = parse_scalar(kv, line);
    } else if (kv.key == "taumax") {
      j.torque_limit = parse_scalar(kv, line);
    } else if (kv.key == "grip") {
      const auto v = parse_numbers(kv, line, 2);
      j.grip = GripTargets{v[0], v[1]};
    } else {
      syntax_error(line, kv.column, "unknown link attribute '" + std::string(kv.key) + "'");
    }
  }
  const int end_column = tokens.back().column + static_cast<int>(tokens.back().text.size());
  if (!have_parent) syntax_error(line, end_column, "link '" + link.name + "' is missing parent=");
  if (!have_joint) syntax_error(line, end_column, "link '" + link.name + "' is missing joint=");
  if (!have_mass) syntax_error(line, end_column, "link '" + link.name + "' is missing mass=");
  if (!have_inertia) {
    syntax_error(line, end_column, "link '" + link.name + "' is missing inertia=");
  }
  return out;
}

ParsedGeom parse_geom_line(const std::vector<Token>& tokens, int line) {
  ParsedGeom out;
  out.line = line;
  out.column = tokens[0].column;
  out.owner = std::string(require_name(tokens, 1, line, "link name or 'world'"));
  std::set<std::string_view> seen;
  bool have_shape = false;
  bool have_size = false;
  bool have_material = false;
  KeyValue size_kv;
  for (std::size_t i = 2; i < tokens.size(); ++i) {
    const KeyValue kv = split_key_value(tokens[i]);
    check_unique_key(seen, kv, line);
    if (kv.key == "shape") {
      const auto shape = parse_shape(kv.value);
      if (!shape) syntax_error(line, kv.value_column, "unknown shape '" + std::string(kv.value) + "'");
      out.geom.shape = *shape;
      have_shape = true;
    } else if (kv.key == "size") {
      out.geom.size = parse_numbers(kv, line, 0);
      size_kv = kv;
      have_size = true;
    } else if (kv.key == "pos") {
      out.geom.local_pose.translation = parse_vec3(kv, line);
    } else if (kv.key == "quat") {
      out.geom.local_pose.rotation = parse_quat(kv, line);
    } else if (kv.key == "material") {
      if (!kv.has_value || kv.value.empty()) syntax_error(line, kv.column, "'material' needs a value");
      out.geom.material = std::string(kv.value);
      have_material = true;
    } else {
      syntax_error(line, kv.column, "unknown geom attribute '" + std::string(kv.key) + "'");
    }
  }
  const int end_column = tokens.back().column + static_cast<int>(tokens.back().text.size());
  if (!have_shape) syntax_error(line, end_column, "geom is missing shape=");
  if (!have_size) syntax_error(line, end_column, "geom is missing size=");
  if (!have_material) syntax_error(line, end_column, "geom is missing material=");
  if (static_cast<int>(out.geom.size.size()) != size_count(out.geom.shape)) {
    syntax_error(line, size_kv.value_column,
                 std::string(to_string(out.geom.shape)) + " expects " +
                     std::to_string(size_count(out.geom.shape)) + " size values");
  }
  return out;
}

void append_numbers(std::ostringstream& os, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) os << ',';
    os << format_double(v);
    first = false;
  }
}

void append_vec(std::ostringstream& os, const Vec3& v) {
  append_numbers(os, {v.x(), v.y(), v.z()});
}

void append_quat(std::ostringstream& os, const UnitQuaternion& q) {
  append_numbers(os, {q.w(), q.x(), q.y(), q.z()});
}

void append_geom(std::ostringstream& os, const std::string& owner, const GeomDef& g) {
  os << "geom " << owner << " shape=" << to_string(g.shape) << " size=";
  for (std::size_t i = 0; i < g.size.size(); ++i) {
    if (i) os << ',';
    os << format_double(g.size[i]);
  }
  os << " pos=";
  append_vec(os, g.local_pose.translation);
  os << " quat=";
  append_quat(os, g.local_pose.rotation);
  os << " material=" << g.material << '\n';
}

bool equal(const UnitQuaternion& a, const UnitQuaternion& b) { return a == b; }

bool equal(const Pose& a, const Pose& b) {
  return equal(a.rotation, b.rotation) && a.translation == b.translation;
}

bool equal(const GeomDef& a, const GeomDef& b) {
  return a.shape == b.shape && a.size == b.size && equal(a.local_pose, b.local_pose) &&
         a.material == b.material;
}

bool equal(const std::vector<GeomDef>& a, const std::vector<GeomDef>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!equal(a[i], b[i])) return false;
  }
  return true;
}

}  // namespace

ModelDef parse_model(std::string_view text) {
  ModelDef model;
  std::vector<ParsedLink> links;
  std::vector<ParsedGeom> geoms;
  std::map<std::string, int> material_lines;

  const auto lines = split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const int line = static_cast<int>(n) + 1;
    const auto tokens = tokenize_line(lines[n]);
    if (tokens.empty()) continue;
    const std::string_view directive = tokens[0].text;
    if (directive == "material") {
      Material m = parse_material_line(tokens, line);
      if (material_lines.count(m.name)) {
        semantic_error(line, tokens[1].column, "duplicate material name '" + m.name + "'");
      }
      material_lines[m.name] = line;
      model.materials.push_back(std::move(m));
    } else if (directive == "link") {
      links.push_back(parse_link_line(tokens, line));
    } else if (directive == "geom") {
      geoms.push_back(parse_geom_line(tokens, line));
    } else {
      syntax_error(line, tokens[0].column, "unknown directive '" + std::string(directive) + "'");
    }
  }

  if (links.empty()) semantic_error(1, 1, "model declares no links");

  // Name checks, then the parent graph: cycles first, then ordering.
  std::map<std::string, std::size_t> index_of;
  for (std::size_t i = 0; i < links.size(); ++i) {
    const auto& pl = links[i];
    if (pl.link.name == "world") {
      semantic_error(pl.line, pl.column, "'world' is reserved");
    }
    if (!index_of.emplace(pl.link.name, i).second) {
      semantic_error(pl.line, pl.column, "duplicate link name '" + pl.link.name + "'");
    }
  }
  for (std::size_t i = 0; i < links.size(); ++i) {
    const auto& pl = links[i];
    if (pl.link.parent.empty()) continue;
    if (!index_of.count(pl.link.parent)) {
      semantic_error(pl.line, pl.parent_column, "unknown parent '" + pl.link.parent + "'");
    }
    std::set<std::size_t> visited{i};
    std::size_t k = index_of.at(pl.link.parent);
    while (true) {
      if (!visited.insert(k).second) {
        semantic_error(pl.line, pl.parent_column,
                       "cycle in parent links through '" + pl.link.name + "'");
      }
      const std::string& p = links[k].link.parent;
      if (p.empty()) break;
      k = index_of.at(p);
    }
  }
  for (std::size_t i = 0; i < links.size(); ++i) {
    const auto& pl = links[i];
    if (pl.link.joint.kind == JointKind::Free && (i != 0 || !pl.link.parent.empty())) {
      semantic_error(pl.line, pl.column,
                     "free joint on '" + pl.link.name + "' must be the root link");
    }
    if (!(pl.link.inertia.mass > 0.0)) {
      semantic_error(pl.line, pl.column, "link '" + pl.link.name + "' needs positive mass");
    }
    if (!pl.link.parent.empty() && index_of.at(pl.link.parent) > i) {
      semantic_error(pl.line, pl.parent_column,
                     "parent '" + pl.link.parent + "' must be declared before '" +
                         pl.link.name + "'");
    }
  }

  for (auto& pl : links) model.links.push_back(pl.link);

  std::map<std::string, int> geom_lines;
  for (auto& pg : geoms) {
    if (pg.owner == "world") {
      geom_lines["geom:world:" + std::to_string(model.static_geoms.size())] = pg.line;
      model.static_geoms.push_back(pg.geom);
      continue;
    }
    const auto it = index_of.find(pg.owner);
    if (it == index_of.end()) {
      semantic_error(pg.line, pg.column + 5, "geom attached to unknown link '" + pg.owner + "'");
    }
    auto& owner = model.links[it->second];
    geom_lines["geom:" + pg.owner + ":" + std::to_string(owner.geoms.size())] = pg.line;
    owner.geoms.push_back(pg.geom);
  }

  try {
    finalize_model(model);
  } catch (const ModelError& e) {
    int line = 1;
    const std::string& subject = e.subject();
    if (const auto it = index_of.find(subject); it != index_of.end()) {
      line = links[it->second].line;
    } else if (subject.rfind("material:", 0) == 0) {
      if (const auto m = material_lines.find(subject.substr(9)); m != material_lines.end()) {
        line = m->second;
      }
    } else if (const auto g = geom_lines.find(subject); g != geom_lines.end()) {
      line = g->second;
    }
    semantic_error(line, 1, e.what());
  }
  return model;
}

std::string serialize_model(const ModelDef& model) {
  std::ostringstream os;
  for (const auto& m : model.materials) {
    os << "material " << m.name << " stiffness=" << format_double(m.stiffness)
       << " damping=" << format_double(m.damping) << " friction=" << format_double(m.friction)
       << '\n';
  }
  for (const auto& link : model.links) {
    const JointDef& j = link.joint;
    os << "link " << link.name << " parent=" << (link.parent.empty() ? "world" : link.parent)
       << " joint=" << to_string(j.kind) << " axis=";
    append_vec(os, j.axis);
    os << " pos=";
    append_vec(os, link.joint_pose.translation);
    os << " quat=";
    append_quat(os, link.joint_pose.rotation);
    os << " mass=" << format_double(link.inertia.mass) << " com=";
    append_vec(os, link.inertia.com);
    const Mat3& i = link.inertia.rot_inertia;
    os << " inertia=";
    append_numbers(os, {i(0, 0), i(1, 1), i(2, 2), i(0, 1), i(0, 2), i(1, 2)});
    if (j.limits) {
      os << " limits=";
      append_numbers(os, {j.limits->lo, j.limits->hi});
    }
    if (j.damping != 0.0) os << " damping=" << format_double(j.damping);
    if (j.actuated) os << " actuated";
    if (j.coupling) os << " couple=" << j.coupling->group << ':' << format_double(j.coupling->ratio);
    if (j.actuated) {
      os << " kp=" << format_double(j.stiffness) << " kv=" << format_double(j.actuator_damping)
         << " taumax=" << format_double(j.torque_limit);
    }
    if (j.grip) {
      os << " grip=";
      append_numbers(os, {j.grip->open, j.grip->close});
    }
    os << '\n';
    for (const auto& g : link.geoms) append_geom(os, link.name, g);
  }
  for (const auto& g : model.static_geoms) append_geom(os, "world", g);
  return os.str();
}

bool structurally_equal(const ModelDef& a, const ModelDef& b) {
  if (a.materials.size() != b.materials.size() || a.links.size() != b.links.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.materials.size(); ++i) {
    const auto& x = a.materials[i];
    const auto& y = b.materials[i];
    if (x.name != y.name || x.stiffness != y.stiffness || x.damping != y.damping ||
        x.friction != y.friction) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.links.size(); ++i) {
    const auto& x = a.links[i];
    const auto& y = b.links[i];
    const auto& jx = x.joint;
    const auto& jy = y.joint;
    if (x.name != y.name || x.parent != y.parent || jx.kind != jy.kind || jx.axis != jy.axis ||
        jx.limits != jy.limits || jx.damping != jy.damping || jx.actuated != jy.actuated ||
        jx.coupling != jy.coupling || jx.grip != jy.grip) {
      return false;
    }
    if (jx.actuated && (jx.stiffness != jy.stiffness ||
                        jx.actuator_damping != jy.actuator_damping ||
                        jx.torque_limit != jy.torque_limit)) {
      return false;
    }
    if (x.inertia.mass != y.inertia.mass || x.inertia.com != y.inertia.com ||
        x.inertia.rot_inertia != y.inertia.rot_inertia || !equal(x.joint_pose, y.joint_pose) ||
        !equal(x.geoms, y.geoms)) {
      return false;
    }
  }
  return equal(a.static_geoms, b.static_geoms);
}

}  // namespace floatgrip
