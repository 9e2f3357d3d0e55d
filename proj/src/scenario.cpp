#include "floatgrip/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "floatgrip/errors.hpp"
#include "floatgrip/text.hpp"

namespace floatgrip {

double ScenarioDef::total_duration() const {
  double total = 0.0;
  for (const auto& p : phases) total += p.duration;
  return total;
}

const std::vector<std::string>& log_channels() {
  static const std::vector<std::string> channels{"base_position", "base_quat", "joints",
                                                 "contacts", "momentum"};
  return channels;
}

namespace {

enum class TokenKind { Word, String, Open, Close, End };

struct Tok {
  TokenKind kind = TokenKind::End;
  std::string text;
  int line = 1;
  int column = 1;
};

[[noreturn]] void syntax_error(const Tok& t, const std::string& message) {
  throw ParseError(ParseError::Kind::Syntax, t.line, t.column, message);
}

[[noreturn]] void semantic_error(const Tok& t, const std::string& message) {
  throw ParseError(ParseError::Kind::Semantic, t.line, t.column, message);
}

std::string describe(const Tok& t) {
  switch (t.kind) {
    case TokenKind::End: return "end of input";
    case TokenKind::Open: return "'{'";
    case TokenKind::Close: return "'}'";
    case TokenKind::String: return "string";
    case TokenKind::Word: break;
  }
  return "'" + t.text + "'";
}

std::vector<Tok> lex(std::string_view text) {
  std::vector<Tok> out;
  int line = 1;
  int column = 1;
  std::size_t i = 0;
  const auto advance = [&] {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
    ++i;
  };
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (i < text.size()) {
    const char c = text[i];
    if (is_space(c)) {
      advance();
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance();
      continue;
    }
    Tok t;
    t.line = line;
    t.column = column;
    if (c == '{' || c == '}') {
      t.kind = c == '{' ? TokenKind::Open : TokenKind::Close;
      t.text = std::string(1, c);
      advance();
    } else if (c == '"') {
      t.kind = TokenKind::String;
      advance();
      bool closed = false;
      while (i < text.size()) {
        const char d = text[i];
        if (d == '"') {
          advance();
          closed = true;
          break;
        }
        if (d == '\n') break;
        if (d == '\\') {
          advance();
          if (i >= text.size()) break;
          const char e = text[i];
          if (e == 'n') {
            t.text += '\n';
          } else if (e == 't') {
            t.text += '\t';
          } else if (e == '"' || e == '\\') {
            t.text += e;
          } else {
            throw ParseError(ParseError::Kind::Syntax, line, column,
                             std::string("unknown escape '\\") + e + "'");
          }
          advance();
          continue;
        }
        t.text += d;
        advance();
      }
      if (!closed) syntax_error(t, "unterminated string");
    } else {
      t.kind = TokenKind::Word;
      while (i < text.size() && !is_space(text[i]) && text[i] != '{' && text[i] != '}' &&
             text[i] != '"' && text[i] != '#') {
        t.text += text[i];
        advance();
      }
    }
    out.push_back(std::move(t));
  }
  Tok end;
  end.line = line;
  end.column = column;
  out.push_back(end);
  return out;
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  const auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  const auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(s[0])) return false;
  return std::all_of(s.begin(), s.end(), [&](char c) { return alpha(c) || digit(c) || c == '-' || c == '.'; });
}

class Parser {
 public:
  explicit Parser(std::vector<Tok> tokens) : tokens_(std::move(tokens)) {}

  ScenarioDef parse() {
    ScenarioDef s;
    expect_keyword("scenario");
    s.name = expect(TokenKind::String, "scenario name string").text;
    expect(TokenKind::Open, "'{'");

    std::set<std::string> headers;
    std::set<std::string> phase_names;
    bool seen_log = false;
    while (peek().kind != TokenKind::Close) {
      const Tok& t = peek();
      if (t.kind != TokenKind::Word) syntax_error(t, "expected a directive, got " + describe(t));
      if (t.text == "phase") {
        if (seen_log) syntax_error(t, "phase after log");
        next();
        const Tok& name_tok = peek();
        PhaseDef phase = parse_phase();
        if (!phase_names.insert(phase.name).second) {
          semantic_error(name_tok, "duplicate phase name '" + phase.name + "'");
        }
        s.phases.push_back(std::move(phase));
      } else if (t.text == "log") {
        if (seen_log) semantic_error(t, "duplicate log directive");
        seen_log = true;
        next();
        s.log = parse_log();
      } else if (t.text == "model" || t.text == "timestep" || t.text == "gravity" ||
                 t.text == "seed") {
        if (!s.phases.empty()) syntax_error(t, "header '" + t.text + "' after a phase");
        if (!headers.insert(t.text).second) {
          semantic_error(t, "duplicate header '" + t.text + "'");
        }
        const Tok head = next();
        if (head.text == "model") {
          s.model = expect(TokenKind::String, "model string").text;
        } else if (head.text == "timestep") {
          const Tok& vt = peek();
          s.timestep = number();
          if (!(s.timestep > 0.0)) semantic_error(vt, "timestep must be positive");
        } else if (head.text == "gravity") {
          for (double& g : s.gravity) g = number();
        } else {
          s.seed = integer();
        }
      } else {
        syntax_error(t, "unknown directive '" + t.text + "'");
      }
    }
    const Tok& close = next();
    if (s.phases.empty()) semantic_error(close, "scenario needs at least one phase");
    if (peek().kind != TokenKind::End) syntax_error(peek(), "unexpected " + describe(peek()) + " after scenario");
    return s;
  }

 private:
  const Tok& peek() const { return tokens_[pos_]; }

  const Tok& next() {
    const Tok& t = tokens_[pos_];
    if (t.kind != TokenKind::End) ++pos_;
    return t;
  }

  const Tok& expect(TokenKind kind, const std::string& what) {
    const Tok& t = peek();
    if (t.kind != kind) syntax_error(t, "expected " + what + ", got " + describe(t));
    return next();
  }

  void expect_keyword(const std::string& word) {
    const Tok& t = peek();
    if (t.kind != TokenKind::Word || t.text != word) {
      syntax_error(t, "expected '" + word + "', got " + describe(t));
    }
    next();
  }

  double number() {
    const Tok& t = peek();
    if (t.kind != TokenKind::Word) syntax_error(t, "expected a number, got " + describe(t));
    const auto v = parse_double(t.text);
    if (!v) syntax_error(t, "expected a number, got '" + t.text + "'");
    next();
    return *v;
  }

  std::int64_t integer() {
    const Tok& t = peek();
    if (t.kind != TokenKind::Word) syntax_error(t, "expected an integer, got " + describe(t));
    const auto v = parse_integer(t.text);
    if (!v) syntax_error(t, "expected an integer, got '" + t.text + "'");
    next();
    return *v;
  }

  std::string identifier(const std::string& what) {
    const Tok& t = peek();
    if (t.kind != TokenKind::Word || !is_identifier(t.text)) {
      syntax_error(t, "expected " + what + ", got " + describe(t));
    }
    return next().text;
  }

  PhaseDef parse_phase() {
    PhaseDef p;
    p.name = identifier("phase name");
    expect(TokenKind::Open, "'{'");
    expect_keyword("duration");
    const Tok& dt = peek();
    p.duration = number();
    if (!(p.duration > 0.0)) semantic_error(dt, "phase duration must be positive");
    while (peek().kind != TokenKind::Close) {
      const Tok& t = peek();
      if (t.kind != TokenKind::Word) syntax_error(t, "expected a command, got " + describe(t));
      if (t.text == "thrust") {
        next();
        ThrustDef th;
        for (double& w : th.wrench) w = number();
        const Tok& mode = peek();
        if (mode.kind == TokenKind::Word && mode.text == "hold") {
          th.mode = ThrustMode::Hold;
        } else if (mode.kind == TokenKind::Word && mode.text == "ramp") {
          th.mode = ThrustMode::Ramp;
        } else {
          syntax_error(mode, "expected 'hold' or 'ramp', got " + describe(mode));
        }
        next();
        p.commands.emplace_back(th);
      } else if (t.text == "joint") {
        next();
        JointCommandDef j;
        j.joint = identifier("joint name");
        j.profile = parse_profile();
        p.commands.emplace_back(std::move(j));
      } else if (t.text == "gripper") {
        next();
        GripperDef g;
        const Tok& action = peek();
        if (action.kind == TokenKind::Word && action.text == "open") {
          g.action = GripAction::Open;
        } else if (action.kind == TokenKind::Word && action.text == "close") {
          g.action = GripAction::Close;
        } else {
          syntax_error(action, "expected 'open' or 'close', got " + describe(action));
        }
        next();
        const Tok& st = peek();
        g.seconds = number();
        if (g.seconds < 0.0) semantic_error(st, "gripper time must be nonnegative");
        p.commands.emplace_back(g);
      } else if (t.text == "duration") {
        semantic_error(t, "duplicate duration");
      } else {
        syntax_error(t, "unknown command '" + t.text + "'");
      }
    }
    next();
    return p;
  }

  Profile parse_profile() {
    const Tok& t = peek();
    Profile pr;
    if (t.kind == TokenKind::Word && t.text == "step") {
      next();
      pr.kind = ProfileKind::Step;
      pr.a = number();
    } else if (t.kind == TokenKind::Word && t.text == "ramp") {
      next();
      pr.kind = ProfileKind::Ramp;
      pr.a = number();
      pr.b = number();
    } else if (t.kind == TokenKind::Word && t.text == "trapezoid") {
      next();
      pr.kind = ProfileKind::Trapezoid;
      pr.a = number();
      const Tok& ft = peek();
      pr.b = number();
      if (!(pr.b > 0.0 && pr.b <= 0.5)) semantic_error(ft, "rise fraction must be in (0, 0.5]");
    } else {
      syntax_error(t, "expected 'step', 'ramp' or 'trapezoid', got " + describe(t));
    }
    return pr;
  }

  std::vector<std::string> parse_log() {
    std::vector<std::string> channels;
    const auto& known = log_channels();
    while (peek().kind == TokenKind::Word && peek().text != "phase" && peek().text != "log") {
      const Tok& t = next();
      if (std::find(known.begin(), known.end(), t.text) == known.end()) {
        semantic_error(t, "unknown log channel '" + t.text + "'");
      }
      if (std::find(channels.begin(), channels.end(), t.text) != channels.end()) {
        semantic_error(t, "duplicate log channel '" + t.text + "'");
      }
      channels.push_back(t.text);
    }
    if (channels.empty()) syntax_error(peek(), "log needs at least one channel");
    return channels;
  }

  std::vector<Tok> tokens_;
  std::size_t pos_ = 0;
};

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (c == '\n') {
      out += "\\n";
    } else if (c == '\t') {
      out += "\\t";
    } else {
      out += c;
    }
  }
  return out + "\"";
}

std::string format_profile(const Profile& p) {
  switch (p.kind) {
    case ProfileKind::Step: return "step " + format_double(p.a);
    case ProfileKind::Ramp: return "ramp " + format_double(p.a) + " " + format_double(p.b);
    case ProfileKind::Trapezoid: break;
  }
  return "trapezoid " + format_double(p.a) + " " + format_double(p.b);
}

}  // namespace

ScenarioDef parse_scenario(std::string_view text) {
  return Parser(lex(text)).parse();
}

std::string serialize_scenario(const ScenarioDef& s) {
  std::ostringstream out;
  out << "scenario " << quote(s.name) << " {\n";
  if (!s.model.empty()) out << "  model " << quote(s.model) << "\n";
  out << "  timestep " << format_double(s.timestep) << "\n";
  out << "  gravity " << format_double(s.gravity[0]) << " " << format_double(s.gravity[1]) << " "
      << format_double(s.gravity[2]) << "\n";
  out << "  seed " << s.seed << "\n";
  for (const PhaseDef& p : s.phases) {
    out << "  phase " << p.name << " {\n";
    out << "    duration " << format_double(p.duration) << "\n";
    for (const CommandDef& c : p.commands) {
      out << "    ";
      if (const auto* th = std::get_if<ThrustDef>(&c)) {
        out << "thrust";
        for (double w : th->wrench) out << " " << format_double(w);
        out << (th->mode == ThrustMode::Hold ? " hold" : " ramp");
      } else if (const auto* j = std::get_if<JointCommandDef>(&c)) {
        out << "joint " << j->joint << " " << format_profile(j->profile);
      } else {
        const auto& g = std::get<GripperDef>(c);
        out << "gripper " << (g.action == GripAction::Open ? "open " : "close ")
            << format_double(g.seconds);
      }
      out << "\n";
    }
    out << "  }\n";
  }
  if (!s.log.empty()) {
    out << "  log";
    for (const auto& c : s.log) out << " " << c;
    out << "\n";
  }
  out << "}\n";
  return out.str();
}

namespace {

// Shared timing and commands of the perch-and-maneuver sequence.
constexpr double kApproachSeconds = 5.0;
constexpr double kPerchSeconds = 2.0;
constexpr double kManeuverSeconds = 6.0;
constexpr double kManeuverAmplitude = 0.5;
constexpr double kRiseFraction = 0.25;
constexpr double kApproachThrust = 0.1;
constexpr double kGripperCloseSeconds = 1.0;

ScenarioDef perch_and_maneuver(const std::string& name, std::string_view model,
                               const std::string& joint) {
  ScenarioDef s;
  s.name = name;
  s.model = std::string(model);
  PhaseDef approach{"approach", kApproachSeconds, {}};
  approach.commands.emplace_back(ThrustDef{{-kApproachThrust, 0, 0, 0, 0, 0}, ThrustMode::Ramp});
  approach.commands.emplace_back(GripperDef{GripAction::Open, 0.0});
  PhaseDef perch{"perch", kPerchSeconds, {}};
  perch.commands.emplace_back(GripperDef{GripAction::Close, kGripperCloseSeconds});
  PhaseDef maneuver{joint, kManeuverSeconds, {}};
  maneuver.commands.emplace_back(
      JointCommandDef{joint, Profile{ProfileKind::Trapezoid, kManeuverAmplitude, kRiseFraction}});
  s.phases = {approach, perch, maneuver};
  s.log = {"base_position", "base_quat", "joints", "contacts"};
  return s;
}

}  // namespace

std::vector<ScenarioDef> builtin_scenarios() {
  return {
      perch_and_maneuver("claw-tilt", kClawModelId, "tilt"),
      perch_and_maneuver("claw-pan", kClawModelId, "pan"),
      perch_and_maneuver("dexcohand-tilt", kDexCoHandModelId, "tilt"),
      perch_and_maneuver("dexcohand-pan", kDexCoHandModelId, "pan"),
  };
}

ScenarioDef builtin_scenario(std::string_view name) {
  for (auto& s : builtin_scenarios()) {
    if (s.name == name) return s;
  }
  throw std::out_of_range("unknown builtin scenario '" + std::string(name) + "'");
}

}  // namespace floatgrip
