#include "eal/config.hpp"

#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace eal::config {

using engine::ConfigError;

// ------------------------------------------------------------ TOML subset

namespace {

struct TomlParser {
  std::string_view text;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < pos && i < text.size(); ++i)
      if (text[i] == '\n') ++line;
    throw ConfigError("config parse error (line " + std::to_string(line) + "): " + msg);
  }

  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }

  void skip_inline_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) ++pos;
  }

  void skip_ws_and_comments(bool cross_lines) {
    for (;;) {
      skip_inline_ws();
      if (!eof() && peek() == '#') {
        while (!eof() && peek() != '\n') ++pos;
        continue;
      }
      if (cross_lines && !eof() && peek() == '\n') {
        ++pos;
        continue;
      }
      return;
    }
  }

  std::string parse_key() {
    skip_inline_ws();
    std::size_t start = pos;
    if (!eof() && peek() == '"') return parse_string();
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) ||
                      peek() == '_' || peek() == '-'))
      ++pos;
    if (pos == start) fail("expected a key");
    return std::string(text.substr(start, pos - start));
  }

  std::vector<std::string> parse_dotted_key() {
    std::vector<std::string> parts{parse_key()};
    skip_inline_ws();
    while (!eof() && peek() == '.') {
      ++pos;
      parts.push_back(parse_key());
      skip_inline_ws();
    }
    return parts;
  }

  std::string parse_string() {
    if (eof() || peek() != '"') fail("expected '\"'");
    ++pos;
    std::string out;
    while (!eof() && peek() != '"') {
      char c = text[pos++];
      if (c == '\\') {
        if (eof()) fail("dangling escape");
        char e = text[pos++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail("unsupported escape");
        }
      } else {
        out += c;
      }
    }
    if (eof()) fail("unterminated string");
    ++pos;
    return out;
  }

  json parse_value() {
    skip_ws_and_comments(true);
    if (eof()) fail("expected a value");
    char c = peek();
    if (c == '"') return json(parse_string());
    if (c == '[') {
      ++pos;
      json arr = json::array();
      skip_ws_and_comments(true);
      if (!eof() && peek() == ']') {
        ++pos;
        return arr;
      }
      for (;;) {
        arr.push_back(parse_value());
        skip_ws_and_comments(true);
        if (!eof() && peek() == ',') {
          ++pos;
          skip_ws_and_comments(true);
          if (!eof() && peek() == ']') {
            ++pos;
            return arr;
          }
          continue;
        }
        if (!eof() && peek() == ']') {
          ++pos;
          return arr;
        }
        fail("expected ',' or ']' in array");
      }
    }
    if (c == '{') {
      ++pos;
      json obj = json::object();
      skip_ws_and_comments(true);
      if (!eof() && peek() == '}') {
        ++pos;
        return obj;
      }
      for (;;) {
        std::string key = parse_key();
        skip_ws_and_comments(true);
        if (eof() || peek() != '=') fail("expected '=' in inline table");
        ++pos;
        obj[key] = parse_value();
        skip_ws_and_comments(true);
        if (!eof() && peek() == ',') {
          ++pos;
          skip_ws_and_comments(true);
          continue;
        }
        if (!eof() && peek() == '}') {
          ++pos;
          return obj;
        }
        fail("expected ',' or '}' in inline table");
      }
    }
    if (std::strncmp(text.data() + pos, "true", 4) == 0 &&
        pos + 4 <= text.size()) {
      pos += 4;
      return json(true);
    }
    if (std::strncmp(text.data() + pos, "false", 5) == 0 &&
        pos + 5 <= text.size()) {
      pos += 5;
      return json(false);
    }
    // number
    std::size_t start = pos;
    while (!eof() && (std::isdigit(static_cast<unsigned char>(peek())) ||
                      peek() == '+' || peek() == '-' || peek() == '.' ||
                      peek() == 'e' || peek() == 'E' || peek() == '_'))
      ++pos;
    if (pos == start) fail("expected a value");
    std::string tok(text.substr(start, pos - start));
    std::erase(tok, '_');
    bool is_float = tok.find_first_of(".eE") != std::string::npos;
    try {
      if (is_float) return json(std::stod(tok));
      return json(static_cast<std::int64_t>(std::stoll(tok)));
    } catch (const std::exception&) {
      fail("malformed number '" + tok + "'");
    }
  }

  // navigate through the last element of arrays-of-tables
  json* navigate(json* node, const std::vector<std::string>& parts, std::size_t upto) {
    for (std::size_t i = 0; i < upto; ++i) {
      json& cur = *node;
      json& slot = cur[parts[i]];
      if (slot.is_null()) slot = json::object();
      if (slot.is_array()) {
        if (slot.empty()) fail("empty table array '" + parts[i] + "'");
        node = &slot.back();
      } else if (slot.is_object()) {
        node = &slot;
      } else {
        fail("key '" + parts[i] + "' is not a table");
      }
    }
    return node;
  }

  json parse_document() {
    json root = json::object();
    json* current = &root;
    for (;;) {
      skip_ws_and_comments(true);
      if (eof()) break;
      if (peek() == '[') {
        ++pos;
        bool array_header = !eof() && peek() == '[';
        if (array_header) ++pos;
        auto parts = parse_dotted_key();
        skip_inline_ws();
        if (eof() || peek() != ']') fail("expected ']'");
        ++pos;
        if (array_header) {
          if (eof() || peek() != ']') fail("expected ']]'");
          ++pos;
        }
        json* parent = navigate(&root, parts, parts.size() - 1);
        json& slot = (*parent)[parts.back()];
        if (array_header) {
          if (slot.is_null()) slot = json::array();
          if (!slot.is_array()) fail("'" + parts.back() + "' is not a table array");
          slot.push_back(json::object());
          current = &slot.back();
        } else {
          if (slot.is_null()) slot = json::object();
          if (!slot.is_object()) fail("'" + parts.back() + "' is not a table");
          current = &slot;
        }
        continue;
      }
      auto parts = parse_dotted_key();
      skip_inline_ws();
      if (eof() || peek() != '=') fail("expected '=' after key");
      ++pos;
      json* parent = navigate(current, parts, parts.size() - 1);
      (*parent)[parts.back()] = parse_value();
      skip_ws_and_comments(false);
      if (!eof() && peek() != '\n') fail("trailing characters after value");
    }
    return root;
  }
};

}  // namespace

json parse_toml(std::string_view text) {
  TomlParser p{text};
  return p.parse_document();
}

json load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    try {
      return json::parse(text);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("JSON parse error: ") + e.what());
    }
  }
  return parse_toml(text);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// ------------------------------------------------------------- resolvers

DD resolve_real(const json& v) {
  if (v.is_number()) return DD(v.get<double>());
  if (v.is_object() && v.contains("p") && v.contains("q")) {
    auto p = v.at("p").get<std::int64_t>();
    auto q = v.at("q").get<std::int64_t>();
    if (q == 0) throw ConfigError("rational with zero denominator");
    return dd_div(DD(static_cast<double>(p)), DD(static_cast<double>(q)));
  }
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    bool neg = !s.empty() && s[0] == '-';
    if (neg) s = s.substr(1);
    DD val;
    if (s == "sqrt2") val = dd_sqrt_int(2);
    else if (s == "sqrt3") val = dd_sqrt_int(3);
    else if (s == "sqrt5") val = dd_sqrt_int(5);
    else if (s == "golden") val = dd_mul(dd_add(dd_sqrt_int(5), 1.0), 0.5);
    else if (s == "e") val = dd_e();
    else if (s == "pi") val = dd_pi();
    else {
      try {
        val = DD(std::stod(s));
      } catch (const std::exception&) {
        throw ConfigError("unknown constant '" + s + "'");
      }
    }
    return neg ? dd_neg(val) : val;
  }
  throw ConfigError("expected a real number, constant name, or {p,q}");
}

systems::Angle resolve_angle(const json& v) {
  if (v.is_object() && v.contains("p") && v.contains("q"))
    return systems::Angle::rational(v.at("p").get<std::int64_t>(),
                                    v.at("q").get<std::int64_t>());
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "sqrt2" || s == "sqrt3" || s == "sqrt5" || s == "golden" || s == "e" ||
        s == "pi")
      return systems::Angle::named(s);
  }
  // plain numbers are declared irrational unless given as {p,q}
  return systems::Angle::irrational(resolve_real(v));
}

systems::SystemSpec build_system(const json& v) {
  if (!v.is_object() || !v.contains("type"))
    throw ConfigError("system spec needs a 'type'");
  std::string type = v.at("type").get<std::string>();
  if (type == "rotation") {
    if (v.contains("p") && v.contains("q"))
      return systems::SystemSpec(systems::CircleRotation{systems::Angle::rational(
          v.at("p").get<std::int64_t>(), v.at("q").get<std::int64_t>())});
    if (!v.contains("angle")) throw ConfigError("rotation needs 'angle' or p,q");
    return systems::SystemSpec(systems::CircleRotation{resolve_angle(v.at("angle"))});
  }
  if (type == "cycle") {
    auto q = v.at("size").get<std::int64_t>();
    if (q <= 0) throw ConfigError("cycle size must be positive");
    return systems::SystemSpec(systems::FiniteCycle{q});
  }
  if (type == "product") {
    systems::ProductSystem prod;
    for (const json& f : v.at("factors")) prod.factors.push_back(build_system(f));
    return systems::SystemSpec(std::move(prod));
  }
  if (type == "suspension") {
    systems::Suspension susp;
    susp.base = std::make_shared<systems::SystemSpec>(build_system(v.at("base")));
    susp.gamma = resolve_real(v.at("gamma"));
    return systems::SystemSpec(std::move(susp));
  }
  throw ConfigError("unknown system type '" + type + "'");
}

systems::Observable build_observable(const json& v) {
  if (!v.is_object() || !v.contains("type"))
    throw ConfigError("observable spec needs a 'type'");
  std::string type = v.at("type").get<std::string>();
  if (type == "trigpoly") {
    int degree = 0;
    const json& modes = v.at("modes");
    for (const json& m : modes)
      degree = std::max(degree, std::abs(static_cast<int>(m.at(0).get<std::int64_t>())));
    systems::TrigPoly p(degree);
    for (const json& m : modes) {
      auto mode = static_cast<int>(m.at(0).get<std::int64_t>());
      double re = m.at(1).get<double>();
      double im = m.size() > 2 ? m.at(2).get<double>() : 0.0;
      p.c(mode) += systems::Complex{re, im};
    }
    return systems::Observable(p);
  }
  if (type == "constant") {
    return systems::Observable(
        systems::TrigPoly::constant({v.at("value").get<double>(), 0.0}));
  }
  if (type == "indicator") {
    systems::IndicatorInterval ind;
    ind.lo = v.at("lo").get<double>();
    ind.len = v.at("len").get<double>();
    if (ind.len < 0.0 || ind.len > 1.0) throw ConfigError("indicator length outside [0,1]");
    return systems::Observable(ind);
  }
  if (type == "tabulated") {
    systems::Tabulated tab;
    for (const json& x : v.at("values")) tab.values.push_back(x.get<double>());
    if (tab.values.empty()) throw ConfigError("tabulated observable needs values");
    return systems::Observable(tab);
  }
  if (type == "tensor") {
    systems::TensorProductObs t;
    for (const json& f : v.at("factors")) t.factors.push_back(build_observable(f));
    return systems::Observable(std::move(t));
  }
  if (type == "lifted") {
    return systems::lift_observable(build_observable(v.at("base")));
  }
  throw ConfigError("unknown observable type '" + type + "'");
}

engine::IterateSequence build_iterate(const json& v) {
  if (!v.is_object() || !v.contains("type"))
    throw ConfigError("iterate spec needs a 'type'");
  std::string type = v.at("type").get<std::string>();
  if (type == "power") {
    double c = v.at("c").get<double>();
    if (!(c > 0.0)) throw ConfigError("power iterate needs c > 0");
    return engine::IterateSequence::power(c);
  }
  if (type == "function") {
    std::optional<double> ds;
    if (v.contains("domain_start")) ds = v.at("domain_start").get<double>();
    try {
      return engine::IterateSequence::sublinear(
          expr::make_function(v.at("dsl").get<std::string>(), ds));
    } catch (const expr::ParseError& e) {
      throw ConfigError(std::string("iterate DSL: ") + e.what());
    }
  }
  if (type == "linear") {
    DD ell = v.contains("ell") ? resolve_real(v.at("ell")) : DD(0.0);
    if (v.contains("p") && v.contains("q"))
      return engine::IterateSequence::linear_rational(v.at("p").get<std::int64_t>(),
                                                      v.at("q").get<std::int64_t>(), ell);
    if (!v.contains("gamma")) throw ConfigError("linear iterate needs gamma or p,q");
    const json& g = v.at("gamma");
    if (g.is_object() && g.contains("p") && g.contains("q"))
      return engine::IterateSequence::linear_rational(g.at("p").get<std::int64_t>(),
                                                      g.at("q").get<std::int64_t>(), ell);
    return engine::IterateSequence::linear_irrational(resolve_real(g), ell);
  }
  throw ConfigError("unknown iterate type '" + type + "'");
}

// ------------------------------------------------------------- experiment

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double SplitMix64::next_unit() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

ExperimentConfig build_experiment(const json& root) {
  ExperimentConfig cfg;
  if (root.contains("seed")) cfg.seed = root.at("seed").get<std::uint64_t>();
  if (root.contains("runs")) cfg.runs = root.at("runs").get<int>();
  if (cfg.runs < 1) throw ConfigError("runs must be >= 1");

  if (root.contains("coupling")) {
    std::string c = root.at("coupling").get<std::string>();
    if (c == "diagonal") cfg.coupling = Coupling::Diagonal;
    else if (c == "product") cfg.coupling = Coupling::Product;
    else throw ConfigError("coupling must be \"diagonal\" or \"product\"");
  }
  if (root.contains("n")) cfg.spec.n_max = root.at("n").get<std::int64_t>();
  if (root.contains("checkpoints")) {
    const json& cps = root.at("checkpoints");
    if (cps.is_string() && cps.get<std::string>() == "doubling") {
      cfg.spec.checkpoints = engine::doubling_checkpoints(1000, cfg.spec.n_max);
    } else if (cps.is_array()) {
      for (const json& c : cps) cfg.spec.checkpoints.push_back(c.get<std::int64_t>());
    } else {
      throw ConfigError("checkpoints must be an array or \"doubling\"");
    }
  } else {
    cfg.spec.checkpoints = {cfg.spec.n_max};
  }

  if (!root.contains("tracks") || !root.at("tracks").is_array() ||
      root.at("tracks").empty())
    throw ConfigError("experiment needs a non-empty [[tracks]] array");
  for (const json& tj : root.at("tracks")) {
    engine::Track t;
    t.system = build_system(tj.at("system"));
    t.observable = build_observable(tj.at("observable"));
    t.iterate = build_iterate(tj.at("iterate"));
    json start = tj.contains("start") ? tj.at("start") : json("seeded");
    if (start.is_string() && start.get<std::string>() == "seeded") cfg.seeded_starts = true;
    cfg.track_start_specs.push_back(start);
    cfg.spec.tracks.push_back(std::move(t));
  }
  return cfg;
}

void assign_starts(ExperimentConfig& cfg, SplitMix64& stream) {
  // a diagonal coupling reuses one draw for every seeded track of the run
  double shared = -1.0;
  for (std::size_t i = 0; i < cfg.spec.tracks.size(); ++i) {
    const json& s = cfg.track_start_specs[i];
    engine::Track& t = cfg.spec.tracks[i];
    if (s.is_string() && s.get<std::string>() == "seeded") {
      double u;
      if (cfg.coupling == Coupling::Diagonal) {
        if (shared < 0.0) shared = stream.next_unit();
        u = shared;
      } else {
        u = stream.next_unit();
      }
      t.start = systems::start_point(t.system, u);
    } else if (s.is_number()) {
      t.start = systems::start_point(t.system, s.get<double>());
    } else if (s.is_object() && s.contains("t") && s.contains("x")) {
      // suspension start ({t}, base x)
      const auto* susp = std::get_if<systems::Suspension>(&t.system.v);
      if (!susp) throw ConfigError("t/x start needs a suspension system");
      t.start = systems::PointState::susp(
          s.at("t").get<double>(),
          systems::start_point(*susp->base, s.at("x").get<double>()));
    } else {
      throw ConfigError("start must be a number, \"seeded\", or {t,x}");
    }
  }
}

}  // namespace eal::config
