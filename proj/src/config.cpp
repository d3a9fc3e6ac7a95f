#include "sfcdd/config.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sfcdd/errors.hpp"

namespace sfcdd {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

int parse_int(const std::string& key, const std::string& v) {
  char* end = nullptr;
  long x = std::strtol(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw InvalidConfig("key '" + key + "': not an integer: " + v);
  return static_cast<int>(x);
}

double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw InvalidConfig("key '" + key + "': not a number: " + v);
  return x;
}

uint64_t parse_u64(const std::string& key, const std::string& v) {
  char* end = nullptr;
  uint64_t x = std::strtoull(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw InvalidConfig("key '" + key + "': not an unsigned integer: " + v);
  return x;
}

LevelRule parse_level_rule(const std::string& v) {
  if (v == "explicit") return LevelRule::Explicit;
  if (v == "weak-scaling") return LevelRule::WeakScaling;
  if (v == "isotropic") return LevelRule::Isotropic;
  if (v == "strong-scaling") return LevelRule::StrongScaling;
  throw InvalidConfig("unknown level_rule: " + v);
}

QRule parse_q_rule(const std::string& v) {
  if (v == "fixed") return QRule::Fixed;
  if (v == "scaled-S") return QRule::ScaledS;
  if (v == "scaled-NP") return QRule::ScaledNP;
  throw InvalidConfig("unknown q_rule: " + v);
}

Variant parse_variant(const std::string& v) {
  if (v == "plain-one-level") return Variant::PlainOneLevel;
  if (v == "plain-two-level") return Variant::PlainTwoLevel;
  if (v == "balanced") return Variant::Balanced;
  if (v == "nicolaides") return Variant::Nicolaides;
  if (v == "deflated") return Variant::Deflated;
  throw InvalidConfig("unknown variant: " + v);
}

Weighting parse_weighting(const std::string& v) {
  if (v == "none") return Weighting::None;
  if (v == "omega") return Weighting::Omega;
  if (v == "d") return Weighting::D;
  throw InvalidConfig("unknown weighting: " + v);
}

SolverKind parse_solver(const std::string& v) {
  if (v == "richardson") return SolverKind::Richardson;
  if (v == "pcg") return SolverKind::Pcg;
  if (v == "pcg-flexible") return SolverKind::PcgFlexible;
  throw InvalidConfig("unknown solver: " + v);
}

XiRule parse_xi_rule(const std::string& v) {
  if (v == "optimal") return XiRule::Optimal;
  if (v == "explicit") return XiRule::Explicit;
  throw InvalidConfig("unknown xi_rule: " + v);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidConfig("line " + std::to_string(lineno) +
                          ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (val.empty())
      throw InvalidConfig("key '" + key + "': empty value");

    if (key == "d") {
      cfg.d = parse_int(key, val);
    } else if (key == "level_rule") {
      cfg.level_rule = parse_level_rule(val);
    } else if (key == "levels") {
      cfg.levels.clear();
      for (const std::string& p : split_list(val))
        cfg.levels.push_back(parse_int(key, p));
    } else if (key == "S") {
      cfg.S = parse_int(key, val);
    } else if (key == "L") {
      cfg.L = parse_int(key, val);
    } else if (key == "P") {
      cfg.P_values.clear();
      for (const std::string& p : split_list(val))
        cfg.P_values.push_back(parse_int(key, p));
      if (cfg.P_values.empty()) throw InvalidConfig("key 'P': empty list");
    } else if (key == "q_rule") {
      cfg.q_rule = parse_q_rule(val);
    } else if (key == "q") {
      cfg.q = parse_int(key, val);
    } else if (key == "gamma") {
      cfg.gamma = parse_double(key, val);
    } else if (key == "variant") {
      cfg.variant = parse_variant(val);
    } else if (key == "weighting") {
      cfg.weighting = parse_weighting(val);
    } else if (key == "solver") {
      cfg.solver = parse_solver(val);
    } else if (key == "xi_rule") {
      cfg.xi_rule = parse_xi_rule(val);
    } else if (key == "xi") {
      cfg.xi = parse_double(key, val);
    } else if (key == "p_fault") {
      cfg.p_fault.clear();
      for (const std::string& p : split_list(val))
        cfg.p_fault.push_back(parse_double(key, p));
      if (cfg.p_fault.empty())
        throw InvalidConfig("key 'p_fault': empty list");
    } else if (key == "runs") {
      cfg.runs = parse_int(key, val);
    } else if (key == "seed") {
      cfg.seed = parse_u64(key, val);
    } else if (key == "tol") {
      cfg.tol = parse_double(key, val);
    } else if (key == "max_iter") {
      cfg.max_iter = parse_int(key, val);
    } else {
      throw InvalidConfig("unknown key: " + key);
    }
  }

  if (cfg.d < 1) throw InvalidConfig("d must be positive");
  if (cfg.runs < 1) throw InvalidConfig("runs must be positive");
  if (cfg.max_iter < 1) throw InvalidConfig("max_iter must be positive");
  if (!(cfg.tol > 0.0)) throw InvalidConfig("tol must be positive");
  if (cfg.gamma < 0.0) throw InvalidConfig("gamma must be nonnegative");
  for (int p : cfg.P_values)
    if (p < 1) throw InvalidConfig("P values must be positive");
  for (double p : cfg.p_fault)
    if (p < 0.0 || p > 1.0)
      throw InvalidConfig("p_fault values must lie in [0,1]");
  if (cfg.level_rule == LevelRule::Explicit) {
    if (cfg.levels.empty())
      throw InvalidConfig("level_rule explicit requires levels");
    if (static_cast<int>(cfg.levels.size()) != cfg.d)
      throw InvalidConfig("levels must list d entries");
  }
  if (cfg.level_rule == LevelRule::WeakScaling && cfg.d != 1)
    throw InvalidConfig("level_rule weak-scaling requires d = 1");
  if ((cfg.level_rule == LevelRule::WeakScaling ||
       cfg.level_rule == LevelRule::Isotropic) &&
      cfg.S < 1)
    throw InvalidConfig("this level_rule requires S >= 1");
  if (cfg.level_rule == LevelRule::StrongScaling && cfg.L < 1)
    throw InvalidConfig("level_rule strong-scaling requires L >= 1");
  if (cfg.q_rule == QRule::Fixed && cfg.q < 1)
    throw InvalidConfig("q must be positive");
  if (cfg.q_rule == QRule::ScaledS && cfg.S < 5)
    throw InvalidConfig("q_rule scaled-S requires S >= 5");
  if (cfg.xi_rule == XiRule::Explicit && !(cfg.xi > 0.0))
    throw InvalidConfig("explicit xi must be positive");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ExperimentConfig& cfg) {
  char buf[64];
  std::string out;
  auto add = [&out](const std::string& k, const std::string& v) {
    out += k;
    out += " = ";
    out += v;
    out += "\n";
  };
  auto fmt_d = [&buf](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  add("d", std::to_string(cfg.d));
  add("level_rule", level_rule_name(cfg.level_rule));
  if (!cfg.levels.empty()) {
    std::string l;
    for (size_t i = 0; i < cfg.levels.size(); ++i) {
      if (i) l += ",";
      l += std::to_string(cfg.levels[i]);
    }
    add("levels", l);
  }
  if (cfg.S > 0) add("S", std::to_string(cfg.S));
  if (cfg.L > 0) add("L", std::to_string(cfg.L));
  {
    std::string l;
    for (size_t i = 0; i < cfg.P_values.size(); ++i) {
      if (i) l += ",";
      l += std::to_string(cfg.P_values[i]);
    }
    add("P", l);
  }
  add("q_rule", q_rule_name(cfg.q_rule));
  if (cfg.q_rule == QRule::Fixed) add("q", std::to_string(cfg.q));
  add("gamma", fmt_d(cfg.gamma));
  add("variant", variant_name(cfg.variant));
  add("weighting", weighting_name(cfg.weighting));
  add("solver", solver_name(cfg.solver));
  add("xi_rule", xi_rule_name(cfg.xi_rule));
  if (cfg.xi_rule == XiRule::Explicit) add("xi", fmt_d(cfg.xi));
  {
    std::string l;
    for (size_t i = 0; i < cfg.p_fault.size(); ++i) {
      if (i) l += ",";
      l += fmt_d(cfg.p_fault[i]);
    }
    add("p_fault", l);
  }
  add("runs", std::to_string(cfg.runs));
  std::snprintf(buf, sizeof buf, "%" PRIu64, cfg.seed);
  add("seed", buf);
  add("tol", fmt_d(cfg.tol));
  add("max_iter", std::to_string(cfg.max_iter));
  return out;
}

const char* level_rule_name(LevelRule r) {
  switch (r) {
    case LevelRule::Explicit: return "explicit";
    case LevelRule::WeakScaling: return "weak-scaling";
    case LevelRule::Isotropic: return "isotropic";
    case LevelRule::StrongScaling: return "strong-scaling";
  }
  return "?";
}

const char* q_rule_name(QRule r) {
  switch (r) {
    case QRule::Fixed: return "fixed";
    case QRule::ScaledS: return "scaled-S";
    case QRule::ScaledNP: return "scaled-NP";
  }
  return "?";
}

const char* solver_name(SolverKind s) {
  switch (s) {
    case SolverKind::Richardson: return "richardson";
    case SolverKind::Pcg: return "pcg";
    case SolverKind::PcgFlexible: return "pcg-flexible";
  }
  return "?";
}

const char* xi_rule_name(XiRule r) {
  return r == XiRule::Optimal ? "optimal" : "explicit";
}

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::PlainOneLevel: return "plain-one-level";
    case Variant::PlainTwoLevel: return "plain-two-level";
    case Variant::Balanced: return "balanced";
    case Variant::Nicolaides: return "nicolaides";
    case Variant::Deflated: return "deflated";
  }
  return "?";
}

const char* weighting_name(Weighting w) {
  switch (w) {
    case Weighting::None: return "none";
    case Weighting::Omega: return "omega";
    case Weighting::D: return "d";
  }
  return "?";
}

}  // namespace sfcdd
