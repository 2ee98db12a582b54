#pragma once

// Flat key=value run configuration shared by the CLI and output artifacts.
// Keys: a, b, chi, tau, sigma, c, L, M, T, dt, init, out. '#' starts a
// comment. A file emitted by emit_config() parses back unchanged.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "chemospread/model.hpp"

namespace chemospread {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  ModelParams params;
  GridSpec grid;
  std::string init = "paperbump";
  std::string out;

  InitialData initial_data() const {
    if (init == "paperbump") return InitialData::paper_bump();
    throw ConfigError("unknown init profile: " + init +
                      " (custom profiles are library-only)");
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw ConfigError("");
    return x;
  } catch (...) {
    throw ConfigError("config: bad numeric value for " + key + ": '" + v + "'");
  }
}

}  // namespace detail

inline void apply_config_line(Config& cfg, const std::string& key,
                              const std::string& value) {
  using detail::parse_double;
  if (key == "a") cfg.params.a = parse_double(key, value);
  else if (key == "b") cfg.params.b = parse_double(key, value);
  else if (key == "chi") cfg.params.chi = parse_double(key, value);
  else if (key == "tau") cfg.params.tau = parse_double(key, value);
  else if (key == "sigma") cfg.params.sigma = parse_double(key, value);
  else if (key == "c") cfg.params.c = parse_double(key, value);
  else if (key == "L") cfg.grid.L = parse_double(key, value);
  else if (key == "M") {
    const double m = parse_double(key, value);
    if (m != std::floor(m)) throw ConfigError("config: M must be an integer");
    cfg.grid.M = static_cast<int>(m);
  }
  else if (key == "T") cfg.grid.T = parse_double(key, value);
  else if (key == "dt") cfg.grid.dt = parse_double(key, value);
  else if (key == "init") cfg.init = value;
  else if (key == "out") cfg.out = value;
  else throw ConfigError("config: unknown key '" + key + "'");
}

inline Config parse_config(std::istream& is, Config base = {}) {
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    apply_config_line(base, key, value);
  }
  return base;
}

inline Config load_config(const std::string& path, Config base = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  return parse_config(in, base);
}

inline std::string emit_config(const Config& cfg) {
  auto g17 = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return std::string(buf);
  };
  std::ostringstream os;
  os << "a=" << g17(cfg.params.a) << '\n'
     << "b=" << g17(cfg.params.b) << '\n'
     << "chi=" << g17(cfg.params.chi) << '\n'
     << "tau=" << g17(cfg.params.tau) << '\n'
     << "sigma=" << g17(cfg.params.sigma) << '\n'
     << "c=" << g17(cfg.params.c) << '\n'
     << "L=" << g17(cfg.grid.L) << '\n'
     << "M=" << cfg.grid.M << '\n'
     << "T=" << g17(cfg.grid.T) << '\n'
     << "dt=" << g17(cfg.grid.dt) << '\n'
     << "init=" << cfg.init << '\n';
  if (!cfg.out.empty()) os << "out=" << cfg.out << '\n';
  return os.str();
}

}  // namespace chemospread
