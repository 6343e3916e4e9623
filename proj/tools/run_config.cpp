#include "run_config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>

#include "decot/errors.hpp"

namespace decot::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double out = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) {
    throw ParseError("config: bad number for " + key + ": '" + v + "'");
  }
  return out;
}

long long parse_int(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const long long out = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) {
    throw ParseError("config: bad integer for " + key + ": '" + v + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ParseError("config: bad boolean for " + key + ": '" + v + "'");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Field {
  const char* key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define DECOT_STR(name)                                                        \
  Field {                                                                      \
    #name, [](RunConfig& c, const std::string& v) { c.name = v; },             \
        [](const RunConfig& c) { return c.name; }                              \
  }
#define DECOT_DBL(name)                                                        \
  Field {                                                                      \
    #name,                                                                     \
        [](RunConfig& c, const std::string& v) { c.name = parse_double(#name, v); }, \
        [](const RunConfig& c) { return fmt(c.name); }                         \
  }
#define DECOT_INT(name)                                                        \
  Field {                                                                      \
    #name,                                                                     \
        [](RunConfig& c, const std::string& v) {                               \
          c.name = static_cast<decltype(c.name)>(parse_int(#name, v));         \
        },                                                                     \
        [](const RunConfig& c) { return std::to_string(c.name); }              \
  }
#define DECOT_BOOL(name)                                                       \
  Field {                                                                      \
    #name, [](RunConfig& c, const std::string& v) { c.name = parse_bool(#name, v); }, \
        [](const RunConfig& c) { return std::string(c.name ? "true" : "false"); } \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      DECOT_STR(problem),      DECOT_INT(n),           DECOT_INT(num_agents),
      DECOT_STR(graph),        DECOT_DBL(edge_prob),   DECOT_INT(graph_seed),
      DECOT_INT(instance_seed), DECOT_DBL(noise_var),  DECOT_STR(mode),
      DECOT_DBL(rho),          DECOT_DBL(tau),         DECOT_DBL(beta),
      DECOT_DBL(beta_factor),  DECOT_DBL(eta),         DECOT_INT(max_iters),
      DECOT_DBL(eps),          DECOT_INT(log_every),   DECOT_INT(threads),
      DECOT_INT(inner_max_iters), DECOT_DBL(inner_tol), DECOT_BOOL(no_oracle),
      DECOT_STR(instance_file), DECOT_STR(output),     DECOT_INT(verify_cases),
      DECOT_BOOL(inject_fault),
  };
  return table;
}

#undef DECOT_STR
#undef DECOT_DBL
#undef DECOT_INT
#undef DECOT_BOOL

}  // namespace

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  std::string k = key;
  std::replace(k.begin(), k.end(), '-', '_');
  if (k == "N") k = "num_agents";
  for (const Field& f : fields()) {
    if (k == f.key) {
      f.set(cfg, value);
      return;
    }
  }
  throw ParseError("config: unknown key '" + key + "'");
}

void load_config(RunConfig& cfg, std::istream& in) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config: line " + std::to_string(line_no) + " is not key=value");
    }
    apply_setting(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
}

void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("config: cannot open " + path);
  load_config(cfg, in);
}

std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const Field& f : fields()) out.emplace_back(f.key, f.get(cfg));
  return out;
}

}  // namespace decot::cli
