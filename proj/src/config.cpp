#include "iukit/config.hpp"

#include <cmath>
#include <cstdlib>
#include <map>
#include <utility>

#include "iukit/csv.hpp"

namespace iukit {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
  return s.substr(b, e - b);
}

bool parse_double(const std::string& text, double* out) {
  if (text.empty()) return false;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size()) return false;
  *out = v;
  return true;
}

bool parse_list(const std::string& text, std::vector<double>* out) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::size_t stop = comma == std::string::npos ? text.size() : comma;
    double v = 0.0;
    if (!parse_double(trim(text.substr(start, stop - start)), &v)) return false;
    values.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  *out = std::move(values);
  return true;
}

bool parse_int(const std::string& text, int* out) {
  double v = 0.0;
  if (!parse_double(text, &v)) return false;
  if (v != std::floor(v) || std::abs(v) > 2e9) return false;
  *out = static_cast<int>(v);
  return true;
}

bool parse_u64(const std::string& text, std::uint64_t* out) {
  // strtoull wraps negative input around instead of rejecting it.
  if (text.empty() || text[0] == '-' || text[0] == '+') return false;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
  if (end != text.c_str() + text.size()) return false;
  *out = v;
  return true;
}

class Parser {
 public:
  ParsedConfig run(const std::string& text) {
    int line = 0;
    std::string section;
    bool skip_section = false;
    std::size_t start = 0;
    while (start <= text.size()) {
      ++line;
      std::size_t stop = text.find('\n', start);
      if (stop == std::string::npos) stop = text.size();
      std::string raw = text.substr(start, stop - start);
      start = stop + 1;
      if (!raw.empty() && raw.back() == '\r') raw.pop_back();
      const std::size_t hash = raw.find('#');
      if (hash != std::string::npos) raw.erase(hash);
      raw = trim(raw);
      if (raw.empty()) {
        if (start > text.size()) break;
        continue;
      }

      if (raw.front() == '[') {
        if (raw.back() != ']') {
          fail(line, "unterminated section header: " + raw);
          skip_section = true;
        } else {
          section = trim(raw.substr(1, raw.size() - 2));
          skip_section = false;
          if (section != "grid" && section != "constants" && section != "curvature") {
            fail(line, "unknown section [" + section + "]");
            skip_section = true;
          }
        }
        if (start > text.size()) break;
        continue;
      }

      const std::size_t eq = raw.find('=');
      if (eq == std::string::npos) {
        fail(line, "expected `key = value`, got: " + raw);
      } else if (!skip_section) {
        assign(line, section, trim(raw.substr(0, eq)), trim(raw.substr(eq + 1)));
      }
      if (start > text.size()) break;
    }
    validate();
    return ParsedConfig{std::move(cfg_), std::move(errors_)};
  }

 private:
  void fail(int line, std::string message) {
    errors_.push_back(ConfigError{line, std::move(message)});
  }

  // Records the assignment line, reporting duplicates with both locations.
  bool claim(int line, const std::string& full_key) {
    const auto [it, fresh] = seen_.emplace(full_key, line);
    if (!fresh) {
      fail(line, "duplicate key '" + full_key + "' (first set on line " +
                     std::to_string(it->second) + ")");
      return false;
    }
    return true;
  }

  int line_of(const std::string& full_key) const {
    const auto it = seen_.find(full_key);
    return it == seen_.end() ? 0 : it->second;
  }

  void set_double(int line, const std::string& key, const std::string& value, double* out) {
    if (!parse_double(value, out)) fail(line, "key '" + key + "': expected a number, got '" + value + "'");
  }

  void set_int(int line, const std::string& key, const std::string& value, int* out) {
    if (!parse_int(value, out)) fail(line, "key '" + key + "': expected an integer, got '" + value + "'");
  }

  void set_list(int line, const std::string& key, const std::string& value,
                std::vector<double>* out) {
    if (!parse_list(value, out)) fail(line, "key '" + key + "': expected a comma-separated number list, got '" + value + "'");
  }

  void assign(int line, const std::string& section, const std::string& key,
              const std::string& value) {
    const std::string full = section.empty() ? key : section + "." + key;
    if (key.empty()) {
      fail(line, "missing key before '='");
      return;
    }
    if (value.empty()) {
      fail(line, "key '" + full + "': missing value");
      return;
    }
    if (!claim(line, full)) return;

    if (section.empty()) {
      if (key == "example") {
        if (value == "e1") cfg_.example = ExampleChoice::e1;
        else if (value == "e2") cfg_.example = ExampleChoice::e2;
        else if (value == "custom") cfg_.example = ExampleChoice::custom;
        else fail(line, "key 'example': must be e1, e2, or custom, got '" + value + "'");
      } else if (key == "delta") {
        set_double(line, full, value, &cfg_.delta);
      } else if (key == "theta") {
        set_double(line, full, value, &cfg_.theta);
      } else if (key == "d") {
        set_int(line, full, value, &cfg_.dim);
      } else if (key == "m") {
        set_double(line, full, value, &cfg_.m);
      } else if (key == "excited") {
        set_int(line, full, value, &cfg_.excited);
      } else if (key == "seed") {
        if (!parse_u64(value, &cfg_.seed)) {
          fail(line, "key 'seed': expected a non-negative integer, got '" + value + "'");
        }
      } else if (key == "count") {
        set_int(line, full, value, &cfg_.count);
      } else if (key == "times") {
        set_list(line, full, value, &cfg_.times);
      } else if (key == "rs") {
        set_list(line, full, value, &cfg_.rs);
      } else if (key == "out") {
        cfg_.out_dir = value;
      } else {
        fail(line, "unknown key '" + key + "'");
      }
      return;
    }

    if (section == "grid") {
      if (key == "n") set_int(line, full, value, &cfg_.n);
      else if (key == "r_max") set_double(line, full, value, &cfg_.r_max);
      else if (key == "ladder") set_list(line, full, value, &cfg_.ladder);
      else fail(line, "unknown key '" + full + "'");
      return;
    }

    if (section == "constants") {
      if (key == "theta") set_double(line, full, value, &cfg_.constants.theta);
      else if (key == "big_c") set_double(line, full, value, &cfg_.constants.big_c);
      else if (key == "c0") set_double(line, full, value, &cfg_.constants.c0);
      else if (key == "epsilon") set_double(line, full, value, &cfg_.constants.epsilon);
      else if (key == "small_c") set_double(line, full, value, &cfg_.constants.small_c);
      else if (key == "stabilize_ratio") set_double(line, full, value, &cfg_.stabilize_ratio);
      else if (key == "growth_ratio") set_double(line, full, value, &cfg_.growth_ratio);
      else if (key == "theta_prime") set_double(line, full, value, &cfg_.theta_prime);
      else fail(line, "unknown key '" + full + "'");
      return;
    }

    if (key == "coefficient") set_double(line, full, value, &cfg_.curvature.coefficient);
    else if (key == "exponent") set_double(line, full, value, &cfg_.curvature.exponent);
    else if (key == "smoothing_radius") set_double(line, full, value, &cfg_.curvature.smoothing_radius);
    else if (key == "floor") set_double(line, full, value, &cfg_.curvature.floor_value);
    else fail(line, "unknown key '" + full + "'");
  }

  void range(const std::string& full_key, bool ok, const std::string& requirement) {
    if (!ok) fail(line_of(full_key), "key '" + full_key + "': " + requirement);
  }

  static bool positive_increasing(const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!(v[i] > 0.0) || !std::isfinite(v[i])) return false;
      if (i > 0 && !(v[i] > v[i - 1])) return false;
    }
    return true;
  }

  static bool all_positive(const std::vector<double>& v) {
    for (double x : v) {
      if (!(x > 0.0) || !std::isfinite(x)) return false;
    }
    return true;
  }

  void validate() {
    range("d", cfg_.dim >= 2, "dimension must be at least 2");
    range("delta", cfg_.delta > 0.0 && std::isfinite(cfg_.delta), "must be positive");
    range("theta", cfg_.theta > 0.0 && std::isfinite(cfg_.theta), "must be positive");
    range("m", cfg_.m > 0.0 && std::isfinite(cfg_.m), "must be positive");
    range("count", cfg_.count >= 1, "must be at least 1");
    range("grid.n", cfg_.n >= 16, "must be at least 16");
    range("grid.r_max", cfg_.r_max > 0.0 && std::isfinite(cfg_.r_max), "must be positive");
    range("excited", cfg_.excited >= 0, "must be non-negative");
    if (cfg_.excited >= 0 && cfg_.n >= 16) {
      range("excited", cfg_.excited <= cfg_.n - 3,
            "requests more states than the grid carries");
    }
    range("grid.ladder", cfg_.ladder.size() >= 3 && positive_increasing(cfg_.ladder),
          "needs at least three strictly increasing positive rungs");
    range("times", !cfg_.times.empty() && all_positive(cfg_.times),
          "needs positive finite entries");
    range("rs", !cfg_.rs.empty() && positive_increasing(cfg_.rs),
          "needs strictly increasing positive entries");
    range("constants.theta", cfg_.constants.theta > 0.0, "must be positive");
    range("constants.big_c", cfg_.constants.big_c > 0.0, "must be positive");
    range("constants.c0", cfg_.constants.c0 > 0.0, "must be positive");
    range("constants.small_c", cfg_.constants.small_c > 0.0, "must be positive");
    range("constants.epsilon", cfg_.constants.epsilon > 0.0 && cfg_.constants.epsilon < 1.0,
          "must lie in (0, 1)");
    range("constants.stabilize_ratio", cfg_.stabilize_ratio > 1.0, "must exceed 1");
    range("constants.growth_ratio", cfg_.growth_ratio > cfg_.stabilize_ratio,
          "must exceed the stabilize ratio");
    range("constants.theta_prime", cfg_.theta_prime >= 0.0 && std::isfinite(cfg_.theta_prime),
          "must be non-negative");
    range("curvature.coefficient", cfg_.curvature.coefficient >= 0.0, "must be non-negative");
    range("curvature.exponent", cfg_.curvature.exponent >= 0.0, "must be non-negative");
    range("curvature.smoothing_radius", cfg_.curvature.smoothing_radius >= 0.0,
          "must be non-negative");
    range("curvature.floor", cfg_.curvature.floor_value >= 0.0, "must be non-negative");
    range("out", !cfg_.out_dir.empty(), "must not be empty");
  }

  RunConfig cfg_;
  std::vector<ConfigError> errors_;
  std::map<std::string, int> seen_;
};

void echo_list(std::string* out, const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) *out += ", ";
    *out += format_double(values[i]);
  }
  *out += '\n';
}

void echo_kv(std::string* out, const char* key, double value) {
  *out += key;
  *out += " = ";
  *out += format_double(value);
  *out += '\n';
}

}  // namespace

ParsedConfig parse_config(const std::string& text) { return Parser().run(text); }

std::string echo_config(const RunConfig& c) {
  std::string out;
  out += "example = ";
  switch (c.example) {
    case ExampleChoice::e1: out += "e1"; break;
    case ExampleChoice::e2: out += "e2"; break;
    case ExampleChoice::custom: out += "custom"; break;
  }
  out += '\n';
  echo_kv(&out, "delta", c.delta);
  echo_kv(&out, "theta", c.theta);
  out += "d = " + std::to_string(c.dim) + '\n';
  echo_kv(&out, "m", c.m);
  out += "excited = " + std::to_string(c.excited) + '\n';
  out += "seed = " + std::to_string(c.seed) + '\n';
  out += "count = " + std::to_string(c.count) + '\n';
  out += "times = ";
  echo_list(&out, c.times);
  out += "rs = ";
  echo_list(&out, c.rs);
  out += "out = " + c.out_dir + '\n';
  out += "\n[grid]\n";
  out += "n = " + std::to_string(c.n) + '\n';
  echo_kv(&out, "r_max", c.r_max);
  out += "ladder = ";
  echo_list(&out, c.ladder);
  out += "\n[constants]\n";
  echo_kv(&out, "theta", c.constants.theta);
  echo_kv(&out, "big_c", c.constants.big_c);
  echo_kv(&out, "c0", c.constants.c0);
  echo_kv(&out, "epsilon", c.constants.epsilon);
  echo_kv(&out, "small_c", c.constants.small_c);
  echo_kv(&out, "stabilize_ratio", c.stabilize_ratio);
  echo_kv(&out, "growth_ratio", c.growth_ratio);
  echo_kv(&out, "theta_prime", c.theta_prime);
  out += "\n[curvature]\n";
  echo_kv(&out, "coefficient", c.curvature.coefficient);
  echo_kv(&out, "exponent", c.curvature.exponent);
  echo_kv(&out, "smoothing_radius", c.curvature.smoothing_radius);
  echo_kv(&out, "floor", c.curvature.floor_value);
  return out;
}

}  // namespace iukit
