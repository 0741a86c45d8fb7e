#include "pfnl/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "pfnl/error.hpp"
#include "pfnl/field_io.hpp"

namespace pfnl {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\''))) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

struct RawEntry {
  std::string value;
  int line = 0;
};

class Reader {
 public:
  Reader(std::map<std::string, RawEntry> raw, std::string origin) : raw_(std::move(raw)), origin_(std::move(origin)) {}

  void error(int line, const std::string& message) {
    errors_.push_back(origin_ + ":" + (line > 0 ? std::to_string(line) : std::string("-")) + ": " + message);
  }

  int line_of(const std::string& key) const {
    auto it = raw_.find(key);
    return it == raw_.end() ? 0 : it->second.line;
  }

  bool has(const std::string& key) const { return raw_.count(key) > 0; }

  template <class T>
  void read(const std::string& key, T& target, std::function<std::string(const T&)> check = {}) {
    known_.insert(key);
    auto it = raw_.find(key);
    if (it != raw_.end()) {
      std::optional<T> v = convert<T>(it->second.value);
      if (!v) {
        error(it->second.line, key + ": cannot parse '" + it->second.value + "' as " + type_name<T>());
        return;
      }
      target = *v;
    }
    if (check) {
      const std::string msg = check(target);
      if (!msg.empty()) error(line_of(key), key + ": " + msg);
    }
  }

  template <class T>
  void read_optional(const std::string& key, std::optional<T>& target, std::function<std::string(const T&)> check) {
    known_.insert(key);
    auto it = raw_.find(key);
    if (it == raw_.end()) return;
    std::optional<T> v = convert<T>(it->second.value);
    if (!v) {
      error(it->second.line, key + ": cannot parse '" + it->second.value + "' as " + type_name<T>());
      return;
    }
    target = *v;
    const std::string msg = check(*v);
    if (!msg.empty()) error(it->second.line, key + ": " + msg);
  }

  void reject_unknown() {
    for (const auto& [key, entry] : raw_) {
      if (!known_.count(key)) error(entry.line, "unknown key '" + key + "'");
    }
  }

  const std::vector<std::string>& errors() const { return errors_; }

 private:
  template <class T>
  static std::string type_name() {
    if constexpr (std::is_same_v<T, double>) return "a real number";
    if constexpr (std::is_same_v<T, int>) return "an integer";
    if constexpr (std::is_same_v<T, std::uint64_t>) return "a nonnegative integer";
    if constexpr (std::is_same_v<T, bool>) return "a boolean";
    if constexpr (std::is_same_v<T, std::string>) return "a string";
    return "a list of real numbers";
  }

  template <class T>
  static std::optional<T> convert(const std::string& s) {
    if constexpr (std::is_same_v<T, std::string>) {
      return unquote(s);
    } else if constexpr (std::is_same_v<T, bool>) {
      if (s == "true" || s == "1" || s == "yes") return true;
      if (s == "false" || s == "0" || s == "no") return false;
      return std::nullopt;
    } else if constexpr (std::is_same_v<T, double>) {
      return parse_real(s);
    } else if constexpr (std::is_same_v<T, int> || std::is_same_v<T, std::uint64_t>) {
      T v{};
      const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
      return v;
    } else {
      std::string body = s;
      if (!body.empty() && body.front() == '[' && body.back() == ']') body = body.substr(1, body.size() - 2);
      T out;
      std::istringstream in(body);
      std::string item;
      while (std::getline(in, item, ',')) {
        const auto v = parse_real(trim(item));
        if (!v) return std::nullopt;
        out.push_back(*v);
      }
      if (out.empty()) return std::nullopt;
      return out;
    }
  }

  static std::optional<double> parse_real(const std::string& s) {
    if (s.empty()) return std::nullopt;
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size() || !std::isfinite(v)) return std::nullopt;
      return v;
    } catch (const std::logic_error&) {
      return std::nullopt;
    }
  }

  std::map<std::string, RawEntry> raw_;
  std::string origin_;
  std::set<std::string> known_;
  std::vector<std::string> errors_;
};

std::string positive(const double& x) { return x > 0.0 ? "" : "must be positive"; }
std::string tolerance(const double& x) { return x > 0.0 && x <= 1e-6 ? "" : "must lie in (0, 1e-6]"; }

std::function<std::string(const std::string&)> one_of(std::vector<std::string> options) {
  return [options](const std::string& v) -> std::string {
    if (std::find(options.begin(), options.end(), v) != options.end()) return "";
    std::string msg = "must be one of";
    for (const auto& o : options) msg += " " + o;
    return msg + ", got '" + v + "'";
  };
}

std::string join_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_real(v[i]);
  return s;
}

}  // namespace

std::uint64_t RunConfig::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& [k, v] : entries) {
    for (char c : k + "=" + v + "\n") {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
  }
  return h;
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  std::map<std::string, RawEntry> raw;
  std::vector<std::string> syntax;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']' || body.size() < 3) {
        syntax.push_back(origin + ":" + std::to_string(line_no) + ": malformed section header '" + body + "'");
        continue;
      }
      section = trim(body.substr(1, body.size() - 2));
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      syntax.push_back(origin + ":" + std::to_string(line_no) + ": expected 'key = value', got '" + body + "'");
      continue;
    }
    std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) {
      syntax.push_back(origin + ":" + std::to_string(line_no) + ": empty key");
      continue;
    }
    if (!section.empty()) key = section + "." + key;
    auto [it, inserted] = raw.emplace(key, RawEntry{value, line_no});
    if (!inserted) {
      syntax.push_back(origin + ":" + std::to_string(line_no) + ": duplicate key '" + key + "' (first set on line " +
                       std::to_string(it->second.line) + ", again on line " + std::to_string(line_no) + ")");
    }
  }

  RunConfig c;
  Reader r(raw, origin);
  r.read<int>("grid.d", c.d, [](const int& d) { return d == 1 || d == 2 ? "" : "dimension must be 1 or 2"; });
  r.read<int>("grid.n", c.n, [](const int& n) { return n >= 4 ? "" : "need at least 4 cells per axis"; });
  r.read<double>("grid.length", c.length, positive);

  r.read<std::string>("kernel.profile", c.kernel_profile,
                      one_of({"compact-bump", "polynomial-bump", "gaussian-truncated"}));
  r.read<double>("kernel.support_radius", c.kernel_support_radius, positive);
  const int d = c.d;
  r.read<double>("kernel.alpha", c.kernel_alpha, [d](const double& a) -> std::string {
    if (a >= 0.0 && a <= d - 1) return "";
    std::ostringstream msg;
    msg << "alpha = " << a << " violates the kernel scaling bound 0 <= alpha <= d - 1 = " << d - 1;
    return msg.str();
  });
  r.read<std::string>("kernel.integrability", c.kernel_integrability, one_of({"report", "enforce"}));
  r.read<double>("model.eps", c.eps, [](const double& e) { return e > 0.0 && e <= 1.0 ? "" : "must lie in (0, 1]"; });

  r.read<std::string>("potential.kind", c.potential_kind, one_of({"double-well", "custom-polynomial", "zero"}));
  r.read_optional<double>("potential.q", c.potential_q,
                          [](const double& q) { return q > 1.0 ? "" : "growth exponent q must exceed 1"; });
  r.read_optional<double>("potential.c_beta", c.potential_c_beta, positive);
  r.read<std::vector<double>>("potential.beta_coeffs", c.potential_beta_coeffs);
  r.read<double>("potential.pi_slope", c.potential_pi_slope);

  r.read<std::string>("initial.kind", c.initial_kind, one_of({"smooth-default", "constant", "custom"}));
  r.read<std::string>("initial.file", c.initial_file);
  std::vector<double> constant{0.0, 0.0, 0.0};
  r.read<std::vector<double>>("initial.constant", constant, [](const std::vector<double>& v) {
    return v.size() == 3 ? "" : "expects three values: theta, phi, v";
  });
  if (constant.size() == 3) c.initial_constant = {constant[0], constant[1], constant[2]};
  r.read<double>("a5.c1", c.a5_c1, positive);

  r.read<std::string>("source.kind", c.source_kind, one_of({"zero", "cosine"}));
  r.read<double>("source.amplitude", c.source_amplitude);

  r.read<double>("time.T", c.T, [](const double& t) { return t >= 0.0 ? "" : "must be nonnegative"; });
  r.read<double>("time.dt", c.dt, positive);
  r.read<int>("time.snapshots", c.snapshots, [](const int& s) { return s >= 0 ? "" : "must be nonnegative"; });
  r.read<double>("solver.newton_tol", c.newton_tol, tolerance);
  r.read<int>("solver.newton_max_iter", c.newton_max_iter, [](const int& m) { return m >= 1 ? "" : "must be positive"; });
  r.read<double>("solver.cg_tol", c.cg_tol, tolerance);

  r.read<std::vector<double>>("sweep.eps_list", c.eps_list, [](const std::vector<double>& v) -> std::string {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!(v[i] > 0.0 && v[i] <= 1.0)) return "values must lie in (0, 1]";
      if (i > 0 && !(v[i] < v[i - 1])) return "must be strictly decreasing";
    }
    return "";
  });
  r.read<int>("sweep.max_n", c.max_n, [](const int& n) { return n >= 4 ? "" : "must be at least 4"; });
  r.read<double>("sweep.cells_per_eps", c.cells_per_eps,
                 [](const double& x) { return x >= 4.0 ? "" : "must be at least 4 (kernel resolution)"; });
  r.read<std::string>("sweep.reference", c.reference, one_of({"local-solve", "finest-eps"}));
  r.read<int>("sweep.reference_refine", c.reference_refine, [](const int& k) { return k >= 1 ? "" : "must be positive"; });
  r.read<int>("sweep.threads", c.threads, [](const int& t) { return t >= 0 ? "" : "must be nonnegative"; });
  r.read<bool>("sweep.assert", c.sweep_assert);

  r.read<std::string>("output.dir", c.output_dir, [](const std::string& s) { return s.empty() ? "must not be empty" : ""; });
  r.read<std::string>("output.format", c.output_format, one_of({"csv", "binary"}));
  r.read<std::uint64_t>("seed", c.seed);
  r.read<bool>("monitor.estimates", c.monitor_estimates);

  if (c.T > 0.0 && c.dt > c.T && r.has("time.dt")) r.error(r.line_of("time.dt"), "time.dt: must not exceed time.T");
  if (c.initial_kind == "custom" && c.initial_file.empty()) {
    r.error(r.line_of("initial.kind"), "initial.kind = custom requires initial.file");
  }
  r.reject_unknown();

  std::vector<std::string> all = syntax;
  all.insert(all.end(), r.errors().begin(), r.errors().end());
  if (!all.empty()) {
    std::string msg = "config: " + std::to_string(all.size()) + " problem(s)";
    for (const auto& e : all) msg += "\n  " + e;
    throw ConfigError(msg);
  }

  auto& e = c.entries;
  e = {
      {"a5.c1", format_real(c.a5_c1)},
      {"grid.d", std::to_string(c.d)},
      {"grid.length", format_real(c.length)},
      {"grid.n", std::to_string(c.n)},
      {"initial.constant", join_list({c.initial_constant[0], c.initial_constant[1], c.initial_constant[2]})},
      {"initial.file", c.initial_file},
      {"initial.kind", c.initial_kind},
      {"kernel.alpha", format_real(c.kernel_alpha)},
      {"kernel.integrability", c.kernel_integrability},
      {"kernel.profile", c.kernel_profile},
      {"kernel.support_radius", format_real(c.kernel_support_radius)},
      {"model.eps", format_real(c.eps)},
      {"monitor.estimates", c.monitor_estimates ? "true" : "false"},
      {"output.dir", c.output_dir},
      {"output.format", c.output_format},
      {"potential.beta_coeffs", join_list(c.potential_beta_coeffs)},
      {"potential.c_beta", c.potential_c_beta ? format_real(*c.potential_c_beta) : "default"},
      {"potential.kind", c.potential_kind},
      {"potential.pi_slope", format_real(c.potential_pi_slope)},
      {"potential.q", c.potential_q ? format_real(*c.potential_q) : "default"},
      {"seed", std::to_string(c.seed)},
      {"solver.cg_tol", format_real(c.cg_tol)},
      {"solver.newton_max_iter", std::to_string(c.newton_max_iter)},
      {"solver.newton_tol", format_real(c.newton_tol)},
      {"source.amplitude", format_real(c.source_amplitude)},
      {"source.kind", c.source_kind},
      {"sweep.assert", c.sweep_assert ? "true" : "false"},
      {"sweep.cells_per_eps", format_real(c.cells_per_eps)},
      {"sweep.eps_list", join_list(c.eps_list)},
      {"sweep.max_n", std::to_string(c.max_n)},
      {"sweep.reference", c.reference},
      {"sweep.reference_refine", std::to_string(c.reference_refine)},
      {"sweep.threads", std::to_string(c.threads)},
      {"time.T", format_real(c.T)},
      {"time.dt", format_real(c.dt)},
      {"time.snapshots", std::to_string(c.snapshots)},
  };
  return c;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  RunConfig c = parse_config_text(buffer.str(), path.string());
  c.base_dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  return c;
}

}  // namespace pfnl
