#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "vsnash/errors.hpp"
#include "vsnash/harness.hpp"

namespace vsnash {

std::string to_string(Family f) {
  return f == Family::linear_cournot ? "linear_cournot" : "quadratic_cournot";
}

std::string to_string(Metric m) { return m == Metric::mse ? "mse" : "relative_error"; }

std::string to_string(OracleMode m) {
  return m == OracleMode::fixed_point ? "fixed_point" : "extragradient";
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out))
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  return out;
}

std::int64_t to_int(const std::string& key, const std::string& v) {
  std::int64_t out = 0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec == std::errc() && ptr == end) return out;
  // Accept integral scientific notation such as 1e6.
  const double d = to_double(key, v);
  if (d != std::floor(d) || std::fabs(d) > 9e18)
    throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
  return static_cast<std::int64_t>(d);
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("key '" + key + "': expected a nonnegative integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + key + "': expected true or false, got '" + v + "'");
}

template <typename F>
auto wrap(const std::string& key, F parse) {
  try {
    return parse();
  } catch (const ConfigError& e) {
    throw ConfigError("key '" + key + "': " + e.what());
  }
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"family",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "linear_cournot") c.family = Family::linear_cournot;
         else if (v == "quadratic_cournot") c.family = Family::quadratic_cournot;
         else throw ConfigError("key '" + k + "': unknown family '" + v + "'");
       }},
      {"n", [](auto& c, auto& k, auto& v) { c.n = static_cast<int>(to_int(k, v)); }},
      {"L", [](auto& c, auto& k, auto& v) { c.L = static_cast<int>(to_int(k, v)); }},
      {"instance_seed", [](auto& c, auto& k, auto& v) { c.instance_seed = to_uint(k, v); }},
      {"cap", [](auto& c, auto& k, auto& v) { c.cournot.cap = to_double(k, v); }},
      {"price_noise_base",
       [](auto& c, auto& k, auto& v) { c.cournot.price_noise_base = wrap(k, [&] { return parse_price_noise_base(v); }); }},
      {"noise_scale", [](auto& c, auto& k, auto& v) { c.cournot.noise_scale = to_double(k, v); }},
      {"instance_file", [](auto& c, auto&, auto& v) { c.instance_file = v; }},
      {"scheme", [](auto& c, auto& k, auto& v) { c.scheme = wrap(k, [&] { return parse_scheme(v); }); }},
      {"alpha", [](auto& c, auto& k, auto& v) { c.alpha = to_double(k, v); }},
      {"mu", [](auto& c, auto& k, auto& v) { c.mu = to_double(k, v); }},
      {"batch", [](auto& c, auto& k, auto& v) { c.batch.kind = wrap(k, [&] { return parse_batch_kind(v); }); }},
      {"batch_rho", [](auto& c, auto& k, auto& v) { c.batch.rho = to_double(k, v); }},
      {"batch_v", [](auto& c, auto& k, auto& v) { c.batch.v = to_double(k, v); }},
      {"batch_c_ns", [](auto& c, auto& k, auto& v) { c.batch.c_ns = to_double(k, v); }},
      {"batch_eta_br", [](auto& c, auto& k, auto& v) { c.batch.eta_br = to_double(k, v); }},
      {"batch_size", [](auto& c, auto& k, auto& v) { c.batch.size = to_int(k, v); }},
      {"max_batch", [](auto& c, auto& k, auto& v) { c.batch.max_batch = to_int(k, v); }},
      {"comm", [](auto& c, auto& k, auto& v) { c.comm.kind = wrap(k, [&] { return parse_comm_kind(v); }); }},
      {"comm_u", [](auto& c, auto& k, auto& v) { c.comm.u = to_double(k, v); }},
      {"topology", [](auto& c, auto& k, auto& v) { c.topology = wrap(k, [&] { return parse_topology(v); }); }},
      {"graph_seed", [](auto& c, auto& k, auto& v) { c.graph_seed = to_uint(k, v); }},
      {"max_iters", [](auto& c, auto& k, auto& v) { c.max_iters = to_int(k, v); }},
      {"seed", [](auto& c, auto& k, auto& v) { c.seed = to_uint(k, v); }},
      {"replications", [](auto& c, auto& k, auto& v) { c.replications = static_cast<int>(to_int(k, v)); }},
      {"budget", [](auto& c, auto& k, auto& v) { c.budget = to_int(k, v); }},
      {"metric",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "mse") c.metric = Metric::mse;
         else if (v == "relative_error") c.metric = Metric::relative_error;
         else throw ConfigError("key '" + k + "': unknown metric '" + v + "'");
       }},
      {"inner_tol", [](auto& c, auto& k, auto& v) { c.inner.tol = to_double(k, v); }},
      {"inner_max_iters", [](auto& c, auto& k, auto& v) { c.inner.max_iters = to_int(k, v); }},
      {"inner_closed_form", [](auto& c, auto& k, auto& v) { c.inner.closed_form = to_bool(k, v); }},
      {"oracle",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "fixed_point") c.oracle = OracleMode::fixed_point;
         else if (v == "extragradient") c.oracle = OracleMode::extragradient;
         else throw ConfigError("key '" + k + "': unknown oracle '" + v + "'");
       }},
      {"oracle_tol", [](auto& c, auto& k, auto& v) { c.oracle_tol = to_double(k, v); }},
      {"eps",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.eps.clear();
         std::stringstream ss(v);
         std::string item;
         while (std::getline(ss, item, ',')) {
           item = trim(item);
           if (!item.empty()) c.eps.push_back(to_double(k, item));
         }
       }},
      {"output_dir", [](auto& c, auto&, auto& v) { c.output_dir = v; }},
      {"plot", [](auto& c, auto& k, auto& v) { c.plot = to_bool(k, v); }},
  };
  return table;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (n < 2) throw ConfigError("n must be at least 2");
  if (L < 1) throw ConfigError("L must be at least 1");
  if (replications < 1) throw ConfigError("replications must be at least 1");
  if (budget < 1) throw ConfigError("budget must be at least 1");
  if (max_iters < 1) throw ConfigError("max_iters must be at least 1");
  if (!(cournot.cap > 0.0)) throw ConfigError("cap must be positive");
  if (!(cournot.noise_scale >= 0.0)) throw ConfigError("noise_scale must be nonnegative");
  if (!(oracle_tol > 0.0)) throw ConfigError("oracle_tol must be positive");
  const bool gradient = scheme == Scheme::vs_pgr || scheme == Scheme::d_vs_pgr;
  if (gradient && !(alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (!gradient && !(mu > 0.0)) throw ConfigError("mu must be positive");
  for (double e : eps)
    if (!(e > 0.0)) throw ConfigError("eps values must be positive");
  // c_ns = 0 asks for the derived constant, so validate a stand-in.
  BatchSchedule b = batch;
  if (b.kind == BatchKind::pbr_geometric && b.c_ns == 0.0) b.c_ns = 1.0;
  if (b.kind == BatchKind::geometric || b.kind == BatchKind::polynomial) b.alpha = gradient ? alpha : 1.0;
  b.validate();
  comm.validate();
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::set<std::string> seen;
  std::stringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end())
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second)
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    if (value.empty() && key != "instance_file" && key != "output_dir" && key != "eps")
      throw ConfigError("line " + std::to_string(lineno) + ": key '" + key + "' has no value");
    it->second(c, key, value);
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::map<std::string, std::string> config_entries(const ExperimentConfig& c) {
  std::map<std::string, std::string> m;
  m["family"] = to_string(c.family);
  m["n"] = std::to_string(c.n);
  m["L"] = std::to_string(c.L);
  m["instance_seed"] = std::to_string(c.instance_seed);
  m["cap"] = fmt_double(c.cournot.cap);
  m["price_noise_base"] = to_string(c.cournot.price_noise_base);
  m["noise_scale"] = fmt_double(c.cournot.noise_scale);
  m["instance_file"] = c.instance_file;
  m["scheme"] = to_string(c.scheme);
  m["alpha"] = fmt_double(c.alpha);
  m["mu"] = fmt_double(c.mu);
  m["batch"] = to_string(c.batch.kind);
  m["batch_rho"] = fmt_double(c.batch.rho);
  m["batch_v"] = fmt_double(c.batch.v);
  m["batch_c_ns"] = fmt_double(c.batch.c_ns);
  m["batch_eta_br"] = fmt_double(c.batch.eta_br);
  m["batch_size"] = std::to_string(c.batch.size);
  m["max_batch"] = std::to_string(c.batch.max_batch);
  m["comm"] = to_string(c.comm.kind);
  m["comm_u"] = fmt_double(c.comm.u);
  m["topology"] = to_string(c.topology);
  m["graph_seed"] = std::to_string(c.graph_seed);
  m["max_iters"] = std::to_string(c.max_iters);
  m["seed"] = std::to_string(c.seed);
  m["replications"] = std::to_string(c.replications);
  m["budget"] = std::to_string(c.budget);
  m["metric"] = to_string(c.metric);
  m["inner_tol"] = fmt_double(c.inner.tol);
  m["inner_max_iters"] = std::to_string(c.inner.max_iters);
  m["inner_closed_form"] = c.inner.closed_form ? "true" : "false";
  m["oracle"] = to_string(c.oracle);
  m["oracle_tol"] = fmt_double(c.oracle_tol);
  std::string eps;
  for (std::size_t i = 0; i < c.eps.size(); ++i) eps += (i ? "," : "") + fmt_double(c.eps[i]);
  m["eps"] = eps;
  m["output_dir"] = c.output_dir;
  m["plot"] = c.plot ? "true" : "false";
  return m;
}

std::string format_config(const ExperimentConfig& c) {
  std::string out;
  for (const auto& [k, v] : config_entries(c)) out += k + " = " + v + "\n";
  return out;
}

nlohmann::json instance_to_json(const CournotInstance& inst) {
  auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  nlohmann::json j;
  j["variant"] = inst.quadratic() ? "quadratic" : "linear";
  j["n"] = inst.n;
  j["L"] = inst.L;
  j["seed"] = inst.seed;
  j["d"] = vec(inst.d);
  j["b"] = vec(inst.b);
  j["c"] = vec(inst.c);
  j["rho"] = vec(inst.rho);
  j["margin"] = vec(inst.margin);
  j["cap"] = inst.cap;
  j["price_noise_base"] = to_string(inst.price_noise_base);
  j["noise_scale"] = inst.noise_scale;
  nlohmann::json noise;
  std::vector<double> cost(inst.n);
  for (int i = 0; i < inst.n; ++i) cost[i] = inst.cost_half_width(i);
  noise["cost_half_widths"] = cost;
  noise["price_half_widths"] = vec(inst.price_half_widths());
  j["noise"] = noise;
  return j;
}

CournotInstance instance_from_json(const nlohmann::json& j) {
  auto vec = [](const nlohmann::json& a) {
    const auto v = a.get<std::vector<double>>();
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  try {
    CournotInstance inst;
    inst.n = j.at("n").get<int>();
    inst.L = j.at("L").get<int>();
    inst.seed = j.at("seed").get<std::uint64_t>();
    inst.d = vec(j.at("d"));
    inst.b = vec(j.at("b"));
    inst.c = vec(j.at("c"));
    inst.rho = vec(j.at("rho"));
    inst.margin = vec(j.at("margin"));
    inst.cap = j.at("cap").get<double>();
    inst.price_noise_base = parse_price_noise_base(j.at("price_noise_base").get<std::string>());
    inst.noise_scale = j.at("noise_scale").get<double>();
    const std::string variant = j.at("variant").get<std::string>();
    if ((variant == "quadratic") != inst.quadratic())
      throw ConfigError("instance variant does not match its rho vector");
    if (inst.n < 2 || inst.L < 1 || inst.d.size() != inst.L || inst.b.size() != inst.L ||
        inst.c.size() != inst.n || (inst.quadratic() && inst.rho.size() != inst.n))
      throw ConfigError("instance has inconsistent sizes");
    return inst;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed instance json: ") + e.what());
  }
}

}  // namespace vsnash
