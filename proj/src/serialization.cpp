#include "nrc/serialization.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "nrc/error.hpp"

namespace nrc {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw Error(ErrorKind::config, "field '" + path + "': " + msg);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) fail(join(path, k), "unknown field");
}

double get_number(const json& j, const std::string& key, const std::string& path, double fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number()) fail(join(path, key), "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(join(path, key), "not finite");
  return x;
}

std::optional<double> get_optional(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return get_number(j, key, path, 0.0);
}

std::size_t get_count(const json& j, const std::string& key, const std::string& path, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) fail(join(path, key), "expected a non-negative integer");
  return v.get<std::size_t>();
}

bool get_bool(const json& j, const std::string& key, const std::string& path, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) fail(join(path, key), "expected true or false");
  return j.at(key).get<bool>();
}

std::string get_string(const json& j, const std::string& key, const std::string& path, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) fail(join(path, key), "expected a string");
  return j.at(key).get<std::string>();
}

std::vector<double> get_vector(const json& j, const std::string& key, const std::string& path,
                               std::vector<double> fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_array()) fail(join(path, key), "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) fail(join(path, key) + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::complex<double> get_complex(const json& j, const std::string& key, const std::string& path,
                                 std::complex<double> fallback) {
  if (!j.contains(key)) return fallback;
  const auto v = get_vector(j, key, path, {});
  if (v.size() != 2) fail(join(path, key), "expected [re, im]");
  return {v[0], v[1]};
}

json axis_json(const ScanAxis& a) {
  return {{"name", a.name}, {"lo", a.lo}, {"hi", a.hi}, {"points", a.points}};
}

ScanAxis axis_from_json(const json& j, const std::string& path) {
  check_keys(j, path, {"name", "lo", "hi", "points"});
  ScanAxis a;
  a.name = get_string(j, "name", path, "");
  a.lo = get_number(j, "lo", path, 0.0);
  a.hi = get_number(j, "hi", path, 0.0);
  a.points = get_count(j, "points", path, 1);
  return a;
}

// Wrap library parse errors with the field path.
template <class F>
auto at_field(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::config && std::string(e.what()).find("field '") != std::string::npos) throw;
    fail(path, e.what());
  }
}

}  // namespace

// ---------------------------------------------------------------- protocols

std::string to_string(ProtocolKind k) {
  switch (k) {
    case ProtocolKind::tls_inversion: return "tls_inversion";
    case ProtocolKind::ho_coherent: return "ho_coherent";
    case ProtocolKind::ho_thermal: return "ho_thermal";
    case ProtocolKind::ho_constant_mu: return "ho_constant_mu";
  }
  return "?";
}

ProtocolKind protocol_kind_from_string(const std::string& s) {
  if (s == "tls_inversion") return ProtocolKind::tls_inversion;
  if (s == "ho_coherent") return ProtocolKind::ho_coherent;
  if (s == "ho_thermal") return ProtocolKind::ho_thermal;
  if (s == "ho_constant_mu") return ProtocolKind::ho_constant_mu;
  throw Error(ErrorKind::config, "unknown protocol kind '" + s + "'");
}

void validate(const ProtocolDoc& d) {
  if (!(d.t_f > 0.0)) throw Error(ErrorKind::config, "protocol t_f must be positive");
  if (d.kind == ProtocolKind::tls_inversion) {
    if (d.delta0 == 0.0) throw Error(ErrorKind::config, "delta0 must be nonzero");
    if (!d.r_extra.empty()) throw Error(ErrorKind::config, "two-level protocols take g_extra/b_extra, not r_extra");
    return;
  }
  if (!d.g_extra.empty() || !d.b_extra.empty())
    throw Error(ErrorKind::config, "oscillator protocols take r_extra only");
  if (!(d.omega0 > 0.0 && d.omega_f > 0.0 && d.mass > 0.0))
    throw Error(ErrorKind::config, "omega0, omega_f and mass must be positive");
  if (d.kind == ProtocolKind::ho_constant_mu && !d.r_extra.empty())
    throw Error(ErrorKind::config, "the constant-mu protocol has no free coefficients");
  if (d.kind == ProtocolKind::ho_thermal && d.nbar < 0.0) throw Error(ErrorKind::config, "nbar must be >= 0");
}

json to_json(const ProtocolDoc& d) {
  json j;
  j["kind"] = to_string(d.kind);
  j["t_f"] = d.t_f;
  if (d.kind == ProtocolKind::tls_inversion) {
    j["parameters"] = {{"delta0", d.delta0}, {"b0", d.b0}, {"bf", d.bf},
                       {"b_dot0", d.b_dot0 ? json(*d.b_dot0) : json(nullptr)},
                       {"b_dotf", d.b_dotf ? json(*d.b_dotf) : json(nullptr)}};
    j["coefficients"] = {{"g_extra", d.g_extra}, {"b_extra", d.b_extra}};
  } else {
    j["parameters"] = {{"omega0", d.omega0}, {"omega_f", d.omega_f}, {"mass", d.mass},
                       {"form", to_string(d.form)}, {"nbar", d.nbar},
                       {"alpha", {d.alpha.real(), d.alpha.imag()}}};
    j["coefficients"] = {{"r_extra", d.r_extra}};
  }
  return j;
}

ProtocolDoc protocol_from_json(const json& j) {
  const std::string path = "protocol";
  check_keys(j, path, {"kind", "t_f", "parameters", "coefficients"});
  ProtocolDoc d;
  d.kind = at_field(join(path, "kind"), [&] { return protocol_kind_from_string(get_string(j, "kind", path, "")); });
  d.t_f = get_number(j, "t_f", path, d.t_f);
  const json empty = json::object();
  const json& par = j.contains("parameters") ? j.at("parameters") : empty;
  const json& co = j.contains("coefficients") ? j.at("coefficients") : empty;
  const std::string pp = join(path, "parameters"), cp = join(path, "coefficients");
  if (d.kind == ProtocolKind::tls_inversion) {
    check_keys(par, pp, {"delta0", "b0", "bf", "b_dot0", "b_dotf"});
    check_keys(co, cp, {"g_extra", "b_extra"});
    d.delta0 = get_number(par, "delta0", pp, d.delta0);
    d.b0 = get_number(par, "b0", pp, d.b0);
    d.bf = get_number(par, "bf", pp, d.bf);
    d.b_dot0 = get_optional(par, "b_dot0", pp);
    d.b_dotf = get_optional(par, "b_dotf", pp);
    d.g_extra = get_vector(co, "g_extra", cp, {});
    d.b_extra = get_vector(co, "b_extra", cp, {});
  } else {
    check_keys(par, pp, {"omega0", "omega_f", "mass", "form", "nbar", "alpha"});
    check_keys(co, cp, {"r_extra"});
    d.omega0 = get_number(par, "omega0", pp, 0.0);
    d.omega_f = get_number(par, "omega_f", pp, 0.0);
    d.mass = get_number(par, "mass", pp, d.mass);
    d.form = at_field(join(pp, "form"),
                      [&] { return rho_form_from_string(get_string(par, "form", pp, to_string(d.form))); });
    d.nbar = get_number(par, "nbar", pp, 0.0);
    d.alpha = get_complex(par, "alpha", pp, {0.0, 0.0});
    d.r_extra = get_vector(co, "r_extra", cp, {});
  }
  at_field(path, [&] { validate(d); return 0; });
  return d;
}

TlsProtocol build_tls(const ProtocolDoc& d, std::size_t grid) {
  if (d.kind != ProtocolKind::tls_inversion) throw Error(ErrorKind::config, "not a two-level protocol");
  BSpec b;
  b.b0 = d.b0;
  b.bf = d.bf;
  b.b_dot0 = d.b_dot0;
  b.b_dotf = d.b_dotf;
  b.extra = d.b_extra;
  return make_tls_protocol(d.delta0, d.t_f, d.g_extra, b, grid);
}

HoProtocol build_ho(const ProtocolDoc& d, std::size_t grid) {
  if (d.kind != ProtocolKind::ho_coherent && d.kind != ProtocolKind::ho_thermal)
    throw Error(ErrorKind::config, "not a polynomial oscillator protocol");
  HoFamily f{d.omega0, d.omega_f, d.mass, d.t_f, d.form, grid};
  return make_ho_protocol(f, d.r_extra);
}

ConstantMuProtocol build_constant_mu(const ProtocolDoc& d) {
  if (d.kind != ProtocolKind::ho_constant_mu) throw Error(ErrorKind::config, "not a constant-mu protocol");
  return make_constant_mu_protocol(d.omega0, d.omega_f, d.t_f);
}

TrapSchedule build_trap(const ProtocolDoc& d, std::size_t grid) {
  if (d.kind == ProtocolKind::ho_constant_mu) return trap_schedule(build_constant_mu(d), d.mass);
  return trap_schedule(build_ho(d, grid));
}

// ---------------------------------------------------------------- experiments

std::string to_string(ExperimentId e) {
  switch (e) {
    case ExperimentId::tls_single: return "tls_single";
    case ExperimentId::tls_dual: return "tls_dual";
    case ExperimentId::ho_coherent: return "ho_coherent";
    case ExperimentId::ho_thermal: return "ho_thermal";
    case ExperimentId::custom: return "custom";
  }
  return "?";
}

ExperimentId experiment_from_string(const std::string& s) {
  if (s == "tls_single") return ExperimentId::tls_single;
  if (s == "tls_dual") return ExperimentId::tls_dual;
  if (s == "ho_coherent") return ExperimentId::ho_coherent;
  if (s == "ho_thermal") return ExperimentId::ho_thermal;
  if (s == "custom") return ExperimentId::custom;
  throw Error(ErrorKind::config, "unknown experiment '" + s + "'");
}

std::string expected_unit(NoiseOperator op) {
  switch (op) {
    case NoiseOperator::sigma_z:
    case NoiseOperator::sigma_x: return "kHz";
    case NoiseOperator::q: return "Hz/A^2";
    case NoiseOperator::q_squared: return "Hz/A^4";
  }
  return "?";
}

NoiseChannel to_channel(const ChannelConfig& c) {
  if (c.unit != expected_unit(c.op))
    throw Error(ErrorKind::config, "channel " + to_string(c.op) + " expects unit " + expected_unit(c.op) +
                                       ", got '" + c.unit + "'");
  if (!(c.eta >= 0.0)) throw Error(ErrorKind::config, "noise strength must be >= 0");
  return {c.op, is_pauli(c.op) ? c.eta : units::hz_to_per_us(c.eta)};
}

ExperimentConfig default_config(ExperimentId e) {
  ExperimentConfig c;
  c.experiment = e;
  switch (e) {
    case ExperimentId::tls_single:
      c.t_f = 0.5;
      c.channels = {{NoiseOperator::sigma_z, 0.25, "kHz"}};
      c.axes = {{"g4", -9.0, 9.0, 41}};
      break;
    case ExperimentId::tls_dual:
      c.t_f = 0.5;
      c.channels = {{NoiseOperator::sigma_z, 0.0625, "kHz"}, {NoiseOperator::sigma_x, 0.125, "kHz"}};
      c.axes = {{"g4", -9.0, 9.0, 21}, {"b4", -18.0, 30.0, 21}};
      break;
    case ExperimentId::ho_coherent:
      c.nu0_mhz = 15.92;
      c.t_f = 100.0;
      c.rho_form = "inverse_sqrt_poly";
      c.channels = {{NoiseOperator::q, 10.0, "Hz/A^2"}};
      c.axes = {{"r6", -20.0, 30.0, 26}};
      break;
    case ExperimentId::ho_thermal:
      c.nu0_mhz = 2.53;
      c.t_f = 10.0;
      c.rho_form = "sqrt_poly";
      c.channels = {{NoiseOperator::q_squared, 0.0527, "Hz/A^4"}};
      c.t_f_list = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0};
      break;
    case ExperimentId::custom:
      c.channels = {{NoiseOperator::sigma_z, 0.25, "kHz"}};
      break;
  }
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = to_string(c.experiment);
  j["physics"] = {{"delta0_khz", c.delta0_khz}, {"nu0_mhz", c.nu0_mhz},     {"omega_ratio", c.omega_ratio},
                  {"mass_u", c.mass_u},         {"rho_form", c.rho_form},   {"alpha", {c.alpha_re, c.alpha_im}},
                  {"g_target_us", c.g_target_us}, {"nbar", c.nbar},         {"T0_mK", c.T0_mK},
                  {"t_f", c.t_f},               {"t_f_list", c.t_f_list}};
  json ch = json::array();
  for (const auto& x : c.channels) ch.push_back({{"op", to_string(x.op)}, {"eta", x.eta}, {"unit", x.unit}});
  j["channels"] = ch;
  json axes = json::array();
  for (const auto& a : c.axes) axes.push_back(axis_json(a));
  j["scan"] = {{"axes", axes}, {"improved_axis", axis_json(c.improved_axis)}, {"optimize", c.optimize}};
  if (c.protocol) j["protocol"] = to_json(*c.protocol);
  j["output"] = {{"dir", c.out_dir}, {"traces", c.traces}};
  j["numerics"] = {{"grid", c.grid},
                   {"tol", c.tol},
                   {"fock_dim", c.fock_dim == 0 ? json("auto") : json(c.fock_dim)},
                   {"fock_uhlmann", c.fock_uhlmann},
                   {"workers", c.workers}};
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  check_keys(j, "", {"experiment", "physics", "channels", "scan", "protocol", "output", "numerics"});
  if (!j.contains("experiment")) fail("experiment", "required");
  const auto id = at_field("experiment", [&] { return experiment_from_string(get_string(j, "experiment", "", "")); });
  ExperimentConfig c = default_config(id);
  const json empty = json::object();

  const json& ph = j.contains("physics") ? j.at("physics") : empty;
  check_keys(ph, "physics", {"delta0_khz", "nu0_mhz", "omega_ratio", "mass_u", "rho_form", "alpha", "g_target_us",
                             "nbar", "T0_mK", "t_f", "t_f_list"});
  c.delta0_khz = get_number(ph, "delta0_khz", "physics", c.delta0_khz);
  c.nu0_mhz = get_number(ph, "nu0_mhz", "physics", c.nu0_mhz);
  c.omega_ratio = get_number(ph, "omega_ratio", "physics", c.omega_ratio);
  c.mass_u = get_number(ph, "mass_u", "physics", c.mass_u);
  c.rho_form = get_string(ph, "rho_form", "physics", c.rho_form);
  const auto a = get_complex(ph, "alpha", "physics", {c.alpha_re, c.alpha_im});
  c.alpha_re = a.real();
  c.alpha_im = a.imag();
  c.g_target_us = get_number(ph, "g_target_us", "physics", c.g_target_us);
  c.nbar = get_number(ph, "nbar", "physics", c.nbar);
  c.T0_mK = get_number(ph, "T0_mK", "physics", c.T0_mK);
  c.t_f = get_number(ph, "t_f", "physics", c.t_f);
  c.t_f_list = get_vector(ph, "t_f_list", "physics", c.t_f_list);

  if (j.contains("channels")) {
    const auto& ch = j.at("channels");
    if (!ch.is_array()) fail("channels", "expected an array");
    c.channels.clear();
    for (std::size_t i = 0; i < ch.size(); ++i) {
      const std::string p = "channels[" + std::to_string(i) + "]";
      check_keys(ch[i], p, {"op", "eta", "unit"});
      ChannelConfig cc;
      cc.op = at_field(p + ".op", [&] { return noise_operator_from_string(get_string(ch[i], "op", p, "")); });
      if (!ch[i].contains("eta")) fail(p + ".eta", "required");
      cc.eta = get_number(ch[i], "eta", p, 0.0);
      cc.unit = get_string(ch[i], "unit", p, expected_unit(cc.op));
      c.channels.push_back(cc);
    }
  }

  if (j.contains("scan")) {
    const auto& sc = j.at("scan");
    check_keys(sc, "scan", {"axes", "improved_axis", "optimize"});
    if (sc.contains("axes")) {
      if (!sc.at("axes").is_array()) fail("scan.axes", "expected an array");
      c.axes.clear();
      for (std::size_t i = 0; i < sc.at("axes").size(); ++i)
        c.axes.push_back(axis_from_json(sc.at("axes")[i], "scan.axes[" + std::to_string(i) + "]"));
    }
    if (sc.contains("improved_axis")) c.improved_axis = axis_from_json(sc.at("improved_axis"), "scan.improved_axis");
    c.optimize = get_bool(sc, "optimize", "scan", c.optimize);
  }

  if (j.contains("protocol")) c.protocol = protocol_from_json(j.at("protocol"));

  const json& out = j.contains("output") ? j.at("output") : empty;
  check_keys(out, "output", {"dir", "traces"});
  c.out_dir = get_string(out, "dir", "output", c.out_dir);
  c.traces = get_bool(out, "traces", "output", c.traces);

  const json& nu = j.contains("numerics") ? j.at("numerics") : empty;
  check_keys(nu, "numerics", {"grid", "tol", "fock_dim", "fock_uhlmann", "workers"});
  c.grid = get_count(nu, "grid", "numerics", c.grid);
  c.tol = get_number(nu, "tol", "numerics", c.tol);
  if (nu.contains("fock_dim")) {
    const auto& fd = nu.at("fock_dim");
    if (fd.is_string() && fd.get<std::string>() == "auto") c.fock_dim = 0;
    else c.fock_dim = get_count(nu, "fock_dim", "numerics", 0);
  }
  c.fock_uhlmann = get_bool(nu, "fock_uhlmann", "numerics", c.fock_uhlmann);
  c.workers = get_count(nu, "workers", "numerics", c.workers);

  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config, "cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    std::ostringstream os;
    os << path << ": JSON parse error at byte " << e.byte << ": " << e.what();
    throw Error(ErrorKind::config, os.str());
  }
  return config_from_json(j);
}

void validate(const ExperimentConfig& c) {
  auto need_positive = [](double x, const char* field) {
    if (!(x > 0.0)) fail(field, "must be positive");
  };
  if (c.grid < 3) fail("numerics.grid", "needs at least 3 points");
  if (!(c.tol > 0.0 && c.tol < 1.0)) fail("numerics.tol", "must lie in (0, 1)");
  if (c.fock_dim == 1) fail("numerics.fock_dim", "needs at least 2 levels");
  for (std::size_t i = 0; i < c.channels.size(); ++i) {
    const auto& ch = c.channels[i];
    const std::string p = "channels[" + std::to_string(i) + "]";
    if (ch.unit != expected_unit(ch.op)) fail(p + ".unit", "operator " + to_string(ch.op) + " expects " + expected_unit(ch.op));
    if (!(ch.eta >= 0.0)) fail(p + ".eta", "must be >= 0");
  }
  for (std::size_t i = 0; i < c.axes.size(); ++i) {
    const auto& a = c.axes[i];
    const std::string p = "scan.axes[" + std::to_string(i) + "]";
    if (a.points == 0) fail(p + ".points", "must be at least 1");
    if (a.name.empty()) fail(p + ".name", "required");
  }
  const bool tls = c.experiment == ExperimentId::tls_single || c.experiment == ExperimentId::tls_dual;
  const bool ho = c.experiment == ExperimentId::ho_coherent || c.experiment == ExperimentId::ho_thermal;
  for (std::size_t i = 0; i < c.channels.size(); ++i) {
    const std::string p = "channels[" + std::to_string(i) + "].op";
    if (tls && !is_pauli(c.channels[i].op)) fail(p, "two-level experiments take sigma_z / sigma_x");
    if (ho && is_pauli(c.channels[i].op)) fail(p, "oscillator experiments take q / q2");
  }
  if (tls) {
    need_positive(c.t_f, "physics.t_f");
    if (c.delta0_khz == 0.0) fail("physics.delta0_khz", "must be nonzero");
  }
  if (ho) {
    need_positive(c.nu0_mhz, "physics.nu0_mhz");
    need_positive(c.omega_ratio, "physics.omega_ratio");
    need_positive(c.mass_u, "physics.mass_u");
    at_field("physics.rho_form", [&] { return rho_form_from_string(c.rho_form); });
  }
  switch (c.experiment) {
    case ExperimentId::tls_single:
      if (c.channels.empty()) fail("channels", "needs at least one channel");
      if (c.axes.size() > 1) fail("scan.axes", "single-noise scans take at most one axis (g4)");
      break;
    case ExperimentId::tls_dual:
      if (c.axes.size() != 2) fail("scan.axes", "dual-noise scans take two axes (G extra, B extra)");
      break;
    case ExperimentId::ho_coherent:
      need_positive(c.t_f, "physics.t_f");
      need_positive(c.g_target_us, "physics.g_target_us");
      if (c.axes.size() > 1) fail("scan.axes", "coherent scans take at most one axis (r6)");
      break;
    case ExperimentId::ho_thermal:
      if (c.t_f_list.empty()) fail("physics.t_f_list", "required for thermal sweeps");
      for (double t : c.t_f_list)
        if (!(t > 0.0)) fail("physics.t_f_list", "entries must be positive");
      if (c.nbar < 0.0) fail("physics.nbar", "must be >= 0");
      if (c.improved_axis.points == 0) fail("scan.improved_axis.points", "must be at least 1");
      break;
    case ExperimentId::custom:
      if (!c.protocol) fail("protocol", "required for custom runs");
      break;
  }
}

std::uint64_t config_hash(const ExperimentConfig& c) {
  json j = to_json(c);
  // output location and thread count do not change results
  j["output"].erase("dir");
  j["numerics"].erase("workers");
  const std::string s = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ProtocolDoc default_protocol(const ExperimentConfig& c) {
  if (c.protocol) return *c.protocol;
  ProtocolDoc d;
  d.t_f = c.t_f;
  switch (c.experiment) {
    case ExperimentId::tls_single:
    case ExperimentId::tls_dual:
    case ExperimentId::custom:
      d.kind = ProtocolKind::tls_inversion;
      d.delta0 = c.delta0_khz;
      break;
    case ExperimentId::ho_coherent:
    case ExperimentId::ho_thermal:
      d.kind = c.experiment == ExperimentId::ho_coherent ? ProtocolKind::ho_coherent : ProtocolKind::ho_thermal;
      d.omega0 = units::mhz_to_angular(c.nu0_mhz);
      d.omega_f = c.omega_ratio * d.omega0;
      d.mass = c.mass_u * units::atomic_mass_si * units::kg_to_oscillator_mass;
      d.form = rho_form_from_string(c.rho_form);
      d.nbar = c.nbar;
      d.alpha = {c.alpha_re, c.alpha_im};
      break;
  }
  return d;
}

OdeOptions ode_options(const ExperimentConfig& c) {
  OdeOptions o;
  o.rtol = c.tol;
  o.atol = c.tol * 1e-3;
  return o;
}

}  // namespace nrc
