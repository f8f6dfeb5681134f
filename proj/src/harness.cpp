#include "nrc/harness.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "nrc/error.hpp"
#include "nrc/fock.hpp"
#include "nrc/measures.hpp"
#include "nrc/quadrature.hpp"
#include "nrc/states.hpp"

namespace nrc {

using nlohmann::json;

namespace {

constexpr std::size_t trace_points = 401;
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

std::vector<NoiseChannel> channels_of(const ExperimentConfig& c) {
  std::vector<NoiseChannel> out;
  for (const auto& ch : c.channels) out.push_back(to_channel(ch));
  return out;
}

double strength(std::span<const NoiseChannel> chs, NoiseOperator op) {
  double s = 0.0;
  for (const auto& ch : chs)
    if (ch.op == op) s += ch.eta;
  return s;
}

double tls_fidelity(const TlsProtocol& p, std::span<const NoiseChannel> chs, const OdeOptions& opt) {
  const auto r = simulate_tls(p, chs, opt);
  return std::sqrt(std::max(0.0, r.final_state(1, 1).real()));  // pure target |1>
}

HoFamily family_of(const ProtocolDoc& d, std::size_t grid) {
  return {d.omega0, d.omega_f, d.mass, d.t_f, d.form, grid};
}

// Signed trap frequency: sqrt(omega^2), negative for an inverted trap.
double signed_omega(double w2) { return w2 >= 0.0 ? std::sqrt(w2) : -std::sqrt(-w2); }

struct OscillatorRun {
  GaussianMoments final_moments;
  double power = 0.0;
};

OscillatorRun run_moments(const GaussianMoments& m0, const TrapSchedule& trap,
                          std::span<const NoiseChannel> chs, const OdeOptions& opt) {
  const auto times = quad::uniform_grid(0.0, trap.t_f, trace_points);
  const auto tr = integrate_moments(m0, trap, chs, times, opt);
  std::vector<double> q2(tr.moments.size());
  for (std::size_t i = 0; i < q2.size(); ++i) q2[i] = tr.moments[i].q2();
  return {tr.final_moments, average_power(tr.times, q2, trap.omega2_dot, trap.mass)};
}

FockOptions fock_options(const ExperimentConfig& c) {
  FockOptions f;
  f.d = c.fock_dim;
  f.ode = ode_options(c);
  return f;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void sort_rows(Table& t, std::size_t col) {
  std::stable_sort(t.rows.begin(), t.rows.end(),
                   [col](const auto& a, const auto& b) { return a[col] < b[col]; });
}

json axis_summary(const std::vector<ScanAxis>& axes) {
  json a = json::array();
  for (const auto& x : axes) a.push_back({{"name", x.name}, {"lo", x.lo}, {"hi", x.hi}, {"points", x.points}});
  return a;
}

}  // namespace

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i].name == name) return i;
  throw Error(ErrorKind::invalid_argument, "no column '" + name + "' in " + file);
}

std::vector<double> Table::values(const std::string& name) const {
  const std::size_t k = column(name);
  std::vector<double> v;
  v.reserve(rows.size());
  for (const auto& r : rows) v.push_back(r[k]);
  return v;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error(ErrorKind::dimension_mismatch, "spearman needs equal lengths");
  if (x.size() < 2) throw Error(ErrorKind::invalid_argument, "spearman needs at least two samples");
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

// ---------------------------------------------------------------- two-level

RunOutput run_tls_single(const ExperimentConfig& c) {
  const auto chs = channels_of(c);
  const double ez = strength(chs, NoiseOperator::sigma_z), ex = strength(chs, NoiseOperator::sigma_x);
  const ProtocolDoc base = default_protocol(c);
  const OdeOptions opt = ode_options(c);

  auto build = [&](std::span<const double> g) {
    ProtocolDoc d = base;
    d.g_extra.assign(g.begin(), g.end());
    return build_tls(d, c.grid);
  };
  const auto rows = scan(c.axes, [&](std::span<const double> g) {
    const auto p = build(g);
    const auto m = tls_measures(p, ez, ex, c.grid);
    return std::vector<double>{m.O[0], m.A[0], m.O[1], m.O_bar, tls_fidelity(p, chs, opt)};
  }, c.workers);

  RunOutput out;
  Table t;
  t.file = "tls_single_scan.csv";
  const std::string axis = c.axes.empty() ? "g4" : c.axes[0].name;
  t.columns = {{axis, "1", "free coefficient of s^4 in G(s), s = t/t_f"},
               {"O_z", "1", "overlap measure against sigma_z"},
               {"A_z", "1", "commutator measure against sigma_z"},
               {"O_x", "1", "overlap measure against sigma_x"},
               {"O_bar", "1", "strength-weighted overlap measure"},
               {"fidelity", "1", "Uhlmann fidelity of the final state with |1><1|"}};
  for (const auto& r : rows) {
    if (!r.ok()) {
      out.warnings.push_back("cell " + std::to_string(r.index) + " skipped: " + r.error);
      continue;
    }
    std::vector<double> row{r.coeffs.empty() ? 0.0 : r.coeffs[0]};
    row.insert(row.end(), r.values.begin(), r.values.end());
    t.rows.push_back(std::move(row));
  }
  sort_rows(t, t.column("O_z"));

  json s;
  s["experiment"] = "tls_single";
  s["rows"] = t.rows.size();
  s["axes"] = axis_summary(c.axes);
  if (!t.rows.empty()) {
    const auto F = t.values("fidelity");
    const auto best = static_cast<std::size_t>(std::max_element(F.begin(), F.end()) - F.begin());
    s["max_fidelity"] = F[best];
    s["argmax_coefficient"] = t.rows[best][0];
    s["min_O_z"] = t.rows.front()[t.column("O_z")];
    if (t.rows.size() > 1) {
      s["spearman_O_z_fidelity"] = spearman(t.values("O_z"), F);
      s["spearman_A_z_fidelity"] = spearman(t.values("A_z"), F);
      s["spearman_O_z_A_z"] = spearman(t.values("O_z"), t.values("A_z"));
    }
    if (c.optimize && !c.axes.empty()) {
      // descend O_z from the best scan cell; infeasible shapes count as +inf
      const Objective f = [&](std::span<const double> g) {
        try {
          const auto p = build(g);
          return tls_measures(p, ez, ex, c.grid).O[0];
        } catch (const Error&) {
          return std::numeric_limits<double>::infinity();
        }
      };
      const auto r = minimize(f, std::vector<double>{t.rows.front()[0]});
      const auto p = build(r.x);
      s["optimized"] = {{"coefficient", r.x[0]}, {"O_z", r.value}, {"start_O_z", r.initial_value},
                        {"iterations", r.iterations}, {"converged", r.converged},
                        {"fidelity", tls_fidelity(p, chs, opt)}};
    }
  }
  out.summary = s;
  out.tables.push_back(std::move(t));
  return out;
}

RunOutput run_tls_dual(const ExperimentConfig& c) {
  const auto chs = channels_of(c);
  const double ez = strength(chs, NoiseOperator::sigma_z), ex = strength(chs, NoiseOperator::sigma_x);
  const ProtocolDoc base = default_protocol(c);
  const OdeOptions opt = ode_options(c);
  const std::size_t n1 = c.axes[1].points;

  const auto rows = scan(c.axes, [&](std::span<const double> x) {
    ProtocolDoc d = base;
    d.g_extra = {x[0]};
    d.b_extra = {x[1]};
    const auto p = build_tls(d, c.grid);
    const auto m = tls_measures(p, ez, ex, c.grid);
    return std::vector<double>{m.O[0], m.O[1], m.O_bar, m.A[0], m.A[1], m.A_bar, tls_fidelity(p, chs, opt)};
  }, c.workers);

  RunOutput out;
  Table t;
  t.file = "tls_dual_scan.csv";
  t.columns = {{"i", "1", "grid index along the G axis"},
               {"j", "1", "grid index along the B axis"},
               {c.axes[0].name, "1", "free coefficient of s^4 in G(s)"},
               {c.axes[1].name, "1", "free coefficient of s^4 in B(s)"},
               {"O_z", "1", "overlap measure against sigma_z"},
               {"O_x", "1", "overlap measure against sigma_x"},
               {"O_bar", "1", "strength-weighted overlap measure"},
               {"A_z", "1", "commutator measure against sigma_z"},
               {"A_x", "1", "commutator measure against sigma_x"},
               {"A_bar", "1", "strength-weighted commutator measure"},
               {"fidelity", "1", "Uhlmann fidelity with |1><1| under both channels"}};
  for (const auto& r : rows) {
    if (!r.ok()) {
      out.warnings.push_back("cell " + std::to_string(r.index) + " skipped: " + r.error);
      continue;
    }
    std::vector<double> row{static_cast<double>(r.index / n1), static_cast<double>(r.index % n1), r.coeffs[0],
                            r.coeffs[1]};
    row.insert(row.end(), r.values.begin(), r.values.end());
    t.rows.push_back(std::move(row));
  }

  json s;
  s["experiment"] = "tls_dual";
  s["rows"] = t.rows.size();
  s["axes"] = axis_summary(c.axes);
  s["eta_z"] = ez;
  s["eta_x"] = ex;
  if (!t.rows.empty() && ez + ex > 0.0) {
    const std::size_t ci = t.column("i"), cj = t.column("j"), co = t.column("O_bar"), cf = t.column("fidelity");
    std::size_t bf = 0, bo = 0;
    for (std::size_t k = 1; k < t.rows.size(); ++k) {
      if (t.rows[k][cf] > t.rows[bf][cf]) bf = k;
      if (t.rows[k][co] < t.rows[bo][co]) bo = k;
    }
    // ties (mirror-symmetric cells) count as the same extremum
    auto tied = [&](std::size_t col, std::size_t ref) {
      std::vector<std::size_t> v;
      for (std::size_t k = 0; k < t.rows.size(); ++k)
        if (std::abs(t.rows[k][col] - t.rows[ref][col]) <= 1e-9 * std::abs(t.rows[ref][col])) v.push_back(k);
      return v;
    };
    const auto fset = tied(cf, bf), oset = tied(co, bo);
    double dist = std::numeric_limits<double>::infinity();
    for (auto a : fset)
      for (auto b : oset)
        dist = std::min(dist, std::max(std::abs(t.rows[a][ci] - t.rows[b][ci]), std::abs(t.rows[a][cj] - t.rows[b][cj])));
    // O_bar step to the neighbouring cells of the minimum
    double resolution = 0.0;
    for (const auto& r : t.rows)
      if (std::max(std::abs(r[ci] - t.rows[bo][ci]), std::abs(r[cj] - t.rows[bo][cj])) == 1.0)
        resolution = std::max(resolution, std::abs(r[co] - t.rows[bo][co]));
    const double wmin = std::min(ez, ex) / (ez + ex);
    s["argmax_fidelity"] = {{"i", t.rows[bf][ci]}, {"j", t.rows[bf][cj]}, {"fidelity", t.rows[bf][cf]},
                            {"O_bar", t.rows[bf][co]}, {"O_z", t.rows[bf][t.column("O_z")]},
                            {"O_x", t.rows[bf][t.column("O_x")]}};
    s["argmin_O_bar"] = {{"i", t.rows[bo][ci]}, {"j", t.rows[bo][cj]}, {"fidelity", t.rows[bo][cf]},
                         {"O_bar", t.rows[bo][co]}};
    s["cell_distance"] = dist;
    s["O_bar_resolution"] = resolution;
    s["O_bar_gap"] = t.rows[bf][co] - t.rows[bo][co];
    s["O_bar_bound"] = overlap_bound(2) * wmin;
    s["coincide"] = t.rows[bf][co] - t.rows[bo][co] <= resolution;
  }
  out.summary = s;
  out.tables.push_back(std::move(t));
  return out;
}

// ---------------------------------------------------------------- oscillator

RunOutput run_ho_coherent(const ExperimentConfig& c) {
  const auto chs = channels_of(c);
  const ProtocolDoc base = default_protocol(c);
  const HoFamily fam = family_of(base, c.grid);
  const OdeOptions opt = ode_options(c);
  const auto m0 = coherent_moments(base.alpha, base.omega0, base.mass);
  const double g_target = c.g_target_us;

  struct Cell {
    double r6 = 0.0, r7 = 0.0, g = 0.0, S0 = 0.0, F = 0.0, F_fock = nan, min_rho = 0.0;
    std::size_t d = 0;
    bool ok = false;
    std::string error;
  };
  const auto points = scan_points(c.axes);
  std::vector<Cell> cells(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    Cell& cell = cells[i];
    cell.r6 = points[i].empty() ? 0.0 : points[i][0];
    try {
      const double fixed[1] = {cell.r6};
      const auto p = constrain_g_phase(fam, g_target, fixed);
      const auto target = target_coherent(base.alpha, p.g(), base.omega0, base.omega_f, base.mass);
      const auto trap = trap_schedule(p);
      cell.r7 = p.free_coefficients().at(1);
      cell.g = p.g();
      cell.S0 = ho_overlap_Sn(p, 0);
      cell.min_rho = p.min_rho();
      const double tf[1] = {p.t_f()};
      cell.F = gaussian_fidelity(integrate_moments(m0, trap, chs, tf, opt).final_moments, target.moments);
      if (c.fock_uhlmann) {
        const auto fr = integrate_fock(coherent_initial(base.alpha), std::norm(base.alpha), trap, protocol_frame(p),
                                       chs, fock_options(c));
        cell.F_fock = uhlmann_fidelity(fr.rho, fock_target(target.moments, fr, base.mass, base.omega0));
        cell.d = fr.d;
      }
      cell.ok = true;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::no_root && e.kind() != ErrorKind::non_positive_rho) throw;
      cell.error = e.what();
    }
  }, c.workers);

  RunOutput out;
  Table t;
  t.file = "ho_coherent_scan.csv";
  t.columns = {{"r6", "1", "free coefficient of s^6 in P(s), rho = P^(-1/2)"},
               {"r7", "1", "coefficient of s^7 solved for the g-phase"},
               {"g", "us", "phase integral int dt / rho^2"},
               {"S0", "A^(1/2)", "overlap measure S_0"},
               {"S0_norm", "1", "S_0 divided by the largest S_0 of the scan"},
               {"fidelity", "1", "Gaussian fidelity with the coherent target"},
               {"fidelity_fock", "1", "Fock-basis Uhlmann fidelity (nan when not requested)"},
               {"min_rho", "1", "smallest scaling factor on the grid"}};
  double s0max = 0.0;
  for (const auto& cell : cells)
    if (cell.ok) s0max = std::max(s0max, cell.S0);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& cell = cells[i];
    if (!cell.ok) {
      out.warnings.push_back("r6 = " + format_double(cell.r6) + " skipped: " + cell.error);
      continue;
    }
    t.rows.push_back({cell.r6, cell.r7, cell.g, cell.S0, cell.S0 / s0max, cell.F, cell.F_fock, cell.min_rho});
    t.fock_dim = std::max(t.fock_dim, cell.d);
  }

  json s;
  s["experiment"] = "ho_coherent";
  s["rows"] = t.rows.size();
  s["axes"] = axis_summary(c.axes);
  s["g_target_us"] = g_target;
  if (!t.rows.empty()) {
    const auto F = t.values("fidelity");
    const auto best = static_cast<std::size_t>(std::max_element(F.begin(), F.end()) - F.begin());
    const auto worst = static_cast<std::size_t>(std::min_element(F.begin(), F.end()) - F.begin());
    s["best"] = {{"r6", t.rows[best][0]}, {"fidelity", F[best]}, {"S0_norm", t.rows[best][4]}};
    s["worst"] = {{"r6", t.rows[worst][0]}, {"fidelity", F[worst]}, {"S0_norm", t.rows[worst][4]}};
    if (t.rows.size() > 1) s["spearman_S0_fidelity"] = spearman(t.values("S0_norm"), F);
    if (c.optimize) {
      const auto S0 = t.values("S0");
      const double r6_start = t.rows[static_cast<std::size_t>(std::min_element(S0.begin(), S0.end()) - S0.begin())][0];
      const auto r = constrained_minimize([](const HoProtocol& p) { return ho_overlap_Sn(p, 0); }, fam, g_target,
                                          r6_start);
      const auto target = target_coherent(base.alpha, r.protocol.g(), base.omega0, base.omega_f, base.mass);
      const double tf[1] = {r.protocol.t_f()};
      const auto fm = integrate_moments(m0, trap_schedule(r.protocol), chs, tf, opt).final_moments;
      s["optimized"] = {{"r6", r.protocol.free_coefficients().at(0)}, {"r7", r.protocol.free_coefficients().at(1)},
                        {"S0", r.value}, {"start_S0", r.initial_value}, {"iterations", r.iterations},
                        {"fidelity", gaussian_fidelity(fm, target.moments)}};
    }
    if (c.traces) {
      Table tr;
      tr.file = "ho_coherent_omega_trace.csv";
      tr.columns = {{"t", "us", "time"},
                    {"omega_best", "rad/us", "trap frequency of the highest-fidelity row (negative: inverted)"},
                    {"omega_worst", "rad/us", "trap frequency of the lowest-fidelity row"},
                    {"omega_standard", "rad/us", "trap frequency of the r6 = 0 protocol"}};
      auto proto = [&](double r6) {
        const double fixed[1] = {r6};
        return constrain_g_phase(fam, g_target, fixed);
      };
      const auto pb = proto(t.rows[best][0]), pw = proto(t.rows[worst][0]), ps = proto(0.0);
      for (double time : quad::uniform_grid(0.0, fam.t_f, trace_points))
        tr.rows.push_back({time, signed_omega(pb.omega2(time)), signed_omega(pw.omega2(time)),
                           signed_omega(ps.omega2(time))});
      out.tables.push_back(std::move(t));
      out.tables.push_back(std::move(tr));
      out.summary = s;
      return out;
    }
  }
  out.summary = s;
  out.tables.push_back(std::move(t));
  return out;
}

RunOutput run_ho_thermal(const ExperimentConfig& c) {
  const auto chs = channels_of(c);
  const ProtocolDoc base = default_protocol(c);
  const OdeOptions opt = ode_options(c);
  const auto m0 = thermal_moments(c.nbar, base.omega0, base.mass);
  const auto target = thermal_moments(c.nbar, base.omega_f, base.mass);
  const bool fock = c.fock_uhlmann;

  // r6 candidates: the improved axis plus the standard protocol itself
  auto candidates = scan_points(std::span<const ScanAxis>(&c.improved_axis, 1));
  candidates.push_back({0.0});

  struct Row {
    double tf = 0.0;
    double F[3] = {0, 0, 0};
    double P[3] = {0, 0, 0};
    double Ff[3] = {nan, nan, nan};
    double r6 = 0.0, S0_std = 0.0, S0_imp = 0.0;
    std::size_t d = 0;
  };
  std::vector<Row> rows(c.t_f_list.size());
  parallel_for(rows.size(), [&](std::size_t i) {
    Row& row = rows[i];
    row.tf = c.t_f_list[i];
    HoFamily fam = family_of(base, c.grid);
    fam.t_f = row.tf;
    const auto standard = make_ho_protocol(fam, {});
    row.S0_std = ho_overlap_Sn(standard, 0);

    // improved: smallest S0 among physical (non-inverted) candidates
    std::optional<HoProtocol> improved;
    for (const auto& x : candidates) {
      try {
        auto p = make_ho_protocol(fam, x);
        if (p.inverted_trap()) continue;
        const double s0 = ho_overlap_Sn(p, 0);
        if (!improved || s0 < row.S0_imp) {
          row.S0_imp = s0;
          row.r6 = x[0];
          improved = std::move(p);
        }
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::non_positive_rho && e.kind() != ErrorKind::singular_interpolation) throw;
      }
    }
    if (!improved) improved = standard;  // r6 = 0 is always a candidate

    const TrapSchedule traps[3] = {
        trap_schedule(make_constant_mu_protocol(base.omega0, base.omega_f, row.tf), base.mass),
        trap_schedule(standard), trap_schedule(*improved)};
    const ScalingFrame frames[3] = {lab_frame(), protocol_frame(standard), protocol_frame(*improved)};
    for (int k = 0; k < 3; ++k) {
      const auto r = run_moments(m0, traps[k], chs, opt);
      row.F[k] = gaussian_fidelity(r.final_moments, target);
      row.P[k] = r.power;
      if (fock) {
        const auto fr = integrate_fock(thermal_initial(c.nbar), c.nbar, traps[k], frames[k], chs, fock_options(c));
        row.Ff[k] = uhlmann_fidelity(fr.rho, fock_target(target, fr, base.mass, base.omega0));
        row.d = std::max(row.d, fr.d);
      }
    }
  }, c.workers);

  RunOutput out;
  Table t;
  t.file = "ho_thermal_sweep.csv";
  t.columns = {{"t_f", "us", "final time"},
               {"F_const_mu", "1", "Gaussian fidelity, constant-mu protocol"},
               {"F_standard", "1", "Gaussian fidelity, standard protocol"},
               {"F_improved", "1", "Gaussian fidelity, improved protocol"},
               {"P_const_mu", "1/us", "average power (hbar = 1), constant-mu protocol"},
               {"P_standard", "1/us", "average power, standard protocol"},
               {"P_improved", "1/us", "average power, improved protocol"},
               {"r6_improved", "1", "s^6 coefficient of the improved protocol"},
               {"S0_standard", "A^(1/2)", "overlap measure S_0 of the standard protocol"},
               {"S0_improved", "A^(1/2)", "overlap measure S_0 of the improved protocol"},
               {"Ffock_const_mu", "1", "Fock Uhlmann fidelity (nan when not requested)"},
               {"Ffock_standard", "1", "Fock Uhlmann fidelity"},
               {"Ffock_improved", "1", "Fock Uhlmann fidelity"}};
  bool dominance = true;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    t.rows.push_back({r.tf, r.F[0], r.F[1], r.F[2], r.P[0], r.P[1], r.P[2], r.r6, r.S0_std, r.S0_imp, r.Ff[0],
                      r.Ff[1], r.Ff[2]});
    t.fock_dim = std::max(t.fock_dim, r.d);
    dominance = dominance && r.F[2] >= r.F[1];
    worst_margin = std::min(worst_margin, r.F[2] - r.F[1]);
  }
  json s;
  s["experiment"] = "ho_thermal";
  s["rows"] = t.rows.size();
  s["improved_axis"] = axis_summary({c.improved_axis});
  s["improved_dominates"] = dominance;
  s["worst_margin"] = worst_margin;
  s["T0_mK_metadata"] = c.T0_mK;
  out.summary = s;
  out.tables.push_back(std::move(t));
  return out;
}

Table control_trace(const ProtocolDoc& d, std::size_t grid) {
  Table tr;
  tr.file = "controls.csv";
  if (d.kind == ProtocolKind::tls_inversion) {
    const auto p = build_tls(d, grid);
    tr.columns = {{"t", "ms", "time"}, {"Delta", "1/ms", "detuning"}, {"Omega", "1/ms", "Rabi frequency"},
                  {"G", "rad", "invariant polar angle"}, {"B", "rad", "invariant azimuth"}};
    for (double time : quad::uniform_grid(0.0, p.t_f(), trace_points)) {
      const auto u = p.controls(time);
      tr.rows.push_back({time, u.delta, u.omega, p.G(time), p.B(time)});
    }
    return tr;
  }
  const auto trap = build_trap(d, grid);
  tr.columns = {{"t", "us", "time"}, {"omega", "rad/us", "trap frequency (negative: inverted)"},
                {"omega2_dot", "rad^2/us^3", "time derivative of omega^2"}};
  for (double time : quad::uniform_grid(0.0, trap.t_f, trace_points))
    tr.rows.push_back({time, signed_omega(trap.omega2(time)), trap.omega2_dot(time)});
  return tr;
}

json measure_protocol(const ProtocolDoc& d, std::span<const NoiseChannel> chs, std::size_t grid) {
  json j;
  j["kind"] = to_string(d.kind);
  if (d.kind == ProtocolKind::tls_inversion) {
    const auto p = build_tls(d, grid);
    const double ez = strength(chs, NoiseOperator::sigma_z), ex = strength(chs, NoiseOperator::sigma_x);
    const auto m = tls_measures(p, ez, ex, grid);
    j["O_z"] = m.O[0];
    j["O_x"] = m.O[1];
    j["A_z"] = m.A[0];
    j["A_x"] = m.A[1];
    j["O_max"] = m.O_max;
    if (ez + ex > 0.0) {
      j["O_bar"] = m.O_bar;
      j["A_bar"] = m.A_bar;
    }
    return j;
  }
  if (d.kind == ProtocolKind::ho_constant_mu) {
    const auto p = build_constant_mu(d);
    j["mu"] = p.mu();
    return j;
  }
  const auto p = build_ho(d, grid);
  for (unsigned n = 0; n <= 3; ++n) j["S" + std::to_string(n)] = ho_overlap_Sn(p, n);
  j["g"] = p.g();
  j["min_rho"] = p.min_rho();
  j["inverted_trap"] = p.inverted_trap();
  return j;
}

RunOutput run_custom(const ExperimentConfig& c) {
  const ProtocolDoc d = default_protocol(c);
  const auto chs = channels_of(c);
  const OdeOptions opt = ode_options(c);
  RunOutput out;
  Table t;
  t.file = "custom.csv";
  json s;
  s["experiment"] = "custom";
  s["protocol"] = to_json(d);
  s["measures"] = measure_protocol(d, chs, c.grid);
  if (d.kind == ProtocolKind::tls_inversion) {
    t.columns = {{"fidelity", "1", "Uhlmann fidelity with |1><1|"}};
    t.rows.push_back({tls_fidelity(build_tls(d, c.grid), chs, opt)});
  } else {
    const auto trap = build_trap(d, c.grid);
    GaussianMoments m0, target;
    if (d.kind == ProtocolKind::ho_coherent) {
      m0 = coherent_moments(d.alpha, d.omega0, d.mass);
      target = target_coherent(d.alpha, build_ho(d, c.grid).g(), d.omega0, d.omega_f, d.mass).moments;
    } else {
      m0 = thermal_moments(d.nbar, d.omega0, d.mass);
      target = thermal_moments(d.nbar, d.omega_f, d.mass);
    }
    const auto r = run_moments(m0, trap, chs, opt);
    t.columns = {{"fidelity", "1", "Gaussian fidelity with the target"}, {"power", "1/us", "average power"}};
    t.rows.push_back({gaussian_fidelity(r.final_moments, target), r.power});
  }
  s["fidelity"] = t.rows[0][0];
  out.summary = s;
  out.tables.push_back(std::move(t));
  if (c.traces) out.tables.push_back(control_trace(d, c.grid));
  return out;
}

RunOutput run_experiment(const ExperimentConfig& c) {
  validate(c);
  switch (c.experiment) {
    case ExperimentId::tls_single: return run_tls_single(c);
    case ExperimentId::tls_dual: return run_tls_dual(c);
    case ExperimentId::ho_coherent: return run_ho_coherent(c);
    case ExperimentId::ho_thermal: return run_ho_thermal(c);
    case ExperimentId::custom: return run_custom(c);
  }
  throw Error(ErrorKind::config, "unknown experiment");
}

std::string to_csv(const Table& t, const ExperimentConfig& c) {
  std::ostringstream os;
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016" PRIx64, config_hash(c));
  const bool tls = c.experiment == ExperimentId::tls_single || c.experiment == ExperimentId::tls_dual ||
                   (c.protocol && c.protocol->kind == ProtocolKind::tls_inversion) ||
                   (c.experiment == ExperimentId::custom && !c.protocol);
  os << "# ---\n";
  os << "# experiment: " << to_string(c.experiment) << "\n";
  os << "# config_hash: fnv1a64:" << hash << "\n";
  os << "# units: " << (tls ? "time=ms, rate=1/ms (kHz), hbar=1" : "time=us, length=A, rate=1/us, hbar=1") << "\n";
  os << "# fock_dim: " << (t.fock_dim == 0 ? std::string("none") : std::to_string(t.fock_dim)) << "\n";
  os << "# columns:";
  for (const auto& col : t.columns) os << " " << col.name << "[" << col.unit << "]";
  os << "\n# ---\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i].name;
  os << "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_double(r[i]);
    os << "\n";
  }
  return os.str();
}

json schema_json(const RunOutput& out) {
  json files = json::object();
  for (const auto& t : out.tables) {
    json cols = json::array();
    for (const auto& col : t.columns)
      cols.push_back({{"name", col.name}, {"unit", col.unit}, {"description", col.description}});
    files[t.file] = {{"columns", cols}};
  }
  return {{"comment_prefix", "#"}, {"delimiter", ","}, {"files", files}};
}

void write_outputs(const RunOutput& out, const ExperimentConfig& c, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::config, "cannot create output directory '" + dir + "': " + ec.message());
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    if (!f) throw Error(ErrorKind::config, "cannot write '" + (fs::path(dir) / name).string() + "'");
    f << text;
  };
  for (const auto& t : out.tables) write(t.file, to_csv(t, c));
  write("schema.json", schema_json(out).dump(2) + "\n");
  json summary = out.summary;
  summary["warnings"] = out.warnings;
  write("summary.json", summary.dump(2) + "\n");
  write("config.json", to_json(c).dump(2) + "\n");
}

}  // namespace nrc
