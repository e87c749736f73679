#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "amo/constants.hpp"
#include "amo/io.hpp"

namespace fs = std::filesystem;
using amo::io::format_double;
using amo::io::json;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> formats{"csv", "json"};

  bool wants(const std::string& f) const {
    return std::find(formats.begin(), formats.end(), f) != formats.end();
  }
  void ensure_out() const {
    if (!out_dir.empty()) fs::create_directories(out_dir);
  }
  std::string path(const std::string& name) const {
    return (fs::path(out_dir) / name).string();
  }
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("config", o.config_path, "JSON config file")->required();
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--seed", o.seed, "override RNG seed");
  cmd->add_option("--format", o.formats, "output formats (csv, json, svg)");
}

json params_to_json(const amo::params::OptomechParams& p) {
  auto both = [](double v) {
    return json{{"rad_per_s", v}, {"2pi_hz", v / (2.0 * amo::kPi)}};
  };
  json j;
  j["g"] = both(p.g);
  j["kappa_c"] = both(p.kappa_c);
  j["kappa_sc"] = both(p.kappa_sc);
  j["kappa"] = both(p.kappa);
  j["omega_m"] = both(p.omega_m);
  j["G"] = both(p.G);
  j["g2"] = both(p.g2);
  j["N_eff"] = p.N_eff;
  j["x0_m"] = p.x0;
  j["order_of_magnitude"] = p.order_of_magnitude;
  j["warnings"] = p.warnings;
  return j;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    v[size_t(i)] = n == 1 ? lo : lo + (hi - lo) * double(i) / double(n - 1);
  return v;
}

std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> v = linspace(std::log10(lo), std::log10(hi), n);
  for (double& x : v) x = std::pow(10.0, x);
  return v;
}

int cmd_map_params(const CommonOpts& o) {
  const json root = amo::io::load_json_file(o.config_path);
  const auto cfg = amo::io::parse_physical_config(root);
  const auto p = amo::params::derive_params(cfg);
  json out = params_to_json(p);
  if (p.kappa > 0 && p.omega_m > 0) {
    const auto m = amo::params::regime_margins(p);
    out["margins"] = {{"sideband", m.sideband}, {"blockade", m.blockade}};
  }
  std::cout << out.dump(2) << "\n";
  if (!o.out_dir.empty()) {
    o.ensure_out();
    amo::io::write_text(o.path("params.json"), out.dump(2) + "\n");
    amo::io::write_manifest(o.out_dir, "map-params", root, 0);
  }
  return 0;
}

struct GridSpec {
  std::string axis;
  double lo = 0.0, hi = 0.0;
  int n = 0;
  bool log = false;
};

GridSpec parse_grid(const std::string& s) {
  // axis:lo:hi:n[:log]
  GridSpec g;
  std::vector<std::string> parts;
  size_t pos = 0;
  while (pos <= s.size()) {
    const size_t next = s.find(':', pos);
    parts.push_back(s.substr(pos, next == std::string::npos ? next : next - pos));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  if (parts.size() < 4) throw CLI::ValidationError("grid", "expected axis:lo:hi:n[:log]");
  g.axis = parts[0];
  g.lo = std::stod(parts[1]);
  g.hi = std::stod(parts[2]);
  g.n = std::stoi(parts[3]);
  g.log = parts.size() > 4 && parts[4] == "log";
  if (g.n < 1) throw CLI::ValidationError("grid", "need at least one point");
  return g;
}

int cmd_regime_map(const CommonOpts& o, const std::string& grid1s, const std::string& grid2s) {
  const json root = amo::io::load_json_file(o.config_path);
  const auto cfg = amo::io::parse_physical_config(root);
  const GridSpec g1 = parse_grid(grid1s), g2 = parse_grid(grid2s);
  const auto axis1 = amo::params::sweep_axis_from_name(g1.axis);
  const auto axis2 = amo::params::sweep_axis_from_name(g2.axis);
  const auto grid1 = g1.log ? logspace(g1.lo, g1.hi, g1.n) : linspace(g1.lo, g1.hi, g1.n);
  const auto grid2 = g2.log ? logspace(g2.lo, g2.hi, g2.n) : linspace(g2.lo, g2.hi, g2.n);

  const auto rows = amo::params::sweep_regime_map(cfg, axis1, grid1, axis2, grid2);
  std::vector<std::vector<std::string>> csv;
  for (const auto& r : rows)
    csv.push_back({format_double(r.axis1), format_double(r.axis2), format_double(r.sideband),
                   format_double(r.blockade), r.valid ? "1" : "0"});
  o.ensure_out();
  amo::io::write_csv(o.path("regime_map.csv"),
                     "axis1,axis2,sideband_margin,blockade_margin,valid", csv);
  if (o.wants("svg")) {
    std::vector<double> side, block;
    for (const auto& r : rows) {
      side.push_back(r.valid ? r.sideband : 0.0);
      block.push_back(r.valid ? r.blockade : 0.0);
    }
    amo::io::write_text(o.path("regime_map_sideband.svg"),
                        amo::io::svg_heatmap(grid1, grid2, side,
                                             "log10(omega_m/kappa), x=" + g1.axis + " y=" + g2.axis));
    amo::io::write_text(o.path("regime_map_blockade.svg"),
                        amo::io::svg_heatmap(grid1, grid2, block,
                                             "log10(g^2/(kappa omega_m)), x=" + g1.axis + " y=" + g2.axis));
  }
  amo::io::write_manifest(o.out_dir, "regime-map", root, 0);
  std::cout << "regime map: " << rows.size() << " rows -> " << o.path("regime_map.csv") << "\n";
  return 0;
}

int cmd_g2_sweep(const CommonOpts& o, double lo, double hi, int n) {
  const json root = amo::io::load_json_file(o.config_path);
  const auto ctrl = amo::io::parse_sim_control(root);
  const auto dims = amo::io::parse_dims(root);
  auto model = amo::io::parse_model(root, ctrl);
  std::vector<double> grid = linspace(lo * model.omega_m, hi * model.omega_m, n);
  const auto pts = amo::dynamics::detuning_sweep(model, grid, dims, ctrl);

  std::vector<std::vector<std::string>> csv;
  int failed = 0;
  for (const auto& p : pts) {
    csv.push_back({format_double(p.delta_L / model.omega_m), format_double(p.g2),
                   format_double(p.n_photon), p.converged ? "1" : "0"});
    if (!p.converged) ++failed;
  }
  o.ensure_out();
  amo::io::write_csv(o.path("g2_sweep.csv"), "delta_L_over_omega_m,g2_zero,n_photon,converged", csv);
  if (o.wants("svg")) {
    std::vector<double> xs, ys;
    for (const auto& p : pts)
      if (p.converged) {
        xs.push_back(p.delta_L / model.omega_m);
        ys.push_back(p.g2);
      }
    amo::io::write_text(o.path("g2_sweep.svg"),
                        amo::io::svg_line_plot(xs, {ys}, "delta_L / omega_m", "g2(0)"));
  }
  amo::io::write_manifest(o.out_dir, "g2-sweep", root, 0);
  std::cout << "g2 sweep: " << pts.size() << " points, " << failed << " flagged -> "
            << o.path("g2_sweep.csv") << "\n";
  return 0;
}

int cmd_g2_tau(const CommonOpts& o, std::optional<double> delta_over_wm, double span, int points) {
  const json root = amo::io::load_json_file(o.config_path);
  const auto ctrl = amo::io::parse_sim_control(root);
  const auto dims = amo::io::parse_dims(root);
  auto model = amo::io::parse_model(root, ctrl);
  if (delta_over_wm) model.delta_L = *delta_over_wm * model.omega_m;

  const auto L = amo::dynamics::build_model_liouvillian(model, dims);
  const auto rho = amo::dynamics::steady_state(L, ctrl);
  const auto grid = amo::dynamics::default_tau_grid(model.kappa, points, span);
  const auto series = amo::dynamics::g2_tau(rho, L, grid, ctrl);

  std::vector<std::vector<std::string>> csv;
  for (size_t i = 0; i < series.tau.size(); ++i)
    csv.push_back({format_double(series.tau[i] * model.omega_m), format_double(series.values[i])});
  o.ensure_out();
  amo::io::write_csv(o.path("g2_tau.csv"), "tau_omega_m,g2", csv);
  if (o.wants("svg")) {
    std::vector<double> xs;
    for (double t : series.tau) xs.push_back(t * model.omega_m);
    amo::io::write_text(o.path("g2_tau.svg"),
                        amo::io::svg_line_plot(xs, {series.values}, "tau * omega_m", "g2(tau)"));
  }
  amo::io::write_manifest(o.out_dir, "g2-tau", root, 0);
  std::cout << "g2(0) = " << format_double(series.values.front()) << ", g2(inf) ~ "
            << format_double(series.g2_infinity) << " -> " << o.path("g2_tau.csv") << "\n";
  return 0;
}

int cmd_spectrum(const CommonOpts& o, int count) {
  const json root = amo::io::load_json_file(o.config_path);
  const auto ctrl = amo::io::parse_sim_control(root);
  const auto dims = amo::io::parse_dims(root);
  auto model = amo::io::parse_model(root, ctrl);
  model.Omega = 0.0;
  model.g2 = 0.0;
  const auto evs = amo::fock::spectrum_undriven(model, dims, count);
  json out;
  out["eigenvalues_over_omega_m"] = json::array();
  for (double e : evs) out["eigenvalues_over_omega_m"].push_back(e / model.omega_m);
  std::cout << out.dump(2) << "\n";
  if (!o.out_dir.empty()) {
    o.ensure_out();
    amo::io::write_text(o.path("spectrum.json"), out.dump(2) + "\n");
    amo::io::write_manifest(o.out_dir, "spectrum", root, 0);
  }
  return 0;
}

int cmd_trajectories(const CommonOpts& o) {
  const json root = amo::io::load_json_file(o.config_path);
  const auto ctrl = amo::io::parse_sim_control(root);
  const auto dims = amo::io::parse_dims(root);
  const auto model = amo::io::parse_model(root, ctrl);
  auto cfg = amo::io::parse_trajectory_config(root);
  if (o.seed) cfg.seed = *o.seed;

  const auto n_op = amo::fock::number_op(dims, amo::fock::Mode::photon);
  const auto res = amo::trajectories::run_ensemble(model, dims, cfg, {n_op});
  const auto g2 = amo::trajectories::g2_zero_mcwf(model, dims, cfg);

  std::vector<std::vector<std::string>> csv;
  for (size_t i = 0; i < res.t.size(); ++i)
    csv.push_back({format_double(res.t[i] * model.kappa), format_double(res.obs_mean[0][i]),
                   format_double(res.obs_stderr[0][i])});
  o.ensure_out();
  amo::io::write_csv(o.path("trajectories.csv"), "t_kappa,obs_mean,obs_stderr", csv);
  json summary;
  summary["seed"] = cfg.seed;
  summary["n_traj"] = cfg.n_traj;
  summary["n_photon"] = {{"mean", g2.n_photon.mean}, {"std_error", g2.n_photon.std_error}};
  summary["g2_zero"] = {{"mean", g2.g2.mean}, {"std_error", g2.g2.std_error}};
  amo::io::write_text(o.path("trajectories_summary.json"), summary.dump(2) + "\n");
  amo::io::write_manifest(o.out_dir, "trajectories", root, cfg.seed);
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_lattice_band(const CommonOpts& o, int points) {
  const json root = amo::io::load_json_file(o.config_path);
  const auto spec = amo::io::parse_lattice_spec(root);
  // kx scan through the zone at ky = 0.
  std::vector<std::vector<std::string>> csv;
  std::vector<double> xs, shifts, decays;
  for (int i = 0; i < points; ++i) {
    const double kx = (amo::kPi / spec.a) * double(i) / double(points - 1);
    const auto s = amo::lattice::collective_shift_decay(spec, {kx, 0.0});
    csv.push_back({format_double(kx * spec.a), "0", format_double(s.shift),
                   format_double(s.decay)});
    xs.push_back(kx * spec.a);
    shifts.push_back(s.shift);
    decays.push_back(s.decay);
  }
  o.ensure_out();
  amo::io::write_csv(o.path("lattice_band.csv"), "kx_a,ky_a,shift_over_gamma,decay_over_gamma", csv);
  if (o.wants("svg"))
    amo::io::write_text(o.path("lattice_band.svg"),
                        amo::io::svg_line_plot(xs, {shifts, decays}, "kx a",
                                               "shift, decay [gamma]"));
  amo::io::write_manifest(o.out_dir, "lattice-band", root, 0);
  std::cout << "band scan: " << points << " k-points -> " << o.path("lattice_band.csv") << "\n";
  return 0;
}

int cmd_disorder_scan(const CommonOpts& o) {
  const json root = amo::io::load_json_file(o.config_path);
  const auto spec = amo::io::parse_lattice_spec(root);
  auto cfg = amo::io::parse_disorder_config(root);
  if (o.seed) cfg.seed = *o.seed;
  const auto res = amo::lattice::disorder_scattering_scan(spec, cfg);

  std::vector<std::vector<std::string>> csv;
  for (const auto& p : res.points)
    csv.push_back({format_double(p.eta), format_double(p.mean), format_double(p.std_error)});
  o.ensure_out();
  amo::io::write_csv(o.path("disorder_scan.csv"), "eta,scatter_fraction,stderr", csv);
  json fit;
  fit["exponent"] = res.exponent;
  fit["ci"] = res.exponent_ci;
  fit["needs_more_samples"] = res.needs_more_samples;
  amo::io::write_text(o.path("disorder_fit.json"), fit.dump(2) + "\n");
  if (o.wants("svg")) {
    std::vector<double> log_eta, log_frac;
    for (const auto& p : res.points) {
      log_eta.push_back(std::log10(p.eta));
      log_frac.push_back(std::log10(p.mean));
    }
    amo::io::write_text(o.path("disorder_scan.svg"),
                        amo::io::svg_line_plot(log_eta, {log_frac}, "log10 eta",
                                               "log10 scatter fraction"));
  }
  amo::io::write_manifest(o.out_dir, "disorder-scan", root, cfg.seed);
  std::cout << fit.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"atom-array cavity optomechanics toolkit"};
  app.require_subcommand(1);

  CommonOpts o;
  std::string grid1, grid2;
  double lo = -2.0, hi = 1.2;
  int n = 60, count = 10, band_points = 33, tau_points = 600;
  double span = 40.0;
  std::optional<double> delta_over_wm;

  auto* c_map = app.add_subcommand("map-params", "physical -> optomechanical parameters");
  add_common(c_map, o);
  auto* c_regime = app.add_subcommand("regime-map", "regime-margin grid sweep");
  add_common(c_regime, o);
  c_regime->add_option("--grid1", grid1, "axis:lo:hi:n[:log]")->required();
  c_regime->add_option("--grid2", grid2, "axis:lo:hi:n[:log]")->required();
  auto* c_sweep = app.add_subcommand("g2-sweep", "g2(0) vs laser detuning");
  add_common(c_sweep, o);
  c_sweep->add_option("--delta-min", lo, "lowest delta_L / omega_m");
  c_sweep->add_option("--delta-max", hi, "highest delta_L / omega_m");
  c_sweep->add_option("--points", n, "grid size");
  auto* c_tau = app.add_subcommand("g2-tau", "g2(tau) at one detuning");
  add_common(c_tau, o);
  c_tau->add_option("--delta", delta_over_wm, "delta_L / omega_m (default: -G)");
  c_tau->add_option("--span", span, "grid span in 1/kappa");
  c_tau->add_option("--points", tau_points, "grid size");
  auto* c_spec = app.add_subcommand("spectrum", "undriven eigenvalues");
  add_common(c_spec, o);
  c_spec->add_option("--count", count, "number of eigenvalues");
  auto* c_traj = app.add_subcommand("trajectories", "Monte Carlo wavefunction ensemble");
  add_common(c_traj, o);
  auto* c_band = app.add_subcommand("lattice-band", "collective shift/decay vs k");
  add_common(c_band, o);
  c_band->add_option("--points", band_points, "k-points");
  auto* c_dis = app.add_subcommand("disorder-scan", "outside-scattering vs eta");
  add_common(c_dis, o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_map->parsed()) return cmd_map_params(o);
    if (c_regime->parsed()) return cmd_regime_map(o, grid1, grid2);
    if (c_sweep->parsed()) return cmd_g2_sweep(o, lo, hi, n);
    if (c_tau->parsed()) return cmd_g2_tau(o, delta_over_wm, span, tau_points);
    if (c_spec->parsed()) return cmd_spectrum(o, count);
    if (c_traj->parsed()) return cmd_trajectories(o);
    if (c_band->parsed()) return cmd_lattice_band(o, band_points);
    if (c_dis->parsed()) return cmd_disorder_scan(o);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
