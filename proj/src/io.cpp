#include "amo/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "amo/constants.hpp"

namespace amo::io {

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config parse error in " + path + ": " + e.what());
  }
  return j;
}

double read_angular(const json& j, const std::string& key, double fallback) {
  if (j.contains(key)) return j.at(key).get<double>();
  const std::string alt = key + "_2pi_hz";
  if (j.contains(alt)) return 2.0 * kPi * j.at(alt).get<double>();
  return fallback;
}

params::PhysicalConfig parse_physical_config(const json& root) {
  if (!root.contains("physical"))
    throw std::invalid_argument("config: missing \"physical\" section");
  const json& j = root.at("physical");
  params::PhysicalConfig cfg;

  const std::string scheme = j.value("scheme", "array");
  if (scheme == "array") cfg.scheme = params::Scheme::array;
  else if (scheme == "cloud") cfg.scheme = params::Scheme::cloud;
  else if (scheme == "membrane") cfg.scheme = params::Scheme::membrane;
  else throw std::invalid_argument("physical.scheme: unknown value \"" + scheme + "\"");

  cfg.wavelength = j.value("wavelength", cfg.wavelength);
  cfg.finesse = j.value("finesse", cfg.finesse);
  cfg.cavity_length = j.value("cavity_length", cfg.cavity_length);
  cfg.waist = j.value("waist", cfg.waist);
  if (j.contains("lattice_spacing")) cfg.lattice_spacing = j.at("lattice_spacing").get<double>();
  else if (j.contains("lattice_spacing_over_lambda"))
    cfg.lattice_spacing = j.at("lattice_spacing_over_lambda").get<double>() * cfg.wavelength;
  cfg.atom_number = j.value("atom_number", cfg.atom_number);
  cfg.lamb_dicke = j.value("lamb_dicke", cfg.lamb_dicke);
  cfg.gamma = read_angular(j, "gamma", cfg.gamma);
  cfg.detuning_over_gamma = j.value("detuning_over_gamma", cfg.detuning_over_gamma);
  cfg.recoil_over_gamma = j.value("recoil_over_gamma", cfg.recoil_over_gamma);
  if (j.contains("atom_mass_amu")) cfg.atom_mass_kg = j.at("atom_mass_amu").get<double>() * kAmu;
  if (j.contains("atom_mass_kg")) cfg.atom_mass_kg = j.at("atom_mass_kg").get<double>();
  cfg.membrane_omega_m = read_angular(j, "membrane_omega_m", cfg.membrane_omega_m);
  if (j.contains("z0")) cfg.z0_override = j.at("z0").get<double>();
  return cfg;
}

fock::HilbertDims parse_dims(const json& root) {
  fock::HilbertDims dims;
  if (root.contains("dims")) {
    const json& j = root.at("dims");
    dims.n_photon_max = j.value("n_photon_max", dims.n_photon_max);
    dims.n_phonon_max = j.value("n_phonon_max", dims.n_phonon_max);
  }
  dims.validate();
  return dims;
}

dynamics::SimControl parse_sim_control(const json& root) {
  dynamics::SimControl ctrl;
  if (root.contains("sim")) {
    const json& j = root.at("sim");
    ctrl.omega_ratio = j.value("omega_ratio", ctrl.omega_ratio);
    ctrl.rel_tol = j.value("rel_tol", ctrl.rel_tol);
    ctrl.t_max = j.value("t_max", ctrl.t_max);
    ctrl.eps_ss = j.value("eps_ss", ctrl.eps_ss);
    ctrl.allow_strong_drive = j.value("allow_strong_drive", ctrl.allow_strong_drive);
  }
  ctrl.validate();
  return ctrl;
}

trajectories::TrajectoryConfig parse_trajectory_config(const json& root) {
  trajectories::TrajectoryConfig cfg;
  if (root.contains("trajectories")) {
    const json& j = root.at("trajectories");
    cfg.n_traj = j.value("n_traj", cfg.n_traj);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.dt_max = j.value("dt_max", cfg.dt_max);
    cfg.sample_dt = j.value("sample_dt", cfg.sample_dt);
    cfg.jump_tol = j.value("jump_tol", cfg.jump_tol);
    cfg.t_max = j.value("t_max", cfg.t_max);
    cfg.n_workers = j.value("n_workers", cfg.n_workers);
  }
  cfg.validate();
  return cfg;
}

lattice::LatticeSpec parse_lattice_spec(const json& root) {
  lattice::LatticeSpec spec;
  if (root.contains("lattice")) {
    const json& j = root.at("lattice");
    spec.nx = j.value("nx", spec.nx);
    spec.ny = j.value("ny", spec.ny);
    spec.lambda = j.value("lambda", spec.lambda);
    if (j.contains("a")) spec.a = j.at("a").get<double>();
    else if (j.contains("a_over_lambda")) spec.a = j.at("a_over_lambda").get<double>() * spec.lambda;
    if (j.contains("w")) spec.w = j.at("w").get<double>();
    else if (j.contains("w_over_a")) spec.w = j.at("w_over_a").get<double>() * spec.a;
    if (j.contains("dipole_orientation")) {
      const auto v = j.at("dipole_orientation").get<std::vector<double>>();
      if (v.size() != 3) throw std::invalid_argument("lattice.dipole_orientation: need 3 components");
      spec.dipole_orientation = Eigen::Vector3d(v[0], v[1], v[2]);
    }
  }
  spec.validate();
  return spec;
}

lattice::DisorderConfig parse_disorder_config(const json& root) {
  lattice::DisorderConfig cfg;
  if (!root.contains("disorder"))
    throw std::invalid_argument("config: missing \"disorder\" section");
  const json& j = root.at("disorder");
  cfg.eta_grid = j.at("eta_grid").get<std::vector<double>>();
  cfg.n_samples = j.value("n_samples", cfg.n_samples);
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("z0")) cfg.z0 = j.at("z0").get<double>();
  cfg.n_workers = j.value("n_workers", cfg.n_workers);
  cfg.validate();
  return cfg;
}

fock::ModelParams parse_model(const json& root, const dynamics::SimControl& ctrl) {
  fock::ModelParams p;
  if (root.contains("model")) {
    const json& j = root.at("model");
    p.omega_m = read_angular(j, "omega_m", 1.0);
    p.g = j.contains("g_over_omega_m") ? j.at("g_over_omega_m").get<double>() * p.omega_m
                                       : read_angular(j, "g", 0.0);
    p.kappa = j.contains("kappa_over_omega_m")
                  ? j.at("kappa_over_omega_m").get<double>() * p.omega_m
                  : read_angular(j, "kappa", 0.0);
    p.g2 = j.contains("g2_over_omega_m") ? j.at("g2_over_omega_m").get<double>() * p.omega_m
                                         : read_angular(j, "g2", 0.0);
    p.gamma_m = read_angular(j, "gamma_m", 0.0);
    p.delta_L = j.contains("delta_L_over_omega_m")
                    ? j.at("delta_L_over_omega_m").get<double>() * p.omega_m
                    : read_angular(j, "delta_L", 0.0);
  } else {
    const params::OptomechParams op = params::derive_params(parse_physical_config(root));
    p.omega_m = op.omega_m;
    p.g = op.g;
    p.kappa = op.kappa;
    p.g2 = op.g2;
    p.delta_L = -op.G;  // blockade optimum unless overridden per command
  }
  p.Omega = ctrl.omega_ratio * p.kappa;
  p.validate();
  return p;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << header << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

void write_manifest(const std::string& out_dir, const std::string& command,
                    const json& resolved_config, std::uint64_t seed) {
  json m;
  m["tool"] = "amo";
  m["version"] = kToolVersion;
  m["command"] = command;
  m["seed"] = seed;
  m["config"] = resolved_config;
  write_text((std::filesystem::path(out_dir) / "manifest.json").string(), m.dump(2) + "\n");
}

namespace {

double nice_min(const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); }
double nice_max(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

}  // namespace

std::string svg_line_plot(const std::vector<double>& x,
                          const std::vector<std::vector<double>>& ys,
                          const std::string& x_label, const std::string& y_label) {
  const int W = 640, H = 420, ml = 60, mr = 15, mt = 15, mb = 45;
  const double x0 = nice_min(x), x1 = nice_max(x);
  double y0 = 1e300, y1 = -1e300;
  for (const auto& y : ys) {
    y0 = std::min(y0, nice_min(y));
    y1 = std::max(y1, nice_max(y));
  }
  if (y1 <= y0) y1 = y0 + 1.0;
  auto px = [&](double v) { return ml + (v - x0) / (x1 - x0) * (W - ml - mr); };
  auto py = [&](double v) { return H - mb - (v - y0) / (y1 - y0) * (H - mt - mb); };

  std::ostringstream s;
  s << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
  s << "<rect width='100%' height='100%' fill='white'/>\n";
  s << "<line x1='" << ml << "' y1='" << (H - mb) << "' x2='" << (W - mr) << "' y2='"
    << (H - mb) << "' stroke='black'/>\n";
  s << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << (H - mb)
    << "' stroke='black'/>\n";
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  for (size_t k = 0; k < ys.size(); ++k) {
    s << "<polyline fill='none' stroke='" << colors[k % 4] << "' stroke-width='1.5' points='";
    for (size_t i = 0; i < x.size(); ++i) s << px(x[i]) << "," << py(ys[k][i]) << " ";
    s << "'/>\n";
  }
  s << "<text x='" << (W / 2) << "' y='" << (H - 10) << "' text-anchor='middle' font-size='13'>"
    << x_label << "</text>\n";
  s << "<text x='15' y='" << (H / 2) << "' text-anchor='middle' font-size='13' transform='rotate(-90 15 "
    << (H / 2) << ")'>" << y_label << "</text>\n";
  s << "<text x='" << ml << "' y='" << (H - mb + 16) << "' font-size='11'>" << format_double(x0)
    << "</text>\n<text x='" << (W - mr) << "' y='" << (H - mb + 16)
    << "' text-anchor='end' font-size='11'>" << format_double(x1) << "</text>\n";
  s << "<text x='" << (ml - 4) << "' y='" << (H - mb) << "' text-anchor='end' font-size='11'>"
    << format_double(y0) << "</text>\n<text x='" << (ml - 4) << "' y='" << (mt + 10)
    << "' text-anchor='end' font-size='11'>" << format_double(y1) << "</text>\n";
  s << "</svg>\n";
  return s.str();
}

std::string svg_heatmap(const std::vector<double>& xs, const std::vector<double>& ys,
                        const std::vector<double>& values, const std::string& title) {
  const int nx = int(xs.size()), ny = int(ys.size());
  const int cell = std::max(4, 480 / std::max(nx, ny));
  const int ml = 60, mt = 30, W = ml + nx * cell + 20, H = mt + ny * cell + 50;
  double vmax = 0.0;
  for (double v : values) vmax = std::max(vmax, std::abs(v));
  if (vmax == 0.0) vmax = 1.0;

  // Diverging map centered on zero: blue (negative) to white to red (positive).
  auto color = [&](double v) {
    const double t = std::clamp(v / vmax, -1.0, 1.0);
    int r, g, b;
    if (t >= 0) {
      r = 255; g = int(255 * (1 - t)); b = int(255 * (1 - t));
    } else {
      r = int(255 * (1 + t)); g = int(255 * (1 + t)); b = 255;
    }
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return std::string(buf);
  };
  auto at = [&](int i, int j) { return values[size_t(i) * ny + j]; };

  std::ostringstream s;
  s << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
  s << "<rect width='100%' height='100%' fill='white'/>\n";
  s << "<text x='" << (W / 2) << "' y='18' text-anchor='middle' font-size='13'>" << title
    << "</text>\n";
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      s << "<rect x='" << (ml + i * cell) << "' y='" << (mt + (ny - 1 - j) * cell)
        << "' width='" << cell << "' height='" << cell << "' fill='" << color(at(i, j))
        << "'/>\n";
    }
  }
  // Zero-level contour: edges where the sign flips between neighbors.
  s << "<g stroke='black' stroke-width='1.3'>\n";
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      if (i + 1 < nx && at(i, j) * at(i + 1, j) < 0)
        s << "<line x1='" << (ml + (i + 1) * cell) << "' y1='" << (mt + (ny - 1 - j) * cell)
          << "' x2='" << (ml + (i + 1) * cell) << "' y2='" << (mt + (ny - j) * cell) << "'/>\n";
      if (j + 1 < ny && at(i, j) * at(i, j + 1) < 0)
        s << "<line x1='" << (ml + i * cell) << "' y1='" << (mt + (ny - 1 - j) * cell)
          << "' x2='" << (ml + (i + 1) * cell) << "' y2='" << (mt + (ny - 1 - j) * cell)
          << "'/>\n";
    }
  }
  s << "</g>\n";
  s << "<text x='" << ml << "' y='" << (H - 12) << "' font-size='11'>x: " << format_double(xs.front())
    << " .. " << format_double(xs.back()) << "   y: " << format_double(ys.front()) << " .. "
    << format_double(ys.back()) << "</text>\n";
  s << "</svg>\n";
  return s.str();
}

}  // namespace amo::io
