#include "amo/params.hpp"

#include <cmath>
#include <stdexcept>

#include "amo/constants.hpp"

namespace amo::params {

double PhysicalConfig::sin_2qz0() const {
  if (!z0_override) return 1.0;
  return std::sin(2.0 * wavenumber() * *z0_override);
}

double PhysicalConfig::cos_2qz0() const {
  if (!z0_override) return 0.0;
  return std::cos(2.0 * wavenumber() * *z0_override);
}

double PhysicalConfig::recoil_freq() const {
  if (atom_mass_kg) {
    const double q = wavenumber();
    return kHbar * q * q / (2.0 * *atom_mass_kg);
  }
  return recoil_over_gamma * gamma;
}

void PhysicalConfig::validate(std::vector<std::string>* warnings) const {
  if (!(wavelength > 0)) throw std::invalid_argument("wavelength must be > 0");
  if (!(cavity_length > 0)) throw std::invalid_argument("cavity_length must be > 0");
  if (!(waist > 0)) throw std::invalid_argument("waist must be > 0");
  if (!(finesse >= 1)) throw std::invalid_argument("finesse must be >= 1");
  if (!(gamma > 0)) throw std::invalid_argument("gamma must be > 0");
  if (scheme != Scheme::membrane) {
    if (!(lamb_dicke > 0 && lamb_dicke < 1))
      throw std::invalid_argument("lamb_dicke must be in (0, 1)");
    if (warnings && lamb_dicke > 0.3)
      warnings->push_back("lamb_dicke > 0.3: small-motion expansion strained");
  } else {
    if (!(lamb_dicke >= 0)) throw std::invalid_argument("lamb_dicke must be >= 0");
  }
  if (scheme == Scheme::array) {
    if (!(lattice_spacing > 0))
      throw std::invalid_argument("lattice_spacing must be > 0 for the array scheme");
    if (!(lattice_spacing < wavelength))
      throw std::invalid_argument("lattice_spacing must be subwavelength (a < lambda)");
  }
  if (scheme == Scheme::cloud && !(atom_number > 0))
    throw std::invalid_argument("atom_number must be > 0 for the cloud scheme");
  if (atom_mass_kg && !(*atom_mass_kg > 0))
    throw std::invalid_argument("atom_mass_kg must be > 0");
}

namespace {

void finalize(OptomechParams& p) {
  p.kappa = p.kappa_c + p.kappa_sc;
  p.G = (p.omega_m > 0) ? p.g * p.g / p.omega_m : 0.0;
}

}  // namespace

OptomechParams derive_array_params(const PhysicalConfig& cfg) {
  if (cfg.scheme != Scheme::array)
    throw std::invalid_argument("scheme must be 'array'");
  OptomechParams out;
  cfg.validate(&out.warnings);
  if (cfg.detuning_over_gamma == 0.0)
    throw std::invalid_argument("detuning_over_gamma must be nonzero");

  const double q = cfg.wavenumber();
  const double c_over_l = kSpeedOfLight / cfg.cavity_length;
  const double qw2 = q * q * cfg.waist * cfg.waist;
  const double N = kPi * cfg.waist * cfg.waist /
                   (cfg.lattice_spacing * cfg.lattice_spacing);
  const double inv_det = 1.0 / cfg.detuning_over_gamma;  // gamma/(delta-Delta)
  const double eta = cfg.lamb_dicke;
  const double alpha = 21.0 / 5.0;

  out.N_eff = N;
  out.g = cfg.sin_2qz0() * eta * c_over_l * inv_det * std::sqrt(N) * 3.0 / qw2;
  out.kappa_c = c_over_l * kPi / cfg.finesse;
  out.kappa_sc = eta * eta * N * c_over_l * inv_det * inv_det * (alpha / 2.0) / qw2;
  out.omega_m = cfg.recoil_freq() / (eta * eta);
  out.g2 = cfg.cos_2qz0() * eta * eta * c_over_l * inv_det * 4.0 / qw2;
  out.x0 = eta / q;
  finalize(out);
  return out;
}

OptomechParams derive_cloud_params(const PhysicalConfig& cfg) {
  if (cfg.scheme != Scheme::cloud)
    throw std::invalid_argument("scheme must be 'cloud'");
  OptomechParams out;
  cfg.validate(&out.warnings);
  if (cfg.detuning_over_gamma == 0.0)
    throw std::invalid_argument("detuning_over_gamma must be nonzero");

  const double q = cfg.wavenumber();
  const double c_over_l = kSpeedOfLight / cfg.cavity_length;
  const double qw2 = q * q * cfg.waist * cfg.waist;
  const double inv_det = 1.0 / cfg.detuning_over_gamma;  // gamma/delta
  const double eta = cfg.lamb_dicke;
  const double N = cfg.atom_number;

  out.N_eff = N;
  out.g = eta * c_over_l * inv_det * std::sqrt(N) * 3.0 / qw2;
  out.kappa_c = c_over_l * kPi / cfg.finesse;
  out.kappa_sc = N * c_over_l * inv_det * inv_det * 1.5 / qw2;
  out.omega_m = cfg.recoil_freq() / (eta * eta);
  out.x0 = eta / q;
  finalize(out);
  return out;
}

OptomechParams derive_membrane_params(const PhysicalConfig& cfg) {
  if (cfg.scheme != Scheme::membrane)
    throw std::invalid_argument("scheme must be 'membrane'");
  OptomechParams out;
  cfg.validate(&out.warnings);
  const double c_over_l = kSpeedOfLight / cfg.cavity_length;
  out.g = cfg.lamb_dicke * c_over_l;  // order of magnitude only
  out.kappa_c = c_over_l * kPi / cfg.finesse;
  out.kappa_sc = 0.0;
  out.omega_m = cfg.membrane_omega_m;  // bulk mechanics, caller-supplied
  out.order_of_magnitude = true;
  finalize(out);
  return out;
}

OptomechParams derive_params(const PhysicalConfig& cfg) {
  switch (cfg.scheme) {
    case Scheme::array: return derive_array_params(cfg);
    case Scheme::cloud: return derive_cloud_params(cfg);
    case Scheme::membrane: return derive_membrane_params(cfg);
  }
  throw std::invalid_argument("unknown scheme");
}

RegimeMargins regime_margins(const OptomechParams& p) {
  if (!(p.kappa > 0)) throw std::invalid_argument("kappa must be > 0");
  if (!(p.omega_m > 0)) throw std::invalid_argument("omega_m must be > 0");
  RegimeMargins m;
  m.sideband = std::log10(p.omega_m / p.kappa);
  if (p.g <= 0.0) {
    m.blockade = kMarginFloor;
  } else {
    m.blockade = std::max(kMarginFloor,
                          std::log10(p.g * p.g / (p.kappa * p.omega_m)));
  }
  return m;
}

SweepAxis sweep_axis_from_name(const std::string& name) {
  if (name == "cavity_length") return SweepAxis::cavity_length;
  if (name == "waist") return SweepAxis::waist;
  if (name == "lamb_dicke") return SweepAxis::lamb_dicke;
  throw std::invalid_argument("unknown sweep axis: " + name);
}

std::string sweep_axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::cavity_length: return "cavity_length";
    case SweepAxis::waist: return "waist";
    case SweepAxis::lamb_dicke: return "lamb_dicke";
  }
  return "?";
}

namespace {

void set_axis(PhysicalConfig& cfg, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::cavity_length: cfg.cavity_length = value; break;
    case SweepAxis::waist: cfg.waist = value; break;
    case SweepAxis::lamb_dicke: cfg.lamb_dicke = value; break;
  }
}

}  // namespace

std::vector<SweepRow> sweep_regime_map(const PhysicalConfig& cfg_template,
                                       SweepAxis axis1, const std::vector<double>& grid1,
                                       SweepAxis axis2, const std::vector<double>& grid2) {
  std::vector<SweepRow> rows;
  rows.reserve(grid1.size() * grid2.size());
  for (double v1 : grid1) {
    for (double v2 : grid2) {
      SweepRow row;
      row.axis1 = v1;
      row.axis2 = v2;
      try {
        PhysicalConfig cfg = cfg_template;
        set_axis(cfg, axis1, v1);
        set_axis(cfg, axis2, v2);
        const RegimeMargins m = regime_margins(derive_params(cfg));
        row.sideband = m.sideband;
        row.blockade = m.blockade;
        row.valid = true;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace amo::params
