#pragma once

#include <optional>
#include <string>
#include <vector>

namespace amo::params {

enum class Scheme { membrane, cloud, array };

// Physical cavity / atom / lattice parameters. Lengths in meters, rates in
// rad/s. detuning_over_gamma means (delta - Delta)/gamma for the array scheme
// and delta/gamma for the cloud.
struct PhysicalConfig {
  Scheme scheme = Scheme::array;
  double wavelength = 800e-9;
  double finesse = 150000.0;
  double cavity_length = 3.2e-2;
  double waist = 15e-6;
  double lattice_spacing = 0.0;   // array only
  double atom_number = 0.0;       // cloud only; array derives N = pi w^2 / a^2
  double lamb_dicke = 0.15;
  double gamma = 2.0 * 3.14159265358979323846 * 6e6;
  double detuning_over_gamma = 0.0;
  double recoil_over_gamma = 1.0 / 1620.0;  // E_R / (hbar gamma)
  std::optional<double> atom_mass_kg;  // when set, E_R = hbar^2 q^2 / (2 m)
  double membrane_omega_m = 0.0;       // membrane scheme: caller-supplied
  // Trap equilibrium z0. Default (unset) is the g-maximizing phase
  // z0 = (M+1/2) pi/(2q), where sin(2 q z0) = 1 and cos(2 q z0) = 0.
  std::optional<double> z0_override;

  double wavenumber() const { return 2.0 * 3.14159265358979323846 / wavelength; }
  double sin_2qz0() const;
  double cos_2qz0() const;
  // Recoil frequency E_R/hbar in rad/s (mass path wins when present).
  double recoil_freq() const;

  // Throws std::invalid_argument naming the offending field; soft issues
  // (e.g. eta > 0.3) are appended to `warnings` instead.
  void validate(std::vector<std::string>* warnings = nullptr) const;
};

// Effective optomechanical model constants, all in rad/s.
struct OptomechParams {
  double g = 0.0;
  double kappa_c = 0.0;
  double kappa_sc = 0.0;
  double kappa = 0.0;
  double omega_m = 0.0;
  double g2 = 0.0;
  double G = 0.0;          // g^2 / omega_m
  double N_eff = 0.0;      // atoms within the waist
  double x0 = 0.0;         // zero-point motion [m], informational
  bool order_of_magnitude = false;  // membrane-scheme g is an estimate only
  std::vector<std::string> warnings;
};

struct RegimeMargins {
  double sideband = 0.0;  // log10(omega_m / kappa)
  double blockade = 0.0;  // log10(g^2 / (kappa omega_m))
};

// Saturation for log10 margins when g = 0 (blockade would be -inf).
inline constexpr double kMarginFloor = -300.0;

OptomechParams derive_array_params(const PhysicalConfig& cfg);
OptomechParams derive_cloud_params(const PhysicalConfig& cfg);
OptomechParams derive_membrane_params(const PhysicalConfig& cfg);
OptomechParams derive_params(const PhysicalConfig& cfg);  // dispatch on scheme

RegimeMargins regime_margins(const OptomechParams& p);

enum class SweepAxis { cavity_length, waist, lamb_dicke };
SweepAxis sweep_axis_from_name(const std::string& name);
std::string sweep_axis_name(SweepAxis axis);

struct SweepRow {
  double axis1 = 0.0;
  double axis2 = 0.0;
  double sideband = 0.0;
  double blockade = 0.0;
  bool valid = false;
  std::string error;
};

// Row-major grid sweep over array-scheme configs; per-point failures are
// flagged in the row, never thrown.
std::vector<SweepRow> sweep_regime_map(const PhysicalConfig& cfg_template,
                                       SweepAxis axis1, const std::vector<double>& grid1,
                                       SweepAxis axis2, const std::vector<double>& grid2);

}  // namespace amo::params
