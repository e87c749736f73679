#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace amo::lattice {

using Complex = std::complex<double>;

// Finite square 2D array in the z = z0 plane, illuminated by a Gaussian
// mode of waist w.
struct LatticeSpec {
  int nx = 60;
  int ny = 60;
  double a = 480e-9;        // lattice spacing [m]
  double lambda = 800e-9;   // optical wavelength [m]
  double w = 2.88e-6;       // Gaussian waist [m]
  Eigen::Vector3d dipole_orientation{1.0, 0.0, 0.0};  // in-plane x by default

  double q() const { return 2.0 * 3.14159265358979323846 / lambda; }
  int sites() const { return nx * ny; }
  // Site coordinates centered on the array, row-major over (ix, iy).
  double site_x(int ix) const { return (ix - 0.5 * (nx - 1)) * a; }
  double site_y(int iy) const { return (iy - 0.5 * (ny - 1)) * a; }

  void validate() const;
};

struct GaussianWeights {
  Eigen::VectorXd v;     // V_n^0 per site, row-major over (ix, iy)
  double sum_sq = 0.0;   // sum (V_n^0)^2, -> 1 for a large array
  bool deficit = false;  // array diameter < 4w: tails truncated
};

// Eq.-profile weights V_n^0 = (2/sqrt(pi)) (a/w) exp(-2 (r_n/w)^2).
GaussianWeights gaussian_weights(const LatticeSpec& spec);

// Free-space electromagnetic dyadic kernel at wavenumber q, normalized so
// that e' . Im[K(r -> 0)] . e = gamma/2 for any unit polarization e.
Eigen::Matrix3cd free_space_kernel(const Eigen::Vector3d& r, const Eigen::Vector3d& rp,
                                   double q, double gamma = 1.0);

// Same kernel contracted with a fixed dipole orientation.
Complex scalar_kernel(const Eigen::Vector3d& dr, double q, double gamma,
                      const Eigen::Vector3d& orientation);
double scalar_kernel_im(const Eigen::Vector3d& dr, double q, double gamma,
                        const Eigen::Vector3d& orientation);

// Real-space summation policy for the conditionally convergent lattice
// sums: sites are weighted by a smooth radial taper over the outer half of
// the cutoff sphere, and the cutoff grows until two successive tapered
// sums agree to `rel_tol * gamma`, up to `max_radius_lambda` wavelengths.
struct SumPolicy {
  double rel_tol = 2e-3;
  double max_radius_lambda = 150.0;
};

struct KernelSample {
  Eigen::Vector2d k_perp;       // [rad/m]
  double shift = 0.0;           // Delta_k, same units as gamma
  double decay = 0.0;           // Gamma_k, same units as gamma
  double radius_used = 0.0;     // [m]
};

// Infinite-array cooperative shift and decay at transverse wavevector
// k_perp (first Brillouin zone):
//   S = sum_{n != 0} e^{-i k.r_n} K(0, r_n),  Delta_k = -Re S,
//   Gamma_k = gamma + 2 Im S.
KernelSample collective_shift_decay(const LatticeSpec& spec,
                                    const Eigen::Vector2d& k_perp, double gamma = 1.0,
                                    const SumPolicy& policy = {});

// Finite-array Fourier transform of the flat-array decay kernel:
//   Gamma_{k k'} = (2/N) sum_{n n'} e^{-i k.r_n} Im[K(r_n, r_n')] e^{i k'.r_n'}
// (diagonal Im K = gamma/2). Hermitian; diagonal approaches Gamma_k of
// collective_shift_decay for large arrays.
Eigen::MatrixXcd mode_mixing_kernel(const LatticeSpec& spec,
                                    const std::vector<Eigen::Vector2d>& k_list,
                                    double gamma = 1.0);

// Fraction of the total radiated power that misses the two paraxial
// cavity lobes, for a Gaussian-driven array with longitudinal site
// displacements delta_z. The lobes are the flat-reference (z_n = z0) mode
// vectors, so a perfectly ordered array scatters nothing outside.
double outside_scatter_fraction(const LatticeSpec& spec, const Eigen::VectorXd& delta_z,
                                double z0 = 0.0, double gamma = 1.0);

struct DisorderConfig {
  std::vector<double> eta_grid;  // each in (0, 0.5)
  int n_samples = 50;
  std::uint64_t seed = 0;
  std::optional<double> z0;      // default (M+1/2) pi/(2q); drops out of the scan
  int n_workers = 1;

  void validate() const;
};

struct EtaEstimate {
  double eta = 0.0;
  double mean = 0.0;      // outside-power fraction
  double std_error = 0.0;
};

struct DisorderScanResult {
  std::vector<EtaEstimate> points;
  double exponent = 0.0;      // log-log slope of fraction vs eta
  double exponent_ci = 0.0;   // ~95% half-width
  bool needs_more_samples = false;  // some stderr above 10% of its mean
};

// Monte Carlo verification of the eta^2 suppression: delta_z ~ N(0, (eta/q)^2)
// per site, fixed seed => bitwise identical results at any worker count.
DisorderScanResult disorder_scattering_scan(const LatticeSpec& spec,
                                            const DisorderConfig& cfg);

}  // namespace amo::lattice
