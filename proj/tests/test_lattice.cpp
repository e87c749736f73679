#include <cmath>
#include <stdexcept>
#include <complex>
#include <random>

#include "amo/lattice.hpp"
#include "doctest.h"

using namespace amo::lattice;
using Complex = std::complex<double>;

namespace {

LatticeSpec small_spec(int n = 21, double w_over_a = 4.0) {
  LatticeSpec s;
  s.nx = s.ny = n;
  s.lambda = 800e-9;
  s.a = 0.6 * s.lambda;
  s.w = w_over_a * s.a;
  return s;
}

constexpr double kPi = 3.14159265358979323846;

}  // namespace

TEST_CASE("gaussian weights: center value, normalization, deficit flag") {
  // Odd grid puts a site exactly at the beam axis.
  LatticeSpec s = small_spec(81, 10.0);
  const GaussianWeights gw = gaussian_weights(s);
  REQUIRE(gw.v.size() == s.sites());
  const int center = (s.nx / 2) * s.ny + s.ny / 2;
  CHECK(gw.v(center) ==
        doctest::Approx((2.0 / std::sqrt(kPi)) * s.a / s.w).epsilon(1e-12));
  // sum V^2 -> 1 when the array covers the beam (81 a > 8 w here).
  CHECK(gw.sum_sq == doctest::Approx(1.0).epsilon(1e-3));
  CHECK_FALSE(gw.deficit);

  // Clipped beam: diameter < 4w trips the deficit flag and loses weight.
  LatticeSpec clipped = small_spec(11, 10.0);
  const GaussianWeights gc = gaussian_weights(clipped);
  CHECK(gc.deficit);
  CHECK(gc.sum_sq < 0.95);
}

TEST_CASE("free-space kernel: reciprocity, imaginary part at r = 0") {
  const double q = 2.0 * kPi / 800e-9;
  const double gamma = 1.0;
  const Eigen::Vector3d r1(1.1e-7, -2.3e-7, 0.0), r2(-0.4e-7, 0.9e-7, 1.7e-7);
  const Eigen::Matrix3cd K12 = free_space_kernel(r1, r2, q, gamma);
  const Eigen::Matrix3cd K21 = free_space_kernel(r2, r1, q, gamma);
  CHECK((K12 - K21.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((K12 - K12.transpose()).cwiseAbs().maxCoeff() < 1e-12);  // symmetric dyadic

  // Coincident points: Im K = (gamma/2) I for every polarization.
  const Eigen::Matrix3cd K0 = free_space_kernel(r1, r1, q, gamma);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(std::abs(K0(i, j).imag() - (i == j ? 0.5 : 0.0)) < 1e-12);

  // Independent oracle: direct evaluation of the standard dyadic formula.
  const Eigen::Vector3d dr = r1 - r2;
  const double rr = dr.norm(), xi = q * rr;
  const Eigen::Vector3d rh = dr / rr;
  const Complex phase = std::exp(Complex(0.0, xi));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double dij = (i == j) ? 1.0 : 0.0;
      const Complex expect =
          0.75 * gamma * phase *
          ((dij - rh(i) * rh(j)) / xi +
           (dij - 3.0 * rh(i) * rh(j)) * (Complex(0.0, 1.0) / (xi * xi) - 1.0 / (xi * xi * xi)));
      CHECK(std::abs(K12(i, j) - expect) < 1e-12);
    }

  // Scalar contraction consistency.
  const Eigen::Vector3d e(0.0, 1.0, 0.0);
  const Complex sc = scalar_kernel(dr, q, gamma, e);
  CHECK(std::abs(sc - (e.transpose() * K12 * e)(0)) < 1e-13);
  CHECK(std::abs(scalar_kernel_im(dr, q, gamma, e) - sc.imag()) < 1e-15);
}

TEST_CASE("collective decay at k = 0 matches the diffraction-order oracle") {
  // Subwavelength square array, single open diffraction order:
  // Gamma_0 / gamma = 3 pi / (q a)^2.
  LatticeSpec s = small_spec();
  const double gamma = 1.0;
  const KernelSample k0 = collective_shift_decay(s, Eigen::Vector2d::Zero(), gamma);
  const double oracle = 3.0 * kPi / std::pow(s.q() * s.a, 2);
  CHECK(k0.decay == doctest::Approx(oracle).epsilon(0.02));
  CHECK(k0.radius_used > 0.0);
}

TEST_CASE("evanescent wavevector suppresses the decay") {
  LatticeSpec s = small_spec();
  const double gamma = 1.0;
  // Zone-corner wavevector: |k| = sqrt(2) pi/a > q for a = 0.6 lambda, so
  // no propagating diffraction order.
  const Eigen::Vector2d k_ev(0.98 * kPi / s.a, 0.98 * kPi / s.a);
  const KernelSample ks = collective_shift_decay(s, k_ev, gamma);
  const double bright = 3.0 * kPi / std::pow(s.q() * s.a, 2);
  CHECK(ks.decay < 0.1 * bright);
  CHECK(ks.decay > -0.05 * bright);  // truncation noise, not real gain
}

TEST_CASE("collective shift is even in k") {
  LatticeSpec s = small_spec();
  const Eigen::Vector2d k(0.37 * s.q(), -0.21 * s.q());
  const KernelSample kp = collective_shift_decay(s, k, 1.0);
  const KernelSample km = collective_shift_decay(s, -k, 1.0);
  CHECK(std::abs(kp.shift - km.shift) < 1e-8);
  CHECK(std::abs(kp.decay - km.decay) < 1e-8);
}

TEST_CASE("mode-mixing kernel: hermitian, off-diagonal suppression with size") {
  std::vector<Eigen::Vector2d> klist;
  LatticeSpec probe = small_spec(20);
  klist.push_back(Eigen::Vector2d::Zero());
  klist.push_back(Eigen::Vector2d(0.25 * probe.q(), 0.0));
  klist.push_back(Eigen::Vector2d(0.0, 0.4 * probe.q()));

  double prev_off = -1.0;
  for (int n : {20, 40, 80}) {
    LatticeSpec s = small_spec(n);
    const Eigen::MatrixXcd G = mode_mixing_kernel(s, klist, 1.0);
    REQUIRE(G.rows() == 3);
    CHECK((G - G.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
    for (int i = 0; i < 3; ++i) CHECK(G(i, i).real() > 0.0);
    const double off = std::abs(G(0, 1)) / std::sqrt(std::abs(G(0, 0) * G(1, 1)));
    if (prev_off >= 0.0) CHECK(off < prev_off);
    prev_off = off;
  }
}

TEST_CASE("ordered array scatters nothing outside the cavity lobes") {
  LatticeSpec s = small_spec(31, 4.0);
  const Eigen::VectorXd flat = Eigen::VectorXd::Zero(s.sites());
  CHECK(outside_scatter_fraction(s, flat, 0.0) < 1e-10);
  CHECK(outside_scatter_fraction(s, flat, 0.3 * s.lambda) < 1e-10);
}

TEST_CASE("outside fraction is quadratic in small displacements") {
  LatticeSpec s = small_spec(25, 4.0);
  std::mt19937_64 rng(99);
  std::normal_distribution<double> nd;
  Eigen::VectorXd dir(s.sites());
  for (int i = 0; i < s.sites(); ++i) dir(i) = nd(rng);
  dir /= s.q();  // displacement scale comparable to eta/q

  const double eps = 1e-3;
  const double f1 = outside_scatter_fraction(s, eps * dir, 0.0);
  const double f2 = outside_scatter_fraction(s, 2.0 * eps * dir, 0.0);
  CHECK(f1 > 0.0);
  CHECK(f2 / f1 == doctest::Approx(4.0).epsilon(1e-3));

  // The trap-phase offset z0 drops out of the fraction.
  const double z0 = 0.125 * s.lambda;
  const double f1_z = outside_scatter_fraction(s, eps * dir, z0);
  CHECK(f1_z == doctest::Approx(f1).epsilon(1e-6));
}

TEST_CASE("disorder scan: eta^2 law on a small array, worker independence") {
  LatticeSpec s = small_spec(21, 3.0);
  DisorderConfig cfg;
  cfg.eta_grid = {0.05, 0.1, 0.2};
  cfg.n_samples = 12;
  cfg.seed = 31;

  const DisorderScanResult r1 = disorder_scattering_scan(s, cfg);
  REQUIRE(r1.points.size() == 3);
  for (const auto& pt : r1.points) {
    CHECK(pt.mean > 0.0);
    CHECK(pt.std_error > 0.0);
  }
  CHECK(r1.points[2].mean > r1.points[0].mean);
  CHECK(r1.exponent == doctest::Approx(2.0).epsilon(0.15));

  cfg.n_workers = 3;
  const DisorderScanResult r3 = disorder_scattering_scan(s, cfg);
  for (size_t i = 0; i < r1.points.size(); ++i) {
    CHECK(r1.points[i].mean == r3.points[i].mean);
    CHECK(r1.points[i].std_error == r3.points[i].std_error);
  }
  CHECK(r1.exponent == r3.exponent);
}

TEST_CASE("spec and config validation") {
  LatticeSpec s = small_spec();
  CHECK_NOTHROW(s.validate());
  s.a = 0.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = small_spec();
  s.nx = 0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);

  DisorderConfig cfg;
  cfg.eta_grid = {0.1};
  CHECK_NOTHROW(cfg.validate());
  cfg.eta_grid = {0.6};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.eta_grid = {0.0};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.eta_grid = {0.1};
  cfg.n_samples = 5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
