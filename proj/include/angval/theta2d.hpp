#pragma once

#include <optional>
#include <string>

namespace angval {

// Lifted circle map Psi_rho: odd, strictly increasing, commutes with
// translation by pi; Psi_rho(theta) = arctan(rho tan theta) on |theta| < pi/2
// with Psi_rho(+-pi/2) = +-pi/2. Inverse is psi(1/rho, .).
double psi(double rho, double x);

// One step of the angle dynamics of A(rho,phi):
// F(theta) = Psi_rho(phi + Psi_{1/rho}(theta)).
double iterate_map(double rho, double phi, double theta);

// Closed form of the j-th iterate: Psi_rho(j phi + Psi_{1/rho}(theta0)).
double orbit_angle(double rho, double phi, double theta0, long j);

// delta(theta) = 2 Psi_rho(theta) - 2 Psi_rho(theta + phi) + pi; pi-periodic.
double delta(double rho, double phi, double theta);

// Zeros of delta bracketing its negative region, valid when skew > 1:
// theta'_- = arcsin(beta)/2, theta'_+ = pi/2 - theta'_-, theta_+- = Psi_{1/rho}(theta'_+-).
struct ThetaPM {
    double lower = 0.0;
    double upper = 0.0;
};
ThetaPM theta_pm(double rho, double phi);

// beta(rho,phi) = 2 / (tan(phi) (1/rho - rho)); >= 1 iff skew <= 1.
// +infinity for rho = 1.
double beta(double rho, double phi);

// Same quantity expressed through the skewness,
// sqrt(1 + 4(1-skew^2)/(1/rho - rho)^2) / skew; agrees with beta().
double beta_from_skew(double rho, double phi);

double skew_normal(double rho, double phi);  // (rho + 1/rho)|sin phi| / 2

struct RationalApprox {
    long p = 0;
    long q = 0;
    double err = 0.0;  // |phi/pi - p/q|
};

enum class ThetaCaseTag { SkewBounded, Irrational, ResonantUnit, Resonant };

const char* to_string(ThetaCaseTag t);

struct PhiClass {
    ThetaCaseTag tag = ThetaCaseTag::Irrational;  // Irrational / ResonantUnit / Resonant
    std::optional<RationalApprox> approx;
    std::optional<RationalApprox> nearest;  // best convergent even when irrational
};

// Continued-fraction detection of phi/pi = p/q with q <= q_max within tol.
PhiClass classify_phi(double phi, long q_max = 1000, double tol = 1e-9);

struct Theta1Options {
    double quad_tol = 1e-10;
    long q_max = 1000;
    double rational_tol = 1e-9;
    double sensitivity_band = 1e-6;
    // evaluate the competing branch for near-resonant phi (can cost O(q^2)
    // map steps at high-order convergents; sweeps may turn it off)
    bool evaluate_other_branch = true;
};

struct Theta2DReport {
    double rho = 0.0;
    double phi = 0.0;          // as given, in (0,pi)
    double phi_reduced = 0.0;  // min(phi, pi - phi), the value the formula uses
    double skew = 0.0;
    ThetaCaseTag tag = ThetaCaseTag::SkewBounded;
    long p = 0, q = 0;         // resonance, when applicable
    double theta1 = 0.0;
    std::optional<double> theta1_min;      // case (iv): minimal orbit average
    std::optional<double> argmax_theta;    // case (iv): maximizing theta0
    std::optional<double> quad_error;      // case (ii): quadrature error estimate
    bool sensitive = false;                // |phi/pi - p/q| < sensitivity band
    std::optional<double> other_branch;    // value of the competing branch
    std::string note;
};

// First angular value of A(rho,phi) by the four-case formula:
//   (i)  skew <= 1                      -> phi
//   (ii) skew > 1, phi/pi irrational    -> phi + (1/pi) Int_{delta<0} delta
//   (iii) skew > 1, phi/pi = 1/q        -> phi
//   (iv) skew > 1, phi/pi = p/q, p >= 2 -> (1/q) max_theta sum_j g_j(theta)
// For phi in (pi/2, pi) the value equals the one at pi - phi.
Theta2DReport theta1_normal(double rho, double phi, const Theta1Options& opts = {});

}  // namespace angval
