#pragma once

// Mathematical constants used throughout the toolkit.  Everything here is
// computed from rapidly convergent series at startup (not hard-coded), so the
// test suite can cross-check the values against independently produced
// references.

namespace fieldsim {

// Riemann zeta(3) = sum k^-3 (Apery's constant).
double zeta3();

// Euler-Mascheroni constant.
double euler_gamma();

// Pointwise variance of log|Z| + euler_gamma/2 for a standard complex
// Gaussian Z normalised so that E|Z|^2 = 1:  pi^2/24.
double log_modulus_variance();

// Covariance of the centered log-modulus field of a planar Gaussian analytic
// function with squared-exponential correlation, at distance d:
//   (1/4) * Li_2(exp(-d^2)).
double log_modulus_covariance(double distance);

// Spectral mass of the centered log-modulus field:
//   sigma_x^2 = pi * zeta(3) / 4,   sigma_x = sqrt(pi zeta(3)) / 2.
double sigma_x();
double sigma_x_sq();

// Asymptotic variance density for smooth linear statistics of the zero set:
//   sigma = sigma_x / (2 pi) = sqrt(zeta(3)/pi) / 4,  sigma^2 = zeta(3)/(16 pi).
double sigma_zero();
double sigma_zero_sq();

// -E log|U| for U standard real Gaussian:  (euler_gamma + log 2) / 2.
double beta_real();

}  // namespace fieldsim
