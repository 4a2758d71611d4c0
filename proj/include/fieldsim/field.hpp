#pragma once

// Gaussian field synthesis: stationary convolution of white noise against a
// kernel (FFT or direct summation) and general kernel-row integration at
// arbitrary evaluation points.

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "fieldsim/kernel.hpp"
#include "fieldsim/lattice.hpp"
#include "fieldsim/noise.hpp"

namespace fieldsim {

struct FieldGrid {
    bool on_lattice = true;
    Lattice lattice;                            // meaningful when on_lattice
    std::vector<std::array<double, 2>> points;  // always filled
    bool complex_field = false;
    std::vector<double> re, im;
    std::string provenance;

    std::complex<double> value(std::size_t k) const {
        return {re[k], complex_field ? im[k] : 0.0};
    }
};

// Raised when the noise lattice is too small to hold the kernel mass needed
// at the requested evaluation region (the resulting covariance would be
// biased beyond the tail tolerance).
struct ExtentTooSmallError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ConvolveMethod { Automatic, Fft, Direct };

// G(t) = sum_cells phi(t - s_cell) W_cell on the largest centered sub-lattice
// whose distance to the noise boundary exceeds the kernel truncation radius
// (L2 tail tail_tol).  Throws ExtentTooSmallError when no such sub-lattice
// exists.  FFT and direct summation compute the same truncated sums.
FieldGrid convolve_stationary(const KernelSpec& kernel, const NoiseGrid& noise,
                              ConvolveMethod method = ConvolveMethod::Automatic,
                              double tail_tol = 1e-6);

// G(t) = sum_cells phi(t, s_cell) W_cell at arbitrary points.  Each row must
// have its L2 mass inside the noise lattice up to tail_tol, else
// ExtentTooSmallError.
FieldGrid synthesize_nonstationary(const KernelSpec& kernel,
                                   const NoiseGrid& noise,
                                   const std::vector<std::array<double, 2>>& eval_points,
                                   double tail_tol = 1e-6);

// Uncentered second-moment matrix (1/n) sum G(s) conj(G(t)) over field
// samples, for the listed value indices.  Hermitian by construction.
// Standard errors via batch means.  Throws std::invalid_argument when fewer
// than two samples are given.
struct CovarianceMatrix {
    std::size_t n_points = 0;
    std::vector<std::complex<double>> value;  // row-major n_points^2
    std::vector<double> std_error;

    std::complex<double> at(std::size_t i, std::size_t j) const {
        return value[i * n_points + j];
    }
    double err(std::size_t i, std::size_t j) const {
        return std_error[i * n_points + j];
    }
};

CovarianceMatrix empirical_covariance(const std::vector<FieldGrid>& samples,
                                      const std::vector<std::size_t>& indices,
                                      int n_batches = 50);

}  // namespace fieldsim
