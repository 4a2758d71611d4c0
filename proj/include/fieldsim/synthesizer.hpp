#pragma once

// Repeated nonstationary synthesis with fixed geometry.  Kernel rows are
// evaluated once per evaluation point; each sample is then a set of dot
// products against fresh noise, which is the fast path for Monte Carlo over
// many independent fields.

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "fieldsim/field.hpp"

namespace fieldsim {

class NonstationarySynthesizer {
  public:
    NonstationarySynthesizer(const KernelSpec& kernel,
                             const Lattice& noise_lattice,
                             std::vector<std::array<double, 2>> eval_points,
                             bool complex_noise, double tail_tol = 1e-6);

    // Draws white noise for (seed, stream) and evaluates every point.
    FieldGrid sample(std::uint64_t seed, std::uint64_t stream = 0) const;

    // Evaluates against an existing noise grid (must live on the same lattice).
    FieldGrid apply(const NoiseGrid& noise) const;

    const Lattice& noise_lattice() const { return lattice_; }

  private:
    KernelSpec kernel_;
    Lattice lattice_;
    std::vector<std::array<double, 2>> points_;
    bool complex_noise_;
    bool complex_field_;

    struct Row {
        std::vector<std::size_t> cells;
        std::vector<std::complex<double>> weights;
    };
    std::vector<Row> rows_;
};

}  // namespace fieldsim
