#pragma once

// Regular lattices centered at an origin node.  A lattice with spacing d and
// half-extent L has nodes origin + (i*d, j*d) for integer |i|, |j| <= L/d, so
// the point count per axis is odd and the origin is always a node.

#include <array>
#include <cstddef>

namespace fieldsim {

struct Lattice {
    double spacing = 1.0;
    double half_extent = 1.0;
    std::array<double, 2> origin{0.0, 0.0};
    int dim = 2;

    int half_count() const;           // L/d, validated integral
    int points_per_axis() const;      // 2*half_count()+1
    std::size_t size() const;         // points_per_axis()^dim

    // Node coordinates; for dim=1 the second index must be 0.
    std::array<double, 2> node(int i, int j) const;
    double node1(int i) const;

    // Row-major linear index of node (i, j), with i, j in [-half_count(), +half_count()].
    std::size_t index(int i, int j) const;

    double cell_volume() const;       // spacing^dim
};

// Validates and constructs a lattice.  Throws std::invalid_argument when
// spacing <= 0, half_extent < spacing, half_extent/spacing is not an integer
// (relative slack 1e-9), or dim is not 1 or 2.
Lattice make_lattice(double spacing, double half_extent, int dim = 2,
                     std::array<double, 2> origin = {0.0, 0.0});

// True when every node of `inner` is a node of `outer` (same spacing family,
// origins congruent modulo the spacing, inner extent within outer).
bool covers(const Lattice& outer, const Lattice& inner);

}  // namespace fieldsim
