#include "fieldsim/lattice.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fieldsim {

int Lattice::half_count() const {
    return static_cast<int>(std::lround(half_extent / spacing));
}

int Lattice::points_per_axis() const { return 2 * half_count() + 1; }

std::size_t Lattice::size() const {
    const auto ppa = static_cast<std::size_t>(points_per_axis());
    return dim == 1 ? ppa : ppa * ppa;
}

std::array<double, 2> Lattice::node(int i, int j) const {
    return {origin[0] + i * spacing, origin[1] + j * spacing};
}

double Lattice::node1(int i) const { return origin[0] + i * spacing; }

std::size_t Lattice::index(int i, int j) const {
    const int n = half_count();
    const auto ppa = static_cast<std::size_t>(points_per_axis());
    if (dim == 1) return static_cast<std::size_t>(i + n);
    return static_cast<std::size_t>(i + n) * ppa + static_cast<std::size_t>(j + n);
}

double Lattice::cell_volume() const {
    return dim == 1 ? spacing : spacing * spacing;
}

Lattice make_lattice(double spacing, double half_extent, int dim,
                     std::array<double, 2> origin) {
    if (!(spacing > 0.0))
        throw std::invalid_argument("lattice spacing must be positive");
    if (dim != 1 && dim != 2)
        throw std::invalid_argument("lattice dim must be 1 or 2");
    if (half_extent < spacing * (1.0 - 1e-9))
        throw std::invalid_argument("lattice half_extent must be >= spacing");
    const double ratio = half_extent / spacing;
    if (std::abs(ratio - std::lround(ratio)) > 1e-9 * std::max(1.0, ratio))
        throw std::invalid_argument(
            "lattice half_extent must be an integer multiple of spacing, got ratio " +
            std::to_string(ratio));
    return Lattice{spacing, half_extent, origin, dim};
}

bool covers(const Lattice& outer, const Lattice& inner) {
    if (outer.dim != inner.dim) return false;
    const double rel = std::abs(outer.spacing - inner.spacing) / outer.spacing;
    if (rel > 1e-12) return false;
    const double d = outer.spacing;
    for (int axis = 0; axis < inner.dim; ++axis) {
        const double off = (inner.origin[axis] - outer.origin[axis]) / d;
        if (std::abs(off - std::lround(off)) > 1e-9) return false;
        const double lo = inner.origin[axis] - inner.half_extent;
        const double hi = inner.origin[axis] + inner.half_extent;
        if (lo < outer.origin[axis] - outer.half_extent - 1e-9 * d) return false;
        if (hi > outer.origin[axis] + outer.half_extent + 1e-9 * d) return false;
    }
    return true;
}

}  // namespace fieldsim
