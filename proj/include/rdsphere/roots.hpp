#pragma once

#include <vector>

#include "rdsphere/poly.hpp"
#include "rdsphere/sphere.hpp"

namespace rdsphere {

struct DivisorEntry {
    SpherePoint point;
    int multiplicity = 1;
};

// Finite multiset of sphere points; entries are distinct and sorted by (infinity, re, im).
struct Divisor {
    std::vector<DivisorEntry> entries;

    int degree() const;
    std::size_t size() const { return entries.size(); }
    bool empty() const { return entries.empty(); }
    // Total multiplicity of entries within tol of p.
    int multiplicity_near(const SpherePoint& p, double tol) const;
    // Points repeated according to multiplicity.
    std::vector<SpherePoint> expanded() const;
};

struct RootOptions {
    double cluster_radius = 1e-6;   // spherical radius for the base clustering
    double merge_radius = 1e-3;     // radius for the derivative-based merge
    double merge_tolerance = 1e-7;  // relative size of P^(j) below which a merge is accepted
    double residual_limit = 1e-6;   // relative residual above which solving fails
};

// Roots in C of a polynomial, with repetition (degree many).
std::vector<cplx> poly_roots(const Poly& p, const RootOptions& opt = {});

struct HomogeneousZero {
    SpherePoint point;
    bool exact = false;  // came from an exactly vanishing coefficient (z = 0 or z = infinity)
};

// Zeros on the sphere of the binary form of formal degree D whose chart polynomial is P.
// Always returns exactly D zeros counted with repetition.
std::vector<HomogeneousZero> homogeneous_zeros(const Poly& P, int D, const RootOptions& opt = {});

// Zeros of the binary form grouped into a divisor of degree D.
Divisor zero_divisor(const Poly& P, int D, const RootOptions& opt = {});

// Sorts entries and merges points closer than tol, adding multiplicities.
Divisor normalize_divisor(std::vector<DivisorEntry> entries, double tol);

}  // namespace rdsphere
