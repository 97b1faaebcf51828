#pragma once

// Random inputs shared by the test binaries.

#include <random>

#include "rdsphere/errors.hpp"
#include "rdsphere/ratmap.hpp"

namespace testing_helpers {

using rdsphere::cplx;

inline rdsphere::Poly random_poly(std::mt19937_64& rng, int deg) {
    std::normal_distribution<double> n(0, 1);
    std::vector<cplx> c(deg + 1);
    for (auto& v : c) v = cplx(n(rng), n(rng));
    return rdsphere::Poly(c);
}

// Coprime map with numerator and denominator degrees drawn from 0..dmax (degree >= dmin).
inline rdsphere::RationalMap random_map(std::mt19937_64& rng, int dmax, int dmin = 1) {
    while (true) {
        int df = int(rng() % (dmax + 1)), dg = int(rng() % (dmax + 1));
        if (std::max(df, dg) < dmin) continue;
        try {
            return rdsphere::RationalMap(random_poly(rng, df), random_poly(rng, dg));
        } catch (const rdsphere::PreconditionError&) {
        }
    }
}

}  // namespace testing_helpers
