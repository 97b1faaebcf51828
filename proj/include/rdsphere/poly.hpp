#pragma once

#include <complex>
#include <vector>

#include "rdsphere/sphere.hpp"

namespace rdsphere {

inline constexpr double kTrimRelative = 1e-12;

// Complex polynomial with ascending coefficients; negligible top coefficients are trimmed.
class Poly {
public:
    Poly() = default;
    Poly(std::vector<cplx> coeffs);
    Poly(std::initializer_list<cplx> coeffs) : Poly(std::vector<cplx>(coeffs)) {}
    static Poly constant(cplx c) { return Poly({c}); }
    static Poly monomial(int k, cplx c = 1.0);
    // Coefficients used verbatim, only exact zeros are trimmed.
    static Poly raw(std::vector<cplx> coeffs);

    // -1 for the zero polynomial.
    int degree() const { return int(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const std::vector<cplx>& coeffs() const { return c_; }
    cplx coeff(int i) const { return (i >= 0 && i < int(c_.size())) ? c_[i] : cplx(0.0); }
    cplx operator()(cplx z) const;
    // Value and first derivative by Horner's scheme.
    void eval2(cplx z, cplx& p, cplx& dp) const;

    Poly derivative() const;
    // z^formal * p(1/z); requires formal >= degree.
    Poly reversed(int formal) const;
    double norm2() const;
    double max_abs() const;

    friend Poly operator+(const Poly& a, const Poly& b);
    friend Poly operator-(const Poly& a, const Poly& b);
    friend Poly operator*(const Poly& a, const Poly& b);
    friend Poly operator*(cplx s, const Poly& a);

private:
    std::vector<cplx> c_;
};

// Power of a polynomial by repeated squaring.
Poly pow(const Poly& p, int k);

// Sylvester resultant of p and q padded to formal degrees m and n.
cplx resultant(const Poly& p, const Poly& q, int m, int n);
// |Res| scaled by ||p||^n ||q||^m, which lies in [0, 1] by Hadamard's inequality.
double relative_resultant(const Poly& p, const Poly& q, int m, int n);

}  // namespace rdsphere
