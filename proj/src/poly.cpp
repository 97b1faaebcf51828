#include "rdsphere/poly.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "rdsphere/errors.hpp"

namespace rdsphere {

namespace {

void trim(std::vector<cplx>& c, double rel) {
    double mx = 0;
    for (const auto& v : c) mx = std::max(mx, std::abs(v));
    const double thr = rel * mx;
    while (!c.empty() && (std::abs(c.back()) <= thr || c.back() == cplx(0.0))) c.pop_back();
}

}  // namespace

Poly::Poly(std::vector<cplx> coeffs) : c_(std::move(coeffs)) { trim(c_, kTrimRelative); }

Poly Poly::raw(std::vector<cplx> coeffs) {
    Poly p;
    p.c_ = std::move(coeffs);
    while (!p.c_.empty() && p.c_.back() == cplx(0.0)) p.c_.pop_back();
    return p;
}

Poly Poly::monomial(int k, cplx c) {
    require(k >= 0, "negative monomial degree");
    std::vector<cplx> v(k + 1, 0.0);
    v[k] = c;
    return Poly(v);
}

cplx Poly::operator()(cplx z) const {
    cplx acc = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
    return acc;
}

void Poly::eval2(cplx z, cplx& p, cplx& dp) const {
    p = 0;
    dp = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
        dp = dp * z + p;
        p = p * z + *it;
    }
}

Poly Poly::derivative() const {
    if (c_.size() <= 1) return Poly();
    std::vector<cplx> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = double(i) * c_[i];
    return Poly::raw(std::move(d));
}

Poly Poly::reversed(int formal) const {
    require(formal >= degree(), "reversal degree below polynomial degree");
    if (formal < 0) return Poly();
    std::vector<cplx> r(formal + 1, 0.0);
    for (int i = 0; i <= degree(); ++i) r[formal - i] = c_[i];
    return Poly::raw(std::move(r));
}

double Poly::norm2() const {
    double s = 0;
    for (const auto& v : c_) s += std::norm(v);
    return std::sqrt(s);
}

double Poly::max_abs() const {
    double m = 0;
    for (const auto& v : c_) m = std::max(m, std::abs(v));
    return m;
}

Poly operator+(const Poly& a, const Poly& b) {
    std::vector<cplx> r(std::max(a.c_.size(), b.c_.size()), 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i) r[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) r[i] += b.c_[i];
    return Poly::raw(std::move(r));
}

Poly operator-(const Poly& a, const Poly& b) { return a + cplx(-1.0) * b; }

Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly();
    std::vector<cplx> r(a.c_.size() + b.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return Poly::raw(std::move(r));
}

Poly operator*(cplx s, const Poly& a) {
    std::vector<cplx> r = a.c_;
    for (auto& v : r) v *= s;
    return Poly::raw(std::move(r));
}

Poly pow(const Poly& p, int k) {
    require(k >= 0, "negative polynomial power");
    Poly result = Poly::constant(1.0), base = p;
    while (k) {
        if (k & 1) result = result * base;
        k >>= 1;
        if (k) base = base * base;
    }
    return result;
}

cplx resultant(const Poly& p, const Poly& q, int m, int n) {
    require(m >= 0 && n >= 0, "negative formal degree");
    require(p.degree() <= m && q.degree() <= n, "polynomial degree exceeds formal degree");
    if (m == 0 && n == 0) return 1.0;
    if (m == 0) return std::pow(p.coeff(0), n);
    if (n == 0) return std::pow(q.coeff(0), m);
    const int N = m + n;
    Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(N, N);
    for (int r = 0; r < n; ++r)
        for (int i = 0; i <= m; ++i) S(r, r + i) = p.coeff(m - i);
    for (int r = 0; r < m; ++r)
        for (int i = 0; i <= n; ++i) S(n + r, r + i) = q.coeff(n - i);
    return S.partialPivLu().determinant();
}

double relative_resultant(const Poly& p, const Poly& q, int m, int n) {
    double np = p.norm2(), nq = q.norm2();
    if (np == 0 || nq == 0) return 0.0;
    // Scale first so the determinant stays in range.
    Poly ps = cplx(1.0 / np) * p, qs = cplx(1.0 / nq) * q;
    return std::abs(resultant(ps, qs, m, n));
}

}  // namespace rdsphere
