#pragma once

// Independent reference computations used by the tests. They deliberately avoid
// the library's own code paths (closed forms, brute force, direct sums).

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
constexpr double pi = 3.14159265358979323846;

// Spherical distance from the unit-sphere central angle (half of it).
inline double dist(cplx a, cplx b) {
    auto unit = [](cplx z, double u[3]) {
        double r2 = std::norm(z);
        u[0] = 2 * z.real() / (1 + r2);
        u[1] = 2 * z.imag() / (1 + r2);
        u[2] = (r2 - 1) / (1 + r2);
    };
    double u[3], v[3];
    unit(a, u);
    unit(b, v);
    double c = std::clamp(u[0] * v[0] + u[1] * v[1] + u[2] * v[2], -1.0, 1.0);
    return 0.5 * std::acos(c);
}

inline double dist_inf(cplx a) { return 0.5 * std::acos(std::clamp((std::norm(a) - 1) / (std::norm(a) + 1), -1.0, 1.0)); }

// Determinant by cofactor expansion; fine for tiny matrices.
inline cplx det(std::vector<std::vector<cplx>> m) {
    const std::size_t n = m.size();
    if (n == 0) return 1.0;
    if (n == 1) return m[0][0];
    cplx s = 0;
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<std::vector<cplx>> sub;
        for (std::size_t r = 1; r < n; ++r) {
            std::vector<cplx> row;
            for (std::size_t k = 0; k < n; ++k)
                if (k != c) row.push_back(m[r][k]);
            sub.push_back(row);
        }
        s += (c % 2 ? -1.0 : 1.0) * m[0][c] * det(sub);
    }
    return s;
}

// Uniform point on the sphere as a finite complex number.
template <class Rng>
cplx uniform_sphere(Rng& rng) {
    std::normal_distribution<double> n(0, 1);
    double x = n(rng), y = n(rng), z = n(rng);
    double r = std::sqrt(x * x + y * y + z * z);
    x /= r;
    y /= r;
    z /= r;
    if (z > 1 - 1e-12) z = 1 - 1e-12;
    return cplx(x, y) / (1 - z);
}

}  // namespace oracle

#include <functional>
#include <queue>

namespace oracle {

// Adaptive cubature of f over the sphere with the normalized area measure.
// Two polar charts (|z| <= 1 and |w| <= 1, z = 1/w); rectangles in (r, theta) are
// split where a 3x3 Gauss rule disagrees with its four children. Returns the sum
// and the number of function evaluations used.
inline double sphere_integral(const std::function<double(cplx)>& f, std::size_t budget, std::size_t* used = nullptr) {
    static const double gx[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
    static const double gw[3] = {5.0 / 9, 8.0 / 9, 5.0 / 9};
    std::size_t evals = 0;
    struct Rect {
        double r0, r1, t0, t1;
        int chart;
        double value, error;
        bool operator<(const Rect& o) const { return error < o.error; }
    };
    auto rule = [&](double r0, double r1, double t0, double t1, int chart) {
        double s = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double r = 0.5 * (r0 + r1) + 0.5 * (r1 - r0) * gx[i];
                double t = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * gx[j];
                cplx z = std::polar(r, t);
                if (chart == 1) z = r == 0 ? cplx(1e300) : 1.0 / z;
                double dens = r / (pi * (1 + r * r) * (1 + r * r));
                s += gw[i] * gw[j] * f(z) * dens;
                ++evals;
            }
        return s * 0.25 * (r1 - r0) * (t1 - t0);
    };
    auto make = [&](double r0, double r1, double t0, double t1, int chart) {
        double whole = rule(r0, r1, t0, t1, chart);
        double rm = 0.5 * (r0 + r1), tm = 0.5 * (t0 + t1);
        double parts = rule(r0, rm, t0, tm, chart) + rule(rm, r1, t0, tm, chart) + rule(r0, rm, tm, t1, chart) +
                       rule(rm, r1, tm, t1, chart);
        return Rect{r0, r1, t0, t1, chart, parts, std::abs(parts - whole)};
    };
    std::priority_queue<Rect> q;
    for (int chart = 0; chart < 2; ++chart)
        for (int k = 0; k < 8; ++k) q.push(make(0, 1, k * pi / 4, (k + 1) * pi / 4, chart));
    while (evals + 5 * 36 < budget) {
        Rect w = q.top();
        q.pop();
        double rm = 0.5 * (w.r0 + w.r1), tm = 0.5 * (w.t0 + w.t1);
        q.push(make(w.r0, rm, w.t0, tm, w.chart));
        q.push(make(rm, w.r1, w.t0, tm, w.chart));
        q.push(make(w.r0, rm, tm, w.t1, w.chart));
        q.push(make(rm, w.r1, tm, w.t1, w.chart));
    }
    double total = 0;
    while (!q.empty()) {
        total += q.top().value;
        q.pop();
    }
    if (used) *used = evals;
    return total;
}

}  // namespace oracle
