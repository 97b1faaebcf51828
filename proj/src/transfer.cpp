#include "rdsphere/transfer.hpp"

#include <algorithm>
#include <cmath>

#include "rdsphere/errors.hpp"

namespace rdsphere {

double PointMassMeasure::total() const {
    double s = 0;
    for (double w : weights) s += w;
    return s;
}

void PointMassMeasure::normalize() {
    const double t = total();
    require(t > 0, "cannot normalize a measure of zero mass");
    for (double& w : weights) w /= t;
}

double PointMassMeasure::integrate(const SphereFn& f) const {
    double s = 0;
    for (std::size_t i = 0; i < points.size(); ++i) s += weights[i] * f(points[i]);
    return s;
}

cplx PointMassMeasure::moment(int k) const {
    cplx s = 0;
    for (std::size_t i = 0; i < points.size(); ++i)
        if (!points[i].is_inf()) s += weights[i] * std::pow(points[i].value(), k);
    return s;
}

double Cocycle::log_sum() const {
    double s = 0;
    for (double v : values) s += std::log(v);
    return s;
}

TransferOperator::TransferOperator(const RationalMap& T, const Potential& phi, GridPtr grid, bool parallel)
    : table_(parallel ? build_table_parallel(T, phi, grid) : build_table_serial(T, phi, grid)), parallel_(parallel) {}

GridFunction TransferOperator::apply(const GridFunction& f) const {
    require(f.grid && f.size() == table_.grid->size(), "grid function lives on another grid");
    std::vector<double> out;
    if (parallel_)
        apply_table_parallel(table_, f.values, out);
    else
        apply_table_serial(table_, f.values, out);
    return GridFunction(table_.grid, std::move(out));
}

GridFunction apply_L(const RationalMap& T, const Potential& phi, const GridFunction& f) {
    return TransferOperator(T, phi, f.grid).apply(f);
}

SequenceOperators::SequenceOperators(StepSequence seq, GridPtr grid, AnchorOptions anchors, bool parallel)
    : seq_(std::move(seq)), grid_(std::move(grid)), anchor_opt_(anchors), parallel_(parallel) {
    require(grid_ != nullptr, "missing grid");
    require(anchor_opt_.horizon >= 1, "anchor horizon must be at least 1");
}

const TransferOperator& SequenceOperators::at(long long j) const {
    auto it = by_index_.find(j);
    if (it != by_index_.end()) return *it->second;
    const std::string key = seq_.map(j).to_text() + "|" + seq_.potential(j).key();
    auto c = cache_.find(key);
    if (c == cache_.end())
        c = cache_.emplace(key, std::make_shared<const TransferOperator>(seq_.map(j), seq_.potential(j), grid_, parallel_))
                .first;
    by_index_[j] = c->second;
    return *c->second;
}

std::size_t SequenceOperators::anchor(long long j) const {
    auto it = anchors_.find(j);
    if (it != anchors_.end()) return it->second;
    const int H = anchor_opt_.horizon;
    require(seq_.contains(j) && seq_.contains(j + H - 1), "sequence window too short for the anchor horizon");
    StepSequence w = seq_.window(j, j + H - 1);
    std::vector<SpherePoint> avoid;
    try {
        avoid = exceptional_estimate(w, H);
    } catch (const PreconditionError&) {
        // All steps of degree one: nothing is exceptional in the ramified sense.
    }
    const long n = long(grid_->size());
    std::vector<double> stat(std::size_t(n), -INFINITY);
#pragma omp parallel for schedule(dynamic, 128) num_threads(kernel_threads())
    for (long i = 0; i < n; ++i) {
        SpherePoint p = grid_->point(std::size_t(i));
        bool near = false;
        for (const auto& a : avoid) near = near || dist_s(p, a) < anchor_opt_.kappa;
        if (near) continue;
        double logd = 0, best = -INFINITY;
        for (int k = 0; k < H; ++k) {
            double d = 0;
            p = w.map(j + k).eval_deriv(p, d);
            logd += std::log(d);
            best = std::max(best, logd);
        }
        stat[std::size_t(i)] = best;
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < stat.size(); ++i)
        if (stat[i] > stat[best]) best = i;
    require(stat[best] > -INFINITY, "no admissible anchor point on the grid");
    anchors_[j] = best;
    return best;
}

GridFunction apply_L_iter(const SequenceOperators& ops, long long m, int n, const GridFunction& f) {
    require(n >= 1, "iteration count must be at least 1");
    GridFunction h = f;
    for (long long j = m; j < m + n; ++j) h = ops.at(j).apply(h);
    return h;
}

namespace {

// Systematic resampling to target atoms of equal weight; deterministic in (seed, level).
void resample(std::vector<SpherePoint>& pts, std::vector<double>& w, std::size_t target, std::uint64_t seed,
              long long level) {
    double total = 0;
    for (double v : w) total += v;
    Rng rng(seed, std::uint64_t(level) ^ 0x7e5a);
    const double step = total / double(target);
    double u = rng.uniform() * step;
    std::vector<SpherePoint> np;
    std::vector<double> nw;
    np.reserve(target);
    nw.reserve(target);
    double acc = 0;
    std::size_t i = 0;
    for (std::size_t k = 0; k < target; ++k) {
        const double mark = u + double(k) * step;
        while (i + 1 < w.size() && acc + w[i] <= mark) acc += w[i++];
        np.push_back(pts[i]);
        nw.push_back(step);
    }
    pts.swap(np);
    w.swap(nw);
}

}  // namespace

PreimageTree preimage_tree(const StepSequence& seq, long long m, int n, const SpherePoint& p, std::size_t cap,
                           std::uint64_t seed) {
    require(n >= 0, "tree depth must be nonnegative");
    require(cap >= 10, "tree cap too small");
    PreimageTree tree;
    tree.leaves = {p};
    tree.weights = {1.0};
    for (long long j = m + n - 1; j >= m; --j) {
        const auto& T = seq.map(j);
        const auto& phi = seq.potential(j);
        const long count = long(tree.leaves.size());
        std::vector<std::vector<DivisorEntry>> kids(tree.leaves.size());
#pragma omp parallel for schedule(dynamic, 64) num_threads(kernel_threads())
        for (long i = 0; i < count; ++i) kids[std::size_t(i)] = preimages(T, tree.leaves[std::size_t(i)]).entries;
        std::vector<SpherePoint> pts;
        std::vector<double> w;
        pts.reserve(tree.leaves.size() * std::size_t(T.degree()));
        w.reserve(pts.capacity());
        for (std::size_t i = 0; i < kids.size(); ++i)
            for (const auto& e : kids[i]) {
                pts.push_back(e.point);
                w.push_back(tree.weights[i] * double(e.multiplicity) * std::exp(phi(e.point)));
            }
        if (pts.size() > cap) {
            resample(pts, w, cap / 10, seed, j);
            tree.resampled = true;
        }
        tree.leaves.swap(pts);
        tree.weights.swap(w);
    }
    return tree;
}

double tree_apply(const StepSequence& seq, long long m, int n, const SphereFn& f, const SpherePoint& p) {
    auto tree = preimage_tree(seq, m, n, p);
    double s = 0;
    for (std::size_t i = 0; i < tree.leaves.size(); ++i) s += tree.weights[i] * f(tree.leaves[i]);
    return s;
}

Density backward_density(const SequenceOperators& ops, long long j, int depth, bool report_cauchy) {
    require(depth >= 1, "density depth must be at least 1");
    Density out;
    out.anchor = ops.anchor(j);
    GridFunction one(ops.grid(), 1.0);
    auto normalized = [&](int k) {
        GridFunction h = apply_L_iter(ops, j - k, k, one);
        if (!(h.min() > 0)) throw NumericalError("backward iterate is not positive");
        const double a = h.values[out.anchor];
        for (double& v : h.values) v /= a;
        return h;
    };
    if (report_cauchy) {
        GridFunction prev = normalized(1);
        for (int k = 2; k <= depth; ++k) {
            GridFunction cur = normalized(k);
            double s = 0;
            for (std::size_t i = 0; i < cur.size(); ++i)
                s = std::max(s, std::abs(std::log(cur.values[i]) - std::log(prev.values[i])));
            out.cauchy.push_back(s);
            prev = std::move(cur);
        }
        out.g = std::move(prev);
    } else {
        out.g = normalized(depth);
    }
    return out;
}

Cocycle lambda_cocycle(const SequenceOperators& ops, long long m, const std::vector<GridFunction>& g) {
    require(g.size() >= 2, "need densities at two or more consecutive times");
    Cocycle c;
    c.first = m;
    for (std::size_t k = 0; k + 1 < g.size(); ++k) {
        const long long j = m + static_cast<long long>(k);
        const std::size_t p = ops.anchor(j + 1);
        GridFunction Lg = ops.at(j).apply(g[k]);
        double v = Lg.values[p] / g[k + 1].values[p];
        if (!(v > 0)) throw NumericalError("nonpositive eigenvalue estimate");
        c.values.push_back(v);
    }
    return c;
}

EigenSolution eigen_solution(const SequenceOperators& ops, long long m, int n, int depth) {
    require(n >= 1, "horizon must be at least 1");
    EigenSolution e;
    e.first = m;
    e.n = n;
    for (long long j = m; j <= m + n; ++j) e.g.push_back(backward_density(ops, j, depth).g);
    e.lambda = lambda_cocycle(ops, m, e.g);
    GridFunction Lg = apply_L_iter(ops, m, n, e.g.front());
    const std::size_t p = ops.anchor(m + n);
    e.lambda_total = Lg.values[p] / e.g.back().values[p];
    double r = 0;
    for (std::size_t i = 0; i < Lg.size(); ++i) r = std::max(r, std::abs(Lg.values[i] - e.lambda_total * e.g.back().values[i]));
    e.residual = r / e.lambda_total;
    e.cocycle_gap = std::abs(std::log(e.lambda_total) - e.lambda.log_sum());
    return e;
}

ConformalResult conformal_measure(const SequenceOperators& ops, const GridFunction& g_m, double lambda_total,
                                  long long m, int n) {
    require(lambda_total > 0, "eigenvalue must be positive");
    const SpherePoint p = ops.grid()->point(ops.anchor(m + n));
    auto tree = preimage_tree(ops.sequence(), m, n, p);
    ConformalResult r;
    r.resampled = tree.resampled;
    r.nu.points = std::move(tree.leaves);
    r.nu.weights = std::move(tree.weights);
    double pairing = 0;
    for (std::size_t i = 0; i < r.nu.size(); ++i) {
        r.nu.weights[i] /= lambda_total;
        pairing += r.nu.weights[i] * g_m(r.nu.points[i]);
    }
    require(pairing > 0, "conformal measure pairs to zero with g");
    r.raw_pairing = pairing;
    for (double& w : r.nu.weights) w /= pairing;
    return r;
}

PointMassMeasure equilibrium_measure(const GridFunction& g, const PointMassMeasure& nu) {
    PointMassMeasure mu = nu;
    for (std::size_t i = 0; i < mu.size(); ++i) mu.weights[i] *= g(mu.points[i]);
    mu.normalize();
    return mu;
}

std::vector<SphereFn> bl_battery() {
    std::vector<SphereFn> out;
    // Coordinates: sup 1, Lipschitz 2 in d_s (chord = 2 sin d).
    for (int a = 0; a < 3; ++a)
        out.push_back([a](const SpherePoint& p) {
            Vec3 u = to_unit(p);
            return (a == 0 ? u.x : a == 1 ? u.y : u.z) / 3.0;
        });
    // Products of coordinates: sup 1, Lipschitz 4.
    for (int a = 0; a < 3; ++a)
        out.push_back([a](const SpherePoint& p) {
            Vec3 u = to_unit(p);
            return (a == 0 ? u.x * u.y : a == 1 ? u.y * u.z : u.z * u.x) / 5.0;
        });
    // Tents of radius 0.4 at the octahedron and cube vertices: sup 1, Lipschitz 2.5.
    std::vector<Vec3> centers = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    const double s = 1 / std::sqrt(3.0);
    for (int a : {-1, 1})
        for (int b : {-1, 1})
            for (int c : {-1, 1}) centers.push_back(Vec3{a * s, b * s, c * s});
    for (const auto& c : centers) {
        SpherePoint cp = from_unit(c);
        out.push_back([cp](const SpherePoint& p) { return std::max(0.0, 1 - dist_s(p, cp) / 0.4) / 3.5; });
    }
    return out;
}

double bl_distance(const PointMassMeasure& mu, const PointMassMeasure& sigma) {
    double d = 0;
    for (const auto& f : bl_battery()) d = std::max(d, std::abs(mu.integrate(f) - sigma.integrate(f)));
    return d;
}

PointMassMeasure pushforward(const StepSequence& seq, long long m, int n, const PointMassMeasure& mu) {
    PointMassMeasure out = mu;
    for (auto& p : out.points)
        for (long long j = m; j < m + n; ++j) p = seq.map(j).eval(p);
    return out;
}

PushforwardReport pushforward_check(const SequenceOperators& ops, long long m, int n, int depth, int density_depth) {
    auto build = [&](long long j) {
        GridFunction g = backward_density(ops, j, density_depth).g;
        auto nu = conformal_measure(ops, g, 1.0, j, depth).nu;
        return equilibrium_measure(g, nu);
    };
    PushforwardReport r;
    r.transported = pushforward(ops.sequence(), m, n, build(m));
    r.target = build(m + n);
    r.discrepancy = bl_distance(r.transported, r.target);
    return r;
}

GridFunction normalized_operator(const SequenceOperators& ops, const EigenSolution& eig, const GridFunction& f) {
    GridFunction fg = f;
    for (std::size_t i = 0; i < fg.size(); ++i) fg.values[i] *= eig.g.front().values[i];
    GridFunction out = apply_L_iter(ops, eig.first, eig.n, fg);
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] /= eig.lambda_total * eig.g.back().values[i];
    return out;
}

PsiWeights psi_weights(const SequenceOperators& ops, const EigenSolution& eig, std::size_t i) {
    auto tree = preimage_tree(ops.sequence(), eig.first, eig.n, ops.grid()->point(i));
    PsiWeights w;
    const double denom = eig.lambda_total * eig.g.back().values[i];
    for (std::size_t k = 0; k < tree.leaves.size(); ++k) {
        double v = tree.weights[k] * eig.g.front()(tree.leaves[k]) / denom;
        w.points.push_back(tree.leaves[k]);
        w.weights.push_back(v);
        w.sum += v;
    }
    return w;
}

int OscillationReport::violations(double tol) const {
    const double scale = std::max({1.0, std::abs(sup_rhs), std::abs(inf_rhs)});
    int v = 0;
    v += sup_lhs > sup_rhs + tol * scale;
    v += inf_lhs < inf_rhs - tol * scale;
    v += osc_lhs() > osc_rhs() + 2 * tol * scale;
    return v;
}

OscillationReport oscillation_check(const RationalMap& T, const Potential& phi, const SphereFn& f, const SphereFn& g,
                                    const std::vector<SpherePoint>& K) {
    require(!K.empty(), "empty probe set");
    OscillationReport r;
    r.sup_lhs = r.sup_rhs = -INFINITY;
    r.inf_lhs = r.inf_rhs = INFINITY;
    for (const auto& p : K) {
        double Lf = 0, Lg = 0;
        for (const auto& e : preimages(T, p).entries) {
            const double w = double(e.multiplicity) * std::exp(phi(e.point));
            const double fx = f(e.point), gx = g(e.point);
            require(gx > 0, "test function g must be positive");
            Lf += w * fx;
            Lg += w * gx;
            r.sup_rhs = std::max(r.sup_rhs, fx / gx);
            r.inf_rhs = std::min(r.inf_rhs, fx / gx);
        }
        r.sup_lhs = std::max(r.sup_lhs, Lf / Lg);
        r.inf_lhs = std::min(r.inf_lhs, Lf / Lg);
    }
    return r;
}

std::vector<double> ratio_oscillation(const StepSequence& seq, long long m, int n, const SphereFn& f, const SphereFn& g,
                                      const std::vector<SpherePoint>& K) {
    require(!K.empty(), "empty probe set");
    std::vector<double> out;
    for (int k = 0; k <= n; ++k) {
        double lo = INFINITY, hi = -INFINITY;
        for (const auto& p : K) {
            auto tree = preimage_tree(seq, m, k, p);
            double a = 0, b = 0;
            for (std::size_t i = 0; i < tree.leaves.size(); ++i) {
                a += tree.weights[i] * f(tree.leaves[i]);
                b += tree.weights[i] * g(tree.leaves[i]);
            }
            lo = std::min(lo, a / b);
            hi = std::max(hi, a / b);
        }
        out.push_back(hi - lo);
    }
    return out;
}

}  // namespace rdsphere
