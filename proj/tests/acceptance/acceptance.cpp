// One PASS/FAIL line per acceptance criterion; exit code 1 if any fails.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <unistd.h>

#include "families.hpp"
#include "helpers.hpp"
#include "oracles.hpp"
#include "rdsphere/branches.hpp"
#include "rdsphere/io.hpp"
#include "rdsphere/sphere.hpp"
#include "rdsphere/thermo.hpp"
#include "rdsphere/transfer.hpp"
#include "rdsphere/verify.hpp"

using namespace rdsphere;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

Outcome transfer_identity() {
    auto g = Grid::lattice(10000);
    bool ok = true;
    std::string detail;
    for (auto T : {RationalMap::power(2), RationalMap::power(3), RationalMap::qc(0.3)}) {
        auto t0 = Clock::now();
        auto out = apply_L(T, Potential::constant(0), GridFunction(g, 1.0));
        const double secs = seconds_since(t0);
        double err = 0;
        for (double v : out.values) err = std::max(err, std::abs(v - T.degree()) / T.degree());
        ok = ok && err < 1e-9 && secs < 1;
        detail += "deg " + std::to_string(T.degree()) + ": rel err " + num(err) + ", " + num(secs) + " s; ";
    }
    return {ok, detail};
}

Outcome entropy_deterministic() {
    auto t0 = Clock::now();
    auto est = pressure_estimate(BaseSystem::constant(RationalMap::power(2)), 8, 0.02, 1);
    const double secs = seconds_since(t0), err = std::abs(est.estimate - std::log(2.0));
    return {err < 0.05 && secs < 60, "estimate " + num(est.estimate) + " vs ln 2, |diff| " + num(err) + ", " + num(secs) + " s"};
}

Outcome entropy_random() {
    auto sys = BaseSystem::iid({{RationalMap::power(2), Potential::constant(0), 0.5, "z2"},
                                {RationalMap::power(3), Potential::constant(0), 0.5, "z3"}},
                               77);
    auto t0 = Clock::now();
    auto est = pressure_estimate(sys, 8, 0.05, 100);
    const double secs = seconds_since(t0), target = 0.5 * (std::log(2.0) + std::log(3.0));
    const double err = std::abs(est.estimate - target);
    return {est.samples >= 100 && err < 0.1 && secs < 300,
            "n 8, eps 0.05, " + std::to_string(est.samples) + " samples: estimate " + num(est.estimate) + " +- " +
                num(est.half_width) + " vs " + num(target) + ", " + num(secs) + " s"};
}

Outcome pressure_lambda() {
    auto r = pressure_vs_lambda(families::z2_small_phi(), 8, 0.02, 1);
    return {r.gap < 0.1, "estimate " + num(r.pressure.estimate) + ", lambda " + num(r.lambda_mean) + ", gap " + num(r.gap)};
}

Outcome equilibrium_z2() {
    auto t0 = Clock::now();
    SequenceOperators ops(sample_sequence(BaseSystem::constant(RationalMap::power(2)), -20, 40), Grid::lattice(4000));
    auto e = eigen_solution(ops, 0, 1, 8);
    auto conf = conformal_measure(ops, e.g.front(), std::pow(2.0, 12), 0, 12);
    auto mu = equilibrium_measure(e.g.front(), conf.nu);
    const double secs = seconds_since(t0);
    double off = 0, mom = 0;
    for (const auto& p : mu.points) off = std::max(off, std::abs(std::abs(p.value()) - 1));
    for (int k = 1; k <= 4; ++k) mom = std::max(mom, std::abs(mu.moment(k)));
    const double mass = std::abs(mu.total() - 1);
    return {off < 1e-3 && mom < 0.02 && mass < 1e-12 && secs < 30,
            std::to_string(mu.size()) + " atoms, max ||z|-1| " + num(off) + ", max |moment| " + num(mom) + ", |mass-1| " +
                num(mass) + ", " + num(secs) + " s"};
}

Outcome eigen_residual() {
    auto g = Grid::lattice(6000);
    SequenceOperators ops(sample_sequence(families::z2_small_phi(), -25, 40), g);
    auto e = eigen_solution(ops, 0, 8, 20);
    auto L1 = normalized_operator(ops, e, GridFunction(g, 1.0));
    // sup |(Lhat[1] - 1) g_n| is the residual itself.
    double weighted = 0;
    for (std::size_t i = 0; i < g->size(); ++i) weighted = std::max(weighted, std::abs(L1.values[i] - 1) * e.g.back().values[i]);
    const double agree = std::abs(weighted - e.residual);
    return {e.residual < 1e-2 && agree <= 1e-9 * std::max(e.residual, 1e-300) + 1e-15,
            "residual " + num(e.residual) + ", Lhat[1] weighted residual " + num(weighted) + ", difference " + num(agree)};
}

Outcome oscillation() {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(-1, 1);
    int violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        auto T = testing_helpers::random_map(rng, 3);
        auto phi = Potential::linear(u(rng), Vec3{u(rng), u(rng), u(rng)});
        Vec3 a{u(rng), u(rng), u(rng)}, b{0.4 * u(rng), 0.4 * u(rng), 0.4 * u(rng)};
        const double c = u(rng);
        auto f = [=](const SpherePoint& p) { return c + dot(to_unit(p), a); };
        auto gf = [=](const SpherePoint& p) { return 2.0 + dot(to_unit(p), b) + 0.5 * std::sin(3 * to_unit(p).z); };
        SpherePoint center(oracle::uniform_sphere(rng));
        const double radius = 0.05 + 0.5 * std::abs(u(rng));
        std::vector<SpherePoint> K;
        for (int s = 0; s < 12; ++s) K.push_back(geodesic_point(center, radius * std::abs(u(rng)), 3 * s));
        violations += oscillation_check(T, phi, f, gf, K).violations(1e-12);
    }
    auto seq = sample_sequence(families::z2_perturbation(21), 0, 20);
    auto f = [](const SpherePoint& p) { return 1.5 + to_unit(p).x; };
    auto gf = [](const SpherePoint& p) { return 2.0 + 0.5 * to_unit(p).y; };
    std::vector<SpherePoint> K;
    for (const auto& p : spiral_lattice(3000))
        if (julia_flag(seq, p, 0.01, 1e3, 20)) K.push_back(p);
    if (K.size() > 40) K.resize(40);
    int drop_n = -1;
    if (K.size() >= 10) {
        auto osc = ratio_oscillation(seq, 0, 12, f, gf, K);
        for (int n = 1; n <= 12 && drop_n < 0; ++n)
            if (osc[std::size_t(n)] < 0.1 * osc[0]) drop_n = n;
    }
    return {violations == 0 && drop_n > 0, std::to_string(violations) + " violations on 1000 instances; oscillation below 10% at n = " +
                                                std::to_string(drop_n) + " on " + std::to_string(K.size()) + " probes"};
}

Outcome divisors() {
    std::mt19937_64 rng(16);
    int bad = 0, maxdeg = 0;
    for (int t = 0; t < 200; ++t) {
        auto T = testing_helpers::random_map(rng, 6);
        const int d = T.degree();
        maxdeg = std::max(maxdeg, d);
        SpherePoint p(oracle::uniform_sphere(rng));
        bad += preimages(T, p).degree() != d;
        bad += ramification_divisor(T).degree() != (d >= 2 ? 2 * d - 2 : 0);
        bad += fixed_divisor(T).degree() != d + 1;
    }
    return {bad == 0, std::to_string(bad) + " mismatches over 200 maps, max degree " + std::to_string(maxdeg)};
}

Outcome branch_census() {
    LiftOptions coarse;
    coarse.rays = 16;
    coarse.steps = 8;
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1, 1);
    int failures = 0, families_run = 0;
    for (int d : {2, 3}) {
        auto Td = RationalMap::power(d);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<DiskDomain> ds;
            const int k = 2 + int(rng() % 5);
            for (int i = 0; i < k; ++i)
                ds.push_back(make_disk(SpherePoint(1.5 * u(rng), 1.5 * u(rng)), 0.05 + 0.45 * std::abs(u(rng))));
            const double w = std::abs(u(rng)), c = 0.01 + 0.3 * w * w;
            auto cen = good_branch_census(Td, ds, c, coarse);
            ++families_run;
            failures += !(cen.bound_holds && cen.good + cen.bad == d * k && cen.bad <= 2 * cen.r * d * d + cen.r / c);
        }
    }
    auto seq = sample_sequence(BaseSystem::constant(RationalMap::power(2)), 0, 5);
    auto one = [](const SpherePoint&) { return 1.0; };
    auto ab = AB_decomposition(seq, 3, {make_disk(SpherePoint(0.5), 0.1)}, 0.5, one);
    auto rseq = sample_sequence(families::z2_perturbation(8, 0.3), 0, 5);
    auto f = [](const SpherePoint& p) { return 1.2 + to_unit(p).y; };
    auto rab = AB_decomposition(rseq, 3, {make_disk(SpherePoint(0.9, 0.3), 0.25)}, 0.35, f);
    const double resid = std::max(ab.telescoping_residual, rab.telescoping_residual);
    std::size_t leaves = 0;
    for (const auto& node : ab.tree) leaves += node.level == 0;
    return {failures == 0 && resid < 1e-6 && leaves == 8,
            std::to_string(failures) + " census failures on " + std::to_string(families_run) +
                " disk families; telescoping residual " + num(resid) + " at n = 3, " + std::to_string(leaves) + " leaves"};
}

Outcome lemma_battery() {
    auto t0 = Clock::now();
    auto reports = run_battery();
    const double secs = seconds_since(t0);
    bool ok = secs < 600;
    std::string detail;
    for (const auto& r : reports) {
        ok = ok && r.passed() && r.trials >= 1000;
        detail += r.lemma + " " + std::to_string(r.violations) + "/" + std::to_string(r.trials) + "; ";
    }
    double sharp = 0;
    for (double c : {0.5, 1.0, 2.0}) {
        const auto s = koebe_sharpness(c);
        sharp = std::max(sharp, std::abs(s.derivative - s.bound));
    }
    ok = ok && sharp < 1e-6;
    return {ok, detail + "sharpness gap " + num(sharp) + ", " + num(secs) + " s"};
}

Outcome partition() {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0, 1);
    int diam_fail = 0, count_fail = 0, center_fail = 0;
    double worst = -INFINITY;
    for (int k = 0; k <= 5; ++k) {
        auto part = partition_Ak(k);
        PartitionProbe probe(part);
        if (probe.uncovered() > 0) ++diam_fail;
        const double cap = std::ldexp(1.0, -k);
        std::vector<std::vector<SpherePoint>> members(part.centers.size());
        for (int t = 0; t < 1000; ++t) {
            SpherePoint p(oracle::uniform_sphere(rng));
            const int c = part.cell_of(p);
            if (c < 0 || dist_s(p, part.centers[std::size_t(c)]) > part.radius) ++diam_fail;
            else if (members[std::size_t(c)].size() < 12) members[std::size_t(c)].push_back(p);
            // delta log-uniform over [2^-(k+4), pi/2].
            const double lo = std::log(std::ldexp(1.0, -(k + 4))), hi = std::log(kHalfPi);
            const double delta = std::exp(lo + (hi - lo) * u(rng));
            const double bound = 6 * std::log(2.0) + 2 * std::max(0.0, std::log(delta / std::ldexp(1.0, -(k - 1))));
            const auto cnt = probe.count(p, delta);
            const double margin = bound - std::log(double(std::max<std::size_t>(cnt.sampled, 1)));
            worst = std::max(worst, -margin);
            count_fail += margin < 0 || cnt.sampled == 0;
            center_fail += bound < std::log(double(std::max<std::size_t>(cnt.center_bound, 1)));
        }
        for (const auto& m : members)
            for (std::size_t a = 0; a < m.size(); ++a)
                for (std::size_t b = a + 1; b < m.size(); ++b) diam_fail += dist_s(m[a], m[b]) > cap;
    }
    return {diam_fail == 0 && count_fail == 0,
            std::to_string(diam_fail) + " diameter failures, " + std::to_string(count_fail) +
                " count-bound failures over 6000 probes (max log excess " + num(worst) + "); center-radius upper count exceeds the bound " +
                std::to_string(center_fail) + " times"};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Outcome cli_reproducible() {
    const auto root = fs::temp_directory_path() / ("rdsphere_acceptance_" + std::to_string(getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
    const auto cfg = root / "random.ini";
    std::ofstream(cfg) << "[system]\npreset = z2z3\n[julia]\nsize = 256\n";
    int runs = 0, differ = 0, failed = 0;
    for (const std::string& config : {std::string(), cfg.string()})
        for (const std::string cmd : {"julia", "pressure", "measure", "verify", "simulate"}) {
            std::vector<fs::path> dirs;
            for (int rep = 0; rep < 2; ++rep) {
                dirs.push_back(root / (cmd + std::to_string(runs) + "_" + std::to_string(rep)));
                std::string line = std::string(RDSPHERE_CLI_PATH) + " " + cmd + " --seed 7 --out " + dirs.back().string();
                if (!config.empty()) line += " --config " + config;
                failed += std::system((line + " > /dev/null 2>&1").c_str()) != 0;
            }
            ++runs;
            std::vector<std::string> a, b;
            for (const auto& e : fs::directory_iterator(dirs[0])) a.push_back(e.path().filename().string());
            for (const auto& e : fs::directory_iterator(dirs[1])) b.push_back(e.path().filename().string());
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            if (a != b || a.empty()) {
                ++differ;
                continue;
            }
            for (const auto& name : a) differ += slurp(dirs[0] / name) != slurp(dirs[1] / name);
        }
    fs::remove_all(root);
    return {differ == 0 && failed == 0, std::to_string(runs) + " command/config pairs run twice: " + std::to_string(differ) +
                                            " differing outputs, " + std::to_string(failed) + " nonzero exits"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"AC1 transfer identity", transfer_identity},
        {"AC2 entropy of z^2", entropy_deterministic},
        {"AC3 entropy of iid z^2, z^3", entropy_random},
        {"AC4 pressure against eigenvalues", pressure_lambda},
        {"AC5 equilibrium measure of z^2", equilibrium_z2},
        {"AC6 eigen-identity residual", eigen_residual},
        {"AC7 oscillation contraction", oscillation},
        {"AC8 divisor counts", divisors},
        {"AC9 inverse-branch census", branch_census},
        {"AC10 lemma battery", lemma_battery},
        {"AC11 partition lemma", partition},
        {"AC12 CLI reproducibility", cli_reproducible},
    };
    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
