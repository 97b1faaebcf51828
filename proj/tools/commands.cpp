#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rdsphere/errors.hpp"
#include "rdsphere/io.hpp"
#include "rdsphere/kernels.hpp"
#include "rdsphere/thermo.hpp"
#include "rdsphere/transfer.hpp"
#include "rdsphere/verify.hpp"

namespace rdsphere::cli {

namespace {

// Collects outputs in memory, then writes them and a manifest that lists their hashes.
class Run {
public:
    Run(const std::string& command, const RunConfig& cfg) : command_(command), cfg_(cfg), stem_(output_stem(command, cfg)) {}

    void output(const std::string& ext, const std::string& content) { outputs_.emplace_back(stem_ + "." + ext, content); }
    void record(const std::string& key, const std::string& value) { records_.emplace_back(key, value); }
    void record(const std::string& key, double value) { record(key, fmt(value)); }

    CommandResult finish(int exit_code) {
        std::error_code ec;
        std::filesystem::create_directories(cfg_.out, ec);
        CommandResult res;
        res.exit_code = exit_code;
        std::ostringstream man;
        man << "command = " << command_ << "\nversion = " << kVersion << "\nconfig_hash = "
            << hex64(fnv1a(command_ + "\n" + cfg_.canonical())) << "\nseed = " << cfg_.seed << "\nexit_code = " << exit_code
            << "\n";
        man << "\n[outputs]\n";
        for (const auto& [name, content] : outputs_) {
            write(name, content);
            res.files.push_back((std::filesystem::path(cfg_.out) / name).string());
            man << name << " = fnv1a:" << hex64(fnv1a(content)) << " bytes:" << content.size() << '\n';
        }
        man << "\n[results]\n";
        for (const auto& [k, v] : records_) man << k << " = " << v << '\n';
        man << "\n" << cfg_.canonical();
        const std::string name = stem_ + ".manifest.txt";
        write(name, man.str());
        res.files.push_back((std::filesystem::path(cfg_.out) / name).string());
        return res;
    }

private:
    void write(const std::string& name, const std::string& content) const {
        const auto path = std::filesystem::path(cfg_.out) / name;
        std::ofstream f(path, std::ios::binary);
        f << content;
        f.close();
        if (!f) throw IoError("cannot write '" + path.string() + "'");
    }

    std::string command_;
    const RunConfig& cfg_;
    std::string stem_;
    std::vector<std::pair<std::string, std::string>> outputs_;
    std::vector<std::pair<std::string, std::string>> records_;
};

PressureOptions pressure_options(const RunConfig& cfg) {
    PressureOptions p;
    p.seed = cfg.seed;
    p.candidates.net = cfg.net;
    p.candidates.delta = cfg.delta;
    p.candidates.growth = cfg.growth;
    p.candidates.horizon = cfg.horizon;
    return p;
}

std::string point_cols(const SpherePoint& p) {
    if (p.is_inf()) return "0,0,1";
    return fmt(p.value().real()) + "," + fmt(p.value().imag()) + ",0";
}

}  // namespace

std::string output_stem(const std::string& command, const RunConfig& cfg) {
    return command + "-" + hex64(fnv1a(command + "\n" + cfg.canonical()));
}

std::string render_julia_ppm(const RunConfig& cfg, std::size_t* flagged) {
    const int S = cfg.image_size, W = 2 * S;
    const double R = cfg.chart_radius;
    const double delta = cfg.image_delta > 0 ? cfg.image_delta : 0.25 * R / S;
    const auto seq = omega_sample(cfg.system, cfg.seed, 0, 0, cfg.horizon);
    JuliaOptions opt;
    opt.rings = 1;
    opt.directions = 6;
    opt.stop_when_flagged = true;
    std::vector<unsigned char> px(std::size_t(W) * std::size_t(S) * 3, 0);
    std::size_t count = 0;
#pragma omp parallel for schedule(dynamic, 4) num_threads(kernel_threads()) reduction(+ : count)
    for (int row = 0; row < S; ++row)
        for (int col = 0; col < W; ++col) {
            const int c = col % S;
            const cplx w(R * (2 * (c + 0.5) / S - 1), R * (1 - 2 * (row + 0.5) / S));
            // Right panel: the chart w = 1/z around infinity.
            const SpherePoint x = col < S ? SpherePoint(w) : (std::abs(w) == 0 ? SpherePoint::infinity() : SpherePoint(1.0 / w));
            const auto r = julia_test(seq, x, delta, cfg.growth, cfg.horizon, opt);
            if (!r.flagged) continue;
            ++count;
            const auto v = (unsigned char)(55 + (200 * (cfg.horizon - r.first_n + 1)) / cfg.horizon);
            const std::size_t at = (std::size_t(row) * std::size_t(W) + std::size_t(col)) * 3;
            px[at] = px[at + 1] = px[at + 2] = v;
        }
    if (flagged) *flagged = count;
    std::string out = "P6\n" + std::to_string(W) + " " + std::to_string(S) + "\n255\n";
    out.append(px.begin(), px.end());
    return out;
}

CommandResult cmd_julia_render(const RunConfig& cfg) {
    Run run("julia", cfg);
    std::size_t flagged = 0;
    run.output("ppm", render_julia_ppm(cfg, &flagged));
    run.record("width", 2.0 * cfg.image_size);
    run.record("height", cfg.image_size);
    run.record("flagged_pixels", double(flagged));
    run.record("panels", "z chart |Re z|,|Im z| <= R; 1/z chart |Re w|,|Im w| <= R");
    return run.finish(0);
}

CommandResult cmd_pressure(const RunConfig& cfg) {
    Run run("pressure", cfg);
    std::vector<PressureLambdaReport> rows;
    LambdaOptions lopt;
    lopt.grid = cfg.grid;
    lopt.depth = cfg.depth;
    for (int n : cfg.n_ladder)
        for (double eps : cfg.eps_ladder) rows.push_back(pressure_vs_lambda(cfg.system, n, eps, cfg.samples, pressure_options(cfg), lopt));
    std::ostringstream csv;
    write_pressure_csv(csv, rows);
    run.output("csv", csv.str());
    for (const auto& r : rows) {
        const std::string key = "n" + std::to_string(r.pressure.n) + "_eps" + fmt(r.pressure.eps);
        run.record(key + ".samples", r.pressure.samples);
        run.record(key + ".lambda_half_width", r.lambda_half_width);
        run.record(key + ".raw_half_width", r.pressure.raw_half_width);
    }
    return run.finish(0);
}

CommandResult cmd_measure(const RunConfig& cfg) {
    Run run("measure", cfg);
    const int n = cfg.measure_n;
    AnchorOptions anchors;
    anchors.kappa = cfg.kappa;
    SequenceOperators ops(omega_sample(cfg.system, cfg.seed, 0, -cfg.depth, n + 40), Grid::lattice(cfg.grid), anchors);
    const auto eig = eigen_solution(ops, 0, n, cfg.depth);
    const auto conf = conformal_measure(ops, eig.g.front(), eig.lambda_total, 0, n);
    const auto mu = equilibrium_measure(eig.g.front(), conf.nu);
    std::ostringstream csv;
    csv << "index,re,im,is_infinity,nu_weight,mu_weight\n";
    for (std::size_t i = 0; i < mu.size(); ++i)
        csv << i << ',' << point_cols(conf.nu.points[i]) << ',' << fmt(conf.nu.weights[i]) << ',' << fmt(mu.weights[i]) << '\n';
    run.output("csv", csv.str());
    run.record("atoms", double(mu.size()));
    run.record("lambda_total", eig.lambda_total);
    run.record("log_lambda_per_step", std::log(eig.lambda_total) / n);
    run.record("eigen_residual", eig.residual);
    run.record("cocycle_gap", eig.cocycle_gap);
    run.record("raw_pairing", conf.raw_pairing);
    run.record("resampled", conf.resampled ? "yes" : "no");
    run.record("mu_total", mu.total());
    for (int k = 1; k <= 4; ++k) run.record("mu_moment_abs_" + std::to_string(k), std::abs(mu.moment(k)));
    return run.finish(0);
}

CommandResult cmd_verify(const RunConfig& cfg) {
    Run run("verify", cfg);
    BatteryOptions opt;
    opt.seed = cfg.seed;
    opt.scale = cfg.verify_scale;
    const auto reports = run_battery(opt);
    std::ostringstream csv;
    write_reports_csv(csv, reports);
    run.output("csv", csv.str());
    bool ok = true;
    for (const auto& r : reports) {
        ok = ok && r.passed();
        run.record(r.lemma, r.passed() ? "pass" : "FAIL");
        for (const auto& note : r.notes) run.record(r.lemma + ".note", note);
    }
    return run.finish(ok ? 0 : 1);
}

CommandResult cmd_simulate(const RunConfig& cfg) {
    Run run("simulate", cfg);
    const BaseSystem sys = omega_system(cfg.system, cfg.seed, 0);
    const auto seq = sample_sequence(sys, 0, std::max(cfg.steps, 1));
    const SpherePoint x0(cfg.start);
    const auto traj = pseudo_iterate(seq, cfg.steps, x0);
    std::ostringstream csv;
    csv << "step,re,im,is_infinity,derivative,birkhoff,next_map\n";
    double phi = 0;
    for (int k = 0; k <= cfg.steps; ++k) {
        const auto i = std::size_t(k);
        csv << k << ',' << point_cols(traj.points[i]) << ',' << fmt(traj.derivatives[i]) << ',' << fmt(phi) << ','
            << (k < cfg.steps ? sys.at(k).label : "") << '\n';
        if (k < cfg.steps) phi += seq.potential(k)(traj.points[i]);
    }
    run.output("csv", csv.str());
    run.record("steps", cfg.steps);
    run.record("final_log_derivative", std::log(traj.derivatives.back()));
    return run.finish(0);
}

}  // namespace rdsphere::cli
