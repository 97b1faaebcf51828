#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "rdsphere/errors.hpp"
#include "rdsphere/io.hpp"

using namespace rdsphere;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kBadInput = 2, kNumerical = 3, kCapacity = 4, kIo = 5, kOther = 6 };

struct Flags {
    std::string config, out, ladder;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> net;
    std::optional<int> horizon;
};

RunConfig effective_config(const Flags& f) {
    RunConfig cfg = f.config.empty() ? parse_config("") : load_config(f.config);
    if (f.seed) cfg.seed = *f.seed;
    if (f.net) cfg.net = *f.net;
    if (f.horizon) cfg.horizon = *f.horizon;
    if (!f.out.empty()) cfg.out = f.out;
    if (!f.ladder.empty()) {
        cfg.eps_ladder.clear();
        for (const auto& v : split(f.ladder, ',')) cfg.eps_ladder.push_back(parse_double(v));
    }
    validate(cfg);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random holomorphic dynamics on the Riemann sphere: renders, pressure, measures, checks"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    Flags f;
    app.add_option("--config", f.config, "INI run configuration")->check(CLI::ExistingFile);
    app.add_option("--seed", f.seed, "run seed (omega samples, verify battery)");
    app.add_option("--net", f.net, "derivative-criterion net size");
    app.add_option("--horizon", f.horizon, "derivative-criterion horizon");
    app.add_option("--out", f.out, "output directory");
    app.add_option("--ladder", f.ladder, "comma-separated decreasing eps values");

    using Cmd = cli::CommandResult (*)(const RunConfig&);
    const std::vector<std::tuple<const char*, const char*, Cmd>> commands{
        {"julia", "render the derivative criterion as PPM (z and 1/z charts)", cli::cmd_julia_render},
        {"pressure", "separated-set pressure against the eigenvalue cocycle, CSV", cli::cmd_pressure},
        {"measure", "conformal and equilibrium measure atoms, CSV", cli::cmd_measure},
        {"verify", "lemma battery reports, exit code 0 iff all pass", cli::cmd_verify},
        {"simulate", "pseudo-orbit trajectory, CSV", cli::cmd_simulate},
    };
    Cmd chosen = nullptr;
    for (const auto& [name, help, fn] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->callback([&chosen, fn = fn] { chosen = fn; });
    }
    CLI11_PARSE(app, argc, argv);

    try {
        const auto res = chosen(effective_config(f));
        for (const auto& file : res.files) std::cout << file << '\n';
        return res.exit_code;
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadInput;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kNumerical;
    } catch (const CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << '\n';
        return kCapacity;
    } catch (const cli::IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kOther;
    }
}
