// Batch front door: check-conditions, bands, thomas, verify.

#include <CLI11.hpp>

#include "magbloch/commands.hpp"

namespace {

struct GlobalFlags {
    std::string config;
    std::string out;
    std::int64_t seed = -1;
    int threads = 1;
};

magbloch::RunConfig load_with_overrides(const GlobalFlags& flags) {
    magbloch::RunConfig cfg = magbloch::load_run_config(flags.config);
    if (!flags.out.empty()) cfg.out_dir = flags.out;
    if (flags.seed >= 0) cfg.seed = static_cast<std::uint64_t>(flags.seed);
    // --threads is accepted for orchestration symmetry; the numerical kernels
    // are sequential, so results do not depend on it.
    return cfg;
}

void add_common(CLI::App* cmd, GlobalFlags& flags) {
    cmd->add_option("--config", flags.config, "run configuration file")->required();
    cmd->add_option("--out", flags.out, "output directory (overrides config)");
    cmd->add_option("--seed", flags.seed, "probe seed (overrides config)");
    cmd->add_option("--threads", flags.threads, "worker threads (results are thread-count independent)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"periodic magnetic Schrodinger operator: bands, hypotheses, and probes"};
    app.require_subcommand(1);

    GlobalFlags flags;
    std::vector<std::string> probes;

    CLI::App* check = app.add_subcommand("check-conditions", "evaluate theta and the Fourier criterion");
    add_common(check, flags);
    CLI::App* bands = app.add_subcommand("bands", "band structure over the configured k-path");
    add_common(bands, flags);
    CLI::App* thomas = app.add_subcommand("thomas", "weighted invertibility probe at complex quasimomentum");
    add_common(thomas, flags);
    CLI::App* verify = app.add_subcommand("verify", "identity and inequality probes");
    add_common(verify, flags);
    verify->add_option("--probe", probes, "probe subset (default: all)");

    CLI11_PARSE(app, argc, argv);

    try {
        const magbloch::RunConfig cfg = load_with_overrides(flags);
        if (check->parsed()) return magbloch::cmd_check_conditions(cfg);
        if (bands->parsed()) return magbloch::cmd_bands(cfg);
        if (thomas->parsed()) return magbloch::cmd_thomas(cfg);
        if (verify->parsed()) return magbloch::cmd_verify(cfg, probes);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
