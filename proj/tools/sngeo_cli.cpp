#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "sngeo/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"sngeo: shot-noise excursion geometry, Monte Carlo batch runner"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int threads = -1;
    std::uint64_t seed_override = 0;
    bool seed_set = false;

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"sample", "draw one marked Poisson configuration and write it as CSV"},
        {"field-grid", "sample a configuration and write the field grid (binary + CSV)"},
        {"functional", "evaluate one functional over replicated configurations"},
        {"variance-scan", "variance scaling table over increasing window sizes"},
        {"sigma0", "sigma0^2 estimates (covariance series and/or exceedance integral)"},
        {"clt", "Kolmogorov distances across window sizes with a rate fit"},
        {"anticonc", "anti-concentration table of the field marginal at the origin"}};

    for (const auto& [name, desc] : commands) {
        auto* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", config_path, "experiment config (key-value or JSON)")
            ->required();
        sub->add_option("--out", out_dir, "output directory (overrides run.out)");
        sub->add_option("--threads", threads, "worker threads (overrides run.threads)");
        auto* s = sub->add_option("--seed", seed_override, "master seed (overrides run.seed)");
        sub->callback([&seed_set, s]() { seed_set = s->count() > 0; });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        sngeo::ExperimentConfig config = sngeo::ExperimentConfig::parse_file(config_path);
        if (!out_dir.empty()) config.out_dir = out_dir;
        if (threads >= 0) config.threads = threads;
        if (seed_set) config.seed = seed_override;
        return sngeo::run_subcommand(app.get_subcommands().front()->get_name(), config);
    } catch (const sngeo::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
