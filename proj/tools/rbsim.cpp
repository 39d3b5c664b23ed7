#include <CLI11.hpp>

#include "rb/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"randomized-benchmarking simulation runner"};
    app.require_subcommand(1);

    rb::cli::RunConfig cfg;
    std::uint64_t seed = 0;
    bool seed_set = false;

    const std::vector<std::string> names = {
        "srb",        "irb",        "leakage", "flicker-ramsey",
        "flicker-rb", "distances",  "sweep"};
    const std::vector<std::string> descriptions = {
        "standard randomized benchmarking",
        "interleaved randomized benchmarking",
        "qutrit leakage benchmarking",
        "Ramsey coherence decay under 1/f noise",
        "pulsed benchmarking under 1/f noise",
        "diamond-norm distances from depolarizing",
        "accuracy/confidence sweep over sequence counts"};

    for (size_t i = 0; i < names.size(); ++i) {
        CLI::App* sub = app.add_subcommand(names[i], descriptions[i]);
        sub->add_option("--plan", cfg.plan_path, "experiment plan (JSON)")
            ->required();
        sub->add_option("--out", cfg.out_dir, "output directory")
            ->capture_default_str();
        sub->add_option("--seed", seed, "override the plan seed")
            ->each([&](const std::string&) { seed_set = true; });
        sub->add_option("--threads", cfg.threads, "worker thread count")
            ->capture_default_str();
        sub->add_option("--format", cfg.format, "series format: csv or json")
            ->capture_default_str();
    }

    CLI11_PARSE(app, argc, argv);

    cfg.subcommand = app.get_subcommands().front()->get_name();
    if (seed_set) cfg.seed_override = seed;
    return rb::cli::run(cfg);
}
