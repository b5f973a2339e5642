// Command-line front end: learn, run, sweep, compare.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ecoswitch/csv.hpp"
#include "ecoswitch/errors.hpp"
#include "ecoswitch/experiment.hpp"

namespace {

using namespace ecoswitch;

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<double> epsilon;
    std::optional<std::string> policy;
};

ExperimentConfig resolve(const Overrides& o) {
    ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
    if (o.seed) c.seed = *o.seed;
    if (o.out) c.out = *o.out;
    if (o.epsilon) c.epsilon = *o.epsilon;
    if (o.policy) c.policy = *o.policy;
    return c;
}

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("-c,--config", o.config, "Config file (key = value)")->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "Base seed");
    cmd->add_option("-o,--out", o.out, "Output directory");
}

void print_table(const std::vector<RunReport>& reports) {
    write_summary_csv(std::cout, reports);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy-aware model switching simulator"};
    app.footer(config_help());
    app.require_subcommand(1);

    Overrides o;
    std::vector<double> epsilons;

    auto* learn = app.add_subcommand("learn", "Evaluate every model offline and write P_j and A");
    add_common(learn, o);

    auto* run = app.add_subcommand("run", "Run one policy and write its artifacts");
    add_common(run, o);
    run->add_option("--policy", o.policy, "Model name, no_switch:<m>, naive1..3, ecomls or ecomls:<eps>");
    run->add_option("--epsilon", o.epsilon, "Exploration rate for ecomls");

    auto* sweep = app.add_subcommand("sweep", "Run ecomls once per epsilon");
    add_common(sweep, o);
    sweep->add_option("--epsilons", epsilons, "Epsilon list (defaults to the config list)")->delimiter(',');

    auto* compare = app.add_subcommand("compare", "Run every baseline and ecomls setting on one workload");
    add_common(compare, o);
    compare->add_option("--epsilons", epsilons, "Epsilon list (defaults to the config list)")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        auto config = resolve(o);
        if (*learn) {
            const auto result = cmd_learn(config);
            write_base_rules_csv(std::cout, result.base_rules);
        } else if (*run) {
            const auto r = cmd_run(config);
            print_table({r.report});
        } else if (*sweep) {
            print_table(cmd_sweep(config, epsilons.empty() ? config.epsilons : epsilons));
        } else if (*compare) {
            if (!epsilons.empty()) config.epsilons = epsilons;
            print_table(cmd_compare(config));
        }
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(e.category());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return static_cast<int>(ErrorCategory::internal);
    }
}
