// Command-line front end: one subcommand per scenario kind.
// Exit codes: 0 success, 1 I/O failure, 2 schema or input error, 3 numerical failure.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bkc/errors.hpp"
#include "bkc/io.hpp"
#include "bkc/scenario.hpp"

namespace {

constexpr int exit_io = 1;
constexpr int exit_schema = 2;
constexpr int exit_numerical = 3;

struct Args {
    std::string config;
    std::string out = ".";
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

int execute(bkc::cli::ScenarioKind kind, const Args& a, bool seed_given) {
    using namespace bkc::cli;
    std::string text;
    try {
        text = bkc::io::read_file(a.config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_io;
    }
    try {
        RunOptions opt;
        opt.seed_given = seed_given;
        opt.seed = a.seed;
        opt.threads = a.threads;
        auto result = run_scenario(kind, parse_config(text), opt);
        for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
        write_outputs(a.out, result);
        for (const auto& d : result.datasets) std::cout << a.out << '/' << d.file << '\n';
        return 0;
    } catch (const schema_error& e) {
        std::cerr << e.what() << '\n';
        return exit_schema;
    } catch (const bkc::numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return exit_schema;
    } catch (const std::domain_error& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return exit_schema;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_io;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bosonic Kitaev chain toolkit"};
    app.require_subcommand(1);
    Args args;
    bkc::cli::ScenarioKind chosen = bkc::cli::ScenarioKind::respond;
    for (auto kind : bkc::cli::all_scenario_kinds()) {
        auto* sub = app.add_subcommand(bkc::cli::to_string(kind), std::string("run a ") + bkc::cli::to_string(kind) +
                                                                      " scenario");
        sub->add_option("--config", args.config, "scenario config (JSON)")->required();
        sub->add_option("--out", args.out, "output directory");
        sub->add_option("--seed", args.seed, "seed for stochastic initial conditions (overrides the config)");
        sub->add_option("--threads", args.threads, "worker threads for sweeps")->check(CLI::PositiveNumber);
        sub->callback([&chosen, kind] { chosen = kind; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_schema;
    }
    bool seed_given = false;
    for (auto* sub : app.get_subcommands()) seed_given = sub->count("--seed") > 0;
    return execute(chosen, args, seed_given);
}
