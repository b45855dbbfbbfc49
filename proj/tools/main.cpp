#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

// Exit codes: 0 ok, 1 usage error, 2 data/validation error.
int main(int argc, char** argv) {
    CLI::App app{"Stable-contact probability estimation from foot-mounted IMUs"};
    app.require_subcommand(1);

    std::string scenario, out_path, in_path, config_path, trace_path, estimates_path,
        report_path;
    std::optional<std::uint64_t> seed;
    bool embed = false;
    std::uint64_t bench_n = 1000000;

    CLI::App* gen = app.add_subcommand(
        "generate", "Generate a labeled synthetic gait trace (CSV + meta sidecar)");
    gen->add_option("--scenario", scenario, "Built-in scenario name or scenario file path")
        ->required();
    gen->add_option("--seed", seed, "Seed override for the noise stream");
    gen->add_option("--out", out_path, "Output trace CSV path")->required();
    gen->add_flag("--embed", embed,
                  "Embed gravity, bias and attitude into the IMU channels (raw measurements)");

    CLI::App* est = app.add_subcommand(
        "estimate", "Run the contact-probability estimator over a trace CSV");
    est->add_option("--in", in_path, "Input trace CSV")->required();
    est->add_option("--config", config_path, "Key-value config file");
    est->add_option("--out", out_path, "Output estimates CSV")->required();

    CLI::App* ev = app.add_subcommand(
        "eval", "Score estimates against ground truth and the Schmitt GRF baseline");
    ev->add_option("--trace", trace_path, "Trace CSV with labels or force/velocity columns")
        ->required();
    ev->add_option("--estimates", estimates_path, "Estimates CSV from the estimate command")
        ->required();
    ev->add_option("--config", config_path, "Key-value config file");
    ev->add_option("--report", report_path, "Output report JSON path")->required();

    CLI::App* bench = app.add_subcommand(
        "bench", "Measure single-thread steady-state estimator throughput");
    bench->add_option("--config", config_path, "Key-value config file");
    bench->add_option("--n", bench_n, "Number of timed steps (>= 100000)")
        ->check(CLI::Range(std::uint64_t{100000}, std::uint64_t{1} << 40));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (gen->parsed())
            stancekde::cli::cmd_generate(scenario, seed, out_path, embed);
        else if (est->parsed())
            stancekde::cli::cmd_estimate(in_path, config_path, out_path);
        else if (ev->parsed())
            stancekde::cli::cmd_eval(trace_path, estimates_path, config_path, report_path);
        else if (bench->parsed())
            stancekde::cli::cmd_bench(config_path, bench_n);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
