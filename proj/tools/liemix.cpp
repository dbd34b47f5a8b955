#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "liemix/config.hpp"
#include "liemix/diagnostics.hpp"
#include "liemix/errors.hpp"
#include "liemix/harness.hpp"
#include "liemix/mixture_io.hpp"
#include "liemix/reduction.hpp"
#include "liemix/scenario.hpp"

namespace {

using namespace liemix;

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> steps;
    std::string out;
    std::string format = "csv";
    std::optional<std::string> picking;
    std::optional<std::string> strategy;
};

ExperimentConfig load_config(const CommonOptions& o) {
    ExperimentConfig cfg = o.config_path.empty() ? ExperimentConfig{} : load_experiment_config(o.config_path);
    if (o.seed) cfg.scenario.seed = *o.seed;
    if (o.steps) cfg.scenario.steps = *o.steps;
    if (o.picking) cfg.phd.reduction.picking = parse_picking(*o.picking);
    if (o.strategy) cfg.phd.reduction.strategy = parse_strategy(*o.strategy);
    cfg.scenario.validate();
    cfg.phd.reduction.validate();
    return cfg;
}

/// Output stream for --out, or stdout when it is empty or "-".
class Output {
public:
    explicit Output(const std::string& path) {
        if (path.empty() || path == "-") return;
        file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
        if (!*file_) throw std::runtime_error("cannot open output file " + path);
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }
    void close() {
        if (!file_) return;
        file_->close();
        if (!*file_) throw std::runtime_error("failed writing output file");
    }

private:
    std::unique_ptr<std::ofstream> file_;
};

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open input file " + path);
    return in;
}

void add_common(CLI::App* cmd, CommonOptions& o, bool with_reduction) {
    cmd->add_option("--config", o.config_path, "JSON experiment configuration")->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "Master seed (overrides scenario.seed)");
    cmd->add_option("--steps", o.steps, "Steps per scenario (overrides scenario.steps)");
    cmd->add_option("--out", o.out, "Output path (default stdout)");
    cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    if (with_reduction) {
        cmd->add_option("--picking", o.picking, "Component picking: exhaustive or west");
        cmd->add_option("--strategy", o.strategy, "Tangent strategy: TL, TS, TId, TMax or TMin");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mixture reduction and multitarget tracking on matrix Lie groups"};
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "Print every diagnostic warning");

    CommonOptions gen_opts;
    auto* gen = app.add_subcommand("generate", "Write a random scenario file");
    add_common(gen, gen_opts, false);

    CommonOptions run_opts;
    std::string scenario_path;
    auto* run = app.add_subcommand("run", "Run the filter on one scenario and write per-step OSPA");
    add_common(run, run_opts, true);
    run->add_option("--scenario", scenario_path, "Scenario file (default: generate one from the seed)")
        ->check(CLI::ExistingFile);

    CommonOptions bench_opts;
    int n_scenarios = 100;
    bool timing = false, progress = false;
    auto* bench = app.add_subcommand("benchmark", "Run the picking x tangent-strategy grid on paired scenarios");
    add_common(bench, bench_opts, true);
    bench->add_option("--scenarios", n_scenarios, "Number of scenarios")->check(CLI::PositiveNumber);
    bench->add_flag("--timing", timing, "Report wall time per step (output is then not reproducible)");
    bench->add_flag("--progress", progress, "Report progress on stderr");

    CommonOptions red_opts;
    std::string mixture_path;
    std::optional<std::size_t> max_components;
    std::optional<double> threshold;
    bool no_max = false, no_threshold = false;
    auto* red = app.add_subcommand("reduce", "Reduce a serialized mixture");
    red->add_option("--config", red_opts.config_path, "JSON experiment configuration (phd.reduction is used)")
        ->check(CLI::ExistingFile);
    red->add_option("--in", mixture_path, "Mixture file")->required()->check(CLI::ExistingFile);
    red->add_option("--out", red_opts.out, "Output path (default stdout)");
    red->add_option("--picking", red_opts.picking, "Component picking: exhaustive or west");
    red->add_option("--strategy", red_opts.strategy, "Tangent strategy: TL, TS, TId, TMax or TMin");
    red->add_option("--max-components", max_components, "Component cap N_max")->check(CLI::PositiveNumber);
    red->add_option("--threshold", threshold, "sKL merge threshold U")->check(CLI::PositiveNumber);
    red->add_flag("--no-max-components", no_max, "Disable the component cap");
    red->add_flag("--no-threshold", no_threshold, "Disable the sKL threshold");

    auto* show = app.add_subcommand("config", "Print the effective configuration as JSON");
    CommonOptions show_opts;
    add_common(show, show_opts, true);

    CLI11_PARSE(app, argc, argv);

    if (verbose)
        set_warning_handler([](std::string_view tag, std::string_view msg) {
            std::cerr << "liemix warning [" << tag << "]: " << msg << '\n';
        });

    try {
        if (gen->parsed()) {
            const ExperimentConfig cfg = load_config(gen_opts);
            Output out(gen_opts.out);
            write_scenario(out.stream(), generate_scenario(cfg.scenario));
            out.close();
        } else if (run->parsed()) {
            const ExperimentConfig cfg = load_config(run_opts);
            Scenario s;
            if (scenario_path.empty()) {
                s = generate_scenario(cfg.scenario);
            } else {
                std::ifstream in = open_input(scenario_path);
                s = read_scenario(in);
            }
            const RunResult r = run_filter(s, cfg);
            Output out(run_opts.out);
            if (run_opts.format == "json")
                write_run_json(out.stream(), r);
            else
                write_run_csv(out.stream(), r);
            out.close();
        } else if (bench->parsed()) {
            const ExperimentConfig cfg = load_config(bench_opts);
            std::vector<GridCell> grid;
            for (const GridCell& c : full_grid()) {
                if (bench_opts.picking && c.picking != parse_picking(*bench_opts.picking)) continue;
                if (bench_opts.strategy && c.strategy != parse_strategy(*bench_opts.strategy)) continue;
                grid.push_back(c);
            }
            if (grid.empty()) throw std::invalid_argument("no grid cell matches --picking/--strategy");
            ProgressCallback cb;
            if (progress) cb = [](int i, int n) { std::cerr << "scenario " << i << "/" << n << '\n'; };
            const BenchmarkResult r = run_benchmark(cfg, n_scenarios, grid, cb);
            Output out(bench_opts.out);
            if (bench_opts.format == "json")
                write_benchmark_json(out.stream(), r, timing);
            else
                write_benchmark_csv(out.stream(), r, timing);
            out.close();
        } else if (red->parsed()) {
            ExperimentConfig cfg = load_config(red_opts);
            ReductionConfig rc = cfg.phd.reduction;
            if (max_components) rc.max_components = *max_components;
            if (threshold) rc.threshold = *threshold;
            if (no_max) rc.max_components.reset();
            if (no_threshold) rc.threshold.reset();
            std::ifstream in = open_input(mixture_path);
            const Mixture m = read_mixture(in);
            Output out(red_opts.out);
            write_mixture(out.stream(), reduce(m, rc));
            out.close();
        } else if (show->parsed()) {
            const ExperimentConfig cfg = load_config(show_opts);
            Output out(show_opts.out);
            out.stream() << dump_experiment_config(cfg);
            out.close();
        }
    } catch (const std::exception& e) {
        std::cerr << "liemix: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
