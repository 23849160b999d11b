#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dtas/config.hpp"
#include "dtas/report.hpp"
#include "dtas/sim.hpp"

namespace fs = std::filesystem;

namespace {

struct RunOptions {
    std::string scenario;
    std::string out_dir = ".";
    std::string config_path;
    std::vector<std::string> labels;
    int runs = -1;
    int episodes = -1;
    int parents = -1;
    int children = -1;
    int budget = -1;
    std::int64_t seed = -1;
};

int do_run(const RunOptions& opt)
{
    dtas::ScenarioConfig cfg;
    if (!opt.config_path.empty())
        cfg = dtas::load_config(opt.config_path, opt.scenario);
    else
        cfg = dtas::scenario_defaults(dtas::scenario_from_name(opt.scenario));

    if (opt.runs > 0)
        cfg.runs = opt.runs;
    if (opt.episodes > 0)
        cfg.episodes = opt.episodes;
    if (opt.parents > 0)
        cfg.n_parents = opt.parents;
    if (opt.children > 0)
        cfg.n_children = opt.children;
    if (opt.budget > 0)
        cfg.step_budget = opt.budget;
    if (opt.seed >= 0)
        cfg.seed = static_cast<std::uint64_t>(opt.seed);
    cfg.labels = opt.labels;
    cfg.validate();

    auto results = dtas::run_scenario(cfg);
    auto rows = dtas::to_rows(opt.scenario, results);

    fs::create_directories(opt.out_dir);
    const std::string csv_path = (fs::path(opt.out_dir) / "results.csv").string();
    dtas::write_results_csv(csv_path, rows);
    dtas::write_summary_json((fs::path(opt.out_dir) / "summary.json").string(),
                             dtas::summarise(rows));
    dtas::write_series((fs::path(opt.out_dir) / "series").string(), rows);

    std::cout << "wrote " << rows.size() << " rows to " << csv_path << "\n";
    return 0;
}

int do_summarize(const std::string& csv_path, const std::string& out_path)
{
    auto rows = dtas::read_results_csv(csv_path);
    auto stats = dtas::summarise(rows);
    if (!out_path.empty()) {
        dtas::write_summary_json(out_path, stats);
        std::cout << "wrote " << out_path << "\n";
        return 0;
    }
    for (const auto& [label, s] : stats) {
        std::cout << label << ": n=" << s.count << " mean=" << s.mean << " std=" << s.stddev
                  << " min=" << s.min << " p25=" << s.p25 << " p50=" << s.p50 << " p75=" << s.p75
                  << " max=" << s.max << "\n";
    }
    return 0;
}

int do_plot_data(const std::string& csv_path, const std::string& out_dir)
{
    auto rows = dtas::read_results_csv(csv_path);
    dtas::write_series(out_dir, rows);
    std::cout << "wrote per-episode series to " << out_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Distributed task-allocation simulator"};
    app.require_subcommand(1);

    RunOptions run_opt;
    auto* run = app.add_subcommand("run", "Run a scenario and write results");
    run->add_option("--scenario", run_opt.scenario, "stable | exploration | volatile | large")
        ->required();
    run->add_option("--runs", run_opt.runs, "number of independent runs");
    run->add_option("--episodes", run_opt.episodes, "episodes per run");
    run->add_option("--seed", run_opt.seed, "master seed");
    run->add_option("--out", run_opt.out_dir, "output directory");
    run->add_option("--config", run_opt.config_path, "experiment config file");
    run->add_option("--labels", run_opt.labels, "subset of variant labels to run")
        ->delimiter(',');
    run->add_option("--parents", run_opt.parents, "parent agent count");
    run->add_option("--children", run_opt.children, "child agent count");
    run->add_option("--budget", run_opt.budget, "per-parent step budget per episode");

    std::string summ_csv;
    std::string summ_out;
    auto* summ = app.add_subcommand("summarize", "Summary statistics from a results file");
    summ->add_option("csv", summ_csv, "results.csv path")->required();
    summ->add_option("--out", summ_out, "write summary JSON here instead of stdout");

    std::string plot_csv;
    std::string plot_out = "series";
    auto* plot = app.add_subcommand("plot-data", "Per-episode mean and percentile band series");
    plot->add_option("csv", plot_csv, "results.csv path")->required();
    plot->add_option("--out", plot_out, "series output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e); // prints usage or error text
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (*run)
            return do_run(run_opt);
        if (*summ)
            return do_summarize(summ_csv, summ_out);
        if (*plot)
            return do_plot_data(plot_csv, plot_out);
    } catch (const dtas::Error& e) {
        if (e.code() == dtas::Err::InfeasibleConfig) {
            std::cerr << "config error: " << e.what() << "\n";
            return 2;
        }
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
