#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dtas/sim.hpp"

namespace dtas {

// One line of the results file: a single (label, run, episode) measurement.
struct ResultRow {
    std::string scenario;
    std::string label;
    int run = 0;
    int episode = 0;
    double utility = 0.0;
    double optimal_utility = 0.0;
    double failed_fraction = 0.0;
    std::uint64_t seed = 0;

    friend bool operator==(const ResultRow& a, const ResultRow& b)
    {
        return a.scenario == b.scenario && a.label == b.label && a.run == b.run &&
               a.episode == b.episode && a.utility == b.utility &&
               a.optimal_utility == b.optimal_utility &&
               a.failed_fraction == b.failed_fraction && a.seed == b.seed;
    }
};

std::vector<ResultRow> to_rows(const std::string& scenario, const std::vector<RunResult>& results);

// results.csv carries a version comment followed by a fixed header; unknown
// columns are rejected on read. Doubles are written with enough digits to
// round-trip exactly.
void write_results_csv(const std::string& path, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results_csv(const std::string& path);

struct SummaryStats {
    int count = 0;
    double mean = 0.0;
    double stddev = 0.0;
    double min = 0.0;
    double p25 = 0.0;
    double p50 = 0.0;
    double p75 = 0.0;
    double max = 0.0;
};

// Percentile by linear interpolation between order statistics.
double percentile(std::vector<double> values, double q);

SummaryStats summarise_values(const std::vector<double>& values);

// Final-episode utilities across runs, per label.
std::map<std::string, SummaryStats> summarise(const std::vector<ResultRow>& rows);

void write_summary_json(const std::string& path, const std::map<std::string, SummaryStats>& stats);

// One file per label under <dir>/series: per-episode mean with the 25th/75th
// percentile band across runs, columns episode,mean,lo,hi.
void write_series(const std::string& dir, const std::vector<ResultRow>& rows);

} // namespace dtas
