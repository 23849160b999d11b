#include "dtas/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace dtas {

namespace {

constexpr const char* kSchemaComment = "# dtas-results v1";
constexpr const char* kHeader =
    "scenario,label,run,episode,utility,optimal_utility,failed_fraction,seed";

std::string format_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep))
        out.push_back(field);
    if (!line.empty() && line.back() == sep)
        out.push_back("");
    return out;
}

} // namespace

std::vector<ResultRow> to_rows(const std::string& scenario, const std::vector<RunResult>& results)
{
    std::vector<ResultRow> rows;
    for (const auto& run : results)
        for (const auto& ep : run.episodes) {
            ResultRow row;
            row.scenario = scenario;
            row.label = run.label;
            row.run = run.run;
            row.episode = ep.episode;
            row.utility = ep.utility;
            row.optimal_utility = ep.optimal_utility;
            row.failed_fraction = ep.failed_fraction;
            row.seed = run.seed;
            rows.push_back(std::move(row));
        }
    return rows;
}

void write_results_csv(const std::string& path, const std::vector<ResultRow>& rows)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path + " for writing");
    out << kSchemaComment << "\n" << kHeader << "\n";
    for (const auto& row : rows) {
        out << row.scenario << ',' << row.label << ',' << row.run << ',' << row.episode << ','
            << format_double(row.utility) << ',' << format_double(row.optimal_utility) << ','
            << format_double(row.failed_fraction) << ',' << row.seed << "\n";
    }
}

std::vector<ResultRow> read_results_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != kSchemaComment)
        throw std::runtime_error(path + ": missing or unsupported schema comment");
    if (!std::getline(in, line) || line != kHeader)
        throw std::runtime_error(path + ": unexpected column header");

    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        auto fields = split(line, ',');
        if (fields.size() != 8)
            throw std::runtime_error(path + ": malformed row '" + line + "'");
        ResultRow row;
        row.scenario = fields[0];
        row.label = fields[1];
        row.run = std::stoi(fields[2]);
        row.episode = std::stoi(fields[3]);
        row.utility = std::stod(fields[4]);
        row.optimal_utility = std::stod(fields[5]);
        row.failed_fraction = std::stod(fields[6]);
        row.seed = std::stoull(fields[7]);
        rows.push_back(std::move(row));
    }
    return rows;
}

double percentile(std::vector<double> values, double q)
{
    if (values.empty())
        throw std::runtime_error("percentile of empty set");
    std::sort(values.begin(), values.end());
    if (q <= 0.0)
        return values.front();
    if (q >= 1.0)
        return values.back();
    double rank = q * static_cast<double>(values.size() - 1);
    std::size_t lo = static_cast<std::size_t>(rank);
    double frac = rank - static_cast<double>(lo);
    if (lo + 1 >= values.size())
        return values.back();
    return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
}

SummaryStats summarise_values(const std::vector<double>& values)
{
    SummaryStats s;
    s.count = static_cast<int>(values.size());
    if (values.empty())
        return s;
    double sum = 0.0;
    for (double v : values)
        sum += v;
    s.mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values)
        sq += (v - s.mean) * (v - s.mean);
    s.stddev = values.size() > 1 ? std::sqrt(sq / static_cast<double>(values.size() - 1)) : 0.0;
    s.min = percentile(values, 0.0);
    s.p25 = percentile(values, 0.25);
    s.p50 = percentile(values, 0.50);
    s.p75 = percentile(values, 0.75);
    s.max = percentile(values, 1.0);
    return s;
}

std::map<std::string, SummaryStats> summarise(const std::vector<ResultRow>& rows)
{
    // Final episode per (label, run).
    std::map<std::pair<std::string, int>, ResultRow> finals;
    for (const auto& row : rows) {
        auto key = std::make_pair(row.label, row.run);
        auto it = finals.find(key);
        if (it == finals.end() || row.episode > it->second.episode)
            finals[key] = row;
    }
    std::map<std::string, std::vector<double>> by_label;
    for (const auto& [key, row] : finals)
        by_label[row.label].push_back(row.utility);

    std::map<std::string, SummaryStats> out;
    for (const auto& [label, values] : by_label)
        out[label] = summarise_values(values);
    return out;
}

void write_summary_json(const std::string& path, const std::map<std::string, SummaryStats>& stats)
{
    nlohmann::json doc;
    for (const auto& [label, s] : stats) {
        doc[label] = {
            {"count", s.count}, {"mean", s.mean}, {"std", s.stddev}, {"min", s.min},
            {"p25", s.p25},     {"p50", s.p50},   {"p75", s.p75},   {"max", s.max},
        };
    }
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path + " for writing");
    out << doc.dump(2) << "\n";
}

void write_series(const std::string& dir, const std::vector<ResultRow>& rows)
{
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(dir));

    std::map<std::string, std::map<int, std::vector<double>>> grid;
    for (const auto& row : rows)
        grid[row.label][row.episode].push_back(row.utility);

    for (const auto& [label, episodes] : grid) {
        std::ofstream out(fs::path(dir) / (label + ".csv"));
        if (!out)
            throw std::runtime_error("cannot write series for " + label);
        out << "episode,mean,lo,hi\n";
        for (const auto& [episode, values] : episodes) {
            SummaryStats s = summarise_values(values);
            out << episode << ',' << format_double(s.mean) << ',' << format_double(s.p25) << ','
                << format_double(s.p75) << "\n";
        }
    }
}

} // namespace dtas
