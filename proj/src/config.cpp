#include "dtas/config.hpp"

#include <fstream>
#include <sstream>

namespace dtas {

namespace {

std::string trim(const std::string& s)
{
    std::size_t begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos)
        return "";
    std::size_t end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

int to_int(const std::string& key, const std::string& value)
{
    try {
        std::size_t used = 0;
        int v = std::stoi(value, &used);
        if (used != value.size())
            throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        fail(Err::InfeasibleConfig, "config key '" + key + "': expected integer, got '" + value + "'");
    }
}

double to_double(const std::string& key, const std::string& value)
{
    try {
        std::size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size())
            throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        fail(Err::InfeasibleConfig, "config key '" + key + "': expected number, got '" + value + "'");
    }
}

bool to_bool(const std::string& key, const std::string& value)
{
    if (value == "true" || value == "1")
        return true;
    if (value == "false" || value == "0")
        return false;
    fail(Err::InfeasibleConfig, "config key '" + key + "': expected boolean, got '" + value + "'");
}

} // namespace

void apply_config_value(ScenarioConfig& cfg, const std::string& key, const std::string& value)
{
    if (key == "parents")
        cfg.n_parents = to_int(key, value);
    else if (key == "children")
        cfg.n_children = to_int(key, value);
    else if (key == "task_types")
        cfg.n_task_types = to_int(key, value);
    else if (key == "composite_types")
        cfg.n_composite_types = to_int(key, value);
    else if (key == "tasks_per_composite")
        cfg.tasks_per_composite = to_int(key, value);
    else if (key == "knowledge_cap")
        cfg.knowledge_cap = to_int(key, value);
    else if (key == "neighbourhood_cap")
        cfg.neighbourhood_cap = to_int(key, value);
    else if (key == "episodes")
        cfg.episodes = to_int(key, value);
    else if (key == "runs")
        cfg.runs = to_int(key, value);
    else if (key == "p_unavailable")
        cfg.p_unavailable = to_double(key, value);
    else if (key == "volatile_start")
        cfg.volatile_start = to_int(key, value);
    else if (key == "volatile_end")
        cfg.volatile_end = to_int(key, value);
    else if (key == "p_leave")
        cfg.p_leave = to_double(key, value);
    else if (key == "w_link")
        cfg.w_link = to_double(key, value);
    else if (key == "w_info")
        cfg.w_info = to_double(key, value);
    else if (key == "tsqm_rows")
        cfg.tsqm_rows = to_int(key, value);
    else if (key == "tsqm_cols")
        cfg.tsqm_cols = to_int(key, value);
    else if (key == "quality_mean")
        cfg.quality_mean = to_double(key, value);
    else if (key == "quality_stddev")
        cfg.quality_stddev = to_double(key, value);
    else if (key == "seed")
        cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
    else if (key == "budget" || key == "step_budget")
        cfg.step_budget = to_int(key, value);
    else if (key == "alpha")
        cfg.alpha = to_double(key, value);
    else if (key == "gamma")
        cfg.gamma = to_double(key, value);
    else if (key == "eps_base")
        cfg.eps_base = to_double(key, value);
    else if (key == "tau")
        cfg.tau = to_double(key, value);
    else if (key == "trend_decay")
        cfg.trend_decay = to_double(key, value);
    else if (key == "mv_threshold")
        cfg.mv_threshold = to_double(key, value);
    else if (key == "info_link_reward")
        cfg.info_link_reward = to_double(key, value);
    else if (key == "default_q")
        cfg.default_q = to_double(key, value);
    else if (key == "child_capability_count")
        cfg.child_capability_count = to_int(key, value);
    else if (key == "concurrency_exponent")
        cfg.concurrency_exponent = to_double(key, value);
    else if (key == "provide_info_from_neighbourhood")
        cfg.provide_info_from_neighbourhood = to_bool(key, value);
    else
        fail(Err::InfeasibleConfig, "unknown config key '" + key + "'");
}

ScenarioConfig load_config(const std::string& path, const std::string& scenario)
{
    std::ifstream in(path);
    if (!in)
        fail(Err::InfeasibleConfig, "cannot open config file " + path);

    ScenarioConfig cfg = scenario_defaults(scenario_from_name(scenario));
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        line_no += 1;
        std::string text = trim(line);
        if (text.empty() || text[0] == '#')
            continue;
        if (text.front() == '[' && text.back() == ']') {
            section = trim(text.substr(1, text.size() - 2));
            continue;
        }
        auto eq = text.find('=');
        if (eq == std::string::npos)
            fail(Err::InfeasibleConfig,
                 path + ":" + std::to_string(line_no) + ": expected key = value");
        if (section != scenario)
            continue;
        apply_config_value(cfg, trim(text.substr(0, eq)), trim(text.substr(eq + 1)));
    }
    return cfg;
}

} // namespace dtas
