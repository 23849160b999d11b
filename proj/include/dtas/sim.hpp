#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "dtas/algorithms.hpp"

namespace dtas {

enum class Scenario { Stable, Exploration, Volatile, Large };

Scenario scenario_from_name(const std::string& name);
std::string scenario_name(Scenario s);

// Experiment description. Defaults follow the standard parameterisation:
// 20 atomic task types, 10 composite types of 5 tasks, knowledge capped at 7
// and neighbourhoods at 5, one composite per parent per episode, child task
// qualities drawn from a normal(0.5, 0.2) truncated to (0,1], a 10x10 trend
// matrix, and a 0.1% per-episode unavailability chance per agent.
struct ScenarioConfig {
    Scenario scenario = Scenario::Stable;
    int n_parents = 3;
    int n_children = 10;
    int n_task_types = 20;
    int n_composite_types = 10;
    int tasks_per_composite = 5;
    int knowledge_cap = 7;
    int neighbourhood_cap = 5;
    int episodes = 100;
    int runs = 100;
    double p_unavailable = 0.001;
    int volatile_start = 25;
    int volatile_end = 75;
    double p_leave = 0.01;
    double w_link = 0.10;
    double w_info = 0.20;
    int tsqm_rows = 10;
    int tsqm_cols = 10;
    double quality_mean = 0.5;
    double quality_stddev = 0.2;
    std::uint64_t seed = 1;
    int step_budget = 50;
    double alpha = 0.3;
    double gamma = 0.1;
    double eps_base = 0.95;
    double tau = 0.002;
    double trend_decay = 0.95;
    double mv_threshold = 0.1;
    double info_link_reward = -0.05;
    double default_q = 0.5;
    int child_capability_count = 14;
    double concurrency_exponent = 1.0;
    bool provide_info_from_neighbourhood = false;
    std::vector<std::string> labels; // empty = every variant of the scenario

    void validate() const; // throws InfeasibleConfig
};

ScenarioConfig scenario_defaults(Scenario s);

// How a labelled variant differs from the plain algorithm: selection policy,
// neighbourhood initialisation, disruption, episode-end resets, and (large
// scenario) its own child count and action-impact weights.
struct Variant {
    std::string label;
    StepPolicy policy;
    enum class Init { Random, OptimalHoods, Seeded75Best, Seeded75Worst } init = Init::Random;
    bool disruption = false;
    bool greedy_oracle = false;      // no learning, allocate to best capable neighbour
    bool ql_reset = false;           // pull Q-values halfway to the state mean each episode
    bool episode_temperature = false; // Boltzmann tau = episode count
    int children_override = -1;
    double w_link = -1.0; // negative = inherit from config
    double w_info = -1.0;
};

std::vector<Variant> scenario_variants(const ScenarioConfig& cfg);

struct World {
    ScenarioConfig cfg;
    std::map<AgentId, AgentSpec> specs;
    QualityModel model;
    std::vector<std::vector<TaskTypeId>> composite_types;
    SystemState system;
    std::map<AgentId, AgentRuntime> parents;
    std::vector<AgentId> parent_ids;
    std::vector<AgentId> child_ids;
    std::map<TaskTypeId, double> best_base;
    TaskId next_task_id = 1;
    CompositeId next_composite_id = 1;
};

// Sample child capabilities and qualities, force capability coverage of every
// task type, wire responsibilities, and draw initial knowledge and
// neighbourhoods. The variant controls neighbourhood seeding.
World build_system(const ScenarioConfig& cfg, const Variant& variant, std::mt19937_64& rng);

struct EpisodeResult {
    int episode = 0;
    double utility = 0.0;
    double optimal_utility = 0.0;
    double failed_fraction = 0.0;
};

// One arrival wave: each responsible parent receives one composite task and
// works it under the step budget, parents taking turns in a shuffled order.
// A successful allocation scores its quality at the child's concurrent load
// at that moment; a parent's records leave the system when its turn ends.
EpisodeResult run_episode(World& world, const Variant& variant, int episode_index,
                          std::mt19937_64& rng);

struct RunResult {
    std::string label;
    int run = 0;
    std::uint64_t seed = 0;
    std::vector<EpisodeResult> episodes;
};

// The full label x run x episode grid, deterministically seeded from
// cfg.seed.
std::vector<RunResult> run_scenario(const ScenarioConfig& cfg);

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index);

} // namespace dtas
