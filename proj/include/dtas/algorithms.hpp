#pragma once

#include <random>

#include "dtas/core.hpp"
#include "dtas/impact.hpp"
#include "dtas/learning.hpp"

namespace dtas {

// Everything one agent owns while it learns: its static spec, live
// knowledge/neighbourhood, Q-table, action history, quality trends and
// learning parameters.
struct AgentRuntime {
    AgentSpec spec;
    AgentState state;
    QTable q{0.5};
    ActionSampleStore samples;
    Tsqm tsqm{10, 10};
    ImpactWeights weights;

    double eps_base = 0.95;      // base exploitation factor
    double mv_threshold = 0.1;   // retention floor for action information
    double alpha = 0.1;          // learning rate
    double gamma = 0.3;          // discount factor
    double tau = 1.0;            // Boltzmann temperature for the explore branch
    double trend_decay = 0.95;   // row damping for trend interpolation
    double info_link_reward = -0.05;
};

// How the composite currently being worked stands: the atomic tasks not yet
// executed or handed off.
struct PendingComposite {
    CompositeId id = 0;
    std::vector<AtomicTask> remaining;

    bool done() const { return remaining.empty(); }
    StateKey key() const;
    void complete(TaskId id);
};

// The slice of the world a single step needs to resolve actions: agent specs
// for capability checks, the quality model, and which agents are rejecting
// interaction this episode.
struct StepEnv {
    const std::map<AgentId, AgentSpec>* specs = nullptr;
    const QualityModel* model = nullptr;
    const std::set<AgentId>* unavailable = nullptr;
    bool provide_info_from_neighbourhood = false;
};

enum class SelectPolicy {
    RtArp,            // trend-scaled values, trend-scaled exploitation factor
    ConstantEpsilon,  // no trend influence, epsilon fixed at eps_base
    BoltzmannTau,     // plain Boltzmann on raw values (comparison baselines)
};

struct StepPolicy {
    SelectPolicy select = SelectPolicy::RtArp;
    bool saskr = true;  // when false, only the knowledge cap is enforced
    double boltzmann_tau = 1.0;
};

struct StepReport {
    ActionKey action;
    double reward = 0.0;
    double sample_quality = 0.0;  // recorded into the trend matrix and samples
    double exec_quality = 0.0;    // completion quality when the agent executed itself
    bool alloc_attempted = false;
    bool alloc_failed = false;
    bool task_completed = false;
};

// RT-ARP value preparation: available actions scaled element-wise by the
// trend transform of their category weight, then normalised to a
// distribution. Exposed separately so the scaling is observable. A focus
// type narrows the Alloc candidates to the task currently being worked, the
// way the outer loop visits one task at a time.
std::vector<ActionValue> rt_arp_action_weights(const AgentRuntime& rt, const StateKey& state,
                                               TaskTypeId focus_type = -1);

// RT-ARP selection: exploit (max) with probability eps_base * IT(0.5),
// otherwise Boltzmann-explore over the prepared weights.
ActionKey rt_arp_select(const AgentRuntime& rt, const StateKey& state, std::mt19937_64& rng,
                        TaskTypeId focus_type = -1);

// SAS-KR: drop unavailable actions whose information value fell below the
// retention threshold, together with their samples and any knowledge of
// agents no longer targeted by a retained action; then enforce the knowledge
// cap by evicting random known non-neighbours.
void sas_kr(AgentRuntime& rt, const StateKey& state, Tick now, std::mt19937_64& rng);

// Knowledge cap enforcement alone (the resource constraint survives even
// when SAS-KR is disabled in a comparison run).
void enforce_knowledge_cap(AgentRuntime& rt, std::mt19937_64& rng);

// N-Prune: while the neighbourhood exceeds its cap, remove the sampled
// neighbour with the lowest summed quality, or a random neighbour when no
// quality has been observed.
void n_prune(AgentRuntime& rt, std::mt19937_64& rng);

// One ATA-RIA action for one agent: execute a capable task directly, or
// select among Alloc/Info/Link, resolve it against the system, run the
// pruning pass the action calls for, then update the Q-table, the trend
// matrix and the sample history.
StepReport ata_ria_step(AgentRuntime& rt, SystemState& sys, PendingComposite& comp,
                        const StepEnv& env, std::mt19937_64& rng,
                        const StepPolicy& policy = StepPolicy{});

} // namespace dtas
