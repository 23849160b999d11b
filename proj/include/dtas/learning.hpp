#pragma once

#include <map>
#include <random>
#include <set>
#include <tuple>
#include <vector>

#include "dtas/types.hpp"

namespace dtas {

// Learned action identity. Alloc actions learn per (task type, target) so
// allocating the same type to different children carries distinct values;
// Info and Link learn per target.
struct ActionKey {
    ActionCategory category = ActionCategory::Exec;
    TaskTypeId type = -1;
    AgentId target = -1;

    friend bool operator==(const ActionKey& a, const ActionKey& b)
    {
        return a.category == b.category && a.type == b.type && a.target == b.target;
    }
    friend bool operator<(const ActionKey& a, const ActionKey& b)
    {
        return std::tie(a.category, a.type, a.target) < std::tie(b.category, b.type, b.target);
    }
};

inline ActionKey alloc_action(TaskTypeId type, AgentId target)
{
    return ActionKey{ActionCategory::Alloc, type, target};
}
inline ActionKey info_action(AgentId target) { return ActionKey{ActionCategory::Info, -1, target}; }
inline ActionKey link_action(AgentId target) { return ActionKey{ActionCategory::Link, -1, target}; }
inline ActionKey exec_action(TaskTypeId type) { return ActionKey{ActionCategory::Exec, type, -1}; }

// Q-table state: the canonical (sorted) multiset of task types the agent is
// still to allocate.
using StateKey = std::vector<TaskTypeId>;
StateKey state_key(std::vector<TaskTypeId> unallocated_types);

using ActionValue = std::pair<ActionKey, double>;

class QTable {
public:
    explicit QTable(double default_q = 0.5) : default_q_(default_q) {}

    double default_q() const { return default_q_; }
    double value(const StateKey& state, const ActionKey& action) const;
    bool has(const StateKey& state, const ActionKey& action) const;

    // Q(s,a) <- Q(s,a) + alpha * (r + gamma * max_a' Q(s',a') - Q(s,a)).
    // The future estimate is the best stored value for s', or default_q when
    // s' has never been visited. Exactly one entry changes.
    void update(const StateKey& state, const ActionKey& action, double reward,
                const StateKey& next_state, double alpha, double gamma);

    // Stored entries for a state.
    std::vector<ActionValue> entries(const StateKey& state) const;

    // Delete the given actions across every state.
    void remove_actions(const std::set<ActionKey>& actions);

    // Move every value in each state halfway toward that state's mean.
    void decay_toward_state_mean();

    std::size_t entry_count() const;
    const std::map<StateKey, std::map<ActionKey, double>>& states() const { return table_; }

private:
    double max_future(const StateKey& state) const;

    double default_q_;
    std::map<StateKey, std::map<ActionKey, double>> table_;
};

struct ActionSample {
    ActionKey action;
    Tick time = 0;
    double quality = 0.0;
};

// Per-agent, time-ordered record of actions taken and the quality each
// returned.
class ActionSampleStore {
public:
    void append(const ActionKey& action, Tick time, double quality);
    const std::vector<ActionSample>& samples() const { return samples_; }

    std::vector<ActionSample> select(const std::set<ActionKey>& actions) const;
    std::vector<ActionSample> select_action(const ActionKey& action) const;
    void remove_action(const ActionKey& action);

    bool any_targeting(const std::set<AgentId>& group) const;

private:
    std::vector<ActionSample> samples_;
};

// MV: sample count over staleness for one action. No samples -> 0; a sample
// taken this very tick -> +infinity (always retain).
double action_information_value(const ActionSampleStore& store, const ActionKey& action, Tick now);

// nval: summed sample quality of actions targeting any member of `group`.
double neighbour_value(const ActionSampleStore& store, const std::set<AgentId>& group);

// mvn: the neighbour whose targeting samples sum to the least quality,
// considering only neighbours that have returned at least one sample; ties
// break to the lowest id. Falls back to the lowest id when nothing has been
// sampled.
AgentId lowest_value_neighbour(const ActionSampleStore& store,
                               const std::set<AgentId>& neighbourhood);

// Action availability for a state. Available actions are generated from the
// agent's current reach: one Alloc per (pending type, neighbour), one Info
// per neighbour, one Link per known non-neighbour, plus any stored entry
// still executable. Unavailable actions are stored entries whose target has
// drifted out of reach (e.g. a learned Alloc toward a known agent no longer
// linked).
std::vector<ActionValue> available_actions(const QTable& q, const StateKey& state,
                                           const AgentState& agent_state);
std::vector<ActionValue> unavailable_actions(const QTable& q, const StateKey& state,
                                             const AgentState& agent_state);

// Standard selection helpers.
std::vector<ActionValue> sum_normalise(const std::vector<ActionValue>& values);
std::vector<ActionValue> softmax_normalise(const std::vector<ActionValue>& values);
ActionKey pick_uniform(const std::vector<ActionValue>& values, std::mt19937_64& rng);
ActionKey pick_max(const std::vector<ActionValue>& values, std::mt19937_64& rng);
ActionKey pick_boltzmann(const std::vector<ActionValue>& values, double tau, std::mt19937_64& rng);

} // namespace dtas
