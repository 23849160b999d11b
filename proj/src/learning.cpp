#include "dtas/learning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dtas {

StateKey state_key(std::vector<TaskTypeId> unallocated_types)
{
    std::sort(unallocated_types.begin(), unallocated_types.end());
    return unallocated_types;
}

double QTable::value(const StateKey& state, const ActionKey& action) const
{
    auto s = table_.find(state);
    if (s == table_.end())
        return default_q_;
    auto a = s->second.find(action);
    return a == s->second.end() ? default_q_ : a->second;
}

bool QTable::has(const StateKey& state, const ActionKey& action) const
{
    auto s = table_.find(state);
    return s != table_.end() && s->second.count(action) > 0;
}

double QTable::max_future(const StateKey& state) const
{
    auto s = table_.find(state);
    if (s == table_.end() || s->second.empty())
        return default_q_;
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& [action, value] : s->second)
        best = std::max(best, value);
    return best;
}

void QTable::update(const StateKey& state, const ActionKey& action, double reward,
                    const StateKey& next_state, double alpha, double gamma)
{
    if (alpha < 0.0 || alpha > 1.0 || gamma < 0.0 || gamma > 1.0)
        fail(Err::ParameterOutOfRange, "alpha and gamma must lie in [0,1]");
    double current = value(state, action);
    double target = reward + gamma * max_future(next_state);
    table_[state][action] = current + alpha * (target - current);
}

std::vector<ActionValue> QTable::entries(const StateKey& state) const
{
    std::vector<ActionValue> out;
    auto s = table_.find(state);
    if (s == table_.end())
        return out;
    out.assign(s->second.begin(), s->second.end());
    return out;
}

void QTable::remove_actions(const std::set<ActionKey>& actions)
{
    for (auto it = table_.begin(); it != table_.end();) {
        for (const auto& action : actions)
            it->second.erase(action);
        if (it->second.empty())
            it = table_.erase(it);
        else
            ++it;
    }
}

void QTable::decay_toward_state_mean()
{
    for (auto& [state, entries] : table_) {
        if (entries.empty())
            continue;
        double mean = 0.0;
        for (const auto& [action, value] : entries)
            mean += value;
        mean /= static_cast<double>(entries.size());
        for (auto& [action, value] : entries)
            value += 0.5 * (mean - value);
    }
}

std::size_t QTable::entry_count() const
{
    std::size_t n = 0;
    for (const auto& [state, entries] : table_)
        n += entries.size();
    return n;
}

void ActionSampleStore::append(const ActionKey& action, Tick time, double quality)
{
    samples_.push_back(ActionSample{action, time, quality});
}

std::vector<ActionSample> ActionSampleStore::select(const std::set<ActionKey>& actions) const
{
    std::vector<ActionSample> out;
    for (const auto& sample : samples_)
        if (actions.count(sample.action))
            out.push_back(sample);
    return out;
}

std::vector<ActionSample> ActionSampleStore::select_action(const ActionKey& action) const
{
    std::vector<ActionSample> out;
    for (const auto& sample : samples_)
        if (sample.action == action)
            out.push_back(sample);
    return out;
}

void ActionSampleStore::remove_action(const ActionKey& action)
{
    samples_.erase(std::remove_if(samples_.begin(), samples_.end(),
                                  [&](const ActionSample& s) { return s.action == action; }),
                   samples_.end());
}

bool ActionSampleStore::any_targeting(const std::set<AgentId>& group) const
{
    for (const auto& sample : samples_)
        if (sample.action.target >= 0 && group.count(sample.action.target))
            return true;
    return false;
}

double action_information_value(const ActionSampleStore& store, const ActionKey& action, Tick now)
{
    auto samples = store.select_action(action);
    if (samples.empty())
        return 0.0;
    Tick latest = samples.back().time;
    for (const auto& s : samples)
        latest = std::max(latest, s.time);
    if (latest >= now)
        return std::numeric_limits<double>::infinity();
    return static_cast<double>(samples.size()) / static_cast<double>(now - latest);
}

double neighbour_value(const ActionSampleStore& store, const std::set<AgentId>& group)
{
    double total = 0.0;
    for (const auto& sample : store.samples())
        if (sample.action.target >= 0 && group.count(sample.action.target))
            total += sample.quality;
    return total;
}

AgentId lowest_value_neighbour(const ActionSampleStore& store,
                               const std::set<AgentId>& neighbourhood)
{
    if (neighbourhood.empty())
        fail(Err::NotNeighbour, "empty neighbourhood");

    AgentId best = -1;
    double best_value = std::numeric_limits<double>::infinity();
    for (AgentId n : neighbourhood) {
        bool sampled = store.any_targeting({n});
        if (!sampled)
            continue;
        double v = neighbour_value(store, {n});
        if (v < best_value) {
            best = n;
            best_value = v;
        }
    }
    if (best < 0)
        return *neighbourhood.begin();
    return best;
}

namespace {

bool executable(const ActionKey& action, const AgentState& st)
{
    switch (action.category) {
    case ActionCategory::Alloc:
    case ActionCategory::Info:
        return st.neighbourhood.count(action.target) > 0;
    case ActionCategory::Link:
        return st.knowledge.count(action.target) > 0;
    default:
        return false;
    }
}

} // namespace

std::vector<ActionValue> available_actions(const QTable& q, const StateKey& state,
                                           const AgentState& agent_state)
{
    std::map<ActionKey, double> out;

    std::set<TaskTypeId> pending(state.begin(), state.end());
    for (TaskTypeId type : pending)
        for (AgentId n : agent_state.neighbourhood)
            out.emplace(alloc_action(type, n), 0.0);
    for (AgentId n : agent_state.neighbourhood)
        out.emplace(info_action(n), 0.0);
    for (AgentId k : agent_state.knowledge)
        if (!agent_state.neighbourhood.count(k))
            out.emplace(link_action(k), 0.0);

    // Stored entries that are still executable stay selectable even when the
    // generator above would not produce them (e.g. a Link toward a current
    // neighbour).
    for (const auto& [action, value] : q.entries(state))
        if (action.target >= 0 && executable(action, agent_state))
            out.emplace(action, 0.0);

    std::vector<ActionValue> result;
    result.reserve(out.size());
    for (auto& [action, unused] : out)
        result.emplace_back(action, q.value(state, action));
    return result;
}

std::vector<ActionValue> unavailable_actions(const QTable& q, const StateKey& state,
                                             const AgentState& agent_state)
{
    std::vector<ActionValue> result;
    for (const auto& [action, value] : q.entries(state))
        if (action.target >= 0 && !executable(action, agent_state))
            result.emplace_back(action, value);
    return result;
}

std::vector<ActionValue> sum_normalise(const std::vector<ActionValue>& values)
{
    double sum = 0.0;
    for (const auto& [action, v] : values)
        sum += v;
    if (sum <= 0.0)
        fail(Err::ZeroSum, "sum normalisation requires a positive sum");
    std::vector<ActionValue> out;
    out.reserve(values.size());
    for (const auto& [action, v] : values)
        out.emplace_back(action, v / sum);
    return out;
}

std::vector<ActionValue> softmax_normalise(const std::vector<ActionValue>& values)
{
    double max_v = -std::numeric_limits<double>::infinity();
    for (const auto& [action, v] : values)
        max_v = std::max(max_v, v);
    double sum = 0.0;
    for (const auto& [action, v] : values)
        sum += std::exp(v - max_v);
    std::vector<ActionValue> out;
    out.reserve(values.size());
    for (const auto& [action, v] : values)
        out.emplace_back(action, std::exp(v - max_v) / sum);
    return out;
}

ActionKey pick_uniform(const std::vector<ActionValue>& values, std::mt19937_64& rng)
{
    if (values.empty())
        fail(Err::NoAvailableAction, "cannot select from an empty set");
    std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
    return values[pick(rng)].first;
}

ActionKey pick_max(const std::vector<ActionValue>& values, std::mt19937_64& rng)
{
    if (values.empty())
        fail(Err::NoAvailableAction, "cannot select from an empty set");
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& [action, v] : values)
        best = std::max(best, v);
    std::vector<ActionValue> top;
    for (const auto& [action, v] : values)
        if (v == best)
            top.emplace_back(action, v);
    return pick_uniform(top, rng);
}

ActionKey pick_boltzmann(const std::vector<ActionValue>& values, double tau, std::mt19937_64& rng)
{
    if (values.empty())
        fail(Err::NoAvailableAction, "cannot select from an empty set");
    if (tau <= 0.0)
        fail(Err::NonPositiveTemperature, "temperature must be positive");
    double max_v = -std::numeric_limits<double>::infinity();
    for (const auto& [action, v] : values)
        max_v = std::max(max_v, v);
    std::vector<double> weights;
    weights.reserve(values.size());
    for (const auto& [action, v] : values)
        weights.push_back(std::exp((v - max_v) / tau));
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    return values[pick(rng)].first;
}

} // namespace dtas
