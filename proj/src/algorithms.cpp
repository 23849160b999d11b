#include "dtas/algorithms.hpp"

#include <algorithm>
#include <cmath>

namespace dtas {

StateKey PendingComposite::key() const
{
    std::vector<TaskTypeId> types;
    types.reserve(remaining.size());
    for (const auto& task : remaining)
        types.push_back(task.type);
    return state_key(std::move(types));
}

void PendingComposite::complete(TaskId task_id)
{
    remaining.erase(std::remove_if(remaining.begin(), remaining.end(),
                                   [&](const AtomicTask& t) { return t.id == task_id; }),
                    remaining.end());
}

namespace {

// Scale raw values and make them usable as selection weights: learned values
// can be negative, so shift to non-negative before sum normalisation; a
// degenerate all-equal set becomes uniform.
std::vector<ActionValue> normalise_weights(std::vector<ActionValue> values)
{
    double min_v = values.front().second;
    for (const auto& [a, v] : values)
        min_v = std::min(min_v, v);
    if (min_v < 0.0)
        for (auto& [a, v] : values)
            v -= min_v;
    double sum = 0.0;
    for (const auto& [a, v] : values)
        sum += v;
    if (sum <= 0.0)
        for (auto& [a, v] : values)
            v = 1.0;
    return sum_normalise(values);
}

// Available actions, optionally narrowed to allocations of one task type.
std::vector<ActionValue> focused_actions(const AgentRuntime& rt, const StateKey& state,
                                         TaskTypeId focus_type)
{
    auto avail = available_actions(rt.q, state, rt.state);
    if (focus_type >= 0)
        avail.erase(std::remove_if(avail.begin(), avail.end(),
                                   [&](const ActionValue& av) {
                                       return av.first.category == ActionCategory::Alloc &&
                                              av.first.type != focus_type;
                                   }),
                    avail.end());
    if (avail.empty())
        fail(Err::NoAvailableAction, "agent " + std::to_string(rt.spec.id) +
                                         " has no available action");
    return avail;
}

} // namespace

std::vector<ActionValue> rt_arp_action_weights(const AgentRuntime& rt, const StateKey& state,
                                               TaskTypeId focus_type)
{
    auto avail = focused_actions(rt, state, focus_type);

    const double factor_alloc = transform_trend(rt.tsqm, rt.trend_decay, 0.0);
    const double factor_info = transform_trend(rt.tsqm, rt.trend_decay, rt.weights.info);
    const double factor_link = transform_trend(rt.tsqm, rt.trend_decay, rt.weights.link);
    for (auto& [action, value] : avail) {
        switch (action.category) {
        case ActionCategory::Info: value *= factor_info; break;
        case ActionCategory::Link: value *= factor_link; break;
        default: value *= factor_alloc; break;
        }
    }
    return normalise_weights(std::move(avail));
}

ActionKey rt_arp_select(const AgentRuntime& rt, const StateKey& state, std::mt19937_64& rng,
                        TaskTypeId focus_type)
{
    auto weights = rt_arp_action_weights(rt, state, focus_type);
    double eps = rt.eps_base * exploration_factor(rt.tsqm, rt.trend_decay);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (unit(rng) < eps)
        return pick_max(weights, rng);
    return pick_boltzmann(weights, rt.tau, rng);
}

namespace {

bool targeted_in_q(const QTable& q, AgentId agent)
{
    for (const auto& [state, entries] : q.states())
        for (const auto& [action, value] : entries)
            if (action.target == agent)
                return true;
    return false;
}

ActionKey select_with_policy(const AgentRuntime& rt, const StateKey& state, std::mt19937_64& rng,
                             const StepPolicy& policy, TaskTypeId focus_type)
{
    switch (policy.select) {
    case SelectPolicy::RtArp:
        return rt_arp_select(rt, state, rng, focus_type);
    case SelectPolicy::ConstantEpsilon: {
        // Plain epsilon-greedy with the trend machinery off: eps_base keeps
        // its usual role as a constant exploration probability, and
        // exploration is undirected.
        auto avail = focused_actions(rt, state, focus_type);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        if (unit(rng) < rt.eps_base)
            return pick_uniform(avail, rng);
        return pick_max(avail, rng);
    }
    case SelectPolicy::BoltzmannTau:
        return pick_boltzmann(focused_actions(rt, state, focus_type), policy.boltzmann_tau, rng);
    }
    fail(Err::NoAvailableAction, "unreachable");
}

} // namespace

void enforce_knowledge_cap(AgentRuntime& rt, std::mt19937_64& rng)
{
    while (static_cast<int>(rt.state.knowledge.size()) > rt.spec.knowledge_cap) {
        std::vector<AgentId> removable;
        for (AgentId k : rt.state.knowledge)
            if (!rt.state.neighbourhood.count(k))
                removable.push_back(k);
        if (removable.empty())
            break;
        std::uniform_int_distribution<std::size_t> pick(0, removable.size() - 1);
        rt.state.knowledge.erase(removable[pick(rng)]);
    }
}

void sas_kr(AgentRuntime& rt, const StateKey& state, Tick now, std::mt19937_64& rng)
{
    for (const auto& [action, value] : unavailable_actions(rt.q, state, rt.state)) {
        if (action_information_value(rt.samples, action, now) >= rt.mv_threshold)
            continue;
        rt.samples.remove_action(action);
        rt.q.remove_actions({action});
        AgentId x = action.target;
        if (x >= 0 && !rt.state.neighbourhood.count(x) && !targeted_in_q(rt.q, x))
            rt.state.knowledge.erase(x);
    }
    enforce_knowledge_cap(rt, rng);
}

void n_prune(AgentRuntime& rt, std::mt19937_64& rng)
{
    while (static_cast<int>(rt.state.neighbourhood.size()) > rt.spec.neighbourhood_cap) {
        AgentId victim;
        if (rt.samples.any_targeting(rt.state.neighbourhood)) {
            victim = lowest_value_neighbour(rt.samples, rt.state.neighbourhood);
        } else {
            std::vector<AgentId> members(rt.state.neighbourhood.begin(),
                                         rt.state.neighbourhood.end());
            std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
            victim = members[pick(rng)];
        }
        rt.state.neighbourhood.erase(victim);
    }
}

namespace {

bool is_unavailable(const StepEnv& env, AgentId agent)
{
    return env.unavailable && env.unavailable->count(agent) > 0;
}

const AtomicTask* first_of_type(const PendingComposite& comp, TaskTypeId type)
{
    for (const auto& task : comp.remaining)
        if (task.type == type)
            return &task;
    return nullptr;
}

int held_count(const SystemState& sys, AgentId agent)
{
    int count = 0;
    for (const auto& record : sys.allocations)
        if (record.allocatee == agent)
            count += static_cast<int>(record.tasks.size());
    return count;
}

} // namespace

StepReport ata_ria_step(AgentRuntime& rt, SystemState& sys, PendingComposite& comp,
                        const StepEnv& env, std::mt19937_64& rng, const StepPolicy& policy)
{
    if (comp.done())
        fail(Err::ParameterOutOfRange, "composite already complete");

    const AgentId self = rt.spec.id;
    sys.agents[self] = rt.state;

    StepReport report;
    const StateKey before = comp.key();

    // Tasks are worked in canonical (sorted) order, so the task at hand is a
    // function of the state key and the selectable allocations are stable
    // across visits to the same state.
    AtomicTask head = comp.remaining.front();
    for (const auto& task : comp.remaining)
        if (task.type < head.type || (task.type == head.type && task.id < head.id))
            head = task;

    if (rt.spec.capabilities.count(head.type)) {
        auto [next, quality] = apply_exec(sys, *env.specs, *env.model, self, head);
        sys = std::move(next);
        report.action = exec_action(head.type);
        report.exec_quality = quality;
        report.task_completed = true;
        comp.complete(head.id);
    } else {
        ActionKey action = select_with_policy(rt, before, rng, policy, head.type);
        report.action = action;
        switch (action.category) {
        case ActionCategory::Alloc: {
            report.alloc_attempted = true;
            const AtomicTask* task = first_of_type(comp, action.type);
            if (!task)
                fail(Err::TaskNotHeld, "no pending task of selected type");
            bool rejected = is_unavailable(env, action.target) ||
                            !env.model->capable(action.target, action.type);
            if (rejected) {
                report.alloc_failed = true;
                sys.clock += 1;
            } else {
                AtomicTask chosen = *task;
                sys = apply_alloc(sys, self, chosen, action.target);
                int k = held_count(sys, action.target);
                double quality = env.model->law(env.model->base(action.target, action.type), k);
                report.reward = quality;
                report.sample_quality = quality;
                report.task_completed = true;
                comp.complete(chosen.id);
            }
            break;
        }
        case ActionCategory::Info: {
            report.reward = rt.info_link_reward;
            if (is_unavailable(env, action.target)) {
                sys.clock += 1;
            } else {
                try {
                    auto [next, subject] = apply_info(sys, self, action.target, rng,
                                                      env.provide_info_from_neighbourhood);
                    sys = std::move(next);
                    rt.state = sys.agents[self];
                } catch (const Error& e) {
                    if (e.code() != Err::EmptyKnowledge)
                        throw;
                    sys.clock += 1;
                }
            }
            if (policy.saskr)
                sas_kr(rt, before, sys.clock, rng);
            else
                enforce_knowledge_cap(rt, rng);
            break;
        }
        case ActionCategory::Link: {
            report.reward = rt.info_link_reward;
            if (is_unavailable(env, action.target)) {
                sys.clock += 1;
            } else {
                sys = apply_link(sys, *env.specs, self, action.target);
                rt.state = sys.agents[self];
            }
            n_prune(rt, rng);
            break;
        }
        default:
            fail(Err::NoAvailableAction, "selector returned a non-selectable category");
        }
    }

    const StateKey after = comp.key();
    rt.q.update(before, report.action, report.reward, after, rt.alpha, rt.gamma);
    rt.tsqm.add(report.sample_quality);
    rt.samples.append(report.action, sys.clock, report.sample_quality);
    sys.agents[self] = rt.state;
    return report;
}

} // namespace dtas
