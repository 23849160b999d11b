#include "dtas/core.hpp"

#include <algorithm>

namespace dtas {

namespace {

const AgentState& state_of(const SystemState& s, AgentId id)
{
    auto it = s.agents.find(id);
    if (it == s.agents.end())
        fail(Err::NotKnown, "agent " + std::to_string(id) + " does not exist");
    return it->second;
}

// Records through which `agent` currently holds `task`.
std::vector<const AllocationRecord*> holding_records(const SystemState& s, AgentId agent,
                                                     TaskId task)
{
    std::vector<const AllocationRecord*> out;
    for (const auto& record : s.allocations)
        if (record.allocatee == agent)
            for (const auto& t : record.tasks)
                if (t.id == task) {
                    out.push_back(&record);
                    break;
                }
    return out;
}

int held_count(const SystemState& s, AgentId agent)
{
    int count = 0;
    for (const auto& record : s.allocations)
        if (record.allocatee == agent)
            count += static_cast<int>(record.tasks.size());
    return count;
}

} // namespace

SystemState apply_requirement(const SystemState& state, const std::map<AgentId, AgentSpec>& specs,
                              const CompositeTask& composite, AgentId external,
                              std::mt19937_64& rng)
{
    std::vector<AgentId> responsible;
    for (const auto& [id, spec] : specs)
        if (spec.responsibilities.count(composite.type))
            responsible.push_back(id);
    if (responsible.empty())
        fail(Err::NoResponsibleAgent,
             "no agent responsible for composite type " + std::to_string(composite.type));

    std::uniform_int_distribution<std::size_t> pick(0, responsible.size() - 1);
    AgentId chosen = responsible[pick(rng)];

    SystemState next = state;
    AllocationRecord record;
    record.tasks = composite.tasks;
    record.t = next.clock;
    record.source = TaskSource{true, external};
    record.allocatee = chosen;
    next.allocations.push_back(std::move(record));
    next.clock += 1;
    return next;
}

SystemState apply_alloc(const SystemState& state, AgentId actor, const AtomicTask& task,
                        AgentId target)
{
    const AgentState& actor_state = state_of(state, actor);
    if (!actor_state.neighbourhood.count(target))
        fail(Err::NotInNeighbourhood, "agent " + std::to_string(target) + " not a neighbour");
    if (holding_records(state, actor, task.id).empty())
        fail(Err::TaskNotHeld, "task " + std::to_string(task.id) + " not held by actor");
    if (state.allocated_tasks.count(task.id))
        fail(Err::AlreadyAllocated, "task " + std::to_string(task.id) + " already allocated");

    SystemState next = state;
    AllocationRecord record;
    record.tasks = {task};
    record.t = next.clock;
    record.source = TaskSource{false, actor};
    record.allocatee = target;
    next.allocations.push_back(std::move(record));
    next.allocated_tasks.insert(task.id);
    next.clock += 1;
    return next;
}

std::pair<SystemState, double> apply_exec(const SystemState& state,
                                          const std::map<AgentId, AgentSpec>& specs,
                                          const QualityModel& model, AgentId actor,
                                          const AtomicTask& task)
{
    auto spec_it = specs.find(actor);
    if (spec_it == specs.end() || !spec_it->second.capabilities.count(task.type))
        fail(Err::NotCapable, "agent " + std::to_string(actor) + " cannot execute type " +
                                  std::to_string(task.type));
    auto held = holding_records(state, actor, task.id);
    if (held.empty())
        fail(Err::TaskNotHeld, "task " + std::to_string(task.id) + " not held by actor");

    double quality = task_quality(model, actor, task.type, held_count(state, actor));

    std::set<Tick> ids;
    for (const auto* record : held)
        ids.insert(record->t);

    SystemState next = state;
    next.allocations.clear();
    for (const auto& record : state.allocations) {
        if (!ids.count(record.t)) {
            next.allocations.push_back(record);
            continue;
        }
        AllocationRecord trimmed = record;
        trimmed.tasks.erase(std::remove_if(trimmed.tasks.begin(), trimmed.tasks.end(),
                                           [&](const AtomicTask& t) { return t.id == task.id; }),
                            trimmed.tasks.end());
        if (!trimmed.tasks.empty())
            next.allocations.push_back(std::move(trimmed));
    }
    next.clock += 1;
    return {std::move(next), quality};
}

std::pair<SystemState, AgentId> apply_info(const SystemState& state, AgentId actor, AgentId target,
                                           std::mt19937_64& rng, bool from_neighbourhood)
{
    const AgentState& actor_state = state_of(state, actor);
    if (!actor_state.neighbourhood.count(target))
        fail(Err::NotInNeighbourhood, "agent " + std::to_string(target) + " not a neighbour");
    const AgentState& provider = state_of(state, target);
    const std::set<AgentId>& source =
        from_neighbourhood ? provider.neighbourhood : provider.knowledge;
    if (source.empty())
        fail(Err::EmptyKnowledge, "provider " + std::to_string(target) + " knows no one");

    // The info pseudo-task is recorded and consumed within this transition;
    // only the knowledge gain and the clock advance remain observable.
    std::uniform_int_distribution<std::size_t> pick(0, source.size() - 1);
    auto it = source.begin();
    std::advance(it, pick(rng));
    AgentId subject = *it;

    SystemState next = state;
    if (subject != actor)
        next.agents[actor].knowledge.insert(subject);
    next.clock += 2; // request + reply
    return {std::move(next), subject};
}

SystemState apply_provide_info(const SystemState& state, AgentId provider, AgentId requester,
                               AgentId subject)
{
    const AgentState& provider_state = state_of(state, provider);
    if (!provider_state.knowledge.count(subject) && subject != requester)
        fail(Err::NotKnown, "subject " + std::to_string(subject) + " not known to provider");
    state_of(state, requester);

    SystemState next = state;
    for (auto it = next.allocations.begin(); it != next.allocations.end(); ++it)
        if (it->allocatee == provider && it->tasks.empty()) {
            next.allocations.erase(it);
            break;
        }
    if (subject != requester)
        next.agents[requester].knowledge.insert(subject);
    next.clock += 1;
    return next;
}

SystemState apply_remove_info(const SystemState& state, AgentId actor, AgentId known)
{
    const AgentState& actor_state = state_of(state, actor);
    if (actor_state.neighbourhood.count(known))
        fail(Err::InNeighbourhood, "agent " + std::to_string(known) + " is a neighbour");
    if (!actor_state.knowledge.count(known))
        fail(Err::NotKnown, "agent " + std::to_string(known) + " not known");

    SystemState next = state;
    next.agents[actor].knowledge.erase(known);
    next.clock += 1;
    return next;
}

SystemState apply_link(const SystemState& state, const std::map<AgentId, AgentSpec>& specs,
                       AgentId actor, AgentId known)
{
    const AgentState& actor_state = state_of(state, actor);
    if (!actor_state.knowledge.count(known))
        fail(Err::NotKnown, "agent " + std::to_string(known) + " not known");
    auto spec_it = specs.find(actor);
    if (spec_it == specs.end())
        fail(Err::NotKnown, "agent " + std::to_string(actor) + " has no spec");
    int cap = spec_it->second.neighbourhood_cap;
    if (static_cast<int>(actor_state.neighbourhood.size()) >= cap + 1)
        fail(Err::NeighbourhoodFull, "neighbourhood beyond transient overflow");

    SystemState next = state;
    next.agents[actor].neighbourhood.insert(known);
    next.clock += 1;
    return next;
}

SystemState apply_remove_link(const SystemState& state, AgentId actor, AgentId neighbour)
{
    const AgentState& actor_state = state_of(state, actor);
    if (!actor_state.neighbourhood.count(neighbour))
        fail(Err::NotNeighbour, "agent " + std::to_string(neighbour) + " not a neighbour");

    SystemState next = state;
    next.agents[actor].neighbourhood.erase(neighbour);
    next.clock += 1;
    return next;
}

std::vector<Action> target_actions(const std::vector<Action>& actions, AgentId actor,
                                   const std::set<AgentId>& group)
{
    std::vector<Action> out;
    for (const auto& action : actions) {
        if (action.actor != actor)
            continue;
        bool hits = (action.target >= 0 && group.count(action.target)) ||
                    (action.subject >= 0 && group.count(action.subject));
        if (hits)
            out.push_back(action);
    }
    return out;
}

} // namespace dtas
