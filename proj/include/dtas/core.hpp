#pragma once

#include <random>
#include <utility>

#include "dtas/quality.hpp"
#include "dtas/types.hpp"

namespace dtas {

// Operational semantics of the task-allocation system. Every rule is a pure
// transition: it validates its preconditions, then returns a new SystemState
// with the clock advanced by one tick, leaving the input untouched. Replaying
// the same (state, action, seed) always yields the same result.

// Requirement assignment: a composite task arriving from an external agent is
// handed to a uniformly random agent responsible for its type.
SystemState apply_requirement(const SystemState& state, const std::map<AgentId, AgentSpec>& specs,
                              const CompositeTask& composite, AgentId external,
                              std::mt19937_64& rng);

// Alloc: hand one held atomic task to a neighbour as a new singleton record.
// The original record is untouched; the task can never be allocated again.
SystemState apply_alloc(const SystemState& state, AgentId actor, const AtomicTask& task,
                        AgentId target);

// Exec: complete a held task. The task is removed from every record sharing
// the time identifier of the records through which the actor holds it, and
// the completion quality is evaluated at the actor's current concurrent
// count. Records left empty are dropped.
std::pair<SystemState, double> apply_exec(const SystemState& state,
                                          const std::map<AgentId, AgentSpec>& specs,
                                          const QualityModel& model, AgentId actor,
                                          const AtomicTask& task);

// Info: ask a neighbour for one agent drawn from its knowledge. The request
// and the neighbour's reply resolve in a single transition; the returned id
// is the subject the actor learned about. Knowledge of oneself is discarded.
// When from_neighbourhood is set the provider draws from its neighbourhood
// instead of its full knowledge.
std::pair<SystemState, AgentId> apply_info(const SystemState& state, AgentId actor, AgentId target,
                                           std::mt19937_64& rng, bool from_neighbourhood = false);

// Provide info: the provider-side half of the exchange, usable on its own.
// Consumes a pending info record from `provider` if one exists and adds
// `subject` to the requester's knowledge (idempotent).
SystemState apply_provide_info(const SystemState& state, AgentId provider, AgentId requester,
                               AgentId subject);

// Remove info: forget a known agent that is not a neighbour.
SystemState apply_remove_info(const SystemState& state, AgentId actor, AgentId known);

// Link: promote a known agent into the neighbourhood. One element of
// overflow past the constraint is tolerated so a pruning pass can follow
// within the same algorithm step.
SystemState apply_link(const SystemState& state, const std::map<AgentId, AgentSpec>& specs,
                       AgentId actor, AgentId known);

// Remove link: drop a neighbour; knowledge is unchanged.
SystemState apply_remove_link(const SystemState& state, AgentId actor, AgentId neighbour);

// targets: the subset of `actions` taken by `actor` whose payload references
// a member of `group`.
std::vector<Action> target_actions(const std::vector<Action>& actions, AgentId actor,
                                   const std::set<AgentId>& group);

} // namespace dtas
