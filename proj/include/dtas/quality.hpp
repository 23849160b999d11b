#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "dtas/types.hpp"

namespace dtas {

// Task-completion quality model. base_quality holds a value in (0,1] per
// (agent, task type) pair; a missing entry means the agent is incapable of
// that type. Concurrency degrades quality as base * k^(-exponent), so
// exponent = 1 is an even resource split and exponent = 0 disables the
// effect.
struct QualityModel {
    std::map<std::pair<AgentId, TaskTypeId>, double> base_quality;
    double concurrency_exponent = 1.0;

    bool capable(AgentId g, TaskTypeId type) const
    {
        return base_quality.count({g, type}) > 0;
    }
    double base(AgentId g, TaskTypeId type) const;
    // Quality of completing one task of `type` while holding k tasks total.
    double law(double base, int k) const;
};

// A candidate assignment of atomic tasks to agents. Each task appears at
// most once.
class AllocationMap {
public:
    void add(const AtomicTask& task, AgentId agent);
    bool contains(TaskId id) const;
    const std::vector<std::pair<AtomicTask, AgentId>>& pairs() const { return pairs_; }
    std::size_t size() const { return pairs_.size(); }
    bool empty() const { return pairs_.empty(); }

    friend AllocationMap merged(const AllocationMap& a, const AllocationMap& b);

private:
    std::vector<std::pair<AtomicTask, AgentId>> pairs_;
    std::set<TaskId> ids_;
};

// omega: quality of one task of `type` completed by `agent` with k concurrent
// allocations. Throws Incapable when the agent has no base quality for the
// type.
double task_quality(const QualityModel& model, AgentId agent, TaskTypeId type, int k);

// Tasks paired with `agent` inside an allocation map.
std::vector<AtomicTask> concurrent_tasks(const AllocationMap& alloc, AgentId agent);

// ql: summed quality of `tasks` under `alloc`, each task evaluated at its
// agent's concurrent-allocation count. Every member of `tasks` must appear
// in `alloc`.
double allocation_quality(const QualityModel& model, const std::vector<AtomicTask>& tasks,
                          const AllocationMap& alloc);

// Lazy enumeration of every total assignment of `tasks` onto `agents`
// (|agents|^|tasks| maps). Enumeration order is a fixed odometer over tasks
// (by id) and agents (by id), which callers rely on for deterministic
// tie-breaking.
class AssignmentEnumerator {
public:
    AssignmentEnumerator(std::vector<AtomicTask> tasks, std::vector<AgentId> agents);
    // Restrict each task to the agents capable of it (used by the optimal
    // search; preserves the odometer order of the unrestricted enumeration).
    AssignmentEnumerator(std::vector<AtomicTask> tasks, std::vector<AgentId> agents,
                         const QualityModel& model);
    bool next(AllocationMap& out);

private:
    std::vector<AtomicTask> tasks_;
    std::vector<std::vector<AgentId>> choices_;
    std::vector<std::size_t> index_;
    bool done_ = false;
    bool started_ = false;
};

inline constexpr std::uint64_t kDefaultEnumerationBudget = 10'000'000;

// Throws BudgetExceeded when |agents|^|tasks| > budget.
void check_assignment_budget(std::size_t n_tasks, std::size_t n_agents, std::uint64_t budget);

// ol: the assignment of `tasks` to `agents` maximising allocation quality,
// given a fixed allocation of other tasks that competes for agent resources.
// Ties resolve to the first map in enumeration order. Throws NonAllocable if
// some task type has no capable agent in `agents`.
AllocationMap local_optimal_assignment(const QualityModel& model,
                                       const std::vector<AtomicTask>& tasks,
                                       const std::vector<AgentId>& agents,
                                       const AllocationMap& fixed_alloc,
                                       std::uint64_t budget = kDefaultEnumerationBudget);

// oq: quality of the locally-optimal assignment.
double local_optimal_quality(const QualityModel& model, const std::vector<AtomicTask>& tasks,
                             const std::vector<AgentId>& agents, const AllocationMap& fixed_alloc,
                             std::uint64_t budget = kDefaultEnumerationBudget);

// allhoods: every neighbourhood an agent with constraint `neighbourhood_cap`
// could form from `pool`. The definition is strict: subsets of size
// < neighbourhood_cap.
std::vector<std::vector<AgentId>> enumerate_neighbourhoods(const std::vector<AgentId>& pool,
                                                           int neighbourhood_cap,
                                                           std::uint64_t budget = kDefaultEnumerationBudget);

// on: the neighbourhood from `pool` whose locally-optimal assignment of
// `tasks` has the highest quality. Neighbourhoods that cannot allocate all
// tasks are skipped; throws NonAllocable when none can.
std::vector<AgentId> optimal_neighbourhood(const QualityModel& model,
                                           const std::vector<AtomicTask>& tasks,
                                           const AgentSpec& agent, const std::vector<AgentId>& pool,
                                           const AllocationMap& fixed_alloc,
                                           std::uint64_t budget = kDefaultEnumerationBudget);

// os / osq: the locally-optimal assignment to the optimal neighbourhood, and
// its quality.
AllocationMap system_optimal_assignment(const QualityModel& model,
                                        const std::vector<AtomicTask>& tasks,
                                        const AgentSpec& agent, const std::vector<AgentId>& pool,
                                        const AllocationMap& fixed_alloc,
                                        std::uint64_t budget = kDefaultEnumerationBudget);
double system_optimal_quality(const QualityModel& model, const std::vector<AtomicTask>& tasks,
                              const AgentSpec& agent, const std::vector<AgentId>& pool,
                              const AllocationMap& fixed_alloc,
                              std::uint64_t budget = kDefaultEnumerationBudget);

// joq: the global assignment with the highest quality across all agents
// jointly, with no fixed load.
AllocationMap joint_optimal_assignment(const QualityModel& model,
                                       const std::vector<AtomicTask>& tasks,
                                       const std::vector<AgentId>& agents,
                                       std::uint64_t budget = kDefaultEnumerationBudget);

// u: summed allocation quality of the live singleton (agent-allocated)
// records in each snapshot.
double trace_utility(const QualityModel& model, const std::vector<SystemState>& states);

// u*: per snapshot, the best base quality any capable agent offers for each
// distinct task present, summed. Concurrency is ignored (k = 1), so this
// bounds trace_utility from above under any non-increasing law.
double isolated_optimal_utility(const QualityModel& model, const std::vector<SystemState>& states);

// d_loc: locally-optimal quality of `tasks` over `neighbourhood` minus their
// current quality under `alloc`. Non-negative whenever the current
// assignment stays inside the neighbourhood.
double local_optimality_gap(const QualityModel& model, const std::vector<AtomicTask>& tasks,
                            const std::vector<AgentId>& neighbourhood, const AllocationMap& alloc,
                            std::uint64_t budget = kDefaultEnumerationBudget);

// d_sys: system-optimal quality over every reachable neighbourhood minus the
// current quality.
double system_optimality_gap(const QualityModel& model, const std::vector<AtomicTask>& tasks,
                             const AgentSpec& agent, const std::vector<AgentId>& pool,
                             const AllocationMap& alloc,
                             std::uint64_t budget = kDefaultEnumerationBudget);

} // namespace dtas
