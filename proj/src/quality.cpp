#include "dtas/quality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dtas {

double QualityModel::base(AgentId g, TaskTypeId type) const
{
    auto it = base_quality.find({g, type});
    if (it == base_quality.end())
        fail(Err::Incapable, "agent " + std::to_string(g) + " has no quality for type " +
                                 std::to_string(type));
    return it->second;
}

double QualityModel::law(double base, int k) const
{
    if (k < 1)
        fail(Err::ParameterOutOfRange, "concurrent count must be >= 1");
    return base * std::pow(static_cast<double>(k), -concurrency_exponent);
}

void AllocationMap::add(const AtomicTask& task, AgentId agent)
{
    if (ids_.count(task.id))
        fail(Err::AlreadyAllocated, "task " + std::to_string(task.id) + " already in map");
    ids_.insert(task.id);
    pairs_.emplace_back(task, agent);
}

bool AllocationMap::contains(TaskId id) const
{
    return ids_.count(id) > 0;
}

AllocationMap merged(const AllocationMap& a, const AllocationMap& b)
{
    AllocationMap out = a;
    for (const auto& [task, agent] : b.pairs_)
        out.add(task, agent);
    return out;
}

double task_quality(const QualityModel& model, AgentId agent, TaskTypeId type, int k)
{
    return model.law(model.base(agent, type), k);
}

std::vector<AtomicTask> concurrent_tasks(const AllocationMap& alloc, AgentId agent)
{
    std::vector<AtomicTask> out;
    for (const auto& [task, g] : alloc.pairs())
        if (g == agent)
            out.push_back(task);
    return out;
}

double allocation_quality(const QualityModel& model, const std::vector<AtomicTask>& tasks,
                          const AllocationMap& alloc)
{
    std::map<AgentId, int> load;
    for (const auto& [task, g] : alloc.pairs())
        load[g] += 1;

    double total = 0.0;
    for (const auto& task : tasks) {
        const std::pair<AtomicTask, AgentId>* found = nullptr;
        for (const auto& pair : alloc.pairs())
            if (pair.first.id == task.id) {
                found = &pair;
                break;
            }
        if (!found)
            fail(Err::UnallocatedTask, "task " + std::to_string(task.id) + " not allocated");
        total += task_quality(model, found->second, task.type, load[found->second]);
    }
    return total;
}

namespace {

std::vector<AtomicTask> sorted_tasks(std::vector<AtomicTask> tasks)
{
    std::sort(tasks.begin(), tasks.end());
    return tasks;
}

std::vector<AgentId> sorted_agents(std::vector<AgentId> agents)
{
    std::sort(agents.begin(), agents.end());
    agents.erase(std::unique(agents.begin(), agents.end()), agents.end());
    return agents;
}

// fixed_alloc entries for the tasks being re-assigned would double-count
// resources, so the optimal search works against the remainder.
AllocationMap strip_tasks(const AllocationMap& alloc, const std::vector<AtomicTask>& tasks)
{
    std::set<TaskId> ids;
    for (const auto& t : tasks)
        ids.insert(t.id);
    AllocationMap out;
    for (const auto& [task, agent] : alloc.pairs())
        if (!ids.count(task.id))
            out.add(task, agent);
    return out;
}

} // namespace

AssignmentEnumerator::AssignmentEnumerator(std::vector<AtomicTask> tasks,
                                           std::vector<AgentId> agents)
    : tasks_(sorted_tasks(std::move(tasks)))
{
    auto pool = sorted_agents(std::move(agents));
    choices_.assign(tasks_.size(), pool);
    index_.assign(tasks_.size(), 0);
    if (!tasks_.empty() && pool.empty())
        done_ = true;
}

AssignmentEnumerator::AssignmentEnumerator(std::vector<AtomicTask> tasks,
                                           std::vector<AgentId> agents, const QualityModel& model)
    : tasks_(sorted_tasks(std::move(tasks)))
{
    auto pool = sorted_agents(std::move(agents));
    choices_.reserve(tasks_.size());
    for (const auto& task : tasks_) {
        std::vector<AgentId> capable;
        for (AgentId g : pool)
            if (model.capable(g, task.type))
                capable.push_back(g);
        if (capable.empty())
            done_ = true;
        choices_.push_back(std::move(capable));
    }
    index_.assign(tasks_.size(), 0);
}

bool AssignmentEnumerator::next(AllocationMap& out)
{
    if (done_)
        return false;
    if (started_) {
        // Advance the odometer, least-significant digit last.
        std::size_t i = tasks_.size();
        while (i > 0) {
            --i;
            if (++index_[i] < choices_[i].size())
                break;
            index_[i] = 0;
            if (i == 0) {
                done_ = true;
                return false;
            }
        }
        if (tasks_.empty()) {
            done_ = true;
            return false;
        }
    }
    started_ = true;
    out = AllocationMap{};
    for (std::size_t i = 0; i < tasks_.size(); ++i)
        out.add(tasks_[i], choices_[i][index_[i]]);
    return true;
}

void check_assignment_budget(std::size_t n_tasks, std::size_t n_agents, std::uint64_t budget)
{
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < n_tasks; ++i) {
        if (n_agents != 0 && count > budget / n_agents)
            fail(Err::BudgetExceeded, "assignment enumeration exceeds budget");
        count *= n_agents;
    }
    if (count > budget)
        fail(Err::BudgetExceeded, "assignment enumeration exceeds budget");
}

namespace {

std::pair<AllocationMap, double> best_assignment(const QualityModel& model,
                                                 const std::vector<AtomicTask>& tasks,
                                                 const std::vector<AgentId>& agents,
                                                 const AllocationMap& fixed_alloc,
                                                 std::uint64_t budget)
{
    for (const auto& task : tasks) {
        bool any = false;
        for (AgentId g : agents)
            if (model.capable(g, task.type)) {
                any = true;
                break;
            }
        if (!any)
            fail(Err::NonAllocable, "no capable agent for type " + std::to_string(task.type));
    }
    check_assignment_budget(tasks.size(), agents.size(), budget);

    const AllocationMap fixed = strip_tasks(fixed_alloc, tasks);
    AssignmentEnumerator en(tasks, agents, model);
    AllocationMap candidate;
    AllocationMap best;
    double best_q = -std::numeric_limits<double>::infinity();
    bool have = false;
    while (en.next(candidate)) {
        double q = allocation_quality(model, tasks, merged(fixed, candidate));
        if (!have || q > best_q) {
            best = candidate;
            best_q = q;
            have = true;
        }
    }
    if (!have)
        fail(Err::NonAllocable, "no feasible assignment");
    return {best, best_q};
}

} // namespace

AllocationMap local_optimal_assignment(const QualityModel& model,
                                       const std::vector<AtomicTask>& tasks,
                                       const std::vector<AgentId>& agents,
                                       const AllocationMap& fixed_alloc, std::uint64_t budget)
{
    return best_assignment(model, tasks, agents, fixed_alloc, budget).first;
}

double local_optimal_quality(const QualityModel& model, const std::vector<AtomicTask>& tasks,
                             const std::vector<AgentId>& agents, const AllocationMap& fixed_alloc,
                             std::uint64_t budget)
{
    return best_assignment(model, tasks, agents, fixed_alloc, budget).second;
}

namespace {

void combinations(const std::vector<AgentId>& pool, std::size_t size, std::size_t start,
                  std::vector<AgentId>& current, std::vector<std::vector<AgentId>>& out)
{
    if (current.size() == size) {
        out.push_back(current);
        return;
    }
    for (std::size_t i = start; i < pool.size(); ++i) {
        current.push_back(pool[i]);
        combinations(pool, size, i + 1, current, out);
        current.pop_back();
    }
}

} // namespace

std::vector<std::vector<AgentId>> enumerate_neighbourhoods(const std::vector<AgentId>& pool,
                                                           int neighbourhood_cap,
                                                           std::uint64_t budget)
{
    auto sorted = sorted_agents(pool);
    std::vector<std::vector<AgentId>> out;
    std::vector<AgentId> current;
    for (int size = 0; size < neighbourhood_cap; ++size) {
        if (static_cast<std::size_t>(size) > sorted.size())
            break;
        combinations(sorted, static_cast<std::size_t>(size), 0, current, out);
        if (out.size() > budget)
            fail(Err::BudgetExceeded, "neighbourhood enumeration exceeds budget");
    }
    return out;
}

std::vector<AgentId> optimal_neighbourhood(const QualityModel& model,
                                           const std::vector<AtomicTask>& tasks,
                                           const AgentSpec& agent, const std::vector<AgentId>& pool,
                                           const AllocationMap& fixed_alloc, std::uint64_t budget)
{
    auto hoods = enumerate_neighbourhoods(pool, agent.neighbourhood_cap, budget);
    std::vector<AgentId> best;
    double best_q = -std::numeric_limits<double>::infinity();
    bool have = false;
    for (const auto& hood : hoods) {
        double q;
        try {
            q = local_optimal_quality(model, tasks, hood, fixed_alloc, budget);
        } catch (const Error& e) {
            if (e.code() == Err::NonAllocable)
                continue;
            throw;
        }
        if (!have || q > best_q) {
            best = hood;
            best_q = q;
            have = true;
        }
    }
    if (!have)
        fail(Err::NonAllocable, "no reachable neighbourhood can allocate all tasks");
    return best;
}

AllocationMap system_optimal_assignment(const QualityModel& model,
                                        const std::vector<AtomicTask>& tasks,
                                        const AgentSpec& agent, const std::vector<AgentId>& pool,
                                        const AllocationMap& fixed_alloc, std::uint64_t budget)
{
    auto hood = optimal_neighbourhood(model, tasks, agent, pool, fixed_alloc, budget);
    return local_optimal_assignment(model, tasks, hood, fixed_alloc, budget);
}

double system_optimal_quality(const QualityModel& model, const std::vector<AtomicTask>& tasks,
                              const AgentSpec& agent, const std::vector<AgentId>& pool,
                              const AllocationMap& fixed_alloc, std::uint64_t budget)
{
    auto hood = optimal_neighbourhood(model, tasks, agent, pool, fixed_alloc, budget);
    return local_optimal_quality(model, tasks, hood, fixed_alloc, budget);
}

AllocationMap joint_optimal_assignment(const QualityModel& model,
                                       const std::vector<AtomicTask>& tasks,
                                       const std::vector<AgentId>& agents, std::uint64_t budget)
{
    return local_optimal_assignment(model, tasks, agents, AllocationMap{}, budget);
}

namespace {

AllocationMap singleton_records_map(const SystemState& state)
{
    AllocationMap out;
    for (const auto& record : state.allocations)
        if (!record.source.external)
            for (const auto& task : record.tasks)
                out.add(task, record.allocatee);
    return out;
}

} // namespace

double trace_utility(const QualityModel& model, const std::vector<SystemState>& states)
{
    double total = 0.0;
    for (const auto& state : states) {
        AllocationMap alloc = singleton_records_map(state);
        std::vector<AtomicTask> tasks;
        for (const auto& [task, agent] : alloc.pairs())
            tasks.push_back(task);
        total += allocation_quality(model, tasks, alloc);
    }
    return total;
}

double isolated_optimal_utility(const QualityModel& model, const std::vector<SystemState>& states)
{
    double total = 0.0;
    for (const auto& state : states) {
        std::map<TaskId, TaskTypeId> seen;
        for (const auto& record : state.allocations)
            for (const auto& task : record.tasks)
                seen.emplace(task.id, task.type);
        for (const auto& [id, type] : seen) {
            double best = 0.0;
            for (const auto& [key, base] : model.base_quality)
                if (key.second == type)
                    best = std::max(best, base);
            total += best;
        }
    }
    return total;
}

double local_optimality_gap(const QualityModel& model, const std::vector<AtomicTask>& tasks,
                            const std::vector<AgentId>& neighbourhood, const AllocationMap& alloc,
                            std::uint64_t budget)
{
    return local_optimal_quality(model, tasks, neighbourhood, alloc, budget) -
           allocation_quality(model, tasks, alloc);
}

double system_optimality_gap(const QualityModel& model, const std::vector<AtomicTask>& tasks,
                             const AgentSpec& agent, const std::vector<AgentId>& pool,
                             const AllocationMap& alloc, std::uint64_t budget)
{
    return system_optimal_quality(model, tasks, agent, pool, alloc, budget) -
           allocation_quality(model, tasks, alloc);
}

} // namespace dtas
