#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace dtas {

using AgentId = std::int32_t;
using TaskTypeId = std::int32_t;
using CompositeTypeId = std::int32_t;
using TaskId = std::int64_t;
using CompositeId = std::int64_t;
using Tick = std::int64_t;

enum class Err {
    NoResponsibleAgent,
    NotInNeighbourhood,
    TaskNotHeld,
    AlreadyAllocated,
    NotCapable,
    InNeighbourhood,
    NotKnown,
    NotNeighbour,
    NeighbourhoodFull,
    EmptyKnowledge,
    Incapable,
    UnallocatedTask,
    BudgetExceeded,
    NonAllocable,
    ParameterOutOfRange,
    ZeroSum,
    NonPositiveTemperature,
    InsufficientHistory,
    InvalidSizes,
    NoAvailableAction,
    InfeasibleConfig,
};

class Error : public std::runtime_error {
public:
    Error(Err code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Err code() const { return code_; }

private:
    Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& what)
{
    throw Error(code, what);
}

enum class ActionCategory {
    Alloc,
    Exec,
    Info,
    ProvideInfo,
    RemoveInfo,
    Link,
    RemoveLink,
};

// An individually executable task. Identity is the id; the type drives
// capability checks and quality lookups.
struct AtomicTask {
    TaskId id = 0;
    TaskTypeId type = 0;
    CompositeId origin = 0;
    Tick created = 0;

    friend bool operator==(const AtomicTask& a, const AtomicTask& b) { return a.id == b.id; }
    friend bool operator<(const AtomicTask& a, const AtomicTask& b) { return a.id < b.id; }
};

// A set of atomic tasks overseen by one parent agent. The composite type is
// the multiset of member task types.
struct CompositeTask {
    CompositeId id = 0;
    CompositeTypeId type = 0;
    std::vector<AtomicTask> tasks;
    Tick arrival = 0;
};

// Static description of an agent: what it can execute, what it can oversee,
// and its resource constraints (neighbourhood_cap = max links, knowledge_cap
// = max remembered agents).
struct AgentSpec {
    AgentId id = 0;
    std::set<TaskTypeId> capabilities;
    std::set<CompositeTypeId> responsibilities;
    int neighbourhood_cap = 0;
    int knowledge_cap = 0;
};

// Dynamic per-agent state. Invariant at rest: neighbourhood is a subset of
// knowledge, |neighbourhood| <= neighbourhood_cap, |knowledge| <=
// knowledge_cap. One element of transient overflow is permitted inside an
// algorithm step, before the pruning passes run.
struct AgentState {
    std::set<AgentId> knowledge;
    std::set<AgentId> neighbourhood;
};

// Who created an allocation record: an external requester or a system agent.
struct TaskSource {
    bool external = false;
    AgentId id = -1;
};

// A live allocation: tasks handed to allocatee at tick t. Composite records
// come from requirement arrivals (external source); singleton records come
// from Alloc actions (agent source). t doubles as the record identifier.
struct AllocationRecord {
    std::vector<AtomicTask> tasks;
    Tick t = 0;
    TaskSource source;
    AgentId allocatee = -1;
};

struct SystemState {
    std::map<AgentId, AgentState> agents;
    std::vector<AllocationRecord> allocations;
    Tick clock = 0;
    // Tasks that have ever been the subject of an Alloc transition; used to
    // enforce single assignment.
    std::set<TaskId> allocated_tasks;
};

// Instance-level action, as consumed by the transition rules. Payload fields
// are category specific: Alloc uses task+target, Exec uses task, Info uses
// target, ProvideInfo uses target (requester) + subject, RemoveInfo/Link use
// target (a known agent), RemoveLink uses target (a neighbour).
struct Action {
    ActionCategory category = ActionCategory::Exec;
    AgentId actor = -1;
    std::optional<AtomicTask> task;
    AgentId target = -1;
    AgentId subject = -1;
};

inline const char* category_name(ActionCategory c)
{
    switch (c) {
    case ActionCategory::Alloc: return "ALLOC";
    case ActionCategory::Exec: return "EXEC";
    case ActionCategory::Info: return "INFO";
    case ActionCategory::ProvideInfo: return "PROVIDE_INFO";
    case ActionCategory::RemoveInfo: return "REMOVE_INFO";
    case ActionCategory::Link: return "LINK";
    case ActionCategory::RemoveLink: return "REMOVE_LINK";
    }
    return "?";
}

} // namespace dtas
