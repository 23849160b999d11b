#include <doctest.h>

#include <random>

#include "dtas/core.hpp"

using namespace dtas;

namespace {

AtomicTask task(TaskId id, TaskTypeId type)
{
    return AtomicTask{id, type, 0, 0};
}

// A small universe: parent 0 oversees composite type 0, children 1..3 execute.
struct Fixture {
    std::map<AgentId, AgentSpec> specs;
    QualityModel model;
    SystemState state;

    Fixture()
    {
        AgentSpec parent{0, {}, {0}, 2, 4};
        specs[0] = parent;
        for (AgentId c : {1, 2, 3}) {
            AgentSpec child{c, {0, 1}, {}, 2, 4};
            specs[c] = child;
            model.base_quality[{c, 0}] = 0.5 + 0.1 * c;
            model.base_quality[{c, 1}] = 0.4;
        }
        state.agents[0] = AgentState{{1, 2, 3}, {1, 2}};
        for (AgentId c : {1, 2, 3})
            state.agents[c] = AgentState{{}, {}};
        state.clock = 10;
    }

    CompositeTask composite(std::vector<AtomicTask> tasks) const
    {
        return CompositeTask{1, 0, std::move(tasks), 0};
    }
};

} // namespace

TEST_CASE("requirement lands on the only responsible agent")
{
    Fixture f;
    std::mt19937_64 rng(1);
    auto ct = f.composite({task(1, 0), task(2, 1)});
    auto next = apply_requirement(f.state, f.specs, ct, -1, rng);
    REQUIRE(next.allocations.size() == 1);
    CHECK(next.allocations[0].allocatee == 0);
    CHECK(next.allocations[0].source.external);
    CHECK(next.allocations[0].t == 10);
    CHECK(next.clock == 11);
    CHECK(f.state.allocations.empty()); // input untouched
}

TEST_CASE("requirement chooses uniformly between responsible agents")
{
    Fixture f;
    f.specs[4] = AgentSpec{4, {}, {0}, 2, 4};
    f.state.agents[4] = AgentState{{}, {}};

    int first = 0;
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
        std::mt19937_64 rng(1000 + i);
        auto ct = f.composite({task(1, 0)});
        auto next = apply_requirement(f.state, f.specs, ct, -1, rng);
        if (next.allocations[0].allocatee == 0)
            first += 1;
    }
    double share = static_cast<double>(first) / trials;
    CHECK(share > 0.48);
    CHECK(share < 0.52);
}

TEST_CASE("requirement with no responsible agent fails")
{
    Fixture f;
    CompositeTask ct{1, 9, {task(1, 0)}, 0};
    std::mt19937_64 rng(1);
    try {
        (void)apply_requirement(f.state, f.specs, ct, -1, rng);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == Err::NoResponsibleAgent);
    }
}

TEST_CASE("alloc appends a singleton record for a held task")
{
    Fixture f;
    std::mt19937_64 rng(1);
    auto at = task(1, 0);
    auto sys = apply_requirement(f.state, f.specs, f.composite({at}), -1, rng);
    auto next = apply_alloc(sys, 0, at, 1);
    REQUIRE(next.allocations.size() == 2);
    CHECK(next.allocations[1].tasks.size() == 1);
    CHECK(next.allocations[1].allocatee == 1);
    CHECK_FALSE(next.allocations[1].source.external);
    CHECK(next.allocations[1].source.id == 0);
    // original record untouched
    CHECK(next.allocations[0].tasks.size() == 1);
}

TEST_CASE("alloc preconditions")
{
    Fixture f;
    std::mt19937_64 rng(1);
    auto at = task(1, 0);
    auto sys = apply_requirement(f.state, f.specs, f.composite({at}), -1, rng);

    SUBCASE("target must be a neighbour")
    {
        try {
            (void)apply_alloc(sys, 0, at, 3); // known but not linked
            FAIL("expected error");
        } catch (const Error& e) {
            CHECK(e.code() == Err::NotInNeighbourhood);
        }
    }
    SUBCASE("task must be held")
    {
        try {
            (void)apply_alloc(sys, 0, task(99, 0), 1);
            FAIL("expected error");
        } catch (const Error& e) {
            CHECK(e.code() == Err::TaskNotHeld);
        }
    }
    SUBCASE("replaying an alloc is rejected")
    {
        auto once = apply_alloc(sys, 0, at, 1);
        try {
            (void)apply_alloc(once, 0, at, 2);
            FAIL("expected error");
        } catch (const Error& e) {
            CHECK(e.code() == Err::AlreadyAllocated);
        }
    }
}

TEST_CASE("exec removes the task and returns the base quality when alone")
{
    Fixture f;
    std::mt19937_64 rng(1);
    auto at = task(1, 0);
    auto sys = apply_requirement(f.state, f.specs, f.composite({at}), -1, rng);
    sys = apply_alloc(sys, 0, at, 1);

    auto [next, quality] = apply_exec(sys, f.specs, f.model, 1, at);
    CHECK(quality == doctest::Approx(0.6)); // child 1 base for type 0, k = 1
    // the singleton record disappears; the parent's record keeps the task
    // (its time identifier differs)
    REQUIRE(next.allocations.size() == 1);
    CHECK(next.allocations[0].allocatee == 0);
}

TEST_CASE("exec requires capability and a held task")
{
    Fixture f;
    std::mt19937_64 rng(1);
    auto at = task(1, 0);
    auto sys = apply_requirement(f.state, f.specs, f.composite({at}), -1, rng);
    try {
        (void)apply_exec(sys, f.specs, f.model, 0, at); // parent cannot execute
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == Err::NotCapable);
    }
    try {
        (void)apply_exec(sys, f.specs, f.model, 1, at); // child does not hold it
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == Err::TaskNotHeld);
    }
}

TEST_CASE("exec trims every record sharing the time identifier")
{
    // Hand-built state with two records sharing t = 5.
    Fixture f;
    auto at = task(1, 0);
    SystemState sys = f.state;
    sys.allocations.push_back(AllocationRecord{{at}, 5, TaskSource{false, 0}, 1});
    sys.allocations.push_back(AllocationRecord{{at, task(2, 1)}, 5, TaskSource{true, -1}, 2});

    auto [next, quality] = apply_exec(sys, f.specs, f.model, 1, at);
    (void)quality;
    REQUIRE(next.allocations.size() == 1);
    CHECK(next.allocations[0].allocatee == 2);
    REQUIRE(next.allocations[0].tasks.size() == 1);
    CHECK(next.allocations[0].tasks[0].id == 2);
}

TEST_CASE("exec quality degrades with the actor's concurrent load")
{
    Fixture f;
    auto t1 = task(1, 0);
    auto t2 = task(2, 1);
    SystemState sys = f.state;
    sys.allocations.push_back(AllocationRecord{{t1}, 5, TaskSource{false, 0}, 1});
    sys.allocations.push_back(AllocationRecord{{t2}, 6, TaskSource{false, 0}, 1});

    auto [next, quality] = apply_exec(sys, f.specs, f.model, 1, t1);
    (void)next;
    CHECK(quality == doctest::Approx(0.3)); // base 0.6 split over k = 2
}

TEST_CASE("info exchange grows the requester's knowledge")
{
    Fixture f;
    f.state.agents[1].knowledge = {2, 3};
    std::mt19937_64 rng(7);

    auto [next, subject] = apply_info(f.state, 0, 1, rng);
    CHECK((subject == 2 || subject == 3));
    CHECK(next.agents.at(0).knowledge.count(subject));

    SUBCASE("idempotent when the subject is already known")
    {
        auto before = next.agents.at(0).knowledge;
        auto [again, subject2] = apply_info(next, 0, 1, rng);
        (void)subject2;
        CHECK(again.agents.at(0).knowledge == before);
    }
}

TEST_CASE("info requires a linked provider with knowledge")
{
    Fixture f;
    std::mt19937_64 rng(7);
    try {
        (void)apply_info(f.state, 0, 3, rng); // not a neighbour
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == Err::NotInNeighbourhood);
    }
    try {
        (void)apply_info(f.state, 0, 1, rng); // child 1 knows no one
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == Err::EmptyKnowledge);
    }
}

TEST_CASE("provider whose whole knowledge is the requester yields no growth")
{
    Fixture f;
    f.state.agents[1].knowledge = {0};
    std::mt19937_64 rng(7);
    auto [next, subject] = apply_info(f.state, 0, 1, rng);
    CHECK(subject == 0);
    CHECK(next.agents.at(0).knowledge == f.state.agents.at(0).knowledge);
}

TEST_CASE("provide info as a standalone transition")
{
    Fixture f;
    f.state.agents[1].knowledge = {3};
    // pending info record: requester 0 asked provider 1
    f.state.allocations.push_back(AllocationRecord{{}, 9, TaskSource{false, 0}, 1});
    auto next = apply_provide_info(f.state, 1, 0, 3);
    CHECK(next.agents.at(0).knowledge.count(3));
    CHECK(next.allocations.empty()); // pseudo-task consumed
}

TEST_CASE("remove info")
{
    Fixture f;
    auto next = apply_remove_info(f.state, 0, 3);
    CHECK(next.agents.at(0).knowledge.size() == 2);
    CHECK_FALSE(next.agents.at(0).knowledge.count(3));

    try {
        (void)apply_remove_info(f.state, 0, 1); // a neighbour
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == Err::InNeighbourhood);
    }
    try {
        (void)apply_remove_info(f.state, 0, 9);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == Err::NotKnown);
    }
}

TEST_CASE("link and remove link invert each other")
{
    Fixture f;
    auto linked = apply_link(f.state, f.specs, 0, 3);
    CHECK(linked.agents.at(0).neighbourhood.count(3));
    CHECK(linked.agents.at(0).knowledge == f.state.agents.at(0).knowledge);
    auto restored = apply_remove_link(linked, 0, 3);
    CHECK(restored.agents.at(0).neighbourhood == f.state.agents.at(0).neighbourhood);
}

TEST_CASE("link is idempotent for an existing neighbour")
{
    Fixture f;
    auto next = apply_link(f.state, f.specs, 0, 1);
    CHECK(next.agents.at(0).neighbourhood == f.state.agents.at(0).neighbourhood);
}

TEST_CASE("link permits one element of transient overflow, no more")
{
    Fixture f; // neighbourhood_cap = 2, |N| = 2
    auto once = apply_link(f.state, f.specs, 0, 3);
    CHECK(once.agents.at(0).neighbourhood.size() == 3);

    once.agents[0].knowledge.insert(4);
    f.specs[4] = AgentSpec{4, {}, {}, 2, 4};
    once.agents[4] = AgentState{};
    try {
        (void)apply_link(once, f.specs, 0, 4);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == Err::NeighbourhoodFull);
    }
}

TEST_CASE("link and remove link preconditions")
{
    Fixture f;
    try {
        (void)apply_link(f.state, f.specs, 0, 9);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == Err::NotKnown);
    }
    try {
        (void)apply_remove_link(f.state, 0, 3);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == Err::NotNeighbour);
    }
}

TEST_CASE("target actions filter by payload membership")
{
    std::vector<Action> actions;
    actions.push_back(Action{ActionCategory::Alloc, 0, task(1, 0), 1, -1});
    actions.push_back(Action{ActionCategory::Info, 0, std::nullopt, 2, -1});
    actions.push_back(Action{ActionCategory::Exec, 0, task(2, 0), -1, -1});
    actions.push_back(Action{ActionCategory::Link, 0, std::nullopt, 3, -1});
    actions.push_back(Action{ActionCategory::RemoveLink, 0, std::nullopt, 1, -1});

    CHECK(target_actions(actions, 0, {}).empty());
    CHECK(target_actions(actions, 0, {1, 2, 3}).size() == 4); // all but the exec
    auto two = target_actions(actions, 0, {1});
    REQUIRE(two.size() == 2);
    CHECK(two[0].category == ActionCategory::Alloc);
    CHECK(two[1].category == ActionCategory::RemoveLink);
}

TEST_CASE("transitions are pure and replay deterministically")
{
    Fixture f;
    auto ct = f.composite({task(1, 0), task(2, 1)});
    std::mt19937_64 rng_a(555);
    std::mt19937_64 rng_b(555);
    auto a = apply_requirement(f.state, f.specs, ct, -1, rng_a);
    auto b = apply_requirement(f.state, f.specs, ct, -1, rng_b);
    CHECK(a.allocations[0].allocatee == b.allocations[0].allocatee);
    CHECK(a.clock == b.clock);
}

TEST_CASE("live allocation records always reference existing agents")
{
    Fixture f;
    std::mt19937_64 rng(3);
    auto sys = apply_requirement(f.state, f.specs, f.composite({task(1, 0)}), -1, rng);
    sys = apply_alloc(sys, 0, task(1, 0), 2);
    for (const auto& record : sys.allocations)
        CHECK(sys.agents.count(record.allocatee));
}
