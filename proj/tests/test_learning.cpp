#include <doctest.h>

#include <map>
#include <random>

#include "dtas/learning.hpp"

using namespace dtas;

TEST_CASE("state keys canonicalise the pending multiset")
{
    CHECK(state_key({3, 1, 2, 1}) == StateKey{1, 1, 2, 3});
    CHECK(state_key({}) == StateKey{});
}

TEST_CASE("q update")
{
    StateKey s{0, 1};
    StateKey s2{1};
    ActionKey a = alloc_action(0, 5);

    SUBCASE("alpha of zero leaves the table unchanged")
    {
        QTable q(0.5);
        q.update(s, a, 1.0, s2, 0.0, 0.9);
        CHECK(q.value(s, a) == doctest::Approx(0.5));
    }
    SUBCASE("hand-evaluated step")
    {
        // Q = 0.5, alpha = 0.1, gamma = 0.9, r = 1.0, max future 0.5
        QTable q(0.5);
        q.update(s, a, 1.0, s2, 0.1, 0.9);
        CHECK(q.value(s, a) == doctest::Approx(0.595));
    }
    SUBCASE("fixed point stays put")
    {
        QTable q(0.5);
        q.update(s2, alloc_action(1, 6), 0.0, StateKey{}, 1.0, 0.0); // plant max future = 0
        q.update(s, a, 0.7, s2, 1.0, 0.0);                           // Q(s,a) = 0.7
        double before = q.value(s, a);
        q.update(s, a, 0.7, s2, 0.3, 0.0); // r + gamma*max = 0.7 = Q
        CHECK(q.value(s, a) == doctest::Approx(before));
    }
    SUBCASE("parameters out of range are rejected")
    {
        QTable q(0.5);
        try {
            q.update(s, a, 1.0, s2, 1.5, 0.9);
            FAIL("expected error");
        } catch (const Error& e) {
            CHECK(e.code() == Err::ParameterOutOfRange);
        }
    }
}

TEST_CASE("an update touches exactly one entry")
{
    StateKey s{0};
    QTable q(0.5);
    q.update(s, alloc_action(0, 1), 0.9, StateKey{}, 0.5, 0.0);
    q.update(s, alloc_action(0, 2), 0.1, StateKey{}, 0.5, 0.0);
    double other = q.value(s, alloc_action(0, 2));
    q.update(s, alloc_action(0, 1), 0.9, StateKey{}, 0.5, 0.0);
    CHECK(q.value(s, alloc_action(0, 2)) == other);
    CHECK(q.entry_count() == 2);
}

TEST_CASE("repeated updates with a stationary reward converge")
{
    QTable q(0.5);
    StateKey s{0};
    ActionKey a = alloc_action(0, 1);
    for (int i = 0; i < 10000; ++i)
        q.update(s, a, 0.8, s, 0.1, 0.0);
    CHECK(std::abs(q.value(s, a) - 0.8) < 1e-2);
}

TEST_CASE("entries returns stored values only")
{
    QTable q(0.5);
    StateKey s{0};
    CHECK(q.entries(s).empty());
    q.update(s, info_action(3), -0.05, s, 0.5, 0.0);
    auto entries = q.entries(s);
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].first == info_action(3));
}

TEST_CASE("availability partitions targeted entries by reach")
{
    QTable q(0.5);
    AgentState st;
    st.knowledge = {1, 2, 3};
    st.neighbourhood = {1, 2};
    StateKey s{0};

    SUBCASE("neighbourhood equals knowledge leaves nothing unavailable")
    {
        AgentState full;
        full.knowledge = {1, 2};
        full.neighbourhood = {1, 2};
        q.update(s, alloc_action(0, 1), 0.9, s, 0.5, 0.0);
        CHECK(unavailable_actions(q, s, full).empty());
    }
    SUBCASE("a learned alloc toward a known non-neighbour is unavailable")
    {
        q.update(s, alloc_action(0, 3), 0.9, s, 0.5, 0.0);
        auto una = unavailable_actions(q, s, st);
        REQUIRE(una.size() == 1);
        CHECK(una[0].first == alloc_action(0, 3));
    }
    SUBCASE("generation covers allocs and infos per neighbour plus links")
    {
        auto avail = available_actions(q, s, st);
        // 2 allocs (type 0 x neighbours) + 2 infos + 1 link toward agent 3
        CHECK(avail.size() == 5);
        for (const auto& [action, value] : avail)
            CHECK(value == doctest::Approx(0.5));
    }
    SUBCASE("stored targeted entries land on exactly one side")
    {
        q.update(s, alloc_action(0, 1), 0.9, s, 0.5, 0.0);
        q.update(s, alloc_action(0, 3), 0.2, s, 0.5, 0.0);
        q.update(s, link_action(3), 0.1, s, 0.5, 0.0);
        auto avail = available_actions(q, s, st);
        auto una = unavailable_actions(q, s, st);
        for (const auto& [action, value] : q.entries(s)) {
            if (action.target < 0)
                continue;
            bool in_avail = false;
            for (const auto& [a2, v2] : avail)
                in_avail |= a2 == action;
            bool in_una = false;
            for (const auto& [a2, v2] : una)
                in_una |= a2 == action;
            CHECK(in_avail != in_una);
        }
    }
}

TEST_CASE("removing actions clears them across states")
{
    QTable q(0.5);
    q.update(StateKey{0}, alloc_action(0, 3), 0.9, StateKey{}, 0.5, 0.0);
    q.update(StateKey{0, 1}, alloc_action(0, 3), 0.9, StateKey{}, 0.5, 0.0);
    q.update(StateKey{0, 1}, info_action(2), -0.05, StateKey{}, 0.5, 0.0);
    q.remove_actions({alloc_action(0, 3)});
    CHECK(q.entry_count() == 1);
    CHECK_FALSE(q.has(StateKey{0}, alloc_action(0, 3)));
    CHECK(q.has(StateKey{0, 1}, info_action(2)));
}

TEST_CASE("q values move halfway toward their state mean on reset")
{
    QTable q(0.5);
    StateKey s{0};
    q.update(s, alloc_action(0, 1), 0.2, s, 1.0, 0.0);
    q.update(s, alloc_action(0, 2), 0.6, s, 1.0, 0.0);
    q.decay_toward_state_mean();
    CHECK(q.value(s, alloc_action(0, 1)) == doctest::Approx(0.3));
    CHECK(q.value(s, alloc_action(0, 2)) == doctest::Approx(0.5));

    // all-equal entries are a fixed point
    q.decay_toward_state_mean();
    q.decay_toward_state_mean();
    double v1 = q.value(s, alloc_action(0, 1));
    QTable flat(0.5);
    flat.update(s, alloc_action(0, 1), v1, s, 1.0, 0.0);
    flat.update(s, alloc_action(0, 2), v1, s, 1.0, 0.0);
    flat.decay_toward_state_mean();
    CHECK(flat.value(s, alloc_action(0, 1)) == doctest::Approx(v1));
}

TEST_CASE("action information value")
{
    ActionSampleStore store;
    ActionKey a = alloc_action(0, 1);
    CHECK(action_information_value(store, a, 5) == 0.0);

    store.append(a, 1, 0.5);
    store.append(a, 2, 0.5);
    store.append(a, 3, 0.5);
    CHECK(action_information_value(store, a, 5) == doctest::Approx(1.5));

    // sampled this tick: retained unconditionally
    CHECK(action_information_value(store, a, 3) ==
          std::numeric_limits<double>::infinity());

    // fixed count, growing now: strictly decreasing
    double prev = action_information_value(store, a, 4);
    for (Tick now = 5; now < 10; ++now) {
        double mv = action_information_value(store, a, now);
        CHECK(mv < prev);
        prev = mv;
    }

    // more samples at fixed staleness: non-decreasing
    ActionSampleStore denser = store;
    denser.append(a, 3, 0.5);
    CHECK(action_information_value(denser, a, 5) >=
          action_information_value(store, a, 5));
}

TEST_CASE("neighbour value and the minimum value neighbour")
{
    ActionSampleStore store;
    CHECK(neighbour_value(store, {1, 2}) == 0.0);

    store.append(alloc_action(0, 1), 1, 0.7);
    store.append(alloc_action(1, 1), 2, 0.5);
    store.append(alloc_action(0, 2), 3, 0.4);
    store.append(info_action(3), 4, 0.0);

    CHECK(neighbour_value(store, {1}) == doctest::Approx(1.2));
    CHECK(neighbour_value(store, {2}) == doctest::Approx(0.4));
    CHECK(neighbour_value(store, {9}) == 0.0);

    CHECK(lowest_value_neighbour(store, {1, 2}) == 2);

    SUBCASE("single neighbour is returned regardless of samples")
    {
        CHECK(lowest_value_neighbour(store, {1}) == 1);
        CHECK(lowest_value_neighbour(ActionSampleStore{}, {4}) == 4);
    }
    SUBCASE("unsampled members are not candidates")
    {
        CHECK(lowest_value_neighbour(store, {2, 9}) == 2);
    }
    SUBCASE("ties break to the lowest id")
    {
        ActionSampleStore tied;
        tied.append(alloc_action(0, 5), 1, 0.3);
        tied.append(alloc_action(0, 4), 2, 0.3);
        CHECK(lowest_value_neighbour(tied, {4, 5}) == 4);
    }
}

TEST_CASE("store keeps history in order and deletes by action")
{
    ActionSampleStore store;
    store.append(alloc_action(0, 1), 1, 0.5);
    store.append(info_action(2), 2, 0.0);
    store.append(alloc_action(0, 1), 3, 0.6);
    auto picked = store.select({alloc_action(0, 1)});
    REQUIRE(picked.size() == 2);
    CHECK(picked[0].time == 1);
    CHECK(picked[1].time == 3);

    store.remove_action(alloc_action(0, 1));
    CHECK(store.samples().size() == 1);
    CHECK(store.samples()[0].action == info_action(2));
}

TEST_CASE("sum normalisation")
{
    std::vector<ActionValue> values{{alloc_action(0, 1), 2.0}, {alloc_action(0, 2), 3.0}};
    auto out = sum_normalise(values);
    CHECK(out[0].second == doctest::Approx(0.4));
    CHECK(out[1].second == doctest::Approx(0.6));

    try {
        (void)sum_normalise({{alloc_action(0, 1), 0.0}});
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == Err::ZeroSum);
    }
}

TEST_CASE("sum normalisation sums to one and preserves order")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> value(0.01, 5.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<ActionValue> values;
        for (int i = 0; i < 8; ++i)
            values.emplace_back(alloc_action(0, i), value(rng));
        auto out = sum_normalise(values);
        double sum = 0.0;
        for (const auto& [a, v] : out)
            sum += v;
        CHECK(std::abs(sum - 1.0) <= 1e-9);
        for (std::size_t i = 0; i + 1 < values.size(); ++i)
            for (std::size_t j = i + 1; j < values.size(); ++j)
                CHECK((values[i].second < values[j].second) ==
                      (out[i].second < out[j].second));
    }
}

TEST_CASE("softmax preserves the argmax element")
{
    std::vector<ActionValue> values{{alloc_action(0, 1), 0.3},
                                    {alloc_action(0, 2), 1.7},
                                    {alloc_action(0, 3), -0.4}};
    auto out = softmax_normalise(values);
    std::size_t best_in = 1, best_out = 0;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (out[i].second > out[best_out].second)
            best_out = i;
    CHECK(best_in == best_out);
    double sum = 0.0;
    for (const auto& [a, v] : out)
        sum += v;
    CHECK(sum == doctest::Approx(1.0));
}

TEST_CASE("selection helpers")
{
    std::mt19937_64 rng(17);
    std::vector<ActionValue> values{{alloc_action(0, 1), 0.2},
                                    {alloc_action(0, 2), 0.9},
                                    {alloc_action(0, 3), 0.2}};

    SUBCASE("max returns the argmax")
    {
        for (int i = 0; i < 20; ++i)
            CHECK(pick_max(values, rng) == alloc_action(0, 2));
    }
    SUBCASE("degenerate maxima break uniformly")
    {
        std::vector<ActionValue> tied{{alloc_action(0, 1), 0.5}, {alloc_action(0, 2), 0.5}};
        int first = 0;
        for (int i = 0; i < 4000; ++i)
            if (pick_max(tied, rng) == alloc_action(0, 1))
                first += 1;
        CHECK(first > 1700);
        CHECK(first < 2300);
    }
    SUBCASE("boltzmann over equal values is empirically uniform")
    {
        std::vector<ActionValue> equal{{alloc_action(0, 1), 0.4},
                                       {alloc_action(0, 2), 0.4},
                                       {alloc_action(0, 3), 0.4}};
        std::map<AgentId, int> counts;
        const int draws = 10000;
        for (int i = 0; i < draws; ++i)
            counts[pick_boltzmann(equal, 1.0, rng).target] += 1;
        for (const auto& [target, count] : counts) {
            double share = static_cast<double>(count) / draws;
            CHECK(share > 1.0 / 3 - 0.02);
            CHECK(share < 1.0 / 3 + 0.02);
        }
    }
    SUBCASE("temperature must be positive")
    {
        try {
            (void)pick_boltzmann(values, 0.0, rng);
            FAIL("expected error");
        } catch (const Error& e) {
            CHECK(e.code() == Err::NonPositiveTemperature);
        }
    }
    SUBCASE("selection from nothing fails")
    {
        try {
            (void)pick_uniform({}, rng);
            FAIL("expected error");
        } catch (const Error& e) {
            CHECK(e.code() == Err::NoAvailableAction);
        }
    }
}
