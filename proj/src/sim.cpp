#include "dtas/sim.hpp"

#include <algorithm>
#include <cmath>

namespace dtas {

Scenario scenario_from_name(const std::string& name)
{
    if (name == "stable")
        return Scenario::Stable;
    if (name == "exploration")
        return Scenario::Exploration;
    if (name == "volatile")
        return Scenario::Volatile;
    if (name == "large")
        return Scenario::Large;
    fail(Err::InfeasibleConfig, "unknown scenario '" + name + "'");
}

std::string scenario_name(Scenario s)
{
    switch (s) {
    case Scenario::Stable: return "stable";
    case Scenario::Exploration: return "exploration";
    case Scenario::Volatile: return "volatile";
    case Scenario::Large: return "large";
    }
    return "?";
}

void ScenarioConfig::validate() const
{
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob(p_unavailable) || !prob(p_leave))
        fail(Err::InfeasibleConfig, "probabilities must lie in [0,1]");
    if (n_parents < 1 || n_children < 1)
        fail(Err::InfeasibleConfig, "need at least one parent and one child");
    if (n_task_types < 1 || n_composite_types < 1 || tasks_per_composite < 1)
        fail(Err::InfeasibleConfig, "task structure must be positive");
    if (knowledge_cap < 1 || neighbourhood_cap < 1 || neighbourhood_cap > knowledge_cap)
        fail(Err::InfeasibleConfig, "caps must be positive with neighbourhood <= knowledge");
    if (episodes < 1 || runs < 1 || step_budget < 1)
        fail(Err::InfeasibleConfig, "episodes, runs and budget must be positive");
    if (tsqm_rows < 1 || tsqm_cols < 1)
        fail(Err::InfeasibleConfig, "trend matrix shape must be positive");
    if (quality_stddev <= 0.0 || quality_mean <= 0.0)
        fail(Err::InfeasibleConfig, "quality distribution must be positive");
    auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!unit(alpha) || !unit(gamma) || !unit(eps_base) || !unit(trend_decay))
        fail(Err::InfeasibleConfig, "alpha, gamma, eps_base, trend_decay must lie in [0,1]");
    if (tau <= 0.0)
        fail(Err::InfeasibleConfig, "tau must be positive");
    if (child_capability_count < 1)
        fail(Err::InfeasibleConfig, "children need at least one capability");
    if (concurrency_exponent < 0.0)
        fail(Err::InfeasibleConfig, "concurrency exponent must be >= 0");
}

ScenarioConfig scenario_defaults(Scenario s)
{
    ScenarioConfig cfg;
    cfg.scenario = s;
    switch (s) {
    case Scenario::Stable:
    case Scenario::Volatile:
        break;
    case Scenario::Exploration:
        cfg.episodes = 500;
        break;
    case Scenario::Large:
        cfg.n_parents = 10;
        cfg.n_children = 100;
        break;
    }
    return cfg;
}

namespace {

// Action-impact weights per child count, following the documented values for
// the sizes that have them and the size estimate otherwise.
std::pair<double, double> weights_for_children(int children)
{
    switch (children) {
    case 10: return {0.10, 0.20};
    case 50: return {0.10, 0.55};
    case 100: return {0.10, 0.60};
    default: {
        auto w = estimate_impact_weights(children, 5, 7).to_weights();
        return {w.link, w.info};
    }
    }
}

} // namespace

std::vector<Variant> scenario_variants(const ScenarioConfig& cfg)
{
    std::vector<Variant> all;
    switch (cfg.scenario) {
    case Scenario::Stable: {
        Variant opt{.label = "OPT", .init = Variant::Init::OptimalHoods, .greedy_oracle = true};
        Variant ql{.label = "QL",
                   .policy = {SelectPolicy::BoltzmannTau, false, 1.0},
                   .episode_temperature = true};
        Variant ql_reset{.label = "QL-RESET",
                         .policy = {SelectPolicy::BoltzmannTau, false, 1.0},
                         .ql_reset = true,
                         .episode_temperature = true};
        Variant ataria{.label = "ATARIA"};
        all = {opt, ql, ql_reset, ataria};
        break;
    }
    case Scenario::Exploration: {
        Variant zero{.label = "ATARIA0", .policy = {SelectPolicy::ConstantEpsilon, true, 1.0}};
        Variant plus{.label = "ATARIA+", .init = Variant::Init::Seeded75Best};
        Variant minus{.label = "ATARIA-", .init = Variant::Init::Seeded75Worst};
        all = {zero, plus, minus};
        break;
    }
    case Scenario::Volatile: {
        Variant nodrop{.label = "ATARIA-NODROP"};
        Variant drop{.label = "ATARIA-DROP", .disruption = true};
        Variant nosaskr{.label = "ATARIA-NOSASKR",
                        .policy = {SelectPolicy::ConstantEpsilon, false, 1.0},
                        .disruption = true};
        all = {nodrop, drop, nosaskr};
        break;
    }
    case Scenario::Large: {
        for (auto [label, children, init] :
             {std::tuple{"ATARIA-OPT", 10, Variant::Init::OptimalHoods},
              std::tuple{"ATARIA-25", 25, Variant::Init::Random},
              std::tuple{"ATARIA-50", 50, Variant::Init::Random},
              std::tuple{"ATARIA-100", 100, Variant::Init::Random}}) {
            Variant v{.label = label, .init = init, .children_override = children};
            auto [wl, wi] = weights_for_children(children);
            v.w_link = wl;
            v.w_info = wi;
            all.push_back(v);
        }
        break;
    }
    }
    if (cfg.labels.empty())
        return all;
    std::vector<Variant> filtered;
    for (const auto& v : all)
        if (std::find(cfg.labels.begin(), cfg.labels.end(), v.label) != cfg.labels.end())
            filtered.push_back(v);
    if (filtered.empty())
        fail(Err::InfeasibleConfig, "label filter matches no variant");
    return filtered;
}

namespace {

double draw_quality(const ScenarioConfig& cfg, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal(cfg.quality_mean, cfg.quality_stddev);
    for (;;) {
        double q = normal(rng);
        if (q > 0.0 && q <= 1.0)
            return q;
    }
}

std::vector<AgentId> sample_subset(const std::vector<AgentId>& pool, std::size_t size,
                                   std::mt19937_64& rng)
{
    std::vector<AgentId> shuffled = pool;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    shuffled.resize(std::min(size, shuffled.size()));
    std::sort(shuffled.begin(), shuffled.end());
    return shuffled;
}

// Rank a parent's candidate neighbourhoods for seeding. Feasible composite
// type coverage dominates; summed locally-optimal quality breaks ties.
struct HoodScore {
    int feasible = 0;
    double quality = 0.0;

    friend bool operator<(const HoodScore& a, const HoodScore& b)
    {
        if (a.feasible != b.feasible)
            return a.feasible < b.feasible;
        return a.quality < b.quality;
    }
};

HoodScore score_hood(const World& world, const AgentSpec& parent,
                     const std::vector<AgentId>& hood)
{
    HoodScore score;
    TaskId fake_id = 1;
    for (CompositeTypeId ct : parent.responsibilities) {
        std::vector<AtomicTask> tasks;
        for (TaskTypeId type : world.composite_types[ct])
            tasks.push_back(AtomicTask{fake_id++, type, 0, 0});
        try {
            score.quality += local_optimal_quality(world.model, tasks, hood, AllocationMap{});
            score.feasible += 1;
        } catch (const Error& e) {
            if (e.code() != Err::NonAllocable)
                throw;
        }
    }
    return score;
}

// Oracle neighbourhood search for a parent: best (or worst) candidate over
// every neighbourhood it could form from the child pool.
std::vector<AgentId> oracle_hood(const World& world, const AgentSpec& parent, bool best)
{
    auto hoods = enumerate_neighbourhoods(world.child_ids, parent.neighbourhood_cap);
    bool have = false;
    HoodScore chosen_score;
    std::vector<AgentId> chosen;
    for (const auto& hood : hoods) {
        if (hood.empty())
            continue;
        HoodScore s = score_hood(world, parent, hood);
        bool better = !have || (best ? chosen_score < s : s < chosen_score);
        if (better) {
            chosen = hood;
            chosen_score = s;
            have = true;
        }
    }
    return chosen;
}

// Best remaining children by their top base quality over the types the
// parent may need, used to fill a seeded neighbourhood up to capacity.
std::vector<AgentId> rank_children_for_parent(const World& world, const AgentSpec& parent)
{
    std::set<TaskTypeId> needed;
    for (CompositeTypeId ct : parent.responsibilities)
        for (TaskTypeId type : world.composite_types[ct])
            needed.insert(type);
    std::vector<std::pair<double, AgentId>> ranked;
    for (AgentId child : world.child_ids) {
        double best = 0.0;
        for (TaskTypeId type : needed)
            if (world.model.capable(child, type))
                best = std::max(best, world.model.base(child, type));
        ranked.emplace_back(best, child);
    }
    std::sort(ranked.begin(), ranked.end(),
              [](const auto& a, const auto& b) {
                  if (a.first != b.first)
                      return a.first > b.first;
                  return a.second < b.second;
              });
    std::vector<AgentId> out;
    for (const auto& [score, child] : ranked)
        out.push_back(child);
    return out;
}

void seed_neighbourhood(World& world, AgentRuntime& rt, const Variant& variant,
                        std::mt19937_64& rng)
{
    const ScenarioConfig& cfg = world.cfg;
    const std::size_t hood_size =
        std::min<std::size_t>(cfg.neighbourhood_cap, world.child_ids.size());

    std::set<AgentId> hood;
    switch (variant.init) {
    case Variant::Init::Random:
        for (AgentId id : sample_subset(world.child_ids, hood_size, rng))
            hood.insert(id);
        break;
    case Variant::Init::OptimalHoods: {
        auto oracle = oracle_hood(world, rt.spec, true);
        hood.insert(oracle.begin(), oracle.end());
        for (AgentId child : rank_children_for_parent(world, rt.spec)) {
            if (hood.size() >= hood_size)
                break;
            hood.insert(child);
        }
        break;
    }
    case Variant::Init::Seeded75Best:
    case Variant::Init::Seeded75Worst: {
        bool best = variant.init == Variant::Init::Seeded75Best;
        auto oracle = oracle_hood(world, rt.spec, best);
        const std::size_t seeded = std::min<std::size_t>(
            static_cast<std::size_t>(std::ceil(0.75 * cfg.neighbourhood_cap)), oracle.size());
        for (std::size_t i = 0; i < seeded; ++i)
            hood.insert(oracle[i]);
        std::vector<AgentId> rest;
        for (AgentId child : world.child_ids)
            if (!hood.count(child))
                rest.push_back(child);
        for (AgentId id : sample_subset(rest, hood_size - std::min(hood_size, hood.size()), rng))
            hood.insert(id);
        break;
    }
    }

    std::set<AgentId> knowledge = hood;
    std::vector<AgentId> rest;
    for (AgentId child : world.child_ids)
        if (!knowledge.count(child))
            rest.push_back(child);
    const std::size_t k_size = std::min<std::size_t>(cfg.knowledge_cap, world.child_ids.size());
    for (AgentId id : sample_subset(rest, k_size - std::min(k_size, knowledge.size()), rng))
        knowledge.insert(id);

    rt.state.knowledge = std::move(knowledge);
    rt.state.neighbourhood = std::move(hood);
}

} // namespace

World build_system(const ScenarioConfig& base_cfg, const Variant& variant, std::mt19937_64& rng)
{
    ScenarioConfig cfg = base_cfg;
    if (variant.children_override > 0)
        cfg.n_children = variant.children_override;
    if (variant.w_link >= 0.0)
        cfg.w_link = variant.w_link;
    if (variant.w_info >= 0.0)
        cfg.w_info = variant.w_info;
    cfg.validate();

    World world;
    world.cfg = cfg;
    world.model.concurrency_exponent = cfg.concurrency_exponent;

    for (AgentId id = 0; id < cfg.n_parents; ++id)
        world.parent_ids.push_back(id);
    for (AgentId id = cfg.n_parents; id < cfg.n_parents + cfg.n_children; ++id)
        world.child_ids.push_back(id);

    // Child capabilities and qualities.
    std::vector<TaskTypeId> all_types;
    for (TaskTypeId t = 0; t < cfg.n_task_types; ++t)
        all_types.push_back(t);
    for (AgentId child : world.child_ids) {
        AgentSpec spec;
        spec.id = child;
        spec.neighbourhood_cap = cfg.neighbourhood_cap;
        spec.knowledge_cap = cfg.knowledge_cap;
        std::vector<TaskTypeId> shuffled = all_types;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        int count = std::min(cfg.child_capability_count, cfg.n_task_types);
        for (int i = 0; i < count; ++i)
            spec.capabilities.insert(shuffled[i]);
        world.specs.emplace(child, std::move(spec));
    }
    // Every task type must be executable somewhere.
    for (TaskTypeId type : all_types) {
        bool covered = false;
        for (AgentId child : world.child_ids)
            if (world.specs[child].capabilities.count(type)) {
                covered = true;
                break;
            }
        if (!covered) {
            std::uniform_int_distribution<std::size_t> pick(0, world.child_ids.size() - 1);
            world.specs[world.child_ids[pick(rng)]].capabilities.insert(type);
        }
    }
    for (AgentId child : world.child_ids)
        for (TaskTypeId type : world.specs[child].capabilities)
            world.model.base_quality[{child, type}] = draw_quality(cfg, rng);

    // Composite types are distinct-type sets; responsibilities are
    // partitioned so each arrival has exactly one responsible agent.
    for (int ct = 0; ct < cfg.n_composite_types; ++ct) {
        std::vector<TaskTypeId> shuffled = all_types;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        std::vector<TaskTypeId> members(
            shuffled.begin(), shuffled.begin() + std::min(cfg.tasks_per_composite,
                                                          cfg.n_task_types));
        std::sort(members.begin(), members.end());
        world.composite_types.push_back(std::move(members));
    }
    for (AgentId parent : world.parent_ids) {
        AgentSpec spec;
        spec.id = parent;
        spec.neighbourhood_cap = cfg.neighbourhood_cap;
        spec.knowledge_cap = cfg.knowledge_cap;
        for (int ct = 0; ct < cfg.n_composite_types; ++ct)
            if (ct % cfg.n_parents == parent)
                spec.responsibilities.insert(ct);
        world.specs.emplace(parent, std::move(spec));
    }

    for (const auto& [key, base] : world.model.base_quality) {
        auto it = world.best_base.find(key.second);
        if (it == world.best_base.end() || base > it->second)
            world.best_base[key.second] = base;
    }

    // Child knowledge and neighbourhoods (providers for Info requests).
    for (AgentId child : world.child_ids) {
        AgentState st;
        std::vector<AgentId> others;
        for (AgentId other : world.child_ids)
            if (other != child)
                others.push_back(other);
        auto known = sample_subset(others, static_cast<std::size_t>(cfg.knowledge_cap), rng);
        st.knowledge.insert(known.begin(), known.end());
        auto hood = sample_subset(known, static_cast<std::size_t>(cfg.neighbourhood_cap), rng);
        st.neighbourhood.insert(hood.begin(), hood.end());
        world.system.agents[child] = std::move(st);
    }

    // Parent runtimes.
    for (AgentId parent : world.parent_ids) {
        AgentRuntime rt;
        rt.spec = world.specs[parent];
        rt.q = QTable(cfg.default_q);
        rt.tsqm = Tsqm(cfg.tsqm_rows, cfg.tsqm_cols);
        rt.weights = ImpactWeights{cfg.w_link, cfg.w_info};
        rt.eps_base = cfg.eps_base;
        rt.mv_threshold = cfg.mv_threshold;
        rt.alpha = cfg.alpha;
        rt.gamma = cfg.gamma;
        rt.tau = cfg.tau;
        rt.trend_decay = cfg.trend_decay;
        rt.info_link_reward = cfg.info_link_reward;
        seed_neighbourhood(world, rt, variant, rng);
        world.system.agents[parent] = rt.state;
        world.parents.emplace(parent, std::move(rt));
    }

    return world;
}

namespace {

// A parent's turn is over: its allocations have completed, so the turn's
// records leave the system and stop loading the children. Task qualities
// were already scored when each allocation landed, at the child's
// concurrent count at that moment.
void clear_turn_records(World& world, AgentId parent)
{
    auto& records = world.system.allocations;
    records.erase(std::remove_if(records.begin(), records.end(),
                                 [&](const AllocationRecord& r) {
                                     bool own_alloc = !r.source.external && r.source.id == parent;
                                     bool own_requirement = r.source.external &&
                                                            r.allocatee == parent;
                                     return own_alloc || own_requirement;
                                 }),
                  records.end());
}

// The no-learning reference policy: hand each task to the neighbour with the
// best base quality for its type. Returns the allocation quality, or a
// negative value when nothing reachable can run the task.
double oracle_step(World& world, AgentRuntime& rt, PendingComposite& comp,
                   const std::set<AgentId>& unavailable)
{
    AtomicTask task = comp.remaining.front();
    AgentId best = -1;
    double best_base = -1.0;
    for (AgentId n : rt.state.neighbourhood) {
        if (unavailable.count(n) || !world.model.capable(n, task.type))
            continue;
        double base = world.model.base(n, task.type);
        if (base > best_base) {
            best = n;
            best_base = base;
        }
    }
    comp.complete(task.id);
    if (best < 0)
        return -1.0;
    world.system = apply_alloc(world.system, rt.spec.id, task, best);
    int held = 0;
    for (const auto& record : world.system.allocations)
        if (record.allocatee == best)
            held += static_cast<int>(record.tasks.size());
    return world.model.law(best_base, held);
}

} // namespace

EpisodeResult run_episode(World& world, const Variant& variant, int episode_index,
                          std::mt19937_64& rng)
{
    const ScenarioConfig& cfg = world.cfg;
    EpisodeResult result;
    result.episode = episode_index;

    // Availability for this episode.
    std::set<AgentId> unavailable;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (const auto& [id, spec] : world.specs)
        if (unit(rng) < cfg.p_unavailable)
            unavailable.insert(id);
    bool in_window = variant.disruption && episode_index >= cfg.volatile_start &&
                     episode_index <= cfg.volatile_end;
    if (in_window)
        for (AgentId child : world.child_ids)
            if (unit(rng) < cfg.p_leave)
                unavailable.insert(child);

    world.system.allocations.clear();
    world.system.allocated_tasks.clear();

    // Arrivals: one composite per responsible parent, in shuffled order.
    std::vector<AgentId> order = world.parent_ids;
    std::shuffle(order.begin(), order.end(), rng);

    std::map<AgentId, PendingComposite> pending;
    for (AgentId parent : order) {
        const auto& responsibilities = world.specs[parent].responsibilities;
        if (responsibilities.empty())
            continue;
        std::vector<CompositeTypeId> types(responsibilities.begin(), responsibilities.end());
        std::uniform_int_distribution<std::size_t> pick(0, types.size() - 1);
        CompositeTypeId ct = types[pick(rng)];

        CompositeTask composite;
        composite.id = world.next_composite_id++;
        composite.type = ct;
        composite.arrival = world.system.clock;
        for (TaskTypeId type : world.composite_types[ct]) {
            composite.tasks.push_back(
                AtomicTask{world.next_task_id++, type, composite.id, world.system.clock});
            result.optimal_utility += world.best_base.count(type) ? world.best_base[type] : 0.0;
        }
        world.system = apply_requirement(world.system, world.specs, composite, -1, rng);
        pending.emplace(parent, PendingComposite{composite.id, composite.tasks});
    }

    StepEnv env{&world.specs, &world.model, &unavailable,
                cfg.provide_info_from_neighbourhood};
    StepPolicy policy = variant.policy;
    if (variant.episode_temperature)
        policy.boltzmann_tau = static_cast<double>(episode_index + 1);

    int attempts = 0;
    int failures = 0;
    for (AgentId parent : order) {
        auto it = pending.find(parent);
        if (it == pending.end())
            continue;
        PendingComposite& comp = it->second;
        AgentRuntime& rt = world.parents.at(parent);
        double turn_utility = 0.0;

        if (!unavailable.count(parent)) {
            if (variant.greedy_oracle) {
                while (!comp.done()) {
                    attempts += 1;
                    double q = oracle_step(world, rt, comp, unavailable);
                    if (q < 0.0)
                        failures += 1;
                    else
                        turn_utility += q;
                }
            } else {
                for (int step = 0; step < cfg.step_budget && !comp.done(); ++step) {
                    StepReport report;
                    try {
                        report = ata_ria_step(rt, world.system, comp, env, rng, policy);
                    } catch (const Error& e) {
                        if (e.code() == Err::NoAvailableAction)
                            break;
                        throw;
                    }
                    if (report.alloc_attempted) {
                        attempts += 1;
                        if (report.alloc_failed)
                            failures += 1;
                    }
                    turn_utility += report.exec_quality + report.sample_quality;
                }
            }
        }
        result.utility += turn_utility;
        clear_turn_records(world, parent);
    }

    if (variant.ql_reset)
        for (auto& [id, rt] : world.parents)
            rt.q.decay_toward_state_mean();

    result.failed_fraction = attempts > 0 ? static_cast<double>(failures) / attempts : 0.0;
    return result;
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index)
{
    // splitmix64 over the packed identifiers.
    std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (stream + 1) + 0xBF58476D1CE4E5B9ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::vector<RunResult> run_scenario(const ScenarioConfig& cfg)
{
    cfg.validate();
    // TODO: schedule runs across a thread pool; each run already owns its
    // world and derives its own seed.
    std::vector<RunResult> results;
    auto variants = scenario_variants(cfg);
    for (std::size_t v = 0; v < variants.size(); ++v) {
        const Variant& variant = variants[v];
        for (int run = 0; run < cfg.runs; ++run) {
            std::uint64_t seed = mix_seed(cfg.seed, v, static_cast<std::uint64_t>(run));
            std::mt19937_64 rng(seed);
            World world = build_system(cfg, variant, rng);
            RunResult rr;
            rr.label = variant.label;
            rr.run = run;
            rr.seed = seed;
            rr.episodes.reserve(cfg.episodes);
            for (int ep = 0; ep < cfg.episodes; ++ep)
                rr.episodes.push_back(run_episode(world, variant, ep, rng));
            results.push_back(std::move(rr));
        }
    }
    return results;
}

} // namespace dtas
