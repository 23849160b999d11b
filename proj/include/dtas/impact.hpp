#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dtas/learning.hpp"
#include "dtas/quality.hpp"
#include "dtas/types.hpp"

namespace dtas {

// Exact rational, used where results must be reproduced bit-exactly.
struct Fraction {
    long long num = 0;
    long long den = 1;

    Fraction() = default;
    Fraction(long long n, long long d);
    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
    friend Fraction operator*(const Fraction& a, const Fraction& b);
    friend Fraction operator-(const Fraction& a, const Fraction& b);
    friend bool operator==(const Fraction& a, const Fraction& b)
    {
        return a.num == b.num && a.den == b.den;
    }
};

// Per-category estimates of how strongly an action can shift allocation
// quality. Only Info and Link carry weight; everything else is 0.
struct ImpactWeights {
    double link = 0.0;
    double info = 0.0;

    double of(ActionCategory category) const
    {
        switch (category) {
        case ActionCategory::Link: return link;
        case ActionCategory::Info: return info;
        default: return 0.0;
        }
    }
};

struct ImpactWeightsExact {
    Fraction link;
    Fraction info;

    ImpactWeights to_weights() const { return ImpactWeights{link.to_double(), info.to_double()}; }
};

// W estimation from system size, neighbourhood size and knowledge size:
//   link = (1/2 * n/k) * (1 - n/k)
//   info = (1 - 1/2 * n/k) * (1 - k/g)
// Requires 0 < n <= k <= g.
ImpactWeightsExact estimate_impact_weights(long long system_size, long long neighbourhood_size,
                                           long long knowledge_size);

// Time-summarised quality matrix: m rows of n slots. New qualities enter the
// front of row 0; every n insertions into a row push that row's average (over
// filled slots) into the next row, cascading. Row i therefore summarises
// quality trends over an n^i-times longer window than row 0.
class Tsqm {
public:
    Tsqm(int rows, int cols);

    void add(double quality);

    int rows() const { return static_cast<int>(slots_.size()); }
    int cols() const { return cols_; }
    const std::vector<std::optional<double>>& row(int i) const { return slots_[i]; }
    // Average over the filled slots of a row; empty rows have none.
    std::optional<double> row_average(int i) const;
    // Rows with at least one filled slot (always a prefix).
    int populated_rows() const;
    int inserted_since_rollup(int i) const { return since_rollup_[i]; }

private:
    void push_row(int i, double value);

    int cols_;
    std::vector<std::vector<std::optional<double>>> slots_;
    std::vector<int> since_rollup_;
};

// II: piecewise-linear interpolant through (i/(R-1), row_average(i) * decay^i)
// for the R populated rows, evaluated at x in [0,1]. Needs at least two
// populated rows.
double interpolate_trend(const Tsqm& tsqm, double decay, double x);

// IT: 1 - integral(II, 0..x) / integral(II, 0..1), with both integrals exact
// on the piecewise-linear interpolant. Returns the neutral value 0.5 when
// history is insufficient or the interpolant integrates to zero.
double transform_trend(const Tsqm& tsqm, double decay, double x);

// IT evaluated at the midway point x = 0.5; scales the base exploration
// factor.
double exploration_factor(const Tsqm& tsqm, double decay);

// NI: change in locally-optimal quality when a neighbourhood is replaced.
double neighbourhood_impact(const QualityModel& model, const std::vector<AtomicTask>& tasks,
                            const std::vector<AgentId>& old_hood,
                            const std::vector<AgentId>& new_hood, const AllocationMap& fixed_alloc,
                            std::uint64_t budget = kDefaultEnumerationBudget);

// MNI: the largest neighbourhood impact over ordered pairs of subsets of the
// pool. Subsets that cannot allocate all tasks are skipped; 0 when no subset
// can.
double max_neighbourhood_impact(const QualityModel& model, const std::vector<AtomicTask>& tasks,
                                const std::vector<AgentId>& pool, const AllocationMap& fixed_alloc,
                                std::uint64_t budget = kDefaultEnumerationBudget);

// KI: difference of the maximal neighbourhood impacts reachable from two
// knowledge bases.
double knowledge_impact(const QualityModel& model, const std::vector<AtomicTask>& tasks,
                        const std::vector<AgentId>& old_knowledge,
                        const std::vector<AgentId>& new_knowledge, const AllocationMap& fixed_alloc,
                        std::uint64_t budget = kDefaultEnumerationBudget);

// AI: expected allocation-quality change of an action that moves the
// neighbourhood and knowledge, given the probabilities that each change takes
// effect.
double action_impact(const QualityModel& model, const std::vector<AtomicTask>& tasks,
                     const std::vector<AgentId>& old_hood, const std::vector<AgentId>& new_hood,
                     const std::vector<AgentId>& old_knowledge,
                     const std::vector<AgentId>& new_knowledge, const AllocationMap& fixed_alloc,
                     double p_neighbourhood, double p_knowledge,
                     std::uint64_t budget = kDefaultEnumerationBudget);

} // namespace dtas
