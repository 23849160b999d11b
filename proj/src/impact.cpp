#include "dtas/impact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace dtas {

Fraction::Fraction(long long n, long long d) : num(n), den(d)
{
    if (den == 0)
        fail(Err::ParameterOutOfRange, "zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
}

Fraction operator*(const Fraction& a, const Fraction& b)
{
    return Fraction(a.num * b.num, a.den * b.den);
}

Fraction operator-(const Fraction& a, const Fraction& b)
{
    return Fraction(a.num * b.den - b.num * a.den, a.den * b.den);
}

ImpactWeightsExact estimate_impact_weights(long long system_size, long long neighbourhood_size,
                                           long long knowledge_size)
{
    if (neighbourhood_size <= 0 || neighbourhood_size > knowledge_size ||
        knowledge_size > system_size)
        fail(Err::InvalidSizes, "require 0 < |N| <= |K| <= |G|");

    const Fraction one(1, 1);
    Fraction half_ratio(neighbourhood_size, 2 * knowledge_size);
    Fraction n_over_k(neighbourhood_size, knowledge_size);
    Fraction k_over_g(knowledge_size, system_size);

    ImpactWeightsExact out;
    out.link = half_ratio * (one - n_over_k);
    out.info = (one - half_ratio) * (one - k_over_g);
    return out;
}

Tsqm::Tsqm(int rows, int cols) : cols_(cols)
{
    if (rows < 1 || cols < 1)
        fail(Err::ParameterOutOfRange, "matrix shape must be positive");
    slots_.assign(rows, std::vector<std::optional<double>>(cols));
    since_rollup_.assign(rows, 0);
}

void Tsqm::push_row(int i, double value)
{
    auto& row = slots_[i];
    for (int j = cols_ - 1; j > 0; --j)
        row[j] = row[j - 1];
    row[0] = value;
    since_rollup_[i] += 1;

    if (since_rollup_[i] == cols_ && i + 1 < rows()) {
        since_rollup_[i] = 0;
        push_row(i + 1, *row_average(i));
    } else if (since_rollup_[i] == cols_) {
        since_rollup_[i] = 0;
    }
}

void Tsqm::add(double quality)
{
    push_row(0, quality);
}

std::optional<double> Tsqm::row_average(int i) const
{
    double sum = 0.0;
    int count = 0;
    for (const auto& slot : slots_[i])
        if (slot) {
            sum += *slot;
            count += 1;
        }
    if (count == 0)
        return std::nullopt;
    return sum / count;
}

int Tsqm::populated_rows() const
{
    int count = 0;
    for (int i = 0; i < rows(); ++i)
        if (row_average(i))
            count += 1;
        else
            break;
    return count;
}

namespace {

struct TrendKnots {
    std::vector<double> x;
    std::vector<double> y;
};

TrendKnots trend_knots(const Tsqm& tsqm, double decay)
{
    int populated = tsqm.populated_rows();
    if (populated < 2)
        fail(Err::InsufficientHistory, "need at least two populated rows");
    TrendKnots knots;
    for (int i = 0; i < populated; ++i) {
        knots.x.push_back(static_cast<double>(i) / static_cast<double>(populated - 1));
        knots.y.push_back(*tsqm.row_average(i) * std::pow(decay, i));
    }
    return knots;
}

double eval_linear(const TrendKnots& knots, double x)
{
    if (x <= knots.x.front())
        return knots.y.front();
    if (x >= knots.x.back())
        return knots.y.back();
    for (std::size_t i = 1; i < knots.x.size(); ++i)
        if (x <= knots.x[i]) {
            double t = (x - knots.x[i - 1]) / (knots.x[i] - knots.x[i - 1]);
            return knots.y[i - 1] + t * (knots.y[i] - knots.y[i - 1]);
        }
    return knots.y.back();
}

// Exact integral of the piecewise-linear interpolant over [0, x].
double integrate_linear(const TrendKnots& knots, double x)
{
    double total = 0.0;
    for (std::size_t i = 1; i < knots.x.size(); ++i) {
        double lo = knots.x[i - 1];
        double hi = knots.x[i];
        if (x <= lo)
            break;
        double upper = std::min(x, hi);
        double y_lo = knots.y[i - 1];
        double y_hi = eval_linear(knots, upper);
        total += 0.5 * (y_lo + y_hi) * (upper - lo);
    }
    return total;
}

} // namespace

double interpolate_trend(const Tsqm& tsqm, double decay, double x)
{
    if (decay < 0.0 || decay > 1.0 || x < 0.0 || x > 1.0)
        fail(Err::ParameterOutOfRange, "decay and x must lie in [0,1]");
    return eval_linear(trend_knots(tsqm, decay), x);
}

double transform_trend(const Tsqm& tsqm, double decay, double x)
{
    if (decay < 0.0 || decay > 1.0 || x < 0.0 || x > 1.0)
        fail(Err::ParameterOutOfRange, "decay and x must lie in [0,1]");
    if (tsqm.populated_rows() < 2)
        return 0.5;
    TrendKnots knots = trend_knots(tsqm, decay);
    double whole = integrate_linear(knots, 1.0);
    if (whole <= 0.0)
        return 0.5;
    return 1.0 - integrate_linear(knots, x) / whole;
}

double exploration_factor(const Tsqm& tsqm, double decay)
{
    return transform_trend(tsqm, decay, 0.5);
}

double neighbourhood_impact(const QualityModel& model, const std::vector<AtomicTask>& tasks,
                            const std::vector<AgentId>& old_hood,
                            const std::vector<AgentId>& new_hood, const AllocationMap& fixed_alloc,
                            std::uint64_t budget)
{
    return local_optimal_quality(model, tasks, new_hood, fixed_alloc, budget) -
           local_optimal_quality(model, tasks, old_hood, fixed_alloc, budget);
}

double max_neighbourhood_impact(const QualityModel& model, const std::vector<AtomicTask>& tasks,
                                const std::vector<AgentId>& pool, const AllocationMap& fixed_alloc,
                                std::uint64_t budget)
{
    std::vector<AgentId> sorted = pool;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (sorted.size() > 20)
        fail(Err::BudgetExceeded, "pool too large for pairwise subset enumeration");

    // max over ordered pairs (X, Y) of oq(Y) - oq(X) = max oq - min oq over
    // the subsets that can allocate all tasks.
    const std::size_t subsets = std::size_t{1} << sorted.size();
    double best = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t mask = 0; mask < subsets; ++mask) {
        std::vector<AgentId> subset;
        for (std::size_t i = 0; i < sorted.size(); ++i)
            if (mask & (std::size_t{1} << i))
                subset.push_back(sorted[i]);
        double q;
        try {
            q = local_optimal_quality(model, tasks, subset, fixed_alloc, budget);
        } catch (const Error& e) {
            if (e.code() == Err::NonAllocable)
                continue;
            throw;
        }
        lo = std::min(lo, q);
        hi = std::max(hi, q);
    }
    if (hi >= lo)
        best = hi - lo;
    return best;
}

double knowledge_impact(const QualityModel& model, const std::vector<AtomicTask>& tasks,
                        const std::vector<AgentId>& old_knowledge,
                        const std::vector<AgentId>& new_knowledge, const AllocationMap& fixed_alloc,
                        std::uint64_t budget)
{
    return max_neighbourhood_impact(model, tasks, new_knowledge, fixed_alloc, budget) -
           max_neighbourhood_impact(model, tasks, old_knowledge, fixed_alloc, budget);
}

double action_impact(const QualityModel& model, const std::vector<AtomicTask>& tasks,
                     const std::vector<AgentId>& old_hood, const std::vector<AgentId>& new_hood,
                     const std::vector<AgentId>& old_knowledge,
                     const std::vector<AgentId>& new_knowledge, const AllocationMap& fixed_alloc,
                     double p_neighbourhood, double p_knowledge, std::uint64_t budget)
{
    double ni = p_neighbourhood == 0.0
                    ? 0.0
                    : neighbourhood_impact(model, tasks, old_hood, new_hood, fixed_alloc, budget);
    double ki = p_knowledge == 0.0 ? 0.0
                                   : knowledge_impact(model, tasks, old_knowledge, new_knowledge,
                                                      fixed_alloc, budget);
    return p_neighbourhood * ni + p_knowledge * ki;
}

} // namespace dtas
