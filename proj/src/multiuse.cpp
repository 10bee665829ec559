#include "adaptrust/multiuse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

namespace adaptrust {

namespace {

// Objective values equal up to rounding count as tied minimizers.
constexpr double kTieTolerance = 1e-9;

void check_expectations(std::span<const IndicatorVector> expectations) {
    if (expectations.empty()) throw Error(ErrorKind::EmptyInput, "no expectation vectors");
    for (const auto& e : expectations)
        if (e.size() != expectations.front().size())
            throw Error(ErrorKind::DimensionMismatch, "expectation vectors differ in length");
}

double spread(double p, std::span<const double> column, std::span<const double> weights) {
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t u = 0; u < column.size(); ++u) {
        const double d = weights[u] * std::abs(p - column[u]);
        hi = std::max(hi, d);
        lo = std::min(lo, d);
    }
    return hi - lo;
}

AggregationResult closeness_search(std::span<const IndicatorVector> expectations, std::span<const double> weights,
                                   const GridSpec& grid) {
    check_expectations(expectations);
    const std::size_t k = expectations.front().size();
    const std::size_t n = grid.points();
    AggregationResult out;
    out.vector.values.resize(k);
    std::vector<double> column(expectations.size());
    std::vector<double> objective(n);

    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t u = 0; u < expectations.size(); ++u) column[u] = expectations[u][i];
        const bool flat = std::all_of(column.begin(), column.end(), [&](double v) { return v == column.front(); });
        if (flat) {
            out.vector[i] = column.front();
            out.optimal_range.emplace_back(column.front(), column.front());
            continue;
        }

        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            objective[j] = spread(grid.at(j), column, weights);
            best = std::min(best, objective[j]);
        }
        std::vector<std::size_t> minimizers;
        for (std::size_t j = 0; j < n; ++j)
            if (objective[j] <= best + kTieTolerance) minimizers.push_back(j);

        const std::size_t first = minimizers.front();
        const std::size_t last = minimizers.back();
        const std::size_t mid = (first + last + 1) / 2;
        std::size_t chosen = first;
        for (auto j : minimizers) {
            const auto dist = [&](std::size_t a) { return a > mid ? a - mid : mid - a; };
            if (dist(j) <= dist(chosen)) chosen = j;
        }
        out.vector[i] = grid.at(chosen);
        out.optimal_range.emplace_back(grid.at(first), grid.at(last));
    }
    out.fairness = fairness(out.vector, expectations);
    return out;
}

double distance(const IndicatorVector& a, const IndicatorVector& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(sum);
}

} // namespace

std::size_t GridSpec::points() const {
    if (!(step > 0.0) || !(hi >= lo)) throw Error(ErrorKind::ConfigInvalid, "invalid grid");
    return static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
}

double GridSpec::at(std::size_t i) const {
    const std::size_t last = points() - 1;
    // Division rather than accumulation keeps grid points exact (0.35, not 0.35000000000000003).
    return last == 0 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(last);
}

AggregationMethod aggregation_from_name(const std::string& name) {
    if (name == "avg" || name == "average") return AggregationMethod::Average;
    if (name == "closeness") return AggregationMethod::Closeness;
    if (name == "weighted") return AggregationMethod::Weighted;
    throw Error(ErrorKind::UnknownMethod, "unknown aggregation '" + name + "' (expected avg|closeness|weighted)");
}

std::string aggregation_name(AggregationMethod method) {
    switch (method) {
    case AggregationMethod::Average: return "avg";
    case AggregationMethod::Closeness: return "closeness";
    case AggregationMethod::Weighted: return "weighted";
    }
    return "?";
}

double fairness(const IndicatorVector& aggregate, std::span<const IndicatorVector> expectations) {
    check_expectations(expectations);
    if (aggregate.size() != expectations.front().size())
        throw Error(ErrorKind::DimensionMismatch, "aggregate and expectations differ in length");
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& e : expectations) {
        const double d = distance(aggregate, e);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    return hi == 0.0 ? 1.0 : lo / hi;
}

AggregationResult aggregate_average(std::span<const IndicatorVector> expectations) {
    check_expectations(expectations);
    const std::size_t k = expectations.front().size();
    AggregationResult out;
    // Mean of offsets from the first vector: exact when every input is equal.
    const IndicatorVector& base = expectations.front();
    std::vector<double> offset(k, 0.0);
    for (const auto& e : expectations)
        for (std::size_t i = 0; i < k; ++i) offset[i] += e[i] - base[i];
    out.vector.values.resize(k);
    for (std::size_t i = 0; i < k; ++i) out.vector[i] = base[i] + offset[i] / static_cast<double>(expectations.size());
    for (double v : out.vector.values) out.optimal_range.emplace_back(v, v);
    out.fairness = fairness(out.vector, expectations);
    return out;
}

AggregationResult aggregate_closeness(std::span<const IndicatorVector> expectations, const GridSpec& grid) {
    const std::vector<double> ones(expectations.size(), 1.0);
    return closeness_search(expectations, ones, grid);
}

AggregationResult aggregate_closeness_weighted(std::span<const IndicatorVector> expectations,
                                               std::span<const double> significances, const GridSpec& grid) {
    check_expectations(expectations);
    if (significances.size() != expectations.size())
        throw Error(ErrorKind::LengthMismatch, "one significance per expectation required");
    double total = 0.0;
    for (double s : significances) {
        if (!(s >= 0.0)) throw Error(ErrorKind::OutOfRange, "negative significance");
        total += s;
    }
    if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorKind::OutOfRange, "significances must sum to 1");
    return closeness_search(expectations, significances, grid);
}

AggregationResult aggregate(std::span<const IndicatorVector> expectations, AggregationMethod method,
                            std::span<const double> significances) {
    switch (method) {
    case AggregationMethod::Average: return aggregate_average(expectations);
    case AggregationMethod::Closeness: return aggregate_closeness(expectations);
    case AggregationMethod::Weighted: return aggregate_closeness_weighted(expectations, significances);
    }
    throw Error(ErrorKind::UnknownMethod, "unknown aggregation");
}

std::vector<double> usage_significance(std::span<const double> durations) {
    if (durations.empty()) throw Error(ErrorKind::EmptyInput, "no durations");
    double total = 0.0;
    for (double d : durations) {
        if (!(d >= 0.0)) throw Error(ErrorKind::OutOfRange, "negative duration");
        total += d;
    }
    if (!(total > 0.0)) throw Error(ErrorKind::ZeroTotalDuration, "durations sum to zero");
    std::vector<double> out;
    out.reserve(durations.size());
    for (double d : durations) out.push_back(d / total);
    return out;
}

int hour_bucket(std::int64_t timestamp) {
    const std::int64_t hour = ((timestamp / 3600) % 24 + 24) % 24;
    return static_cast<int>(hour / kHoursPerBucket);
}

UsagePattern predict_usage_pattern(std::span<const UsageEvent> history, const UsageContext& context, std::size_t n) {
    if (history.empty()) throw Error(ErrorKind::EmptyHistory, "usage history is empty");
    if (n == 0) throw Error(ErrorKind::OutOfRange, "pattern size must be positive");

    std::vector<UsageEvent> events(history.begin(), history.end());
    std::stable_sort(events.begin(), events.end(),
                     [](const UsageEvent& a, const UsageEvent& b) { return a.timestamp < b.timestamp; });

    // usage -> (count given bucket and last usage, count given last usage, count)
    std::map<std::string, std::tuple<long, long, long>> counts;
    for (std::size_t i = 0; i < events.size(); ++i) {
        auto& [both, after_last, any] = counts[events[i].usage_id];
        ++any;
        if (i == 0 || events[i - 1].usage_id != context.last_usage) continue;
        ++after_last;
        if (hour_bucket(events[i].timestamp) == context.hour_bucket) ++both;
    }

    std::vector<std::pair<std::string, std::tuple<long, long, long>>> ranked(counts.begin(), counts.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

    UsagePattern pattern;
    for (std::size_t i = 0; i < ranked.size() && i < n; ++i) pattern.usages.push_back(ranked[i].first);
    return pattern;
}

TrustScore multi_use_trust(const IndicatorVector& service_indicators, std::span<const IndicatorVector> expectations,
                           AggregationMethod method, std::span<const double> significances) {
    const auto agg = aggregate(expectations, method, significances);
    return make_score(adaptive_trust(service_indicators, agg.vector));
}

TrustScore multi_use_trust(const TrainedModelPair& pair, const ServiceProfile& service,
                           std::span<const UsageProfile> usages, const UsagePattern& pattern,
                           AggregationMethod method) {
    pattern.validate();
    if (method == AggregationMethod::Weighted && !pattern.significances)
        throw Error(ErrorKind::ConfigInvalid, "weighted aggregation requires usage significances");

    std::vector<IndicatorVector> expectations;
    for (const auto& id : pattern.usages) {
        auto it = std::find_if(usages.begin(), usages.end(), [&](const UsageProfile& u) { return u.id == id; });
        if (it == usages.end()) throw Error(ErrorKind::DanglingReference, "unknown usage id '" + id + "'");
        expectations.push_back(predict_usage_expectations(pair, *it));
    }
    const std::vector<double> none;
    return multi_use_trust(predict_service_indicators(pair, service), expectations, method,
                           pattern.significances ? std::span<const double>(*pattern.significances)
                                                 : std::span<const double>(none));
}

} // namespace adaptrust
