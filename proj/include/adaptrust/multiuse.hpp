// Multi-use sessions: aggregating per-usage expectations into one vector and
// scoring a service against it.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adaptrust/core.hpp"
#include "adaptrust/models.hpp"
#include "adaptrust/trust.hpp"

namespace adaptrust {

// Candidate aggregation values lo, lo+step, ..., hi.
struct GridSpec {
    double lo = 0.0;
    double hi = 1.0;
    double step = 0.01;

    std::size_t points() const;
    double at(std::size_t i) const;
};

struct AggregationResult {
    IndicatorVector vector;
    std::vector<std::pair<double, double>> optimal_range; // per indicator
    double fairness = 1.0;
};

enum class AggregationMethod { Average, Closeness, Weighted };

AggregationMethod aggregation_from_name(const std::string& name);
std::string aggregation_name(AggregationMethod method);

// min_u d(agg, F_u) / max_u d(agg, F_u), Euclidean; 1 when every distance is 0.
double fairness(const IndicatorVector& aggregate, std::span<const IndicatorVector> expectations);

AggregationResult aggregate_average(std::span<const IndicatorVector> expectations);

// Per indicator, exhaustive grid search minimizing max_u d_u(p) - min_u d_u(p)
// with d_u(p) = |p - F_u(k)|. The returned component is the grid minimizer
// nearest the midpoint of the minimizer range (half up). When every usage
// agrees on an indicator the objective is flat and that common value is used.
AggregationResult aggregate_closeness(std::span<const IndicatorVector> expectations, const GridSpec& grid = {});

// As aggregate_closeness with d_u(p) = S_u * |p - F_u(k)|.
AggregationResult aggregate_closeness_weighted(std::span<const IndicatorVector> expectations,
                                               std::span<const double> significances, const GridSpec& grid = {});

AggregationResult aggregate(std::span<const IndicatorVector> expectations, AggregationMethod method,
                            std::span<const double> significances = {});

// S_u = dr_u / sum dr.
std::vector<double> usage_significance(std::span<const double> durations);

struct UsageEvent {
    std::int64_t timestamp = 0; // seconds
    std::string usage_id;
};

struct UsageContext {
    int hour_bucket = 0;
    std::string last_usage;
};

constexpr int kHoursPerBucket = 6;

// Quarter of the day (0..3) a timestamp falls in.
int hour_bucket(std::int64_t timestamp);

// Top-n usages ranked by count conditioned on (hour bucket, last usage), then
// on last usage alone, then unconditionally; remaining ties lexicographic.
UsagePattern predict_usage_pattern(std::span<const UsageEvent> history, const UsageContext& context, std::size_t n);

// Scores a service against the aggregate of already-predicted expectations.
TrustScore multi_use_trust(const IndicatorVector& service_indicators, std::span<const IndicatorVector> expectations,
                           AggregationMethod method, std::span<const double> significances = {});

// Weighted method reads pattern.significances.
TrustScore multi_use_trust(const TrainedModelPair& pair, const ServiceProfile& service,
                           std::span<const UsageProfile> usages, const UsagePattern& pattern,
                           AggregationMethod method);

} // namespace adaptrust
