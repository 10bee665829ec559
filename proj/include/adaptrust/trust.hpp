#pragma once

#include "adaptrust/core.hpp"
#include "adaptrust/models.hpp"

namespace adaptrust {

struct TrustScore {
    double value = 0.0; // [0,1]
    int level = 1;      // 1..10

    bool operator==(const TrustScore&) const = default;
};

// sum_n min(f_s[n], f_u[n]) / sum_n f_u[n]
double adaptive_trust(const IndicatorVector& f_s, const IndicatorVector& f_u);

// Nearest of the ten levels, so that trust_level(r / 10) == r.
int trust_level(double value);

TrustScore make_score(double value);

// Single-usage assessment: predicted service indicators against predicted
// usage expectations.
TrustScore assess(const TrainedModelPair& pair, const ServiceProfile& service, const UsageProfile& usage);

} // namespace adaptrust
