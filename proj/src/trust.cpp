#include "adaptrust/trust.hpp"

#include <algorithm>
#include <cmath>

namespace adaptrust {

double adaptive_trust(const IndicatorVector& f_s, const IndicatorVector& f_u) {
    if (f_s.size() != f_u.size())
        throw Error(ErrorKind::DimensionMismatch, "service and usage vectors differ in length");
    double met = 0.0;
    double expected = 0.0;
    for (std::size_t n = 0; n < f_u.size(); ++n) {
        met += std::min(f_s[n], f_u[n]);
        expected += f_u[n];
    }
    if (!(expected > 0.0)) throw Error(ErrorKind::ZeroExpectation, "usage expects nothing on every indicator");
    return std::clamp(met / expected, 0.0, 1.0);
}

int trust_level(double value) {
    if (!(value >= 0.0 && value <= 1.0)) throw Error(ErrorKind::OutOfRange, "trust value outside [0,1]");
    // Round half up on the 0.1 scale; the slack absorbs 0.45 arriving as 0.44999...
    const int level = static_cast<int>(std::floor(10.0 * value + 0.5 + 1e-9));
    return std::clamp(level, 1, 10);
}

TrustScore make_score(double value) { return {value, trust_level(value)}; }

TrustScore assess(const TrainedModelPair& pair, const ServiceProfile& service, const UsageProfile& usage) {
    return make_score(adaptive_trust(predict_service_indicators(pair, service), predict_usage_expectations(pair, usage)));
}

} // namespace adaptrust
