#include "adaptrust/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "adaptrust/multiuse.hpp"
#include "adaptrust/rng.hpp"
#include "adaptrust/trust.hpp"

namespace adaptrust {

namespace {

struct SignalAttribute {
    const char* name;
    double min;
    double max;
};

// Numeric attributes that carry indicator k's true trust, linearly.
constexpr SignalAttribute kSignals[] = {
    {"owner_reputation", 0.0, 5.0},    {"carrier_reputation", 0.0, 5.0}, {"signal_strength_dbm", -100.0, -30.0},
    {"encryption_level", 0.0, 4.0},    {"uptime_ratio", 0.0, 1.0},
};

const std::vector<std::string> kBrands{"acme", "globex", "initech", "umbrella"};
const std::vector<std::string> kSystems{"android", "ios", "linux"};

const std::vector<std::string> kBlockWords{"streaming", "video",   "finance",  "banking", "gaming", "voip",
                                           "social",    "messaging", "shopping", "payments", "browsing", "news"};
const std::vector<std::string> kFillerWords{"background", "daytime", "evening", "foreground", "mobile"};

std::string padded(char prefix, std::size_t i, std::size_t count) {
    const int width = static_cast<int>(std::to_string(count).size());
    char buf[32];
    std::snprintf(buf, sizeof buf, "%c%0*zu", prefix, width, i + 1);
    return buf;
}

std::string block_word(std::size_t block, std::size_t variant) {
    const std::size_t i = 2 * block + variant;
    if (i < kBlockWords.size()) return kBlockWords[i];
    return "topic" + std::to_string(block) + (variant ? "b" : "a");
}

double grid_draw(Rng& rng, int lo, int hi) { return rng.integer(lo, hi) / 100.0; }

} // namespace

void GeneratorConfig::validate() const {
    if (indicator_count == 0) throw Error(ErrorKind::ConfigInvalid, "indicator count must be at least 1");
    if (num_services == 0) throw Error(ErrorKind::ConfigInvalid, "need at least one service");
    if (num_usages < indicator_count) throw Error(ErrorKind::ConfigInvalid, "need at least one usage per indicator");
    if (!(noise_std >= 0.0)) throw Error(ErrorKind::ConfigInvalid, "noise must be nonnegative");
    if (!(own_block_min > off_block_max && own_block_min <= 1.0 && off_block_max >= 0.0))
        throw Error(ErrorKind::ConfigInvalid, "need 0 <= off_block_max < own_block_min <= 1");
    if (num_multiuse > 0 && (pattern_size == 0 || pattern_size > num_usages))
        throw Error(ErrorKind::ConfigInvalid, "pattern size must be within 1..num_usages");
}

int rating_from_trust(double trust) {
    return static_cast<int>(std::clamp<long>(std::lround(10.0 * trust), kMinRating, kMaxRating));
}

GeneratedData generate_dataset(const GeneratorConfig& config) {
    config.validate();
    Rng rng(config.seed);
    const std::size_t k = config.indicator_count;
    GeneratedData out;
    Dataset& ds = out.dataset;

    for (std::size_t i = 0; i < k; ++i) {
        AttributeDecl decl;
        decl.kind = AttributeKind::Numeric;
        if (i < std::size(kSignals)) {
            decl.name = kSignals[i].name;
            decl.min = kSignals[i].min;
            decl.max = kSignals[i].max;
        } else {
            decl.name = "aspect" + std::to_string(i) + "_score";
            decl.min = 0.0;
            decl.max = 10.0;
        }
        ds.schema.attributes.push_back(decl);
    }
    if (config.distractor_attributes) {
        ds.schema.attributes.push_back({"device_brand", AttributeKind::Categorical, kBrands});
        ds.schema.attributes.push_back({"device_os", AttributeKind::Categorical, kSystems});
    }

    for (std::size_t s = 0; s < config.num_services; ++s) {
        ServiceProfile p;
        p.id = padded('S', s, config.num_services);
        p.owner = "owner" + std::to_string(s + 1);
        p.functions = {"wifi_hotspot"};
        IndicatorVector truth;
        for (std::size_t i = 0; i < k; ++i) {
            const double f = grid_draw(rng, 0, 100);
            truth.values.push_back(f);
            const auto& decl = ds.schema.attributes[i];
            p.attributes[decl.name] = decl.min + f * (decl.max - decl.min);
        }
        if (config.distractor_attributes) {
            const auto& brand = kBrands[rng.index(kBrands.size())];
            p.attributes["device_brand"] = brand;
            p.attributes["device_os"] = kSystems[rng.index(kSystems.size())];
            p.device = brand;
        }
        p.qos["bandwidth_mbps"] = static_cast<double>(rng.integer(5, 100));
        out.truth.service_vectors.emplace(p.id, std::move(truth));
        ds.services.push_back(std::move(p));
    }

    const int own_lo = static_cast<int>(std::lround(config.own_block_min * 100));
    const int off_hi = static_cast<int>(std::lround(config.off_block_max * 100));
    std::vector<IndicatorVector> block_expectation(k);
    for (std::size_t b = 0; b < k; ++b) {
        block_expectation[b].values.resize(k);
        for (std::size_t i = 0; i < k; ++i) block_expectation[b][i] = i == b ? grid_draw(rng, own_lo, 100) : grid_draw(rng, 0, off_hi);
    }

    for (std::size_t u = 0; u < config.num_usages; ++u) {
        UsageProfile p;
        p.id = padded('u', u, config.num_usages);
        const std::size_t block = u % k;
        p.metadata.insert(block_word(block, rng.index(2)));
        const std::size_t fillers = rng.index(3);
        for (std::size_t f = 0; f < fillers; ++f) p.metadata.insert(kFillerWords[rng.index(kFillerWords.size())]);
        p.avg_duration_minutes = static_cast<double>(rng.integer(5, 120));
        out.truth.usage_block[p.id] = block;
        out.truth.usage_expectations[p.id] = block_expectation[block];
        out.truth.usage_duration[p.id] = p.avg_duration_minutes;
        ds.usages.push_back(std::move(p));
    }

    for (const auto& s : ds.services) {
        const auto& fs = out.truth.service_vectors.at(s.id);
        for (const auto& u : ds.usages) {
            const double noise = rng.normal(0.0, 1.0) * config.noise_std;
            const double t = adaptive_trust(fs, out.truth.usage_expectations.at(u.id));
            ds.ratings.push_back({s.id, u.id, rating_from_trust(t + noise)});
        }
    }

    std::vector<std::size_t> order(ds.usages.size());
    for (std::size_t m = 0; m < config.num_multiuse; ++m) {
        const auto& service = ds.services[rng.index(ds.services.size())];
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        MultiUseRecord rec;
        rec.service_id = service.id;
        std::vector<IndicatorVector> expectations;
        std::vector<double> durations;
        for (std::size_t j = 0; j < config.pattern_size; ++j) {
            const std::size_t pick = j + rng.index(order.size() - j);
            std::swap(order[j], order[pick]);
            const auto& u = ds.usages[order[j]];
            rec.usages.push_back(u.id);
            expectations.push_back(out.truth.usage_expectations.at(u.id));
            durations.push_back(u.avg_duration_minutes);
        }
        const auto agg = aggregate_closeness_weighted(expectations, usage_significance(durations));
        const double noise = rng.normal(0.0, 1.0) * config.noise_std;
        rec.rating = rating_from_trust(adaptive_trust(out.truth.service_vectors.at(service.id), agg.vector) + noise);
        out.multiuse.push_back(std::move(rec));
    }
    return out;
}

} // namespace adaptrust
