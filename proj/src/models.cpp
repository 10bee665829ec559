#include "adaptrust/models.hpp"

#include <algorithm>
#include <set>

#include "adaptrust/trust.hpp"

namespace adaptrust {

namespace {

constexpr int kGridSteps = 100; // expectation grid 0.00 .. 1.00

std::vector<double> unit(const IndicatorVector& v) { return v.values; }

double fit_objective(const std::vector<std::pair<IndicatorVector, double>>& obs, const IndicatorVector& expectation) {
    double sum = 0.0;
    for (const auto& [service, rating] : obs) {
        const double d = adaptive_trust(service, expectation) - rating;
        sum += d * d;
    }
    return sum;
}

double total(const IndicatorVector& v) {
    double s = 0.0;
    for (double x : v.values) s += x;
    return s;
}

} // namespace

MetadataVocabulary build_metadata_vocabulary(std::span<const UsageProfile> usages) {
    if (usages.empty()) throw Error(ErrorKind::EmptyInput, "no usages to build a vocabulary from");
    std::set<std::string> words;
    for (const auto& u : usages) words.insert(u.metadata.begin(), u.metadata.end());
    return {{words.begin(), words.end()}};
}

DescriptorVector encode_descriptor(const UsageProfile& usage, const MetadataVocabulary& vocabulary) {
    DescriptorVector d;
    d.bits.assign(vocabulary.size(), 0);
    for (const auto& word : usage.metadata) {
        auto it = std::lower_bound(vocabulary.words.begin(), vocabulary.words.end(), word);
        if (it == vocabulary.words.end() || *it != word)
            throw Error(ErrorKind::UnknownMetadataWord, "usage " + usage.id + ": '" + word + "' not in vocabulary");
        d.bits[static_cast<std::size_t>(it - vocabulary.words.begin())] = 1;
    }
    return d;
}

std::vector<double> encode_service_attributes(const ServiceProfile& service, const AttributeSchema& schema) {
    std::vector<double> out;
    out.reserve(schema.width());
    for (const auto& decl : schema.attributes) {
        auto it = service.attributes.find(decl.name);
        if (it == service.attributes.end())
            throw Error(ErrorKind::SchemaViolation, "service " + service.id + " lacks attribute '" + decl.name + "'");
        if (decl.kind == AttributeKind::Categorical) {
            const auto* v = std::get_if<std::string>(&it->second);
            auto pos = v ? std::find(decl.categories.begin(), decl.categories.end(), *v) : decl.categories.end();
            if (pos == decl.categories.end())
                throw Error(ErrorKind::SchemaViolation,
                            "service " + service.id + ": bad category for '" + decl.name + "'");
            for (auto c = decl.categories.begin(); c != decl.categories.end(); ++c) out.push_back(c == pos ? 1.0 : 0.0);
        } else {
            const auto* v = std::get_if<double>(&it->second);
            if (!v || !(*v >= decl.min && *v <= decl.max))
                throw Error(ErrorKind::SchemaViolation,
                            "service " + service.id + ": '" + decl.name + "' missing or out of bounds");
            out.push_back((*v - decl.min) / (decl.max - decl.min));
        }
    }
    return out;
}

ServiceLabelMap derive_service_indicator_labels(const Dataset& dataset, const IndicatorPartition& partition) {
    const std::size_t k = partition.count();
    // Integer sums keep the result independent of record order.
    std::map<std::string, std::vector<std::pair<long, long>>> sums;
    for (const auto& r : dataset.ratings) {
        const int block = partition.block_of(r.usage_id);
        if (block < 0) continue;
        auto& row = sums[r.service_id];
        if (row.empty()) row.assign(k, {0, 0});
        normalize_rating(r.rating); // range check
        row[static_cast<std::size_t>(block)].first += r.rating;
        row[static_cast<std::size_t>(block)].second += 1;
    }
    ServiceLabelMap labels;
    for (const auto& [service, row] : sums) {
        ServiceLabels l;
        l.values.values.assign(k, 0.0);
        l.mask.assign(k, 0);
        for (std::size_t i = 0; i < k; ++i) {
            if (row[i].second == 0) continue;
            l.values[i] = static_cast<double>(row[i].first) / (10.0 * static_cast<double>(row[i].second));
            l.mask[i] = 1;
        }
        labels.emplace(service, std::move(l));
    }
    return labels;
}

ExpectationFit fit_usage_expectation(const std::vector<std::pair<IndicatorVector, double>>& observations,
                                     std::size_t indicator_count, std::size_t max_sweeps) {
    if (indicator_count == 0) throw Error(ErrorKind::EmptyInput, "no indicators");
    if (observations.empty()) throw Error(ErrorKind::UnratedUsage, "no observations to fit");

    ExpectationFit fit;
    fit.expectation.values.assign(indicator_count, 1.0);
    double current = fit_objective(observations, fit.expectation);
    fit.objective_history.push_back(current);

    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        const IndicatorVector before = fit.expectation;
        for (std::size_t k = 0; k < indicator_count; ++k) {
            IndicatorVector trial = fit.expectation;
            const double rest = total(trial) - trial[k];
            int best_step = -1;
            double best = 0.0;
            for (int step = 0; step <= kGridSteps; ++step) {
                trial[k] = step / static_cast<double>(kGridSteps);
                if (rest + trial[k] <= 0.0) continue; // adaptive trust undefined
                const double obj = fit_objective(observations, trial);
                if (best_step < 0 || obj < best) {
                    best = obj;
                    best_step = step;
                }
            }
            fit.expectation[k] = best_step / static_cast<double>(kGridSteps);
            current = best;
        }
        fit.objective_history.push_back(current);
        if (fit.expectation == before) break;
    }
    return fit;
}

UsageLabelMap derive_usage_expectation_labels(const Dataset& dataset, const ServiceLabelMap& service_labels) {
    if (service_labels.empty()) throw Error(ErrorKind::EmptyInput, "no service labels");
    const std::size_t k = service_labels.begin()->second.values.size();

    std::vector<double> fill(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& [id, l] : service_labels) {
            if (!l.mask[i]) continue;
            sum += l.values[i];
            ++n;
        }
        fill[i] = n ? sum / static_cast<double>(n) : 0.0;
    }
    std::map<std::string, IndicatorVector> filled;
    for (const auto& [id, l] : service_labels) {
        IndicatorVector v = l.values;
        for (std::size_t i = 0; i < k; ++i)
            if (!l.mask[i]) v[i] = fill[i];
        filled.emplace(id, std::move(v));
    }

    // usage -> sorted (service, rating) keys make the fit independent of record order.
    std::map<std::string, std::vector<std::pair<std::string, int>>> by_usage;
    for (const auto& r : dataset.ratings)
        if (filled.count(r.service_id)) by_usage[r.usage_id].emplace_back(r.service_id, r.rating);

    UsageLabelMap out;
    for (const auto& usage : dataset.usages) {
        auto it = by_usage.find(usage.id);
        if (it == by_usage.end()) throw Error(ErrorKind::UnratedUsage, "usage " + usage.id + " has no ratings");
        auto rows = it->second;
        std::sort(rows.begin(), rows.end());
        std::vector<std::pair<IndicatorVector, double>> obs;
        obs.reserve(rows.size());
        for (const auto& [service, rating] : rows) obs.emplace_back(filled.at(service), normalize_rating(rating));
        out.emplace(usage.id, fit_usage_expectation(obs, k).expectation);
    }
    return out;
}

Network train_service_model(const Dataset& dataset, const ServiceLabelMap& labels, const AttributeSchema& schema,
                            const ModelConfig& config) {
    if (labels.empty()) throw Error(ErrorKind::NoSamples, "no labeled services");
    if (schema.width() == 0) throw Error(ErrorKind::SchemaViolation, "attribute schema encodes to zero width");
    const std::size_t k = labels.begin()->second.values.size();
    std::vector<Sample> samples;
    for (const auto& [id, l] : labels) {
        const ServiceProfile* s = dataset.find_service(id);
        if (!s) throw Error(ErrorKind::DanglingReference, "labels reference unknown service " + id);
        samples.push_back({encode_service_attributes(*s, schema), unit(l.values), l.mask});
    }
    Network net = Network::create({schema.width(), config.hidden, k}, config.service_train.seed);
    train(net, samples, config.service_train);
    return net;
}

Network train_service_model(const Dataset& dataset, const IndicatorPartition& partition,
                            const AttributeSchema& schema, const ModelConfig& config) {
    return train_service_model(dataset, derive_service_indicator_labels(dataset, partition), schema, config);
}

Network train_usage_model(const Dataset& dataset, const UsageLabelMap& usage_labels,
                          const MetadataVocabulary& vocabulary, const ModelConfig& config) {
    if (vocabulary.size() == 0) throw Error(ErrorKind::EmptyInput, "metadata vocabulary is empty");
    if (usage_labels.empty()) throw Error(ErrorKind::NoSamples, "no labeled usages");
    const std::size_t k = usage_labels.begin()->second.size();
    std::vector<Sample> samples;
    for (const auto& [id, label] : usage_labels) {
        const UsageProfile* u = dataset.find_usage(id);
        if (!u) throw Error(ErrorKind::DanglingReference, "labels reference unknown usage " + id);
        samples.push_back({encode_descriptor(*u, vocabulary).as_input(), unit(label), std::vector<unsigned char>(k, 1)});
    }
    // Distinct init stream from the service model.
    Network net = Network::create({vocabulary.size(), config.hidden, k}, config.usage_train.seed + 1);
    train(net, samples, config.usage_train);
    return net;
}

TrainedModelPair train_model_pair(const Dataset& dataset, const IndicatorPartition& partition,
                                  const ModelConfig& config) {
    const auto vocabulary = build_metadata_vocabulary(dataset.usages);
    const auto service_labels = derive_service_indicator_labels(dataset, partition);

    Dataset rated = dataset;
    std::set<std::string> seen;
    for (const auto& r : dataset.ratings) seen.insert(r.usage_id);
    std::erase_if(rated.usages, [&](const UsageProfile& u) { return !seen.count(u.id); });
    const auto usage_labels = derive_usage_expectation_labels(rated, service_labels);

    return TrainedModelPair{
        train_service_model(dataset, service_labels, dataset.schema, config),
        train_usage_model(dataset, usage_labels, vocabulary, config),
        dataset.schema,
        vocabulary,
        partition.count(),
        config.service_train.seed,
    };
}

IndicatorVector predict_service_indicators(const TrainedModelPair& pair, const ServiceProfile& service) {
    return IndicatorVector(pair.service_model.forward(encode_service_attributes(service, pair.schema)));
}

IndicatorVector predict_usage_expectations(const TrainedModelPair& pair, const UsageProfile& usage) {
    return IndicatorVector(pair.usage_model.forward(encode_descriptor(usage, pair.vocabulary).as_input()));
}

} // namespace adaptrust
