#include "adaptrust/evalharness.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

#include <json.hpp>

#include "adaptrust/rng.hpp"
#include "adaptrust/trust.hpp"

namespace adaptrust {

EvaluationReport metrics(std::span<const int> predicted, std::span<const int> truth) {
    if (predicted.size() != truth.size()) throw Error(ErrorKind::LengthMismatch, "prediction and truth lengths differ");
    if (predicted.empty()) throw Error(ErrorKind::EmptyInput, "no samples to score");

    EvaluationReport r;
    r.samples = predicted.size();
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        for (int level : {predicted[i], truth[i]})
            if (level < 1 || level > static_cast<int>(kLevels))
                throw Error(ErrorKind::OutOfRange, "level " + std::to_string(level) + " outside 1..10");
        ++r.confusion[static_cast<std::size_t>(truth[i] - 1)][static_cast<std::size_t>(predicted[i] - 1)];
    }

    const double n = static_cast<double>(r.samples);
    long correct_total = 0;
    std::size_t present = 0;
    for (std::size_t l = 0; l < kLevels; ++l) {
        long actual = 0;
        long detected = 0;
        for (std::size_t j = 0; j < kLevels; ++j) {
            actual += r.confusion[l][j];
            detected += r.confusion[j][l];
        }
        const long correct = r.confusion[l][l];
        correct_total += correct;
        // true negatives: samples neither truly l nor detected as l
        const long correct_not = static_cast<long>(r.samples) - actual - detected + correct;
        r.precision[l] = detected ? static_cast<double>(correct) / detected : 0.0;
        r.recall[l] = actual ? static_cast<double>(correct) / actual : 0.0;
        const double pr = r.precision[l] + r.recall[l];
        r.f1[l] = pr > 0.0 ? 2.0 * r.precision[l] * r.recall[l] / pr : 0.0;
        r.accuracy[l] = static_cast<double>(correct + correct_not) / n;
        if (actual == 0) continue;
        ++present;
        r.macro_precision += r.precision[l];
        r.macro_recall += r.recall[l];
        r.macro_f1 += r.f1[l];
        r.macro_accuracy += r.accuracy[l];
    }
    r.macro_precision /= present;
    r.macro_recall /= present;
    r.macro_f1 /= present;
    r.macro_accuracy /= present;
    r.exact_match = static_cast<double>(correct_total) / n;
    return r;
}

DatasetSplit split_dataset(const Dataset& dataset, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw Error(ErrorKind::OutOfRange, "split ratio must lie in (0,1)");
    const std::size_t n = dataset.ratings.size();
    if (n < 2) throw Error(ErrorKind::TooFewRecords, "need at least two rating records to split");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(order);
    const auto train_count =
        std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n))), 1, n - 1);

    DatasetSplit split{dataset, dataset};
    split.train.ratings.clear();
    split.test.ratings.clear();
    for (std::size_t i = 0; i < n; ++i)
        (i < train_count ? split.train : split.test).ratings.push_back(dataset.ratings[order[i]]);
    return split;
}

TrainedPipeline train_pipeline(const Dataset& dataset, const PipelineConfig& config) {
    require_valid(dataset);
    auto split = split_dataset(dataset, config.split_ratio, config.seed);
    auto detection = detect_indicator_count(split.train, config.epsilon);
    ModelConfig model = config.model;
    model.set_seed(config.seed);
    auto models = train_model_pair(split.train, detection.partition, model);
    return {std::move(split), std::move(detection), std::move(models)};
}

EvaluationReport score_pipeline(const TrainedPipeline& pipeline) {
    const Dataset& test = pipeline.split.test;
    std::vector<int> predicted;
    std::vector<int> truth;
    for (const auto& r : test.ratings) {
        const auto score = assess(pipeline.models, *test.find_service(r.service_id), *test.find_usage(r.usage_id));
        predicted.push_back(score.level);
        truth.push_back(trust_level(normalize_rating(r.rating)));
    }
    return metrics(predicted, truth);
}

EvaluationReport evaluate_pipeline(const Dataset& dataset, const PipelineConfig& config) {
    return score_pipeline(train_pipeline(dataset, config));
}

EvaluationReport score_multiuse(const TrainedPipeline& pipeline, std::span<const MultiUseRecord> items,
                                AggregationMethod method) {
    const Dataset& ds = pipeline.split.train;
    std::vector<int> predicted;
    std::vector<int> truth;
    for (const auto& item : items) {
        const ServiceProfile* service = ds.find_service(item.service_id);
        if (!service) throw Error(ErrorKind::DanglingReference, "unknown service id '" + item.service_id + "'");
        UsagePattern pattern{item.usages, std::nullopt};
        std::vector<double> durations;
        for (const auto& id : item.usages) {
            const UsageProfile* u = ds.find_usage(id);
            if (!u) throw Error(ErrorKind::DanglingReference, "unknown usage id '" + id + "'");
            durations.push_back(u->avg_duration_minutes);
        }
        if (method == AggregationMethod::Weighted) pattern.significances = usage_significance(durations);
        predicted.push_back(multi_use_trust(pipeline.models, *service, ds.usages, pattern, method).level);
        truth.push_back(trust_level(normalize_rating(item.rating)));
    }
    return metrics(predicted, truth);
}

EvaluationReport evaluate_multiuse(const Dataset& dataset, std::span<const MultiUseRecord> items,
                                   AggregationMethod method, const PipelineConfig& config) {
    return score_multiuse(train_pipeline(dataset, config), items, method);
}

std::string report_to_json(const EvaluationReport& r) {
    nlohmann::json levels = nlohmann::json::array();
    for (std::size_t l = 0; l < kLevels; ++l)
        levels.push_back({{"level", l + 1},
                          {"precision", r.precision[l]},
                          {"recall", r.recall[l]},
                          {"f1", r.f1[l]},
                          {"accuracy", r.accuracy[l]}});
    nlohmann::json j{{"format_version", kReportFormatVersion},
                     {"samples", r.samples},
                     {"macro", {{"precision", r.macro_precision},
                                {"recall", r.macro_recall},
                                {"f1", r.macro_f1},
                                {"accuracy", r.macro_accuracy}}},
                     {"exact_match", r.exact_match},
                     {"levels", std::move(levels)},
                     {"confusion", r.confusion}};
    return j.dump(2) + "\n";
}

std::string report_table(const EvaluationReport& r) {
    std::string out;
    char line[128];
    std::snprintf(line, sizeof line, "%-6s %9s %9s %9s %9s %7s\n", "level", "precision", "recall", "f1", "accuracy",
                  "actual");
    out += line;
    for (std::size_t l = 0; l < kLevels; ++l) {
        long actual = 0;
        for (auto c : r.confusion[l]) actual += c;
        std::snprintf(line, sizeof line, "%-6zu %9.4f %9.4f %9.4f %9.4f %7ld\n", l + 1, r.precision[l], r.recall[l],
                      r.f1[l], r.accuracy[l], actual);
        out += line;
    }
    std::snprintf(line, sizeof line, "%-6s %9.4f %9.4f %9.4f %9.4f %7zu\n", "macro", r.macro_precision,
                  r.macro_recall, r.macro_f1, r.macro_accuracy, r.samples);
    out += line;
    std::snprintf(line, sizeof line, "exact-match %.4f\n", r.exact_match);
    out += line;
    return out;
}

} // namespace adaptrust
