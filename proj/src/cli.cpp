#include "adaptrust/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "adaptrust/evalharness.hpp"
#include "adaptrust/indicators.hpp"
#include "adaptrust/multiuse.hpp"
#include "adaptrust/synth.hpp"
#include "adaptrust/trust.hpp"

namespace adaptrust::cli {

namespace fs = std::filesystem;

namespace {

// Raised for flag combinations CLI11 cannot express; exit code 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

const CLI::Validator kOpenUnit(
    [](std::string& s) -> std::string {
        double v = 0.0;
        if (!CLI::detail::lexical_cast(s, v) || !(v > 0.0 && v < 1.0)) return "value " + s + " not in (0, 1)";
        return {};
    },
    "(0,1)", "OPEN_UNIT");

const CLI::Validator kEpsilon(
    [](std::string& s) -> std::string {
        double v = 0.0;
        if (!CLI::detail::lexical_cast(s, v) || !(v > 0.0 && v <= 1.0)) return "value " + s + " not in (0, 1]";
        return {};
    },
    "(0,1]", "EPSILON");

std::string fixed(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::vector<std::string> split_list(const std::string& text, const char* flag) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        if (item.empty()) throw UsageError(std::string(flag) + ": empty item in list '" + text + "'");
        out.push_back(item);
    }
    if (out.empty()) throw UsageError(std::string(flag) + ": empty list");
    return out;
}

std::vector<double> parse_numbers(const std::string& text, const char* flag) {
    std::vector<double> out;
    for (const auto& item : split_list(text, flag)) {
        double v = 0.0;
        if (!CLI::detail::lexical_cast(item, v)) throw UsageError(std::string(flag) + ": '" + item + "' is not a number");
        out.push_back(v);
    }
    return out;
}

struct DataFlags {
    std::string ratings;
    std::string services;
    std::string usages;

    void add(CLI::App* cmd) {
        cmd->add_option("--ratings", ratings, "Ratings CSV (service_id,usage_id,rating)")->required();
        cmd->add_option("--services", services, "Service profiles and attribute schema (JSON)")->required();
        cmd->add_option("--usages", usages, "Usage profiles (JSON)")->required();
    }
    Dataset load() const { return load_dataset({ratings, services, usages}); }
};

struct TrainFlags {
    std::optional<std::size_t> epochs;
    std::optional<double> learning_rate;
    std::size_t hidden = ModelConfig{}.hidden;

    void add(CLI::App* cmd) {
        cmd->add_option("--epochs", epochs, "Training epochs for both networks (default 3000)")
            ->check(CLI::Range(std::size_t{1}, std::size_t{1000000}));
        cmd->add_option("--learning-rate", learning_rate,
                        "SGD learning rate for both networks (default 1.0 service, 0.5 usage)")
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--hidden", hidden, "Hidden units per network")
            ->capture_default_str()
            ->check(CLI::Range(std::size_t{1}, std::size_t{4096}));
    }
    ModelConfig config(std::uint64_t seed) const {
        ModelConfig m;
        m.hidden = hidden;
        for (auto* t : {&m.service_train, &m.usage_train}) {
            if (epochs) t->epochs = *epochs;
            if (learning_rate) t->learning_rate = *learning_rate;
        }
        m.set_seed(seed);
        return m;
    }
};

void print_partition(const IndicatorDetection& det, std::ostream& out) {
    out << "indicators " << det.count << "\n";
    for (std::size_t b = 0; b < det.partition.blocks.size(); ++b) {
        const auto& block = det.partition.blocks[b];
        out << "block " << b + 1 << " mean " << fixed(block.mean_rating, 4) << ":";
        for (const auto& id : block.members) out << ' ' << id;
        out << "\n";
    }
}

std::string partition_json(const IndicatorDetection& det) {
    nlohmann::json blocks = nlohmann::json::array();
    for (const auto& b : det.partition.blocks)
        blocks.push_back({{"members", std::vector<std::string>(b.members.begin(), b.members.end())},
                          {"mean_rating", b.mean_rating}});
    nlohmann::json j{{"format_version", 1},
                     {"epsilon", det.partition.epsilon},
                     {"indicator_count", det.count},
                     {"blocks", std::move(blocks)}};
    return j.dump(2) + "\n";
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Adaptive trust assessment for IoT services under one or several usages"};
    app.require_subcommand(1);
    app.fallthrough(false);

    std::uint64_t seed = 42;
    auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "Seed for every random choice")->capture_default_str();
    };

    // detect-indicators
    auto* detect = app.add_subcommand("detect-indicators", "Estimate the number of trust indicators from ratings");
    DataFlags detect_data;
    detect_data.add(detect);
    double epsilon = kDefaultEpsilon;
    detect->add_option("--epsilon", epsilon, "Rating gap (normalized) that separates usage clusters")
        ->capture_default_str()
        ->check(kEpsilon);
    std::string detect_out;
    detect->add_option("--out", detect_out, "Write the partition as JSON");

    // train
    auto* train = app.add_subcommand("train", "Detect indicators and train the service and usage models");
    DataFlags train_data;
    train_data.add(train);
    train->add_option("--epsilon", epsilon, "Rating gap for indicator detection")->capture_default_str()->check(kEpsilon);
    std::string model_dir;
    train->add_option("--model-dir", model_dir, "Output directory for the trained models")->required();
    TrainFlags train_flags;
    train_flags.add(train);
    add_seed(train);

    // assess
    auto* assess_cmd = app.add_subcommand("assess", "Trust of a service for one usage or a usage pattern");
    std::string assess_model_dir;
    assess_cmd->add_option("--model-dir", assess_model_dir, "Directory written by train")->required();
    std::string service_id;
    assess_cmd->add_option("--service-id", service_id, "Service to assess")->required();
    std::string usage_id;
    auto* usage_opt = assess_cmd->add_option("--usage-id", usage_id, "Single usage");
    std::string pattern_text;
    auto* pattern_opt = assess_cmd->add_option("--pattern", pattern_text, "Comma-separated usage ids");
    usage_opt->excludes(pattern_opt);
    std::string durations_text;
    auto* durations_opt =
        assess_cmd->add_option("--durations", durations_text, "Comma-separated average durations for --pattern");
    durations_opt->needs(pattern_opt);
    std::string aggregation = "weighted";
    assess_cmd->add_option("--aggregation", aggregation, "avg | closeness | weighted")
        ->capture_default_str()
        ->check(CLI::IsMember({"avg", "average", "closeness", "weighted"}));
    std::string assess_services;
    std::string assess_usages;
    assess_cmd->add_option("--services", assess_services, "Service profiles (default: the copy in --model-dir)");
    assess_cmd->add_option("--usages", assess_usages, "Usage profiles (default: the copy in --model-dir)");

    // generate
    auto* generate = app.add_subcommand("generate", "Write a synthetic dataset with known ground truth");
    std::string generate_out;
    generate->add_option("--out", generate_out, "Output directory")->required();
    GeneratorConfig gen;
    generate->add_option("--indicators", gen.indicator_count, "Number of trust indicators")
        ->capture_default_str()
        ->check(CLI::Range(std::size_t{1}, std::size_t{64}));
    generate->add_option("--noise", gen.noise_std, "Rating noise standard deviation on the unit scale")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    generate->add_option("--num-services", gen.num_services, "Number of services")
        ->capture_default_str()
        ->check(CLI::Range(std::size_t{1}, std::size_t{1000000}));
    generate->add_option("--num-usages", gen.num_usages, "Number of usages (at least --indicators)")
        ->capture_default_str()
        ->check(CLI::Range(std::size_t{1}, std::size_t{100000}));
    generate->add_option("--multiuse", gen.num_multiuse, "Number of multi-use items written to multiuse.csv")
        ->capture_default_str();
    generate->add_option("--pattern-size", gen.pattern_size, "Usages per multi-use item")->capture_default_str();
    generate->add_option("--off-block-max", gen.off_block_max, "Largest expectation outside a usage's own indicator")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    add_seed(generate);

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Train on a split and report per-level metrics on the rest");
    DataFlags eval_data;
    eval_data.add(evaluate);
    evaluate->add_option("--epsilon", epsilon, "Rating gap for indicator detection")
        ->capture_default_str()
        ->check(kEpsilon);
    double split = 0.8;
    evaluate->add_option("--split", split, "Fraction of rating records used for training")
        ->capture_default_str()
        ->check(kOpenUnit);
    TrainFlags eval_flags;
    eval_flags.add(evaluate);
    add_seed(evaluate);
    std::string report_out;
    evaluate->add_option("--out", report_out, "Write the report as JSON");
    std::string multiuse_path;
    auto* multiuse_opt =
        evaluate->add_option("--multiuse", multiuse_path, "Score multi-use items (multiuse.csv) instead");
    std::string eval_aggregation = "weighted";
    evaluate->add_option("--aggregation", eval_aggregation, "avg | closeness | weighted (with --multiuse)")
        ->capture_default_str()
        ->check(CLI::IsMember({"avg", "average", "closeness", "weighted"}))
        ->needs(multiuse_opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsage;
    }

    try {
        if (*detect) {
            const auto det = detect_indicator_count(detect_data.load(), epsilon);
            print_partition(det, out);
            if (!detect_out.empty()) write_text_file(detect_out, partition_json(det));
        } else if (*train) {
            const Dataset ds = train_data.load();
            const auto det = detect_indicator_count(ds, epsilon);
            const auto pair = train_model_pair(ds, det.partition, train_flags.config(seed));
            fs::create_directories(model_dir);
            save_model_pair(pair, model_dir);
            save_profiles(ds, fs::path(model_dir) / "services.json", fs::path(model_dir) / "usages.json");
            print_partition(det, out);
            out << "models written to " << model_dir << "\n";
        } else if (*assess_cmd) {
            if (usage_opt->count() == 0 && pattern_opt->count() == 0)
                throw UsageError("assess: one of --usage-id or --pattern is required");
            const fs::path dir = assess_model_dir;
            const auto pair = load_model_pair(dir);
            const Dataset profiles = load_profiles(assess_services.empty() ? dir / "services.json" : fs::path(assess_services),
                                                   assess_usages.empty() ? dir / "usages.json" : fs::path(assess_usages));
            const ServiceProfile* service = profiles.find_service(service_id);
            if (!service) throw UsageError("--service-id: unknown service '" + service_id + "'");

            TrustScore score;
            if (usage_opt->count()) {
                const UsageProfile* usage = profiles.find_usage(usage_id);
                if (!usage) throw UsageError("--usage-id: unknown usage '" + usage_id + "'");
                score = assess(pair, *service, *usage);
            } else {
                UsagePattern pattern{split_list(pattern_text, "--pattern"), std::nullopt};
                for (const auto& id : pattern.usages)
                    if (!profiles.find_usage(id)) throw UsageError("--pattern: unknown usage '" + id + "'");
                const auto method = aggregation_from_name(aggregation);
                if (method == AggregationMethod::Weighted) {
                    std::vector<double> durations;
                    if (durations_opt->count()) {
                        durations = parse_numbers(durations_text, "--durations");
                        if (durations.size() != pattern.usages.size())
                            throw UsageError("--durations: expected " + std::to_string(pattern.usages.size()) +
                                             " values, one per --pattern usage");
                        for (double d : durations)
                            if (!(d >= 0.0)) throw UsageError("--durations: values must be nonnegative");
                    } else {
                        for (const auto& id : pattern.usages)
                            durations.push_back(profiles.find_usage(id)->avg_duration_minutes);
                    }
                    pattern.significances = usage_significance(durations);
                }
                score = multi_use_trust(pair, *service, profiles.usages, pattern, method);
            }
            out << "trust " << fixed(score.value) << "\n" << "level " << score.level << "\n";
        } else if (*generate) {
            gen.seed = seed;
            const auto data = generate_dataset(gen);
            const fs::path dir = generate_out;
            fs::create_directories(dir);
            save_dataset(data.dataset, DatasetPaths::in_directory(dir));
            save_ground_truth(data.truth, dir / "ground_truth.json");
            if (!data.multiuse.empty()) save_multiuse(data.multiuse, dir / "multiuse.csv");
            out << "wrote " << data.dataset.services.size() << " services, " << data.dataset.usages.size()
                << " usages, " << data.dataset.ratings.size() << " ratings";
            if (!data.multiuse.empty()) out << ", " << data.multiuse.size() << " multi-use items";
            out << " to " << generate_out << "\n";
        } else if (*evaluate) {
            PipelineConfig config;
            config.split_ratio = split;
            config.epsilon = epsilon;
            config.seed = seed;
            config.model = eval_flags.config(seed);
            const Dataset ds = eval_data.load();
            EvaluationReport report;
            if (multiuse_opt->count()) {
                const auto items = load_multiuse(multiuse_path);
                report = evaluate_multiuse(ds, items, aggregation_from_name(eval_aggregation), config);
            } else {
                report = evaluate_pipeline(ds, config);
            }
            out << report_table(report);
            if (!report_out.empty()) write_text_file(report_out, report_to_json(report));
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::IoError ? kIo : kUsage;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kIo;
    }
    return kOk;
}

} // namespace adaptrust::cli
