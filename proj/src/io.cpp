#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "adaptrust/synth.hpp"

namespace adaptrust {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& where, const std::string& what) {
    throw Error(ErrorKind::ParseError, where + ": " + what);
}

json parse_json(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        parse_fail(path.string(), e.what());
    }
}

template <typename T>
T field(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) parse_fail(where, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) parse_fail(where, std::string("missing field '") + key + "'");
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        parse_fail(where, std::string("field '") + key + "' has the wrong type");
    }
}

template <typename T>
T field_value(const json& value, const std::string& where) {
    try {
        return value.get<T>();
    } catch (const json::exception&) {
        parse_fail(where, "value has the wrong type");
    }
}

template <typename T>
T optional_field(const json& obj, const char* key, const std::string& where, T fallback) {
    if (!obj.contains(key)) return fallback;
    return field<T>(obj, key, where);
}

json schema_to_json(const AttributeSchema& schema) {
    json arr = json::array();
    for (const auto& a : schema.attributes) {
        json d{{"name", a.name}};
        if (a.kind == AttributeKind::Categorical) {
            d["kind"] = "categorical";
            d["categories"] = a.categories;
        } else {
            d["kind"] = "numeric";
            d["bounds"] = {a.min, a.max};
        }
        arr.push_back(std::move(d));
    }
    return arr;
}

AttributeSchema schema_from_json(const json& arr, const std::string& where) {
    if (!arr.is_array()) parse_fail(where, "schema must be an array");
    AttributeSchema schema;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string at = where + " schema[" + std::to_string(i) + "]";
        AttributeDecl d;
        d.name = field<std::string>(arr[i], "name", at);
        const auto kind = field<std::string>(arr[i], "kind", at);
        if (kind == "categorical") {
            d.kind = AttributeKind::Categorical;
            d.categories = field<std::vector<std::string>>(arr[i], "categories", at);
        } else if (kind == "numeric") {
            d.kind = AttributeKind::Numeric;
            const auto bounds = field<std::vector<double>>(arr[i], "bounds", at);
            if (bounds.size() != 2) parse_fail(at, "bounds must be [min, max]");
            d.min = bounds[0];
            d.max = bounds[1];
        } else {
            parse_fail(at, "kind must be categorical or numeric");
        }
        schema.attributes.push_back(std::move(d));
    }
    return schema;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

void check_csv_safe(const std::string& s, const char* what) {
    if (s.find_first_of(",|\n\r") != std::string::npos)
        throw Error(ErrorKind::ConfigInvalid, std::string(what) + " '" + s + "' contains a reserved character");
}

int parse_rating_field(const std::string& text, const std::string& where) {
    int value = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) parse_fail(where, "field 'rating' is not an integer: '" + text + "'");
    return value;
}

// Yields (line number, content) for non-empty data lines after checking the header.
std::vector<std::pair<std::size_t, std::string>> csv_rows(const std::string& text, const std::string& header,
                                                          const std::string& origin) {
    std::istringstream is(text);
    std::string line;
    std::size_t number = 0;
    std::vector<std::pair<std::size_t, std::string>> rows;
    bool saw_header = false;
    while (std::getline(is, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!saw_header) {
            if (number == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
            if (line != header) parse_fail(origin + " line " + std::to_string(number), "expected header '" + header + "'");
            saw_header = true;
            continue;
        }
        if (line.empty()) continue;
        rows.emplace_back(number, line);
    }
    if (!saw_header) parse_fail(origin, "empty file, expected header '" + header + "'");
    return rows;
}

json network_to_json(const Network& net) {
    json weights = json::array();
    json biases = json::array();
    for (const auto& L : net.layers()) {
        weights.push_back(L.weights);
        biases.push_back(L.biases);
    }
    return json{{"format_version", kModelFormatVersion},
                {"layer_sizes", net.layer_sizes()},
                {"weights", std::move(weights)},
                {"biases", std::move(biases)},
                {"hidden_activation", activation_name(net.hidden_activation())},
                {"output_activation", activation_name(net.output_activation())},
                {"seed", net.seed()}};
}

void check_version(const json& j, const std::string& where) {
    const int version = field<int>(j, "format_version", where);
    if (version != kModelFormatVersion)
        throw Error(ErrorKind::VersionMismatch, where + ": format_version " + std::to_string(version) +
                                                    " unsupported (expected " +
                                                    std::to_string(kModelFormatVersion) + ")");
}

Network network_from_json(const json& j, const std::string& where) {
    check_version(j, where);
    const auto sizes = field<std::vector<std::size_t>>(j, "layer_sizes", where);
    const auto weights = field<std::vector<std::vector<double>>>(j, "weights", where);
    const auto biases = field<std::vector<std::vector<double>>>(j, "biases", where);
    if (sizes.size() < 2) parse_fail(where, "layer_sizes needs at least two entries");
    if (weights.size() != sizes.size() - 1 || biases.size() != sizes.size() - 1)
        parse_fail(where, "expected " + std::to_string(sizes.size() - 1) + " weight and bias arrays");
    std::vector<Layer> layers;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        Layer L{sizes[l], sizes[l + 1], weights[l], biases[l]};
        if (L.in == 0 || L.out == 0) parse_fail(where, "layer sizes must be positive");
        if (L.weights.size() != L.in * L.out)
            parse_fail(where, "layer " + std::to_string(l) + " has " + std::to_string(L.weights.size()) +
                                  " weights, expected " + std::to_string(L.in * L.out));
        if (L.biases.size() != L.out)
            parse_fail(where, "layer " + std::to_string(l) + " has " + std::to_string(L.biases.size()) +
                                  " biases, expected " + std::to_string(L.out));
        layers.push_back(std::move(L));
    }
    try {
        return Network(std::move(layers), activation_from_name(field<std::string>(j, "hidden_activation", where)),
                       activation_from_name(field<std::string>(j, "output_activation", where)),
                       field<std::uint64_t>(j, "seed", where));
    } catch (const Error& e) {
        parse_fail(where, e.what());
    }
}

} // namespace

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

DatasetPaths DatasetPaths::in_directory(const std::filesystem::path& dir) {
    return {dir / "ratings.csv", dir / "services.json", dir / "usages.json"};
}

std::vector<RatingRecord> parse_ratings_csv(const std::string& text, const std::string& origin) {
    std::vector<RatingRecord> out;
    for (const auto& [number, line] : csv_rows(text, "service_id,usage_id,rating", origin)) {
        const std::string where = origin + " line " + std::to_string(number);
        const auto cols = split(line, ',');
        if (cols.size() != 3) parse_fail(where, "expected 3 fields, got " + std::to_string(cols.size()));
        if (cols[0].empty()) parse_fail(where, "field 'service_id' is empty");
        if (cols[1].empty()) parse_fail(where, "field 'usage_id' is empty");
        out.push_back({cols[0], cols[1], parse_rating_field(cols[2], where)});
    }
    return out;
}

std::string format_ratings_csv(const std::vector<RatingRecord>& ratings) {
    std::string out = "service_id,usage_id,rating\n";
    for (const auto& r : ratings) {
        check_csv_safe(r.service_id, "service id");
        check_csv_safe(r.usage_id, "usage id");
        out += r.service_id + ',' + r.usage_id + ',' + std::to_string(r.rating) + '\n';
    }
    return out;
}

Dataset load_profiles(const std::filesystem::path& services_path, const std::filesystem::path& usages_path) {
    Dataset ds;
    const std::string sw = services_path.string();
    const json services = parse_json(services_path);
    ds.schema = schema_from_json(field<json>(services, "schema", sw), sw);
    const auto list = field<json>(services, "services", sw);
    if (!list.is_array()) parse_fail(sw, "'services' must be an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string at = sw + " services[" + std::to_string(i) + "]";
        const json& j = list[i];
        ServiceProfile s;
        s.id = field<std::string>(j, "id", at);
        s.owner = optional_field<std::string>(j, "owner", at, "");
        s.device = optional_field<std::string>(j, "device", at, "");
        s.functions = optional_field<std::vector<std::string>>(j, "functions", at, {});
        s.qos = optional_field<std::map<std::string, double>>(j, "qos", at, {});
        const auto attrs = field<json>(j, "attributes", at);
        if (!attrs.is_object()) parse_fail(at, "'attributes' must be an object");
        for (const auto& [name, value] : attrs.items()) {
            if (value.is_string()) s.attributes[name] = value.get<std::string>();
            else if (value.is_number()) s.attributes[name] = value.get<double>();
            else parse_fail(at, "attribute '" + name + "' must be a string or number");
        }
        ds.services.push_back(std::move(s));
    }

    const std::string uw = usages_path.string();
    const json usages = parse_json(usages_path);
    if (!usages.is_array()) parse_fail(uw, "expected an array of usages");
    for (std::size_t i = 0; i < usages.size(); ++i) {
        const std::string at = uw + " [" + std::to_string(i) + "]";
        UsageProfile u;
        u.id = field<std::string>(usages[i], "id", at);
        const auto words = field<std::vector<std::string>>(usages[i], "metadata", at);
        u.metadata = {words.begin(), words.end()};
        u.avg_duration_minutes = field<double>(usages[i], "avg_duration_minutes", at);
        ds.usages.push_back(std::move(u));
    }
    require_valid(ds);
    return ds;
}

Dataset load_dataset(const DatasetPaths& paths) {
    Dataset ds = load_profiles(paths.services, paths.usages);
    ds.ratings = parse_ratings_csv(read_text_file(paths.ratings), paths.ratings.string());
    require_valid(ds);
    return ds;
}

void save_profiles(const Dataset& dataset, const std::filesystem::path& services_path,
                   const std::filesystem::path& usages_path) {
    json services{{"schema", schema_to_json(dataset.schema)}, {"services", json::array()}};
    for (const auto& s : dataset.services) {
        json attrs = json::object();
        for (const auto& [name, value] : s.attributes) {
            if (const auto* str = std::get_if<std::string>(&value)) attrs[name] = *str;
            else attrs[name] = std::get<double>(value);
        }
        services["services"].push_back(json{{"id", s.id},
                                            {"owner", s.owner},
                                            {"device", s.device},
                                            {"functions", s.functions},
                                            {"qos", s.qos},
                                            {"attributes", std::move(attrs)}});
    }
    json usages = json::array();
    for (const auto& u : dataset.usages)
        usages.push_back(json{{"id", u.id},
                              {"metadata", std::vector<std::string>(u.metadata.begin(), u.metadata.end())},
                              {"avg_duration_minutes", u.avg_duration_minutes}});

    write_text_file(services_path, services.dump(2) + "\n");
    write_text_file(usages_path, usages.dump(2) + "\n");
}

void save_dataset(const Dataset& dataset, const DatasetPaths& paths) {
    save_profiles(dataset, paths.services, paths.usages);
    write_text_file(paths.ratings, format_ratings_csv(dataset.ratings));
}

std::vector<MultiUseRecord> load_multiuse(const std::filesystem::path& path) {
    const std::string origin = path.string();
    std::vector<MultiUseRecord> out;
    for (const auto& [number, line] : csv_rows(read_text_file(path), "service_id,pattern,rating", origin)) {
        const std::string where = origin + " line " + std::to_string(number);
        const auto cols = split(line, ',');
        if (cols.size() != 3) parse_fail(where, "expected 3 fields, got " + std::to_string(cols.size()));
        MultiUseRecord rec{cols[0], split(cols[1], '|'), parse_rating_field(cols[2], where)};
        if (rec.service_id.empty()) parse_fail(where, "field 'service_id' is empty");
        if (rec.usages.empty()) parse_fail(where, "field 'pattern' is empty");
        for (const auto& u : rec.usages)
            if (u.empty()) parse_fail(where, "field 'pattern' has an empty usage id");
        out.push_back(std::move(rec));
    }
    return out;
}

void save_multiuse(const std::vector<MultiUseRecord>& records, const std::filesystem::path& path) {
    std::string out = "service_id,pattern,rating\n";
    for (const auto& r : records) {
        check_csv_safe(r.service_id, "service id");
        out += r.service_id + ',';
        for (std::size_t i = 0; i < r.usages.size(); ++i) {
            check_csv_safe(r.usages[i], "usage id");
            out += (i ? "|" : "") + r.usages[i];
        }
        out += ',' + std::to_string(r.rating) + '\n';
    }
    write_text_file(path, out);
}

void save_ground_truth(const GroundTruth& truth, const std::filesystem::path& path) {
    json services = json::object();
    for (const auto& [id, v] : truth.service_vectors) services[id] = v.values;
    json usages = json::object();
    for (const auto& [id, v] : truth.usage_expectations)
        usages[id] = json{{"expectation", v.values},
                          {"block", truth.usage_block.at(id)},
                          {"avg_duration_minutes", truth.usage_duration.at(id)}};
    write_text_file(path, json{{"services", services}, {"usages", usages}}.dump(2) + "\n");
}

GroundTruth load_ground_truth(const std::filesystem::path& path) {
    const std::string where = path.string();
    const json j = parse_json(path);
    GroundTruth truth;
    const json services = field<json>(j, "services", where);
    const json usages = field<json>(j, "usages", where);
    if (!services.is_object() || !usages.is_object()) parse_fail(where, "'services' and 'usages' must be objects");
    for (const auto& [id, v] : services.items())
        truth.service_vectors[id] = IndicatorVector(field_value<std::vector<double>>(v, where + " services." + id));
    for (const auto& [id, v] : usages.items()) {
        const std::string at = where + " usages." + id;
        truth.usage_expectations[id] = IndicatorVector(field<std::vector<double>>(v, "expectation", at));
        truth.usage_block[id] = field<std::size_t>(v, "block", at);
        truth.usage_duration[id] = field<double>(v, "avg_duration_minutes", at);
    }
    return truth;
}

void save_model_pair(const TrainedModelPair& pair, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::IoError, "cannot create " + dir.string() + ": " + ec.message());
    const json meta{{"format_version", kModelFormatVersion},
                    {"indicator_count", pair.indicator_count},
                    {"seed", pair.seed},
                    {"vocabulary", pair.vocabulary.words},
                    {"schema", schema_to_json(pair.schema)}};
    write_text_file(dir / "meta.json", meta.dump(2) + "\n");
    write_text_file(dir / "service_model.json", network_to_json(pair.service_model).dump() + "\n");
    write_text_file(dir / "usage_model.json", network_to_json(pair.usage_model).dump() + "\n");
}

TrainedModelPair load_model_pair(const std::filesystem::path& dir) {
    const std::string mw = (dir / "meta.json").string();
    const json meta = parse_json(dir / "meta.json");
    check_version(meta, mw);
    const auto indicator_count = field<std::size_t>(meta, "indicator_count", mw);
    const auto seed = field<std::uint64_t>(meta, "seed", mw);
    MetadataVocabulary vocabulary{field<std::vector<std::string>>(meta, "vocabulary", mw)};
    for (std::size_t i = 1; i < vocabulary.words.size(); ++i)
        if (!(vocabulary.words[i - 1] < vocabulary.words[i])) parse_fail(mw + ": vocabulary", "words must be sorted and distinct");
    AttributeSchema schema = schema_from_json(field<json>(meta, "schema", mw), mw);

    const std::string sw = (dir / "service_model.json").string();
    const std::string uw = (dir / "usage_model.json").string();
    Network service = network_from_json(parse_json(dir / "service_model.json"), sw);
    Network usage = network_from_json(parse_json(dir / "usage_model.json"), uw);

    if (service.output_size() != indicator_count || usage.output_size() != indicator_count)
        parse_fail(mw, "model output widths do not match indicator_count");
    if (service.input_size() != schema.width()) parse_fail(sw, "input width does not match the attribute schema");
    if (usage.input_size() != vocabulary.size()) parse_fail(uw, "input width does not match the vocabulary");
    return TrainedModelPair{std::move(service), std::move(usage), std::move(schema), std::move(vocabulary),
                            indicator_count, seed};
}

} // namespace adaptrust
