#include "svmer/data.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>

#include "svmer/error.hpp"

namespace svmer {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string &line) {
    std::vector<std::string> fields;
    std::string::size_type start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return fields;
}

std::optional<double> parse_real(const std::string &text) {
    double value = 0.0;
    const char *first = text.data();
    const char *last = text.data() + text.size();
    if (first != last && *first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

std::string where(std::size_t line_no) {
    return "row " + std::to_string(line_no);
}

}  // namespace

Label label_from_int(int value) {
    if (value == 1) {
        return Label::positive;
    }
    if (value == -1) {
        return Label::negative;
    }
    throw data_error("label must be -1 or +1, got " + std::to_string(value));
}

Dataset::Dataset(std::string name, std::size_t feature_count, std::vector<Sample> samples) :
    name_(std::move(name)),
    feature_count_(feature_count),
    samples_(std::move(samples)) {
    if (feature_count_ == 0) {
        throw data_error("dataset '" + name_ + "': feature count must be positive");
    }
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        const auto &s = samples_[i];
        if (s.features.size() != feature_count_) {
            throw data_error("dataset '" + name_ + "': sample " + std::to_string(i) + " has " + std::to_string(s.features.size()) + " features, expected " + std::to_string(feature_count_));
        }
        if (!std::all_of(s.features.begin(), s.features.end(), [](double v) { return std::isfinite(v); })) {
            throw data_error("dataset '" + name_ + "': sample " + std::to_string(i) + " has a non-finite feature");
        }
        if (s.label != Label::positive && s.label != Label::negative) {
            throw data_error("dataset '" + name_ + "': sample " + std::to_string(i) + " has an invalid label");
        }
    }
}

std::size_t Dataset::count(Label l) const noexcept {
    return static_cast<std::size_t>(std::count_if(samples_.begin(), samples_.end(), [l](const Sample &s) { return s.label == l; }));
}

bool Dataset::has_both_classes() const noexcept {
    return count(Label::positive) > 0 && count(Label::negative) > 0;
}

std::vector<Label> Dataset::labels() const {
    std::vector<Label> out;
    out.reserve(samples_.size());
    for (const auto &s : samples_) {
        out.push_back(s.label);
    }
    return out;
}

Dataset Dataset::select(std::span<const std::size_t> indices, std::string name) const {
    std::vector<Sample> picked;
    picked.reserve(indices.size());
    for (const auto i : indices) {
        picked.push_back(samples_.at(i));
    }
    return Dataset(std::move(name), feature_count_, std::move(picked));
}

// ---------------------------------------------------------------------------------------------
// schema

CsvSchema schema_from_json(const nlohmann::json &j) {
    CsvSchema s;
    try {
        s.name = j.value("name", s.name);
        s.header = j.value("header", false);
        s.label_column = j.at("label_column").get<int>();
        for (const auto &[raw, value] : j.at("label_map").items()) {
            s.label_map.emplace(raw, label_from_int(value.get<int>()));
        }
        s.ignore_columns = j.value("ignore_columns", std::vector<std::size_t>{});
        s.missing_token = j.value("missing_token", s.missing_token);
        const auto policy = j.value("missing_policy", std::string("drop-row"));
        if (policy == "drop-row") {
            s.missing = MissingPolicy::drop_row;
        } else if (policy == "impute-mean") {
            s.missing = MissingPolicy::impute_mean;
        } else {
            throw config_error("unknown missing_policy '" + policy + "' (valid: drop-row, impute-mean)");
        }
    } catch (const nlohmann::json::exception &e) {
        throw config_error(std::string("invalid CSV schema: ") + e.what());
    } catch (const data_error &e) {
        throw config_error(std::string("invalid CSV schema label_map: ") + e.what());
    }
    if (s.label_map.empty()) {
        throw config_error("CSV schema label_map is empty");
    }
    return s;
}

nlohmann::json schema_to_json(const CsvSchema &s) {
    nlohmann::json labels = nlohmann::json::object();
    for (const auto &[raw, l] : s.label_map) {
        labels[raw] = to_int(l);
    }
    return {
        { "name", s.name },
        { "header", s.header },
        { "label_column", s.label_column },
        { "label_map", labels },
        { "ignore_columns", s.ignore_columns },
        { "missing_token", s.missing_token },
        { "missing_policy", s.missing == MissingPolicy::drop_row ? "drop-row" : "impute-mean" },
    };
}

CsvSchema load_schema(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw io_error("cannot open schema file " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception &e) {
        throw config_error("schema file " + path.string() + ": " + e.what());
    }
    return schema_from_json(j);
}

// ---------------------------------------------------------------------------------------------
// CSV

Dataset parse_csv(std::istream &in, const CsvSchema &schema) {
    struct RawRow {
        std::size_t line_no;
        std::vector<std::optional<double>> values;
        Label label;
    };

    std::vector<RawRow> rows;
    std::optional<std::size_t> arity;
    std::string line;
    std::size_t line_no = 0;
    bool header_pending = schema.header;

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        if (header_pending) {
            header_pending = false;
            continue;
        }
        const auto fields = split_fields(line);
        if (!arity) {
            arity = fields.size();
        } else if (fields.size() != *arity) {
            throw data_error(where(line_no) + ": expected " + std::to_string(*arity) + " columns, found " + std::to_string(fields.size()));
        }
        const auto n = static_cast<int>(fields.size());
        const int label_col = schema.label_column < 0 ? n + schema.label_column : schema.label_column;
        if (label_col < 0 || label_col >= n) {
            throw data_error(where(line_no) + ": label column " + std::to_string(schema.label_column) + " out of range for " + std::to_string(n) + " columns");
        }

        const auto &raw_label = fields[static_cast<std::size_t>(label_col)];
        if (raw_label == schema.missing_token || raw_label.empty()) {
            continue;  // a row without a label cannot be imputed
        }
        const auto mapped = schema.label_map.find(raw_label);
        if (mapped == schema.label_map.end()) {
            throw data_error(where(line_no) + ": unknown label value '" + raw_label + "'");
        }

        RawRow row{ line_no, {}, mapped->second };
        for (int c = 0; c < n; ++c) {
            const auto col = static_cast<std::size_t>(c);
            if (c == label_col || std::find(schema.ignore_columns.begin(), schema.ignore_columns.end(), col) != schema.ignore_columns.end()) {
                continue;
            }
            const auto &field = fields[col];
            if (field == schema.missing_token || field.empty()) {
                row.values.emplace_back(std::nullopt);
                continue;
            }
            const auto value = parse_real(field);
            if (!value) {
                throw data_error(where(line_no) + ", column " + std::to_string(c) + ": cannot parse '" + field + "' as a number");
            }
            row.values.emplace_back(*value);
        }
        rows.push_back(std::move(row));
    }

    if (rows.empty()) {
        throw data_error("dataset '" + schema.name + "': no data rows");
    }
    const std::size_t feature_count = rows.front().values.size();

    std::vector<double> column_mean(feature_count, 0.0);
    if (schema.missing == MissingPolicy::impute_mean) {
        std::vector<std::size_t> seen(feature_count, 0);
        for (const auto &r : rows) {
            for (std::size_t f = 0; f < feature_count; ++f) {
                if (r.values[f]) {
                    column_mean[f] += *r.values[f];
                    ++seen[f];
                }
            }
        }
        for (std::size_t f = 0; f < feature_count; ++f) {
            if (seen[f] == 0) {
                throw data_error("dataset '" + schema.name + "': column " + std::to_string(f) + " has no values to impute from");
            }
            column_mean[f] /= static_cast<double>(seen[f]);
        }
    }

    std::vector<Sample> samples;
    samples.reserve(rows.size());
    for (auto &r : rows) {
        const bool incomplete = std::any_of(r.values.begin(), r.values.end(), [](const auto &v) { return !v.has_value(); });
        if (incomplete && schema.missing == MissingPolicy::drop_row) {
            continue;
        }
        Sample s;
        s.label = r.label;
        s.features.reserve(feature_count);
        for (std::size_t f = 0; f < feature_count; ++f) {
            s.features.push_back(r.values[f].value_or(column_mean[f]));
        }
        samples.push_back(std::move(s));
    }
    if (samples.empty()) {
        throw data_error("dataset '" + schema.name + "': every row has missing values");
    }
    return Dataset(schema.name, feature_count, std::move(samples));
}

Dataset load_csv(const std::filesystem::path &path, const CsvSchema &schema) {
    std::ifstream in(path);
    if (!in) {
        throw io_error("cannot open dataset file " + path.string());
    }
    return parse_csv(in, schema);
}

std::vector<std::vector<double>> parse_feature_rows(std::istream &in, bool header) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    bool header_pending = header;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        if (header_pending) {
            header_pending = false;
            continue;
        }
        std::vector<double> row;
        for (const auto &field : split_fields(line)) {
            const auto value = parse_real(field);
            if (!value) {
                throw data_error(where(line_no) + ": cannot parse '" + field + "' as a number");
            }
            row.push_back(*value);
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw data_error(where(line_no) + ": expected " + std::to_string(rows.front().size()) + " columns, found " + std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<std::vector<double>> load_feature_rows(const std::filesystem::path &path, bool header) {
    std::ifstream in(path);
    if (!in) {
        throw io_error("cannot open input file " + path.string());
    }
    return parse_feature_rows(in, header);
}

// ---------------------------------------------------------------------------------------------
// scaling

ScalingMode scaling_mode_from_string(const std::string &text) {
    if (text == "min-max") {
        return ScalingMode::min_max;
    }
    if (text == "z-score") {
        return ScalingMode::z_score;
    }
    if (text == "none") {
        return ScalingMode::none;
    }
    throw config_error("unknown scaling mode '" + text + "' (valid: min-max, z-score, none)");
}

std::string to_string(ScalingMode mode) {
    switch (mode) {
        case ScalingMode::none:
            return "none";
        case ScalingMode::min_max:
            return "min-max";
        case ScalingMode::z_score:
            return "z-score";
    }
    return "none";
}

nlohmann::json scaling_to_json(const ScalingParams &p) {
    return { { "mode", to_string(p.mode) }, { "location", p.location }, { "spread", p.spread } };
}

ScalingParams scaling_from_json(const nlohmann::json &j) {
    ScalingParams p;
    try {
        p.mode = scaling_mode_from_string(j.at("mode").get<std::string>());
        p.location = j.at("location").get<std::vector<double>>();
        p.spread = j.at("spread").get<std::vector<double>>();
    } catch (const nlohmann::json::exception &e) {
        throw config_error(std::string("invalid scaling parameters: ") + e.what());
    }
    if (p.location.size() != p.spread.size()) {
        throw config_error("scaling parameters: location and spread lengths differ");
    }
    if (!std::all_of(p.spread.begin(), p.spread.end(), [](double s) { return s > 0.0 && std::isfinite(s); })) {
        throw config_error("scaling parameters: every spread must be positive");
    }
    return p;
}

ScalingParams fit_scaling(const Dataset &ds, ScalingMode mode) {
    if (ds.empty()) {
        throw data_error("cannot fit scaling on an empty dataset");
    }
    const std::size_t f_count = ds.feature_count();
    ScalingParams p{ mode, std::vector<double>(f_count, 0.0), std::vector<double>(f_count, 1.0) };
    if (mode == ScalingMode::none) {
        return p;
    }
    const auto n = static_cast<double>(ds.size());
    for (std::size_t f = 0; f < f_count; ++f) {
        if (mode == ScalingMode::min_max) {
            double lo = ds[0].features[f];
            double hi = lo;
            for (const auto &s : ds.samples()) {
                lo = std::min(lo, s.features[f]);
                hi = std::max(hi, s.features[f]);
            }
            p.location[f] = lo;
            p.spread[f] = hi > lo ? hi - lo : 1.0;
        } else {
            double mean = 0.0;
            for (const auto &s : ds.samples()) {
                mean += s.features[f];
            }
            mean /= n;
            double var = 0.0;
            for (const auto &s : ds.samples()) {
                var += (s.features[f] - mean) * (s.features[f] - mean);
            }
            const double sd = std::sqrt(var / n);
            p.location[f] = mean;
            p.spread[f] = sd > 0.0 ? sd : 1.0;
        }
    }
    return p;
}

std::vector<double> apply_scaling(std::span<const double> features, const ScalingParams &p) {
    if (features.size() != p.feature_count()) {
        throw data_error("scaling expects " + std::to_string(p.feature_count()) + " features, got " + std::to_string(features.size()));
    }
    std::vector<double> out(features.size());
    for (std::size_t f = 0; f < features.size(); ++f) {
        out[f] = (features[f] - p.location[f]) / p.spread[f];
    }
    return out;
}

Dataset apply_scaling(const Dataset &ds, const ScalingParams &p) {
    if (ds.feature_count() != p.feature_count()) {
        throw data_error("dataset '" + ds.name() + "' has " + std::to_string(ds.feature_count()) + " features, scaling expects " + std::to_string(p.feature_count()));
    }
    std::vector<Sample> scaled;
    scaled.reserve(ds.size());
    for (const auto &s : ds.samples()) {
        scaled.push_back({ apply_scaling(s.features, p), s.label });
    }
    return Dataset(ds.name(), ds.feature_count(), std::move(scaled));
}

// ---------------------------------------------------------------------------------------------
// split

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{ 0 });
    // uniform draw in [0, bound] by rejection; std::uniform_int_distribution is implementation-defined
    auto draw = [&rng](std::uint64_t bound) {
        const std::uint64_t range = bound + 1;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % range);
        std::uint64_t x = rng();
        while (x >= limit) {
            x = rng();
        }
        return x % range;
    };
    for (std::size_t i = n; i > 1; --i) {
        const auto j = static_cast<std::size_t>(draw(i - 1));
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

namespace {

// Largest-remainder apportionment of `total` over classes with shares `weights`, capped by `capacity`.
std::array<std::size_t, 2> apportion(std::size_t total, std::array<std::size_t, 2> weights, std::array<std::size_t, 2> capacity) {
    const double sum = static_cast<double>(weights[0] + weights[1]);
    std::array<std::size_t, 2> quota{};
    std::array<double, 2> remainder{};
    for (std::size_t c = 0; c < 2; ++c) {
        const double ideal = static_cast<double>(total) * static_cast<double>(weights[c]) / sum;
        quota[c] = std::min(static_cast<std::size_t>(std::floor(ideal)), capacity[c]);
        remainder[c] = ideal - std::floor(ideal);
    }
    std::size_t assigned = quota[0] + quota[1];
    // positive class (index 0) wins exact remainder ties
    const std::array<std::size_t, 2> order = remainder[1] > remainder[0] ? std::array<std::size_t, 2>{ 1, 0 } : std::array<std::size_t, 2>{ 0, 1 };
    for (const auto c : order) {
        if (assigned < total && quota[c] < capacity[c]) {
            ++quota[c];
            ++assigned;
        }
    }
    for (const auto c : order) {
        while (assigned < total && quota[c] < capacity[c]) {
            ++quota[c];
            ++assigned;
        }
    }
    return quota;
}

}  // namespace

SplitResult split(const Dataset &ds, const SplitSpec &spec) {
    if (spec.train_count + spec.test_count > ds.size()) {
        throw data_error("dataset '" + ds.name() + "' has " + std::to_string(ds.size()) + " usable rows, split requests " + std::to_string(spec.train_count) + " + " + std::to_string(spec.test_count));
    }
    const auto perm = seeded_permutation(ds.size(), spec.seed);
    SplitResult out;

    if (!spec.stratified) {
        out.train_indices.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(spec.train_count));
        out.test_indices.assign(perm.begin() + static_cast<std::ptrdiff_t>(spec.train_count), perm.begin() + static_cast<std::ptrdiff_t>(spec.train_count + spec.test_count));
    } else {
        const std::array<std::size_t, 2> class_size{ ds.count(Label::positive), ds.count(Label::negative) };
        const auto train_quota = apportion(spec.train_count, class_size, class_size);
        const std::array<std::size_t, 2> left{ class_size[0] - train_quota[0], class_size[1] - train_quota[1] };
        const auto test_quota = apportion(spec.test_count, class_size, left);

        std::array<std::size_t, 2> taken_train{};
        std::array<std::size_t, 2> taken_test{};
        for (const auto i : perm) {
            const std::size_t c = ds[i].label == Label::positive ? 0 : 1;
            if (taken_train[c] < train_quota[c]) {
                out.train_indices.push_back(i);
                ++taken_train[c];
            } else if (taken_test[c] < test_quota[c]) {
                out.test_indices.push_back(i);
                ++taken_test[c];
            }
        }
    }

    out.train = ds.select(out.train_indices, ds.name() + "/train");
    out.test = ds.select(out.test_indices, ds.name() + "/test");
    return out;
}

}  // namespace svmer
