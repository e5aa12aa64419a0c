#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace svmer {

/// Binary class label. +1 is the positive (higher-risk) class throughout.
enum class Label : int { negative = -1, positive = 1 };

[[nodiscard]] constexpr int to_int(Label l) noexcept { return static_cast<int>(l); }
[[nodiscard]] constexpr double to_real(Label l) noexcept { return static_cast<double>(l); }
[[nodiscard]] Label label_from_int(int value);

struct Sample {
    std::vector<double> features;
    Label label = Label::positive;
};

/**
 * @brief An ordered collection of labelled samples sharing one feature arity.
 *
 * Construction validates that every sample has exactly @c feature_count finite features.
 * Instances are immutable afterwards.
 */
class Dataset {
  public:
    Dataset() = default;
    Dataset(std::string name, std::size_t feature_count, std::vector<Sample> samples);

    [[nodiscard]] const std::string &name() const noexcept { return name_; }
    [[nodiscard]] std::size_t feature_count() const noexcept { return feature_count_; }
    [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }
    [[nodiscard]] bool empty() const noexcept { return samples_.empty(); }
    [[nodiscard]] const std::vector<Sample> &samples() const noexcept { return samples_; }
    [[nodiscard]] const Sample &operator[](std::size_t i) const { return samples_[i]; }

    [[nodiscard]] std::size_t count(Label l) const noexcept;
    [[nodiscard]] bool has_both_classes() const noexcept;
    [[nodiscard]] std::vector<Label> labels() const;

    /// Subset in the given index order.
    [[nodiscard]] Dataset select(std::span<const std::size_t> indices, std::string name) const;

  private:
    std::string name_;
    std::size_t feature_count_ = 0;
    std::vector<Sample> samples_;
};

enum class MissingPolicy { drop_row, impute_mean };

/// Column layout of a delimited text file.
struct CsvSchema {
    std::string name = "dataset";
    bool header = false;
    /// Label column; negative values count from the end (-1 is the last column).
    int label_column = -1;
    /// Raw label text to class. Several raw values may map to the same class.
    std::map<std::string, Label> label_map;
    /// Columns (0-based, before label removal) skipped entirely, e.g. record ids.
    std::vector<std::size_t> ignore_columns;
    std::string missing_token = "?";
    MissingPolicy missing = MissingPolicy::drop_row;
};

[[nodiscard]] CsvSchema schema_from_json(const nlohmann::json &j);
[[nodiscard]] nlohmann::json schema_to_json(const CsvSchema &schema);
[[nodiscard]] CsvSchema load_schema(const std::filesystem::path &path);

/// Parse CSV text. Row order is preserved. Errors name the 1-based line.
[[nodiscard]] Dataset parse_csv(std::istream &in, const CsvSchema &schema);
[[nodiscard]] Dataset load_csv(const std::filesystem::path &path, const CsvSchema &schema);

/// Parse unlabelled feature rows (one vector per non-empty line).
[[nodiscard]] std::vector<std::vector<double>> parse_feature_rows(std::istream &in, bool header);
[[nodiscard]] std::vector<std::vector<double>> load_feature_rows(const std::filesystem::path &path, bool header);

enum class ScalingMode { none, min_max, z_score };

[[nodiscard]] ScalingMode scaling_mode_from_string(const std::string &text);
[[nodiscard]] std::string to_string(ScalingMode mode);

/// Per-feature affine transform x' = (x - location) / spread.
struct ScalingParams {
    ScalingMode mode = ScalingMode::min_max;
    std::vector<double> location;
    std::vector<double> spread;

    [[nodiscard]] std::size_t feature_count() const noexcept { return location.size(); }
};

[[nodiscard]] nlohmann::json scaling_to_json(const ScalingParams &p);
[[nodiscard]] ScalingParams scaling_from_json(const nlohmann::json &j);

/// Constant columns get spread 1 so they map to 0.
[[nodiscard]] ScalingParams fit_scaling(const Dataset &ds, ScalingMode mode);
[[nodiscard]] Dataset apply_scaling(const Dataset &ds, const ScalingParams &p);
[[nodiscard]] std::vector<double> apply_scaling(std::span<const double> features, const ScalingParams &p);

struct SplitSpec {
    std::size_t train_count = 0;
    std::size_t test_count = 0;
    std::uint64_t seed = 0;
    bool stratified = true;
};

struct SplitResult {
    Dataset train;
    Dataset test;
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
};

/// Seeded shuffle followed by a prefix split. Stratified mode keeps each class within one
/// sample of its proportional share in both parts.
[[nodiscard]] SplitResult split(const Dataset &ds, const SplitSpec &spec);

/// Fisher-Yates permutation of 0..n-1 driven by a 64-bit Mersenne Twister.
/// Uses its own bounded draw so the result is identical across standard libraries.
[[nodiscard]] std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

}  // namespace svmer
