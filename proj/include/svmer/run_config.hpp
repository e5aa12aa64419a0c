#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "svmer/assess.hpp"
#include "svmer/data.hpp"
#include "svmer/kernels.hpp"
#include "svmer/svm.hpp"

namespace svmer {

/// Stable 64-bit FNV-1a digest of the compact JSON dump, as 16 hex digits.
[[nodiscard]] std::string config_hash(const nlohmann::json &resolved);

[[nodiscard]] nlohmann::json load_json_file(const std::filesystem::path &path);
void write_text_file(const std::filesystem::path &path, const std::string &text);

/// Everything needed to load, split, scale and fit one benchmark dataset.
struct DatasetConfig {
    std::string id;
    std::filesystem::path path;
    std::filesystem::path schema;
    std::size_t train_count = 0;
    std::size_t test_count = 0;
    bool stratified = true;
    ScalingMode scaling = ScalingMode::min_max;
    KernelSpec kernel = KernelSpec::rbf(1.0);
    TrainConfig train;
    double variance_floor = 1e-9;
};

/// Index feeding the fused assessment: "svm" uses the decision value, "nb" the posterior.
struct IndexSourceConfig {
    std::string source = "svm";
    double weight = 1.0;
};

enum class NaiveMode { gaussian_nb, pairwise_er };

struct ExperimentConfig {
    std::uint64_t seed = 42;
    std::vector<DatasetConfig> datasets;
    BeliefMapping mapping;
    std::vector<IndexSourceConfig> indexes{ IndexSourceConfig{} };
};

struct OverheadConfig {
    std::uint64_t seed = 42;
    DatasetConfig dataset;
    int iterations = 100;
    NaiveMode naive = NaiveMode::gaussian_nb;
    BeliefMapping mapping;
    std::vector<IndexSourceConfig> indexes{ IndexSourceConfig{} };
};

/// Built-in defaults for the three benchmark datasets, relative to @p data_dir.
[[nodiscard]] nlohmann::json default_experiment_json(const std::string &data_dir = "data");

/// Builds typed configs from a fully resolved JSON document (see default_experiment_json()).
[[nodiscard]] ExperimentConfig experiment_from_json(const nlohmann::json &resolved);
[[nodiscard]] DatasetConfig dataset_config_from_json(const std::string &id, const nlohmann::json &j, const std::string &data_dir);
[[nodiscard]] OverheadConfig overhead_from_json(const nlohmann::json &resolved);
[[nodiscard]] NaiveMode naive_mode_from_string(const std::string &text);
[[nodiscard]] std::string to_string(NaiveMode mode);

/// Kernel from loose CLI-style settings: only the parameters the kind uses are kept, missing
/// ones get defaults (pi 1, r 0, d 3, gamma 1).
[[nodiscard]] KernelSpec kernel_from_settings(const nlohmann::json &settings);

}  // namespace svmer
