#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "svmer/data.hpp"
#include "svmer/run_config.hpp"

namespace svmer {

/// Binary confusion counts with +1 as the positive class.
struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;

    [[nodiscard]] std::size_t total() const noexcept { return tp + fp + fn + tn; }
    /// Same predictions scored with -1 as the positive class.
    [[nodiscard]] ConfusionMatrix swapped() const noexcept { return { tn, fn, fp, tp }; }

    friend bool operator==(const ConfusionMatrix &, const ConfusionMatrix &) = default;
};

[[nodiscard]] ConfusionMatrix confusion(std::span<const Label> predictions, std::span<const Label> truth);

struct MetricsReport {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;
    /// Set when a zero denominator forced a metric to 0.
    bool degenerate = false;
    std::vector<std::string> warnings;
};

/// Zero denominators yield 0 and a warning instead of throwing. Requires total() > 0.
[[nodiscard]] MetricsReport metrics(const ConfusionMatrix &cm);
[[nodiscard]] nlohmann::json metrics_to_json(const MetricsReport &m, const ConfusionMatrix &cm);

/// Reference recall / precision pairs the benchmark is compared against.
struct ReferenceRow {
    const char *dataset;
    std::size_t train;
    std::size_t test;
    double svm_recall;
    double svm_precision;
    double naive_recall;
    double naive_precision;
};

[[nodiscard]] std::span<const ReferenceRow> reference_rows() noexcept;

struct ModelRun {
    ConfusionMatrix cm;
    MetricsReport metrics;
    std::int64_t train_ns = 0;
    nlohmann::json details;  ///< model-specific facts (epochs, support vectors, ...)
};

struct DatasetRun {
    DatasetConfig config;
    std::size_t rows_loaded = 0;
    std::size_t train_size = 0;
    std::size_t test_size = 0;
    ModelRun svm_er;
    ModelRun naive;
};

struct Table1Report {
    std::vector<DatasetRun> runs;
    nlohmann::json resolved_config;
};

/**
 * For each configured dataset: load, seeded split, scaling fitted on the training part,
 * then SVM-ER (SVM decision values fused through the evidential-reasoning pipeline) and
 * Gaussian naive Bayes on the identical split.
 */
[[nodiscard]] Table1Report run_table1(const ExperimentConfig &cfg, const nlohmann::json &resolved_config = nullptr);

/// Deterministic except for keys named "timing".
[[nodiscard]] nlohmann::json table1_to_json(const Table1Report &r);
[[nodiscard]] std::string format_table1(const Table1Report &r);
/// Removes every "timing" member recursively.
[[nodiscard]] nlohmann::json strip_timing(nlohmann::json j);

struct BenchmarkRecord {
    std::string method;  ///< "er" or "naive"
    int iteration = 0;
    std::int64_t cum_time_ns = 0;
    std::uint64_t cum_kernel_evals = 0;
};

/// Runs the assessment loop over the test split for iterations 1..T, alternating one ER and
/// one naive record per iteration. Single-threaded.
[[nodiscard]] std::vector<BenchmarkRecord> run_overhead(const OverheadConfig &cfg);
[[nodiscard]] std::string overhead_csv(std::span<const BenchmarkRecord> records);

/// Loaded, split and scaled data for one dataset config.
struct PreparedData {
    std::size_t rows_loaded = 0;
    Dataset train;
    Dataset test;
    ScalingParams scaling;
};

[[nodiscard]] PreparedData prepare_dataset(const DatasetConfig &cfg, std::uint64_t seed);

}  // namespace svmer
