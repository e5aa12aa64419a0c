#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "svmer/data.hpp"
#include "svmer/kernels.hpp"

namespace svmer {

struct TrainConfig {
    double penalty = 1.0;         ///< box bound D on every dual weight
    double learning_rate = 1.0;   ///< step size on each coordinate update
    double tolerance = 1e-6;      ///< converged once an epoch moves no weight by more than this
    int max_epochs = 1000;
    std::uint64_t seed = 0;       ///< carried for provenance; the sweep itself is deterministic
    bool fit_bias = false;        ///< post-hoc threshold chosen for training accuracy

    void validate() const;
};

[[nodiscard]] nlohmann::json train_config_to_json(const TrainConfig &cfg);
[[nodiscard]] TrainConfig train_config_from_json(const nlohmann::json &j, TrainConfig defaults = {});

struct EpochRecord {
    int epoch = 0;
    double max_update = 0.0;   ///< max_j |pi_j(after) - pi_j(before)|
    std::size_t clipped = 0;   ///< updates that hit 0 or D
    std::chrono::nanoseconds elapsed{ 0 };  ///< cumulative since training started
    double min_weight = 0.0;
    double max_weight = 0.0;
};

struct TrainTrace {
    std::vector<EpochRecord> epochs;
    bool converged = false;
    std::uint64_t kernel_evaluations = 0;
};

/**
 * @brief Trained dual-form classifier f(a) = sum_j pi_j b_j K(a_j, a) + bias.
 *
 * Holds every training sample (zero-weight ones included) so the geometric margin and
 * the serialised form stay exact. Optional scaling parameters are applied by callers that
 * feed raw features; decision_value() itself expects already-scaled input.
 */
class SvmModel {
  public:
    SvmModel() = default;
    SvmModel(KernelSpec kernel, double penalty, std::vector<double> dual_weights, std::vector<Label> labels, std::vector<std::vector<double>> support_samples, double bias = 0.0);

    [[nodiscard]] double decision_value(std::span<const double> a) const;
    /// Zero maps to +1.
    [[nodiscard]] Label predict(std::span<const double> a) const;
    /// 2 / |v| with |v|^2 = sum_ij pi_i pi_j b_i b_j K(a_i, a_j).
    [[nodiscard]] double geometric_margin() const;
    [[nodiscard]] double weight_norm_squared() const;

    [[nodiscard]] const KernelSpec &kernel() const noexcept { return kernel_; }
    [[nodiscard]] double penalty() const noexcept { return penalty_; }
    [[nodiscard]] double bias() const noexcept { return bias_; }
    [[nodiscard]] const std::vector<double> &dual_weights() const noexcept { return dual_weights_; }
    [[nodiscard]] const std::vector<Label> &labels() const noexcept { return labels_; }
    [[nodiscard]] const std::vector<std::vector<double>> &support_samples() const noexcept { return support_samples_; }
    [[nodiscard]] std::size_t feature_count() const noexcept { return feature_count_; }
    [[nodiscard]] std::size_t support_vector_count() const noexcept;

    [[nodiscard]] const std::optional<ScalingParams> &scaling() const noexcept { return scaling_; }
    void set_scaling(ScalingParams p) { scaling_ = std::move(p); }
    void set_bias(double bias) { bias_ = bias; }

  private:
    KernelSpec kernel_ = KernelSpec::linear();
    double penalty_ = 1.0;
    double bias_ = 0.0;
    std::vector<double> dual_weights_;
    std::vector<Label> labels_;
    std::vector<std::vector<double>> support_samples_;
    std::size_t feature_count_ = 0;
    std::optional<ScalingParams> scaling_;
};

struct TrainResult {
    SvmModel model;
    TrainTrace trace;
};

/**
 * Coordinate sweep over j = 0..m-1 in index order:
 *
 *   pi_j <- clip(pi_j + eta * (1 - b_j * sum_i pi_i b_i G[i][j]), 0, D)
 *
 * repeated until an epoch changes no weight by more than the tolerance or max_epochs is hit.
 * Each coordinate sees the updates already made earlier in the same epoch.
 */
[[nodiscard]] TrainResult train(const Dataset &train_set, const KernelSpec &k, const TrainConfig &cfg);

/// Same sweep on a precomputed Gram matrix; used by train() and by oracle tests.
[[nodiscard]] std::vector<double> train_dual_weights(const GramMatrix &g, std::span<const Label> labels, const TrainConfig &cfg, TrainTrace &trace);

/// Threshold maximising training accuracy over midpoints of sorted decision values.
/// Ties prefer the candidate closest to zero. Returns the bias to add to f.
[[nodiscard]] double fit_bias_by_sweep(std::span<const double> decision_values, std::span<const Label> labels);

[[nodiscard]] nlohmann::json model_to_json(const SvmModel &m);
[[nodiscard]] SvmModel model_from_json(const nlohmann::json &j);

inline constexpr int model_format_version = 1;

}  // namespace svmer
