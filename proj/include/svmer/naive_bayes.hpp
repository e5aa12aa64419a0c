#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "svmer/data.hpp"

namespace svmer {

/// Two-class Gaussian naive Bayes. Index 0 holds the +1 class, index 1 the -1 class.
class GaussianNbModel {
  public:
    GaussianNbModel() = default;
    GaussianNbModel(std::array<double, 2> priors, std::array<std::vector<double>, 2> means, std::array<std::vector<double>, 2> variances, double variance_floor);

    /// log P(c) + sum_f log N(a_f; mean_cf, var_cf)
    [[nodiscard]] double log_joint(std::span<const double> a, Label c) const;
    /// Larger log joint wins; equality maps to +1.
    [[nodiscard]] Label predict(std::span<const double> a) const;
    /// Posterior P(+1 | a), computed in the log domain.
    [[nodiscard]] double positive_posterior(std::span<const double> a) const;

    [[nodiscard]] double prior(Label c) const noexcept { return priors_[slot(c)]; }
    [[nodiscard]] const std::vector<double> &means(Label c) const noexcept { return means_[slot(c)]; }
    [[nodiscard]] const std::vector<double> &variances(Label c) const noexcept { return variances_[slot(c)]; }
    [[nodiscard]] double variance_floor() const noexcept { return variance_floor_; }
    [[nodiscard]] std::size_t feature_count() const noexcept { return means_[0].size(); }

    [[nodiscard]] const std::optional<ScalingParams> &scaling() const noexcept { return scaling_; }
    void set_scaling(ScalingParams p) { scaling_ = std::move(p); }

  private:
    static constexpr std::size_t slot(Label c) noexcept { return c == Label::positive ? 0 : 1; }

    std::array<double, 2> priors_{ 0.5, 0.5 };
    std::array<std::vector<double>, 2> means_;
    std::array<std::vector<double>, 2> variances_;
    double variance_floor_ = 1e-9;
    std::optional<ScalingParams> scaling_;
};

/// Priors are class frequencies; variances are maximum-likelihood (divide by n) and floored.
[[nodiscard]] GaussianNbModel nb_fit(const Dataset &train_set, double variance_floor = 1e-9);

[[nodiscard]] nlohmann::json nb_model_to_json(const GaussianNbModel &m);
[[nodiscard]] GaussianNbModel nb_model_from_json(const nlohmann::json &j);

}  // namespace svmer
