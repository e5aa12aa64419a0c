#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "svmer/data.hpp"

namespace svmer {

enum class KernelKind { linear, polynomial, rbf, sigmoid };

[[nodiscard]] KernelKind kernel_kind_from_string(const std::string &text);
[[nodiscard]] std::string to_string(KernelKind kind);

/**
 * @brief Kernel family plus the parameters that family uses.
 *
 *   linear      a . a2
 *   polynomial  (scale * a . a2 + offset)^degree     scale > 0, degree >= 1
 *   rbf         exp(-gamma * |a - a2|^2)             gamma > 0
 *   sigmoid     tanh(scale * a . a2 + offset)        scale > 0 (not positive semidefinite)
 *
 * Parameters a family does not use stay empty; validate() enforces both directions.
 */
struct KernelSpec {
    KernelKind kind = KernelKind::rbf;
    std::optional<double> scale;   ///< serialised as "pi"
    std::optional<double> offset;  ///< serialised as "r"
    std::optional<int> degree;     ///< serialised as "d"
    std::optional<double> gamma;

    [[nodiscard]] static KernelSpec linear();
    [[nodiscard]] static KernelSpec polynomial(double scale, double offset, int degree);
    [[nodiscard]] static KernelSpec rbf(double gamma);
    [[nodiscard]] static KernelSpec sigmoid(double scale, double offset);

    void validate() const;

    friend bool operator==(const KernelSpec &, const KernelSpec &) = default;
};

[[nodiscard]] nlohmann::json kernel_to_json(const KernelSpec &k);
[[nodiscard]] KernelSpec kernel_from_json(const nlohmann::json &j);

[[nodiscard]] double eval_kernel(const KernelSpec &k, std::span<const double> a, std::span<const double> a2);

/// Kernel evaluations performed on the calling thread since the last reset.
[[nodiscard]] std::uint64_t kernel_evaluation_count() noexcept;
void reset_kernel_evaluation_count() noexcept;

/// Dense symmetric matrix of pairwise kernel values over a sample list.
class GramMatrix {
  public:
    GramMatrix(KernelSpec kernel, std::size_t size, std::vector<double> entries, std::vector<std::size_t> sample_ids);

    [[nodiscard]] std::size_t size() const noexcept { return size_; }
    [[nodiscard]] const KernelSpec &kernel() const noexcept { return kernel_; }
    [[nodiscard]] const std::vector<std::size_t> &sample_ids() const noexcept { return sample_ids_; }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept { return entries_[i * size_ + j]; }
    [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept { return { entries_.data() + i * size_, size_ }; }
    [[nodiscard]] const std::vector<double> &entries() const noexcept { return entries_; }

  private:
    KernelSpec kernel_;
    std::size_t size_;
    std::vector<double> entries_;
    std::vector<std::size_t> sample_ids_;
};

/// Upper triangle evaluated, lower triangle mirrored. Errors carry the (i, j) location.
[[nodiscard]] GramMatrix gram_matrix(const KernelSpec &k, const Dataset &ds);
[[nodiscard]] GramMatrix gram_matrix(const KernelSpec &k, std::span<const std::vector<double>> points);

}  // namespace svmer
