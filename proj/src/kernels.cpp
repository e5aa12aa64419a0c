#include "svmer/kernels.hpp"

#include <cmath>
#include <numeric>

#include "svmer/error.hpp"

namespace svmer {

namespace {

thread_local std::uint64_t evaluations = 0;

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

}  // namespace

KernelKind kernel_kind_from_string(const std::string &text) {
    if (text == "linear") {
        return KernelKind::linear;
    }
    if (text == "polynomial") {
        return KernelKind::polynomial;
    }
    if (text == "rbf") {
        return KernelKind::rbf;
    }
    if (text == "sigmoid") {
        return KernelKind::sigmoid;
    }
    throw config_error("unknown kernel kind '" + text + "' (valid: linear, polynomial, rbf, sigmoid)");
}

std::string to_string(KernelKind kind) {
    switch (kind) {
        case KernelKind::linear:
            return "linear";
        case KernelKind::polynomial:
            return "polynomial";
        case KernelKind::rbf:
            return "rbf";
        case KernelKind::sigmoid:
            return "sigmoid";
    }
    return "linear";
}

KernelSpec KernelSpec::linear() {
    return KernelSpec{ KernelKind::linear, {}, {}, {}, {} };
}

KernelSpec KernelSpec::polynomial(double scale, double offset, int degree) {
    KernelSpec k{ KernelKind::polynomial, scale, offset, degree, {} };
    k.validate();
    return k;
}

KernelSpec KernelSpec::rbf(double gamma) {
    KernelSpec k{ KernelKind::rbf, {}, {}, {}, gamma };
    k.validate();
    return k;
}

KernelSpec KernelSpec::sigmoid(double scale, double offset) {
    KernelSpec k{ KernelKind::sigmoid, scale, offset, {}, {} };
    k.validate();
    return k;
}

void KernelSpec::validate() const {
    const std::string name = to_string(kind);
    const bool wants_scale = kind == KernelKind::polynomial || kind == KernelKind::sigmoid;
    const bool wants_offset = wants_scale;
    const bool wants_degree = kind == KernelKind::polynomial;
    const bool wants_gamma = kind == KernelKind::rbf;

    auto check = [&name](bool wanted, bool present, const char *param) {
        if (wanted && !present) {
            throw config_error(name + " kernel requires parameter '" + param + "'");
        }
        if (!wanted && present) {
            throw config_error(name + " kernel does not take parameter '" + param + "'");
        }
    };
    check(wants_scale, scale.has_value(), "pi");
    check(wants_offset, offset.has_value(), "r");
    check(wants_degree, degree.has_value(), "d");
    check(wants_gamma, gamma.has_value(), "gamma");

    if (scale && !(*scale > 0.0 && std::isfinite(*scale))) {
        throw config_error(name + " kernel: pi must be > 0");
    }
    if (offset && !std::isfinite(*offset)) {
        throw config_error(name + " kernel: r must be finite");
    }
    if (degree && *degree < 1) {
        throw config_error(name + " kernel: d must be a positive integer");
    }
    if (gamma && !(*gamma > 0.0 && std::isfinite(*gamma))) {
        throw config_error(name + " kernel: gamma must be > 0");
    }
}

nlohmann::json kernel_to_json(const KernelSpec &k) {
    nlohmann::json j{ { "kind", to_string(k.kind) } };
    if (k.scale) {
        j["pi"] = *k.scale;
    }
    if (k.offset) {
        j["r"] = *k.offset;
    }
    if (k.degree) {
        j["d"] = *k.degree;
    }
    if (k.gamma) {
        j["gamma"] = *k.gamma;
    }
    return j;
}

KernelSpec kernel_from_json(const nlohmann::json &j) {
    KernelSpec k;
    try {
        k.kind = kernel_kind_from_string(j.at("kind").get<std::string>());
        for (const auto &[key, value] : j.items()) {
            if (value.is_null() || key == "kind") {
                continue;
            }
            if (key == "pi") {
                k.scale = value.get<double>();
            } else if (key == "r") {
                k.offset = value.get<double>();
            } else if (key == "d") {
                k.degree = value.get<int>();
            } else if (key == "gamma") {
                k.gamma = value.get<double>();
            } else {
                throw config_error("unknown kernel field '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception &e) {
        throw config_error(std::string("invalid kernel spec: ") + e.what());
    }
    k.validate();
    return k;
}

double eval_kernel(const KernelSpec &k, std::span<const double> a, std::span<const double> a2) {
    if (a.size() != a2.size()) {
        throw data_error("kernel arguments differ in length (" + std::to_string(a.size()) + " vs " + std::to_string(a2.size()) + ")");
    }
    ++evaluations;
    double value = 0.0;
    switch (k.kind) {
        case KernelKind::linear:
            value = dot(a, a2);
            break;
        case KernelKind::polynomial:
            value = std::pow(*k.scale * dot(a, a2) + *k.offset, *k.degree);
            break;
        case KernelKind::rbf:
            value = std::exp(-*k.gamma * squared_distance(a, a2));
            break;
        case KernelKind::sigmoid:
            value = std::tanh(*k.scale * dot(a, a2) + *k.offset);
            break;
    }
    if (!std::isfinite(value)) {
        throw numeric_error(to_string(k.kind) + " kernel produced a non-finite value");
    }
    return value;
}

std::uint64_t kernel_evaluation_count() noexcept {
    return evaluations;
}

void reset_kernel_evaluation_count() noexcept {
    evaluations = 0;
}

GramMatrix::GramMatrix(KernelSpec kernel, std::size_t size, std::vector<double> entries, std::vector<std::size_t> sample_ids) :
    kernel_(std::move(kernel)),
    size_(size),
    entries_(std::move(entries)),
    sample_ids_(std::move(sample_ids)) {
    if (entries_.size() != size_ * size_ || sample_ids_.size() != size_) {
        throw data_error("Gram matrix storage does not match its size");
    }
}

GramMatrix gram_matrix(const KernelSpec &k, std::span<const std::vector<double>> points) {
    k.validate();
    const std::size_t m = points.size();
    if (m == 0) {
        throw data_error("Gram matrix of an empty sample list");
    }
    std::vector<double> entries(m * m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
            double v = 0.0;
            try {
                v = eval_kernel(k, points[i], points[j]);
            } catch (const error &e) {
                throw numeric_error("Gram entry (" + std::to_string(i) + ", " + std::to_string(j) + "): " + e.what());
            }
            entries[i * m + j] = v;
            entries[j * m + i] = v;
        }
    }
    std::vector<std::size_t> ids(m);
    std::iota(ids.begin(), ids.end(), std::size_t{ 0 });
    return GramMatrix(k, m, std::move(entries), std::move(ids));
}

GramMatrix gram_matrix(const KernelSpec &k, const Dataset &ds) {
    std::vector<std::vector<double>> points;
    points.reserve(ds.size());
    for (const auto &s : ds.samples()) {
        points.push_back(s.features);
    }
    return gram_matrix(k, points);
}

}  // namespace svmer
