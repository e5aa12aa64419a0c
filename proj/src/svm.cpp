#include "svmer/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "svmer/error.hpp"

namespace svmer {

void TrainConfig::validate() const {
    if (!(penalty > 0.0 && std::isfinite(penalty))) {
        throw config_error("penalty D must be > 0");
    }
    if (!(learning_rate > 0.0 && std::isfinite(learning_rate))) {
        throw config_error("learning rate must be > 0");
    }
    if (!(tolerance > 0.0 && std::isfinite(tolerance))) {
        throw config_error("tolerance must be > 0");
    }
    if (max_epochs < 1) {
        throw config_error("max_epochs must be >= 1");
    }
}

nlohmann::json train_config_to_json(const TrainConfig &cfg) {
    return {
        { "penalty", cfg.penalty },
        { "learning_rate", cfg.learning_rate },
        { "tolerance", cfg.tolerance },
        { "max_epochs", cfg.max_epochs },
        { "seed", cfg.seed },
        { "fit_bias", cfg.fit_bias },
    };
}

TrainConfig train_config_from_json(const nlohmann::json &j, TrainConfig cfg) {
    try {
        cfg.penalty = j.value("penalty", cfg.penalty);
        cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
        cfg.tolerance = j.value("tolerance", cfg.tolerance);
        cfg.max_epochs = j.value("max_epochs", cfg.max_epochs);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.fit_bias = j.value("fit_bias", cfg.fit_bias);
    } catch (const nlohmann::json::exception &e) {
        throw config_error(std::string("invalid training config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

// ---------------------------------------------------------------------------------------------

SvmModel::SvmModel(KernelSpec kernel, double penalty, std::vector<double> dual_weights, std::vector<Label> labels, std::vector<std::vector<double>> support_samples, double bias) :
    kernel_(std::move(kernel)),
    penalty_(penalty),
    bias_(bias),
    dual_weights_(std::move(dual_weights)),
    labels_(std::move(labels)),
    support_samples_(std::move(support_samples)) {
    kernel_.validate();
    if (!(penalty_ > 0.0)) {
        throw config_error("model penalty must be > 0");
    }
    if (dual_weights_.size() != labels_.size() || dual_weights_.size() != support_samples_.size()) {
        throw data_error("model weights, labels and samples differ in length");
    }
    if (support_samples_.empty()) {
        throw data_error("model has no training samples");
    }
    feature_count_ = support_samples_.front().size();
    for (std::size_t j = 0; j < dual_weights_.size(); ++j) {
        if (!(dual_weights_[j] >= 0.0 && dual_weights_[j] <= penalty_)) {
            throw data_error("dual weight " + std::to_string(j) + " outside [0, D]");
        }
        if (support_samples_[j].size() != feature_count_) {
            throw data_error("training sample " + std::to_string(j) + " has the wrong arity");
        }
    }
    if (!std::isfinite(bias_)) {
        throw data_error("model bias is not finite");
    }
}

double SvmModel::decision_value(std::span<const double> a) const {
    if (a.size() != feature_count_) {
        throw data_error("model expects " + std::to_string(feature_count_) + " features, got " + std::to_string(a.size()));
    }
    double f = 0.0;
    for (std::size_t j = 0; j < dual_weights_.size(); ++j) {
        if (dual_weights_[j] == 0.0) {
            continue;
        }
        f += dual_weights_[j] * to_real(labels_[j]) * eval_kernel(kernel_, support_samples_[j], a);
    }
    return f + bias_;
}

Label SvmModel::predict(std::span<const double> a) const {
    return decision_value(a) >= 0.0 ? Label::positive : Label::negative;
}

double SvmModel::weight_norm_squared() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < dual_weights_.size(); ++i) {
        if (dual_weights_[i] == 0.0) {
            continue;
        }
        for (std::size_t j = 0; j < dual_weights_.size(); ++j) {
            if (dual_weights_[j] == 0.0) {
                continue;
            }
            sum += dual_weights_[i] * dual_weights_[j] * to_real(labels_[i]) * to_real(labels_[j]) * eval_kernel(kernel_, support_samples_[i], support_samples_[j]);
        }
    }
    return sum;
}

double SvmModel::geometric_margin() const {
    if (support_vector_count() == 0) {
        throw numeric_error("geometric margin undefined: every dual weight is zero");
    }
    const double norm2 = weight_norm_squared();
    if (!(norm2 > 0.0)) {
        throw numeric_error("geometric margin undefined: |v|^2 = " + std::to_string(norm2));
    }
    return 2.0 / std::sqrt(norm2);
}

std::size_t SvmModel::support_vector_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(dual_weights_.begin(), dual_weights_.end(), [](double w) { return w > 0.0; }));
}

// ---------------------------------------------------------------------------------------------

std::vector<double> train_dual_weights(const GramMatrix &g, std::span<const Label> labels, const TrainConfig &cfg, TrainTrace &trace) {
    cfg.validate();
    const std::size_t m = g.size();
    if (labels.size() != m) {
        throw data_error("label count does not match the Gram matrix");
    }
    const bool has_pos = std::find(labels.begin(), labels.end(), Label::positive) != labels.end();
    const bool has_neg = std::find(labels.begin(), labels.end(), Label::negative) != labels.end();
    if (!has_pos || !has_neg) {
        throw data_error("training requires samples of both classes");
    }
    if (!std::all_of(g.entries().begin(), g.entries().end(), [](double v) { return std::isfinite(v); })) {
        throw numeric_error("Gram matrix has non-finite entries");
    }

    std::vector<double> b(m);
    std::transform(labels.begin(), labels.end(), b.begin(), to_real);
    std::vector<double> pi(m, 0.0);

    trace.epochs.clear();
    trace.converged = false;
    const auto start = std::chrono::steady_clock::now();

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        double max_update = 0.0;
        std::size_t clipped = 0;
        for (std::size_t j = 0; j < m; ++j) {
            const auto column = g.row(j);  // symmetric: row j == column j
            double f = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                f += pi[i] * b[i] * column[i];
            }
            double candidate = pi[j] + cfg.learning_rate * (1.0 - b[j] * f);
            if (!std::isfinite(candidate)) {
                throw numeric_error("non-finite weight update at epoch " + std::to_string(epoch) + ", sample " + std::to_string(j));
            }
            if (candidate > cfg.penalty) {
                candidate = cfg.penalty;
                ++clipped;
            }
            if (candidate < 0.0) {
                candidate = 0.0;
                ++clipped;
            }
            max_update = std::max(max_update, std::abs(candidate - pi[j]));
            pi[j] = candidate;
        }
        const auto [lo, hi] = std::minmax_element(pi.begin(), pi.end());
        trace.epochs.push_back({ epoch, max_update, clipped, std::chrono::steady_clock::now() - start, *lo, *hi });
        if (max_update <= cfg.tolerance) {
            trace.converged = true;
            break;
        }
    }
    return pi;
}

double fit_bias_by_sweep(std::span<const double> decision_values, std::span<const Label> labels) {
    if (decision_values.size() != labels.size() || decision_values.empty()) {
        throw data_error("bias sweep needs one label per decision value");
    }
    std::vector<double> sorted(decision_values.begin(), decision_values.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    std::vector<double> thresholds{ 0.0, sorted.front() - 1.0, sorted.back() + 1.0 };
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        thresholds.push_back(0.5 * (sorted[i - 1] + sorted[i]));
    }

    double best_t = 0.0;
    std::size_t best_correct = 0;
    bool first = true;
    for (const double t : thresholds) {
        std::size_t correct = 0;
        for (std::size_t i = 0; i < decision_values.size(); ++i) {
            const Label predicted = decision_values[i] >= t ? Label::positive : Label::negative;
            correct += predicted == labels[i] ? 1 : 0;
        }
        if (first || correct > best_correct || (correct == best_correct && std::abs(t) < std::abs(best_t))) {
            best_t = t;
            best_correct = correct;
            first = false;
        }
    }
    return -best_t;
}

TrainResult train(const Dataset &train_set, const KernelSpec &k, const TrainConfig &cfg) {
    cfg.validate();
    k.validate();
    if (!train_set.has_both_classes()) {
        throw data_error("dataset '" + train_set.name() + "' must contain both classes for training");
    }
    const auto evals_before = kernel_evaluation_count();
    const GramMatrix g = gram_matrix(k, train_set);
    const auto labels = train_set.labels();

    TrainResult result;
    auto pi = train_dual_weights(g, labels, cfg, result.trace);

    std::vector<std::vector<double>> samples;
    samples.reserve(train_set.size());
    for (const auto &s : train_set.samples()) {
        samples.push_back(s.features);
    }

    double bias = 0.0;
    if (cfg.fit_bias) {
        std::vector<double> f(g.size(), 0.0);
        for (std::size_t j = 0; j < g.size(); ++j) {
            for (std::size_t i = 0; i < g.size(); ++i) {
                f[j] += pi[i] * to_real(labels[i]) * g(i, j);
            }
        }
        bias = fit_bias_by_sweep(f, labels);
    }

    result.model = SvmModel(k, cfg.penalty, std::move(pi), labels, std::move(samples), bias);
    result.trace.kernel_evaluations = kernel_evaluation_count() - evals_before;
    return result;
}

// ---------------------------------------------------------------------------------------------

nlohmann::json model_to_json(const SvmModel &m) {
    nlohmann::json labels = nlohmann::json::array();
    for (const auto l : m.labels()) {
        labels.push_back(to_int(l));
    }
    return {
        { "version", model_format_version },
        { "kind", "svm" },
        { "kernel", kernel_to_json(m.kernel()) },
        { "penalty", m.penalty() },
        { "bias", m.bias() },
        { "dual_weights", m.dual_weights() },
        { "labels", labels },
        { "support_samples", m.support_samples() },
        { "scaling_params", m.scaling() ? scaling_to_json(*m.scaling()) : nlohmann::json(nullptr) },
    };
}

SvmModel model_from_json(const nlohmann::json &j) {
    try {
        if (j.at("version").get<int>() != model_format_version) {
            throw config_error("unsupported model version " + j.at("version").dump());
        }
        if (j.at("kind").get<std::string>() != "svm") {
            throw config_error("model kind is '" + j.at("kind").get<std::string>() + "', expected 'svm'");
        }
        std::vector<Label> labels;
        for (const auto &l : j.at("labels")) {
            labels.push_back(label_from_int(l.get<int>()));
        }
        SvmModel m(kernel_from_json(j.at("kernel")), j.at("penalty").get<double>(), j.at("dual_weights").get<std::vector<double>>(), std::move(labels), j.at("support_samples").get<std::vector<std::vector<double>>>(), j.at("bias").get<double>());
        if (j.contains("scaling_params") && !j.at("scaling_params").is_null()) {
            m.set_scaling(scaling_from_json(j.at("scaling_params")));
        }
        return m;
    } catch (const nlohmann::json::exception &e) {
        throw config_error(std::string("invalid model document: ") + e.what());
    } catch (const data_error &e) {
        throw config_error(std::string("invalid model document: ") + e.what());
    }
}

}  // namespace svmer
