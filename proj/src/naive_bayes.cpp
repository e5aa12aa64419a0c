#include "svmer/naive_bayes.hpp"

#include <cmath>
#include <numbers>

#include "svmer/error.hpp"
#include "svmer/svm.hpp"

namespace svmer {

GaussianNbModel::GaussianNbModel(std::array<double, 2> priors, std::array<std::vector<double>, 2> means, std::array<std::vector<double>, 2> variances, double variance_floor) :
    priors_(priors),
    means_(std::move(means)),
    variances_(std::move(variances)),
    variance_floor_(variance_floor) {
    if (!(variance_floor_ > 0.0)) {
        throw config_error("variance floor must be > 0");
    }
    for (const double p : priors_) {
        if (!(p > 0.0 && p < 1.0)) {
            throw data_error("class priors must lie in (0, 1)");
        }
    }
    if (std::abs(priors_[0] + priors_[1] - 1.0) > 1e-12) {
        throw data_error("class priors must sum to 1");
    }
    const std::size_t f = means_[0].size();
    for (std::size_t c = 0; c < 2; ++c) {
        if (means_[c].size() != f || variances_[c].size() != f) {
            throw data_error("naive Bayes parameter arity mismatch");
        }
        for (const double v : variances_[c]) {
            if (!(v >= variance_floor_)) {
                throw data_error("naive Bayes variance below the floor");
            }
        }
    }
}

double GaussianNbModel::log_joint(std::span<const double> a, Label c) const {
    if (a.size() != feature_count()) {
        throw data_error("naive Bayes model expects " + std::to_string(feature_count()) + " features, got " + std::to_string(a.size()));
    }
    const auto k = slot(c);
    double sum = std::log(priors_[k]);
    for (std::size_t f = 0; f < a.size(); ++f) {
        const double d = a[f] - means_[k][f];
        sum -= 0.5 * (std::log(2.0 * std::numbers::pi * variances_[k][f]) + d * d / variances_[k][f]);
    }
    return sum;
}

Label GaussianNbModel::predict(std::span<const double> a) const {
    return log_joint(a, Label::positive) >= log_joint(a, Label::negative) ? Label::positive : Label::negative;
}

double GaussianNbModel::positive_posterior(std::span<const double> a) const {
    const double diff = log_joint(a, Label::negative) - log_joint(a, Label::positive);
    return 1.0 / (1.0 + std::exp(diff));
}

GaussianNbModel nb_fit(const Dataset &train_set, double variance_floor) {
    if (!train_set.has_both_classes()) {
        throw data_error("dataset '" + train_set.name() + "' must contain both classes for naive Bayes");
    }
    if (!(variance_floor > 0.0)) {
        throw config_error("variance floor must be > 0");
    }
    const std::size_t f_count = train_set.feature_count();
    std::array<std::vector<double>, 2> means{ std::vector<double>(f_count, 0.0), std::vector<double>(f_count, 0.0) };
    std::array<std::vector<double>, 2> vars{ std::vector<double>(f_count, 0.0), std::vector<double>(f_count, 0.0) };
    const std::array<double, 2> counts{ static_cast<double>(train_set.count(Label::positive)), static_cast<double>(train_set.count(Label::negative)) };

    for (const auto &s : train_set.samples()) {
        const std::size_t c = s.label == Label::positive ? 0 : 1;
        for (std::size_t f = 0; f < f_count; ++f) {
            means[c][f] += s.features[f];
        }
    }
    for (std::size_t c = 0; c < 2; ++c) {
        for (auto &m : means[c]) {
            m /= counts[c];
        }
    }
    for (const auto &s : train_set.samples()) {
        const std::size_t c = s.label == Label::positive ? 0 : 1;
        for (std::size_t f = 0; f < f_count; ++f) {
            const double d = s.features[f] - means[c][f];
            vars[c][f] += d * d;
        }
    }
    for (std::size_t c = 0; c < 2; ++c) {
        for (auto &v : vars[c]) {
            v = std::max(v / counts[c], variance_floor);
        }
    }
    const double n = counts[0] + counts[1];
    const double p_pos = counts[0] / n;
    return GaussianNbModel({ p_pos, 1.0 - p_pos }, std::move(means), std::move(vars), variance_floor);
}

nlohmann::json nb_model_to_json(const GaussianNbModel &m) {
    return {
        { "version", model_format_version },
        { "kind", "gaussian_nb" },
        { "priors", { { "positive", m.prior(Label::positive) }, { "negative", m.prior(Label::negative) } } },
        { "means", { { "positive", m.means(Label::positive) }, { "negative", m.means(Label::negative) } } },
        { "variances", { { "positive", m.variances(Label::positive) }, { "negative", m.variances(Label::negative) } } },
        { "variance_floor", m.variance_floor() },
        { "scaling_params", m.scaling() ? scaling_to_json(*m.scaling()) : nlohmann::json(nullptr) },
    };
}

GaussianNbModel nb_model_from_json(const nlohmann::json &j) {
    try {
        if (j.at("version").get<int>() != model_format_version || j.at("kind").get<std::string>() != "gaussian_nb") {
            throw config_error("not a version-" + std::to_string(model_format_version) + " gaussian_nb model document");
        }
        const auto side = [&j](const char *field, const char *which) { return j.at(field).at(which).get<std::vector<double>>(); };
        GaussianNbModel m({ j.at("priors").at("positive").get<double>(), j.at("priors").at("negative").get<double>() },
                          { side("means", "positive"), side("means", "negative") },
                          { side("variances", "positive"), side("variances", "negative") },
                          j.at("variance_floor").get<double>());
        if (j.contains("scaling_params") && !j.at("scaling_params").is_null()) {
            m.set_scaling(scaling_from_json(j.at("scaling_params")));
        }
        return m;
    } catch (const nlohmann::json::exception &e) {
        throw config_error(std::string("invalid naive Bayes model document: ") + e.what());
    } catch (const data_error &e) {
        throw config_error(std::string("invalid naive Bayes model document: ") + e.what());
    }
}

}  // namespace svmer
