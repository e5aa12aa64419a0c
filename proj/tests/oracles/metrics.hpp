#pragma once

#include <cstddef>
#include <vector>

namespace oracle {

struct Counts {
    double precision = 0.0;
    double recall = 0.0;
    double accuracy = 0.0;
    double f1 = 0.0;
};

/// Counts straight from +1/-1 integer vectors; an undefined ratio is reported as 0.
inline Counts count_metrics(const std::vector<int> &pred, const std::vector<int> &truth) {
    std::size_t predicted_pos = 0;
    std::size_t actual_pos = 0;
    std::size_t hits = 0;
    std::size_t agree = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        predicted_pos += pred[i] == 1 ? 1 : 0;
        actual_pos += truth[i] == 1 ? 1 : 0;
        hits += (pred[i] == 1 && truth[i] == 1) ? 1 : 0;
        agree += pred[i] == truth[i] ? 1 : 0;
    }
    Counts c;
    c.precision = predicted_pos ? static_cast<double>(hits) / static_cast<double>(predicted_pos) : 0.0;
    c.recall = actual_pos ? static_cast<double>(hits) / static_cast<double>(actual_pos) : 0.0;
    c.accuracy = static_cast<double>(agree) / static_cast<double>(pred.size());
    // 2 tp / (2 tp + fp + fn) == 2 tp / (predicted positives + actual positives)
    c.f1 = (predicted_pos + actual_pos) ? 2.0 * static_cast<double>(hits) / static_cast<double>(predicted_pos + actual_pos) : 0.0;
    return c;
}

}  // namespace oracle
