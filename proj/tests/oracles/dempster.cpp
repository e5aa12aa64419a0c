#include "dempster.hpp"

#include <cstdint>
#include <stdexcept>

namespace oracle {

namespace {

struct Focal {
    std::uint32_t set = 0;
    bool residual = false;  // only meaningful for the whole frame
    double mass = 0.0;
};

}  // namespace

Combined dempster(const std::vector<Source> &sources) {
    if (sources.empty()) {
        throw std::invalid_argument("no sources");
    }
    const std::size_t s_count = sources.front().slots.size();
    const std::uint32_t frame = (1u << s_count) - 1u;

    std::vector<std::vector<Focal>> focal(sources.size());
    for (std::size_t i = 0; i < sources.size(); ++i) {
        if (sources[i].slots.size() != s_count) {
            throw std::invalid_argument("slot count mismatch");
        }
        for (std::size_t s = 0; s < s_count; ++s) {
            focal[i].push_back({ 1u << s, false, sources[i].slots[s] });
        }
        focal[i].push_back({ frame, true, sources[i].weight_residual });
        focal[i].push_back({ frame, false, sources[i].incompleteness });
    }

    std::vector<double> slot_mass(s_count, 0.0);
    double residual = 0.0;
    double incomplete = 0.0;
    double conflict = 0.0;

    // odometer over the joint product of focal elements
    std::vector<std::size_t> pick(sources.size(), 0);
    while (true) {
        double mass = 1.0;
        std::uint32_t set = frame;
        bool all_residual = true;
        for (std::size_t i = 0; i < sources.size(); ++i) {
            const auto &f = focal[i][pick[i]];
            mass *= f.mass;
            set &= f.set;
            all_residual = all_residual && f.set == frame && f.residual;
        }
        if (set == 0) {
            conflict += mass;
        } else if (set == frame) {
            (all_residual ? residual : incomplete) += mass;
        } else {
            for (std::size_t s = 0; s < s_count; ++s) {
                if (set == (1u << s)) {
                    slot_mass[s] += mass;
                }
            }
        }
        std::size_t k = 0;
        while (k < pick.size() && ++pick[k] == focal[k].size()) {
            pick[k++] = 0;
        }
        if (k == pick.size()) {
            break;
        }
    }

    const double keep = 1.0 - conflict;
    if (!(keep > 0.0)) {
        throw std::domain_error("total conflict");
    }
    Combined out;
    out.conflict = conflict;
    for (const double m : slot_mass) {
        out.slots.push_back(m / keep);
    }
    out.weight_residual = residual / keep;
    out.incompleteness = incomplete / keep;
    return out;
}

}  // namespace oracle
