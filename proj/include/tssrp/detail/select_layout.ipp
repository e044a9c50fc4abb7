#pragma once

#include <algorithm>
#include <functional>
#include <random>

namespace tssrp {

template <class Rng>
SensorLayout select_layout(std::span<const double> scores, std::size_t q, Rng& rng) {
    const std::size_t streams = scores.size();
    if (q == 0 || q > streams) throw ConfigError("layout size q must satisfy 1 <= q <= K");
    std::vector<std::size_t> chosen;
    chosen.reserve(q);
    if (q == streams) {
        for (std::size_t k = 0; k < streams; ++k) chosen.push_back(k);
        return SensorLayout(std::move(chosen), streams);
    }

    std::vector<double> sorted(scores.begin(), scores.end());
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(q - 1), sorted.end(),
                     std::greater<>());
    const double cut = sorted[q - 1];

    std::vector<std::size_t> tied;
    for (std::size_t k = 0; k < streams; ++k) {
        if (scores[k] > cut)
            chosen.push_back(k);
        else if (scores[k] == cut)
            tied.push_back(k);
    }
    const std::size_t need = q - chosen.size();
    if (tied.size() > need) {
        // Partial Fisher-Yates: the first `need` slots become a uniform subset.
        for (std::size_t i = 0; i < need; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, tied.size() - 1);
            std::swap(tied[i], tied[pick(rng)]);
        }
    }
    chosen.insert(chosen.end(), tied.begin(), tied.begin() + static_cast<std::ptrdiff_t>(need));
    std::sort(chosen.begin(), chosen.end());
    return SensorLayout(std::move(chosen), streams);
}

}  // namespace tssrp
