#include "tssrp/priors.hpp"

#include <algorithm>
#include <cmath>

#include "tssrp/errors.hpp"

namespace tssrp {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

std::string check(const PriorDescriptor& descriptor) {
    return std::visit(
        overloaded{
            [](const UniformPrior& u) -> std::string {
                if (!std::isfinite(u.lo) || !std::isfinite(u.hi)) return "uniform bounds must be finite";
                if (u.lo > u.hi) return "uniform needs lo <= hi";
                if (u.lo < 0.0) return "uniform support must lie in [0, inf)";
                return {};
            },
            [](const PointMass& p) -> std::string {
                if (!std::isfinite(p.value) || p.value < 0.0) return "point mass must be a finite nonnegative value";
                return {};
            },
            [](const TabulatedPrior& t) -> std::string {
                if (t.quantiles.size() < 2) return "tabulated prior needs at least two quantiles";
                if (!std::is_sorted(t.quantiles.begin(), t.quantiles.end())) return "tabulated quantiles must be nondecreasing";
                if (t.quantiles.front() < 0.0 || !std::isfinite(t.quantiles.back()))
                    return "tabulated support must lie in [0, inf)";
                return {};
            },
        },
        descriptor);
}

}  // namespace

std::string to_string(PriorPreset preset) {
    switch (preset) {
        case PriorPreset::G0: return "G0";
        case PriorPreset::G1: return "G1";
        case PriorPreset::G2: return "G2";
        case PriorPreset::G3: return "G3";
    }
    return "?";
}

std::optional<PriorPreset> parse_prior_preset(const std::string& name) {
    if (name == "G0") return PriorPreset::G0;
    if (name == "G1") return PriorPreset::G1;
    if (name == "G2") return PriorPreset::G2;
    if (name == "G3") return PriorPreset::G3;
    return std::nullopt;
}

PriorSpec::PriorSpec(std::vector<PriorDescriptor> per_stream) : per_stream_(std::move(per_stream)) {
    std::vector<std::string> problems;
    for (std::size_t k = 0; k < per_stream_.size(); ++k) {
        if (auto msg = check(per_stream_[k]); !msg.empty())
            problems.push_back("prior for stream " + std::to_string(k + 1) + ": " + msg);
    }
    if (!problems.empty()) throw ConfigError(std::move(problems));
}

PriorSpec PriorSpec::preset(PriorPreset preset, std::size_t streams) {
    if (streams == 0) throw ConfigError("prior preset needs at least one stream");
    std::vector<PriorDescriptor> out;
    out.reserve(streams);
    auto split = [&](std::size_t informative) {
        if (streams < informative)
            throw ConfigError("prior " + to_string(preset) + " needs K >= " + std::to_string(informative) +
                              ", got K = " + std::to_string(streams));
        for (std::size_t k = 0; k < streams; ++k)
            out.emplace_back(k < informative ? UniformPrior{0.5, 1.0} : UniformPrior{0.0, 0.5});
    };
    switch (preset) {
        case PriorPreset::G0: split(10); break;
        case PriorPreset::G1: split(5); break;
        case PriorPreset::G2: out.assign(streams, UniformPrior{0.0, 1.0}); break;
        case PriorPreset::G3: out.assign(streams, PointMass{0.0}); break;
    }
    PriorSpec spec(std::move(out));
    spec.preset_ = preset;
    return spec;
}

double PriorSpec::draw(const PriorDescriptor& descriptor, Engine& rng) {
    return std::visit(overloaded{
                          [&](const UniformPrior& u) {
                              if (u.lo == u.hi) return u.lo;
                              return std::uniform_real_distribution<double>(u.lo, u.hi)(rng);
                          },
                          [](const PointMass& p) { return p.value; },
                          [&](const TabulatedPrior& t) {
                              const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
                              const double pos = u * static_cast<double>(t.quantiles.size() - 1);
                              const auto i = std::min(static_cast<std::size_t>(pos), t.quantiles.size() - 2);
                              const double frac = pos - static_cast<double>(i);
                              return t.quantiles[i] + frac * (t.quantiles[i + 1] - t.quantiles[i]);
                          },
                      },
                      descriptor);
}

double PriorSpec::support_min(const PriorDescriptor& descriptor) {
    return std::visit(overloaded{
                          [](const UniformPrior& u) { return u.lo; },
                          [](const PointMass& p) { return p.value; },
                          [](const TabulatedPrior& t) { return t.quantiles.front(); },
                      },
                      descriptor);
}

double PriorSpec::support_max(const PriorDescriptor& descriptor) {
    return std::visit(overloaded{
                          [](const UniformPrior& u) { return u.hi; },
                          [](const PointMass& p) { return p.value; },
                          [](const TabulatedPrior& t) { return t.quantiles.back(); },
                      },
                      descriptor);
}

}  // namespace tssrp
