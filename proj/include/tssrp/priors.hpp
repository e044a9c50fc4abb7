#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tssrp/rng.hpp"

namespace tssrp {

struct UniformPrior {
    double lo = 0.0;
    double hi = 1.0;
    friend bool operator==(const UniformPrior&, const UniformPrior&) = default;
};

struct PointMass {
    double value = 0.0;
    friend bool operator==(const PointMass&, const PointMass&) = default;
};

/// Inverse CDF tabulated at evenly spaced probabilities 0, 1/(n-1), ..., 1;
/// draws interpolate linearly between knots.
struct TabulatedPrior {
    std::vector<double> quantiles;
    friend bool operator==(const TabulatedPrior&, const TabulatedPrior&) = default;
};

using PriorDescriptor = std::variant<UniformPrior, PointMass, TabulatedPrior>;

enum class PriorPreset { G0, G1, G2, G3 };

std::string to_string(PriorPreset preset);
std::optional<PriorPreset> parse_prior_preset(const std::string& name);

/// Distribution of the per-stream randomisation value added to the local
/// statistic before ranking (one descriptor per stream).
class PriorSpec {
  public:
    PriorSpec() = default;
    explicit PriorSpec(std::vector<PriorDescriptor> per_stream);

    /// G0: U[0.5,1] on streams 1-10, U[0,0.5] elsewhere. G1: same split at 5.
    /// G2: U[0,1] everywhere. G3: point mass at 0.
    static PriorSpec preset(PriorPreset preset, std::size_t streams);

    std::size_t size() const { return per_stream_.size(); }
    const PriorDescriptor& operator[](std::size_t k) const { return per_stream_.at(k); }
    const std::vector<PriorDescriptor>& descriptors() const { return per_stream_; }
    std::optional<PriorPreset> preset_name() const { return preset_; }

    /// Independent draw for stream k (0-based).
    double draw(std::size_t k, Engine& rng) const { return draw(per_stream_[k], rng); }
    static double draw(const PriorDescriptor& descriptor, Engine& rng);

    /// Support bounds of one descriptor.
    static double support_min(const PriorDescriptor& descriptor);
    static double support_max(const PriorDescriptor& descriptor);

    friend bool operator==(const PriorSpec& a, const PriorSpec& b) { return a.per_stream_ == b.per_stream_; }

  private:
    std::vector<PriorDescriptor> per_stream_;
    std::optional<PriorPreset> preset_;
};

}  // namespace tssrp
