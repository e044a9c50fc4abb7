#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tssrp/baselines.hpp"
#include "tssrp/calibration.hpp"
#include "tssrp/detector.hpp"
#include "tssrp/models.hpp"
#include "tssrp/priors.hpp"
#include "tssrp/procedure.hpp"

namespace tssrp {

struct Edge {
    std::size_t from = 0;
    std::size_t to = 0;
    double weight = 0.0;
    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Linear-Gaussian network X_i = sum_j w_ji X_j + eps_i, eps_i ~ N(0, sd_i^2).
struct BayesNetSpec {
    std::vector<std::string> nodes;
    std::vector<Edge> edges;
    std::vector<double> noise_sd;  // ignored when standardize is set
    bool standardize = true;

    /// Five-node stand-in for the hot-forming process. Roots X1, X2, X4;
    /// X2 -> X3 (0.1), X4 -> X3 (0.5), X4 -> X5 (0.4), X3 -> X5 (0.3).
    /// The weights are illustrative, not measured values.
    static BayesNetSpec hot_forming_illustrative();

    /// Throws ConfigError on cycles, bad indices or non-positive noise.
    std::vector<std::size_t> topological_order() const;
    std::vector<std::size_t> roots() const;
    /// Noise sd actually used; with standardize, chosen so every marginal variance is 1.
    std::vector<double> effective_noise_sd() const;

    friend bool operator==(const BayesNetSpec&, const BayesNetSpec&) = default;
};

/// Prepared sampler for a BayesNetSpec.
class NetworkGenerator {
  public:
    explicit NetworkGenerator(const BayesNetSpec& spec);
    std::size_t size() const { return sd_.size(); }
    /// One draw; `shift` is added to the mean of every flagged root before propagation.
    void generate(std::span<const unsigned char> changed_roots, double shift, Sampler& sampler,
                  std::span<double> out) const;

  private:
    std::vector<std::size_t> order_;
    std::vector<std::vector<std::pair<std::size_t, double>>> parents_;
    std::vector<double> sd_;
    std::vector<unsigned char> is_root_;
};

std::vector<double> generate_hot_forming(const BayesNetSpec& spec, std::span<const unsigned char> changed_roots,
                                         double shift, Sampler& sampler);

struct Scenario {
    std::size_t streams = 0;  // K
    std::size_t sensors = 0;  // q
    std::size_t r = 1;
    double gamma = 1000.0;
    std::optional<std::size_t> change_time = 1;  // nullopt: never (in control)
    std::vector<std::size_t> changed;            // 0-based, used when random_changes == 0
    std::size_t random_changes = 0;              // > 0: draw this many changed streams per replication
    std::vector<std::size_t> candidates;         // pool for random changes; empty means all streams
    std::vector<StreamModel> detector_models;    // the algorithm's belief
    std::vector<StreamModel> truth_models;       // the generator
    std::optional<BayesNetSpec> network;         // replaces truth_models when set
    double network_shift = 2.0;
    std::size_t replications = 1000;
    std::uint64_t seed = 1;
    std::size_t horizon = 0;  // 0 means 100 * gamma

    void validate() const;
    std::size_t effective_horizon() const;
    /// Number of changed streams per replication.
    std::size_t n_changes() const;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct TssrpSpec {
    PriorSpec prior;
    RuleKind rule = RuleKind::top_r_sum;
    std::string prior_label;  // e.g. "G0"; derived from the preset when empty
    friend bool operator==(const TssrpSpec&, const TssrpSpec&) = default;
};

struct TrasSpec {
    double delta = 0.05;
    friend bool operator==(const TrasSpec&, const TrasSpec&) = default;
};

using AlgorithmSpec = std::variant<TssrpSpec, TrasSpec>;

/// "TSSRP(G0)", "TSSRP(G3,T4)", "TRAS(delta=0.05)".
std::string algorithm_label(const AlgorithmSpec& algorithm);
/// "G0" or "0.05".
std::string prior_or_delta(const AlgorithmSpec& algorithm);

/// Row of observations at round t for independent streams.
std::vector<double> generate_panel(const Scenario& scenario, std::size_t t, std::span<const unsigned char> changed,
                                   Sampler& sampler);

/// Supplies every stream each round, drawn from the truth models (or the network).
class PanelSource final : public DataSource {
  public:
    PanelSource(std::shared_ptr<const Scenario> scenario, std::vector<unsigned char> changed,
                std::optional<std::size_t> change_time, std::uint64_t seed);
    bool next(std::size_t t, std::span<const std::size_t> requested, std::span<double> out) override;

  private:
    std::shared_ptr<const Scenario> scenario_;
    std::shared_ptr<const NetworkGenerator> network_;
    std::vector<unsigned char> changed_;
    std::optional<std::size_t> change_time_;
    Sampler sampler_;
};

/// Overwrites every entry outside the requested layout with `sentinel`.
class PoisonedSource final : public DataSource {
  public:
    PoisonedSource(DataSource& inner, double sentinel) : inner_(&inner), sentinel_(sentinel) {}
    bool next(std::size_t t, std::span<const std::size_t> requested, std::span<double> out) override;

  private:
    DataSource* inner_;
    double sentinel_;
    std::vector<unsigned char> mask_;
};

/// Changed-stream indicator for replication `seed`.
std::vector<unsigned char> changed_mask(const Scenario& scenario, std::uint64_t seed);

/// Builds procedures and data sources for one (scenario, algorithm) pair.
/// Models and priors are shared between all replications it creates.
class ReplicationBuilder {
  public:
    ReplicationBuilder(Scenario scenario, AlgorithmSpec algorithm);

    const Scenario& scenario() const { return *scenario_; }
    const AlgorithmSpec& algorithm() const { return algorithm_; }
    ThresholdScale scale() const;

    std::unique_ptr<MonitoringProcedure> procedure(double threshold, std::uint64_t seed) const;
    /// in_control forces the change never to happen.
    std::unique_ptr<DataSource> source(std::uint64_t seed, bool in_control) const;
    Replication make(double threshold, std::uint64_t seed, bool in_control) const {
        return {procedure(threshold, seed), source(seed, in_control)};
    }

  private:
    std::shared_ptr<const Scenario> scenario_;
    AlgorithmSpec algorithm_;
    std::shared_ptr<const DetectorConfig> tssrp_;
    std::shared_ptr<const TrasConfig> tras_;
};

/// In-control replications for calibration.
ReplicationFactory in_control_factory(const Scenario& scenario, const AlgorithmSpec& algorithm);

struct ExperimentReport {
    std::string algorithm;       // label
    std::string prior_or_delta;  // G0 ... or the delta value
    std::string rule;            // T, T2, T3, T4 (TSSRP only)
    std::size_t streams = 0;
    std::size_t sensors = 0;
    std::size_t r = 0;
    std::size_t n_changes = 0;
    double gamma = 0.0;
    double threshold = 0.0;
    bool in_control = false;
    std::size_t replications = 0;
    std::size_t horizon = 0;
    double mean_delay = 0.0;  // T - nu over runs with T >= nu; mean T when in control
    double std_error = 0.0;
    std::size_t false_alarms = 0;  // runs with T < nu
    std::size_t censored = 0;
    std::vector<double> occupancy;             // per stream, mean over replications
    std::vector<double> occupancy_std_error;   // per stream
    std::vector<long long> delays;             // per replication; -1 marks a false alarm
    std::string manifest_hash;
};

/// Runs scenario.replications replications seeded from master_seed.
ExperimentReport run_experiment(const Scenario& scenario, const AlgorithmSpec& algorithm, double threshold,
                                std::uint64_t master_seed, std::size_t workers = 1);

struct MartingalePoint {
    std::size_t t = 0;
    double mean = 0.0;  // mean of sum_k R_{k,t} - K t
    double std_error = 0.0;
};

/// In-control check that sum_k R_{k,t} - K t has mean zero at the given rounds.
/// `config` supplies K, q, models, prior and layout policy; its threshold is ignored.
std::vector<MartingalePoint> martingale_experiment(const DetectorConfig& config, std::size_t reps,
                                                   std::span<const std::size_t> checkpoints, std::uint64_t master_seed,
                                                   std::size_t workers = 1);

}  // namespace tssrp
