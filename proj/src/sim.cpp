#include "tssrp/sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "tssrp/errors.hpp"
#include "tssrp/parallel.hpp"
#include "tssrp/rng.hpp"

namespace tssrp {
namespace {

std::string shortest(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double mean_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double std_error_of(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double n = static_cast<double>(v.size());
    return std::sqrt(ss / (n - 1.0) / n);
}

}  // namespace

// ---- network ---------------------------------------------------------------

BayesNetSpec BayesNetSpec::hot_forming_illustrative() {
    BayesNetSpec spec;
    spec.nodes = {"X1", "X2", "X3", "X4", "X5"};
    spec.edges = {{1, 2, 0.1}, {3, 2, 0.5}, {3, 4, 0.4}, {2, 4, 0.3}};
    spec.noise_sd.assign(5, 1.0);
    spec.standardize = true;
    return spec;
}

std::vector<std::size_t> BayesNetSpec::topological_order() const {
    const std::size_t n = nodes.size();
    std::vector<std::string> problems;
    if (n == 0) problems.emplace_back("network needs at least one node");
    for (const Edge& e : edges) {
        if (e.from >= n || e.to >= n) problems.push_back("edge references a node outside 1.." + std::to_string(n));
        else if (e.from == e.to) problems.push_back("self-loop on node " + nodes[e.from]);
        if (!std::isfinite(e.weight)) problems.emplace_back("edge weight must be finite");
    }
    if (!standardize) {
        if (noise_sd.size() != n) problems.push_back("expected " + std::to_string(n) + " noise sd values");
        for (double sd : noise_sd)
            if (!(sd > 0.0 && std::isfinite(sd))) problems.emplace_back("noise sd must be positive");
    }
    if (!problems.empty()) throw ConfigError(std::move(problems));

    std::vector<std::size_t> indegree(n, 0);
    for (const Edge& e : edges) ++indegree[e.to];
    std::vector<std::size_t> order;
    std::vector<std::size_t> ready;
    for (std::size_t i = n; i-- > 0;)
        if (indegree[i] == 0) ready.push_back(i);
    while (!ready.empty()) {
        const std::size_t v = ready.back();
        ready.pop_back();
        order.push_back(v);
        for (const Edge& e : edges)
            if (e.from == v && --indegree[e.to] == 0) ready.push_back(e.to);
    }
    if (order.size() != n) throw ConfigError("network edges contain a cycle");
    return order;
}

std::vector<std::size_t> BayesNetSpec::roots() const {
    std::vector<unsigned char> has_parent(nodes.size(), 0);
    for (const Edge& e : edges)
        if (e.to < nodes.size()) has_parent[e.to] = 1;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (!has_parent[i]) out.push_back(i);
    return out;
}

std::vector<double> BayesNetSpec::effective_noise_sd() const {
    const auto order = topological_order();
    if (!standardize) return noise_sd;
    const std::size_t n = nodes.size();
    // Covariance filled in topological order; noise variance takes up what the parents leave of 1.
    std::vector<std::vector<double>> cov(n, std::vector<double>(n, 0.0));
    std::vector<double> sd(n, 1.0);
    std::vector<std::size_t> done;
    for (std::size_t i : order) {
        for (std::size_t m : done) {
            double c = 0.0;
            for (const Edge& e : edges)
                if (e.to == i) c += e.weight * cov[e.from][m];
            cov[i][m] = cov[m][i] = c;
        }
        double explained = 0.0;
        for (const Edge& a : edges)
            for (const Edge& b : edges)
                if (a.to == i && b.to == i) explained += a.weight * b.weight * cov[a.from][b.from];
        const double noise_var = 1.0 - explained;
        if (!(noise_var > 0.0))
            throw ConfigError("node " + nodes[i] + ": parents explain all variance, cannot standardize");
        sd[i] = std::sqrt(noise_var);
        cov[i][i] = 1.0;
        done.push_back(i);
    }
    return sd;
}

NetworkGenerator::NetworkGenerator(const BayesNetSpec& spec)
    : order_(spec.topological_order()), parents_(spec.nodes.size()), sd_(spec.effective_noise_sd()),
      is_root_(spec.nodes.size(), 0) {
    for (const Edge& e : spec.edges) parents_[e.to].emplace_back(e.from, e.weight);
    for (std::size_t root : spec.roots()) is_root_[root] = 1;
}

void NetworkGenerator::generate(std::span<const unsigned char> changed_roots, double shift, Sampler& sampler,
                                std::span<double> out) const {
    for (std::size_t i : order_) {
        double v = sd_[i] * sampler.standard_normal();
        for (const auto& [j, w] : parents_[i]) v += w * out[j];
        if (!changed_roots.empty() && changed_roots[i]) {
            if (!is_root_[i]) throw ConfigError("only root nodes can carry the mean shift");
            v += shift;
        }
        out[i] = v;
    }
}

std::vector<double> generate_hot_forming(const BayesNetSpec& spec, std::span<const unsigned char> changed_roots,
                                         double shift, Sampler& sampler) {
    NetworkGenerator gen(spec);
    std::vector<double> out(gen.size());
    gen.generate(changed_roots, shift, sampler, out);
    return out;
}

// ---- scenario --------------------------------------------------------------

void Scenario::validate() const {
    std::vector<std::string> problems;
    if (streams == 0) problems.emplace_back("K must be >= 1");
    if (sensors == 0) problems.emplace_back("q must be >= 1");
    if (sensors > streams)
        problems.push_back("q (" + std::to_string(sensors) + ") exceeds K (" + std::to_string(streams) + ")");
    if (r == 0) problems.emplace_back("r must be >= 1");
    if (r > streams) problems.push_back("r (" + std::to_string(r) + ") exceeds K (" + std::to_string(streams) + ")");
    if (!(gamma > 1.0)) problems.emplace_back("gamma must be > 1");
    if (change_time && *change_time == 0) problems.emplace_back("change_time must be >= 1");
    if (replications == 0) problems.emplace_back("replications must be >= 1");
    if (detector_models.size() != streams)
        problems.push_back("expected " + std::to_string(streams) + " belief models, got " +
                           std::to_string(detector_models.size()));
    if (!network && truth_models.size() != streams)
        problems.push_back("expected " + std::to_string(streams) + " truth models, got " +
                           std::to_string(truth_models.size()));
    for (std::size_t k : changed)
        if (k >= streams) problems.push_back("changed stream " + std::to_string(k + 1) + " outside 1..K");
    for (std::size_t k : candidates)
        if (k >= streams) problems.push_back("candidate stream " + std::to_string(k + 1) + " outside 1..K");
    const std::size_t pool = candidates.empty() ? streams : candidates.size();
    if (random_changes > pool)
        problems.push_back("random_changes (" + std::to_string(random_changes) + ") exceeds the candidate pool (" +
                           std::to_string(pool) + ")");
    if (network) {
        if (network->nodes.size() != streams)
            problems.push_back("network has " + std::to_string(network->nodes.size()) + " nodes but K = " +
                               std::to_string(streams));
        try {
            const auto roots = network->roots();
            auto is_root = [&](std::size_t k) { return std::find(roots.begin(), roots.end(), k) != roots.end(); };
            for (std::size_t k : changed)
                if (k < streams && !is_root(k))
                    problems.push_back("changed stream " + std::to_string(k + 1) + " is not a root of the network");
            if (random_changes > 0) {
                const auto& pool_ref = candidates.empty() ? roots : candidates;
                for (std::size_t k : pool_ref)
                    if (k < streams && !is_root(k))
                        problems.push_back("candidate stream " + std::to_string(k + 1) + " is not a root");
            }
            (void)network->effective_noise_sd();
        } catch (const ConfigError& e) {
            for (const auto& v : e.violations()) problems.push_back(v);
        }
        if (!std::isfinite(network_shift)) problems.emplace_back("network shift must be finite");
    }
    if (!problems.empty()) throw ConfigError(std::move(problems));
}

std::size_t Scenario::effective_horizon() const {
    return horizon ? horizon : static_cast<std::size_t>(std::ceil(100.0 * gamma));
}

std::size_t Scenario::n_changes() const {
    if (!change_time) return 0;
    return random_changes ? random_changes : changed.size();
}

std::string algorithm_label(const AlgorithmSpec& algorithm) {
    if (const auto* t = std::get_if<TssrpSpec>(&algorithm)) {
        std::string label = "TSSRP(" + prior_or_delta(algorithm);
        if (t->rule != RuleKind::top_r_sum) label += "," + rule_label(t->rule);
        return label + ")";
    }
    return "TRAS(delta=" + prior_or_delta(algorithm) + ")";
}

std::string prior_or_delta(const AlgorithmSpec& algorithm) {
    if (const auto* t = std::get_if<TssrpSpec>(&algorithm)) {
        if (!t->prior_label.empty()) return t->prior_label;
        if (auto p = t->prior.preset_name()) return to_string(*p);
        return "custom";
    }
    return shortest(std::get<TrasSpec>(algorithm).delta);
}

std::vector<double> generate_panel(const Scenario& scenario, std::size_t t, std::span<const unsigned char> changed,
                                   Sampler& sampler) {
    std::vector<double> out(scenario.streams);
    const bool post = scenario.change_time && t >= *scenario.change_time;
    if (scenario.network) {
        static const std::vector<unsigned char> none;
        NetworkGenerator(*scenario.network).generate(post ? changed : std::span<const unsigned char>(none),
                                                     scenario.network_shift, sampler, out);
        return out;
    }
    for (std::size_t k = 0; k < scenario.streams; ++k)
        out[k] = scenario.truth_models[k].sample(post && changed[k] ? Regime::post : Regime::pre, sampler);
    return out;
}

std::vector<unsigned char> changed_mask(const Scenario& scenario, std::uint64_t seed) {
    std::vector<unsigned char> mask(scenario.streams, 0);
    if (scenario.random_changes == 0) {
        for (std::size_t k : scenario.changed) mask.at(k) = 1;
        return mask;
    }
    std::vector<std::size_t> pool = scenario.candidates;
    if (pool.empty()) {
        if (scenario.network) {
            pool = scenario.network->roots();
        } else {
            pool.resize(scenario.streams);
            std::iota(pool.begin(), pool.end(), std::size_t{0});
        }
    }
    Engine rng = make_engine(derive_seed(seed, Purpose::ChangedSet));
    for (std::size_t i = 0; i < scenario.random_changes; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
        std::swap(pool[i], pool[pick(rng)]);
        mask.at(pool[i]) = 1;
    }
    return mask;
}

// ---- sources ---------------------------------------------------------------

PanelSource::PanelSource(std::shared_ptr<const Scenario> scenario, std::vector<unsigned char> changed,
                         std::optional<std::size_t> change_time, std::uint64_t seed)
    : scenario_(std::move(scenario)),
      changed_(std::move(changed)),
      change_time_(change_time),
      sampler_(derive_seed(seed, Purpose::Data)) {
    if (scenario_->network) network_ = std::make_shared<const NetworkGenerator>(*scenario_->network);
}

bool PanelSource::next(std::size_t t, std::span<const std::size_t>, std::span<double> out) {
    const bool post = change_time_ && t >= *change_time_;
    if (network_) {
        network_->generate(post ? std::span<const unsigned char>(changed_) : std::span<const unsigned char>(),
                           scenario_->network_shift, sampler_, out);
        return true;
    }
    const auto& models = scenario_->truth_models;
    for (std::size_t k = 0; k < models.size(); ++k)
        out[k] = models[k].sample(post && changed_[k] ? Regime::post : Regime::pre, sampler_);
    return true;
}

bool PoisonedSource::next(std::size_t t, std::span<const std::size_t> requested, std::span<double> out) {
    if (!inner_->next(t, requested, out)) return false;
    mask_.assign(out.size(), 0);
    for (std::size_t k : requested) mask_[k] = 1;
    for (std::size_t k = 0; k < out.size(); ++k)
        if (!mask_[k]) out[k] = sentinel_;
    return true;
}

// ---- replications ----------------------------------------------------------

ReplicationBuilder::ReplicationBuilder(Scenario scenario, AlgorithmSpec algorithm)
    : scenario_(std::make_shared<const Scenario>(std::move(scenario))), algorithm_(std::move(algorithm)) {
    scenario_->validate();
    const Scenario& s = *scenario_;
    if (const auto* t = std::get_if<TssrpSpec>(&algorithm_)) {
        DetectorConfig cfg;
        cfg.streams = s.streams;
        cfg.sensors = s.sensors;
        cfg.models = s.detector_models;
        cfg.prior = t->prior;
        cfg.rule = StoppingRule{t->rule, s.r, kPosInf};
        cfg.validate();
        tssrp_ = std::make_shared<const DetectorConfig>(std::move(cfg));
    } else {
        TrasConfig cfg;
        cfg.streams = s.streams;
        cfg.sensors = s.sensors;
        cfg.r = s.r;
        cfg.delta = std::get<TrasSpec>(algorithm_).delta;
        cfg.threshold = kPosInf;
        cfg.models = s.detector_models;
        cfg.validate();
        tras_ = std::make_shared<const TrasConfig>(std::move(cfg));
    }
}

ThresholdScale ReplicationBuilder::scale() const { return tssrp_ ? ThresholdScale::log : ThresholdScale::linear; }

std::unique_ptr<MonitoringProcedure> ReplicationBuilder::procedure(double threshold, std::uint64_t seed) const {
    if (tssrp_) return std::make_unique<TssrpDetector>(tssrp_, seed, threshold);
    return std::make_unique<TrasDetector>(tras_, seed, threshold);
}

std::unique_ptr<DataSource> ReplicationBuilder::source(std::uint64_t seed, bool in_control) const {
    const std::optional<std::size_t> nu = in_control ? std::nullopt : scenario_->change_time;
    return std::make_unique<PanelSource>(scenario_, changed_mask(*scenario_, seed), nu, seed);
}

ReplicationFactory in_control_factory(const Scenario& scenario, const AlgorithmSpec& algorithm) {
    auto builder = std::make_shared<const ReplicationBuilder>(scenario, algorithm);
    ReplicationFactory f;
    f.scale = builder->scale();
    f.streams = scenario.streams;
    f.make = [builder](std::uint64_t seed, double threshold) { return builder->make(threshold, seed, true); };
    return f;
}

// ---- experiments -----------------------------------------------------------

ExperimentReport run_experiment(const Scenario& scenario, const AlgorithmSpec& algorithm, double threshold,
                                std::uint64_t master_seed, std::size_t workers) {
    const ReplicationBuilder builder(scenario, algorithm);
    const std::size_t reps = scenario.replications;
    const std::size_t horizon = scenario.effective_horizon();
    const bool in_control = !scenario.change_time;

    std::vector<RunResult> results(reps);
    parallel_for(reps, workers, [&](std::size_t i) {
        Replication rep = builder.make(threshold, replication_seed(master_seed, i), in_control);
        results[i] = run(*rep.procedure, *rep.source, RunOptions{horizon, false});
        results[i].final_local_statistics.clear();
    });

    ExperimentReport out;
    out.algorithm = algorithm_label(algorithm);
    out.prior_or_delta = prior_or_delta(algorithm);
    if (const auto* t = std::get_if<TssrpSpec>(&algorithm)) out.rule = rule_label(t->rule);
    out.streams = scenario.streams;
    out.sensors = scenario.sensors;
    out.r = scenario.r;
    out.n_changes = scenario.n_changes();
    out.gamma = scenario.gamma;
    out.threshold = threshold;
    out.in_control = in_control;
    out.replications = reps;
    out.horizon = horizon;

    std::vector<double> kept;
    std::vector<std::vector<double>> occ(scenario.streams);
    for (const RunResult& r : results) {
        if (r.censored) ++out.censored;
        long long delay = static_cast<long long>(r.stop_time);
        if (!in_control) {
            const auto nu = static_cast<long long>(*scenario.change_time);
            delay = delay >= nu ? delay - nu : -1;
        }
        out.delays.push_back(delay);
        if (delay < 0)
            ++out.false_alarms;
        else
            kept.push_back(static_cast<double>(delay));
        const auto o = r.occupancy();
        for (std::size_t k = 0; k < o.size(); ++k) occ[k].push_back(o[k]);
    }
    out.mean_delay = mean_of(kept);
    out.std_error = std_error_of(kept, out.mean_delay);
    for (const auto& col : occ) {
        const double m = mean_of(col);
        out.occupancy.push_back(m);
        out.occupancy_std_error.push_back(std_error_of(col, m));
    }
    return out;
}

std::vector<MartingalePoint> martingale_experiment(const DetectorConfig& config, std::size_t reps,
                                                   std::span<const std::size_t> checkpoints, std::uint64_t master_seed,
                                                   std::size_t workers) {
    if (reps < 2) throw ConfigError("martingale experiment needs at least 2 replications");
    if (checkpoints.empty()) throw ConfigError("martingale experiment needs at least one checkpoint");
    auto shared = std::make_shared<DetectorConfig>(config);
    shared->rule.threshold = kPosInf;
    shared->validate();
    const std::shared_ptr<const DetectorConfig> cfg = shared;
    const std::size_t last = *std::max_element(checkpoints.begin(), checkpoints.end());
    const std::size_t k_streams = cfg->streams;

    std::vector<std::vector<double>> values(checkpoints.size(), std::vector<double>(reps));
    parallel_for(reps, workers, [&](std::size_t i) {
        const std::uint64_t seed = replication_seed(master_seed, i);
        TssrpDetector det(cfg, seed, kPosInf);
        Sampler sampler(derive_seed(seed, Purpose::Data));
        std::vector<double> x(k_streams);
        for (std::size_t t = 1; t <= last; ++t) {
            for (std::size_t k = 0; k < k_streams; ++k) x[k] = cfg->models[k].sample(Regime::pre, sampler);
            det.step(x);
            for (std::size_t c = 0; c < checkpoints.size(); ++c) {
                if (checkpoints[c] != t) continue;
                double sum = 0.0;
                for (const LocalState& s : det.states()) sum += std::exp(s.log_r);
                values[c][i] = sum - static_cast<double>(k_streams) * static_cast<double>(t);
            }
        }
    });
    std::vector<MartingalePoint> out;
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        const double m = mean_of(values[c]);
        out.push_back({checkpoints[c], m, std_error_of(values[c], m)});
    }
    return out;
}

}  // namespace tssrp
