#include "tssrp/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "tssrp/errors.hpp"
#include "tssrp/numeric.hpp"
#include "tssrp/parallel.hpp"
#include "tssrp/rng.hpp"

namespace tssrp {
namespace {

struct Summary {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t censored = 0;
};

Summary summarize(const std::vector<std::size_t>& times, std::size_t horizon) {
    Summary s;
    const double n = static_cast<double>(times.size());
    double sum = 0.0;
    for (std::size_t t : times) {
        sum += static_cast<double>(t);
        if (t >= horizon) ++s.censored;
    }
    s.mean = sum / n;
    double ss = 0.0;
    for (std::size_t t : times) ss += (static_cast<double>(t) - s.mean) * (static_cast<double>(t) - s.mean);
    s.std_error = times.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    return s;
}

// Statistic path of one replication, run with an unreachable threshold and
// extended on demand. Only running-maximum records are kept: the stopping
// time at level c is the time of the first record >= c.
class Path {
  public:
    explicit Path(Replication rep) : rep_(std::move(rep)), x_(rep_.procedure->streams()) {}

    // Extend until the running maximum reaches `level` or `cap` rounds.
    void advance(double level, std::size_t cap) {
        auto& proc = *rep_.procedure;
        while (best_ < level && proc.time() < cap) {
            const std::size_t t = proc.time() + 1;
            std::fill(x_.begin(), x_.end(), std::numeric_limits<double>::quiet_NaN());
            if (!rep_.source->next(t, proc.layout().observed(), x_))
                throw DataError("in-control source exhausted at round " + std::to_string(t));
            const double stat = proc.step(x_).stat;
            if (stat > best_) {
                best_ = stat;
                records_.emplace_back(t, stat);
            }
        }
    }

    std::size_t time() const { return rep_.procedure->time(); }

    // Stopping time at `level`, or nullopt when not reached so far.
    std::optional<std::size_t> hit(double level) const {
        if (best_ < level) return std::nullopt;
        auto it = std::lower_bound(records_.begin(), records_.end(), level,
                                   [](const auto& rec, double v) { return rec.second < v; });
        return it->first;
    }

    std::optional<double> first_record_at_least(double level) const {
        if (best_ < level) return std::nullopt;
        auto it = std::lower_bound(records_.begin(), records_.end(), level,
                                   [](const auto& rec, double v) { return rec.second < v; });
        return it->second;
    }

  private:
    Replication rep_;
    std::vector<double> x_;
    std::vector<std::pair<std::size_t, double>> records_;
    double best_ = kNegInf;
};

class PathSet {
  public:
    PathSet(const ReplicationFactory& factory, const CalibrationOptions& options, std::size_t horizon)
        : options_(options), horizon_(horizon) {
        paths_.reserve(options.replications);
        for (std::size_t i = 0; i < options.replications; ++i)
            paths_.emplace_back(factory.make(replication_seed(options.seed, i), kPosInf));
    }

    // Exact ARL at `level`, or a lower bound once it is clearly above
    // gamma * (1 + rel_tol) (further resolution would not change any decision).
    BracketPoint evaluate(double level, double threshold, bool force_exact) {
        const double gamma = options_.gamma;
        auto cap = std::min<std::size_t>(horizon_, static_cast<std::size_t>(std::ceil(2.0 * gamma)));
        while (true) {
            parallel_for(paths_.size(), options_.workers, [&](std::size_t i) { paths_[i].advance(level, cap); });
            std::vector<std::size_t> times(paths_.size());
            bool resolved = true;
            for (std::size_t i = 0; i < paths_.size(); ++i) {
                const auto t = paths_[i].hit(level);
                times[i] = t ? *t : paths_[i].time();
                if (!t && paths_[i].time() < horizon_) resolved = false;
            }
            const Summary s = summarize(times, horizon_);
            if (resolved) return {threshold, s.mean, s.std_error, true};
            if (!force_exact && s.mean > gamma * (1.0 + options_.rel_tol)) return {threshold, s.mean, 0.0, false};
            cap = std::min(horizon_, cap * 2);
        }
    }

    std::vector<std::size_t> stop_times(double level) const {
        std::vector<std::size_t> times(paths_.size());
        for (std::size_t i = 0; i < paths_.size(); ++i) {
            const auto t = paths_[i].hit(level);
            times[i] = t ? *t : horizon_;
        }
        return times;
    }

    // Smallest record value >= level over all replications: the largest level
    // that leaves every stopping time unchanged.
    double snap(double level) const {
        double out = kPosInf;
        for (const auto& p : paths_)
            if (auto v = p.first_record_at_least(level)) out = std::min(out, *v);
        return std::isfinite(out) ? out : level;
    }

  private:
    CalibrationOptions options_;
    std::size_t horizon_;
    std::vector<Path> paths_;
};

// Threshold whose level does not exceed `level`.
double threshold_for_level(ThresholdScale scale, double level) {
    double thr = level_to_threshold(scale, level);
    while (threshold_to_level(scale, thr) > level) thr = std::nextafter(thr, 0.0);
    return thr;
}

}  // namespace

ArlEstimate estimate_arl(const ReplicationFactory& factory, double threshold, std::size_t reps, std::size_t horizon,
                         std::uint64_t master_seed, std::size_t workers) {
    if (reps < 2) throw ConfigError("estimate_arl needs at least 2 replications");
    if (horizon == 0) throw ConfigError("horizon must be >= 1");
    ArlEstimate out;
    out.replications = reps;
    out.horizon = horizon;
    out.stop_times.assign(reps, 0);
    parallel_for(reps, workers, [&](std::size_t i) {
        Replication rep = factory.make(replication_seed(master_seed, i), threshold);
        const RunResult r = run(*rep.procedure, *rep.source, RunOptions{horizon, false});
        out.stop_times[i] = r.stop_time;
    });
    const Summary s = summarize(out.stop_times, horizon);
    out.mean = s.mean;
    out.std_error = s.std_error;
    out.censored = s.censored;
    return out;
}

CalibrationReport calibrate_threshold(const ReplicationFactory& factory, const CalibrationOptions& options) {
    std::vector<std::string> problems;
    if (!(options.gamma > 1.0)) problems.emplace_back("gamma must be > 1");
    if (!(options.rel_tol > 0.0 && options.rel_tol <= 0.2)) problems.emplace_back("rel_tol must lie in (0, 0.2]");
    if (options.replications < 2) problems.emplace_back("calibration needs at least 2 replications");
    if (factory.streams == 0) problems.emplace_back("factory must declare K >= 1");
    if (!problems.empty()) throw ConfigError(std::move(problems));

    const double gamma = options.gamma;
    const std::size_t horizon =
        options.horizon ? options.horizon : static_cast<std::size_t>(std::ceil(100.0 * gamma));
    PathSet paths(factory, options, horizon);

    CalibrationReport report;
    report.gamma = gamma;
    report.scale = factory.scale;
    report.replications = options.replications;
    report.horizon = horizon;
    report.seed = options.seed;

    auto level_of = [&](double y) { return threshold_to_level(factory.scale, std::exp(y)); };
    auto eval = [&](double y, bool force_exact = false) {
        BracketPoint pt = paths.evaluate(level_of(y), std::exp(y), force_exact);
        report.bracket_history.push_back(pt);
        return pt;
    };
    constexpr int kMaxExpansions = 10;

    double lo = 0.0;
    double hi = std::log(2.0 * static_cast<double>(factory.streams) * gamma);
    std::optional<BracketPoint> at_hi;

    BracketPoint at_lo = eval(lo);
    for (int expansions = 0; at_lo.arl >= gamma; ++expansions) {
        if (expansions == kMaxExpansions)
            throw CalibrationError("lower bracket still meets the ARL target after 10 expansions");
        const double width = hi - lo;
        hi = lo;
        at_hi = at_lo;
        lo -= 2.0 * width;
        at_lo = eval(lo);
    }

    int up_expansions = 0;
    double up_width = hi - lo;
    while (true) {
        if (at_hi && at_hi->exact && (at_hi->arl - gamma) / gamma <= options.rel_tol) break;
        if (hi - lo < 1e-10) {
            if (!at_hi) {
                BracketPoint pt = eval(hi);
                if (pt.arl >= gamma) {
                    at_hi = pt;
                    continue;
                }
                if (++up_expansions > kMaxExpansions)
                    throw CalibrationError("upper bracket misses the ARL target after 10 expansions");
                lo = hi;
                hi += up_width;
                up_width *= 2.0;
                continue;
            }
            if (!at_hi->exact) at_hi = eval(hi, true);
            break;
        }
        const double mid = 0.5 * (lo + hi);
        BracketPoint pt = eval(mid);
        if (pt.arl >= gamma) {
            hi = mid;
            at_hi = pt;
        } else {
            lo = mid;
        }
    }

    const double level = paths.snap(level_of(hi));
    report.threshold = threshold_for_level(factory.scale, level);
    report.level = threshold_to_level(factory.scale, report.threshold);
    const Summary s = summarize(paths.stop_times(report.level), horizon);
    report.arl_estimate = s.mean;
    report.std_error = s.std_error;
    report.censored_count = s.censored;
    report.bracket_history.push_back({report.threshold, s.mean, s.std_error, true});
    return report;
}

}  // namespace tssrp
