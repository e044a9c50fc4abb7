#include "tssrp/io/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "tssrp/errors.hpp"
#include "tssrp/io/config.hpp"

namespace tssrp::io {
namespace {

std::string scale_name(ThresholdScale s) { return s == ThresholdScale::log ? "log" : "linear"; }

std::string cell(double mean, double se) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f(%.2f)", mean, se);
    return buf;
}

// TSSRP rows first, then TRAS by increasing delta.
bool row_before(const ExperimentReport& a, const ExperimentReport& b) {
    const bool ta = a.algorithm.rfind("TSSRP", 0) == 0;
    const bool tb = b.algorithm.rfind("TSSRP", 0) == 0;
    if (ta != tb) return ta;
    if (!ta) {
        try {
            return std::stod(a.prior_or_delta) < std::stod(b.prior_or_delta);
        } catch (const std::exception&) {
        }
    }
    return a.algorithm < b.algorithm;
}

}  // namespace

nlohmann::json to_json(const CalibrationReport& r, const std::string& manifest_hash) {
    nlohmann::json history = nlohmann::json::array();
    for (const auto& p : r.bracket_history)
        history.push_back({{"threshold", p.threshold}, {"arl", p.arl}, {"std_error", p.std_error}, {"exact", p.exact}});
    return {{"kind", "calibration"},
            {"gamma", r.gamma},
            {"threshold", r.threshold},
            {"level", r.level},
            {"scale", scale_name(r.scale)},
            {"arl_estimate", r.arl_estimate},
            {"std_error", r.std_error},
            {"replications", r.replications},
            {"horizon", r.horizon},
            {"censored_count", r.censored_count},
            {"seed", r.seed},
            {"bracket_history", history},
            {"manifest_hash", manifest_hash}};
}

CalibrationReport calibration_from_json(const nlohmann::json& j) {
    try {
        CalibrationReport r;
        r.gamma = j.at("gamma").get<double>();
        r.threshold = j.at("threshold").get<double>();
        r.level = j.at("level").get<double>();
        r.scale = j.at("scale").get<std::string>() == "log" ? ThresholdScale::log : ThresholdScale::linear;
        r.arl_estimate = j.at("arl_estimate").get<double>();
        r.std_error = j.at("std_error").get<double>();
        r.replications = j.at("replications").get<std::size_t>();
        r.horizon = j.at("horizon").get<std::size_t>();
        r.censored_count = j.at("censored_count").get<std::size_t>();
        r.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& p : j.at("bracket_history"))
            r.bracket_history.push_back({p.at("threshold").get<double>(), p.at("arl").get<double>(),
                                         p.at("std_error").get<double>(), p.at("exact").get<bool>()});
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed calibration report: ") + e.what());
    }
}

std::string bracket_csv(const CalibrationReport& r, const std::string& manifest_hash) {
    std::ostringstream out;
    out << "# manifest_hash=" << manifest_hash << "\n";
    out << "threshold,arl,std_error,exact\n";
    for (const auto& p : r.bracket_history)
        out << format_number(p.threshold) << "," << format_number(p.arl) << "," << format_number(p.std_error) << ","
            << (p.exact ? 1 : 0) << "\n";
    return out.str();
}

nlohmann::json to_json(const ExperimentReport& r) {
    return {{"kind", "experiment"},
            {"algorithm", r.algorithm},
            {"prior_or_delta", r.prior_or_delta},
            {"rule", r.rule},
            {"K", r.streams},
            {"q", r.sensors},
            {"r", r.r},
            {"n_changes", r.n_changes},
            {"gamma", r.gamma},
            {"threshold", r.threshold},
            {"in_control", r.in_control},
            {"replications", r.replications},
            {"horizon", r.horizon},
            {"delay_convention", r.in_control ? "T" : "T - nu"},
            {"mean_delay", r.mean_delay},
            {"std_error", r.std_error},
            {"false_alarms", r.false_alarms},
            {"censored", r.censored},
            {"occupancy", r.occupancy},
            {"occupancy_std_error", r.occupancy_std_error},
            {"manifest_hash", r.manifest_hash}};
}

ExperimentReport experiment_from_json(const nlohmann::json& j) {
    try {
        ExperimentReport r;
        r.algorithm = j.at("algorithm").get<std::string>();
        r.prior_or_delta = j.at("prior_or_delta").get<std::string>();
        r.rule = j.value("rule", std::string());
        r.streams = j.at("K").get<std::size_t>();
        r.sensors = j.at("q").get<std::size_t>();
        r.r = j.at("r").get<std::size_t>();
        r.n_changes = j.at("n_changes").get<std::size_t>();
        r.gamma = j.at("gamma").get<double>();
        r.threshold = j.at("threshold").get<double>();
        r.in_control = j.at("in_control").get<bool>();
        r.replications = j.at("replications").get<std::size_t>();
        r.horizon = j.at("horizon").get<std::size_t>();
        r.mean_delay = j.at("mean_delay").get<double>();
        r.std_error = j.at("std_error").get<double>();
        r.false_alarms = j.at("false_alarms").get<std::size_t>();
        r.censored = j.at("censored").get<std::size_t>();
        r.occupancy = j.at("occupancy").get<std::vector<double>>();
        r.occupancy_std_error = j.at("occupancy_std_error").get<std::vector<double>>();
        r.manifest_hash = j.value("manifest_hash", std::string());
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed experiment report: ") + e.what());
    }
}

std::string delays_csv(const ExperimentReport& r) {
    std::ostringstream out;
    out << "# manifest_hash=" << r.manifest_hash << "\n";
    out << "replication,delay\n";
    for (std::size_t i = 0; i < r.delays.size(); ++i) out << (i + 1) << "," << r.delays[i] << "\n";
    return out.str();
}

DelayTable build_table(const std::vector<ExperimentReport>& reports) {
    if (reports.empty()) throw DataError("no experiment reports to tabulate");
    DelayTable t;
    t.gamma = reports.front().gamma;
    for (const auto& r : reports)
        if (r.gamma != t.gamma)
            throw DataError("reports mix gamma = " + format_number(t.gamma) + " and gamma = " + format_number(r.gamma) +
                            "; tabulate one ARL level at a time");

    std::vector<const ExperimentReport*> ordered;
    for (const auto& r : reports) ordered.push_back(&r);
    std::stable_sort(ordered.begin(), ordered.end(), [](auto* a, auto* b) { return row_before(*a, *b); });
    for (const auto* r : ordered) {
        if (std::find(t.rows.begin(), t.rows.end(), r->algorithm) == t.rows.end()) {
            t.rows.push_back(r->algorithm);
            t.row_params.push_back(r->prior_or_delta);
        }
        if (std::find(t.columns.begin(), t.columns.end(), r->n_changes) == t.columns.end())
            t.columns.push_back(r->n_changes);
    }
    std::sort(t.columns.begin(), t.columns.end());
    t.cells.assign(t.rows.size(), std::vector<std::optional<std::pair<double, double>>>(t.columns.size()));
    for (const auto& r : reports) {
        const auto i = static_cast<std::size_t>(std::find(t.rows.begin(), t.rows.end(), r.algorithm) - t.rows.begin());
        const auto j =
            static_cast<std::size_t>(std::find(t.columns.begin(), t.columns.end(), r.n_changes) - t.columns.begin());
        if (t.cells[i][j])
            throw DataError("two reports for " + r.algorithm + " with " + std::to_string(r.n_changes) + " changes");
        t.cells[i][j] = std::make_pair(r.mean_delay, r.std_error);
    }
    return t;
}

std::string render_table(const DelayTable& t) {
    std::size_t width = 24;
    for (const auto& row : t.rows) width = std::max(width, row.size() + 2);
    std::ostringstream out;
    out << "average detection delay, mean(stderr), gamma = " << format_number(t.gamma) << "\n";
    std::string head = "changes";
    head.resize(width, ' ');
    out << head;
    for (std::size_t c : t.columns) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%14zu", c);
        out << buf;
    }
    out << "\n";
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        std::string label = t.rows[i];
        label.resize(width, ' ');
        out << label;
        for (std::size_t j = 0; j < t.columns.size(); ++j) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%14s", t.cells[i][j] ? cell(t.cells[i][j]->first, t.cells[i][j]->second).c_str() : "-");
            out << buf;
        }
        out << "\n";
    }
    return out.str();
}

std::string table_csv(const DelayTable& t) {
    std::ostringstream out;
    out << "algorithm,prior_or_delta,n_changes,mean_delay,stderr\n";
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        for (std::size_t j = 0; j < t.columns.size(); ++j)
            if (t.cells[i][j])
                out << t.rows[i] << "," << t.row_params[i] << "," << t.columns[j] << ","
                    << format_number(t.cells[i][j]->first) << "," << format_number(t.cells[i][j]->second) << "\n";
    return out.str();
}

std::vector<ExperimentReport> load_reports(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw DataError("not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<ExperimentReport> out;
    for (const auto& f : files) {
        std::ifstream in(f);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw DataError(f.string() + ": " + e.what());
        }
        if (j.is_object() && j.value("kind", std::string()) == "experiment") out.push_back(experiment_from_json(j));
    }
    if (out.empty()) throw DataError("no experiment reports found in " + dir.string());
    return out;
}

}  // namespace tssrp::io
