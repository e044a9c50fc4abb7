#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tssrp/calibration.hpp"
#include "tssrp/errors.hpp"
#include "tssrp/io/config.hpp"
#include "tssrp/io/manifest.hpp"
#include "tssrp/io/monitor.hpp"
#include "tssrp/io/report.hpp"
#include "tssrp/rng.hpp"
#include "tssrp/sim.hpp"
#include "tssrp/verify.hpp"

namespace fs = std::filesystem;
using namespace tssrp;

namespace {

enum Exit : int {
    kOk = 0,
    kAlarm = 2,
    kConfig = 3,
    kData = 4,
    kProtocol = 5,
    kCalibration = 6,
    kVerification = 7,
    kInternal = 8,
};

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

std::string slug(const std::string& s) {
    std::string out;
    for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) || c == '.' ? c : '_';
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out;
}

double threshold_from(const io::ExperimentConfig& cfg, const std::optional<double>& cli,
                      const std::string& calibration_file) {
    if (cli) return *cli;
    if (!calibration_file.empty()) {
        std::ifstream in(calibration_file);
        if (!in) throw ConfigError("cannot read calibration report " + calibration_file);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(calibration_file + ": " + e.what());
        }
        return io::calibration_from_json(j).threshold;
    }
    if (cfg.threshold) return *cfg.threshold;
    throw ConfigError("no threshold: set [rule] threshold, --threshold or --calibration");
}

struct Common {
    std::string config;
    fs::path out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
};

int cmd_calibrate(const Common& c, std::optional<std::size_t> reps, std::size_t validate,
                  const std::vector<std::string>& argv) {
    io::ExperimentConfig cfg = io::load_config(c.config);
    if (c.seed) cfg.calibration.seed = *c.seed;
    if (reps) cfg.calibration.replications = *reps;
    CalibrationOptions opts = cfg.calibration;
    if (c.workers) opts.workers = *c.workers;

    io::RunManifest manifest = io::make_manifest(cfg, opts.seed, "calibrate", {"validate=" + std::to_string(validate)});
    manifest.command_line = argv;
    manifest.started = io::utc_timestamp();

    const ReplicationFactory factory = in_control_factory(cfg.scenario, cfg.algorithm);
    const CalibrationReport report = calibrate_threshold(factory, opts);
    nlohmann::json j = io::to_json(report, manifest.hash);
    j["algorithm"] = algorithm_label(cfg.algorithm);
    if (validate > 0) {
        const ArlEstimate v = estimate_arl(factory, report.threshold, validate, report.horizon,
                                           derive_seed(opts.seed, Purpose::Validation), opts.workers);
        j["validation"] = {{"replications", validate}, {"arl", v.mean}, {"std_error", v.std_error},
                           {"censored", v.censored}};
    }

    fs::create_directories(c.out);
    write_file(c.out / "calibration.json", j.dump(2) + "\n");
    write_file(c.out / "bracket.csv", io::bracket_csv(report, manifest.hash));
    manifest.finished = io::utc_timestamp();
    manifest.outputs = {(c.out / "calibration.json").string(), (c.out / "bracket.csv").string()};
    io::write_manifest(manifest, c.out / "manifest.json");
    std::cout << j.dump(2) << "\n";
    return kOk;
}

int cmd_simulate(const Common& c, std::optional<double> threshold, const std::string& calibration,
                 std::optional<std::size_t> reps, const std::vector<std::string>& argv) {
    io::ExperimentConfig cfg = io::load_config(c.config);
    if (c.seed) cfg.scenario.seed = *c.seed;
    if (reps) cfg.scenario.replications = *reps;
    const double thr = threshold_from(cfg, threshold, calibration);

    io::RunManifest manifest =
        io::make_manifest(cfg, cfg.scenario.seed, "simulate", {"threshold=" + io::format_number(thr)});
    manifest.command_line = argv;
    manifest.started = io::utc_timestamp();

    ExperimentReport report =
        run_experiment(cfg.scenario, cfg.algorithm, thr, cfg.scenario.seed, c.workers.value_or(cfg.calibration.workers));
    report.manifest_hash = manifest.hash;

    fs::create_directories(c.out);
    const std::string stem = slug(report.algorithm) + "_m" + std::to_string(report.n_changes);
    const fs::path json_path = c.out / (stem + ".json");
    const fs::path csv_path = c.out / (stem + "_delays.csv");
    const std::string text = io::to_json(report).dump(2) + "\n";
    write_file(json_path, text);
    write_file(csv_path, io::delays_csv(report));
    manifest.finished = io::utc_timestamp();
    manifest.outputs = {json_path.string(), csv_path.string()};
    io::write_manifest(manifest, c.out / (stem + ".manifest.json"));
    std::cout << text;
    return kOk;
}

int cmd_monitor(const Common& c, std::optional<double> threshold, const std::string& calibration,
                const std::string& input, const std::string& requests, const std::string& format) {
    const io::ExperimentConfig cfg = io::load_config(c.config);
    const double thr = threshold_from(cfg, threshold, calibration);
    const std::uint64_t seed = c.seed.value_or(cfg.scenario.seed);
    const io::RunManifest manifest =
        io::make_manifest(cfg, seed, "monitor", {"threshold=" + io::format_number(thr)});

    const ReplicationBuilder builder(cfg.scenario, cfg.algorithm);
    auto procedure = builder.procedure(thr, seed);

    std::ifstream in_file;
    std::istream* in = &std::cin;
    if (input != "-") {
        in_file.open(input);
        if (!in_file) throw DataError("cannot read " + input);
        in = &in_file;
    }
    std::ofstream req_file;
    std::ostream* req = &std::cerr;
    if (requests == "-") {
        req = &std::cout;
    } else if (!requests.empty()) {
        req_file.open(requests);
        if (!req_file) throw Error("cannot write " + requests);
        req = &req_file;
    }
    io::RecordFormat fmt = io::RecordFormat::automatic;
    if (format == "jsonl") fmt = io::RecordFormat::jsonl;
    if (format == "csv") fmt = io::RecordFormat::csv;

    const io::MonitorOutcome outcome = io::monitor(*in, *req, *procedure, cfg.scenario.r, manifest.hash, fmt);
    std::cout << outcome.report.dump() << "\n";
    return outcome.alarm ? kAlarm : kOk;
}

int cmd_report(const std::string& dir, const std::string& csv) {
    const auto reports = io::load_reports(dir);
    const io::DelayTable table = io::build_table(reports);
    std::cout << io::render_table(table);
    if (!csv.empty()) write_file(csv, io::table_csv(table));
    return kOk;
}

int cmd_verify(std::uint64_t seed) {
    bool ok = true;
    for (const CheckResult& c : run_oracle_suite(seed)) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n";
        ok = ok && c.passed;
    }
    return ok ? kOk : kVerification;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bandit change-point detection: TSSRP and TRAS under sampling control"};
    app.require_subcommand(1);
    app.set_version_flag("--version", io::tool_version());
    const std::vector<std::string> args(argv, argv + argc);

    Common common;
    std::optional<std::size_t> reps;
    std::optional<double> threshold;
    std::string calibration_file;
    std::size_t validate = 0;
    std::string input = "-";
    std::string requests;
    std::string format = "auto";
    std::string report_dir;
    std::string report_csv;
    std::uint64_t verify_seed = 20240101;

    auto add_common = [&](CLI::App* sub, bool with_out) {
        sub->add_option("-c,--config", common.config, "Scenario config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", common.seed, "Override the master seed");
        sub->add_option("--workers", common.workers, "Worker threads (0 = all cores)");
        if (with_out) sub->add_option("-o,--out", common.out, "Output directory");
    };

    CLI::App* cal = app.add_subcommand("calibrate", "Find the smallest threshold meeting the ARL target");
    add_common(cal, true);
    cal->add_option("--reps", reps, "Calibration replications");
    cal->add_option("--validate", validate, "Independent validation replications (0 = skip)");

    CLI::App* sim = app.add_subcommand("simulate", "Run the configured scenario and report detection delays");
    add_common(sim, true);
    sim->add_option("--reps", reps, "Replications");
    sim->add_option("--threshold", threshold, "Threshold (A for TSSRP, a for TRAS)");
    sim->add_option("--calibration", calibration_file, "Take the threshold from a calibration.json");

    CLI::App* mon = app.add_subcommand("monitor", "Monitor a live record stream under the pull protocol");
    add_common(mon, false);
    mon->add_option("--threshold", threshold, "Threshold (A for TSSRP, a for TRAS)");
    mon->add_option("--calibration", calibration_file, "Take the threshold from a calibration.json");
    mon->add_option("-i,--input", input, "Record file, '-' for stdin");
    mon->add_option("--requests", requests, "Where layout requests go: file, '-' for stdout (default stderr)");
    mon->add_option("--format", format, "auto, jsonl or csv")->check(CLI::IsMember({"auto", "jsonl", "csv"}));

    CLI::App* rep = app.add_subcommand("report", "Tabulate experiment reports");
    rep->add_option("-d,--dir", report_dir, "Directory of experiment JSON files")->required();
    rep->add_option("--csv", report_csv, "Write the table as CSV");

    CLI::App* ver = app.add_subcommand("verify", "Run the exact oracle suites");
    ver->add_option("--seed", verify_seed, "Seed for the random records");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*cal) return cmd_calibrate(common, reps, validate, args);
        if (*sim) return cmd_simulate(common, threshold, calibration_file, reps, args);
        if (*mon) return cmd_monitor(common, threshold, calibration_file, input, requests, format);
        if (*rep) return cmd_report(report_dir, report_csv);
        if (*ver) return cmd_verify(verify_seed);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const ProtocolError& e) {
        std::cerr << "protocol error: " << e.what() << "\n";
        return kProtocol;
    } catch (const CalibrationError& e) {
        std::cerr << "calibration failed: " << e.what() << "\n";
        return kCalibration;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kData;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
    return kInternal;
}
