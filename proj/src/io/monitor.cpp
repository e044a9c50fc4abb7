#include "tssrp/io/monitor.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "tssrp/errors.hpp"

namespace tssrp::io {
namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, ',')) out.push_back(trim(cur));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

struct Row {
    std::size_t t = 0;
    std::vector<double> x;  // NaN where absent
};

Row parse_json_row(const std::string& line, std::size_t streams, std::size_t line_no) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ProtocolError("record " + std::to_string(line_no) + ": not valid JSON (" + e.what() + ")");
    }
    if (!j.is_object() || !j.contains("t") || !j["t"].is_number_unsigned() || !j.contains("x"))
        throw ProtocolError("record " + std::to_string(line_no) + ": expected {\"t\": n, \"x\": ...}");
    Row row{j["t"].get<std::size_t>(), std::vector<double>(streams, kMissing)};
    const auto& x = j["x"];
    auto take = [&](std::size_t k, const nlohmann::json& v) {
        if (v.is_null()) return;
        if (!v.is_number())
            throw DataError("t=" + std::to_string(row.t) + ", stream " + std::to_string(k + 1) + ": value is not a number");
        row.x[k] = v.get<double>();
    };
    if (x.is_array()) {
        if (x.size() != streams)
            throw ProtocolError("record " + std::to_string(line_no) + ": x array must have K entries");
        for (std::size_t k = 0; k < streams; ++k) take(k, x[k]);
    } else if (x.is_object()) {
        for (const auto& [key, v] : x.items()) {
            std::size_t k = 0;
            auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), k);
            if (ec != std::errc() || ptr != key.data() + key.size() || k == 0 || k > streams)
                throw ProtocolError("record " + std::to_string(line_no) + ": stream key '" + key + "' outside 1..K");
            take(k - 1, v);
        }
    } else {
        throw ProtocolError("record " + std::to_string(line_no) + ": x must be an object or an array");
    }
    return row;
}

Row parse_csv_row(const std::string& line, std::size_t streams, std::size_t line_no) {
    const auto cells = split_csv(line);
    if (cells.size() != streams + 1)
        throw ProtocolError("line " + std::to_string(line_no) + ": expected " + std::to_string(streams + 1) +
                            " columns, got " + std::to_string(cells.size()));
    Row row;
    auto [ptr, ec] = std::from_chars(cells[0].data(), cells[0].data() + cells[0].size(), row.t);
    if (ec != std::errc() || ptr != cells[0].data() + cells[0].size())
        throw ProtocolError("line " + std::to_string(line_no) + ": malformed time index '" + cells[0] + "'");
    row.x.assign(streams, kMissing);
    for (std::size_t k = 0; k < streams; ++k) {
        const std::string& c = cells[k + 1];
        if (c.empty()) continue;
        double v = 0.0;
        auto [p, e] = std::from_chars(c.data(), c.data() + c.size(), v);
        if (e != std::errc() || p != c.data() + c.size())
            throw DataError("t=" + std::to_string(row.t) + ", stream " + std::to_string(k + 1) + ": malformed value '" +
                            c + "'");
        row.x[k] = v;
    }
    return row;
}

void check_header(const std::string& line, std::size_t streams) {
    const auto cells = split_csv(line);
    bool ok = cells.size() == streams + 1 && cells[0] == "t";
    for (std::size_t k = 0; ok && k < streams; ++k) ok = cells[k + 1] == "x" + std::to_string(k + 1);
    if (!ok) throw ProtocolError("CSV header must be t,x1,...,x" + std::to_string(streams));
}

void write_request(std::ostream& out, std::size_t t, const SensorLayout& layout) {
    out << t << ",";
    bool first = true;
    for (std::size_t k : layout.observed()) {
        out << (first ? "" : " ") << (k + 1);
        first = false;
    }
    out << "\n" << std::flush;
}

}  // namespace

MonitorOutcome monitor(std::istream& records, std::ostream& requests, MonitoringProcedure& procedure, std::size_t r,
                       const std::string& manifest_hash, RecordFormat format) {
    const std::size_t streams = procedure.streams();
    if (r == 0 || r > streams) throw ConfigError("monitor: r must lie in 1..K");
    MonitorOutcome outcome;
    std::string line;
    std::size_t line_no = 0;
    bool header_done = false;
    std::vector<double> x(streams);

    while (true) {
        const std::size_t t = procedure.time() + 1;
        write_request(requests, t, procedure.layout());

        bool got = false;
        while (std::getline(records, line)) {
            ++line_no;
            line = trim(line);
            if (line.empty()) continue;
            if (format == RecordFormat::automatic) format = line.front() == '{' ? RecordFormat::jsonl : RecordFormat::csv;
            if (format == RecordFormat::csv && !header_done) {
                check_header(line, streams);
                header_done = true;
                continue;
            }
            got = true;
            break;
        }
        if (!got) break;

        const Row row = format == RecordFormat::jsonl ? parse_json_row(line, streams, line_no)
                                                      : parse_csv_row(line, streams, line_no);
        if (row.t != t)
            throw ProtocolError("expected time index " + std::to_string(t) + ", got " + std::to_string(row.t));
        std::fill(x.begin(), x.end(), kMissing);
        for (std::size_t k : procedure.layout().observed()) {
            if (std::isnan(row.x[k]))
                throw DataError("t=" + std::to_string(t) + ": requested stream " + std::to_string(k + 1) + " missing");
            x[k] = row.x[k];
        }
        const StepOutcome step = procedure.step(x);
        ++outcome.records;
        if (step.alarm) {
            outcome.alarm = true;
            const auto local = procedure.local_statistics();
            std::vector<std::size_t> idx(streams);
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return local[a] > local[b]; });
            const char* key = procedure.scale() == ThresholdScale::log ? "log_R" : "W";
            nlohmann::json top = nlohmann::json::array();
            for (std::size_t i = 0; i < r; ++i) top.push_back({{"stream", idx[i] + 1}, {key, local[idx[i]]}});
            outcome.report = {{"alarm", true},
                              {"alarm_time", t},
                              {"statistic", step.stat},
                              {"threshold", level_to_threshold(procedure.scale(), procedure.level())},
                              {"level", procedure.level()},
                              {"top_r_streams", top},
                              {"manifest_hash", manifest_hash}};
            return outcome;
        }
    }
    outcome.report = {{"alarm", false},
                      {"records", outcome.records},
                      {"level", procedure.level()},
                      {"manifest_hash", manifest_hash}};
    return outcome;
}

}  // namespace tssrp::io
