#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "tssrp/procedure.hpp"

namespace tssrp::io {

enum class RecordFormat { automatic, jsonl, csv };

struct MonitorOutcome {
    bool alarm = false;
    std::size_t records = 0;  // rounds processed
    nlohmann::json report;    // alarm report, or a summary when no alarm
};

/// Live monitoring under the pull protocol. Before each record the next
/// layout is written to `requests` as "t,k1 k2 ..." (1-based). Records are
/// JSON lines {"t": n, "x": {"k": value, ...}} (or "x" as an array of K
/// values with nulls) or CSV rows under a "t,x1,...,xK" header with empty
/// cells for missing values. Only requested values are read.
///
/// Throws DataError when a requested value is missing and ProtocolError when
/// the time index is not the next one expected.
MonitorOutcome monitor(std::istream& records, std::ostream& requests, MonitoringProcedure& procedure,
                       std::size_t r, const std::string& manifest_hash, RecordFormat format = RecordFormat::automatic);

}  // namespace tssrp::io
