#include "tssrp/io/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "tssrp/errors.hpp"

namespace tssrp::io {
namespace {

struct Entry {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

using Section = std::vector<Entry>;

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::istringstream in{std::string(s)};
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::optional<double> to_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

template <class Int>
std::optional<Int> to_int(std::string_view s) {
    s = trim(s);
    Int v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

// Collects problems instead of stopping at the first one.
class Diagnostics {
  public:
    void add(std::size_t line, const std::string& where, const std::string& msg) {
        problems_.push_back((line ? "line " + std::to_string(line) + ": " : std::string()) + where + ": " + msg);
    }
    void add(const std::string& msg) { problems_.push_back(msg); }
    bool empty() const { return problems_.empty(); }
    void absorb(const ConfigError& e) {
        for (const auto& v : e.violations()) problems_.push_back(v);
    }
    [[noreturn]] void raise(const std::string& source) {
        for (auto& p : problems_) p = source + ": " + p;
        throw ConfigError(std::move(problems_));
    }

  private:
    std::vector<std::string> problems_;
};

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"scenario",
         {"K", "q", "r", "gamma", "change_time", "changed", "random_changes", "candidates", "replications", "seed",
          "horizon", "algorithm"}},
        {"models", {"belief", "truth"}},
        {"prior", {"preset", "label", "default"}},
        {"rule", {"kind", "r", "threshold", "log_threshold", "delta"}},
        {"calibration", {"replications", "horizon", "rel_tol", "seed", "workers"}},
        {"network", {"preset", "nodes", "edge", "noise_sd", "standardize", "shift"}},
    };
    return keys;
}

bool indexed_key(const std::string& section, const std::string& key) {
    auto prefixed = [&](const char* p) { return key.rfind(p, 0) == 0 && key.size() > std::string(p).size(); };
    if (section == "models") return prefixed("belief.") || prefixed("truth.");
    if (section == "prior") return prefixed("stream.");
    return false;
}

std::map<std::string, Section> lex(std::string_view text, Diagnostics& diag) {
    std::map<std::string, Section> sections;
    std::string current;
    std::size_t line_no = 0;
    std::set<std::pair<std::string, std::string>> seen;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = text.find('\n', pos);
        std::string_view raw = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;
        if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        std::string_view line = trim(raw);
        if (line.empty() || line.front() == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                diag.add(line_no, "syntax", "unterminated section header");
                continue;
            }
            current = std::string(trim(line.substr(1, line.size() - 2)));
            if (!known_keys().count(current)) {
                diag.add(line_no, "[" + current + "]", "unknown section");
                current = "?";
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            diag.add(line_no, "syntax", "expected 'key = value'");
            continue;
        }
        std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));
        if (current.empty()) {
            diag.add(line_no, key, "key outside any section");
            continue;
        }
        if (current == "?") continue;
        const auto& allowed = known_keys().at(current);
        if (!allowed.count(key) && !indexed_key(current, key)) {
            diag.add(line_no, "[" + current + "] " + key, "unknown key");
            continue;
        }
        if (!(current == "network" && key == "edge") && !seen.insert({current, key}).second) {
            diag.add(line_no, "[" + current + "] " + key, "duplicate key");
            continue;
        }
        sections[current].push_back({key, value, line_no});
    }
    return sections;
}

const Entry* find(const std::map<std::string, Section>& sections, const std::string& section, const std::string& key) {
    auto it = sections.find(section);
    if (it == sections.end()) return nullptr;
    for (const Entry& e : it->second)
        if (e.key == key) return &e;
    return nullptr;
}

std::string where(const std::string& section, const Entry& e) { return "[" + section + "] " + e.key; }

template <class Int>
std::optional<Int> get_int(const std::map<std::string, Section>& s, const std::string& section, const std::string& key,
                           Diagnostics& diag) {
    const Entry* e = find(s, section, key);
    if (!e) return std::nullopt;
    auto v = to_int<Int>(e->value);
    if (!v) diag.add(e->line, where(section, *e), "malformed integer '" + e->value + "'");
    return v;
}

std::optional<double> get_double(const std::map<std::string, Section>& s, const std::string& section,
                                 const std::string& key, Diagnostics& diag) {
    const Entry* e = find(s, section, key);
    if (!e) return std::nullopt;
    auto v = to_double(e->value);
    if (!v) diag.add(e->line, where(section, *e), "malformed number '" + e->value + "'");
    return v;
}

// "1-10, 15" -> 0-based sorted list.
std::optional<std::vector<std::size_t>> parse_ranges(const std::string& text, std::string& error) {
    std::vector<std::size_t> out;
    std::string normalized = text;
    std::replace(normalized.begin(), normalized.end(), ',', ' ');
    for (const auto& tok : split_ws(normalized)) {
        const auto dash = tok.find('-');
        std::optional<std::size_t> a, b;
        if (dash == std::string::npos) {
            a = b = to_int<std::size_t>(tok);
        } else {
            a = to_int<std::size_t>(std::string_view(tok).substr(0, dash));
            b = to_int<std::size_t>(std::string_view(tok).substr(dash + 1));
        }
        if (!a || !b || *a == 0 || *b < *a) {
            error = "malformed stream range '" + tok + "' (streams are numbered from 1)";
            return std::nullopt;
        }
        for (std::size_t k = *a; k <= *b; ++k) out.push_back(k - 1);
    }
    std::sort(out.begin(), out.end());
    if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
        error = "stream listed twice";
        return std::nullopt;
    }
    return out;
}

std::string format_ranges(const std::vector<std::size_t>& zero_based) {
    std::vector<std::size_t> v = zero_based;
    std::sort(v.begin(), v.end());
    std::string out;
    for (std::size_t i = 0; i < v.size();) {
        std::size_t j = i;
        while (j + 1 < v.size() && v[j + 1] == v[j] + 1) ++j;
        if (!out.empty()) out += ",";
        out += std::to_string(v[i] + 1);
        if (j > i) out += "-" + std::to_string(v[j] + 1);
        i = j + 1;
    }
    return out;
}

std::optional<StreamModel> parse_model(const std::string& text, std::string& error) {
    const auto tok = split_ws(text);
    if (tok.empty()) {
        error = "empty model";
        return std::nullopt;
    }
    std::vector<double> nums;
    for (std::size_t i = 1; i < tok.size(); ++i) {
        auto v = to_double(tok[i]);
        if (!v) {
            error = "malformed number '" + tok[i] + "'";
            return std::nullopt;
        }
        nums.push_back(*v);
    }
    try {
        if (tok[0] == "gaussian") {
            if (nums.size() == 2) return StreamModel::gaussian(nums[0], nums[1]);
            if (nums.size() == 3) return StreamModel::gaussian(nums[0], nums[1], nums[2]);
            if (nums.size() == 4) return StreamModel(Gaussian{nums[0], nums[1]}, Gaussian{nums[2], nums[3]});
            error = "gaussian takes 'pre post [sd]' or 'pre_mean pre_sd post_mean post_sd'";
            return std::nullopt;
        }
        if (tok[0] == "student_t") {
            if (nums.size() == 3) return StreamModel::student_t(nums[0], nums[1], nums[2]);
            if (nums.size() == 4) return StreamModel(StudentT{nums[0], nums[1]}, StudentT{nums[2], nums[3]});
            error = "student_t takes 'df pre post' or 'pre_df pre_loc post_df post_loc'";
            return std::nullopt;
        }
    } catch (const Error& e) {
        error = e.what();
        return std::nullopt;
    }
    error = "unknown model family '" + tok[0] + "' (gaussian, student_t)";
    return std::nullopt;
}

std::string format_model(const StreamModel& m) {
    if (const auto* g0 = std::get_if<Gaussian>(&m.pre())) {
        if (const auto* g1 = std::get_if<Gaussian>(&m.post())) {
            if (g0->sd == g1->sd)
                return "gaussian " + format_number(g0->mean) + " " + format_number(g1->mean) + " " +
                       format_number(g0->sd);
            return "gaussian " + format_number(g0->mean) + " " + format_number(g0->sd) + " " +
                   format_number(g1->mean) + " " + format_number(g1->sd);
        }
    }
    if (const auto* t0 = std::get_if<StudentT>(&m.pre())) {
        if (const auto* t1 = std::get_if<StudentT>(&m.post())) {
            if (t0->df == t1->df)
                return "student_t " + format_number(t0->df) + " " + format_number(t0->location) + " " +
                       format_number(t1->location);
            return "student_t " + format_number(t0->df) + " " + format_number(t0->location) + " " +
                   format_number(t1->df) + " " + format_number(t1->location);
        }
    }
    throw ConfigError("cannot write a model whose pre- and post-change families differ");
}

std::optional<PriorDescriptor> parse_prior(const std::string& text, std::string& error) {
    const auto tok = split_ws(text);
    if (tok.empty()) {
        error = "empty prior";
        return std::nullopt;
    }
    std::vector<double> nums;
    for (std::size_t i = 1; i < tok.size(); ++i) {
        auto v = to_double(tok[i]);
        if (!v) {
            error = "malformed number '" + tok[i] + "'";
            return std::nullopt;
        }
        nums.push_back(*v);
    }
    if (tok[0] == "uniform" && nums.size() == 2) return UniformPrior{nums[0], nums[1]};
    if (tok[0] == "point" && nums.size() == 1) return PointMass{nums[0]};
    if (tok[0] == "tabulated" && nums.size() >= 2) return TabulatedPrior{nums};
    error = "expected 'uniform lo hi', 'point v' or 'tabulated q0 q1 ...'";
    return std::nullopt;
}

std::string format_prior(const PriorDescriptor& d) {
    if (const auto* u = std::get_if<UniformPrior>(&d)) return "uniform " + format_number(u->lo) + " " + format_number(u->hi);
    if (const auto* p = std::get_if<PointMass>(&d)) return "point " + format_number(p->value);
    std::string out = "tabulated";
    for (double q : std::get<TabulatedPrior>(d).quantiles) out += " " + format_number(q);
    return out;
}

std::optional<std::size_t> stream_index(const std::string& key, std::size_t streams, std::string& error) {
    const auto dot = key.find('.');
    auto k = to_int<std::size_t>(std::string_view(key).substr(dot + 1));
    if (!k || *k == 0 || *k > streams) {
        error = "stream index must lie in 1.." + std::to_string(streams);
        return std::nullopt;
    }
    return *k - 1;
}

// Per-stream list from "<name> = default" plus "<prefix>k = override" lines.
template <class T, class Parse>
std::optional<std::vector<T>> per_stream(const std::map<std::string, Section>& s, const std::string& section,
                                         const std::string& name, const std::string& prefix, std::size_t streams,
                                         Parse parse, Diagnostics& diag) {
    auto it = s.find(section);
    if (it == s.end()) return std::nullopt;
    std::optional<T> fallback;
    std::map<std::size_t, T> overrides;
    bool any = false;
    for (const Entry& e : it->second) {
        const bool base = e.key == name;
        const bool indexed = e.key.rfind(prefix, 0) == 0;
        if (!base && !indexed) continue;
        any = true;
        std::string error;
        auto value = parse(e.value, error);
        if (!value) {
            diag.add(e.line, where(section, e), error);
            continue;
        }
        if (base) {
            fallback = std::move(*value);
        } else if (auto k = stream_index(e.key, streams, error)) {
            overrides.emplace(*k, std::move(*value));
        } else {
            diag.add(e.line, where(section, e), error);
        }
    }
    if (!any) return std::nullopt;
    std::vector<T> out;
    out.reserve(streams);
    for (std::size_t k = 0; k < streams; ++k) {
        if (auto o = overrides.find(k); o != overrides.end())
            out.push_back(o->second);
        else if (fallback)
            out.push_back(*fallback);
        else {
            diag.add("[" + section + "]: no " + name + " for stream " + std::to_string(k + 1) + " and no default");
            return std::nullopt;
        }
    }
    return out;
}

BayesNetSpec parse_network(const std::map<std::string, Section>& s, Diagnostics& diag) {
    BayesNetSpec net;
    bool from_preset = false;
    if (const Entry* e = find(s, "network", "preset")) {
        if (e->value == "hot_forming_illustrative") {
            net = BayesNetSpec::hot_forming_illustrative();
            from_preset = true;
        } else {
            diag.add(e->line, where("network", *e), "unknown network preset '" + e->value + "'");
        }
    }
    if (const Entry* e = find(s, "network", "nodes")) net.nodes = split_ws(e->value);
    if (find(s, "network", "edge")) net.edges.clear();
    for (const Entry& e : s.at("network")) {
        if (e.key != "edge") continue;
        const auto tok = split_ws(e.value);
        std::optional<std::size_t> from, to;
        std::optional<double> w;
        if (tok.size() == 3) {
            from = to_int<std::size_t>(tok[0]);
            to = to_int<std::size_t>(tok[1]);
            w = to_double(tok[2]);
        }
        if (!from || !to || !w || *from == 0 || *to == 0) {
            diag.add(e.line, where("network", e), "expected 'from to weight' with 1-based node numbers");
            continue;
        }
        net.edges.push_back({*from - 1, *to - 1, *w});
    }
    if (const Entry* e = find(s, "network", "noise_sd")) {
        net.noise_sd.clear();
        for (const auto& tok : split_ws(e->value)) {
            auto v = to_double(tok);
            if (!v) {
                diag.add(e->line, where("network", *e), "malformed number '" + tok + "'");
                break;
            }
            net.noise_sd.push_back(*v);
        }
    }
    if (const Entry* e = find(s, "network", "standardize")) {
        if (e->value == "true")
            net.standardize = true;
        else if (e->value == "false")
            net.standardize = false;
        else
            diag.add(e->line, where("network", *e), "expected true or false");
    }
    if (!from_preset && net.nodes.empty()) diag.add("[network]: nodes or preset required");
    if (net.noise_sd.empty()) net.noise_sd.assign(net.nodes.size(), 1.0);
    return net;
}

}  // namespace

std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

ExperimentConfig parse_config(std::string_view text, const std::string& source) {
    Diagnostics diag;
    const auto s = lex(text, diag);
    ExperimentConfig cfg;
    Scenario& sc = cfg.scenario;

    auto required_size = [&](const std::string& section, const std::string& key) -> std::size_t {
        auto v = get_int<std::size_t>(s, section, key, diag);
        if (!v && !find(s, section, key)) diag.add("[" + section + "] " + key + ": required");
        return v.value_or(0);
    };
    sc.streams = required_size("scenario", "K");
    sc.sensors = required_size("scenario", "q");
    if (auto g = get_double(s, "scenario", "gamma", diag))
        sc.gamma = *g;
    else if (!find(s, "scenario", "gamma"))
        diag.add("[scenario] gamma: required");

    auto r_scenario = get_int<std::size_t>(s, "scenario", "r", diag);
    auto r_rule = get_int<std::size_t>(s, "rule", "r", diag);
    if (r_scenario && r_rule && *r_scenario != *r_rule)
        diag.add("[scenario] r and [rule] r disagree (" + std::to_string(*r_scenario) + " vs " +
                 std::to_string(*r_rule) + ")");
    sc.r = r_rule ? *r_rule : r_scenario ? *r_scenario : sc.sensors;

    if (const Entry* e = find(s, "scenario", "change_time")) {
        if (e->value == "never")
            sc.change_time = std::nullopt;
        else if (auto v = to_int<std::size_t>(e->value))
            sc.change_time = *v;
        else
            diag.add(e->line, where("scenario", *e), "expected a positive integer or 'never'");
    }
    for (const char* key : {"changed", "candidates"}) {
        if (const Entry* e = find(s, "scenario", key)) {
            std::string error;
            if (auto v = parse_ranges(e->value, error))
                (std::string(key) == "changed" ? sc.changed : sc.candidates) = *v;
            else
                diag.add(e->line, where("scenario", *e), error);
        }
    }
    sc.random_changes = get_int<std::size_t>(s, "scenario", "random_changes", diag).value_or(0);
    sc.replications = get_int<std::size_t>(s, "scenario", "replications", diag).value_or(sc.replications);
    sc.seed = get_int<std::uint64_t>(s, "scenario", "seed", diag).value_or(sc.seed);
    sc.horizon = get_int<std::size_t>(s, "scenario", "horizon", diag).value_or(0);

    std::string algorithm = "tssrp";
    if (const Entry* e = find(s, "scenario", "algorithm")) {
        algorithm = e->value;
        if (algorithm != "tssrp" && algorithm != "tras") {
            diag.add(e->line, where("scenario", *e), "expected tssrp or tras");
            algorithm = "tssrp";
        }
    }

    if (s.count("network")) {
        sc.network = parse_network(s, diag);
        if (auto shift = get_double(s, "network", "shift", diag)) sc.network_shift = *shift;
    }

    const std::size_t K = sc.streams;
    if (K > 0) {
        auto belief = per_stream<StreamModel>(s, "models", "belief", "belief.", K, parse_model, diag);
        if (belief)
            sc.detector_models = std::move(*belief);
        else if (diag.empty())
            diag.add("[models] belief: required");
        if (auto truth = per_stream<StreamModel>(s, "models", "truth", "truth.", K, parse_model, diag))
            sc.truth_models = std::move(*truth);
        else if (!sc.network)
            sc.truth_models = sc.detector_models;
    }

    if (algorithm == "tssrp") {
        TssrpSpec spec;
        if (const Entry* e = find(s, "rule", "kind")) {
            try {
                spec.rule = parse_rule_kind(e->value);
            } catch (const ConfigError& err) {
                diag.add(e->line, where("rule", *e), err.what());
            }
        }
        if (const Entry* e = find(s, "prior", "label")) spec.prior_label = e->value;
        if (const Entry* e = find(s, "prior", "preset")) {
            if (find(s, "prior", "default") || std::any_of(s.at("prior").begin(), s.at("prior").end(), [](const Entry& x) {
                    return x.key.rfind("stream.", 0) == 0;
                }))
                diag.add(e->line, where("prior", *e), "preset cannot be combined with default or stream.k");
            else if (auto p = parse_prior_preset(e->value)) {
                try {
                    if (K > 0) spec.prior = PriorSpec::preset(*p, K);
                } catch (const ConfigError& err) {
                    diag.add(e->line, where("prior", *e), err.what());
                }
            } else {
                diag.add(e->line, where("prior", *e), "unknown preset '" + e->value + "' (G0, G1, G2, G3)");
            }
        } else if (K > 0) {
            if (auto d = per_stream<PriorDescriptor>(s, "prior", "default", "stream.", K, parse_prior, diag)) {
                try {
                    spec.prior = PriorSpec(std::move(*d));
                } catch (const ConfigError& err) {
                    diag.absorb(err);
                }
            } else if (!s.count("prior")) {
                diag.add("[prior]: preset or default required for tssrp");
            }
        }
        if (find(s, "rule", "delta")) diag.add("[rule] delta: only used by tras");
        cfg.algorithm = std::move(spec);
    } else {
        TrasSpec spec;
        if (auto d = get_double(s, "rule", "delta", diag)) spec.delta = *d;
        if (find(s, "rule", "kind")) diag.add("[rule] kind: tras always uses the top-r sum of its CUSUMs");
        cfg.algorithm = spec;
    }

    const Entry* thr = find(s, "rule", "threshold");
    const Entry* log_thr = find(s, "rule", "log_threshold");
    if (thr && log_thr) diag.add(log_thr->line, where("rule", *log_thr), "give threshold or log_threshold, not both");
    if (thr) {
        if (auto v = to_double(thr->value))
            cfg.threshold = *v;
        else
            diag.add(thr->line, where("rule", *thr), "malformed number '" + thr->value + "'");
    } else if (log_thr) {
        if (auto v = to_double(log_thr->value))
            cfg.threshold = std::exp(*v);
        else
            diag.add(log_thr->line, where("rule", *log_thr), "malformed number '" + log_thr->value + "'");
    }
    if (cfg.threshold && (std::isnan(*cfg.threshold) || *cfg.threshold < 0.0)) diag.add("[rule] threshold: must be >= 0");

    CalibrationOptions& cal = cfg.calibration;
    cal.gamma = sc.gamma;
    cal.replications = get_int<std::size_t>(s, "calibration", "replications", diag).value_or(cal.replications);
    cal.horizon = get_int<std::size_t>(s, "calibration", "horizon", diag).value_or(0);
    cal.rel_tol = get_double(s, "calibration", "rel_tol", diag).value_or(cal.rel_tol);
    cal.seed = get_int<std::uint64_t>(s, "calibration", "seed", diag).value_or(cal.seed);
    cal.workers = get_int<std::size_t>(s, "calibration", "workers", diag).value_or(cal.workers);
    if (!(cal.rel_tol > 0.0 && cal.rel_tol <= 0.2)) diag.add("[calibration] rel_tol: must lie in (0, 0.2]");
    if (cal.replications < 2) diag.add("[calibration] replications: must be >= 2");

    if (!diag.empty()) diag.raise(source);

    try {
        sc.validate();
        if (const auto* t = std::get_if<TssrpSpec>(&cfg.algorithm)) {
            DetectorConfig d;
            d.streams = sc.streams;
            d.sensors = sc.sensors;
            d.models = sc.detector_models;
            d.prior = t->prior;
            d.rule = {t->rule, sc.r, cfg.threshold.value_or(1.0)};
            d.validate();
        } else {
            TrasConfig c;
            c.streams = sc.streams;
            c.sensors = sc.sensors;
            c.r = sc.r;
            c.delta = std::get<TrasSpec>(cfg.algorithm).delta;
            c.threshold = cfg.threshold.value_or(1.0);
            c.models = sc.detector_models;
            c.validate();
        }
    } catch (const ConfigError& e) {
        std::set<std::string> unique;
        for (const auto& v : e.violations())
            if (unique.insert(v).second) diag.add(v);
    }
    if (!diag.empty()) diag.raise(source);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

std::string emit_config(const ExperimentConfig& cfg) {
    const Scenario& sc = cfg.scenario;
    std::ostringstream out;
    const bool tssrp = std::holds_alternative<TssrpSpec>(cfg.algorithm);

    out << "[scenario]\n";
    out << "K = " << sc.streams << "\n";
    out << "q = " << sc.sensors << "\n";
    out << "gamma = " << format_number(sc.gamma) << "\n";
    out << "change_time = " << (sc.change_time ? std::to_string(*sc.change_time) : "never") << "\n";
    out << "changed = " << format_ranges(sc.changed) << "\n";
    out << "random_changes = " << sc.random_changes << "\n";
    out << "candidates = " << format_ranges(sc.candidates) << "\n";
    out << "replications = " << sc.replications << "\n";
    out << "seed = " << sc.seed << "\n";
    out << "horizon = " << sc.horizon << "\n";
    out << "algorithm = " << (tssrp ? "tssrp" : "tras") << "\n";

    out << "\n[models]\n";
    auto write_models = [&](const char* name, const std::vector<StreamModel>& models) {
        if (models.empty()) return;
        out << name << " = " << format_model(models.front()) << "\n";
        for (std::size_t k = 1; k < models.size(); ++k)
            if (!(models[k] == models.front())) out << name << "." << (k + 1) << " = " << format_model(models[k]) << "\n";
    };
    write_models("belief", sc.detector_models);
    if (!sc.network || !sc.truth_models.empty()) write_models("truth", sc.truth_models);

    if (const auto* t = std::get_if<TssrpSpec>(&cfg.algorithm)) {
        out << "\n[prior]\n";
        if (auto p = t->prior.preset_name()) {
            out << "preset = " << to_string(*p) << "\n";
        } else if (t->prior.size() > 0) {
            const auto& d = t->prior.descriptors();
            out << "default = " << format_prior(d.front()) << "\n";
            for (std::size_t k = 1; k < d.size(); ++k)
                if (!(d[k] == d.front())) out << "stream." << (k + 1) << " = " << format_prior(d[k]) << "\n";
        }
        if (!t->prior_label.empty()) out << "label = " << t->prior_label << "\n";
    }

    out << "\n[rule]\n";
    if (const auto* t = std::get_if<TssrpSpec>(&cfg.algorithm))
        out << "kind = " << to_string(t->rule) << "\n";
    else
        out << "delta = " << format_number(std::get<TrasSpec>(cfg.algorithm).delta) << "\n";
    out << "r = " << sc.r << "\n";
    if (cfg.threshold) out << "threshold = " << format_number(*cfg.threshold) << "\n";

    const CalibrationOptions& cal = cfg.calibration;
    out << "\n[calibration]\n";
    out << "replications = " << cal.replications << "\n";
    out << "horizon = " << cal.horizon << "\n";
    out << "rel_tol = " << format_number(cal.rel_tol) << "\n";
    out << "seed = " << cal.seed << "\n";
    out << "workers = " << cal.workers << "\n";

    if (sc.network) {
        const BayesNetSpec& net = *sc.network;
        out << "\n[network]\n";
        out << "nodes =";
        for (const auto& n : net.nodes) out << " " << n;
        out << "\n";
        for (const Edge& e : net.edges)
            out << "edge = " << (e.from + 1) << " " << (e.to + 1) << " " << format_number(e.weight) << "\n";
        out << "noise_sd =";
        for (double v : net.noise_sd) out << " " << format_number(v);
        out << "\n";
        out << "standardize = " << (net.standardize ? "true" : "false") << "\n";
        out << "shift = " << format_number(sc.network_shift) << "\n";
    }
    return out.str();
}

DetectorConfig detector_config(const ExperimentConfig& config, double threshold) {
    const auto* t = std::get_if<TssrpSpec>(&config.algorithm);
    if (!t) throw ConfigError("detector_config needs algorithm = tssrp");
    DetectorConfig d;
    d.streams = config.scenario.streams;
    d.sensors = config.scenario.sensors;
    d.models = config.scenario.detector_models;
    d.prior = t->prior;
    d.rule = {t->rule, config.scenario.r, threshold};
    d.seed = config.scenario.seed;
    d.validate();
    return d;
}

}  // namespace tssrp::io
