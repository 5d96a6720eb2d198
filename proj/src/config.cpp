#include "hnkdv/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "hnkdv/errors.hpp"
#include "hnkdv/util.hpp"

namespace hnkdv {

namespace {

[[noreturn]] void bad(const std::string& what) { throw ConfigError("config: " + what); }

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// Cuts a trailing comment, honoring quoted strings.
std::string strip_comment(const std::string& line) {
    bool in_str = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (in_str) {
            if (c == '\\') ++i;
            else if (c == '"') in_str = false;
        } else if (c == '"') {
            in_str = true;
        } else if (c == '#') {
            return line.substr(0, i);
        }
    }
    if (in_str) bad("unterminated string literal");
    return line;
}

std::int64_t to_int(const std::string& raw, const std::string& path) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
    if (ec != std::errc{} || p != raw.data() + raw.size())
        bad(path + ": expected an integer, got '" + raw + "'");
    return v;
}

double to_double(const std::string& raw, const std::string& path) {
    char* end = nullptr;
    double v = std::strtod(raw.c_str(), &end);
    if (end != raw.c_str() + raw.size() || raw.empty())
        bad(path + ": expected a number, got '" + raw + "'");
    if (!std::isfinite(v)) bad(path + ": value must be finite");
    return v;
}

bool to_bool(const std::string& raw, const std::string& path) {
    if (raw == "true") return true;
    if (raw == "false") return false;
    bad(path + ": expected true or false, got '" + raw + "'");
}

std::string to_string_lit(const std::string& raw, const std::string& path) {
    if (raw.size() < 2 || raw.front() != '"' || raw.back() != '"')
        bad(path + ": expected a quoted string");
    std::string out;
    for (size_t i = 1; i + 1 < raw.size(); ++i) {
        char c = raw[i];
        if (c != '\\') {
            out += c;
            continue;
        }
        if (++i + 1 >= raw.size()) bad(path + ": dangling escape");
        switch (raw[i]) {
            case '"': out += '"'; break;
            case '\\': out += '\\'; break;
            case 'n': out += '\n'; break;
            case 't': out += '\t'; break;
            default: bad(path + ": unsupported escape \\" + raw[i]);
        }
    }
    return out;
}

std::vector<std::string> split_array(const std::string& raw, const std::string& path) {
    if (raw.size() < 2 || raw.front() != '[' || raw.back() != ']')
        bad(path + ": expected an array [ ... ]");
    std::string body = trim(raw.substr(1, raw.size() - 2));
    std::vector<std::string> parts;
    if (body.empty()) return parts;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) bad(path + ": empty array element");
        parts.push_back(item);
    }
    return parts;
}

std::vector<int> to_int_array(const std::string& raw, const std::string& path) {
    std::vector<int> out;
    for (const auto& p : split_array(raw, path))
        out.push_back(static_cast<int>(to_int(p, path)));
    return out;
}

std::vector<double> to_double_array(const std::string& raw, const std::string& path) {
    std::vector<double> out;
    for (const auto& p : split_array(raw, path)) out.push_back(to_double(p, path));
    return out;
}

std::string fmt_arr(const std::vector<double>& vs) {
    std::string s = "[";
    for (size_t i = 0; i < vs.size(); ++i) {
        if (i) s += ", ";
        s += fmt_shortest(vs[i]);
    }
    return s + "]";
}

std::string fmt_arr(const std::vector<int>& vs) {
    std::string s = "[";
    for (size_t i = 0; i < vs.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(vs[i]);
    }
    return s + "]";
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') { out += "\\n"; continue; }
        if (c == '\t') { out += "\\t"; continue; }
        out += c;
    }
    return out + "\"";
}

bool valid_key(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

} // namespace

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::string section;
    std::vector<ModeAmplitude>* entries = nullptr;
    bool u0_seen = false, u1_seen = false;

    std::stringstream ss(text);
    std::string raw_line;
    int lineno = 0;
    while (std::getline(ss, raw_line)) {
        ++lineno;
        std::string line = trim(strip_comment(raw_line));
        if (line.empty()) continue;
        std::string where = "line " + std::to_string(lineno);

        if (line.front() == '[') {
            bool aot = line.size() >= 4 && line[1] == '[';
            size_t close = line.find(aot ? "]]" : "]");
            if (close == std::string::npos || close + (aot ? 2 : 1) != line.size())
                bad(where + ": malformed table header");
            std::string name = trim(line.substr(aot ? 2 : 1, close - (aot ? 2 : 1)));
            if (!valid_key(name)) bad(where + ": bad table name '" + name + "'");
            if (aot) {
                // the first [[u0]] / [[u1]] in a file replaces the default state
                if (name == "u0") {
                    entries = &cfg.u0;
                    if (!u0_seen) entries->clear();
                    u0_seen = true;
                } else if (name == "u1") {
                    entries = &cfg.u1;
                    if (!u1_seen) entries->clear();
                    u1_seen = true;
                } else {
                    bad(where + ": unknown entry table '" + name + "'");
                }
                entries->push_back({});
                section = name;
            } else {
                static const std::set<std::string> known = {
                    "grid", "time", "trajectory", "control",
                    "fixed_time", "simulate", "saturation"};
                if (!known.count(name)) bad(where + ": unknown table '" + name + "'");
                section = name;
                entries = nullptr;
            }
            continue;
        }

        size_t eq = line.find('=');
        if (eq == std::string::npos) bad(where + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (!valid_key(key)) bad(where + ": bad key '" + key + "'");
        if (val.empty()) bad(where + ": missing value for '" + key + "'");
        std::string path = section.empty() ? key : section + "." + key;

        if (entries) {
            ModeAmplitude& e = entries->back();
            if (key == "mode") e.mode = static_cast<int>(to_int(val, path));
            else if (key == "sin") e.sin_c = to_double(val, path);
            else if (key == "cos") e.cos_c = to_double(val, path);
            else bad("unknown key '" + path + "'");
            continue;
        }

        if (section.empty()) {
            if (key == "j") cfg.j = static_cast<int>(to_int(val, path));
            else if (key == "s") cfg.s = static_cast<int>(to_int(val, path));
            else if (key == "seed") cfg.seed = to_int(val, path);
            else if (key == "output_dir") cfg.output_dir = to_string_lit(val, path);
            else if (key == "modes") cfg.modes = to_int_array(val, path);
            else if (key == "tau_ladder") cfg.tau_ladder = to_double_array(val, path);
            else bad("unknown key '" + path + "'");
        } else if (section == "grid") {
            if (key == "N") cfg.grid_n = static_cast<int>(to_int(val, path));
            else if (key == "M") cfg.grid_m = static_cast<int>(to_int(val, path));
            else bad("unknown key '" + path + "'");
        } else if (section == "time") {
            if (key == "T") cfg.horizon = to_double(val, path);
            else if (key == "n_steps") cfg.n_steps = static_cast<int>(to_int(val, path));
            else bad("unknown key '" + path + "'");
        } else if (section == "trajectory") {
            if (key == "depth") cfg.depth = static_cast<int>(to_int(val, path));
            else if (key == "amplitude") cfg.amplitude = to_double(val, path);
            else bad("unknown key '" + path + "'");
        } else if (section == "control") {
            if (key == "n_time_cells")
                cfg.n_time_cells = static_cast<int>(to_int(val, path));
            else if (key == "gamma_ladder") cfg.gamma_ladder = to_double_array(val, path);
            else if (key == "rank_cutoff")
                cfg.rank_cutoff = static_cast<int>(to_int(val, path));
            else if (key == "target_cutoff")
                cfg.target_cutoff = static_cast<int>(to_int(val, path));
            else bad("unknown key '" + path + "'");
        } else if (section == "fixed_time") {
            if (key == "t_total") cfg.fixed_time.t_total = to_double(val, path);
            else if (key == "tau") cfg.fixed_time.tau = to_double(val, path);
            else if (key == "drift_budget")
                cfg.fixed_time.drift_budget = to_double(val, path);
            else if (key == "max_segments")
                cfg.fixed_time.max_segments = static_cast<int>(to_int(val, path));
            else bad("unknown key '" + path + "'");
        } else if (section == "simulate") {
            if (key == "nonlinearity") cfg.simulate.nonlinearity = to_bool(val, path);
            else bad("unknown key '" + path + "'");
        } else if (section == "saturation") {
            if (key == "cutoff") cfg.saturation.cutoff = static_cast<int>(to_int(val, path));
            else if (key == "k_max")
                cfg.saturation.k_max = static_cast<int>(to_int(val, path));
            else bad("unknown key '" + path + "'");
        } else {
            bad("unknown key '" + path + "'");
        }
    }
    return cfg;
}

void ExperimentConfig::validate() const {
    auto states_ok = [&](const std::vector<ModeAmplitude>& st, const char* name) {
        if (st.empty())
            bad(std::string(name) +
                " must list at least one mode (use a zero-amplitude entry for zero)");
        std::set<int> seen;
        for (const auto& e : st) {
            std::string path = std::string(name) + "[mode=" + std::to_string(e.mode) + "]";
            if (e.mode == 0)
                bad(path + ": mode 0 is not permitted (states are mean-zero)");
            if (e.mode < 0) bad(path + ": mode must be positive");
            if (e.mode > grid_n) bad(path + ": mode exceeds grid.N");
            if (!seen.insert(e.mode).second) bad(path + ": duplicate mode entry");
            if (!std::isfinite(e.sin_c) || !std::isfinite(e.cos_c))
                bad(path + ": amplitudes must be finite");
        }
    };

    if (j < 1 || j > 3) bad("j must lie in 1..3");
    if (s < 0 || s > 4) bad("s must lie in 0..4");
    if (grid_n < 2 || grid_n > 256) bad("grid.N must lie in 2..256");
    if (grid_m < 2 * grid_n + 2) bad("grid.M must be at least 2N+2");
    if (!(horizon > 0.0)) bad("time.T must be positive");
    if (n_steps < 1 || n_steps > 10'000'000) bad("time.n_steps must lie in 1..1e7");
    if (modes.empty()) bad("modes must be nonempty");
    {
        std::set<int> seen;
        for (int l : modes) {
            if (l < 1) bad("modes: levels must be positive");
            if (l > grid_n) bad("modes: level exceeds grid.N");
            if (!seen.insert(l).second) bad("modes: duplicate level");
        }
    }
    if (tau_ladder.empty()) bad("tau_ladder must be nonempty");
    for (size_t i = 0; i < tau_ladder.size(); ++i) {
        double t = tau_ladder[i];
        if (!(t > 0.0) || t > 1.0) bad("tau_ladder values must lie in (0, 1]");
        if (i > 0 && !(t < tau_ladder[i - 1]))
            bad("tau_ladder must be strictly decreasing");
    }
    if (depth < 1 || depth > 16) bad("trajectory.depth must lie in 1..16");
    if (!(amplitude > 0.0)) bad("trajectory.amplitude must be positive");
    if (n_time_cells < 1 || n_time_cells > 4096)
        bad("control.n_time_cells must lie in 1..4096");
    if (gamma_ladder.empty()) bad("control.gamma_ladder must be nonempty");
    for (size_t i = 0; i < gamma_ladder.size(); ++i) {
        if (!(gamma_ladder[i] > 0.0)) bad("control.gamma_ladder values must be positive");
        if (i > 0 && !(gamma_ladder[i] < gamma_ladder[i - 1]))
            bad("control.gamma_ladder must be strictly decreasing");
    }
    if (rank_cutoff < 0) bad("control.rank_cutoff must be nonnegative");
    if (target_cutoff < 1 || target_cutoff > grid_n)
        bad("control.target_cutoff must lie in 1..grid.N");
    states_ok(u0, "u0");
    states_ok(u1, "u1");
    if (!(fixed_time.t_total > 0.0)) bad("fixed_time.t_total must be positive");
    if (!(fixed_time.tau > 0.0) || fixed_time.tau > 0.5)
        bad("fixed_time.tau must lie in (0, 0.5]");
    if (!(fixed_time.drift_budget > 0.0)) bad("fixed_time.drift_budget must be positive");
    if (fixed_time.max_segments < 1 || fixed_time.max_segments > 64)
        bad("fixed_time.max_segments must lie in 1..64");
    if (saturation.cutoff < 1) bad("saturation.cutoff must be positive");
    if (saturation.k_max < 0) bad("saturation.k_max must be nonnegative");
}

std::string ExperimentConfig::serialize() const {
    std::string s_;
    auto line = [&](const std::string& l) { s_ += l + "\n"; };
    line("j = " + std::to_string(j));
    line("s = " + std::to_string(s));
    line("seed = " + std::to_string(seed));
    line("output_dir = " + quote(output_dir));
    line("modes = " + fmt_arr(modes));
    line("tau_ladder = " + fmt_arr(tau_ladder));
    line("");
    line("[grid]");
    line("N = " + std::to_string(grid_n));
    line("M = " + std::to_string(grid_m));
    line("");
    line("[time]");
    line("T = " + fmt_shortest(horizon));
    line("n_steps = " + std::to_string(n_steps));
    line("");
    line("[trajectory]");
    line("depth = " + std::to_string(depth));
    line("amplitude = " + fmt_shortest(amplitude));
    line("");
    line("[control]");
    line("n_time_cells = " + std::to_string(n_time_cells));
    line("gamma_ladder = " + fmt_arr(gamma_ladder));
    line("rank_cutoff = " + std::to_string(rank_cutoff));
    line("target_cutoff = " + std::to_string(target_cutoff));
    line("");
    line("[fixed_time]");
    line("t_total = " + fmt_shortest(fixed_time.t_total));
    line("tau = " + fmt_shortest(fixed_time.tau));
    line("drift_budget = " + fmt_shortest(fixed_time.drift_budget));
    line("max_segments = " + std::to_string(fixed_time.max_segments));
    line("");
    line("[simulate]");
    line(std::string("nonlinearity = ") + (simulate.nonlinearity ? "true" : "false"));
    line("");
    line("[saturation]");
    line("cutoff = " + std::to_string(saturation.cutoff));
    line("k_max = " + std::to_string(saturation.k_max));
    for (const auto* st : {&u0, &u1}) {
        const char* name = st == &u0 ? "u0" : "u1";
        for (const auto& e : *st) {
            line("");
            line(std::string("[[") + name + "]]");
            line("mode = " + std::to_string(e.mode));
            line("sin = " + fmt_shortest(e.sin_c));
            line("cos = " + fmt_shortest(e.cos_c));
        }
    }
    return s_;
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a64(serialize()); }

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    ExperimentConfig cfg = parse_config(buf.str());
    cfg.validate();
    return cfg;
}

} // namespace hnkdv
