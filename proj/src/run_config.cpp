#include "flexbeam/run_config.hpp"

#include "flexbeam/error.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace flexbeam {

namespace {

std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += fmt_double(v[i]);
    }
    return out;
}

struct Location {
    std::string_view source;
    int line;
    std::string key;  // section.key
};

[[noreturn]] void parse_fail(const Location& at, const std::string& what) {
    std::ostringstream msg;
    msg << at.source << ":" << at.line << ": ";
    if (!at.key.empty()) msg << "key '" << at.key << "': ";
    msg << what;
    fail(ErrorCode::Parse, msg.str());
}

double to_double(std::string_view text, const Location& at) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
        parse_fail(at, "expected a number, got '" + std::string(text) + "'");
    if (!std::isfinite(v)) parse_fail(at, "value must be finite");
    return v;
}

long to_long(std::string_view text, const Location& at) {
    long v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
        parse_fail(at, "expected an integer, got '" + std::string(text) + "'");
    return v;
}

int to_int(std::string_view text, const Location& at) {
    const long v = to_long(text, at);
    if (v < -2147483647L || v > 2147483647L) parse_fail(at, "integer out of range");
    return static_cast<int>(v);
}

std::vector<double> to_list(std::string_view text, const Location& at) {
    std::vector<double> out;
    if (trim(text).empty()) return out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = text.find(',', pos);
        out.push_back(to_double(trim(text.substr(pos, comma - pos)), at));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

using Setter = std::function<void(std::string_view, const Location&)>;

struct Field {
    Setter set;
    bool required;
};

// Keys accepted in one section instance, bound to the target struct.
std::map<std::string, Field> fields_for(const std::string& section, RunConfig& cfg, Actuator* act) {
    const auto dbl = [](double& ref) { return [&ref](std::string_view v, const Location& at) { ref = to_double(v, at); }; };
    const auto integer = [](int& ref) { return [&ref](std::string_view v, const Location& at) { ref = to_int(v, at); }; };
    const auto lng = [](long& ref) { return [&ref](std::string_view v, const Location& at) { ref = to_long(v, at); }; };
    BeamSystem& s = cfg.system;
    if (section == "beam")
        return {{"E", {dbl(s.E), true}}, {"I", {dbl(s.I), true}}, {"rho", {dbl(s.rho), true}}, {"l", {dbl(s.l), true}}};
    if (section == "shaker")
        return {{"m", {dbl(s.m), true}},
                {"kappa", {dbl(s.kappa), true}},
                {"l0", {dbl(s.l0), true}},
                {"alpha0", {dbl(s.alpha0), false}}};
    if (section == "actuator")
        return {{"center", {dbl(act->center), true}},
                {"width", {dbl(act->width), true}},
                {"height", {dbl(act->height), false}},
                {"alpha", {dbl(act->alpha), true}}};
    SpectralSettings& sp = cfg.spectral;
    if (section == "spectral")
        return {{"mu_max", {dbl(sp.mu_max), false}},   {"grid_step", {dbl(sp.grid_step), false}},
                {"n_modes", {integer(sp.n_modes), false}}, {"root_tol", {dbl(sp.root_tol), false}},
                {"p1", {lng(sp.p1), false}},           {"p2", {lng(sp.p2), false}},
                {"quad_order", {integer(sp.quad_order), false}}};
    SimSettings& sim = cfg.sim;
    if (section == "sim")
        return {{"t_end", {dbl(sim.t_end), false}},
                {"dt", {dbl(sim.dt), false}},
                {"sample_every", {integer(sim.sample_every), false}},
                {"initial",
                 {[&sim](std::string_view v, const Location& at) {
                      if (v == "first_mode_displacement") {
                          sim.initial_profile = std::string(v);
                          sim.q0.clear();
                          return;
                      }
                      if (!v.empty() && (std::isalpha(static_cast<unsigned char>(v[0])) || v[0] == '_'))
                          parse_fail(at, "unknown initial profile '" + std::string(v) +
                                             "' (expected first_mode_displacement or a list of modal amplitudes)");
                      sim.initial_profile.clear();
                      sim.q0 = to_list(v, at);
                  },
                  false}},
                {"initial_velocity",
                 {[&sim](std::string_view v, const Location& at) { sim.qdot0 = to_list(v, at); }, false}}};
    OutputSettings& out = cfg.output;
    if (section == "output")
        return {{"directory", {[&out](std::string_view v, const Location&) { out.directory = std::string(v); }, false}},
                {"precision", {integer(out.precision), false}}};
    return {};
}

const std::set<std::string> k_single_sections{"beam", "shaker", "spectral", "sim", "output"};

}  // namespace

RunConfig parse_config(std::string_view text, std::string_view source) {
    RunConfig cfg;
    cfg.system.alpha0 = 0.0;

    struct Open {
        std::string name;
        int line = 0;
        std::map<std::string, Field> fields;
        std::set<std::string> seen;
    };
    Open cur;
    std::set<std::string> sections_seen;

    const auto close = [&](const Open& sec, int line_end) {
        if (sec.name.empty()) return;
        for (const auto& [key, field] : sec.fields)
            if (field.required && !sec.seen.count(key))
                parse_fail({source, sec.line, sec.name + "." + key},
                           "missing required key in section [" + sec.name + "] (lines " +
                               std::to_string(sec.line) + "-" + std::to_string(line_end) + ")");
    };

    int lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++lineno;

        if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') parse_fail({source, lineno, ""}, "malformed section header");
            close(cur, lineno - 1);
            const std::string name(trim(line.substr(1, line.size() - 2)));
            Open next;
            next.name = name;
            next.line = lineno;
            Actuator* act = nullptr;
            if (name == "actuator") {
                cfg.actuators.emplace_back();
                act = &cfg.actuators.back();
            } else if (k_single_sections.count(name)) {
                if (!sections_seen.insert(name).second)
                    parse_fail({source, lineno, ""}, "duplicate section [" + name + "]");
            } else {
                parse_fail({source, lineno, ""}, "unknown section [" + name + "]");
            }
            next.fields = fields_for(name, cfg, act);
            cur = std::move(next);
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) parse_fail({source, lineno, ""}, "expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (cur.name.empty()) parse_fail({source, lineno, key}, "key outside of any section");
        const Location at{source, lineno, cur.name + "." + key};
        const auto it = cur.fields.find(key);
        if (it == cur.fields.end()) parse_fail(at, "unknown key in section [" + cur.name + "]");
        if (!cur.seen.insert(key).second) parse_fail(at, "duplicate key");
        it->second.set(value, at);
    }
    close(cur, lineno);

    for (const char* required : {"beam", "shaker"})
        if (!sections_seen.count(required)) {
            std::string keys;
            for (const auto& [key, field] : fields_for(required, cfg, nullptr))
                if (field.required) keys += (keys.empty() ? "" : ", ") + std::string(required) + "." + key;
            parse_fail({source, lineno, ""},
                       std::string("missing required section [") + required + "] (required keys: " + keys + ")");
        }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorCode::Io, "cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream o;
    const BeamSystem& s = c.system;
    o << "[beam]\n"
      << "E = " << fmt_double(s.E) << "\n"
      << "I = " << fmt_double(s.I) << "\n"
      << "rho = " << fmt_double(s.rho) << "\n"
      << "l = " << fmt_double(s.l) << "\n\n";
    o << "[shaker]\n"
      << "m = " << fmt_double(s.m) << "\n"
      << "kappa = " << fmt_double(s.kappa) << "\n"
      << "l0 = " << fmt_double(s.l0) << "\n"
      << "alpha0 = " << fmt_double(s.alpha0) << "\n\n";
    for (const Actuator& a : c.actuators)
        o << "[actuator]\n"
          << "center = " << fmt_double(a.center) << "\n"
          << "width = " << fmt_double(a.width) << "\n"
          << "height = " << fmt_double(a.height) << "\n"
          << "alpha = " << fmt_double(a.alpha) << "\n\n";
    const SpectralSettings& sp = c.spectral;
    o << "[spectral]\n"
      << "mu_max = " << fmt_double(sp.mu_max) << "\n"
      << "grid_step = " << fmt_double(sp.grid_step) << "\n"
      << "n_modes = " << sp.n_modes << "\n"
      << "root_tol = " << fmt_double(sp.root_tol) << "\n"
      << "p1 = " << sp.p1 << "\n"
      << "p2 = " << sp.p2 << "\n"
      << "quad_order = " << sp.quad_order << "\n\n";
    const SimSettings& sim = c.sim;
    o << "[sim]\n"
      << "t_end = " << fmt_double(sim.t_end) << "\n"
      << "dt = " << fmt_double(sim.dt) << "\n"
      << "initial = " << (sim.initial_profile.empty() ? fmt_list(sim.q0) : sim.initial_profile) << "\n"
      << "initial_velocity = " << fmt_list(sim.qdot0) << "\n"
      << "sample_every = " << sim.sample_every << "\n\n";
    o << "[output]\n"
      << "directory = " << c.output.directory << "\n"
      << "precision = " << c.output.precision << "\n";
    return o.str();
}

std::string config_hash(const RunConfig& cfg) {
    // the output directory does not affect results, so it is left out of the hash
    RunConfig keyed = cfg;
    keyed.output.directory = ".";
    std::uint64_t h = 14695981039346656037ULL;
    for (const unsigned char ch : serialize_config(keyed)) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ValidationReport validate_config(const RunConfig& cfg) {
    ValidationReport rep = validate_system(cfg.system, cfg.actuators);
    const auto add = [&rep](std::string key, std::string msg) { rep.violations.push_back({std::move(key), std::move(msg)}); };
    const SpectralSettings& sp = cfg.spectral;
    if (sp.mu_max < 0.0) add("spectral.mu_max", "mu_max must be >= 0");
    if (sp.grid_step < 0.0) add("spectral.grid_step", "grid_step must be >= 0");
    if (sp.n_modes < 1) add("spectral.n_modes", "n_modes must be >= 1");
    if (!(sp.root_tol > 0.0)) add("spectral.root_tol", "root_tol must be > 0");
    if ((sp.p1 != 0 || sp.p2 != 0) && !(sp.p1 > 0 && sp.p2 > sp.p1))
        add("spectral.p1", "p1/p2 must satisfy 0 < p1 < p2");
    if (sp.quad_order < 1 || sp.quad_order > 64) add("spectral.quad_order", "quad_order must be in [1,64]");
    const SimSettings& sim = cfg.sim;
    if (!(sim.t_end > 0.0)) add("sim.t_end", "t_end must be > 0");
    if (!(sim.dt > 0.0)) add("sim.dt", "dt must be > 0");
    if (sim.sample_every < 1) add("sim.sample_every", "sample_every must be >= 1");
    if (sim.q0.size() > static_cast<std::size_t>(std::max(sp.n_modes, 0)))
        add("sim.initial", "more modal amplitudes than n_modes");
    if (sim.qdot0.size() > static_cast<std::size_t>(std::max(sp.n_modes, 0)))
        add("sim.initial_velocity", "more modal velocities than n_modes");
    if (cfg.output.precision < 1 || cfg.output.precision > 17) add("output.precision", "precision must be in [1,17]");
    if (cfg.output.directory.empty()) add("output.directory", "directory must not be empty");
    return rep;
}

bool operator==(const RunConfig& a, const RunConfig& b) { return serialize_config(a) == serialize_config(b); }

}  // namespace flexbeam
