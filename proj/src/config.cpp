#include "enkf_lab/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "enkf_lab/csv.hpp"

namespace enkf_lab {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
    std::vector<std::string_view> items;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = s.find(',', start);
        items.push_back(trim(s.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return items;
}

double parse_real(std::string_view s) {
    const double v = parse_number(s);
    if (!std::isfinite(v)) throw InvalidInput("value must be finite");
    return v;
}

std::uint64_t parse_unsigned(std::string_view s) {
    std::uint64_t v = 0;
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw InvalidInput("not a non-negative integer: '" + std::string(s) + "'");
    return v;
}

Vector parse_vector(std::string_view s) {
    std::vector<double> values;
    for (std::string_view item : split_list(s)) values.push_back(parse_real(item));
    return Vector(std::move(values));
}

template <typename T>
std::vector<T> parse_unsigned_list(std::string_view s) {
    std::vector<T> values;
    for (std::string_view item : split_list(s)) values.push_back(static_cast<T>(parse_unsigned(item)));
    return values;
}

using NumFormat = std::string (*)(double);

// Shortest round-trip text; used for human-facing defaults.
std::string shortest_number(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string join_numbers(std::span<const double> values, NumFormat fmt) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += fmt(values[i]);
    }
    return out;
}

template <typename T>
std::string join_integers(const std::vector<T>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(values[i]);
    }
    return out;
}

struct KeySpec {
    std::string_view name;
    std::string_view description;
    std::function<void(TwinExperimentConfig&, std::string_view)> parse;
    std::function<std::string(const TwinExperimentConfig&, NumFormat)> print;
};

const std::vector<KeySpec>& key_specs() {
    using C = TwinExperimentConfig;
    static const std::vector<KeySpec> specs{
        {"truth_init", "true initial state x,y,z",
         [](C& c, std::string_view v) { c.truth_init = parse_vector(v); },
         [](const C& c, NumFormat f) { return join_numbers(c.truth_init.values(), f); }},
        {"guess_init", "center of the initial ensemble x,y,z",
         [](C& c, std::string_view v) { c.guess_init = parse_vector(v); },
         [](const C& c, NumFormat f) { return join_numbers(c.guess_init.values(), f); }},
        {"dt", "assimilation interval",
         [](C& c, std::string_view v) { c.dt = parse_real(v); },
         [](const C& c, NumFormat f) { return f(c.dt); }},
        {"steps", "number of assimilation steps",
         [](C& c, std::string_view v) { c.steps = parse_unsigned(v); },
         [](const C& c, NumFormat) { return std::to_string(c.steps); }},
        {"obs_noise_var", "observation noise variance (Gamma = var * I)",
         [](C& c, std::string_view v) { c.obs_noise_var = parse_real(v); },
         [](const C& c, NumFormat f) { return f(c.obs_noise_var); }},
        {"init_spread", "standard deviation of the initial ensemble around guess_init",
         [](C& c, std::string_view v) { c.init_spread = parse_real(v); },
         [](const C& c, NumFormat f) { return f(c.init_spread); }},
        {"ensemble_sizes", "ensemble sizes compared by sweep",
         [](C& c, std::string_view v) { c.ensemble_sizes = parse_unsigned_list<std::size_t>(v); },
         [](const C& c, NumFormat) { return join_integers(c.ensemble_sizes); }},
        {"seeds", "seed population (default: 20 consecutive seeds from --seed, or 0)",
         [](C& c, std::string_view v) { c.seeds = parse_unsigned_list<std::uint64_t>(v); },
         [](const C& c, NumFormat) { return join_integers(c.seeds); }},
        {"q_jitter", "q added to the forecast covariance diagonal before the gain",
         [](C& c, std::string_view v) { c.q_jitter = parse_real(v); },
         [](const C& c, NumFormat f) { return f(c.q_jitter); }},
        {"sigma", "Lorenz 63 sigma",
         [](C& c, std::string_view v) { c.lorenz.sigma = parse_real(v); },
         [](const C& c, NumFormat f) { return f(c.lorenz.sigma); }},
        {"r", "Lorenz 63 r",
         [](C& c, std::string_view v) { c.lorenz.r = parse_real(v); },
         [](const C& c, NumFormat f) { return f(c.lorenz.r); }},
        {"b", "Lorenz 63 b (8/3)",
         [](C& c, std::string_view v) { c.lorenz.b = parse_real(v); },
         [](const C& c, NumFormat f) { return f(c.lorenz.b); }},
        {"rk4_substeps", "RK4 steps per assimilation interval",
         [](C& c, std::string_view v) { c.rk4_substeps = parse_unsigned(v); },
         [](const C& c, NumFormat) { return std::to_string(c.rk4_substeps); }},
        {"process_noise_var", "model noise variance added to each member (Sigma = var * I)",
         [](C& c, std::string_view v) { c.process_noise_var = parse_real(v); },
         [](const C& c, NumFormat f) { return f(c.process_noise_var); }},
        {"trajectory_horizon", "time span of the trajectory command",
         [](C& c, std::string_view v) { c.trajectory_horizon = parse_real(v); },
         [](const C& c, NumFormat f) { return f(c.trajectory_horizon); }},
    };
    return specs;
}

const KeySpec* find_key(std::string_view name) {
    for (const KeySpec& spec : key_specs())
        if (spec.name == name) return &spec;
    return nullptr;
}

}  // namespace

ParseError::ParseError(std::size_t line, std::string key, const std::string& message)
    : std::runtime_error(
          (line ? "config line " + std::to_string(line) : std::string("config")) +
          (key.empty() ? std::string() : " (" + key + ")") + ": " + message),
      line_(line),
      key_(std::move(key)) {}

TwinExperimentConfig parse_config(std::string_view text) {
    TwinExperimentConfig config;
    std::map<std::string, std::size_t, std::less<>> seen;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const std::size_t eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "", "expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));

        const KeySpec* spec = find_key(key);
        if (spec == nullptr) throw ParseError(line_no, key, "unknown key");
        if (seen.contains(key)) throw ParseError(line_no, key, "key given more than once");
        if (value.empty()) throw ParseError(line_no, key, "missing value");
        seen.emplace(key, line_no);
        try {
            spec->parse(config, value);
        } catch (const InvalidInput& e) {
            throw ParseError(line_no, key, e.what());
        }
    }
    try {
        validate(config);
    } catch (const ConfigInvariantError& e) {
        const auto it = seen.find(e.key());
        throw ParseError(it == seen.end() ? 0 : it->second, e.key(), e.what());
    }
    return config;
}

std::string serialize_config(const TwinExperimentConfig& config) {
    std::string out;
    for (const KeySpec& spec : key_specs()) {
        out += spec.name;
        out += " = ";
        out += spec.print(config, format_number);
        out += '\n';
    }
    return out;
}

std::string config_help() {
    const TwinExperimentConfig defaults;
    std::ostringstream os;
    os << "Config keys (key = value, '#' comments, lists comma separated):\n";
    for (const KeySpec& spec : key_specs()) {
        std::string value = spec.print(defaults, shortest_number);
        if (spec.name == "seeds") value = "0, 1, ..., 19";
        os << "  " << spec.name << " = " << value << "\n      " << spec.description << '\n';
    }
    return os.str();
}

}  // namespace enkf_lab
