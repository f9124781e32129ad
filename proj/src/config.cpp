#include "cksf/config.hpp"

#include "cksf/diagnostics.hpp"
#include "cksf/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <algorithm>
#include <functional>
#include <sstream>

namespace cksf {

const char* to_string(PresetKind kind) {
    switch (kind) {
    case PresetKind::two_blobs: return "two_blobs";
    case PresetKind::uniform: return "uniform";
    case PresetKind::custom: return "custom";
    }
    return "unknown";
}

InitialPreset RunConfig::initial_preset() const {
    switch (preset) {
    case PresetKind::two_blobs: return TwoBlobsPreset{blob_amplitude, blob_sigma, perturbation, seed};
    case PresetKind::uniform: return UniformPreset{uniform_n, uniform_c, uniform_m};
    case PresetKind::custom: return CustomPreset{n_file, c_file, m_file};
    }
    throw InvalidArgument("unknown preset");
}

namespace {

using Kind = ConfigError::Kind;

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view text, int line) {
    T value{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || text.empty()) {
        throw ConfigError(Kind::type_error, line, std::string(key) + " expects a number, got '" + std::string(text) + "'");
    }
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(value)) {
            throw ConfigError(Kind::range_error, line, std::string(key) + " must be finite");
        }
    }
    return value;
}

void require(bool ok, std::string_view key, int line, const char* rule) {
    if (!ok) throw ConfigError(Kind::range_error, line, std::string(key) + " " + rule);
}

struct KeySpec {
    std::string_view name;
    std::function<void(RunConfig&, std::string_view, int)> set;
    std::function<std::string(const RunConfig&)> get;
};

KeySpec int_key(std::string_view name, int RunConfig::*field, int min_value) {
    return {name,
            [=](RunConfig& c, std::string_view v, int line) {
                const int x = parse_number<int>(name, v, line);
                require(x >= min_value, name, line, min_value == 4 ? "must be >= 4" : "out of range");
                c.*field = x;
            },
            [=](const RunConfig& c) { return std::to_string(c.*field); }};
}

KeySpec long_key(std::string_view name, long RunConfig::*field, long min_value) {
    return {name,
            [=](RunConfig& c, std::string_view v, int line) {
                const long x = parse_number<long>(name, v, line);
                require(x >= min_value, name, line, min_value == 0 ? "must be >= 0" : "must be >= 1");
                c.*field = x;
            },
            [=](const RunConfig& c) { return std::to_string(c.*field); }};
}

template <class Access>
KeySpec real_key(std::string_view name, Access access, std::function<bool(double)> valid, const char* rule) {
    return {name,
            [=](RunConfig& c, std::string_view v, int line) {
                const double x = parse_number<double>(name, v, line);
                require(valid(x), name, line, rule);
                access(c) = x;
            },
            [=](const RunConfig& c) { return format_double(access(c)); }};
}

KeySpec string_key(std::string_view name, std::string RunConfig::*field) {
    return {name, [=](RunConfig& c, std::string_view v, int) { c.*field = std::string(v); },
            [=](const RunConfig& c) { return c.*field; }};
}

const std::vector<KeySpec>& key_table() {
    static const std::vector<KeySpec> table = [] {
        auto any = [](double) { return true; };
        auto positive = [](double x) { return x > 0.0; };
        auto nonneg = [](double x) { return x >= 0.0; };
        auto tolerance = [](double x) { return x > 0.0 && x < 1e-4; };
        std::vector<KeySpec> t;
        t.push_back(int_key("nx", &RunConfig::nx, 4));
        t.push_back(int_key("ny", &RunConfig::ny, 4));
        t.push_back(real_key("lx", [](auto& c) -> auto& { return c.lx; }, positive, "must be > 0"));
        t.push_back(real_key("ly", [](auto& c) -> auto& { return c.ly; }, positive, "must be > 0"));
        t.push_back({"preset",
                     [](RunConfig& c, std::string_view v, int line) {
                         if (v == "two_blobs") c.preset = PresetKind::two_blobs;
                         else if (v == "uniform") c.preset = PresetKind::uniform;
                         else if (v == "custom") c.preset = PresetKind::custom;
                         else throw ConfigError(Kind::type_error, line, "preset must be two_blobs, uniform or custom");
                     },
                     [](const RunConfig& c) { return std::string(to_string(c.preset)); }});
        t.push_back(real_key("blob_amplitude", [](auto& c) -> auto& { return c.blob_amplitude; }, nonneg,
                             "must be >= 0"));
        t.push_back(real_key("blob_sigma", [](auto& c) -> auto& { return c.blob_sigma; }, positive,
                             "must be > 0"));
        t.push_back(real_key("perturbation", [](auto& c) -> auto& { return c.perturbation; },
                             [](double x) { return x >= 0.0 && x < 1.0; }, "must be in [0, 1)"));
        t.push_back(real_key("uniform_n", [](auto& c) -> auto& { return c.uniform_n; }, nonneg, "must be >= 0"));
        t.push_back(real_key("uniform_c", [](auto& c) -> auto& { return c.uniform_c; }, nonneg, "must be >= 0"));
        t.push_back(real_key("uniform_m", [](auto& c) -> auto& { return c.uniform_m; }, nonneg, "must be >= 0"));
        t.push_back(string_key("n_file", &RunConfig::n_file));
        t.push_back(string_key("c_file", &RunConfig::c_file));
        t.push_back(string_key("m_file", &RunConfig::m_file));
        t.push_back(real_key("alpha", [](auto& c) -> auto& { return c.params.alpha; }, any, ""));
        t.push_back(real_key("kappa", [](auto& c) -> auto& { return c.params.kappa; }, any, ""));
        t.push_back(real_key("c_s", [](auto& c) -> auto& { return c.params.c_s; }, positive, "must be > 0"));
        t.push_back(real_key("phi_x", [](auto& c) -> auto& { return c.params.phi_gradient[0]; }, any, ""));
        t.push_back(real_key("phi_y", [](auto& c) -> auto& { return c.params.phi_gradient[1]; }, any, ""));
        t.push_back({"dt_policy",
                     [](RunConfig& c, std::string_view v, int line) {
                         if (v == "adaptive") c.params.dt_policy = DtPolicy::adaptive;
                         else if (v == "fixed") c.params.dt_policy = DtPolicy::fixed;
                         else throw ConfigError(Kind::type_error, line, "dt_policy must be adaptive or fixed");
                     },
                     [](const RunConfig& c) {
                         return std::string(c.params.dt_policy == DtPolicy::fixed ? "fixed" : "adaptive");
                     }});
        t.push_back(real_key("dt", [](auto& c) -> auto& { return c.params.dt_max; }, positive, "must be > 0"));
        t.push_back(real_key("cfl_safety", [](auto& c) -> auto& { return c.params.cfl_safety; },
                             [](double x) { return x > 0.0 && x <= 1.0; }, "must be in (0, 1]"));
        t.push_back(real_key("t_end", [](auto& c) -> auto& { return c.params.t_end; }, nonneg, "must be >= 0"));
        t.push_back(real_key("poisson_tol", [](auto& c) -> auto& { return c.params.poisson_tol; }, tolerance,
                             "must be in (0, 1e-4)"));
        t.push_back(real_key("implicit_tol", [](auto& c) -> auto& { return c.params.implicit_tol; }, tolerance,
                             "must be in (0, 1e-4)"));
        t.push_back(long_key("snapshot_every", &RunConfig::snapshot_every, 0));
        t.push_back(string_key("out_dir", &RunConfig::out_dir));
        t.push_back({"seed",
                     [](RunConfig& c, std::string_view v, int line) {
                         c.seed = parse_number<std::uint64_t>("seed", v, line);
                     },
                     [](const RunConfig& c) { return std::to_string(c.seed); }});
        t.push_back(real_key("bounded_ratio", [](auto& c) -> auto& { return c.bounded_ratio; }, positive,
                             "must be > 0"));
        t.push_back(long_key("max_steps", &RunConfig::max_steps, 1));
        return t;
    }();
    return table;
}

} // namespace

RunConfig parse_config(std::string_view text) {
    RunConfig config;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(Kind::type_error, line_no, "expected 'key = value', got '" + std::string(line) + "'");
        }
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        const auto& table = key_table();
        const auto it = std::find_if(table.begin(), table.end(), [&](const KeySpec& k) { return k.name == key; });
        if (it == table.end()) throw ConfigError(Kind::unknown_key, line_no, "unknown key '" + std::string(key) + "'");
        it->set(config, value, line_no);
    }
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& config) {
    std::string out;
    for (const KeySpec& key : key_table()) {
        out += key.name;
        out += " = ";
        out += key.get(config);
        out += '\n';
    }
    return out;
}

void validate_config(const RunConfig& config) {
    config.params.validate();
    (void)config.grid();
    if (config.preset == PresetKind::custom &&
        (config.n_file.empty() || config.c_file.empty() || config.m_file.empty())) {
        throw InvalidArgument("preset custom needs n_file, c_file and m_file");
    }
    if (config.out_dir.empty()) throw InvalidArgument("out_dir must not be empty");
}

} // namespace cksf
