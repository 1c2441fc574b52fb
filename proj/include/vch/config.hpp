#pragma once

// Structured-text run configuration: named sections, strict key checking, and
// builders that turn a parsed file into grid / potential / initial-data
// objects.  Unknown sections or keys are rejected outright so a typo cannot
// silently fall back to a default.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "vch/dynamics.hpp"
#include "vch/errors.hpp"
#include "vch/grid.hpp"
#include "vch/potential.hpp"
#include "vch/random.hpp"
#include "vch/studies.hpp"

namespace vch {

enum class PotentialKind { quartic, classical_split, custom_table };
enum class InitialKind { constant, gaussian_bump, random_seeded };

struct GridSection {
    std::vector<std::size_t> extents = {65};
    std::vector<double> spacing = {0.2};
};

struct PotentialSection {
    PotentialKind kind = PotentialKind::quartic;
    double c_g = 0.2;
    std::vector<double> table_r, table_b, table_pi;
    double pi_lip = 0.0;
};

struct InitialSection {
    InitialKind kind = InitialKind::gaussian_bump;
    // constant: levels; gaussian-bump: mu/sigma levels, phi bump amplitude;
    // random-seeded: amplitudes of uniform noise in [-a, a].
    double mu = -1.0;
    double phi = 0.8;
    double sigma = 0.5;
    double center = 0.5; // bump center as a fraction of the domain length
    double width = 1.0;  // bump width in physical units
    std::uint64_t seed = 1;
    double smoothing_eps = 0.0;
};

struct OutputSection {
    std::string directory = "out";
    std::size_t save_stride = 1;
    bool write_fields = true;
    bool write_ledger = true;
};

struct StudySection {
    std::vector<double> betas = {0.2, 0.1, 0.05, 0.025, 0.0125, 0.00625};
    std::vector<double> lambdas = {0.1, 0.05, 0.025};
    std::vector<double> epsilons = {0.1, 0.05, 0.025};
    std::vector<double> deltas = {1e-2, 1e-3, 1e-4};
    std::vector<double> window; // flat lo hi pairs, one pair per axis
    int doublings = 2;
    double min_slope = 0.45;
    double max_spread = 2.0;
    double max_ratio_spread = 0.10;
};

struct RunConfig {
    GridSection grid;
    PotentialSection potential;
    SystemParams params;
    InitialSection initial;
    OutputSection output;
    StudySection study;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& where, const std::string& tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        throw validation_error("config: " + where + ": not a number: '" + tok + "'");
    }
    if (used != tok.size())
        throw validation_error("config: " + where + ": trailing characters in '" + tok + "'");
    return v;
}

inline std::vector<double> parse_doubles(const std::string& where, const std::string& value) {
    std::istringstream is(value);
    std::vector<double> out;
    std::string tok;
    while (is >> tok) out.push_back(parse_double(where, tok));
    if (out.empty()) throw validation_error("config: " + where + ": empty value");
    return out;
}

inline std::uint64_t parse_unsigned(const std::string& where, const std::string& tok) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
        throw validation_error("config: " + where + ": expected a nonnegative integer, got '" +
                               tok + "'");
    try {
        return std::stoull(tok);
    } catch (const std::exception&) {
        throw validation_error("config: " + where + ": integer out of range: '" + tok + "'");
    }
}

struct RawConfig {
    // section -> key -> value, with duplicate detection during filling
    std::map<std::string, std::map<std::string, std::string>> sections;
};

inline RawConfig tokenize_config(const std::string& text) {
    static const std::set<std::string> known_sections = {"grid",    "potential", "params",
                                                         "initial", "output",    "study"};
    RawConfig raw;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw validation_error("config: line " + std::to_string(lineno) +
                                       ": malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            if (!known_sections.count(section))
                throw validation_error("config: unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw validation_error("config: line " + std::to_string(lineno) +
                                   ": expected 'key = value', got '" + line + "'");
        if (section.empty())
            throw validation_error("config: line " + std::to_string(lineno) +
                                   ": key outside any section");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw validation_error("config: line " + std::to_string(lineno) +
                                   ": empty key or value");
        auto [it, inserted] = raw.sections[section].emplace(key, value);
        (void)it;
        if (!inserted)
            throw validation_error("config: duplicate key '" + section + "." + key + "'");
    }
    return raw;
}

// Pop-style accessor: reading a key consumes it, so anything left at the end
// is by construction unknown.
struct SectionReader {
    std::string name;
    std::map<std::string, std::string> kv;

    bool has(const std::string& key) const { return kv.count(key) > 0; }

    std::string take(const std::string& key) {
        auto it = kv.find(key);
        if (it == kv.end())
            throw validation_error("config: missing required key '" + name + "." + key + "'");
        std::string v = it->second;
        kv.erase(it);
        return v;
    }

    std::string take_or(const std::string& key, const std::string& fallback) {
        auto it = kv.find(key);
        if (it == kv.end()) return fallback;
        std::string v = it->second;
        kv.erase(it);
        return v;
    }

    double take_double(const std::string& key, double fallback) {
        auto it = kv.find(key);
        if (it == kv.end()) return fallback;
        const double v = parse_double(name + "." + key, it->second);
        kv.erase(it);
        return v;
    }

    void finish() const {
        if (!kv.empty())
            throw validation_error("config: unknown key '" + name + "." + kv.begin()->first +
                                   "'");
    }

    void forbid(const std::string& key, const std::string& why) const {
        if (kv.count(key))
            throw validation_error("config: key '" + name + "." + key + "' " + why);
    }
};

} // namespace detail

inline RunConfig parse_config_text(const std::string& text) {
    detail::RawConfig raw = detail::tokenize_config(text);
    RunConfig cfg;

    auto reader = [&](const char* sec) {
        detail::SectionReader r;
        r.name = sec;
        auto it = raw.sections.find(sec);
        if (it != raw.sections.end()) r.kv = it->second;
        return r;
    };

    { // [grid]
        detail::SectionReader r = reader("grid");
        if (r.has("extents")) {
            cfg.grid.extents.clear();
            for (double v : detail::parse_doubles("grid.extents", r.take("extents"))) {
                if (!(v >= 3.0) || v != std::floor(v) || v > 1e7)
                    throw validation_error("config: grid.extents: each extent must be an "
                                           "integer >= 3");
                cfg.grid.extents.push_back(static_cast<std::size_t>(v));
            }
        }
        if (r.has("spacing"))
            cfg.grid.spacing = detail::parse_doubles("grid.spacing", r.take("spacing"));
        r.finish();
        if (cfg.grid.extents.empty() || cfg.grid.extents.size() > 3)
            throw validation_error("config: grid.extents: need 1 to 3 axes");
        if (cfg.grid.spacing.size() != cfg.grid.extents.size())
            throw validation_error("config: grid.spacing: one value per axis required");
        for (double h : cfg.grid.spacing)
            if (!(h > 0.0) || !std::isfinite(h))
                throw validation_error("config: grid.spacing: spacings must be positive");
    }

    { // [potential]
        detail::SectionReader r = reader("potential");
        const std::string kind = r.take_or("kind", "quartic");
        if (kind == "quartic") {
            cfg.potential.kind = PotentialKind::quartic;
            cfg.potential.c_g = r.take_double("c_g", 0.2);
            r.forbid("table_r", "is only meaningful for kind = custom-table");
            r.forbid("pi_lip", "is only meaningful for kind = custom-table");
            // Whether c_g satisfies the structural balance conditions is the
            // checker's verdict, not a parse error; only outright nonsense is
            // rejected here.
            if (!(cfg.potential.c_g > 0.0) || !std::isfinite(cfg.potential.c_g))
                throw validation_error(
                    "config: potential.c_g: growth constant must be positive and finite");
        } else if (kind == "classical-split") {
            cfg.potential.kind = PotentialKind::classical_split;
            r.forbid("c_g", "is only meaningful for kind = quartic");
            r.forbid("table_r", "is only meaningful for kind = custom-table");
            r.forbid("pi_lip", "is only meaningful for kind = custom-table");
        } else if (kind == "custom-table") {
            cfg.potential.kind = PotentialKind::custom_table;
            r.forbid("c_g", "is only meaningful for kind = quartic");
            cfg.potential.table_r = detail::parse_doubles("potential.table_r", r.take("table_r"));
            cfg.potential.table_b = detail::parse_doubles("potential.table_b", r.take("table_b"));
            cfg.potential.table_pi =
                detail::parse_doubles("potential.table_pi", r.take("table_pi"));
            cfg.potential.pi_lip =
                detail::parse_double("potential.pi_lip", r.take("pi_lip"));
        } else {
            throw validation_error("config: potential.kind: expected quartic, classical-split "
                                   "or custom-table, got '" +
                                   kind + "'");
        }
        r.finish();
    }

    { // [params]
        detail::SectionReader r = reader("params");
        SystemParams& p = cfg.params;
        p.alpha = r.take_double("alpha", p.alpha);
        p.beta = r.take_double("beta", p.beta);
        p.eps = r.take_double("eps", p.eps);
        p.lambda = r.take_double("lambda", p.lambda);
        p.p = r.take_double("p", p.p);
        p.t_end = r.take_double("t_end", p.t_end);
        p.dt = r.take_double("dt", p.dt);
        p.picard_tol = r.take_double("picard_tol", p.picard_tol);
        if (r.has("picard_max")) {
            const double v = detail::parse_double("params.picard_max", r.take("picard_max"));
            if (v != std::floor(v))
                throw validation_error("config: params.picard_max: must be an integer");
            p.picard_max = static_cast<int>(v);
        }
        p.stability_margin = r.take_double("stability_margin", p.stability_margin);
        r.finish();
        p.validate();
    }

    { // [initial]
        detail::SectionReader r = reader("initial");
        InitialSection& ini = cfg.initial;
        const std::string kind = r.take_or("kind", "gaussian-bump");
        if (kind == "constant")
            ini.kind = InitialKind::constant;
        else if (kind == "gaussian-bump")
            ini.kind = InitialKind::gaussian_bump;
        else if (kind == "random-seeded")
            ini.kind = InitialKind::random_seeded;
        else
            throw validation_error("config: initial.kind: expected constant, gaussian-bump or "
                                   "random-seeded, got '" +
                                   kind + "'");
        ini.mu = r.take_double("mu", ini.mu);
        ini.phi = r.take_double("phi", ini.phi);
        ini.sigma = r.take_double("sigma", ini.sigma);
        ini.smoothing_eps = r.take_double("smoothing_eps", ini.smoothing_eps);
        if (ini.kind == InitialKind::gaussian_bump) {
            ini.center = r.take_double("center", ini.center);
            ini.width = r.take_double("width", ini.width);
            r.forbid("seed", "is only meaningful for kind = random-seeded");
            if (!(ini.center > 0.0 && ini.center < 1.0))
                throw validation_error(
                    "config: initial.center: bump center must be a fraction in (0, 1)");
            if (!(ini.width > 0.0))
                throw validation_error("config: initial.width: bump width must be positive");
        } else if (ini.kind == InitialKind::random_seeded) {
            r.forbid("center", "is only meaningful for kind = gaussian-bump");
            r.forbid("width", "is only meaningful for kind = gaussian-bump");
            if (r.has("seed"))
                ini.seed = detail::parse_unsigned("initial.seed", r.take("seed"));
            if (!(ini.mu > 0.0 && ini.phi > 0.0 && ini.sigma > 0.0))
                throw validation_error(
                    "config: initial: random-seeded amplitudes must be positive");
        } else {
            r.forbid("center", "is only meaningful for kind = gaussian-bump");
            r.forbid("width", "is only meaningful for kind = gaussian-bump");
            r.forbid("seed", "is only meaningful for kind = random-seeded");
        }
        if (!(ini.smoothing_eps >= 0.0))
            throw validation_error("config: initial.smoothing_eps: must be nonnegative");
        r.finish();
    }

    { // [output]
        detail::SectionReader r = reader("output");
        OutputSection& o = cfg.output;
        o.directory = r.take_or("directory", o.directory);
        if (o.directory.empty())
            throw validation_error("config: output.directory: must not be empty");
        if (r.has("save_stride")) {
            const std::uint64_t s =
                detail::parse_unsigned("output.save_stride", r.take("save_stride"));
            if (s < 1)
                throw validation_error("config: output.save_stride: must be at least 1");
            o.save_stride = static_cast<std::size_t>(s);
        }
        if (r.has("formats")) {
            o.write_fields = false;
            o.write_ledger = false;
            std::istringstream is(r.take("formats"));
            std::string tok;
            while (is >> tok) {
                if (tok == "fields")
                    o.write_fields = true;
                else if (tok == "ledger")
                    o.write_ledger = true;
                else
                    throw validation_error(
                        "config: output.formats: unknown format '" + tok +
                        "' (known: fields, ledger)");
            }
        }
        r.finish();
    }

    { // [study]
        detail::SectionReader r = reader("study");
        StudySection& st = cfg.study;
        if (r.has("betas")) st.betas = detail::parse_doubles("study.betas", r.take("betas"));
        if (r.has("lambdas"))
            st.lambdas = detail::parse_doubles("study.lambdas", r.take("lambdas"));
        if (r.has("epsilons"))
            st.epsilons = detail::parse_doubles("study.epsilons", r.take("epsilons"));
        if (r.has("deltas")) st.deltas = detail::parse_doubles("study.deltas", r.take("deltas"));
        if (r.has("window")) st.window = detail::parse_doubles("study.window", r.take("window"));
        if (r.has("doublings")) {
            const std::uint64_t d = detail::parse_unsigned("study.doublings", r.take("doublings"));
            if (d < 1 || d > 8)
                throw validation_error("config: study.doublings: must lie in 1..8");
            st.doublings = static_cast<int>(d);
        }
        st.min_slope = r.take_double("min_slope", st.min_slope);
        st.max_spread = r.take_double("max_spread", st.max_spread);
        st.max_ratio_spread = r.take_double("max_ratio_spread", st.max_ratio_spread);
        r.finish();
        if (!st.window.empty() && st.window.size() % 2 != 0)
            throw validation_error("config: study.window: expected flat lo hi pairs");
    }

    return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot read config file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

inline Grid make_grid(const RunConfig& cfg) {
    return Grid(cfg.grid.extents, cfg.grid.spacing);
}

inline PotentialSpec make_potential(const RunConfig& cfg) {
    switch (cfg.potential.kind) {
        case PotentialKind::quartic:
            return quartic_potential(cfg.potential.c_g);
        case PotentialKind::classical_split:
            return classical_double_well();
        case PotentialKind::custom_table:
            return table_potential(cfg.potential.table_r, cfg.potential.table_b,
                                   cfg.potential.table_pi, cfg.potential.pi_lip,
                                   "custom-table");
    }
    throw validation_error("config: potential.kind: unhandled kind");
}

inline InitialData make_initial_data(const RunConfig& cfg, const Grid& g) {
    const InitialSection& ini = cfg.initial;
    switch (ini.kind) {
        case InitialKind::constant:
            return InitialData(Field::constant(g, ini.mu), Field::constant(g, ini.phi),
                               Field::constant(g, ini.sigma), ini.smoothing_eps);
        case InitialKind::gaussian_bump: {
            std::array<double, 3> c{};
            for (int a = 0; a < g.dims(); ++a)
                c[static_cast<std::size_t>(a)] = g.origin(a) + ini.center * g.length(a);
            const double w2 = ini.width * ini.width;
            Field phi = Field::from_function(g, [&](const std::array<double, 3>& x) {
                double q = 0.0;
                for (int a = 0; a < g.dims(); ++a) {
                    const double d = x[static_cast<std::size_t>(a)] -
                                     c[static_cast<std::size_t>(a)];
                    q += d * d;
                }
                return ini.phi * std::exp(-q / w2);
            });
            return InitialData(Field::constant(g, ini.mu), std::move(phi),
                               Field::constant(g, ini.sigma), ini.smoothing_eps);
        }
        case InitialKind::random_seeded: {
            Rng rng(ini.seed);
            Field mu = random_field(g, rng, -ini.mu, ini.mu);
            Field phi = random_field(g, rng, -ini.phi, ini.phi);
            Field sigma = random_field(g, rng, -ini.sigma, ini.sigma);
            return InitialData(std::move(mu), std::move(phi), std::move(sigma),
                               ini.smoothing_eps);
        }
    }
    throw validation_error("config: initial.kind: unhandled kind");
}

inline ObservationWindow make_window(const RunConfig& cfg, const Grid& g) {
    ObservationWindow w;
    if (cfg.study.window.empty()) {
        // Default: the central 60% of the domain (comfortably inside the
        // required 10% margins).
        for (int a = 0; a < g.dims(); ++a) {
            const double left = g.origin(a), L = g.length(a);
            w.bounds.emplace_back(left + 0.2 * L, left + 0.8 * L);
        }
    } else {
        for (std::size_t i = 0; i + 1 < cfg.study.window.size(); i += 2)
            w.bounds.emplace_back(cfg.study.window[i], cfg.study.window[i + 1]);
    }
    w.validate_for(g);
    return w;
}

} // namespace vch
