#include "mfl/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "mfl/csv.hpp"
#include "mfl/errors.hpp"
#include "mfl/measures_io.hpp"

namespace mfl {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_view(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::uint64_t parse_unsigned(std::string_view s) {
    s = trim(s);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ArgumentError("not a nonnegative integer: '" + std::string(s) + "'");
    }
    return v;
}

std::vector<double> parse_reals(std::string_view s) {
    std::vector<double> out;
    for (auto part : split_view(s, ',')) out.push_back(csv::parse_real(part));
    return out;
}

// `name:k1=v1,k2=v2` → parameters by key; every key must be consumed.
struct SpecArgs {
    std::string kind;
    std::map<std::string, double, std::less<>> values;

    double take(std::string_view key) {
        const auto it = values.find(key);
        if (it == values.end()) throw ArgumentError(kind + ": missing parameter '" + std::string(key) + "'");
        const double v = it->second;
        values.erase(it);
        return v;
    }
    void finish() const {
        if (!values.empty()) throw ArgumentError(kind + ": unknown parameter '" + values.begin()->first + "'");
    }
};

SpecArgs parse_spec_args(std::string_view spec) {
    SpecArgs args;
    spec = trim(spec);
    const auto colon = spec.find(':');
    args.kind = std::string(trim(spec.substr(0, colon)));
    if (colon == std::string_view::npos) return args;
    for (auto part : split_view(spec.substr(colon + 1), ',')) {
        const auto eq = part.find('=');
        if (eq == std::string_view::npos) throw ArgumentError(args.kind + ": expected key=value, got '" + std::string(part) + "'");
        const std::string key(trim(part.substr(0, eq)));
        if (!args.values.emplace(key, csv::parse_real(part.substr(eq + 1))).second) {
            throw ArgumentError(args.kind + ": duplicate parameter '" + key + "'");
        }
    }
    return args;
}

const std::map<std::string, ExperimentType, std::less<>>& experiment_names() {
    static const std::map<std::string, ExperimentType, std::less<>> names = {
        {"simulate", ExperimentType::Simulate},
        {"solve-pde", ExperimentType::SolvePde},
        {"chaos-sweep", ExperimentType::ChaosSweep},
        {"evi-check", ExperimentType::EviCheck},
        {"evi-lifted-check", ExperimentType::EviLiftedCheck},
        {"gamma-check", ExperimentType::GammaCheck},
        {"df-check", ExperimentType::DfCheck},
        {"isometry-check", ExperimentType::IsometryCheck},
    };
    return names;
}

struct KeyRules {
    std::set<std::string, std::less<>> allowed;
    std::vector<std::string> required;
};

KeyRules rules_for(ExperimentType type) {
    KeyRules r;
    r.allowed = {"experiment", "seed", "out_dir"};
    r.required = {"seed"};
    const auto add = [&](std::initializer_list<const char*> keys) {
        for (const char* k : keys) r.allowed.insert(k);
    };
    const auto need = [&](std::initializer_list<const char*> keys) {
        for (const char* k : keys) {
            r.allowed.insert(k);
            r.required.push_back(k);
        }
    };
    switch (type) {
        case ExperimentType::Simulate:
            add({"V", "H", "left", "right", "cells", "dt", "t_end", "snapshot_times"});
            need({"N", "M", "rho0"});
            break;
        case ExperimentType::SolvePde:
            add({"V", "H", "left", "right", "cells", "pde_dt", "t_end", "snapshot_times"});
            need({"rho0"});
            break;
        case ExperimentType::ChaosSweep:
            add({"V", "H", "left", "right", "cells", "dt", "pde_dt"});
            need({"N_list", "M", "t_list", "rho0"});
            break;
        case ExperimentType::EviCheck:
            add({"V", "H", "left", "right", "cells", "pde_dt", "s"});
            need({"rho1", "rho2", "t", "lambda"});
            break;
        case ExperimentType::EviLiftedCheck:
            add({"V", "H", "left", "right", "cells", "dt", "s"});
            need({"N", "M", "rho0", "nu", "t", "lambda"});
            break;
        case ExperimentType::GammaCheck:
            add({"V", "H", "left", "right", "cells"});
            need({"rho0", "N_list"});
            break;
        case ExperimentType::DfCheck:
            need({"sites", "N", "n", "table"});
            break;
        case ExperimentType::IsometryCheck:
            add({"left", "right", "cells"});
            need({"rho1", "rho2", "N", "M"});
            break;
    }
    return r;
}

const std::set<std::string, std::less<>>& all_keys() {
    static const auto keys = [] {
        std::set<std::string, std::less<>> k;
        for (const auto& [name, type] : experiment_names()) {
            const auto r = rules_for(type);
            k.insert(r.allowed.begin(), r.allowed.end());
        }
        return k;
    }();
    return keys;
}

struct Entry {
    std::string value;
    int line = 0;
};

[[noreturn]] void field_error(const std::string& key, const Entry& e, const std::string& why) {
    throw ConfigError("field '" + key + "': " + why, e.line);
}

void validate(const ExperimentConfig& c, const std::map<std::string, Entry, std::less<>>& entries) {
    const auto where = [&](const char* key) {
        const auto it = entries.find(key);
        return it == entries.end() ? Entry{} : it->second;
    };
    const auto check = [&](bool ok, const char* key, const std::string& why) {
        if (!ok) field_error(key, where(key), why);
    };
    const auto in = [&](const char* key) { return entries.count(key) > 0; };

    check(c.right > c.left, "right", "must exceed left");
    check(c.cells >= 2, "cells", "must be at least 2");
    check(c.dt > 0.0, "dt", "must be positive");
    check(c.pde_dt >= 0.0, "pde_dt", "must be nonnegative");
    check(c.t_end >= 0.0, "t_end", "must be nonnegative");
    check(std::is_sorted(c.snapshot_times.begin(), c.snapshot_times.end()), "snapshot_times", "must be sorted");
    for (double t : c.snapshot_times) check(t >= 0.0 && t <= c.t_end, "snapshot_times", "must lie in [0, t_end]");
    if (in("N")) check(c.n_particles >= 1, "N", "must be positive");
    if (in("M")) check(c.n_replicas >= 1, "M", "must be positive");
    if (in("N_list")) {
        check(!c.n_list.empty() && c.n_list.front() >= 1, "N_list", "must be nonempty and positive");
        check(std::adjacent_find(c.n_list.begin(), c.n_list.end(), std::greater_equal<>()) == c.n_list.end(),
              "N_list", "must be strictly increasing");
    }
    if (in("t_list")) {
        check(!c.t_list.empty() && c.t_list.front() >= 0.0, "t_list", "must be nonempty and nonnegative");
        check(std::is_sorted(c.t_list.begin(), c.t_list.end()), "t_list", "must be sorted");
    }
    if (in("t")) {
        check(c.s >= 0.0, "s", "must be nonnegative");
        check(c.t >= c.s, "t", "must be at least s");
    }

    const auto try_parse = [&](const char* key, auto&& fn) {
        try {
            fn();
        } catch (const ConfigError& e) {
            field_error(key, where(key), e.what());
        } catch (const ArgumentError& e) {
            field_error(key, where(key), e.what());
        }
    };
    try_parse("V", [&] { (void)c.v(); });
    try_parse("H", [&] { (void)c.h(); });
    for (const char* key : {"rho0", "rho1", "rho2", "nu"}) {
        const std::string& spec = key == std::string_view("rho0")   ? c.rho0
                                  : key == std::string_view("rho1") ? c.rho1
                                  : key == std::string_view("rho2") ? c.rho2
                                                                    : c.nu;
        if (in(key)) try_parse(key, [&] { (void)parse_density(spec, c.left, c.right, c.cells); });
    }
    if (c.type == ExperimentType::DfCheck) {
        check(c.sites.size() >= 1, "sites", "need at least one site");
        check(c.marginal_order >= 1 && c.marginal_order <= c.n_particles, "n", "need 1 <= n <= N");
        try_parse("table", [&] { (void)parse_table(c.table, c.sites, c.n_particles); });
    }
}

}  // namespace

std::string_view to_string(ExperimentType type) {
    for (const auto& [name, t] : experiment_names()) {
        if (t == type) return name;
    }
    return "unknown";
}

Potential ExperimentConfig::v() const {
    return Potential::parse(v_spec, std::max(std::abs(left), std::abs(right)));
}

Potential ExperimentConfig::h() const { return Potential::parse(h_spec, right - left); }

GridDensity parse_density(std::string_view spec, double left, double right, std::size_t cells) {
    spec = trim(spec);
    if (spec.starts_with("file:")) {
        const std::string path(trim(spec.substr(5)));
        std::ifstream in(path);
        if (!in) throw ArgumentError("cannot open density file '" + path + "'");
        auto m = read_measure_csv(in);
        auto* grid = std::get_if<GridDensity>(&m);
        if (grid == nullptr) throw ArgumentError("density file '" + path + "' does not hold a GridDensity");
        if (grid->cells() != cells || grid->left() != left || grid->right() != right) {
            throw ArgumentError("density file '" + path + "' is not on the configured grid");
        }
        return *grid;
    }
    auto args = parse_spec_args(spec);
    if (args.kind == "gaussian") {
        const double m = args.take("m");
        const double var = args.take("var");
        args.finish();
        if (!(var > 0.0)) throw ArgumentError("gaussian: var must be positive");
        return GridDensity::gaussian(left, right, cells, m, var);
    }
    if (args.kind == "uniform") {
        if (args.values.empty()) return GridDensity::uniform(left, right, cells);
        const double a = args.take("a");
        const double b = args.take("b");
        args.finish();
        if (!(b > a) || a < left || b > right) throw ArgumentError("uniform: need left <= a < b <= right");
        return GridDensity::uniform_on(left, right, cells, a, b);
    }
    throw ArgumentError("unknown density '" + std::string(spec) + "'");
}

DiscreteSymmetricMeasure parse_table(std::string_view spec, const std::vector<double>& sites, std::size_t n) {
    spec = trim(spec);
    const std::size_t k = sites.size();
    // k−1 listed probabilities; the last site takes the remainder.
    const auto site_probs = [&](std::vector<double> p) {
        if (p.size() + 1 != k) {
            throw ArgumentError("expected " + std::to_string(k - 1) + " probabilities for " + std::to_string(k) +
                                " sites");
        }
        double rest = 1.0;
        for (double x : p) rest -= x;
        if (rest < -1e-12) throw ArgumentError("site probabilities exceed 1");
        p.push_back(std::max(rest, 0.0));
        for (double x : p) {
            if (x < 0.0) throw ArgumentError("negative site probability");
        }
        return p;
    };

    if (spec == "uniform") return DiscreteSymmetricMeasure::uniform(sites, n);
    if (spec.starts_with("product:")) {
        auto body = trim(spec.substr(8));
        if (!body.starts_with("p=")) throw ArgumentError("product: expected p=<list>");
        const auto p = site_probs(parse_reals(body.substr(2)));
        return DiscreteSymmetricMeasure::product(sites, p, n);
    }
    if (spec.starts_with("mixture:")) {
        std::vector<double> weights;
        std::vector<std::vector<double>> components;
        for (auto part : split_view(spec.substr(8), ';')) {
            const auto star = part.find('*');
            if (star == std::string_view::npos) throw ArgumentError("mixture: expected <w>*<p1>/..");
            weights.push_back(csv::parse_real(part.substr(0, star)));
            std::vector<double> p;
            for (auto q : split_view(part.substr(star + 1), '/')) p.push_back(csv::parse_real(q));
            if (p.size() != k) throw ArgumentError("mixture: each component needs one probability per site");
            components.push_back(std::move(p));
        }
        return DiscreteSymmetricMeasure::mixture(sites, weights, components, n);
    }
    if (spec.starts_with("points:")) {
        std::vector<double> table(checked_table_size(k, n), 0.0);
        for (auto part : split_view(spec.substr(7), ';')) {
            const auto at = part.find('@');
            if (at == std::string_view::npos) throw ArgumentError("points: expected <i1> .. <iN>@<w>");
            std::vector<std::size_t> tuple;
            for (auto idx : split_view(part.substr(0, at), ' ')) {
                if (idx.empty()) continue;
                const auto i = parse_unsigned(idx);
                if (i >= k) throw ArgumentError("points: site index out of range");
                tuple.push_back(static_cast<std::size_t>(i));
            }
            if (tuple.size() != n) throw ArgumentError("points: each tuple needs N site indices");
            std::size_t index = 0;
            for (std::size_t i : tuple) index = index * k + i;
            table[index] += csv::parse_real(part.substr(at + 1));
        }
        return DiscreteSymmetricMeasure(sites, n, std::move(table));
    }
    throw ArgumentError("unknown table '" + std::string(spec) + "'");
}

ExperimentConfig parse_config(std::string_view text, std::optional<std::uint64_t> seed_override) {
    std::map<std::string, Entry, std::less<>> entries;
    int sections = 0;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = text.find('\n', pos);
        const auto raw = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;

        const auto line = trim(raw);
        if (line.empty() || line.front() == '#' || line.front() == ';') continue;
        if (line.front() == '[') {
            if (line != "[experiment]") throw ConfigError("unknown section " + std::string(line), line_no);
            if (++sections > 1) throw ConfigError("duplicate [experiment] section", line_no);
            continue;
        }
        if (sections == 0) throw ConfigError("key outside the [experiment] section", line_no);
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("expected key = value", line_no);
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) throw ConfigError("empty key", line_no);
        if (!all_keys().count(key)) throw ConfigError("unknown key '" + key + "'", line_no);
        if (!entries.emplace(key, Entry{value, line_no}).second) {
            throw ConfigError("duplicate key '" + key + "'", line_no);
        }
    }
    if (sections == 0) throw ConfigError("missing [experiment] section");

    const auto type_it = entries.find("experiment");
    if (type_it == entries.end()) throw ConfigError("missing required field 'experiment'");
    const auto name_it = experiment_names().find(type_it->second.value);
    if (name_it == experiment_names().end()) {
        throw ConfigError("field 'experiment': unknown experiment '" + type_it->second.value + "'",
                          type_it->second.line);
    }

    ExperimentConfig c;
    c.type = name_it->second;
    const auto rules = rules_for(c.type);
    for (const auto& [key, e] : entries) {
        if (!rules.allowed.count(key)) {
            throw ConfigError("key '" + key + "' is not used by experiment " + std::string(to_string(c.type)), e.line);
        }
    }
    for (const auto& key : rules.required) {
        if (key == "seed" && seed_override) continue;
        if (!entries.count(key)) throw ConfigError("missing required field '" + key + "'");
    }

    for (const auto& [key, e] : entries) {
        try {
            const auto& v = e.value;
            if (key == "experiment") {
            } else if (key == "seed") {
                c.seed = parse_unsigned(v);
            } else if (key == "out_dir") {
                if (v.empty()) throw ArgumentError("must not be empty");
                c.out_dir = v;
            } else if (key == "V") {
                c.v_spec = v;
            } else if (key == "H") {
                c.h_spec = v;
            } else if (key == "left") {
                c.left = csv::parse_real(v);
            } else if (key == "right") {
                c.right = csv::parse_real(v);
            } else if (key == "cells") {
                c.cells = parse_unsigned(v);
            } else if (key == "dt") {
                c.dt = csv::parse_real(v);
            } else if (key == "pde_dt") {
                c.pde_dt = csv::parse_real(v);
            } else if (key == "t_end") {
                c.t_end = csv::parse_real(v);
            } else if (key == "snapshot_times") {
                c.snapshot_times = parse_reals(v);
            } else if (key == "N") {
                c.n_particles = parse_unsigned(v);
            } else if (key == "M") {
                c.n_replicas = parse_unsigned(v);
            } else if (key == "N_list") {
                for (auto part : split_view(v, ',')) c.n_list.push_back(parse_unsigned(part));
            } else if (key == "t_list") {
                c.t_list = parse_reals(v);
            } else if (key == "n") {
                c.marginal_order = parse_unsigned(v);
            } else if (key == "sites") {
                c.sites = parse_reals(v);
            } else if (key == "table") {
                c.table = v;
            } else if (key == "rho0") {
                c.rho0 = v;
            } else if (key == "rho1") {
                c.rho1 = v;
            } else if (key == "rho2") {
                c.rho2 = v;
            } else if (key == "nu") {
                c.nu = v;
            } else if (key == "s") {
                c.s = csv::parse_real(v);
            } else if (key == "t") {
                c.t = csv::parse_real(v);
            } else if (key == "lambda") {
                c.lambda = csv::parse_real(v);
            }
        } catch (const ArgumentError& err) {
            field_error(key, e, err.what());
        }
    }
    if (seed_override) c.seed = *seed_override;
    validate(c, entries);
    return c;
}

}  // namespace mfl
