#include "cellcap/sweep.hpp"

#include "presets.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

namespace cellcap::sweep {

namespace {

using strategies::CsitThreshold;
using strategies::DistanceAloha;
using strategies::PowerControl;
using strategies::PureAloha;

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string fmt(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::vector<std::string> split_list(const std::string& v)
{
    std::vector<std::string> out;
    std::string cur;
    for (char ch : v) {
        if (ch == ',' || ch == ' ' || ch == '\t') {
            if (!cur.empty())
                out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty())
        out.push_back(cur);
    return out;
}

double parse_double(const std::string& key, const std::string& v)
{
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out))
        throw config_error(key, "expected a number, got '" + v + "'");
    return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v)
{
    std::uint64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
        // Accept integral values written in floating notation, e.g. 1e5.
        const double d = parse_double(key, v);
        if (!(d >= 0.0 && d < 1.8e19 && std::floor(d) == d))
            throw config_error(key, "expected a non-negative integer, got '" + v + "'");
        return static_cast<std::uint64_t>(d);
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes")
        return true;
    if (v == "false" || v == "0" || v == "no")
        return false;
    throw config_error(key, "expected true or false, got '" + v + "'");
}

const std::set<std::string>& general_keys()
{
    static const std::set<std::string> keys{
        "lambda_grid", "mu_density_ratio", "pathloss_exp", "sinr_threshold", "proc_gain", "noise",
        "avg_power", "antennas", "window_mean_points", "strategy", "tau", "coordination_k",
        "enhanced_mode", "max_slots", "realizations", "seed", "threads", "bounds", "bound_eta",
        "bound_delta", "ub_form", "reference", "reference_anchor", "out", "format"};
    return keys;
}

const std::map<std::string, std::set<std::string>>& strategy_keys()
{
    static const std::map<std::string, std::set<std::string>> keys{
        {"pure_aloha", {"aloha_p", "aloha_power"}},
        {"distance_aloha", {"distance_p0", "distance_power0", "distance_rho"}},
        {"power_control", {"epsilon"}},
        {"csit_threshold", {"csit_delta"}},
    };
    return keys;
}

/// Default tau implied by the strategy: the widest range p P can span.
double derived_tau(const strategies::Strategy& s)
{
    if (const auto* a = std::get_if<PureAloha>(&s.rule))
        return std::max(1.0, s.avg_power / (a->p * a->power));
    if (const auto* a = std::get_if<DistanceAloha>(&s.rule))
        return std::max(1.0, s.avg_power / (a->p0 * a->power0));
    return 1.0;
}

} // namespace

std::string_view to_string(Format f)
{
    return f == Format::csv ? "csv" : "json";
}

std::string_view to_string(ReferenceKind k)
{
    return k == ReferenceKind::poly ? "poly" : "exp";
}

SweepSpec parse_config(std::string_view text)
{
    std::map<std::string, std::string> kv;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.resize(hash);
        const std::string body = trim(line);
        if (body.empty())
            continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw config_error("line " + std::to_string(lineno), "expected 'key = value'");
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        if (key.empty())
            throw config_error("line " + std::to_string(lineno), "missing key");
        if (!kv.emplace(key, value).second)
            throw config_error(key, "given more than once");
    }

    SweepSpec spec;
    auto& sc = spec.scenario;
    auto& cfg = sc.cfg;

    const std::string strategy = kv.count("strategy") ? kv["strategy"] : "power_control";
    const auto sk = strategy_keys().find(strategy);
    if (sk == strategy_keys().end())
        throw config_error("strategy", "unknown strategy '" + strategy + "'");
    for (const auto& [key, value] : kv) {
        if (general_keys().count(key) || sk->second.count(key))
            continue;
        bool other = false;
        for (const auto& [name, keys] : strategy_keys())
            other = other || keys.count(key);
        if (other)
            throw config_error(key, "not used by strategy " + strategy);
        throw config_error(key, "unknown key");
    }

    auto num = [&](const std::string& key, double& dst) {
        if (auto it = kv.find(key); it != kv.end())
            dst = parse_double(key, it->second);
    };
    auto u64 = [&](const std::string& key, auto& dst) {
        if (auto it = kv.find(key); it != kv.end())
            dst = static_cast<std::remove_reference_t<decltype(dst)>>(parse_u64(key, it->second));
    };

    if (auto it = kv.find("lambda_grid"); it != kv.end()) {
        for (const auto& item : split_list(it->second))
            spec.grid.push_back(parse_double("lambda_grid", item));
    } else {
        spec.grid = {1.0};
    }
    num("mu_density_ratio", spec.mu_density_ratio);
    num("pathloss_exp", cfg.pathloss_exp);
    num("sinr_threshold", cfg.sinr_threshold);
    num("proc_gain", cfg.proc_gain);
    num("noise", cfg.noise);
    num("avg_power", cfg.avg_power);
    num("window_mean_points", cfg.window_mean_points);
    if (auto it = kv.find("antennas"); it != kv.end()) {
        const auto a = parse_u64("antennas", it->second);
        if (a < 1 || a > 4096)
            throw config_error("antennas", "must lie in [1, 4096]");
        cfg.antennas = static_cast<int>(a);
    }

    sc.strategy.avg_power = cfg.avg_power;
    if (strategy == "pure_aloha") {
        PureAloha a;
        num("aloha_p", a.p);
        num("aloha_power", a.power);
        sc.strategy.rule = a;
    } else if (strategy == "distance_aloha") {
        DistanceAloha a;
        num("distance_p0", a.p0);
        num("distance_power0", a.power0);
        num("distance_rho", a.rho);
        sc.strategy.rule = a;
    } else if (strategy == "power_control") {
        PowerControl pc;
        num("epsilon", pc.epsilon);
        sc.strategy.rule = pc;
    } else {
        CsitThreshold c;
        if (auto it = kv.find("csit_delta"); it != kv.end() && it->second != "auto")
            c.delta = parse_double("csit_delta", it->second);
        sc.strategy.rule = c;
    }
    if (auto it = kv.find("tau"); it != kv.end() && it->second != "auto")
        sc.strategy.tau = parse_double("tau", it->second);
    else
        sc.strategy.tau = derived_tau(sc.strategy);

    u64("coordination_k", sc.coordination_k);
    if (auto it = kv.find("enhanced_mode"); it != kv.end())
        sc.enhanced_mode = parse_bool("enhanced_mode", it->second);
    u64("max_slots", sc.max_slots);
    u64("realizations", sc.n_realizations);
    u64("seed", sc.seed);
    spec.seed_in_config = kv.count("seed") > 0;
    if (auto it = kv.find("threads"); it != kv.end()) {
        const auto t = parse_u64("threads", it->second);
        if (t < 1 || t > 1024)
            throw config_error("threads", "must lie in [1, 1024]");
        sc.threads = static_cast<unsigned>(t);
    }

    if (auto it = kv.find("bounds"); it != kv.end()) {
        std::set<bounds::BoundKind> chosen;
        for (const auto& item : split_list(it->second))
            if (item != "none")
                chosen.insert(bounds::parse_bound_kind(item));
        for (auto k : bounds::all_bound_kinds)
            if (chosen.count(k))
                spec.bounds.push_back(k);
    }
    if (auto it = kv.find("bound_eta"); it != kv.end() && it->second != "measured")
        spec.bound_eta = parse_double("bound_eta", it->second);
    num("bound_delta", spec.bound_delta);
    if (auto it = kv.find("ub_form"); it != kv.end()) {
        if (it->second == "corrected")
            spec.ub_form = bounds::InterferenceFactorForm::corrected;
        else if (it->second == "as_printed")
            spec.ub_form = bounds::InterferenceFactorForm::as_printed;
        else
            throw config_error("ub_form", "expected corrected or as_printed");
    }
    if (auto it = kv.find("reference"); it != kv.end()) {
        for (const auto& item : split_list(it->second)) {
            if (item == "poly")
                spec.references.push_back(ReferenceKind::poly);
            else if (item == "exp")
                spec.references.push_back(ReferenceKind::exp);
            else if (item != "none")
                throw config_error("reference", "expected poly, exp or none");
        }
    }
    if (auto it = kv.find("reference_anchor"); it != kv.end() && it->second != "first")
        spec.reference_anchor = parse_double("reference_anchor", it->second);
    if (auto it = kv.find("out"); it != kv.end())
        spec.out = it->second;
    if (auto it = kv.find("format"); it != kv.end()) {
        if (it->second == "csv")
            spec.format = Format::csv;
        else if (it->second == "json")
            spec.format = Format::json;
        else
            throw config_error("format", "expected csv or json");
    }
    if (!spec.grid.empty())
        cfg.bs_density = spec.grid.front();
    cfg.mu_density = spec.mu_density_ratio * cfg.bs_density;
    return spec;
}

SweepSpec load_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::vector<std::string> preset_names()
{
    std::vector<std::string> out;
    for (const auto& p : detail::embedded_presets)
        out.emplace_back(p.name);
    return out;
}

std::string preset_text(std::string_view name)
{
    for (const auto& p : detail::embedded_presets)
        if (p.name == name)
            return std::string(p.text);
    throw config_error("preset", "unknown preset '" + std::string(name) + "'");
}

SweepSpec load_preset(std::string_view name)
{
    SweepSpec spec = parse_config(preset_text(name));
    spec.preset = std::string(name);
    return spec;
}

void validate_config(const SweepSpec& spec)
{
    if (spec.grid.empty())
        throw config_error("lambda_grid", "must not be empty");
    for (std::size_t i = 0; i < spec.grid.size(); ++i) {
        if (!(spec.grid[i] > 0.0))
            throw config_error("lambda_grid", "densities must be positive");
        if (i > 0 && !(spec.grid[i] > spec.grid[i - 1]))
            throw config_error("lambda_grid", "must be strictly increasing");
    }
    if (!(spec.mu_density_ratio >= 0.0))
        throw config_error("mu_density_ratio", "must be non-negative");
    for (double lambda : spec.grid)
        scenario_at(spec, lambda).validate();

    const auto& strat = spec.scenario.strategy;
    for (auto k : spec.bounds) {
        if (k == bounds::BoundKind::ub_powercontrol && !std::holds_alternative<PowerControl>(strat.rule))
            throw config_error("bounds", "ub_powercontrol needs strategy power_control");
    }
    if (spec.bound_eta && !(*spec.bound_eta > 0.0 && *spec.bound_eta <= 1.0))
        throw config_error("bound_eta", "must lie in (0, 1]");
    if (spec.bound_eta) {
        const auto p = bound_params(spec, spec.grid.front(), *spec.bound_eta);
        for (auto k : spec.bounds) {
            if ((k == bounds::BoundKind::lb_highdensity || k == bounds::BoundKind::lb_coordination) &&
                !(p.c2() > 0.0 && std::isfinite(p.c2())))
                throw config_error("bound_eta", "c2 requires 0 < eta exp(-tau/M) < 1");
        }
    }
    if (!(spec.bound_delta >= 0.0))
        throw config_error("bound_delta", "must be non-negative");
    if (spec.reference_anchor &&
        std::find(spec.grid.begin(), spec.grid.end(), *spec.reference_anchor) == spec.grid.end())
        throw config_error("reference_anchor", "must be one of the lambda_grid values");
}

std::string normalized_echo(const SweepSpec& spec)
{
    const auto& sc = spec.scenario;
    const auto& cfg = sc.cfg;
    std::ostringstream os;
    auto kv = [&](std::string_view k, const std::string& v) { os << k << " = " << v << '\n'; };
    std::string grid;
    for (std::size_t i = 0; i < spec.grid.size(); ++i)
        grid += (i ? ", " : "") + fmt(spec.grid[i]);
    kv("strategy", sc.strategy.name());
    std::visit(
        [&](const auto& r) {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, PureAloha>) {
                kv("aloha_p", fmt(r.p));
                kv("aloha_power", fmt(r.power));
            } else if constexpr (std::is_same_v<T, DistanceAloha>) {
                kv("distance_p0", fmt(r.p0));
                kv("distance_power0", fmt(r.power0));
                kv("distance_rho", fmt(r.rho));
            } else if constexpr (std::is_same_v<T, PowerControl>) {
                kv("epsilon", fmt(r.epsilon));
            } else {
                kv("csit_delta", r.delta ? fmt(*r.delta) : "auto");
            }
        },
        sc.strategy.rule);
    kv("tau", fmt(sc.strategy.tau));
    kv("lambda_grid", grid);
    kv("mu_density_ratio", fmt(spec.mu_density_ratio));
    kv("pathloss_exp", fmt(cfg.pathloss_exp));
    kv("sinr_threshold", fmt(cfg.sinr_threshold));
    kv("proc_gain", fmt(cfg.proc_gain));
    kv("noise", fmt(cfg.noise));
    kv("avg_power", fmt(cfg.avg_power));
    kv("antennas", std::to_string(cfg.antennas));
    kv("window_mean_points", fmt(cfg.window_mean_points));
    kv("coordination_k", std::to_string(sc.coordination_k));
    kv("enhanced_mode", sc.enhanced_mode ? "true" : "false");
    kv("max_slots", std::to_string(sc.max_slots));
    kv("realizations", std::to_string(sc.n_realizations));
    kv("seed", std::to_string(sc.seed));
    kv("threads", std::to_string(sc.threads));
    std::string b;
    for (std::size_t i = 0; i < spec.bounds.size(); ++i)
        b += (i ? ", " : "") + std::string(bounds::to_string(spec.bounds[i]));
    kv("bounds", b.empty() ? "none" : b);
    kv("bound_eta", spec.bound_eta ? fmt(*spec.bound_eta) : "measured");
    kv("bound_delta", fmt(spec.bound_delta));
    kv("ub_form", spec.ub_form == bounds::InterferenceFactorForm::corrected ? "corrected" : "as_printed");
    std::string r;
    for (std::size_t i = 0; i < spec.references.size(); ++i)
        r += (i ? ", " : "") + std::string(to_string(spec.references[i]));
    kv("reference", r.empty() ? "none" : r);
    kv("reference_anchor", spec.reference_anchor ? fmt(*spec.reference_anchor) : "first");
    kv("format", std::string(to_string(spec.format)));
    if (!spec.out.empty())
        kv("out", spec.out);
    return os.str();
}

bounds::BoundParams bound_params(const SweepSpec& spec, double lambda, double eta)
{
    auto cfg = spec.scenario.cfg;
    cfg.bs_density = lambda;
    auto p = bounds::BoundParams::from_config(cfg);
    p.tau = spec.scenario.strategy.tau;
    p.eta = eta;
    p.delta = spec.bound_delta;
    if (const auto* pc = std::get_if<PowerControl>(&spec.scenario.strategy.rule))
        p.epsilon = pc->epsilon;
    return p;
}

arq::SimScenario scenario_at(const SweepSpec& spec, double lambda)
{
    arq::SimScenario s = spec.scenario;
    s.cfg.bs_density = lambda;
    s.cfg.mu_density = spec.mu_density_ratio * lambda;
    s.strategy.avg_power = s.cfg.avg_power;
    return s;
}

std::vector<double> emit_reference_curve(ReferenceKind kind, const std::vector<double>& grid,
                                         double lambda0, double y0, double shape)
{
    if (std::find(grid.begin(), grid.end(), lambda0) == grid.end())
        throw request_error("reference anchor is not a grid point");
    std::vector<double> out;
    out.reserve(grid.size());
    for (double lambda : grid) {
        if (kind == ReferenceKind::poly)
            out.push_back(lambda == lambda0 ? y0 : y0 * std::pow(lambda / lambda0, -shape / 2.0));
        else
            out.push_back(lambda == lambda0 ? y0 : y0 * std::exp(shape * (lambda - lambda0)));
    }
    return out;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec)
{
    validate_config(spec);
    std::vector<SweepRow> rows;
    for (double lambda : spec.grid) {
        const auto stats = arq::simulate_delay(scenario_at(spec, lambda));
        SweepRow row;
        row.lambda = lambda;
        row.mean_delay_censored = stats.mean_censored();
        row.ci_halfwidth = stats.ci_halfwidth();
        row.survival_at_tmax = stats.survival(stats.max_slots());
        row.censored_count = stats.censored_count();
        row.n = stats.n();
        row.capacity_network = stats.capacity_network();
        row.capacity_per_bs = stats.capacity_per_bs();
        row.capacity_per_mu = stats.capacity_per_mu();
        row.eta_measured = stats.eta_measured();
        row.eta_used = spec.bound_eta.value_or(row.eta_measured);
        const auto p = bound_params(spec, lambda, row.eta_used);
        for (auto k : spec.bounds) {
            double v = std::numeric_limits<double>::quiet_NaN();
            try {
                switch (k) {
                case bounds::BoundKind::lb_lowdensity:
                    v = bounds::lb_lowdensity(p);
                    break;
                case bounds::BoundKind::lb_highdensity:
                    v = bounds::lb_highdensity(p);
                    break;
                case bounds::BoundKind::lb_csir:
                    v = bounds::lb_csir(p);
                    break;
                case bounds::BoundKind::ub_powercontrol:
                    v = bounds::ub_powercontrol(p, spec.ub_form);
                    break;
                case bounds::BoundKind::lb_coordination:
                    v = bounds::lb_coordination(p, static_cast<int>(spec.scenario.coordination_k) + 1);
                    break;
                }
            } catch (const config_error&) {
                // A measured eta can leave a bound undefined; the cell stays nan.
            }
            row.bound_values.push_back(v);
        }
        rows.push_back(std::move(row));
    }

    if (!spec.references.empty()) {
        const double lambda0 = spec.reference_anchor.value_or(spec.grid.front());
        const auto it = std::find(spec.grid.begin(), spec.grid.end(), lambda0);
        if (it == spec.grid.end())
            throw request_error("reference anchor is not a grid point");
        const auto& anchor = rows[static_cast<std::size_t>(it - spec.grid.begin())];
        for (auto kind : spec.references) {
            double shape = spec.scenario.cfg.pathloss_exp;
            if (kind == ReferenceKind::exp)
                shape = std::numbers::pi * bound_params(spec, lambda0, anchor.eta_used).c2();
            const auto curve = emit_reference_curve(kind, spec.grid, lambda0, anchor.mean_delay_censored, shape);
            for (std::size_t i = 0; i < rows.size(); ++i)
                rows[i].reference_values.push_back(curve[i]);
        }
    }
    return rows;
}

std::vector<std::string> column_names(const SweepSpec& spec)
{
    std::vector<std::string> cols{"lambda",          "mean_delay_censored", "ci_halfwidth",
                                  "survival_at_tmax", "censored_count",     "n",
                                  "capacity_network", "capacity_per_bs",    "capacity_per_mu",
                                  "eta_measured",     "eta_used"};
    for (auto k : spec.bounds)
        cols.emplace_back(bounds::to_string(k));
    for (auto r : spec.references)
        cols.push_back("ref_" + std::string(to_string(r)));
    return cols;
}

namespace {

std::vector<std::string> row_cells(const SweepRow& r)
{
    std::vector<std::string> cells{fmt(r.lambda),
                                   fmt(r.mean_delay_censored),
                                   fmt(r.ci_halfwidth),
                                   fmt(r.survival_at_tmax),
                                   std::to_string(r.censored_count),
                                   std::to_string(r.n),
                                   fmt(r.capacity_network),
                                   fmt(r.capacity_per_bs),
                                   fmt(r.capacity_per_mu),
                                   fmt(r.eta_measured),
                                   fmt(r.eta_used)};
    for (double v : r.bound_values)
        cells.push_back(fmt(v));
    for (double v : r.reference_values)
        cells.push_back(fmt(v));
    return cells;
}

} // namespace

void write_csv(std::ostream& os, const SweepSpec& spec, const std::vector<SweepRow>& rows)
{
    os << "# cellcap " << tool_version << '\n';
    os << "# seed = " << spec.scenario.seed << '\n';
    if (!spec.preset.empty())
        os << "# preset = " << spec.preset << '\n';
    std::istringstream echo(normalized_echo(spec));
    std::string line;
    while (std::getline(echo, line))
        os << "# " << line << '\n';
    const auto cols = column_names(spec);
    for (std::size_t i = 0; i < cols.size(); ++i)
        os << (i ? "," : "") << cols[i];
    os << '\n';
    for (const auto& r : rows) {
        const auto cells = row_cells(r);
        for (std::size_t i = 0; i < cells.size(); ++i)
            os << (i ? "," : "") << cells[i];
        os << '\n';
    }
}

void write_json(std::ostream& os, const SweepSpec& spec, const std::vector<SweepRow>& rows)
{
    using nlohmann::ordered_json;
    ordered_json doc;
    doc["tool"] = "cellcap";
    doc["version"] = std::string(tool_version);
    doc["seed"] = spec.scenario.seed;
    if (!spec.preset.empty())
        doc["preset"] = spec.preset;
    ordered_json config = ordered_json::object();
    std::istringstream echo(normalized_echo(spec));
    std::string line;
    while (std::getline(echo, line)) {
        const auto eq = line.find(" = ");
        config[line.substr(0, eq)] = line.substr(eq + 3);
    }
    doc["config"] = config;
    const auto cols = column_names(spec);
    doc["columns"] = cols;
    ordered_json arr = ordered_json::array();
    auto num = [](double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); };
    for (const auto& r : rows) {
        ordered_json o;
        o["lambda"] = num(r.lambda);
        o["mean_delay_censored"] = num(r.mean_delay_censored);
        o["ci_halfwidth"] = num(r.ci_halfwidth);
        o["survival_at_tmax"] = num(r.survival_at_tmax);
        o["censored_count"] = r.censored_count;
        o["n"] = r.n;
        o["capacity_network"] = num(r.capacity_network);
        o["capacity_per_bs"] = num(r.capacity_per_bs);
        o["capacity_per_mu"] = num(r.capacity_per_mu);
        o["eta_measured"] = num(r.eta_measured);
        o["eta_used"] = num(r.eta_used);
        std::size_t c = 11;
        for (double v : r.bound_values)
            o[cols[c++]] = num(v);
        for (double v : r.reference_values)
            o[cols[c++]] = num(v);
        arr.push_back(std::move(o));
    }
    doc["rows"] = arr;
    os << doc.dump(2) << '\n';
}

void write_output(const SweepSpec& spec, const std::vector<SweepRow>& rows)
{
    std::ofstream out(spec.out, std::ios::binary | std::ios::trunc);
    if (!out)
        throw io_error("cannot open output file '" + spec.out + "'");
    if (spec.format == Format::csv)
        write_csv(out, spec, rows);
    else
        write_json(out, spec, rows);
    out.flush();
    if (!out)
        throw io_error("failed writing output file '" + spec.out + "'");
}

} // namespace cellcap::sweep
