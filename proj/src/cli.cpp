#include "fracount/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <variant>

#include "fracount/combinatorics.hpp"
#include "fracount/counting.hpp"
#include "fracount/montecarlo.hpp"
#include "fracount/verify.hpp"

namespace fracount::cli {

namespace {

using json = nlohmann::ordered_json;
using Cell = std::variant<double, long long, std::string>;

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;
    /// Trailing rows whose first CSV field is the label.
    std::vector<std::pair<std::string, std::vector<Cell>>> footer;
    json inputs = json::object();
    bool uses_params = true;
    bool uses_tolerances = true;
    /// Result of verify; other commands always succeed once they return.
    bool ok = true;
};

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    const auto& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

json to_json(const Cell& c) {
    return std::visit([](const auto& v) { return json(v); }, c);
}

Cell big_cell(const BigInt& v) {
    if (v >= std::numeric_limits<long long>::min() && v <= std::numeric_limits<long long>::max())
        return static_cast<long long>(v);
    return v.str();
}

struct Options {
    std::optional<double> mu, beta;
    double rate = 1.0;
    std::optional<double> time, time_start, time_stop;
    std::optional<int> time_steps;
    std::optional<int> nmax;
    SeriesConfig cfg;
    std::uint64_t seed = 42;
    std::string format = "csv";
    std::string output;

    // Command specific.
    std::string kind = "frac";
    int max_order = 10;
    long long samples = 100000;
    long long ks_draws = 100000;
    int threads = 1;
    std::string grid = "default";
};

FractalityParams params_of(const Options& o) {
    if (!o.mu || !o.beta) throw InvalidParameter("--mu and --beta are required");
    return FractalityParams(*o.mu, *o.beta);
}

ProcessSpec spec_of(const Options& o) { return ProcessSpec(params_of(o), o.rate); }

std::vector<double> times_of(const Options& o) {
    const bool grid = o.time_start || o.time_stop || o.time_steps;
    if (o.time && grid) throw InvalidParameter("give either --time or --time-start/--time-stop/--time-steps");
    if (o.time) return {*o.time};
    if (!grid) throw InvalidParameter("--time or --time-start/--time-stop/--time-steps is required");
    if (!o.time_start || !o.time_stop || !o.time_steps)
        throw InvalidParameter("--time-start, --time-stop and --time-steps must be given together");
    if (*o.time_steps < 2) throw InvalidParameter("--time-steps must be >= 2");
    if (!(*o.time_start <= *o.time_stop)) throw InvalidParameter("--time-start must be <= --time-stop");
    std::vector<double> out;
    const double h = (*o.time_stop - *o.time_start) / (*o.time_steps - 1);
    for (int i = 0; i < *o.time_steps; ++i)
        out.push_back(i + 1 == *o.time_steps ? *o.time_stop : *o.time_start + i * h);
    return out;
}

json time_inputs(const std::vector<double>& ts) {
    return ts.size() == 1 ? json(ts[0]) : json(ts);
}

Table cmd_pmf(const Options& o) {
    const auto spec = spec_of(o);
    const auto ts = times_of(o);
    if (o.nmax && *o.nmax < 0) throw InvalidParameter("--nmax must be >= 0");
    Table t;
    const bool single = ts.size() == 1;
    t.header = single ? std::vector<std::string>{"n", "probability"} : std::vector<std::string>{"t", "n", "probability"};
    for (double time : ts) {
        const auto tab = o.nmax ? pmf_table(spec, time, *o.nmax, o.cfg) : pmf_table_auto(spec, time, o.cfg);
        for (std::size_t n = 0; n < tab.probs.size(); ++n) {
            std::vector<Cell> row;
            if (!single) row.push_back(time);
            row.push_back(static_cast<long long>(n));
            row.push_back(tab.probs[n]);
            t.rows.push_back(std::move(row));
        }
        if (single)
            t.footer.push_back({"tail_mass", {tab.tail_mass}});
        else
            t.footer.push_back({"tail_mass", {time, tab.tail_mass}});
    }
    t.inputs["time"] = time_inputs(ts);
    t.inputs["nmax"] = o.nmax ? json(*o.nmax) : json("auto");
    return t;
}

Table cmd_moments(const Options& o) {
    const auto spec = spec_of(o);
    const auto ts = times_of(o);
    Table t;
    t.header = {"t", "mean", "variance", "skewness", "kurtosis_excess", "raw2", "raw3", "raw4"};
    for (double time : ts) {
        const auto m = moment_set(spec, time);
        t.rows.push_back({time, m.raw[0], m.variance, m.skewness, m.kurtosis_excess, m.raw[1], m.raw[2], m.raw[3]});
    }
    t.inputs["time"] = time_inputs(ts);
    t.uses_tolerances = false;
    return t;
}

Table cmd_interarrival(const Options& o) {
    const auto spec = spec_of(o);
    const auto ts = times_of(o);
    Table t;
    t.header = {"tau", "density", "survival"};
    for (double tau : ts) t.rows.push_back({tau, interarrival_pdf(spec, tau, o.cfg), survival_zero(spec, tau, o.cfg)});
    t.inputs["tau"] = time_inputs(ts);
    return t;
}

Table cmd_bell(const Options& o) {
    const auto p = params_of(o);
    if (o.max_order < 0 || o.max_order > StirlingTable::kDefaultCap)
        throw InvalidParameter("--max must satisfy 0 <= max <= " + std::to_string(StirlingTable::kDefaultCap));
    Table t;
    t.header = {"m", "value"};
    for (int m = 0; m <= o.max_order; ++m) t.rows.push_back({static_cast<long long>(m), frac_number(p, m)});
    t.inputs["max"] = o.max_order;
    t.uses_tolerances = false;
    return t;
}

Table cmd_stirling(const Options& o) {
    if (o.kind != "frac" && o.kind != "1" && o.kind != "2") throw InvalidParameter("--kind must be frac, 1 or 2");
    if (o.max_order < 0 || o.max_order > StirlingTable::kDefaultCap)
        throw InvalidParameter("--max must satisfy 0 <= max <= " + std::to_string(StirlingTable::kDefaultCap));
    Table t;
    t.header = {"m", "l", "value"};
    t.uses_params = o.kind == "frac";
    t.uses_tolerances = false;
    std::optional<FracCombTable> frac;
    if (o.kind == "frac") frac = frac_comb_table(params_of(o), o.max_order);
    for (int m = 0; m <= o.max_order; ++m)
        for (int l = 0; l <= m; ++l) {
            Cell v = frac ? Cell(frac->at(m, l)) : big_cell(o.kind == "1" ? stirling1_signed(m, l) : stirling2(m, l));
            t.rows.push_back({static_cast<long long>(m), static_cast<long long>(l), v});
        }
    t.inputs["kind"] = o.kind;
    t.inputs["max"] = o.max_order;
    return t;
}

Table cmd_simulate(const Options& o) {
    const auto spec = spec_of(o);
    const auto ts = times_of(o);
    if (o.samples < 2) throw InvalidParameter("--samples must be >= 2");
    if (o.threads < 1) throw InvalidParameter("--threads must be >= 1");
    Table t;
    t.header = {"t", "mean", "se_mean", "exact_mean", "variance", "se_variance", "exact_variance"};
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const CountSampler sampler(spec, ts[i], o.cfg);
        const auto s = run_batches(RngSpec{o.seed}.child(i), o.samples,
                                   [&](Rng& r) { return double(sampler(r)); }, 100000, o.threads);
        t.rows.push_back({ts[i], s.mean, s.se_mean, mean(spec, ts[i]), s.variance, s.se_variance,
                          variance(spec, ts[i])});
    }
    t.inputs["time"] = time_inputs(ts);
    t.inputs["samples"] = o.samples;
    return t;
}

Table cmd_verify(const Options& o) {
    VerifyOptions v;
    v.grid = o.grid;
    v.samples = o.samples;
    v.ks_draws = o.ks_draws;
    v.seed = o.seed;
    v.threads = o.threads;
    if (v.threads < 1) throw InvalidParameter("--threads must be >= 1");
    const auto report = verify(v);
    Table t;
    t.header = {"check", "passed", "seconds", "detail"};
    for (const auto& c : report.checks)
        t.rows.push_back({c.name, static_cast<long long>(c.passed), c.seconds, c.detail});
    t.footer.push_back({"all_passed", {static_cast<long long>(report.passed())}});
    t.inputs["grid"] = o.grid;
    t.inputs["samples"] = o.samples;
    t.inputs["ks_draws"] = o.ks_draws;
    t.uses_params = false;
    t.uses_tolerances = false;
    t.ok = report.passed();
    return t;
}

void write_csv(const Table& t, std::ostream& os) {
    auto line = [&](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) os << (i ? "," : "") << fields[i];
        os << '\n';
    };
    line(t.header);
    for (const auto& row : t.rows) {
        std::vector<std::string> f;
        for (const auto& c : row) f.push_back(csv_field(c));
        line(f);
    }
    for (const auto& [label, cells] : t.footer) {
        std::vector<std::string> f{label};
        for (const auto& c : cells) f.push_back(csv_field(c));
        line(f);
    }
}

void write_json(const Table& t, const Options& o, const std::string& command, std::ostream& os) {
    json doc;
    doc["command"] = command;
    doc["params"] = t.uses_params
                        ? json{{"mu", *o.mu}, {"beta", *o.beta}, {"rate", o.rate}}
                        : json::object();
    doc["inputs"] = t.inputs;
    json values = json::object();
    for (std::size_t j = 0; j < t.header.size(); ++j) {
        json col = json::array();
        for (const auto& row : t.rows) col.push_back(to_json(row[j]));
        values[t.header[j]] = std::move(col);
    }
    // A label repeated once per time point becomes an array of its rows.
    json footers = json::object();
    for (const auto& [label, cells] : t.footer) {
        json v = cells.size() == 1 ? to_json(cells[0]) : json::array();
        if (cells.size() != 1)
            for (const auto& c : cells) v.push_back(to_json(c));
        footers[label].push_back(std::move(v));
    }
    for (auto& [label, rows] : footers.items()) values[label] = rows.size() == 1 ? rows[0] : rows;
    doc["values"] = std::move(values);
    doc["meta"]["tolerances"] = t.uses_tolerances ? json{{"rel_tol", o.cfg.rel_tol},
                                                         {"abs_tol", o.cfg.abs_tol},
                                                         {"max_terms", o.cfg.max_terms},
                                                         {"z_abs_max", o.cfg.z_abs_max}}
                                                   : json::object();
    doc["meta"]["seed"] = o.seed;
    os << doc.dump(2) << '\n';
}

// Expands --config FILE into flags for every key the command line does not
// already set. Returns the arguments reversed, as CLI::App::parse expects.
std::vector<std::string> with_config(const std::vector<std::string>& args) {
    std::vector<std::string> out;
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            path = args[i].substr(9);
    }
    std::vector<std::string> extra;
    if (!path.empty()) {
        std::ifstream f(path);
        if (!f) throw CLI::FileError::Missing(path);
        for (const auto& item : CLI::ConfigINI().from_config(f)) {
            if (item.inputs.empty()) continue;
            const std::string flag = "--" + item.name;
            const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
                return a == flag || a.rfind(flag + "=", 0) == 0;
            });
            if (given || item.name == "config") continue;
            extra.push_back(flag);
            extra.insert(extra.end(), item.inputs.begin(), item.inputs.end());
        }
    }
    out = args;
    // Insert after the subcommand name so the flags bind to it.
    const auto sub = std::find_if(out.begin(), out.end(), [](const std::string& a) { return a.rfind("-", 0) != 0; });
    out.insert(sub == out.end() ? out.end() : sub + 1, extra.begin(), extra.end());
    return {out.rbegin(), out.rend()};
}

std::filesystem::path resolve_output(const std::string& path) {
    std::filesystem::path p(path);
    if (p.is_relative())
        if (const char* dir = std::getenv("FRACOUNT_OUTPUT_DIR"); dir && *dir) p = std::filesystem::path(dir) / p;
    return p;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fractional non-homogeneous counting process: tables and self-checks", "fracount"};
    app.require_subcommand(1);
    Options o;

    auto add_process = [&](CLI::App* c, bool needs_params, bool needs_time) {
        auto* mu = c->add_option("--mu", o.mu, "memory exponent, 0 < mu <= 1");
        auto* beta = c->add_option("--beta", o.beta, "rate exponent, -mu < beta <= 1-mu");
        if (needs_params) {
            mu->required();
            beta->required();
        }
        c->add_option("--rate", o.rate, "arrival rate lambda")->capture_default_str();
        if (needs_time) {
            c->add_option("--time", o.time, "single time point");
            c->add_option("--time-start", o.time_start);
            c->add_option("--time-stop", o.time_stop);
            c->add_option("--time-steps", o.time_steps, "number of grid points, inclusive");
        }
    };
    auto add_common = [&](CLI::App* c) {
        c->add_option("--rel-tol", o.cfg.rel_tol, "series relative tolerance")->capture_default_str();
        c->add_option("--max-terms", o.cfg.max_terms, "series term cap")->capture_default_str();
        c->add_option("--z-max", o.cfg.z_abs_max, "largest accepted |z|")->capture_default_str();
        c->add_option("--seed", o.seed)->capture_default_str();
        c->add_option("--format", o.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
        c->add_option("--output", o.output, "file path; relative paths use $FRACOUNT_OUTPUT_DIR");
        c->add_option("--config", "flat key=value file; command-line flags take precedence");
    };

    auto* pmf = app.add_subcommand("pmf", "P(n,t) table with tail mass");
    add_process(pmf, true, true);
    pmf->add_option("--nmax", o.nmax, "largest n (default: until the tail is negligible)");
    auto* moments = app.add_subcommand("moments", "mean, variance, skewness, excess kurtosis, raw moments");
    add_process(moments, true, true);
    auto* inter = app.add_subcommand("interarrival", "first-arrival density and survival on a tau grid");
    add_process(inter, true, true);
    auto* bell = app.add_subcommand("bell", "fractional Bell numbers B(m)");
    add_process(bell, true, false);
    bell->add_option("--max", o.max_order)->capture_default_str();
    auto* stirling = app.add_subcommand("stirling", "Stirling triangles: fractional, first or second kind");
    add_process(stirling, false, false);
    stirling->add_option("--kind", o.kind, "frac, 1 (signed first kind) or 2")->capture_default_str();
    stirling->add_option("--max", o.max_order)->capture_default_str();
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo count moments against the exact values");
    add_process(simulate, true, true);
    simulate->add_option("--samples", o.samples)->capture_default_str();
    simulate->add_option("--threads", o.threads)->capture_default_str();
    auto* ver = app.add_subcommand("verify", "run the invariant suite");
    ver->add_option("--grid", o.grid, "default or quick")->capture_default_str();
    ver->add_option("--samples", o.samples, "count draws per grid point")->capture_default_str();
    ver->add_option("--ks-draws", o.ks_draws)->capture_default_str();
    ver->add_option("--threads", o.threads)->capture_default_str();
    for (auto* c : {pmf, moments, inter, bell, stirling, simulate, ver}) add_common(c);

    try {
        app.parse(with_config(args));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInvalid;
    }

    CLI::App* cmd = app.get_subcommands().front();
    const std::string name = cmd->get_name();
    try {
        o.cfg.validate();
        Table t;
        if (cmd == pmf)
            t = cmd_pmf(o);
        else if (cmd == moments)
            t = cmd_moments(o);
        else if (cmd == inter)
            t = cmd_interarrival(o);
        else if (cmd == bell)
            t = cmd_bell(o);
        else if (cmd == stirling)
            t = cmd_stirling(o);
        else if (cmd == simulate)
            t = cmd_simulate(o);
        else
            t = cmd_verify(o);

        std::ostringstream body;
        if (o.format == "json")
            write_json(t, o, name, body);
        else
            write_csv(t, body);
        if (o.output.empty()) {
            out << body.str();
        } else {
            const auto path = resolve_output(o.output);
            std::ofstream f(path, std::ios::binary);
            if (!(f << body.str())) {
                err << "error: cannot write " << path.string() << '\n';
                return kFailure;
            }
        }
        return t.ok ? kOk : kFailure;
    } catch (const InvalidParameter& e) {
        err << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << '\n';
        return kNumeric;
    }
}

}  // namespace fracount::cli
