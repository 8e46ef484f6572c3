#include "pfnet/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pfnet/model_io.hpp"
#include "pfnet/oracle.hpp"

namespace pfnet::cli {

namespace {

using nlohmann::json;

std::string fmt(double v, int sig) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(sig) << v;
    return os.str();
}

// Non-finite doubles have no JSON representation; store them as strings.
json jnum(double v) {
    if (std::isfinite(v)) return v;
    return fmt(v, 12);
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += "\"\"";
        else out += ch;
    }
    return out + "\"";
}

struct Report {
    json doc;
    std::string format = "table";
    std::string out_dir;

    explicit Report(const std::string& command) {
        doc["command"] = command;
        doc["inputs"] = json::object();
        doc["warnings"] = json::array();
        doc["tables"] = json::array();
    }
    void input(const std::string& key, json v) { doc["inputs"][key] = std::move(v); }
    void warn(const std::string& msg) { doc["warnings"].push_back(msg); }
    void table(const std::string& name, std::vector<std::string> columns, json rows) {
        doc["tables"].push_back(
            {{"name", name}, {"columns", std::move(columns)}, {"rows", std::move(rows)}});
    }

    static std::string cell(const json& c, int sig) {
        if (c.is_string()) return c.get<std::string>();
        if (c.is_number_float()) return fmt(c.get<double>(), sig);
        if (c.is_boolean()) return c.get<bool>() ? "true" : "false";
        return c.dump();
    }

    std::string to_csv() const {
        std::ostringstream os;
        for (const auto& w : doc["warnings"]) os << "# warning: " << w.get<std::string>() << "\n";
        for (const auto& t : doc["tables"]) {
            os << "# " << t["name"].get<std::string>() << "\n";
            const auto& cols = t["columns"];
            for (size_t i = 0; i < cols.size(); ++i)
                os << (i ? "," : "") << csv_escape(cols[i].get<std::string>());
            os << "\n";
            for (const auto& row : t["rows"]) {
                for (size_t i = 0; i < row.size(); ++i)
                    os << (i ? "," : "") << csv_escape(cell(row[i], 12));
                os << "\n";
            }
            os << "\n";
        }
        return os.str();
    }

    std::string to_table() const {
        std::ostringstream os;
        for (const auto& t : doc["tables"]) {
            const auto& cols = t["columns"];
            const bool keyval = cols.size() == 2 && cols[0] == "quantity" && cols[1] == "value";
            if (!keyval) os << "== " << t["name"].get<std::string>() << " ==\n";
            if (keyval) {
                for (const auto& row : t["rows"])
                    os << cell(row[0], 6) << " = " << cell(row[1], 6) << "\n";
                os << "\n";
                continue;
            }
            std::vector<size_t> width(cols.size());
            std::vector<std::vector<std::string>> cells;
            for (size_t i = 0; i < cols.size(); ++i) width[i] = cols[i].get<std::string>().size();
            for (const auto& row : t["rows"]) {
                std::vector<std::string> r;
                for (size_t i = 0; i < row.size(); ++i) {
                    r.push_back(cell(row[i], 6));
                    width[i] = std::max(width[i], r.back().size());
                }
                cells.push_back(std::move(r));
            }
            for (size_t i = 0; i < cols.size(); ++i)
                os << (i ? "  " : "") << std::setw(static_cast<int>(width[i])) << std::left
                   << cols[i].get<std::string>();
            os << "\n";
            for (const auto& r : cells) {
                for (size_t i = 0; i < r.size(); ++i)
                    os << (i ? "  " : "") << std::setw(static_cast<int>(width[i])) << std::left
                       << r[i];
                os << "\n";
            }
            os << "\n";
        }
        for (const auto& w : doc["warnings"]) os << "warning: " << w.get<std::string>() << "\n";
        return os.str();
    }

    void emit() const {
        if (format == "json") std::cout << doc.dump(2) << "\n";
        else if (format == "csv") std::cout << to_csv();
        else std::cout << to_table();
        if (!out_dir.empty()) {
            std::filesystem::create_directories(out_dir);
            write_file(out_dir + "/report.json", doc.dump(2) + "\n");
            write_file(out_dir + "/report.csv", to_csv());
        }
    }
};

struct Options {
    std::string model;
    long population = -1;  // -1 = keep the model file's value
    std::string out_dir;
    std::string format = "table";
    std::string dump_model;
    std::string regime = "auto";
    double order = 1.0;
    double u = 0.5;
    std::vector<double> t_grid;
    double tol = 1.0;
    std::string preset;
};

long resolve_population(const ClosedNetwork& net, long flag) {
    return flag >= 0 ? flag : net.population;
}

// Single-instance regime selection for --regime auto: wrap the model as a
// one-index family and run the scaling classifier.
std::string auto_regime(const ClosedNetwork& net, long m, Report& rep) {
    NetworkFamily fam;
    fam.name = "model";
    fam.indices = {net.size()};
    fam.network = [net](int) { return net; };
    fam.population = [m](int, double) { return m; };
    const std::vector<RegimeReport> rr = classify(fam);
    const RegimeClass cls = rr.at(0).cls;
    rep.input("auto_class", to_string(cls));
    if (cls == RegimeClass::NearCritical)
        rep.warn("near-critical, no theorem applies; falling back to the normal expansion");
    const bool gamma =
        cls == RegimeClass::SaturatedGamma || cls == RegimeClass::SaturatedUnbounded;
    return gamma ? "gamma" : "normal";
}

std::string join_notes(const ApproxResult& a, const ApproxResult* b = nullptr) {
    std::vector<std::string> seen;
    auto add = [&](const std::vector<std::string>& notes) {
        for (const auto& n : notes)
            if (std::find(seen.begin(), seen.end(), n) == seen.end()) seen.push_back(n);
    };
    add(a.notes);
    if (b) add(b->notes);
    std::string out;
    for (const auto& n : seen) out += (out.empty() ? "" : "; ") + n;
    return out;
}

struct Grid {
    long lo = 0, hi = 0, step = 1;
};

Grid x_grid(const SolvedSurrogate& s, const std::string& regime, double xi) {
    Grid g;
    const double sigma = s.mom.sigma();
    g.hi = static_cast<long>(std::ceil(4.0 * sigma));
    g.lo = std::max(-g.hi, -s.m);
    if (regime == "gamma" && std::isfinite(xi))
        g.lo = std::max(g.lo, static_cast<long>(std::floor(-xi * s.alpha)) + 1);
    if (g.hi < g.lo) g.hi = g.lo;
    g.step = std::max(1L, (g.hi - g.lo) / 80);
    return g;
}

int cmd_lambda(const Options& opt) {
    ClosedNetwork net = load_network(opt.model);
    const long m = resolve_population(net, opt.population);
    net.population = m;
    if (!opt.dump_model.empty()) dump_network(net, opt.dump_model);
    const SolvedSurrogate s = solve_lambda(net, m);

    Report rep("lambda");
    rep.format = opt.format;
    rep.out_dir = opt.out_dir;
    rep.input("model", opt.model);
    rep.input("population", m);
    rep.table("lambda", {"quantity", "value"},
              json::array({json::array({"lambda_n", jnum(s.lambda)}),
                           json::array({"lambda0", jnum(s.lambda0)}),
                           json::array({"rho0", jnum(s.rho0)}),
                           json::array({"alpha", jnum(s.alpha)}),
                           json::array({"sigma", jnum(s.mom.sigma())}),
                           json::array({"population", m})}));
    json rows = json::array();
    for (int k = 0; k < net.size(); ++k)
        rows.push_back(json::array({k, to_string(net.curves[k].kind()), jnum(s.pi[k]),
                                    jnum(s.queues[k].arrival), jnum(s.queues[k].mom.mean),
                                    jnum(s.queues[k].mom.variance)}));
    rep.table("queues", {"k", "kind", "pi", "arrival", "mean", "variance"}, rows);
    rep.emit();
    return 0;
}

int cmd_exact(const Options& opt) {
    ClosedNetwork net = load_network(opt.model);
    const long m = resolve_population(net, opt.population);
    net.population = m;
    if (!opt.dump_model.empty()) dump_network(net, opt.dump_model);
    const ExactSolution ex = solve_exact(net);

    Report rep("exact");
    rep.format = opt.format;
    rep.out_dir = opt.out_dir;
    rep.input("model", opt.model);
    rep.input("population", m);
    rep.table("summary", {"quantity", "value"},
              json::array({json::array({"population", m}),
                           json::array({"log_z", jnum(ex.log_z.back())}),
                           json::array({"z", jnum(std::exp(ex.log_z.back()))})}));
    json marg = json::array();
    for (size_t k = 0; k < ex.marginal.size(); ++k)
        for (size_t q = 0; q < ex.marginal[k].size(); ++q)
            marg.push_back(json::array({k, q, jnum(ex.marginal[k][q])}));
    rep.table("marginal", {"k", "q", "p"}, marg);
    json means = json::array();
    for (size_t k = 0; k < ex.mean.size(); ++k)
        means.push_back(json::array({k, jnum(ex.mean[k])}));
    rep.table("mean", {"k", "mean"}, means);
    rep.emit();
    return 0;
}

int cmd_approx(const Options& opt) {
    ClosedNetwork net = load_network(opt.model);
    const long m = resolve_population(net, opt.population);
    net.population = m;
    if (!opt.dump_model.empty()) dump_network(net, opt.dump_model);
    const SolvedSurrogate s = solve_lambda(net, m);
    const QueuePartition part = partition(net, s.lambda);

    Report rep("approx");
    rep.format = opt.format;
    rep.out_dir = opt.out_dir;
    rep.input("model", opt.model);
    rep.input("population", m);
    rep.input("order", opt.order);
    std::string regime = opt.regime;
    if (regime == "auto") regime = auto_regime(net, m, rep);
    if (regime == "edgeworth") regime = "normal";
    rep.input("regime", regime);

    json rows = json::array();
    if (regime == "gamma") {
        const double xi = xi_total(net, part.bottleneck);
        const Grid g = x_grid(s, regime, xi);
        for (long x = g.lo; x <= g.hi; x += g.step) {
            const ApproxResult a = gamma_llt(net, s, part, static_cast<double>(x), opt.order);
            rows.push_back(json::array({x, jnum(a.value), jnum(a.budget_total()), join_notes(a)}));
        }
        rep.table("gamma", {"x", "gamma_llt", "budget", "notes"}, rows);
    } else {
        const Grid g = x_grid(s, regime, 0.0);
        for (long x = g.lo; x <= g.hi; x += g.step) {
            const ApproxResult a = normal_llt(s, static_cast<double>(x), opt.order);
            const ApproxResult e = edgeworth_llt(s, static_cast<double>(x), opt.order);
            rows.push_back(json::array({x, jnum(a.value), jnum(a.budget_total()), jnum(e.value),
                                        jnum(e.budget_total()), join_notes(a, &e)}));
        }
        rep.table("normal",
                  {"x", "normal_llt", "normal_budget", "edgeworth_llt", "edgeworth_budget",
                   "notes"},
                  rows);
    }
    rep.emit();
    return 0;
}

int cmd_scaling(const Options& opt) {
    const NetworkFamily fam = load_family(opt.model);
    const CriticalSequence cs = critical_sequence(fam, opt.u, opt.t_grid);
    const std::vector<RegimeReport> reports = classify(fam, opt.u);

    Report rep("scaling");
    rep.format = opt.format;
    rep.out_dir = opt.out_dir;
    rep.input("model", opt.model);
    rep.input("u", opt.u);
    rep.table("critical", {"quantity", "value"},
              json::array({json::array({"u", jnum(cs.u)}),
                           json::array({"g_class", cs.g_class == CriticalSequence::GLimit::Infinite
                                                       ? "infinite"
                                                       : "finite"}),
                           json::array({"g_limit", jnum(cs.g_limit)}),
                           json::array({"h_u", jnum(cs.h_u)})}));
    json prof = json::array();
    for (const auto& [t, gval] : cs.g_profile) prof.push_back(json::array({jnum(t), jnum(gval)}));
    rep.table("g_profile", {"t", "g"}, prof);
    json seq = json::array();
    for (size_t i = 0; i < fam.indices.size(); ++i)
        seq.push_back(json::array({fam.indices[i], jnum(cs.m0[i]), jnum(cs.m0_strong[i])}));
    rep.table("sequence", {"n", "m0_weak", "m0_strong"}, seq);
    json rows = json::array(), checks = json::array();
    for (const auto& r : reports) {
        rows.push_back(json::array({r.index, r.m, jnum(r.lambda), jnum(r.rho0),
                                    jnum(r.ratio_weak), jnum(r.ratio_strong), jnum(r.theta),
                                    jnum(r.xi), to_string(r.cls), jnum(r.epsilon), r.note}));
        for (const auto& c : r.assumptions)
            checks.push_back(
                json::array({r.index, c.name, c.pass, jnum(c.statistic), c.witness}));
    }
    rep.table("regimes",
              {"n", "m", "lambda", "rho0", "ratio_weak", "ratio_strong", "theta", "xi", "class",
               "epsilon", "note"},
              rows);
    rep.table("assumptions", {"n", "check", "pass", "statistic", "witness"}, checks);
    rep.emit();
    return 0;
}

int cmd_compare(const Options& opt) {
    ClosedNetwork net = load_network(opt.model);
    const long m = resolve_population(net, opt.population);
    net.population = m;
    if (!opt.dump_model.empty()) dump_network(net, opt.dump_model);
    const SolvedSurrogate s = solve_lambda(net, m);
    const QueuePartition part = partition(net, s.lambda);

    Report rep("compare");
    rep.format = opt.format;
    rep.out_dir = opt.out_dir;
    rep.input("model", opt.model);
    rep.input("population", m);
    rep.input("order", opt.order);
    std::string regime = opt.regime;
    if (regime == "auto") regime = auto_regime(net, m, rep);
    rep.input("regime", regime);

    const SnPmf sn = exact_sn_pmf(s.queues);
    if (sn.warning)
        rep.warn("exact S_n pmf truncated: residual mass " + fmt(sn.truncated_mass, 3));

    const bool gamma = regime == "gamma";
    const double xi = gamma ? xi_total(net, part.bottleneck) : 0.0;
    const double scale = gamma ? s.alpha : s.mom.sigma();
    const Grid g = x_grid(s, regime, xi);
    const std::string approx_col = regime + "_llt";

    bool over_budget = false;
    json rows = json::array();
    for (long x = g.lo; x <= g.hi; x += g.step) {
        ApproxResult a;
        if (gamma) a = gamma_llt(net, s, part, static_cast<double>(x), opt.order);
        else if (regime == "edgeworth") a = edgeworth_llt(s, static_cast<double>(x), opt.order);
        else a = normal_llt(s, static_cast<double>(x), opt.order);
        const long idx = m + x;
        const double exact =
            idx >= 0 && idx < static_cast<long>(sn.p.size()) ? sn.p[idx] : 0.0;
        const double err = scale * std::abs(exact - a.value);
        const double budget = a.budget_total();
        const bool ok = !(err > 10.0 * budget);
        if (!ok) over_budget = true;
        if (err > opt.tol * budget)
            rep.warn("x = " + std::to_string(x) + ": scaled error " + fmt(err, 3) +
                     " exceeds tol * budget");
        rows.push_back(json::array({x, jnum(exact), jnum(a.value), jnum(err), jnum(budget), ok}));
    }
    rep.table("compare", {"x", "exact", approx_col, "scaled_error", "budget", "ok"}, rows);
    if (over_budget) rep.warn("measured error exceeded 10x budget; exit code 3");
    rep.emit();
    return over_budget ? 3 : 0;
}

int cmd_app(const Options& opt) {
    const AppSpec spec = load_app_spec(opt.model);
    const char* names[] = {"jackson", "tandem", "vehicle"};
    const std::string file_preset = names[static_cast<int>(spec.kind)];
    if (opt.preset != file_preset)
        throw model_error("preset mismatch: file holds \"" + file_preset + "\"");

    Report rep("app " + opt.preset);
    rep.format = opt.format;
    rep.out_dir = opt.out_dir;
    rep.input("model", opt.model);
    rep.input("preset", opt.preset);

    if (spec.kind == AppSpec::Kind::Jackson) {
        const double lcr = lambda_cr(spec.measure);
        json rows = json::array({json::array({"lambda_cr", jnum(lcr)})});
        if (!std::isfinite(lcr)) rep.warn("load measure charges r = 1: lambda_cr is infinite");
        ClosedNetwork net;
        if (spec.jackson_n >= 2) {
            net = build_jackson_network(spec.measure, spec.jackson_n);
            rows.push_back(json::array({"n", spec.jackson_n}));
            if (std::isfinite(lcr))
                rows.push_back(json::array({"m0_estimate", jnum(spec.jackson_n * lcr)}));
            const long m = opt.population >= 0 ? opt.population : spec.population;
            if (m > 0) {
                net.population = m;
                const SolvedSurrogate s = solve_lambda(net, m);
                rows.push_back(json::array({"population", m}));
                rows.push_back(json::array({"lambda_n", jnum(s.lambda)}));
                rows.push_back(json::array({"rho0", jnum(s.rho0)}));
            }
            if (!opt.dump_model.empty()) dump_network(net, opt.dump_model);
        } else {
            rep.warn("no station count n given; network not built");
        }
        rep.table("jackson", {"quantity", "value"}, rows);
        rep.emit();
        return 0;
    }

    if (spec.kind == AppSpec::Kind::Tandem) {
        ClosedNetwork net = build_tandem(spec.tandem_s, spec.tandem_l, spec.tandem_f);
        const QueuePartition part = partition(net);
        const double pi1 =
            spec.tandem_f / (spec.tandem_s * (1.0 - std::pow(1.0 - spec.tandem_f, spec.tandem_l)));
        double residual = 0.0;
        for (int i = 0; i < spec.tandem_s; ++i)
            for (int k = 0; k < spec.tandem_l; ++k)
                residual = std::max(residual,
                                    std::abs(part.pi[i * spec.tandem_l + k] -
                                             pi1 * std::pow(1.0 - spec.tandem_f, k)));
        json rows = json::array({json::array({"s", spec.tandem_s}),
                                 json::array({"l", spec.tandem_l}),
                                 json::array({"f", jnum(spec.tandem_f)}),
                                 json::array({"lambda0", jnum(part.lambda0)}),
                                 json::array({"pi_entry", jnum(pi1)}),
                                 json::array({"pi_residual", jnum(residual)}),
                                 json::array({"L_profile_u", jnum(tandem_l_profile(spec.tandem_f, opt.u))}),
                                 json::array({"m_u", jnum(m_of_t(net, opt.u))})});
        const long m = opt.population >= 0 ? opt.population : spec.population;
        if (m > 0) {
            net.population = m;
            const SolvedSurrogate s = solve_lambda(net, m);
            rows.push_back(json::array({"population", m}));
            rows.push_back(json::array({"lambda_n", jnum(s.lambda)}));
            rows.push_back(json::array({"rho0", jnum(s.rho0)}));
        }
        if (!opt.dump_model.empty()) dump_network(net, opt.dump_model);
        rep.table("tandem", {"quantity", "value"}, rows);
        rep.emit();
        return 0;
    }

    VehicleNetwork v = spec.vehicle;
    if (opt.population >= 0) v.fleet = opt.population;
    VehicleLoss loss;
    try {
        loss = vehicle_loss(v, true);
    } catch (const model_error& e) {
        rep.warn(e.what());
        loss = vehicle_loss(v, false);
    }
    const FleetRecommendation rec = recommend_fleet(v);
    std::string stations;
    for (int k : rec.bottleneck_stations)
        stations += (stations.empty() ? "" : " ") + std::to_string(k);
    rep.table("vehicle", {"quantity", "value"},
              json::array({json::array({"fleet", v.fleet}),
                           json::array({"lambda_n", jnum(loss.lambda)}),
                           json::array({"loss_exact",
                                        loss.exact < 0 ? json("skipped") : jnum(loss.exact)}),
                           json::array({"loss_asymptotic", jnum(loss.asymptotic)}),
                           json::array({"lambda0", jnum(rec.lambda0)}),
                           json::array({"m_hat0", jnum(rec.m_hat0)}),
                           json::array({"recommended_fleet", rec.fleet}),
                           json::array({"bottleneck_stations", stations})}));
    ClosedNetwork net = build_vehicle(v);
    if (!opt.dump_model.empty()) dump_network(net, opt.dump_model);
    if (v.fleet > 0) {
        const SolvedSurrogate s = solve_lambda(net, v.fleet);
        json rows = json::array();
        for (int k = 0; k < v.stations(); ++k) {
            const double rho = s.lambda * s.pi[k] / v.station_mu[k];
            rows.push_back(json::array({k, jnum(v.station_mu[k]), jnum(s.pi[k]), jnum(rho),
                                        jnum(1.0 - rho)}));
        }
        rep.table("stations", {"k", "mu", "pi", "rho", "p_empty_asym"}, rows);
    }
    rep.emit();
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"closed product-form queueing network analyzer"};
    app.require_subcommand(1);
    Options opt;

    auto add_io = [&](CLI::App* sub) {
        sub->add_option("--model", opt.model, "input model file (JSON)")->required();
        sub->add_option("--out", opt.out_dir, "directory for report.json / report.csv");
        sub->add_option("--format", opt.format, "stdout format")
            ->check(CLI::IsMember({"table", "csv", "json"}));
    };
    auto add_population = [&](CLI::App* sub) {
        sub->add_option("--population", opt.population, "closed population m (overrides the file)");
        sub->add_option("--dump-model", opt.dump_model, "write the generated network to FILE");
    };
    auto add_regime = [&](CLI::App* sub) {
        sub->add_option("--regime", opt.regime, "expansion family")
            ->check(CLI::IsMember({"auto", "normal", "edgeworth", "gamma"}));
        sub->add_option("--order", opt.order, "fractional moment order r of the budgets");
    };

    CLI::App* sc_lambda = app.add_subcommand("lambda", "solve the arrival intensity lambda_n");
    add_io(sc_lambda);
    add_population(sc_lambda);

    CLI::App* sc_exact = app.add_subcommand("exact", "convolution oracle: Z, marginals, means");
    add_io(sc_exact);
    add_population(sc_exact);

    CLI::App* sc_approx = app.add_subcommand("approx", "local limit expansions with budgets");
    add_io(sc_approx);
    add_population(sc_approx);
    add_regime(sc_approx);

    CLI::App* sc_scaling =
        app.add_subcommand("scaling", "critical sequence and regime classification");
    add_io(sc_scaling);
    sc_scaling->add_option("--u", opt.u, "critical-sequence intensity fraction in (0, 1)");
    sc_scaling->add_option("--t-grid", opt.t_grid, "comma-separated t samples in (0, 1)")
        ->delimiter(',');

    CLI::App* sc_compare =
        app.add_subcommand("compare", "oracle vs approximation with budget columns");
    add_io(sc_compare);
    add_population(sc_compare);
    add_regime(sc_compare);
    sc_compare->add_option("--tol", opt.tol,
                           "warn when scaled error exceeds tol * budget (exit 3 stays at 10x)");

    CLI::App* sc_app = app.add_subcommand("app", "application presets");
    sc_app->add_option("preset", opt.preset, "jackson | tandem | vehicle")
        ->required()
        ->check(CLI::IsMember({"jackson", "tandem", "vehicle"}));
    add_io(sc_app);
    sc_app->add_option("--population", opt.population, "population / fleet override");
    sc_app->add_option("--dump-model", opt.dump_model, "write the generated network to FILE");
    sc_app->add_option("--u", opt.u, "profile evaluation point in (0, 1)");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(std::move(rev));
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sc_lambda->parsed()) return cmd_lambda(opt);
        if (sc_exact->parsed()) return cmd_exact(opt);
        if (sc_approx->parsed()) return cmd_approx(opt);
        if (sc_scaling->parsed()) return cmd_scaling(opt);
        if (sc_compare->parsed()) return cmd_compare(opt);
        if (sc_app->parsed()) return cmd_app(opt);
    } catch (const model_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace pfnet::cli
