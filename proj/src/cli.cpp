#include "riskbounds/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "riskbounds/bounds.hpp"
#include "riskbounds/errors.hpp"
#include "riskbounds/functionals.hpp"
#include "riskbounds/oracle.hpp"
#include "riskbounds/sharing.hpp"

namespace riskbounds::cli {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) {
                ok = true;
                break;
            }
        if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

double need_number(const json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key) || !obj[key].is_number())
        throw ConfigError(where + " requires numeric field '" + key + "'");
    return obj[key].get<double>();
}

Direction parse_direction(const json& j, const std::string& where) {
    const std::string s = j.get<std::string>();
    if (s == "increasing") return Direction::increasing;
    if (s == "decreasing") return Direction::decreasing;
    if (s == "none") return Direction::none;
    throw ConfigError(where + ": direction must be increasing, decreasing or none");
}

TailMonotonicity parse_tails(const json& j) {
    check_keys(j, "tail_monotonicity", {"on_support", "upper", "lower"});
    TailMonotonicity t;
    if (j.contains("on_support"))
        t.on_support = parse_direction(j["on_support"], "tail_monotonicity");
    if (j.contains("upper")) {
        check_keys(j["upper"], "tail_monotonicity.upper", {"direction", "threshold"});
        t.upper = parse_direction(j["upper"]["direction"], "tail_monotonicity.upper");
        t.upper_threshold = need_number(j["upper"], "tail_monotonicity.upper", "threshold");
    }
    if (j.contains("lower")) {
        check_keys(j["lower"], "tail_monotonicity.lower", {"direction", "threshold"});
        t.lower = parse_direction(j["lower"]["direction"], "tail_monotonicity.lower");
        t.lower_threshold = need_number(j["lower"], "tail_monotonicity.lower", "threshold");
    }
    return t;
}

std::vector<double> read_csv_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open sample file: " + path);
    std::vector<double> vals;
    std::string tok;
    while (std::getline(in, tok)) {
        std::stringstream line(tok);
        std::string cell;
        while (std::getline(line, cell, ',')) {
            if (cell.empty()) continue;
            try {
                vals.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ConfigError("non-numeric entry in sample file: " + path);
            }
        }
    }
    if (vals.empty()) throw ConfigError("sample file is empty: " + path);
    return vals;
}

Distribution parse_marginal(const json& j) {
    check_keys(j, "marginal",
               {"family", "a", "b", "c", "rate", "alpha", "scale", "mu", "sigma", "k",
                "values", "path", "tail_monotonicity"});
    if (!j.contains("family")) throw ConfigError("marginal requires a 'family' field");
    const std::string fam = j["family"].get<std::string>();
    Distribution d = [&]() {
        if (fam == "uniform")
            return Distribution::uniform(need_number(j, fam, "a"), need_number(j, fam, "b"));
        if (fam == "exponential")
            return Distribution::exponential(need_number(j, fam, "rate"));
        if (fam == "pareto")
            return Distribution::pareto(need_number(j, fam, "alpha"),
                                        j.contains("scale") ? j["scale"].get<double>() : 1.0);
        if (fam == "normal")
            return Distribution::normal(need_number(j, fam, "mu"),
                                        need_number(j, fam, "sigma"));
        if (fam == "lognormal")
            return Distribution::lognormal(need_number(j, fam, "mu"),
                                           need_number(j, fam, "sigma"));
        if (fam == "triangular")
            return Distribution::triangular(need_number(j, fam, "a"),
                                            need_number(j, fam, "c"),
                                            need_number(j, fam, "b"));
        if (fam == "power_law") return Distribution::power_law(need_number(j, fam, "k"));
        if (fam == "point_mass") return Distribution::point_mass(need_number(j, fam, "c"));
        if (fam == "empirical") {
            if (j.contains("values"))
                return Distribution::empirical(j["values"].get<std::vector<double>>());
            if (j.contains("path"))
                return Distribution::empirical(read_csv_values(j["path"].get<std::string>()));
            throw ConfigError("empirical marginal needs 'values' or 'path'");
        }
        throw ConfigError("unknown family: " + fam);
    }();
    if (j.contains("tail_monotonicity")) d = d.with_tails(parse_tails(j["tail_monotonicity"]));
    return d;
}

std::vector<Distribution> parse_marginals(const json& cfg) {
    if (!cfg.contains("marginals") || !cfg["marginals"].is_array() ||
        cfg["marginals"].empty())
        throw ConfigError("config requires a nonempty 'marginals' array");
    std::vector<Distribution> out;
    for (const auto& j : cfg["marginals"]) out.push_back(parse_marginal(j));
    return out;
}

SearchConfig parse_optimizer(const json& cfg, json& defaults_used) {
    SearchConfig sc;
    json d = json::array();
    if (cfg.contains("optimizer")) {
        const json& o = cfg["optimizer"];
        check_keys(o, "optimizer",
                   {"coarse_grid_resolution", "lhs_samples", "refine_rounds", "tol", "seed"});
        if (o.contains("coarse_grid_resolution"))
            sc.coarse_grid_resolution = o["coarse_grid_resolution"].get<int>();
        else
            d.push_back("optimizer.coarse_grid_resolution=12");
        if (o.contains("lhs_samples")) sc.lhs_samples = o["lhs_samples"].get<int>();
        else d.push_back("optimizer.lhs_samples=5000");
        if (o.contains("refine_rounds")) sc.refine_rounds = o["refine_rounds"].get<int>();
        else d.push_back("optimizer.refine_rounds=4");
        if (o.contains("tol")) sc.tol = o["tol"].get<double>();
        else d.push_back("optimizer.tol=1e-8");
        if (o.contains("seed")) sc.seed = o["seed"].get<std::uint64_t>();
        else d.push_back("optimizer.seed=1");
    } else {
        d.push_back("optimizer=default(grid=12,lhs=5000,rounds=4,tol=1e-8,seed=1)");
    }
    for (const auto& x : d) defaults_used.push_back(x);
    return sc;
}

RAConfig parse_oracle(const json& cfg, json& defaults_used) {
    RAConfig rc;
    if (cfg.contains("oracle")) {
        const json& o = cfg["oracle"];
        check_keys(o, "oracle", {"m", "max_sweeps", "tol", "restarts", "seed"});
        if (o.contains("m")) rc.m = o["m"].get<std::size_t>();
        if (o.contains("max_sweeps")) rc.max_sweeps = o["max_sweeps"].get<int>();
        if (o.contains("tol")) rc.tol = o["tol"].get<double>();
        if (o.contains("restarts")) rc.restarts = o["restarts"].get<int>();
        if (o.contains("seed")) rc.seed = o["seed"].get<std::uint64_t>();
    } else {
        defaults_used.push_back("oracle=default(m=1000,max_sweeps=200,tol=1e-9,restarts=5,seed=42)");
    }
    return rc;
}

json point_json(const SimplexPoint& p) {
    return json{{"beta0", p.beta0}, {"betas", p.betas}, {"scale", p.scale}};
}

const char* sharp_name(Sharpness s) {
    switch (s) {
        case Sharpness::certified_by_condition: return "certified_by_condition";
        case Sharpness::certified_by_oracle: return "certified_by_oracle";
        default: return "unknown";
    }
}

json bound_json(const BoundResult& r) {
    return json{{"value", r.value},
                {"argpoint", point_json(r.argpoint)},
                {"sharp", sharp_name(r.sharp)},
                {"sharp_note", r.sharp_note},
                {"beta0_at_bound", r.beta0_at_bound},
                {"evaluations", r.evaluations}};
}

json run_bound(const json& cfg, json& defaults_used) {
    auto mus = parse_marginals(cfg);
    const double r = need_number(cfg, "bound", "r");
    const double s = need_number(cfg, "bound", "s");
    std::string dir = "both";
    if (cfg.contains("direction")) dir = cfg["direction"].get<std::string>();
    else defaults_used.push_back("direction=both");
    if (dir != "sup" && dir != "inf" && dir != "both")
        throw ConfigError("direction must be sup, inf or both");
    SearchConfig sc = parse_optimizer(cfg, defaults_used);
    BoundProblem p{mus, r, s};
    json out;
    if (dir != "inf") {
        out["upper"] = bound_json(upper_bound_rvar(p, sc));
        out["upper_bllw"] = bound_json(bllw_upper(p, sc));
    }
    if (dir != "sup") {
        out["lower"] = bound_json(lower_bound_rvar(p, sc));
        out["lower_bllw"] = bound_json(bllw_lower(p, sc));
    }
    return out;
}

json run_ird(const json& cfg, json& defaults_used) {
    auto mus = parse_marginals(cfg);
    const double r1 = need_number(cfg, "ird", "r1");
    const double s1 = need_number(cfg, "ird", "s1");
    const double r2 = need_number(cfg, "ird", "r2");
    const double s2 = need_number(cfg, "ird", "s2");
    SearchConfig sc = parse_optimizer(cfg, defaults_used);
    IrdResult res = ird_sup(mus, r1, s1, r2, s2, sc);
    return json{{"value", res.value},
                {"upper_component", bound_json(res.upper_component)},
                {"lower_component", bound_json(res.lower_component)},
                {"upper_formula", res.upper_formula},
                {"lower_formula", res.lower_formula}};
}

json run_qdiff(const json& cfg, json& defaults_used) {
    auto mus = parse_marginals(cfg);
    const double r = need_number(cfg, "qdiff", "r");
    const double s = need_number(cfg, "qdiff", "s");
    SearchConfig sc = parse_optimizer(cfg, defaults_used);
    QdiffResult res = quantile_diff_sup(mus, r, s, sc);
    return json{{"value", res.value},
                {"sup_term", res.sup_term},
                {"inf_term", res.inf_term},
                {"sup_arg", point_json(res.sup_arg)},
                {"inf_arg", point_json(res.inf_arg)}};
}

json run_share(const json& cfg, json& defaults_used) {
    if (!cfg.contains("sharing")) throw ConfigError("share command requires a 'sharing' object");
    const json& sj = cfg["sharing"];
    check_keys(sj, "sharing",
               {"total", "total_path", "betas", "t", "m_params", "allocation_csv"});
    SharingProblem p;
    if (sj.contains("total")) p.total = sj["total"].get<std::vector<double>>();
    else if (sj.contains("total_path"))
        p.total = read_csv_values(sj["total_path"].get<std::string>());
    else
        throw ConfigError("sharing needs 'total' or 'total_path'");
    if (!sj.contains("betas")) throw ConfigError("sharing requires 'betas'");
    p.betas = sj["betas"].get<std::vector<double>>();

    double t;
    if (sj.contains("t")) {
        t = sj["t"].get<double>();
    } else {
        // Strictly above the threshold so the construction never sits on the
        // boundary.
        t = std::max(0.0, *std::max_element(p.total.begin(), p.total.end())) + 1.0;
        defaults_used.push_back("sharing.t=max(0,max_sample)+1");
    }

    json out;
    out["inf_convolution"] = inf_convolution(p);
    Allocation alloc = optimal_allocation(p, t);
    out["t"] = t;
    out["exposure"] = evaluate_allocation(p, alloc);
    out["gap"] = out["exposure"].get<double>() - out["inf_convolution"].get<double>();
    DependenceReport rep = verify_dependence(p, alloc);
    out["dependence"] = json{{"holds", rep.holds},
                             {"case", rep.case_id},
                             {"theta", rep.theta},
                             {"note", rep.note}};
    DualResult dual = dual_sup(p, t);
    out["dual"] = json{{"value", dual.value},
                       {"identity_value", dual.identity_value},
                       {"alloc_value", dual.alloc_value}};
    if (sj.contains("m_params")) {
        json seq = json::array();
        for (double mp : sj["m_params"].get<std::vector<double>>()) {
            SequenceResult sr = allocation_sequence(p, mp);
            seq.push_back(json{{"m_param", mp},
                               {"exposure", sr.exposure},
                               {"stop_loss", sr.stop_loss},
                               {"a_m", sr.a_m},
                               {"identity_gap", sr.identity_gap},
                               {"note", sr.note}});
        }
        out["sequence"] = seq;
    }
    if (sj.contains("allocation_csv")) {
        const std::string path = sj["allocation_csv"].get<std::string>();
        std::ofstream csv(path);
        if (!csv) throw ConfigError("cannot open allocation output: " + path);
        csv.precision(17);
        csv << "total";
        for (std::size_t i = 0; i < p.betas.size(); ++i) csv << ",part" << (i + 1);
        csv << "\n";
        for (std::size_t j = 0; j < p.total.size(); ++j) {
            csv << p.total[j];
            for (const auto& part : alloc.parts) csv << "," << part[j];
            csv << "\n";
        }
        out["allocation_csv"] = path;
    }
    return out;
}

json run_sharpness(const json& cfg, json& defaults_used) {
    auto mus = parse_marginals(cfg);
    const double r = need_number(cfg, "sharpness", "r");
    const double s = need_number(cfg, "sharpness", "s");
    SearchConfig sc = parse_optimizer(cfg, defaults_used);
    RAConfig rc = parse_oracle(cfg, defaults_used);
    double tol = 5e-3;
    if (cfg.contains("sharpness_tol")) tol = cfg["sharpness_tol"].get<double>();
    else defaults_used.push_back("sharpness_tol=5e-3");

    BoundProblem p{mus, r, s};
    BoundResult up = upper_bound_rvar(p, sc);
    BoundResult lo = lower_bound_rvar(p, sc);
    OracleResult osup = ra_sup_rvar(mus, r, s, rc);
    OracleResult oinf = ra_inf_rvar(mus, r, s, rc);
    certify_with_oracle(up, osup.value, tol);
    certify_with_oracle(lo, oinf.value, tol);
    return json{{"upper", bound_json(up)},
                {"lower", bound_json(lo)},
                {"oracle_sup", osup.value},
                {"oracle_inf", oinf.value},
                {"upper_gap", up.value - osup.value},
                {"lower_gap", oinf.value - lo.value},
                {"tolerance", tol}};
}

struct SweepSpec {
    std::string param = "s";
    double from = 0.0, to = 0.0, step = 0.0;
};

SweepSpec parse_sweep(const json& cfg, const std::string& cli_sweep) {
    SweepSpec sp;
    if (!cli_sweep.empty()) {
        // format: s=from:to:step
        const auto eq = cli_sweep.find('=');
        if (eq == std::string::npos) throw ConfigError("sweep must look like s=from:to:step");
        sp.param = cli_sweep.substr(0, eq);
        std::string rest = cli_sweep.substr(eq + 1);
        std::replace(rest.begin(), rest.end(), ':', ' ');
        std::istringstream is(rest);
        if (!(is >> sp.from >> sp.to >> sp.step))
            throw ConfigError("sweep must look like s=from:to:step");
        return sp;
    }
    if (!cfg.contains("sweep")) throw ConfigError("compare requires a sweep");
    const json& j = cfg["sweep"];
    check_keys(j, "sweep", {"param", "from", "to", "step"});
    if (j.contains("param")) sp.param = j["param"].get<std::string>();
    sp.from = need_number(j, "sweep", "from");
    sp.to = need_number(j, "sweep", "to");
    sp.step = need_number(j, "sweep", "step");
    return sp;
}

json run_compare(const json& cfg, json& defaults_used, const std::string& cli_sweep,
                 int jobs) {
    auto mus = parse_marginals(cfg);
    const double r = cfg.contains("r") ? cfg["r"].get<double>() : 0.0;
    SearchConfig sc = parse_optimizer(cfg, defaults_used);
    RAConfig rc = parse_oracle(cfg, defaults_used);
    SweepSpec sp = parse_sweep(cfg, cli_sweep);
    if (sp.param != "s") throw ConfigError("only sweeps over s are supported");
    if (!(sp.step > 0.0 && sp.from > 0.0 && sp.to >= sp.from))
        throw ConfigError("sweep requires 0 < from <= to and step > 0");

    std::vector<double> svals;
    for (double s = sp.from; s <= sp.to + 1e-12; s += sp.step)
        if (r + s <= 1.0 + 1e-12) svals.push_back(std::min(s, 1.0 - r));

    std::vector<json> rows(svals.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= svals.size()) break;
            const double s = svals[i];
            BoundProblem p{mus, r, s};
            BoundResult up = upper_bound_rvar(p, sc);
            BoundResult bu = bllw_upper(p, sc);
            BoundResult lo = lower_bound_rvar(p, sc);
            BoundResult bl = bllw_lower(p, sc);
            OracleResult osup = ra_sup_rvar(mus, r, s, rc);
            OracleResult oinf = ra_inf_rvar(mus, r, s, rc);
            rows[i] = json{{"s", s},
                           {"upper_new", up.value},
                           {"upper_bllw", bu.value},
                           {"oracle_sup", osup.value},
                           {"lower_new", lo.value},
                           {"lower_bllw", bl.value},
                           {"oracle_inf", oinf.value}};
        }
    };
    const int nthreads = std::max(1, std::min<int>(jobs, static_cast<int>(svals.size())));
    std::vector<std::thread> threads;
    for (int i = 1; i < nthreads; ++i) threads.emplace_back(worker);
    worker();
    for (auto& th : threads) th.join();

    return json{{"r", r}, {"rows", rows}};
}

int classify_error(const Error& e) {
    const std::string& c = e.code();
    if (c == "config_error" || c == "invalid_params" || c == "invalid_probability" ||
        c == "non_integral_mass" || c == "shape_mismatch")
        return 1;
    return 2;
}

} // namespace

int run_from_string(const std::string& config_json, std::string* out_json) {
    json result;
    int code = 0;
    const auto start = std::chrono::steady_clock::now();
    std::string output_path;
    try {
        json cfg = json::parse(config_json);
        check_keys(cfg, "config",
                   {"command", "marginals", "r", "s", "r1", "s1", "r2", "s2", "direction",
                    "sharing", "optimizer", "oracle", "sweep", "jobs", "output",
                    "sharpness_tol"});
        if (!cfg.contains("command")) throw ConfigError("config requires 'command'");
        const std::string command = cfg["command"].get<std::string>();
        if (cfg.contains("output")) output_path = cfg["output"].get<std::string>();
        const int jobs = cfg.contains("jobs") ? cfg["jobs"].get<int>() : 1;

        json defaults_used = json::array();
        json res;
        if (command == "bound") res = run_bound(cfg, defaults_used);
        else if (command == "ird") res = run_ird(cfg, defaults_used);
        else if (command == "qdiff") res = run_qdiff(cfg, defaults_used);
        else if (command == "share") res = run_share(cfg, defaults_used);
        else if (command == "sharpness") res = run_sharpness(cfg, defaults_used);
        else if (command == "compare") res = run_compare(cfg, defaults_used, "", jobs);
        else throw ConfigError("unknown command: " + command);

        result["schema_version"] = 1;
        result["command"] = command;
        result["result"] = res;
        result["defaults_used"] = defaults_used;
        result["status"] = "ok";
    } catch (const json::exception& e) {
        result = json{{"status", "error"}, {"code", "config_error"}, {"message", e.what()}};
        code = 1;
    } catch (const Error& e) {
        code = classify_error(e);
        result = json{{"status", "error"}, {"code", e.code()}, {"message", e.what()}};
    } catch (const std::exception& e) {
        result = json{{"status", "error"}, {"code", "internal"}, {"message", e.what()}};
        code = 2;
    }
    const auto end = std::chrono::steady_clock::now();
    result["wall_time_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(end - start).count();

    const std::string text = result.dump(2);
    if (out_json) *out_json = text;
    if (!output_path.empty() && code == 0) {
        if (output_path.front() != '/') {
            if (const char* dir = std::getenv("RISKBOUNDS_OUTPUT_DIR"))
                output_path = std::string(dir) + "/" + output_path;
        }
        std::ofstream out(output_path);
        if (out) out << text << "\n";
    }
    return code;
}

int run_from_file(const std::string& config_path, std::string* out_json) {
    std::ifstream in(config_path);
    if (!in) {
        if (out_json)
            *out_json = json{{"status", "error"},
                             {"code", "config_error"},
                             {"message", "cannot open config: " + config_path}}
                            .dump(2);
        return 1;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return run_from_string(ss.str(), out_json);
}

int run_command(const std::string& command, const std::string& config_path,
                const std::string& output_path, const std::string& sweep, int jobs) {
    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "cannot open config: " << config_path << "\n";
        return 1;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    try {
        json cfg = json::parse(text);
        if (!command.empty()) cfg["command"] = command;
        if (!output_path.empty()) cfg["output"] = output_path;
        if (jobs > 0) cfg["jobs"] = jobs;
        if (!sweep.empty()) {
            SweepSpec sp = parse_sweep(json::object(), sweep);
            cfg["sweep"] = json{{"param", sp.param},
                                {"from", sp.from},
                                {"to", sp.to},
                                {"step", sp.step}};
        }
        text = cfg.dump();
    } catch (const json::exception& e) {
        std::cerr << "config parse error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    std::string out;
    const int code = run_from_string(text, &out);
    std::cout << out << "\n";
    return code;
}

} // namespace riskbounds::cli
