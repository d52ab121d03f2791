#include "gsr/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "gsr/keyrate.hpp"
#include "gsr/optimizer.hpp"
#include "gsr/oracle.hpp"
#include "gsr/params.hpp"
#include "gsr/rgs_analytics.hpp"
#include "gsr/sequencer.hpp"
#include "gsr/tree_analytics.hpp"
#include "json.hpp"

#ifndef GSR_VERSION
#define GSR_VERSION "0.0.0"
#endif

namespace gsr::cli {

namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

struct Options {
    std::string verb;
    std::string config;
    std::string output;
    std::string format;
    std::string protocol;
    std::string scheme;
    std::string gamma_ghz;
    std::string t_coh;
    std::string geometry;
    std::optional<double> L_km;
    std::optional<int> m;
    std::uint64_t seed = 1;
    unsigned parallelism = 0;

    // search space
    std::string depths = "2,3";
    std::string N_values;
    int b_max = 30;
    int m_plus_1_max = 1200;
    bool no_prune = false;

    std::string grid;
    std::string distances;

    std::string kind = "tree-error";
    double mu = 0.1;
    double eps = 1e-3;
    std::uint64_t trials = 100000;
};

std::string trim(std::string s) {
    auto blank = [](unsigned char c) { return std::isspace(c); };
    s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), blank));
    s.erase(std::find_if_not(s.rbegin(), s.rend(), blank).base(), s.end());
    return s;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(trim(item));
    if (!text.empty() && text.back() == sep) parts.emplace_back();
    return parts;
}

double parse_number(const std::string& text, const std::string& field) {
    if (text == "inf" || text == "infinity") return kInfinity;
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ValidationError(field, "not a number: '" + text + "'");
    }
    if (used != text.size()) throw ValidationError(field, "not a number: '" + text + "'");
    return v;
}

std::vector<double> parse_list(const std::string& text, const std::string& field) {
    if (trim(text).empty()) throw ValidationError(field, "empty list");
    std::vector<double> out;
    for (const auto& p : split(text, ',')) out.push_back(parse_number(p, field));
    return out;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& field) {
    std::vector<int> out;
    for (double v : parse_list(text, field)) {
        if (!std::isfinite(v) || v != std::floor(v)) throw ValidationError(field, "expected integers");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

ordered_json read_config_json(const std::string& path) {
    if (path.empty()) return ordered_json::object();
    std::ifstream in(path);
    if (!in) throw ValidationError("config", "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    ordered_json j;
    try {
        j = ordered_json::parse(ss.str());
    } catch (const ordered_json::parse_error& e) {
        throw ValidationError("config", std::string("parse error: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("config", "top level must be an object");
    return j;
}

ordered_json number_or_inf(double v) { return std::isinf(v) ? ordered_json("inf") : ordered_json(v); }

RunConfig resolve_config(const Options& o) {
    ordered_json j = read_config_json(o.config);
    if (!o.protocol.empty()) {
        std::string p = to_string(parse_protocol(o.protocol));
        if (j.contains("protocol") && j["protocol"] != p) {
            j.erase("branchings");
            j.erase("N");
        }
        j["protocol"] = p;
    }
    if (!o.geometry.empty()) {
        Geometry g = parse_geometry(o.geometry);
        std::string p = to_string(protocol_of(g));
        if (!o.protocol.empty() && o.protocol != p)
            throw ValidationError("geometry", "does not match --protocol " + o.protocol);
        j["protocol"] = p;
        j["branchings"] = encoding_tree(g).branchings();
        if (auto r = std::get_if<RgsGeometry>(&g))
            j["N"] = r->N;
        else
            j.erase("N");
    }
    if (!o.scheme.empty()) j["scheme"] = to_string(parse_scheme(o.scheme));
    if (!o.gamma_ghz.empty()) j["gamma_ghz"] = parse_number(o.gamma_ghz, "gamma_ghz");
    if (!o.t_coh.empty()) j["t_coh_s"] = number_or_inf(parse_number(o.t_coh, "t_coh_s"));
    if (o.L_km) j["L_km"] = *o.L_km;
    if (o.m) {
        j.erase("spacing_km");
        j["m"] = *o.m;
    }
    return parse_config(j.dump());
}

SearchSpace resolve_space(const Options& o, Protocol protocol) {
    SearchSpace s;
    s.tree_depths = parse_int_list(o.depths, "depths");
    if (!o.N_values.empty()) s.N_values = parse_int_list(o.N_values, "N_values");
    s.b_max = o.b_max;
    s.m_plus_1_max = o.m_plus_1_max;
    s.validate(protocol);
    return s;
}

ordered_json space_json(const SearchSpace& s) {
    ordered_json j;
    j["tree_depths"] = s.tree_depths;
    j["b_min"] = s.b_min;
    j["b_max"] = s.b_max;
    j["N_values"] = s.N_values;
    j["encoding_depth"] = s.encoding_depth;
    j["m_plus_1_min"] = s.m_plus_1_min;
    j["m_plus_1_max"] = s.m_plus_1_max;
    return j;
}

// Artifacts carry no timestamps or host details so reruns are byte-identical.
ordered_json provenance(const Options& o, const RunConfig& c) {
    ordered_json p;
    p["tool"] = "gsrepeater";
    p["version"] = GSR_VERSION;
    p["command"] = o.verb;
    p["config"] = ordered_json::parse(dump_config(c));
    return p;
}

std::vector<std::string> csv_header(const ordered_json& prov) {
    std::vector<std::string> lines;
    for (auto it = prov.begin(); it != prov.end(); ++it) {
        const auto& v = it.value();
        lines.push_back(it.key() + ": " + (v.is_string() ? v.get<std::string>() : v.dump()));
    }
    return lines;
}

std::string default_format(const std::string& verb) {
    return verb == "sweep" || verb == "scan" || verb == "sequence" ? "csv" : "json";
}

fs::path output_path(const Options& o) {
    if (!o.output.empty()) return o.output;
    fs::path dir = ".";
    if (const char* env = std::getenv(kOutputDirEnv); env && *env) {
        dir = env;
        std::error_code ec;
        fs::create_directories(dir, ec);
    }
    return dir / (o.verb + "." + o.format);
}

void write_artifact(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string summary(double R_eff, const std::string& geometry, int m, bool secure) {
    return "R_eff=" + fmt("%.6g", R_eff) + " Hz geometry=" + geometry + " m=" + std::to_string(m) +
           " secure=" + (secure ? "true" : "false");
}

OptimumRecord as_record(const RunConfig& c, const EvalResult& r) {
    OptimumRecord rec;
    rec.config = c;
    rec.result = r;
    rec.R_eff = r.R_eff;
    rec.spacing = r.spacing;
    rec.geometry = r.geometry;
    rec.L_feedback = r.L_feedback;
    rec.L_delay = r.L_delay;
    rec.secure = r.secure;
    return rec;
}

std::string single_csv(const ordered_json& prov, const OptimumRecord& rec) {
    std::ostringstream out;
    for (const auto& line : csv_header(prov)) out << "# " << line << "\n";
    out << kCsvColumns << "\n";
    out << csv_row(rec.config.emitter.gamma_ghz(), rec.config.emitter.t_coh, rec) << "\n";
    return out.str();
}

std::string record_artifact(const Options& o, const ordered_json& prov, const OptimumRecord& rec) {
    if (o.format == "csv") return single_csv(prov, rec);
    ordered_json j;
    j["provenance"] = prov;
    j["result"] = ordered_json::parse(to_json(rec));
    return j.dump(2) + "\n";
}

OptimizeOptions optimize_options(const Options& o) {
    OptimizeOptions opt;
    opt.workers = o.parallelism;
    opt.prune = !o.no_prune;
    return opt;
}

int do_evaluate(const Options& o, std::ostream& out) {
    RunConfig c = resolve_config(o);
    EvalResult r = evaluate(c);
    ordered_json prov = provenance(o, c);
    std::string text;
    if (o.format == "csv") {
        text = single_csv(prov, as_record(c, r));
    } else {
        ordered_json j;
        j["provenance"] = prov;
        j["result"] = ordered_json::parse(to_json(r));
        text = j.dump(2) + "\n";
    }
    write_artifact(output_path(o), text);
    out << summary(r.R_eff, r.geometry, r.m, r.secure) << "\n";
    return kExitOk;
}

int do_optimize(const Options& o, std::ostream& out) {
    RunConfig c = resolve_config(o);
    SearchSpace space = resolve_space(o, c.protocol);
    OptimumRecord rec = optimize(c, space, optimize_options(o));
    ordered_json prov = provenance(o, c);
    prov["search_space"] = space_json(space);
    write_artifact(output_path(o), record_artifact(o, prov, rec));
    out << summary(rec.R_eff, rec.geometry, rec.result.m, rec.secure) << "\n";
    return kExitOk;
}

std::pair<std::vector<double>, std::vector<double>> parse_grid(const std::string& text) {
    auto halves = split(text, '/');
    if (halves.size() != 2)
        throw ValidationError("grid", "expected 'gamma_ghz,.../t_coh_s,...', got '" + text + "'");
    auto gammas = parse_list(halves[0], "grid");
    auto tcohs = parse_list(halves[1], "grid");
    for (double g : gammas)
        if (!(g > 0.0) || std::isinf(g)) throw ValidationError("grid", "gamma values must be positive and finite");
    for (double t : tcohs)
        if (!(t > 0.0)) throw ValidationError("grid", "t_coh values must be positive");
    return {gammas, tcohs};
}

int do_sweep(const Options& o, std::ostream& out) {
    if (o.grid.empty()) throw ValidationError("grid", "sweep needs --grid");
    auto [gammas, tcohs] = parse_grid(o.grid);
    RunConfig c = resolve_config(o);
    SearchSpace space = resolve_space(o, c.protocol);
    auto rows = sweep(c, gammas, tcohs, space, optimize_options(o));
    ordered_json prov = provenance(o, c);
    prov["search_space"] = space_json(space);
    prov["grid"] = {{"gamma_ghz", gammas}, {"t_coh_s", ordered_json::array()}};
    for (double t : tcohs) prov["grid"]["t_coh_s"].push_back(number_or_inf(t));

    std::string text;
    if (o.format == "csv") {
        std::ostringstream s;
        write_csv(s, rows, csv_header(prov));
        text = s.str();
    } else {
        ordered_json j;
        j["provenance"] = prov;
        j["rows"] = ordered_json::array();
        for (const auto& r : rows) {
            ordered_json row;
            row["gamma_ghz"] = r.gamma_ghz;
            row["t_coh_s"] = number_or_inf(r.t_coh);
            row["optimum"] = ordered_json::parse(to_json(r.optimum));
            j["rows"].push_back(row);
        }
        text = j.dump(2) + "\n";
    }
    write_artifact(output_path(o), text);

    const SweepRow* best = &rows.front();
    int secure = 0;
    for (const auto& r : rows) {
        secure += r.optimum.secure;
        if (r.optimum.R_eff > best->optimum.R_eff) best = &r;
    }
    out << "cells=" << rows.size() << " secure_cells=" << secure << " best "
        << summary(best->optimum.R_eff, best->optimum.geometry, best->optimum.result.m, best->optimum.secure)
        << " gamma_ghz=" << fmt("%g", best->gamma_ghz) << " t_coh_s=" << fmt("%g", best->t_coh) << "\n";
    return kExitOk;
}

int do_scan(const Options& o, std::ostream& out) {
    if (o.distances.empty()) throw ValidationError("distances", "scan needs --distances-km");
    std::vector<double> L;
    for (double km : parse_list(o.distances, "distances")) {
        if (!(km > 0.0) || std::isinf(km)) throw ValidationError("distances", "must be positive and finite");
        L.push_back(km * 1e3);
    }
    RunConfig c = resolve_config(o);
    SearchSpace space = resolve_space(o, c.protocol);
    auto rows = distance_scan(c, L, space, optimize_options(o));
    ordered_json prov = provenance(o, c);
    prov["search_space"] = space_json(space);
    prov["distances_km"] = parse_list(o.distances, "distances");

    std::string text;
    if (o.format == "csv") {
        std::ostringstream s;
        write_csv(s, rows, csv_header(prov));
        text = s.str();
    } else {
        ordered_json j;
        j["provenance"] = prov;
        j["rows"] = ordered_json::array();
        for (const auto& r : rows) {
            ordered_json row;
            row["L_km"] = r.L / 1e3;
            row["optimum"] = ordered_json::parse(to_json(r.optimum));
            j["rows"].push_back(row);
        }
        text = j.dump(2) + "\n";
    }
    write_artifact(output_path(o), text);
    const auto& last = rows.back().optimum;
    out << "points=" << rows.size() << " at L_km=" << fmt("%g", rows.back().L / 1e3) << " "
        << summary(last.R_eff, last.geometry, last.result.m, last.secure) << "\n";
    return kExitOk;
}

int do_sequence(const Options& o, std::ostream& out) {
    RunConfig c = resolve_config(o);
    GateTimes gates = derive_gate_times(c.emitter, c.scheme, c.gates);
    Schedule s = build_schedule(c.protocol, c.scheme, c.geometry, gates);
    EvalResult r = evaluate(c);
    double delay = required_delay(s);
    FeedbackAudit audit = feedback_audit(s, c.channel.v_feedback);

    ordered_json prov = provenance(o, c);
    ordered_json stats;
    stats["makespan_s"] = s.makespan;
    stats["busy_time_s"] = s.busy_time;
    stats["T_graph_s"] = r.T_graph;
    stats["photons"] = s.photons.size();
    stats["gates"] = s.events.size();
    stats["required_delay_s"] = delay;
    stats["L_delay_m"] = delay * c.channel.v_delay;
    stats["max_feedback_passes"] = audit.max_passes;
    stats["L_feedback_m"] = audit.L_feedback;

    std::string text;
    if (o.format == "csv") {
        std::ostringstream t;
        for (const auto& line : csv_header(prov)) t << "# " << line << "\n";
        for (auto it = stats.begin(); it != stats.end(); ++it) t << "# " << it.key() << ": " << it.value().dump() << "\n";
        t << "kind,start_s,duration_s,target\n";
        char buf[128];
        for (const auto& e : s.events) {
            std::snprintf(buf, sizeof buf, "%s,%.9e,%.9e,%d\n", to_string(e.kind).c_str(), e.start, e.duration,
                          e.target);
            t << buf;
        }
        text = t.str();
    } else {
        ordered_json j;
        j["provenance"] = prov;
        j["schedule"] = stats;
        j["events"] = ordered_json::array();
        for (const auto& e : s.events)
            j["events"].push_back({{"kind", to_string(e.kind)}, {"start_s", e.start}, {"duration_s", e.duration},
                                   {"target", e.target}});
        text = j.dump(2) + "\n";
    }
    write_artifact(output_path(o), text);
    out << summary(r.R_eff, r.geometry, r.m, r.secure) << " makespan=" << fmt("%.6g", s.makespan)
        << " s T_graph=" << fmt("%.6g", r.T_graph) << " s L_feedback=" << fmt("%.6g", audit.L_feedback) << " m\n";
    return kExitOk;
}

ordered_json report_json(const OracleReport& r) { return ordered_json::parse(to_json(r)); }

int do_oracle(const Options& o, std::ostream& out) {
    RunConfig c = resolve_config(o);
    if (!(o.mu >= 0.0 && o.mu <= 1.0)) throw ValidationError("mu", "must lie in [0,1]");
    if (!(o.eps >= 0.0 && o.eps <= 0.5)) throw ValidationError("eps", "must lie in [0,1/2]");
    McOptions mc;
    mc.trials = o.trials;
    mc.seed = o.seed;
    mc.workers = o.parallelism;

    ordered_json prov = provenance(o, c);
    prov["oracle"] = {{"kind", o.kind}, {"mu", o.mu}, {"eps_sp", o.eps}, {"trials", o.trials}, {"seed", o.seed}};
    ordered_json res;
    std::string line;
    const std::string geom = to_string(c.geometry);

    if (o.kind == "tree-success") {
        const auto* tree = std::get_if<TreeGeometry>(&c.geometry);
        if (!tree) throw ValidationError("kind", "tree-success needs a tree geometry");
        if (tree->photon_count() > kExhaustiveLimit)
            throw ValidationError("geometry", "too many photons for exhaustive enumeration");
        double exact = exhaustive_tree_success(*tree, o.mu);
        double model = tree_node_success(*tree, o.mu);
        res["exhaustive"] = exact;
        res["analytic"] = model;
        res["abs_difference"] = std::abs(exact - model);
        line = "exhaustive=" + fmt("%.15g", exact) + " analytic=" + fmt("%.15g", model);
    } else if (o.kind == "tree-error") {
        const auto* tree = std::get_if<TreeGeometry>(&c.geometry);
        if (!tree) throw ValidationError("kind", "tree-error needs a tree geometry");
        OracleReport mcr = mc_tree_logical_error(*tree, o.mu, o.eps, mc);
        TreeErrorModel model = decoding_error(*tree, o.mu, o.eps);
        res["monte_carlo"] = report_json(mcr);
        res["analytic"] = model.e_decoding;
        line = "mc=" + fmt("%.6g", mcr.estimate) + "+-" + fmt("%.2g", mcr.std_error) +
               " analytic=" + fmt("%.6g", model.e_decoding);
    } else if (o.kind == "rgs-link") {
        const auto* rgs = std::get_if<RgsGeometry>(&c.geometry);
        if (!rgs) throw ValidationError("kind", "rgs-link needs an RGS geometry");
        RgsOracleReport mcr = mc_rgs_link(*rgs, o.mu, o.eps, mc);
        RgsLinkMetrics m = rgs_success(*rgs, o.mu, 0);
        EncodedErrors e = encoded_errors(rgs->encoding, o.mu, o.eps);
        double F = rgs_link_fidelity(e.e_X, e.e_Z, rgs->N, o.eps);
        res["success"] = report_json(mcr.success);
        res["infidelity"] = report_json(mcr.infidelity);
        res["analytic_success"] = m.P_link;
        res["analytic_infidelity"] = 1.0 - F;
        line = "success=" + fmt("%.6g", mcr.success.estimate) + " analytic=" + fmt("%.6g", m.P_link) +
               " infidelity=" + fmt("%.6g", mcr.infidelity.estimate) + " analytic=" + fmt("%.6g", 1.0 - F);
    } else {
        throw ValidationError("kind", "expected tree-success, tree-error or rgs-link");
    }

    ordered_json j;
    j["provenance"] = prov;
    j["result"] = res;
    write_artifact(output_path(o), j.dump(2) + "\n");
    out << o.kind << " geometry=" << geom << " " << line << "\n";
    return kExitOk;
}

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--config", o.config, "JSON run configuration");
    sub->add_option("--output,-o", o.output, "artifact path");
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--protocol", o.protocol, "tree or rgs");
    sub->add_option("--scheme", o.scheme, "ancilla or feedback");
    sub->add_option("--gamma-ghz", o.gamma_ghz, "gamma/2pi in GHz");
    sub->add_option("--tcoh-s", o.t_coh, "spin coherence time in s, or inf");
    sub->add_option("--geometry", o.geometry, "4-16-5 or 32:24-7");
    sub->add_option("--L-km", o.L_km, "total distance in km");
    sub->add_option("--m", o.m, "intermediate repeater nodes");
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--parallelism,-j", o.parallelism, "worker threads, 0 for all cores");
}

void add_space(CLI::App* sub, Options& o) {
    sub->add_option("--depths", o.depths, "tree depths, comma separated");
    sub->add_option("--N-values", o.N_values, "RGS arm counts, comma separated");
    sub->add_option("--b-max", o.b_max, "largest branching parameter");
    sub->add_option("--m-plus-1-max", o.m_plus_1_max, "largest m+1");
    sub->add_flag("--no-prune", o.no_prune, "evaluate every geometry");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Secret key rates of graph-state quantum repeaters", "gsrepeater"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", GSR_VERSION);

    auto* evaluate_cmd = app.add_subcommand("evaluate", "rate of one configuration");
    auto* optimize_cmd = app.add_subcommand("optimize", "best geometry and spacing");
    auto* sweep_cmd = app.add_subcommand("sweep", "optimize over a gamma x t_coh grid");
    auto* scan_cmd = app.add_subcommand("scan", "optimize over total distances");
    auto* sequence_cmd = app.add_subcommand("sequence", "gate schedule of one generator");
    auto* oracle_cmd = app.add_subcommand("oracle", "brute-force check of the analytic model");
    for (auto* sub : {evaluate_cmd, optimize_cmd, sweep_cmd, scan_cmd, sequence_cmd, oracle_cmd}) add_common(sub, o);
    for (auto* sub : {optimize_cmd, sweep_cmd, scan_cmd}) add_space(sub, o);
    sweep_cmd->add_option("--grid", o.grid, "gamma_ghz list / t_coh_s list, e.g. 0.17,2/1e-3,1")->required();
    scan_cmd->add_option("--distances-km", o.distances, "comma separated distances")->required();
    oracle_cmd->add_option("--kind", o.kind, "tree-success, tree-error or rgs-link");
    oracle_cmd->add_option("--mu", o.mu, "per-photon loss");
    oracle_cmd->add_option("--eps", o.eps, "single-photon error");
    oracle_cmd->add_option("--trials", o.trials, "Monte Carlo samples");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << GSR_VERSION << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }

    o.verb = app.get_subcommands().front()->get_name();
    if (o.format.empty()) o.format = default_format(o.verb);

    try {
        if (o.verb == "evaluate") return do_evaluate(o, out);
        if (o.verb == "optimize") return do_optimize(o, out);
        if (o.verb == "sweep") return do_sweep(o, out);
        if (o.verb == "scan") return do_scan(o, out);
        if (o.verb == "sequence") return do_sequence(o, out);
        return do_oracle(o, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

}  // namespace gsr::cli
