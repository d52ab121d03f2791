#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "gsr/params.hpp"
#include "json.hpp"

namespace gsr {

namespace {

using nlohmann::json;

const std::set<std::string> kKnownKeys = {
    "protocol", "scheme", "gamma_ghz", "t_coh_s", "L_km", "L_att_km", "mu_coup", "eps_depol",
    "v_feedback_m_s", "v_delay_m_s", "beta", "t_H_s", "t_CZ_ancilla_s", "branchings", "N",
    "m", "spacing_km", "matter_qubits", "loss_mode", "include_cz_error"};

double get_number(const json& j, const char* key) {
    const json& v = j.at(key);
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        if (s == "inf" || s == "infinity") return kInfinity;
    }
    throw ValidationError(key, "expected a number");
}

int get_int(const json& j, const char* key) {
    const json& v = j.at(key);
    if (!v.is_number_integer()) throw ValidationError(key, "expected an integer");
    return v.get<int>();
}

std::string get_string(const json& j, const char* key) {
    const json& v = j.at(key);
    if (!v.is_string()) throw ValidationError(key, "expected a string");
    return v.get<std::string>();
}

// Smallest perturbation of value/scale that maps back to value exactly,
// so that a saved file reparses to the same internal number.
double reparsable(double value, const std::function<double(double)>& forward, double guess) {
    if (!std::isfinite(value) || forward(guess) == value) return guess;
    double up = guess, down = guess;
    for (int i = 0; i < 16; ++i) {
        up = std::nextafter(up, kInfinity);
        down = std::nextafter(down, -kInfinity);
        if (forward(up) == value) return up;
        if (forward(down) == value) return down;
    }
    return guess;
}

double ghz_to_gamma(double ghz) { return EmitterParams::from_ghz(ghz, 1.0).gamma; }
double km_to_m(double km) { return km * 1e3; }

}  // namespace

RunConfig parse_config(std::string_view text) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ValidationError("config", std::string("parse error: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("config", "top level must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!kKnownKeys.count(it.key())) throw ValidationError(it.key(), "unknown key");

    RunConfig c;
    if (j.contains("protocol")) c.protocol = parse_protocol(get_string(j, "protocol"));
    if (j.contains("scheme")) c.scheme = parse_scheme(get_string(j, "scheme"));

    double gamma_ghz = c.emitter.gamma_ghz();
    if (j.contains("gamma_ghz")) gamma_ghz = get_number(j, "gamma_ghz");
    double t_coh = j.contains("t_coh_s") ? get_number(j, "t_coh_s") : c.emitter.t_coh;
    c.emitter = EmitterParams::from_ghz(gamma_ghz, t_coh);

    if (j.contains("L_km")) c.channel.L = km_to_m(get_number(j, "L_km"));
    if (j.contains("L_att_km")) c.channel.L_att = km_to_m(get_number(j, "L_att_km"));
    if (j.contains("mu_coup")) c.channel.mu_coup = get_number(j, "mu_coup");
    if (j.contains("eps_depol")) c.channel.eps_depol = get_number(j, "eps_depol");
    if (j.contains("v_feedback_m_s")) c.channel.v_feedback = get_number(j, "v_feedback_m_s");
    if (j.contains("v_delay_m_s")) c.channel.v_delay = get_number(j, "v_delay_m_s");

    if (j.contains("beta")) c.gates.beta = get_number(j, "beta");
    if (j.contains("t_H_s")) c.gates.t_H = get_number(j, "t_H_s");
    if (j.contains("t_CZ_ancilla_s")) c.gates.t_cz_ancilla = get_number(j, "t_CZ_ancilla_s");

    std::vector<int> b = c.protocol == Protocol::tree ? std::vector<int>{4, 15, 5} : std::vector<int>{24, 7};
    if (j.contains("branchings")) {
        const json& v = j.at("branchings");
        if (!v.is_array()) throw ValidationError("branchings", "expected an array of integers");
        b.clear();
        for (const json& x : v) {
            if (!x.is_number_integer()) throw ValidationError("branchings", "expected integers");
            b.push_back(x.get<int>());
        }
    }
    if (c.protocol == Protocol::tree) {
        if (j.contains("N")) throw ValidationError("N", "protocol 'tree' does not take an N");
        c.geometry = TreeGeometry(b);
    } else {
        int n = j.contains("N") ? get_int(j, "N") : 32;
        c.geometry = RgsGeometry(n, TreeGeometry(b));
    }

    if (j.contains("m") && j.contains("spacing_km"))
        throw ValidationError("spacing_km", "give either m or spacing_km, not both");
    if (j.contains("m")) c.m = get_int(j, "m");
    if (j.contains("spacing_km")) {
        double spacing = km_to_m(get_number(j, "spacing_km"));
        if (!(spacing > 0.0)) throw ValidationError("spacing_km", "must be positive");
        c.m = std::max(0, static_cast<int>(std::lround(c.channel.L / spacing)) - 1);
    }
    if (j.contains("matter_qubits") && !j.at("matter_qubits").is_null())
        c.matter_qubits = get_int(j, "matter_qubits");
    if (j.contains("loss_mode")) c.loss_mode = parse_loss_mode(get_string(j, "loss_mode"));
    if (j.contains("include_cz_error")) {
        if (!j.at("include_cz_error").is_boolean())
            throw ValidationError("include_cz_error", "expected true or false");
        c.include_cz_error = j.at("include_cz_error").get<bool>();
    }

    c.validate();
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config", "cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string dump_config(const RunConfig& c) {
    json j;
    j["protocol"] = to_string(c.protocol);
    j["scheme"] = to_string(c.scheme);
    j["gamma_ghz"] = reparsable(c.emitter.gamma, ghz_to_gamma, c.emitter.gamma_ghz());
    if (std::isinf(c.emitter.t_coh))
        j["t_coh_s"] = "inf";
    else
        j["t_coh_s"] = c.emitter.t_coh;
    j["L_km"] = reparsable(c.channel.L, km_to_m, c.channel.L / 1e3);
    j["L_att_km"] = reparsable(c.channel.L_att, km_to_m, c.channel.L_att / 1e3);
    j["mu_coup"] = c.channel.mu_coup;
    j["eps_depol"] = c.channel.eps_depol;
    j["v_feedback_m_s"] = c.channel.v_feedback;
    j["v_delay_m_s"] = c.channel.v_delay;
    j["beta"] = c.gates.beta;
    j["t_H_s"] = c.gates.t_H;
    j["t_CZ_ancilla_s"] = c.gates.t_cz_ancilla;
    j["branchings"] = encoding_tree(c.geometry).branchings();
    if (auto r = std::get_if<RgsGeometry>(&c.geometry)) j["N"] = r->N;
    j["m"] = c.m;
    j["matter_qubits"] = c.matter_qubits ? json(*c.matter_qubits) : json(nullptr);
    j["loss_mode"] = to_string(c.loss_mode);
    j["include_cz_error"] = c.include_cz_error;
    return j.dump(2) + "\n";
}

void save_config(const RunConfig& config, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << dump_config(config);
}

}  // namespace gsr
