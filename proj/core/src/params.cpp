#include "gsr/params.hpp"

#include <charconv>
#include <cmath>

namespace gsr {

namespace {

bool is_probability(double x) { return x >= 0.0 && x <= 1.0; }

void require(bool ok, const char* field, const std::string& message) {
    if (!ok) throw ValidationError(field, message);
}

int parse_int(std::string_view text, const char* field) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ValidationError(field, "not an integer: '" + std::string(text) + "'");
    return value;
}

}  // namespace

ValidationError::ValidationError(std::string field, const std::string& message)
    : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

std::string to_string(Protocol p) { return p == Protocol::tree ? "tree" : "rgs"; }
std::string to_string(Scheme s) { return s == Scheme::ancilla ? "ancilla" : "feedback"; }
std::string to_string(LossMode m) { return m == LossMode::worst_case ? "worst_case" : "per_level"; }

Protocol parse_protocol(std::string_view text) {
    if (text == "tree") return Protocol::tree;
    if (text == "rgs") return Protocol::rgs;
    throw ValidationError("protocol", "expected 'tree' or 'rgs', got '" + std::string(text) + "'");
}

Scheme parse_scheme(std::string_view text) {
    if (text == "ancilla") return Scheme::ancilla;
    if (text == "feedback") return Scheme::feedback;
    throw ValidationError("scheme", "expected 'ancilla' or 'feedback', got '" + std::string(text) + "'");
}

LossMode parse_loss_mode(std::string_view text) {
    if (text == "worst_case") return LossMode::worst_case;
    if (text == "per_level") return LossMode::per_level;
    throw ValidationError("loss_mode", "expected 'worst_case' or 'per_level', got '" + std::string(text) + "'");
}

EmitterParams EmitterParams::from_ghz(double gamma_over_2pi_ghz, double t_coh_s) {
    return EmitterParams{kTwoPi * gamma_over_2pi_ghz * 1e9, t_coh_s};
}

void EmitterParams::validate() const {
    require(std::isfinite(gamma) && gamma > 0.0, "gamma_ghz", "must be positive and finite");
    require(!std::isnan(t_coh) && t_coh > 0.0, "t_coh_s", "must be positive (inf allowed)");
}

void ChannelParams::validate() const {
    require(std::isfinite(L) && L > 0.0, "L_km", "must be positive");
    require(std::isfinite(L_att) && L_att > 0.0, "L_att_km", "must be positive");
    require(is_probability(mu_coup), "mu_coup", "must lie in [0,1]");
    require(is_probability(eps_depol), "eps_depol", "must lie in [0,1]");
    require(std::isfinite(v_feedback) && v_feedback > 0.0, "v_feedback_m_s", "must be positive");
    require(std::isfinite(v_delay) && v_delay > 0.0, "v_delay_m_s", "must be positive");
}

void GateSettings::validate() const {
    require(std::isfinite(beta) && beta >= 1.0, "beta", "must be >= 1");
    require(std::isfinite(t_H) && t_H >= 0.0, "t_H_s", "must be >= 0");
    require(std::isfinite(t_cz_ancilla) && t_cz_ancilla >= 0.0, "t_CZ_ancilla_s", "must be >= 0");
}

GateTimes derive_gate_times(const EmitterParams& emitter, Scheme scheme, const GateSettings& settings) {
    require(emitter.gamma > 0.0, "gamma_ghz", "must be positive");
    GateTimes g;
    g.t_P = 1.0 / emitter.gamma;
    g.t_M = 10.0 / emitter.gamma;
    g.t_H = settings.t_H;
    g.beta = settings.beta;
    if (scheme == Scheme::ancilla) {
        g.t_E = g.t_P + g.t_H + g.t_M;
        g.t_CZ = settings.t_cz_ancilla;
    } else {
        g.t_E = settings.beta * g.t_P + g.t_H + g.t_M;
        g.t_CZ = g.t_E;
    }
    return g;
}

TreeGeometry::TreeGeometry(std::vector<int> branchings) : b_(std::move(branchings)) {
    require(!b_.empty(), "branchings", "need at least one level");
    for (int b : b_) require(b >= 1, "branchings", "every b_i must be >= 1");
}

long long TreeGeometry::level_count(int l) const {
    long long n = 1;
    for (int i = 0; i < l && i < depth(); ++i) n *= b_[i];
    return l > depth() ? 0 : n;
}

long long TreeGeometry::photon_count() const {
    long long total = 0;
    for (int l = 1; l <= depth(); ++l) total += level_count(l);
    return total;
}

std::string TreeGeometry::to_string() const {
    std::string s;
    for (std::size_t i = 0; i < b_.size(); ++i) {
        if (i) s += '-';
        s += std::to_string(b_[i]);
    }
    return s;
}

RgsGeometry::RgsGeometry(int n, TreeGeometry enc) : N(n), encoding(std::move(enc)) {
    require(N >= 2 && N % 2 == 0, "N", "must be an even integer >= 2");
    require(encoding.depth() >= 1, "branchings", "encoding tree must have at least one level");
}

long long RgsGeometry::photon_count() const { return N * (1 + encoding.photon_count()); }

std::string RgsGeometry::to_string() const { return std::to_string(N) + ":" + encoding.to_string(); }

Protocol protocol_of(const Geometry& g) {
    return std::holds_alternative<TreeGeometry>(g) ? Protocol::tree : Protocol::rgs;
}

const TreeGeometry& encoding_tree(const Geometry& g) {
    if (auto t = std::get_if<TreeGeometry>(&g)) return *t;
    return std::get<RgsGeometry>(g).encoding;
}

long long photon_count(const Geometry& g) {
    return std::visit([](const auto& x) { return x.photon_count(); }, g);
}

std::string to_string(const Geometry& g) {
    return std::visit([](const auto& x) { return x.to_string(); }, g);
}

Geometry parse_geometry(std::string_view text) {
    auto parse_tree = [](std::string_view s) {
        std::vector<int> b;
        std::size_t pos = 0;
        while (pos <= s.size()) {
            std::size_t dash = s.find('-', pos);
            if (dash == std::string_view::npos) dash = s.size();
            b.push_back(parse_int(s.substr(pos, dash - pos), "branchings"));
            pos = dash + 1;
        }
        return TreeGeometry(std::move(b));
    };
    if (auto colon = text.find(':'); colon != std::string_view::npos)
        return RgsGeometry(parse_int(text.substr(0, colon), "N"), parse_tree(text.substr(colon + 1)));
    return parse_tree(text);
}

int default_matter_qubits(Protocol protocol, Scheme scheme, const Geometry& geometry) {
    if (scheme == Scheme::feedback) return 1;
    int d = encoding_tree(geometry).depth();
    return protocol == Protocol::tree ? d : d + 1;
}

void RunConfig::validate() const {
    emitter.validate();
    channel.validate();
    gates.validate();
    if (protocol != protocol_of(geometry)) {
        if (protocol == Protocol::rgs)
            throw ValidationError("N", "protocol 'rgs' requires an N");
        throw ValidationError("N", "protocol 'tree' does not take an N");
    }
    require(m >= 0, "m", "must be >= 0");
    if (matter_qubits) require(*matter_qubits >= 1, "matter_qubits", "must be >= 1");
    const TreeGeometry& enc = encoding_tree(geometry);
    require(enc.depth() >= 2, "branchings", "rate evaluation needs depth >= 2");
}

int RunConfig::resolved_matter_qubits() const {
    return matter_qubits ? *matter_qubits : default_matter_qubits(protocol, scheme, geometry);
}

}  // namespace gsr
