#include "gsr/keyrate.hpp"

#include <algorithm>
#include <cmath>

#include "gsr/numerics.hpp"
#include "gsr/rgs_analytics.hpp"
#include "gsr/tree_analytics.hpp"
#include "json.hpp"

namespace gsr {

using numerics::binary_entropy;

double eps_decoh(double T_graph, double t_coh, long long N_ph) {
    if (!(T_graph >= 0.0)) throw ValidationError("T_graph", "must be >= 0");
    if (!(t_coh > 0.0)) throw ValidationError("t_coh_s", "must be > 0");
    if (N_ph < 1) throw ValidationError("N_ph", "must be >= 1");
    if (std::isinf(t_coh)) return 0.0;
    double x = T_graph / (t_coh * static_cast<double>(N_ph));
    return -0.75 * std::expm1(-x);
}

double eps_sp(double decoh, double depol) {
    if (!(decoh >= 0.0 && decoh <= 0.75)) throw ValidationError("eps_decoh", "must lie in [0,3/4]");
    if (!(depol >= 0.0 && depol <= 0.75)) throw ValidationError("eps_depol", "must lie in [0,3/4]");
    return (2.0 / 3.0) * (decoh + depol - (4.0 / 3.0) * decoh * depol);
}

double eps_cz(double beta) {
    if (!(beta >= 1.0)) throw ValidationError("beta", "must be >= 1");
    return 2.0 / (beta * beta);
}

SecretFraction secret_fraction_checked(double F) {
    if (!(F >= 0.0 && F <= 1.0)) throw ValidationError("F", "must lie in [0,1]");
    if (F <= 1.0 / 3.0) return {0.0, false};
    double r = F - binary_entropy(1.0 - F) - F * binary_entropy((3.0 * F - 1.0) / (2.0 * F));
    return {std::clamp(r, 0.0, 1.0), true};
}

double secret_fraction(double F) { return secret_fraction_checked(F).r; }

namespace {
const RunConfig& validated(const RunConfig& c) {
    c.validate();
    return c;
}
}  // namespace

GeometryEvaluator::GeometryEvaluator(const RunConfig& config)
    : config_(validated(config)),
      gates_(derive_gate_times(config.emitter, config.scheme, config.gates)),
      losses_(config.scheme, config.geometry, gates_, config.channel, config.loss_mode),
      timing_(generation_time(config.scheme, config.geometry, gates_)),
      n_(config.resolved_matter_qubits()) {
    ErrorBudget& e = base_errors_;
    e.eps_CZ = eps_cz(gates_.beta);
    e.eps_depol = config.channel.eps_depol + (config.include_cz_error ? e.eps_CZ : 0.0);
    e.eps_depol = std::min(e.eps_depol, 0.75);
    e.eps_decoh = eps_decoh(timing_.T_graph, config.emitter.t_coh, timing_.N_ph);
    e.eps_sp = eps_sp(e.eps_decoh, e.eps_depol);
}

double GeometryEvaluator::rate_factor(int m) const {
    return config_.channel.L / config_.channel.L_att / (timing_.T_graph * std::max(m, 1) * n_);
}

double GeometryEvaluator::success_from(const LinkBudget& b, int m) const {
    if (auto rgs = std::get_if<RgsGeometry>(&config_.geometry))
        return rgs_success(*rgs, b.mu_level, b.mu_arm, m).P_succ;
    const auto& tree = std::get<TreeGeometry>(config_.geometry);
    return numerics::power(tree_node_success(tree, b.mu_level, indirect_profile(tree, b.mu_level)), m + 1.0);
}

double GeometryEvaluator::success_at(int m) const { return success_from(losses_.at(m), m); }

double GeometryEvaluator::rate_bound_at(int m) const { return success_at(m) * rate_factor(m); }

double GeometryEvaluator::rate_bound() const {
    // Without the channel term the per-link success p0 bounds every p(m),
    // and p(m)^(m+1)/max(m,1) is then at most p0.
    double p0 = success_from(losses_.without_channel(), 0);
    return p0 * config_.channel.L / config_.channel.L_att / (timing_.T_graph * n_);
}

EvalResult GeometryEvaluator::at(int m) const {
    if (m < 0) throw ValidationError("m", "must be >= 0");
    LinkBudget b = losses_.at(m);
    EvalResult out;
    out.protocol = config_.protocol;
    out.scheme = config_.scheme;
    out.geometry = to_string(config_.geometry);
    out.m = m;
    out.n = n_;
    out.N_ph = timing_.N_ph;
    out.mu = b.mu;
    out.L_feedback = b.L_feedback;
    out.L_delay = b.L_delay;
    out.spacing = config_.channel.L / (m + 1.0);
    out.T_graph = timing_.T_graph;
    out.m_guarded = m == 0;
    out.errors = base_errors_;
    const double esp = base_errors_.eps_sp;

    if (auto rgs = std::get_if<RgsGeometry>(&config_.geometry)) {
        RgsLinkMetrics link = rgs_success(*rgs, b.mu_level, b.mu_arm, m);
        EncodedErrors enc = encoded_errors(rgs->encoding, b.mu_level, esp);
        out.P_succ = link.P_succ;
        out.F = rgs_fidelity(enc.e_X, enc.e_Z, rgs->N, m, esp);
    } else {
        const auto& tree = std::get<TreeGeometry>(config_.geometry);
        TreeErrorModel model = decoding_error(tree, b.mu_level, esp);
        out.P_succ = numerics::power(model.p_node, m + 1.0);
        out.fidelity_defined = model.defined;
        out.F = model.defined ? tree_fidelity(model.e_decoding, m) : 0.0;
    }
    out.errors.F = out.F;
    out.r = secret_fraction(out.F);
    out.errors.r = out.r;
    out.secure = out.r > 0.0;
    out.R_eff = out.secure ? out.r * out.P_succ * rate_factor(m) : 0.0;
    return out;
}

EvalResult evaluate(const RunConfig& config) { return GeometryEvaluator(config).at(config.m); }

std::string to_json(const EvalResult& x) {
    nlohmann::ordered_json j;
    j["protocol"] = to_string(x.protocol);
    j["scheme"] = to_string(x.scheme);
    j["geometry"] = x.geometry;
    j["m"] = x.m;
    j["n"] = x.n;
    j["N_ph"] = x.N_ph;
    j["mu"] = x.mu;
    j["L_feedback_m"] = x.L_feedback;
    j["L_delay_m"] = x.L_delay;
    j["spacing_km"] = x.spacing / 1e3;
    j["P_succ"] = x.P_succ;
    j["T_graph_s"] = x.T_graph;
    j["eps_depol"] = x.errors.eps_depol;
    j["eps_decoh"] = x.errors.eps_decoh;
    j["eps_sp"] = x.errors.eps_sp;
    j["eps_CZ"] = x.errors.eps_CZ;
    j["F"] = x.F;
    j["r"] = x.r;
    j["reff_hz"] = x.R_eff;
    j["secure"] = x.secure;
    j["m_guarded"] = x.m_guarded;
    j["fidelity_defined"] = x.fidelity_defined;
    return j.dump();
}

}  // namespace gsr
