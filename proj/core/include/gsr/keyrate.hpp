#pragma once

#include <string>

#include "gsr/lossmodel.hpp"
#include "gsr/params.hpp"
#include "gsr/timing.hpp"

namespace gsr {

// Per-photon depolarization from spin decoherence during generation.
double eps_decoh(double T_graph, double t_coh, long long N_ph);
double eps_sp(double eps_decoh, double eps_depol);
// Leading-order spin-photon CZ infidelity.
double eps_cz(double beta);

struct SecretFraction {
    double r = 0.0;
    bool in_domain = true;  // false when F <= 1/3
};

SecretFraction secret_fraction_checked(double F);
double secret_fraction(double F);

struct ErrorBudget {
    double eps_depol = 0.0;  // effective value, CZ term included when enabled
    double eps_decoh = 0.0;
    double eps_sp = 0.0;
    double eps_CZ = 0.0;
    double F = 1.0;
    double r = 1.0;
};

struct EvalResult {
    Protocol protocol = Protocol::tree;
    Scheme scheme = Scheme::ancilla;
    std::string geometry;
    int m = 0;
    int n = 1;
    long long N_ph = 0;
    double mu = 0.0;
    double L_feedback = 0.0;
    double L_delay = 0.0;
    double spacing = 0.0;
    double P_succ = 0.0;
    double T_graph = 0.0;
    ErrorBudget errors;
    double F = 0.0;
    double r = 0.0;
    double R_eff = 0.0;
    bool secure = false;
    bool m_guarded = false;        // m = 0 evaluated with 1/max(m,1)
    bool fidelity_defined = true;  // false when the node success is zero
};

// Flat JSON object with snake_case keys.
std::string to_json(const EvalResult& result);

// Everything about one (scheme, geometry, emitter, channel) that does not
// depend on the node count, so that scanning m is cheap.
class GeometryEvaluator {
public:
    explicit GeometryEvaluator(const RunConfig& config);

    EvalResult at(int m) const;
    // P_succ at m without the error model.
    double success_at(int m) const;
    // Upper bound on R_eff over all m >= 0.
    double rate_bound() const;
    // Upper bound on R_eff at this m (assumes r = 1).
    double rate_bound_at(int m) const;

    const TimingResult& timing() const { return timing_; }
    const GateTimes& gates() const { return gates_; }
    const LossProfile& losses() const { return losses_; }
    int matter_qubits() const { return n_; }
    // Error terms that do not depend on m (F and r left at defaults).
    const ErrorBudget& base_errors() const { return base_errors_; }

private:
    double success_from(const LinkBudget& budget, int m) const;
    double rate_factor(int m) const;

    RunConfig config_;
    GateTimes gates_;
    LossProfile losses_;
    TimingResult timing_;
    ErrorBudget base_errors_;
    int n_ = 1;
};

EvalResult evaluate(const RunConfig& config);

}  // namespace gsr
