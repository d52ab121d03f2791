#include "gsr/rgs_analytics.hpp"

#include "gsr/numerics.hpp"
#include "gsr/tree_analytics.hpp"

namespace gsr {

using numerics::clamp_probability;
using numerics::power;

namespace {

void check_rgs(const RgsGeometry& rgs) {
    if (rgs.N < 2 || rgs.N % 2 != 0) throw ValidationError("N", "must be even and >= 2");
    if (rgs.encoding.depth() < 2) throw ValidationError("branchings", "encoding needs depth >= 2");
}

void check_error(double e, const char* name) {
    if (!(e >= 0.0 && e <= 1.0)) throw ValidationError(name, "must lie in [0,1]");
}

}  // namespace

RgsLinkMetrics rgs_success(const RgsGeometry& rgs, double mu, int m) {
    auto levels = uniform_levels(rgs.encoding.depth(), mu);
    return rgs_success(rgs, levels, mu, m);
}

RgsLinkMetrics rgs_success(const RgsGeometry& rgs, std::span<const double> mu_level, double mu_arm, int m) {
    check_rgs(rgs);
    if (m < 0) throw ValidationError("m", "must be >= 0");
    if (!(mu_arm >= 0.0 && mu_arm <= 1.0)) throw ValidationError("mu", "must lie in [0,1]");
    const TreeGeometry& enc = rgs.encoding;
    IndirectProfile p = indirect_profile(enc, mu_level);
    RgsLinkMetrics out;
    out.P_BSM = (1.0 - mu_arm) * (1.0 - mu_arm) / 2.0;
    out.P_X = p.at(0);
    double mu1 = mu_level[1];
    out.P_Z = clamp_probability(power(1.0 - mu1 + mu1 * p.at(1), enc.b(0)));
    double bsm = 1.0 - power(1.0 - out.P_BSM, rgs.N / 2);
    out.P_link = clamp_probability(bsm * out.P_X * out.P_X * power(out.P_Z, rgs.N - 2));
    out.P_succ = power(out.P_link, m + 1.0);
    return out;
}

EncodedErrors encoded_errors(const TreeGeometry& encoding, double mu, double eps_sp) {
    auto levels = uniform_levels(encoding.depth(), mu);
    return encoded_errors(encoding, levels, eps_sp);
}

EncodedErrors encoded_errors(const TreeGeometry& encoding, std::span<const double> mu_level, double eps_sp) {
    if (encoding.depth() < 2) throw ValidationError("branchings", "encoding needs depth >= 2");
    if (!(eps_sp >= 0.0 && eps_sp <= 0.5)) throw ValidationError("eps_sp", "must lie in [0,1/2]");
    IndirectProfile p = indirect_profile(encoding, mu_level);
    auto e_I = indirect_error(encoding, mu_level, eps_sp, p);
    EncodedErrors out;
    out.e_X = e_I[0];
    double ez1 = z_outcome_error(encoding, mu_level, eps_sp, p, e_I, 1);
    out.e_Z = numerics::parity_error(encoding.b(0), ez1, 0, 0.0);
    return out;
}

double rgs_link_fidelity(double e_X, double e_Z, int N, double eps_sp) {
    check_error(e_X, "e_X");
    check_error(e_Z, "e_Z");
    check_error(eps_sp, "eps_sp");
    if (N < 2) throw ValidationError("N", "must be even and >= 2");
    return power(1.0 - eps_sp, 2) * power(1.0 - e_X, 2) * power(1.0 - e_Z, N - 2);
}

double rgs_fidelity(double e_X, double e_Z, int N, int m, double eps_sp) {
    if (m < 0) throw ValidationError("m", "must be >= 0");
    return power(rgs_link_fidelity(e_X, e_Z, N, eps_sp), m + 1.0);
}

double rgs_fidelity(const RgsLinkMetrics& metrics, int N, int m, double eps_sp) {
    return rgs_fidelity(metrics.e_X, metrics.e_Z, N, m, eps_sp);
}

}  // namespace gsr
