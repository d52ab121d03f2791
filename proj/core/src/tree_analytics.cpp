#include "gsr/tree_analytics.hpp"

#include <cmath>

#include "gsr/numerics.hpp"

namespace gsr {

using numerics::binomial;
using numerics::clamp_probability;
using numerics::power;

namespace {

double mu_at(std::span<const double> mu, int level) {
    if (mu.empty()) return 0.0;
    int last = static_cast<int>(mu.size()) - 1;
    return mu[std::min(std::max(level, 1), last)];
}

void check_levels(const TreeGeometry& tree, std::span<const double> mu_level) {
    if (static_cast<int>(mu_level.size()) < tree.depth() + 1)
        throw ValidationError("mu", "need one loss value per level");
    for (std::size_t l = 1; l < mu_level.size(); ++l)
        if (!(mu_level[l] >= 0.0 && mu_level[l] <= 1.0)) throw ValidationError("mu", "must lie in [0,1]");
}

void require_depth2(const TreeGeometry& tree) {
    if (tree.depth() < 2) throw ValidationError("branchings", "needs depth >= 2");
}

// Probability that a level-j photon yields some Z outcome.
double z_available(std::span<const double> mu, const IndirectProfile& p, int j) {
    double m = mu_at(mu, j);
    return 1.0 - m + m * p.at(j);
}

}  // namespace

std::vector<double> uniform_levels(int depth, double mu) { return std::vector<double>(depth + 1, mu); }

IndirectProfile indirect_profile(const TreeGeometry& tree, double mu) {
    auto levels = uniform_levels(tree.depth(), mu);
    return indirect_profile(tree, levels);
}

IndirectProfile indirect_profile(const TreeGeometry& tree, std::span<const double> mu) {
    check_levels(tree, mu);
    int d = tree.depth();
    IndirectProfile p;
    p.R.assign(d + 1, 0.0);
    for (int i = d - 1; i >= 0; --i) {
        double sub = tree.b(i + 1) > 0 ? power(z_available(mu, p, i + 2), tree.b(i + 1)) : 1.0;
        double branch = (1.0 - mu_at(mu, i + 1)) * sub;
        p.R[i] = clamp_probability(1.0 - power(1.0 - branch, tree.b(i)));
    }
    return p;
}

double tree_node_success(const TreeGeometry& tree, std::span<const double> mu, const IndirectProfile& p) {
    require_depth2(tree);
    double mu1 = mu_at(mu, 1);
    double first = power(1.0 - mu1 + mu1 * p.at(1), tree.b(0)) - power(mu1 * p.at(1), tree.b(0));
    return clamp_probability(first * power(z_available(mu, p, 2), tree.b(1)));
}

double tree_node_success(const TreeGeometry& tree, double mu) {
    auto levels = uniform_levels(tree.depth(), mu);
    return tree_node_success(tree, levels, indirect_profile(tree, levels));
}

double tree_success(const TreeGeometry& tree, double mu, int m) {
    return power(tree_node_success(tree, mu), m + 1.0);
}

double z_outcome_error(const TreeGeometry& tree, std::span<const double> mu, double eps_sp,
                       const IndirectProfile& p, std::span<const double> e_I, int j) {
    if (j >= tree.depth()) return eps_sp;
    double R = p.at(j);
    double direct = (1.0 - mu_at(mu, j)) * (1.0 - R);
    double norm = R + direct;
    if (norm <= 0.0) return eps_sp;
    return (R * e_I[j] + direct * eps_sp) / norm;
}

std::vector<double> indirect_error(const TreeGeometry& tree, std::span<const double> mu, double eps_sp,
                                   const IndirectProfile& p) {
    check_levels(tree, mu);
    int d = tree.depth();
    std::vector<double> e_I(d + 1, 0.0);
    for (int k = d - 1; k >= 0; --k) {
        int grand = tree.b(k + 1);
        double ez = grand > 0 ? z_outcome_error(tree, mu, eps_sp, p, e_I, k + 2) : 0.0;
        double branch_err = numerics::parity_error(1, eps_sp, grand, ez);
        double sub = grand > 0 ? power(z_available(mu, p, k + 2), grand) : 1.0;
        double q = (1.0 - mu_at(mu, k + 1)) * sub;
        int bk = tree.b(k);
        double any = 1.0 - power(1.0 - q, bk);
        if (any <= 0.0) continue;
        double total = 0.0;
        for (int s = 1; s <= bk; ++s)
            total += binomial(bk, s) * power(q, s) * power(1.0 - q, bk - s) * numerics::majority_error(s, branch_err);
        e_I[k] = clamp_probability(total / any);
    }
    return e_I;
}

std::vector<double> indirect_error(const TreeGeometry& tree, double mu, double eps_sp) {
    auto levels = uniform_levels(tree.depth(), mu);
    return indirect_error(tree, levels, eps_sp, indirect_profile(tree, levels));
}

TreeErrorModel decoding_error(const TreeGeometry& tree, std::span<const double> mu, double eps) {
    require_depth2(tree);
    if (!(eps >= 0.0 && eps <= 0.5)) throw ValidationError("eps_sp", "must lie in [0,1/2]");
    IndirectProfile p = indirect_profile(tree, mu);
    TreeErrorModel out;
    out.eps_sp = eps;
    out.e_I = indirect_error(tree, mu, eps, p);

    const int b0 = tree.b(0), b1 = tree.b(1);
    const double mu1 = mu_at(mu, 1), mu2 = mu_at(mu, 2);
    const double R1 = p.at(1), R2 = p.at(2);
    const double eI1 = out.e_I[1], eI2 = tree.depth() > 2 ? out.e_I[2] : 0.0;

    // Level-1 photons other than the X-measured one.
    double W1 = 0.0, S1 = 0.0;
    for (int l = 0; l <= b0 - 1; ++l) {
        for (int n = 0; n <= b0 - l; ++n) {
            double w = binomial(b0, l) * binomial(b0 - l, n) * power(mu1 * R1, l) *
                       power((1.0 - mu1) * (1.0 - R1), n) * power((1.0 - mu1) * R1, b0 - l - n);
            int nd = n, ni = b0 - 1 - n;
            if (ni < 0) {  // the X photon is itself one of the n direct ones
                nd = n - 1;
                ni = 0;
            }
            W1 += w;
            S1 += w * numerics::parity_error(nd, eps, ni, eI1);
        }
    }
    // Children of the X-measured photon.
    double W2 = 0.0, S2 = 0.0;
    for (int m = 0; m <= b1; ++m) {
        double w = binomial(b1, m) * power((1.0 - mu2) * (1.0 - R2), m) * power(R2, b1 - m);
        W2 += w;
        S2 += w * numerics::parity_error(m, eps, b1 - m, eI2);
    }

    out.p_node = tree_node_success(tree, mu, p);
    out.e_incorrect = clamp_probability(eps * W1 * W2 + (1.0 - eps) * (W1 * S2 + W2 * S1 - S1 * S2));
    if (out.p_node <= 0.0) {
        out.defined = false;
        out.e_decoding = 0.0;
    } else {
        out.e_decoding = clamp_probability(out.e_incorrect / out.p_node);
    }
    return out;
}

TreeErrorModel decoding_error(const TreeGeometry& tree, double mu, double eps_sp) {
    auto levels = uniform_levels(tree.depth(), mu);
    return decoding_error(tree, levels, eps_sp);
}

double tree_fidelity(double e_decoding, int m) {
    if (!(e_decoding >= 0.0 && e_decoding <= 1.0)) throw ValidationError("e_decoding", "must lie in [0,1]");
    return power(1.0 - e_decoding, m + 1.0);
}

namespace detail {

double parity_flip_literal(int n, double e, int k, double f) {
    double total = 0.0;
    for (int i = 0; i <= n; ++i) {
        double a = binomial(n, i) * std::pow(e, i) * std::pow(1.0 - e, n - i);
        double inner = 0.0;
        for (int j = 0; j <= k; ++j)
            if ((i + j) % 2 == 1) inner += binomial(k, j) * std::pow(f, j) * std::pow(1.0 - f, k - j);
        total += a * inner;
    }
    return total;
}

double incorrect_literal(const TreeGeometry& tree, std::span<const double> mu, double eps) {
    require_depth2(tree);
    IndirectProfile p = indirect_profile(tree, mu);
    auto e_I = indirect_error(tree, mu, eps, p);
    const int b0 = tree.b(0), b1 = tree.b(1);
    const double mu1 = mu_at(mu, 1), mu2 = mu_at(mu, 2);
    const double R1 = p.at(1), R2 = p.at(2);
    const double eI2 = tree.depth() > 2 ? e_I[2] : 0.0;
    double total = 0.0;
    for (int l = 0; l <= b0 - 1; ++l)
        for (int n = 0; n <= b0 - l; ++n)
            for (int m = 0; m <= b1; ++m) {
                double w = binomial(b0, l) * binomial(b0 - l, n) * binomial(b1, m) * std::pow(mu1 * R1, l) *
                           std::pow((1.0 - mu1) * (1.0 - R1), n) * std::pow((1.0 - mu1) * R1, b0 - l - n) *
                           std::pow((1.0 - mu2) * (1.0 - R2), m) * std::pow(R2, b1 - m);
                int nd = n, ni = b0 - 1 - n;
                if (ni < 0) {
                    nd = n - 1;
                    ni = 0;
                }
                double e_nm = 1.0 - (1.0 - eps) * (1.0 - parity_flip_literal(nd, eps, ni, e_I[1])) *
                                        (1.0 - parity_flip_literal(m, eps, b1 - m, eI2));
                total += w * e_nm;
            }
    return total;
}

}  // namespace detail

}  // namespace gsr
