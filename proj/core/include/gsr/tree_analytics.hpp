#pragma once

#include <span>
#include <vector>

#include "gsr/params.hpp"

namespace gsr {

// Loss probability per tree level: mu[l] for l = 1..d, mu[0] unused.
std::vector<double> uniform_levels(int depth, double mu);

// Indirect Z-measurement success R_i for i = 0..d; R_i = 0 for i >= d.
struct IndirectProfile {
    std::vector<double> R;
    double at(int i) const { return i >= 0 && i < static_cast<int>(R.size()) ? R[i] : 0.0; }
};

IndirectProfile indirect_profile(const TreeGeometry& tree, double mu);
IndirectProfile indirect_profile(const TreeGeometry& tree, std::span<const double> mu_level);

// Single-node success (m = 0). Requires depth >= 2.
double tree_node_success(const TreeGeometry& tree, std::span<const double> mu_level,
                         const IndirectProfile& profile);
double tree_node_success(const TreeGeometry& tree, double mu);
double tree_success(const TreeGeometry& tree, double mu, int m);

// e_I[k] is the error of an indirect Z outcome on a level-k photon,
// k = 0..d (e_I[d] = 0: bottom photons have no branches).
std::vector<double> indirect_error(const TreeGeometry& tree, std::span<const double> mu_level,
                                   double eps_sp, const IndirectProfile& profile);
std::vector<double> indirect_error(const TreeGeometry& tree, double mu, double eps_sp);

// Error of the Z outcome used for a level-j photon: the indirect result when
// available, the direct one otherwise, weighted by availability.
double z_outcome_error(const TreeGeometry& tree, std::span<const double> mu_level, double eps_sp,
                       const IndirectProfile& profile, std::span<const double> e_I, int level);

struct TreeErrorModel {
    double eps_sp = 0.0;
    std::vector<double> e_I;
    double e_incorrect = 0.0;
    double e_decoding = 0.0;
    double p_node = 0.0;
    bool defined = true;  // false when p_node = 0
};

TreeErrorModel decoding_error(const TreeGeometry& tree, std::span<const double> mu_level, double eps_sp);
TreeErrorModel decoding_error(const TreeGeometry& tree, double mu, double eps_sp);

double tree_fidelity(double e_decoding, int m);

namespace detail {

// Odd-parity probability of n_direct flips at e_direct and n_indirect flips
// at e_indirect, summed term by term.
double parity_flip_literal(int n_direct, double e_direct, int n_indirect, double e_indirect);

// The (l, n, m) triple sum evaluated term by term.
double incorrect_literal(const TreeGeometry& tree, std::span<const double> mu_level, double eps_sp);

}  // namespace detail

}  // namespace gsr
