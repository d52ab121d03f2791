#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gsr/params.hpp"

namespace gsr {

inline constexpr const char* kOracleAlgorithm = "mt19937_64/seed_seq(seed,block)";

struct OracleReport {
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t trials = 0;
    // Trials the estimate is conditioned on (equals trials when unconditional).
    std::uint64_t conditioned = 0;
    std::uint64_t seed = 0;
    std::string algorithm = kOracleAlgorithm;
};

inline constexpr int kExhaustiveLimit = 22;

// Success-pattern census of a tree: counts[k] is the number of survival
// patterns with k lost photons that decode.
class ExhaustiveTree {
public:
    explicit ExhaustiveTree(const TreeGeometry& tree);
    double success(double mu) const;
    const std::vector<double>& counts() const { return counts_; }

private:
    std::vector<double> counts_;
};

double exhaustive_tree_success(const TreeGeometry& tree, double mu);

struct McOptions {
    std::uint64_t trials = 100000;
    std::uint64_t seed = 1;
    unsigned workers = 0;  // 0: hardware concurrency
};

// Logical error of a decoded tree qubit, conditioned on decoding success.
OracleReport mc_tree_logical_error(const TreeGeometry& tree, double mu, double eps_sp, const McOptions& options);

struct RgsOracleReport {
    OracleReport success;
    OracleReport infidelity;  // conditioned on link success
};

// One elementary link (m = 0).
RgsOracleReport mc_rgs_link(const RgsGeometry& rgs, double mu, double eps_sp, const McOptions& options);

std::string to_json(const OracleReport& report);

}  // namespace gsr
