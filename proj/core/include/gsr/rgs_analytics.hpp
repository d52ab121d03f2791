#pragma once

#include <span>

#include "gsr/params.hpp"

namespace gsr {

struct RgsLinkMetrics {
    double P_BSM = 0.0;
    double P_X = 0.0;
    double P_Z = 0.0;
    double P_link = 0.0;  // one elementary link (m = 0)
    double P_succ = 0.0;  // P_link^(m+1)
    double e_X = 0.0;
    double e_Z = 0.0;
    double F = 1.0;
};

// Success probabilities only; error fields stay zero.
RgsLinkMetrics rgs_success(const RgsGeometry& rgs, double mu, int m);
// mu_level indexes encoding levels 1..d; arm photons use mu_arm.
RgsLinkMetrics rgs_success(const RgsGeometry& rgs, std::span<const double> mu_level, double mu_arm, int m);

// Logical measurement errors of one encoded core qubit.
struct EncodedErrors {
    double e_X = 0.0;
    double e_Z = 0.0;
};

EncodedErrors encoded_errors(const TreeGeometry& encoding, double mu, double eps_sp);
EncodedErrors encoded_errors(const TreeGeometry& encoding, std::span<const double> mu_level, double eps_sp);

double rgs_link_fidelity(double e_X, double e_Z, int N, double eps_sp);
double rgs_fidelity(double e_X, double e_Z, int N, int m, double eps_sp);
double rgs_fidelity(const RgsLinkMetrics& metrics, int N, int m, double eps_sp);

}  // namespace gsr
