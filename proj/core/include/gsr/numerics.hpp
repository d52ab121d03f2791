#pragma once

#include <cstdint>
#include <span>

namespace gsr::numerics {

// Clamps x into [0,1]. Every adjustment larger than rounding noise is
// tallied in a process-wide counter.
double clamp_probability(double x);
std::uint64_t clamp_events();
void reset_clamp_events();

// x^k for probabilities; switches to exp(k log x) for large k.
double power(double x, double k);

double binomial(int n, int k);

// Probability that an odd number of independent flips occurs.
double parity_error(std::span<const double> flips);
// Same, for `count_a` flips of rate a and `count_b` flips of rate b.
double parity_error(int count_a, double a, int count_b, double b);

// Majority vote over s independent bits with flip rate e; ties count as 1/2.
double majority_error(int s, double e);

double binary_entropy(double x);

}  // namespace gsr::numerics
