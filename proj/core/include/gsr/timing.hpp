#pragma once

#include "gsr/params.hpp"

namespace gsr {

struct TimingResult {
    double T_graph = 0.0;  // s
    long long N_ph = 0;
};

// Closed-form graph generation time. Trees and RGS encodings need depth >= 2.
TimingResult generation_time(Scheme scheme, const Geometry& geometry, const GateTimes& gates);

}  // namespace gsr
