#include "gsr/timing.hpp"

namespace gsr {

namespace {

// Sum over l = 0..d-2 of prod_{i=0}^{l} b_i, i.e. nodes on levels 1..d-1.
double inner_nodes(const TreeGeometry& t) {
    double total = 0.0;
    for (int l = 1; l <= t.depth() - 1; ++l) total += static_cast<double>(t.level_count(l));
    return total;
}

}  // namespace

TimingResult generation_time(Scheme scheme, const Geometry& geometry, const GateTimes& g) {
    const TreeGeometry& t = encoding_tree(geometry);
    if (t.depth() < 2) throw ValidationError("branchings", "needs depth >= 2");
    const double leaves = static_cast<double>(t.level_count(t.depth()));
    const double inner = inner_nodes(t);
    TimingResult out;
    out.N_ph = photon_count(geometry);

    if (auto rgs = std::get_if<RgsGeometry>(&geometry)) {
        const double N = rgs->N;
        if (scheme == Scheme::ancilla) {
            out.T_graph = N * ((1.0 + leaves) * g.t_P + inner * g.t_E + (2.0 + inner) * g.t_CZ + 2.0 * g.t_M) + g.t_M;
        } else {
            out.T_graph = N * (leaves * g.t_P + (1.0 / g.beta + inner) * g.t_E + (t.b(0) + inner) * g.t_CZ) + g.t_M;
        }
        return out;
    }

    if (scheme == Scheme::ancilla) {
        // Upper sum starts at l = 1, so it covers levels 2..d-1.
        const double upper = inner - t.b(0);
        out.T_graph = leaves * g.t_P + (g.beta * t.b(0) + upper) * g.t_E + inner * g.t_CZ;
    } else {
        out.T_graph = leaves * g.t_P + inner * g.t_E + inner * g.t_CZ;
    }
    return out;
}

}  // namespace gsr
