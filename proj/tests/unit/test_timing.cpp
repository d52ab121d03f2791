#include <catch_amalgamated.hpp>

#include "gsr/timing.hpp"

using namespace gsr;
using Catch::Matchers::WithinRel;

namespace {

GateTimes gates_for(Scheme s) { return derive_gate_times(EmitterParams::from_ghz(10.0, 1e-3), s); }

}  // namespace

TEST_CASE("photon census", "[timing]") {
    auto g = gates_for(Scheme::ancilla);
    CHECK(generation_time(Scheme::ancilla, TreeGeometry({2, 3}), g).N_ph == 8);
    CHECK(generation_time(Scheme::feedback, RgsGeometry(6, TreeGeometry({2, 3})), g).N_ph == 54);
    CHECK(generation_time(Scheme::ancilla, TreeGeometry({4, 16, 5}), g).N_ph == 388);
}

TEST_CASE("tree ancilla generation time, depth 2", "[timing]") {
    auto g = gates_for(Scheme::ancilla);
    double T = generation_time(Scheme::ancilla, TreeGeometry({2, 3}), g).T_graph;
    CHECK_THAT(T, WithinRel(6 * g.t_P + 2 * g.beta * g.t_E + 2 * g.t_CZ, 1e-14));
}

TEST_CASE("tree feedback generation time", "[timing]") {
    auto g = gates_for(Scheme::feedback);
    double T = generation_time(Scheme::feedback, TreeGeometry({2, 3}), g).T_graph;
    CHECK_THAT(T, WithinRel(6 * g.t_P + 2 * (g.t_E + g.t_CZ), 1e-14));
}

TEST_CASE("zero gate times give zero or a measurement tail", "[timing][property]") {
    GateTimes zero;
    zero.beta = 500.0;
    CHECK(generation_time(Scheme::ancilla, TreeGeometry({4, 16, 5}), zero).T_graph == 0.0);
    CHECK(generation_time(Scheme::feedback, TreeGeometry({4, 16, 5}), zero).T_graph == 0.0);
    CHECK(generation_time(Scheme::feedback, RgsGeometry(32, TreeGeometry({24, 7})), zero).T_graph == 0.0);
    GateTimes tail = zero;
    tail.t_M = 1e-9;
    CHECK_THAT(generation_time(Scheme::feedback, RgsGeometry(32, TreeGeometry({24, 7})), tail).T_graph,
               WithinRel(1e-9, 1e-14));
}

TEST_CASE("generation time is linear in the gate times", "[timing][property]") {
    for (Scheme s : {Scheme::ancilla, Scheme::feedback}) {
        auto g = gates_for(s);
        GateTimes g3 = g;
        g3.t_P *= 3;
        g3.t_E *= 3;
        g3.t_CZ *= 3;
        g3.t_H *= 3;
        g3.t_M *= 3;
        for (Geometry geo : {Geometry(TreeGeometry({4, 16, 5})), Geometry(RgsGeometry(32, TreeGeometry({24, 7})))}) {
            double T = generation_time(s, geo, g).T_graph;
            CHECK_THAT(generation_time(s, geo, g3).T_graph, WithinRel(3 * T, 1e-13));
        }
    }
}

TEST_CASE("generation time needs depth two", "[timing]") {
    CHECK_THROWS_AS(generation_time(Scheme::ancilla, TreeGeometry({5}), gates_for(Scheme::ancilla)), ValidationError);
}
