#include <catch_amalgamated.hpp>

#include <cmath>

#include "gsr/keyrate.hpp"
#include "gsr/numerics.hpp"

using namespace gsr;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

RunConfig table_config(Protocol p, Scheme s, double ghz, double tcoh, Geometry g, double spacing_km) {
    RunConfig c;
    c.protocol = p;
    c.scheme = s;
    c.emitter = EmitterParams::from_ghz(ghz, tcoh);
    c.geometry = std::move(g);
    c.m = static_cast<int>(std::lround(c.channel.L / (spacing_km * 1e3))) - 1;
    return c;
}

double threshold() {
    double lo = 0.85, hi = 0.90;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (secret_fraction(mid) > 0.0 ? hi : lo) = mid;
    }
    return hi;
}

}  // namespace

TEST_CASE("spin decoherence error", "[keyrate]") {
    CHECK(eps_decoh(1e-6, kInfinity, 100) == 0.0);
    CHECK_THAT(eps_decoh(1e3, 1e-9, 1), WithinAbs(0.75, 1e-15));
    CHECK_THAT(eps_decoh(1e-6, 1e-3, 100), WithinRel(7.4999625001250e-6, 1e-12));
}

TEST_CASE("single-photon error composition", "[keyrate]") {
    CHECK_THAT(eps_sp(0.0, 3e-4), WithinRel(2e-4, 1e-14));
    CHECK_THAT(eps_sp(0.75, 0.75), WithinAbs(0.5, 1e-15));
}

TEST_CASE("CZ infidelity", "[keyrate]") {
    CHECK(eps_cz(500.0) == 8e-6);
    CHECK(eps_cz(kInfinity) == 0.0);
    CHECK(eps_cz(1.0) == 2.0);
}

TEST_CASE("binary entropy", "[keyrate][property]") {
    CHECK(numerics::binary_entropy(0.0) == 0.0);
    CHECK(numerics::binary_entropy(1.0) == 0.0);
    CHECK(numerics::binary_entropy(0.5) == 1.0);
    for (double x : {0.01, 0.1, 0.23, 0.4}) CHECK_THAT(numerics::binary_entropy(x), WithinAbs(numerics::binary_entropy(1 - x), 1e-15));
}

TEST_CASE("secret fraction", "[keyrate]") {
    CHECK(secret_fraction(1.0) == 1.0);
    CHECK_THAT(secret_fraction(0.95), WithinAbs(0.4968162683194162, 1e-13));
    CHECK_FALSE(secret_fraction_checked(0.3).in_domain);
    CHECK(secret_fraction(0.3) == 0.0);
}

TEST_CASE("secret fraction threshold", "[keyrate][property]") {
    double F = threshold();
    CHECK_THAT(F, WithinAbs(0.87380691672317882, 1e-12));
    // Below the fidelity the optimizer never explores, no key at all.
    for (double x = 0.34; x < 0.87; x += 0.01) CHECK(secret_fraction(x) == 0.0);
    double prev = 0.0;
    for (double x = 0.874; x <= 1.0; x += 0.001) {
        CHECK(secret_fraction(x) >= prev);
        prev = secret_fraction(x);
    }
}

TEST_CASE("total loss gives no key", "[keyrate]") {
    RunConfig c;
    c.channel.mu_coup = 1.0;
    EvalResult r = evaluate(c);
    CHECK(r.P_succ == 0.0);
    CHECK(r.R_eff == 0.0);
    CHECK_FALSE(r.secure);
}

TEST_CASE("published operating points", "[keyrate]") {
    auto a = evaluate(table_config(Protocol::tree, Scheme::ancilla, 2.0, 13e-3, TreeGeometry({4, 16, 5}), 1.7));
    CHECK(a.R_eff > 1.4e3 / 3);
    CHECK(a.R_eff < 1.4e3 * 3);
    auto f = evaluate(table_config(Protocol::tree, Scheme::feedback, 100.0, 1.0, TreeGeometry({4, 15, 5}), 1.9));
    CHECK(f.R_eff > 151.1e3 / 3);
    CHECK(f.R_eff < 151.1e3 * 3);
}

TEST_CASE("evaluate is reproducible and consistent", "[keyrate][property]") {
    auto c = table_config(Protocol::rgs, Scheme::feedback, 100.0, 4e-6, RgsGeometry(32, TreeGeometry({25, 7})), 3.2);
    EvalResult a = evaluate(c), b = evaluate(c);
    CHECK(to_json(a) == to_json(b));
    for (double tcoh : {1e-7, 1e-6, 1e-3, 1.0}) {
        for (int m : {0, 10, 300, 1199}) {
            c.emitter = EmitterParams::from_ghz(100.0, tcoh);
            c.m = m;
            EvalResult r = evaluate(c);
            CHECK(r.R_eff >= 0.0);
            CHECK((r.R_eff == 0.0) == (r.r == 0.0 || r.P_succ == 0.0));
            CHECK(r.m_guarded == (m == 0));
        }
    }
}

TEST_CASE("matter-qubit count per scheme", "[keyrate]") {
    auto c = table_config(Protocol::tree, Scheme::ancilla, 2.0, 13e-3, TreeGeometry({4, 16, 5}), 1.7);
    CHECK(evaluate(c).n == 3);
    c.matter_qubits = 1;
    CHECK(evaluate(c).n == 1);
}

TEST_CASE("opt-in CZ error raises the depolarizing budget", "[keyrate]") {
    auto c = table_config(Protocol::tree, Scheme::feedback, 100.0, 1.0, TreeGeometry({4, 15, 5}), 1.9);
    EvalResult off = evaluate(c);
    c.include_cz_error = true;
    EvalResult on = evaluate(c);
    CHECK_THAT(on.errors.eps_depol, WithinRel(off.errors.eps_depol + 8e-6, 1e-12));
    CHECK(on.F < off.F);
}

TEST_CASE("rate bounds dominate every node count", "[keyrate][property]") {
    for (auto s : {Scheme::ancilla, Scheme::feedback}) {
        for (Geometry g : {Geometry(TreeGeometry({4, 16, 5})), Geometry(RgsGeometry(24, TreeGeometry({12, 5})))}) {
            RunConfig c;
            c.scheme = s;
            c.protocol = protocol_of(g);
            c.geometry = g;
            GeometryEvaluator ev(c);
            double bound = ev.rate_bound();
            for (int m = 0; m < 1200; m += 7) {
                EvalResult r = ev.at(m);
                CHECK(r.R_eff <= bound);
                CHECK(r.R_eff <= ev.rate_bound_at(m) * (1 + 1e-12));
            }
        }
    }
}

TEST_CASE("evaluator matches one-shot evaluation", "[keyrate]") {
    RunConfig c;
    GeometryEvaluator ev(c);
    for (int m : {0, 99, 499}) {
        c.m = m;
        CHECK(to_json(ev.at(m)) == to_json(evaluate(c)));
    }
}
