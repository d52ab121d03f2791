#include <catch_amalgamated.hpp>

#include <cmath>

#include "gsr/numerics.hpp"
#include "gsr/oracle.hpp"
#include "gsr/rgs_analytics.hpp"
#include "gsr/tree_analytics.hpp"

using namespace gsr;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("lossless RGS link", "[rgs]") {
    auto m = rgs_success(RgsGeometry(2, TreeGeometry({2, 3})), 0.0, 0);
    CHECK(m.P_BSM == 0.5);
    CHECK(m.P_X == 1.0);
    CHECK_THAT(m.P_succ, WithinAbs(0.5, 1e-15));
}

TEST_CASE("RGS success is a power of the link success", "[rgs][property]") {
    RgsGeometry rgs(32, TreeGeometry({24, 7}));
    auto base = rgs_success(rgs, 0.08, 0);
    for (int m : {1, 7, 311}) CHECK(rgs_success(rgs, 0.08, m).P_succ == numerics::power(base.P_link, m + 1.0));
    for (int N : {2, 4, 16, 48}) {
        auto lossless = rgs_success(RgsGeometry(N, TreeGeometry({2, 3})), 0.0, 0);
        CHECK(lossless.P_succ <= 1.0 - std::pow(0.5, N / 2) + 1e-15);
    }
}

TEST_CASE("RGS success does not grow with loss", "[rgs][property]") {
    for (auto rgs : {RgsGeometry(6, TreeGeometry({2, 3})), RgsGeometry(32, TreeGeometry({24, 7}))}) {
        double prev = 2.0;
        for (int i = 0; i <= 50; ++i) {
            double p = rgs_success(rgs, i / 50.0, 0).P_link;
            CHECK(p <= prev + 1e-15);
            prev = p;
        }
    }
}

TEST_CASE("BSM factor grows with N", "[rgs][property]") {
    double prev = 0.0;
    for (int N = 2; N <= 48; N += 2) {
        auto m = rgs_success(RgsGeometry(N, TreeGeometry({2, 3})), 0.1, 0);
        double bsm = 1.0 - std::pow(1.0 - m.P_BSM, N / 2);
        CHECK(bsm >= prev);
        prev = bsm;
    }
}

TEST_CASE("RGS success agrees with the Monte Carlo link oracle", "[rgs][oracle]") {
    struct Case {
        RgsGeometry rgs;
        double mu;
        std::uint64_t trials;
    };
    for (const auto& c : {Case{RgsGeometry(6, TreeGeometry({2, 3})), 0.05, 200000},
                          Case{RgsGeometry(2, TreeGeometry({1, 1})), 0.0, 200000},
                          Case{RgsGeometry(32, TreeGeometry({24, 7})), 0.15, 20000}}) {
        McOptions opt;
        opt.trials = c.trials;
        opt.seed = 5;
        auto mc = mc_rgs_link(c.rgs, c.mu, 0.0, opt);
        double model = rgs_success(c.rgs, c.mu, 0).P_link;
        INFO(c.rgs.to_string() << " mc=" << mc.success.estimate << " model=" << model);
        CHECK(std::abs(mc.success.estimate - model) <= 3 * mc.success.std_error + 1e-12);
        CHECK(mc.infidelity.estimate == 0.0);
    }
}

TEST_CASE("encoded errors", "[rgs]") {
    auto zero = encoded_errors(TreeGeometry({24, 7}), 0.05, 0.0);
    CHECK(zero.e_X == 0.0);
    CHECK(zero.e_Z == 0.0);

    // A chain encoding has one level-1 photon: e_Z is its blended Z error.
    TreeGeometry chain({1, 1});
    double mu = 0.2, eps = 1e-3;
    auto levels = uniform_levels(2, mu);
    auto p = indirect_profile(chain, levels);
    auto e_I = indirect_error(chain, levels, eps, p);
    auto e = encoded_errors(chain, mu, eps);
    CHECK(e.e_Z == z_outcome_error(chain, levels, eps, p, e_I, 1));
}

TEST_CASE("RGS fidelity examples", "[rgs]") {
    CHECK(rgs_fidelity(0, 0, 32, 499, 0) == 1.0);
    CHECK_THAT(rgs_fidelity(1e-4, 1e-4, 32, 0, 1e-4), WithinRel(0.99660560402063482, 1e-13));
    CHECK(rgs_fidelity(1.0, 1e-4, 32, 0, 1e-4) == 0.0);
}

TEST_CASE("RGS fidelity falls with every error and with m", "[rgs][property]") {
    double base = rgs_fidelity(1e-4, 2e-4, 24, 10, 3e-4);
    CHECK(rgs_fidelity(2e-4, 2e-4, 24, 10, 3e-4) < base);
    CHECK(rgs_fidelity(1e-4, 3e-4, 24, 10, 3e-4) < base);
    CHECK(rgs_fidelity(1e-4, 2e-4, 24, 10, 4e-4) < base);
    CHECK(rgs_fidelity(1e-4, 2e-4, 24, 11, 3e-4) < base);
}

TEST_CASE("RGS link infidelity agrees with the Monte Carlo oracle", "[rgs][oracle]") {
    for (double eps : {1e-4, 1e-3}) {
        RgsGeometry rgs(6, TreeGeometry({2, 3}));
        McOptions opt;
        opt.trials = 400000;
        opt.seed = 9;
        auto mc = mc_rgs_link(rgs, 0.05, eps, opt);
        auto e = encoded_errors(rgs.encoding, 0.05, eps);
        double model = 1.0 - rgs_link_fidelity(e.e_X, e.e_Z, rgs.N, eps);
        INFO("eps=" << eps << " mc=" << mc.infidelity.estimate << " model=" << model);
        CHECK(std::abs(mc.infidelity.estimate - model) <=
              std::max(0.25 * mc.infidelity.estimate, 3 * mc.infidelity.std_error));
    }
}
