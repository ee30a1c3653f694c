#include <doctest.h>

#include "caps.hpp"
#include "engine.hpp"
#include "generators.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace probelab;

TEST_CASE("single-probe tree by hand")
{
    Instance inst;
    inst.n = 1;
    inst.elements.push_back(make_dist({Rat(0), Rat(1)}, {Rat(1, 2), Rat(1, 2)}));
    inst.constraint = FeasibilityConstraint::length_bound(1);
    DecisionTree t;
    t.nodes.resize(3);
    t.nodes[0].elt = 1;
    t.nodes[0].kids = {1, 2};
    t.finalize();
    Norm f = make_linear({Rat(1)});

    CHECK(adap_exact(t, inst, f).value == Rat(1, 2));
    CHECK(nadp_exact(t, inst, f).value == Rat(1, 2));
    CHECK(expected_reward(inst, f, {1}) == Rat(1, 2));
}

TEST_CASE("tree evaluation agrees with the plain oracles")
{
    for (uint64_t seed = 1; seed <= 8; ++seed)
    {
        auto art = gen_random_tree(11, 4, seed);
        const Instance &inst = art.instance;
        const DecisionTree &t = *art.tree;
        std::vector<Rat> w;
        for (int i = 0; i < inst.n; ++i)
            w.push_back(Rat(1 + static_cast<long>((seed + i) % 3), 2));
        Norm f = (seed % 2) ? make_linear(w) : gen_random_topk(inst.n, {1, 2});

        CHECK(adap_exact(t, inst, f).value == oracles::adap_plain(t, inst, f));
        CHECK(nadp_exact(t, inst, f).value == oracles::nadp_plain(t, inst, f));
        CHECK(nadp_exact(t, inst, f, true).value ==
              oracles::nadp_plain(t, inst, f, true));
    }
}

TEST_CASE("restricted cardinality objective counts active probes")
{
    auto art = gen_random_tree(13, 5, 42);
    // count actives: force unit values so the linear norm is a cardinality
    Instance inst = art.instance;
    for (auto &d : inst.elements)
        d = make_dist({Rat(0), Rat(1)}, {1 - d.bern_p(), d.bern_p()});
    Norm unit = make_linear(std::vector<Rat>(inst.n, Rat(1)));
    CHECK(nadp_exact(*art.tree, inst, unit, true).value ==
          oracles::expected_active_probed_plain(*art.tree, inst));
}

TEST_CASE("brute-force optima match the unmemoized recursion")
{
    for (uint64_t seed = 1; seed <= 6; ++seed)
    {
        auto art = gen_random_bernoulli(3, Rat(1, 16), Rat(15, 16), seed);
        Norm f = gen_random_topk(3, {1, 2});
        auto opt = optimal_adaptive(art.instance, f);
        CHECK(opt.value == oracles::optimal_adaptive_plain(art.instance, f));
        CHECK(adap_exact(opt.tree, art.instance, f).value == opt.value);

        auto nopt = optimal_nonadaptive(art.instance, f);
        CHECK(nopt.value == oracles::optimal_nonadaptive_plain(art.instance, f));

        // adaptive >= non-adaptive >= the tree's path-sampling value
        CHECK(opt.value >= nopt.value);
        CHECK(nopt.value >= nadp_exact(opt.tree, art.instance, f).value);
    }
}

TEST_CASE("gap report ratios")
{
    auto art = gen_random_bernoulli(3, Rat(1, 16), Rat(15, 16), 5);
    Norm f = gen_random_topk(3, {1});
    GapReport rep = gap_report(art.instance, f);
    CHECK(rep.gap == rep.opt_adaptive / rep.opt_nonadaptive);
    CHECK(rep.gap >= 1);
    CHECK(rep.tree_gap >= 1);
}

TEST_CASE("Monte-Carlo evaluation is deterministic per seed and consistent")
{
    auto art = gen_random_tree(13, 5, 9);
    Norm f = gen_random_topk(art.instance.n, {1, 2});
    EvalResult a = nadp_mc(*art.tree, art.instance, f, 20000, 77);
    EvalResult b = nadp_mc(*art.tree, art.instance, f, 20000, 77);
    CHECK(a.value_d == b.value_d);
    CHECK(a.stderr_ == b.stderr_);

    double exact = to_double(nadp_exact(*art.tree, art.instance, f).value);
    CHECK(std::abs(a.value_d - exact) <= 4 * a.stderr_ + 1e-12);
}

TEST_CASE("solver caps are enforced")
{
    Caps saved = caps();
    set_caps_from_string("cap_n=2");
    auto art = gen_random_bernoulli(3, Rat(1, 16), Rat(15, 16), 1);
    Norm f = make_linear(std::vector<Rat>(3, Rat(1)));
    CHECK_THROWS_AS(optimal_adaptive(art.instance, f), CapError);
    caps() = saved;
}

TEST_CASE("lower-tail bound holds empirically")
{
    // Pr[X < (1-eps) mu] <= exp(-eps^2 mu / 2) for sums of independent
    // Bernoullis; sampled check on 20 p=1/2 coins
    std::mt19937_64 rng(123);
    const int n = 20, trials = 100000;
    const double mu = n * 0.5;
    for (double eps : {0.3, 0.5, 0.8})
    {
        int below = 0;
        std::mt19937_64 r2(rng());
        for (int t = 0; t < trials; ++t)
        {
            int x = 0;
            for (int i = 0; i < n; ++i)
                x += (r2() >> 30) & 1;
            if (x < (1 - eps) * mu)
                ++below;
        }
        double bound = std::exp(-eps * eps * mu / 2);
        CHECK(static_cast<double>(below) / trials <= bound + 0.02);
    }
}
