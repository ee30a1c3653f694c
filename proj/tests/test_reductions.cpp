#include <doctest.h>

#include "generators.hpp"
#include "oracles.hpp"
#include "reductions.hpp"

using namespace probelab;

namespace {

// elt 1 has a three-point support; elt 2 is Bernoulli(1/3, 3/4)
Instance general_instance()
{
    Instance inst;
    inst.n = 2;
    inst.elements.push_back(make_dist({Rat(0), Rat(1, 2), Rat(1)},
                                      {Rat(1, 4), Rat(1, 4), Rat(1, 2)}));
    inst.elements.push_back(make_dist({Rat(0), Rat(3, 4)}, {Rat(2, 3), Rat(1, 3)}));
    inst.constraint = FeasibilityConstraint::length_bound(2);
    return inst;
}

// probe 1; probe 2 only after the middle outcome
DecisionTree general_tree()
{
    DecisionTree t;
    t.nodes.resize(6);
    t.nodes[0].elt = 1;
    t.nodes[0].kids = {1, 2, 3};
    t.nodes[2].elt = 2;
    t.nodes[2].kids = {4, 5};
    t.finalize();
    return t;
}

} // namespace

TEST_CASE("large/small split is an exact coupling")
{
    Instance inst = general_instance();
    Norm f = make_linear({Rat(1), Rat(1)});
    Rat opt(1), lambda(1, 2); // large iff value >= 1/2
    Decomposition dec = decompose_large_small(inst, f, opt, lambda);
    REQUIRE(dec.Y.size() == 2);
    for (int i = 0; i < 2; ++i)
    {
        const auto &d = inst.elements[i];
        std::vector<Rat> yv, zv;
        for (size_t j = 0; j < d.values.size(); ++j)
        {
            bool lg = d.values[j] >= lambda * opt && d.values[j] > 0;
            CHECK(dec.large[i][j] == lg);
            yv.push_back(lg ? d.values[j] : Rat(0));
            zv.push_back(lg ? Rat(0) : d.values[j]);
        }
        ElementDist ey = make_dist(yv, d.probs), ez = make_dist(zv, d.probs);
        CHECK(dec.Y[i].values == ey.values);
        CHECK(dec.Y[i].probs == ey.probs);
        CHECK(dec.Z[i].values == ez.values);
        CHECK(dec.Z[i].probs == ez.probs);
        CHECK(dec.Y[i].expectation() + dec.Z[i].expectation() == d.expectation());
    }
}

TEST_CASE("boundary outcome counts as large")
{
    Norm f = make_linear({Rat(1)});
    CHECK(outcome_is_large(f, 1, 1, Rat(1, 2), Rat(1, 2), Rat(1)));
    CHECK_FALSE(outcome_is_large(f, 1, 1, Rat(1, 2) - Rat(1, 1000), Rat(1, 2), Rat(1)));
}

TEST_CASE("truncation cuts below the first large outcome")
{
    Instance inst = general_instance();
    DecisionTree t;
    t.nodes.resize(8);
    t.nodes[0].elt = 1;
    t.nodes[0].kids = {1, 2, 3};
    t.nodes[2].elt = 2;
    t.nodes[2].kids = {4, 5};
    t.nodes[3].elt = 2; // probing continues after elt 1's top outcome
    t.nodes[3].kids = {6, 7};
    t.finalize();
    Norm f = make_linear({Rat(1), Rat(1)});
    // large iff value >= 3/4: elt 1's top outcome and elt 2's active outcome
    DecisionTree cut = truncate_at_first_large(t, inst, f, Rat(3, 4), Rat(1));
    // the root's top-outcome child became a leaf, and so did the node below
    // elt 2's active arc; the middle branch still probes elt 2
    int mid = cut.nodes[cut.root].kids[1];
    int top = cut.nodes[cut.root].kids[2];
    CHECK(cut.is_leaf(top));
    REQUIRE_FALSE(cut.is_leaf(mid));
    CHECK(cut.elt(mid) == 2);
    CHECK(cut.is_leaf(cut.nodes[mid].kids[1]));
    CHECK(validate_tree(cut, inst).empty());
}

TEST_CASE("large-outcome filtering on optimal trees")
{
    for (uint64_t seed = 1; seed <= 5; ++seed)
    {
        auto art = gen_random_bernoulli(3, Rat(1, 16), Rat(15, 16), seed);
        Norm f = gen_random_topk(3, {1, 2});
        auto opt = optimal_adaptive(art.instance, f);
        if (opt.value == 0)
            continue;
        for (Rat lambda : {Rat(1, 4), Rat(1, 2)})
        {
            LargeFilterReport rep = large_filter_quantities(
                opt.tree, art.instance, f, lambda, opt.value);
            CHECK(rep.subadditive_ok);
            CHECK(rep.filter_ok);
            CHECK(rep.opt_prime + rep.opt_zero >= rep.e_f_y);
        }
    }
}

TEST_CASE("small-conditioned sequence sampling stays feasible-bounded")
{
    auto art = gen_random_bernoulli(3, Rat(1, 16), Rat(7, 8), 4);
    Norm f = gen_random_topk(3, {1, 2});
    auto opt = optimal_adaptive(art.instance, f);
    REQUIRE(opt.value > 0);
    Rat sim = nonadaptive_simulation(opt.tree, art.instance, f, Rat(1, 2), opt.value);
    CHECK(sim >= 0);
    CHECK(sim <= optimal_nonadaptive(art.instance, f).value);

    // an element whose only outcomes are large cannot be simulated
    Instance sure;
    sure.n = 1;
    sure.elements.push_back(make_dist({Rat(0), Rat(1)}, {Rat(0), Rat(1)}));
    sure.constraint = FeasibilityConstraint::length_bound(1);
    DecisionTree t;
    t.nodes.resize(3);
    t.nodes[0].elt = 1;
    t.nodes[0].kids = {1, 2};
    t.finalize();
    Norm unit = make_linear({Rat(1)});
    CHECK_THROWS_AS(nonadaptive_simulation(t, sure, unit, Rat(1, 2), Rat(1)),
                    InputError);
}

TEST_CASE("geometric value rounding")
{
    Instance inst;
    inst.n = 3;
    inst.elements.push_back(make_dist({Rat(0), Rat(1, 2)}, {Rat(1, 2), Rat(1, 2)}));
    inst.elements.push_back(make_dist({Rat(0), Rat(3, 4)}, {Rat(1, 2), Rat(1, 2)}));
    inst.elements.push_back(make_dist({Rat(0), Rat(1, 32)}, {Rat(1, 2), Rat(1, 2)}));
    inst.constraint = FeasibilityConstraint::length_bound(3);
    Norm f = make_linear({Rat(1), Rat(1), Rat(1)});

    Instance out = geometric_round(inst, f, 3); // keep window [1/12, 1/2]
    CHECK(out.dist(1).values.back() == Rat(1, 4)); // power of 2 strictly below
    CHECK(out.dist(2).values.back() == Rat(1, 2));
    CHECK(out.dist(3).values.back() == Rat(0)); // below the window

    // surviving values shrink by a factor in [1/2, 1)
    CHECK(out.dist(1).values.back() / inst.dist(1).values.back() == Rat(1, 2));
    CHECK(out.dist(2).values.back() / inst.dist(2).values.back() == Rat(2, 3));

    Instance big = inst;
    big.elements[0] = make_dist({Rat(0), Rat(2)}, {Rat(1, 2), Rat(1, 2)});
    CHECK_THROWS_AS(geometric_round(big, f, 3), InputError);
}

TEST_CASE("indicator-chain transform is exact")
{
    Instance inst = general_instance();
    DecisionTree t = general_tree();
    Bernoullized b = bernoullize(t, inst);
    CHECK(b.binst.all_bernoulli());
    CHECK(chain_probabilities_exact(b));
    CHECK(leaf_marginals_exact(b, t));

    // the induced norm reproduces the original adaptive value exactly
    Norm f = make_symmetric({{Rat(1)}}, 2); // max of the collected values
    Norm fp = induced_norm(f, b, false);
    CHECK(adap_exact(b.ttree, b.binst, fp).value ==
          oracles::adap_plain(t, inst, f));

    // on 0/1 inputs the symmetric induced variant is within a factor 2
    int m = b.binst.n;
    for (const Norm &base :
         {f, make_symmetric({{Rat(1), Rat(1, 2)}}, 2)})
    {
        Norm fb = induced_norm(base, b, false);
        Norm gb = induced_norm(base, b, true);
        for (int mask = 0; mask < (1 << m); ++mask)
        {
            std::vector<Rat> v(m, Rat(0));
            for (int i = 0; i < m; ++i)
                if (mask & (1 << i))
                    v[i] = 1;
            CHECK(2 * evaluate(fb, v) >= evaluate(gb, v));
            CHECK(evaluate(gb, v) >= evaluate(fb, v));
        }
    }
}

TEST_CASE("bucket pipeline produces a dominated special norm")
{
    for (uint64_t seed = 1; seed <= 5; ++seed)
    {
        auto art = gen_random_tree(11, 4, seed);
        const Instance &inst = art.instance;
        Norm f = gen_random_xos(inst.n, 3, 70, seed);
        XosPipelineResult res = xos_pipeline(*art.tree, inst, f, inst.n);
        CHECK(res.j0 >= 1);
        std::vector<int> elems;
        for (const auto &nd : art.tree->nodes)
            if (nd.elt > 0)
                elems.push_back(nd.elt);
        Rat scale = rat_pow2(-res.j0);
        for (int mask = 0; mask < (1 << elems.size()); ++mask)
        {
            std::vector<int> S;
            for (size_t i = 0; i < elems.size(); ++i)
                if (mask & (1 << i))
                    S.push_back(elems[i]);
            CHECK(evaluate_set(f, S) >= scale * evaluate_set(res.fxos, S));
        }
    }
}
