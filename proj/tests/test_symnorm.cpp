#include <doctest.h>

#include "generators.hpp"
#include "symnorm.hpp"

#include <cmath>

using namespace probelab;

namespace {

// three Bernoulli(3/4, 1) elements under the Top-2 objective
Instance top2_instance()
{
    Instance inst;
    inst.n = 3;
    for (int i = 0; i < 3; ++i)
        inst.elements.push_back(
            make_dist({Rat(0), Rat(1)}, {Rat(1, 4), Rat(3, 4)}));
    inst.constraint = FeasibilityConstraint::length_bound(3);
    return inst;
}

Norm top2_norm() { return make_symmetric({{Rat(1), Rat(1)}}, 3); }

} // namespace

TEST_CASE("preprocessing normalizes, rounds, and truncates")
{
    Instance inst = top2_instance();
    Norm f = top2_norm();

    // literal smallness is unreachable at this size
    CHECK_THROWS_AS(preprocess(inst, f), InputError);

    SymState st = preprocess(inst, f, 0);
    // OPT = E[min(2, Bin(3, 3/4))] = 117/64; values round down to 1/4
    for (int i = 1; i <= 3; ++i)
        CHECK(st.inst.dist(i).bern_c() == Rat(1, 4));
    CHECK(st.opt1 == Rat(117, 256));
    CHECK(st.opt1_ok);
    CHECK(st.trunc_adap == Rat(117, 256)); // nothing reaches the cutoff
    CHECK(st.trunc_adap_ok);
    CHECK(st.leaf_cap_ok);
    CHECK(st.trunc_adap <= st.opt1);
}

TEST_CASE("class structure of the truncated tree")
{
    SymState st = preprocess(top2_instance(), top2_norm(), 0);
    classify(st);
    CHECK(st.theta == Rat(1));
    for (auto &[node, k] : st.node_class)
        CHECK(k == 1); // every value is 4^-1

    for (const LeafClasses &lc : st.leaves)
    {
        size_t actives = 0;
        for (auto &[k, nodes] : lc.active_by_class)
            actives += nodes.size();
        // class 1 is big exactly when at least 2^1 of its nodes are active
        if (actives >= 2)
        {
            CHECK(lc.big.count(1));
            CHECK(lc.D.size() == actives);
        }
        else
        {
            CHECK(lc.big.empty());
            CHECK(lc.D.empty());
        }
        // activation mass 3/4 per node is never thin here
        CHECK(lc.bad.empty());
        CHECK(lc.G.empty());
    }
}

TEST_CASE("reward concentrates in big classes")
{
    SymState st = preprocess(top2_instance(), top2_norm(), 0);
    classify(st);
    Eq4Report rep = reward_in_big_classes_check(st);
    CHECK(rep.pass);
    CHECK(rep.lhs >= rep.rhs);

    BadMassReport bm = bad_mass_check(st);
    CHECK(bm.literal_thresholds);
    CHECK(bm.mass == 0);
    CHECK(bm.pass);
}

TEST_CASE("per-leaf activation lower bound")
{
    SymState st = preprocess(top2_instance(), top2_norm(), 0);
    classify(st);
    for (const LeafClasses &lc : st.leaves)
    {
        ChernoffPathReport rep = chernoff_path_check(st, lc.leaf);
        CHECK(rep.exact);
        CHECK(rep.pass);
    }
}

TEST_CASE("thin-leaf tail bound on a hand case")
{
    // chain of two p=1/16 probes; the deep leaf has both ancestors active
    Instance inst;
    inst.n = 2;
    for (int i = 0; i < 2; ++i)
        inst.elements.push_back(
            make_dist({Rat(0), Rat(1)}, {Rat(15, 16), Rat(1, 16)}));
    inst.constraint = FeasibilityConstraint::length_bound(2);
    DecisionTree t;
    t.nodes.resize(5);
    t.nodes[0].elt = 1;
    t.nodes[0].kids = {1, 2};
    t.nodes[2].elt = 2;
    t.nodes[2].kids = {3, 4};
    t.finalize();

    BadLeafTailReport rep = bad_leaf_tail_check(t, inst, {0, 2}, {4}, 2, 0.0);
    CHECK(rep.preconditions_ok);
    CHECK(rep.prob == Rat(1, 256));
    CHECK(rep.bound == doctest::Approx(std::exp(-2)));
    CHECK(rep.pass);

    // demanding h=3 active hits breaks the precondition
    BadLeafTailReport bad = bad_leaf_tail_check(t, inst, {0, 2}, {4}, 3, 0.0);
    CHECK_FALSE(bad.preconditions_ok);
}

TEST_CASE("prefix rewards never beat the adaptive optimum")
{
    for (uint64_t seed = 1; seed <= 5; ++seed)
    {
        auto art = gen_random_bernoulli(3, Rat(1, 16), Rat(15, 16), seed);
        SubsequenceReport rep = subsequence_check(art.instance,
                                                  gen_random_topk(3, {1, 2}));
        CHECK(rep.pass);
        CHECK(rep.worst <= rep.opt);
    }
}

TEST_CASE("constant gap bound on small instances")
{
    ConstantGapReport rep = constant_gap_check(top2_instance(), top2_norm());
    CHECK(rep.gap_ok);
    CHECK(rep.gaps.gap <= Rat(2050));
    // the literal smallness premise cannot hold at n=3
    CHECK_FALSE(rep.premises_hold);
    CHECK_FALSE(rep.premise_note.empty());
}
