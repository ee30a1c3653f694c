#include <doctest.h>

#include "model.hpp"

using namespace probelab;

namespace {

Instance two_bernoulli()
{
    Instance inst;
    inst.n = 2;
    inst.elements.push_back(make_dist({Rat(0), Rat(1)}, {Rat(1, 2), Rat(1, 2)}));
    inst.elements.push_back(make_dist({Rat(0), Rat(1, 2)}, {Rat(1, 4), Rat(3, 4)}));
    inst.constraint = FeasibilityConstraint::length_bound(2);
    return inst;
}

// probe 1; on the nonzero outcome probe 2, else stop
DecisionTree small_tree()
{
    DecisionTree t;
    t.nodes.resize(5);
    t.nodes[0].elt = 1;
    t.nodes[0].kids = {1, 2};
    t.nodes[2].elt = 2;
    t.nodes[2].kids = {3, 4};
    t.finalize();
    return t;
}

} // namespace

TEST_CASE("rational parsing")
{
    CHECK(rat_parse("3/4") == Rat(3, 4));
    CHECK(rat_parse("7") == Rat(7));
    CHECK(rat_parse("0.25") == Rat(1, 4));
    CHECK(rat_parse("-1/8") == Rat(-1, 8));
    CHECK(rat_str(Rat(3, 4)) == "3/4");
    CHECK(rat_str(Rat(2)) == "2");
    CHECK_THROWS_AS(rat_parse("1/0"), InputError);
    CHECK_THROWS_AS(rat_parse("abc"), InputError);
}

TEST_CASE("make_dist canonicalizes")
{
    ElementDist d = make_dist({Rat(1), Rat(0), Rat(1)}, {Rat(1, 4), Rat(1, 2), Rat(1, 4)});
    REQUIRE(d.values.size() == 2);
    CHECK(d.values[0] == Rat(0));
    CHECK(d.values[1] == Rat(1));
    CHECK(d.probs[1] == Rat(1, 2));
    CHECK(d.is_bernoulli());
    CHECK(d.bern_p() == Rat(1, 2));
    CHECK(d.bern_c() == Rat(1));
    CHECK(d.expectation() == Rat(1, 2));

    // zero-probability support points survive canonicalization
    ElementDist z = make_dist({Rat(0), Rat(1)}, {Rat(0), Rat(1)});
    CHECK(z.values.size() == 2);
    CHECK(z.is_bernoulli());
    CHECK(z.bern_p() == Rat(1));
}

TEST_CASE("feasibility constraints")
{
    auto lb = FeasibilityConstraint::length_bound(2);
    CHECK(lb.feasible({}));
    CHECK(lb.feasible({3, 1}));
    CHECK_FALSE(lb.feasible({1, 2, 3}));
    CHECK_FALSE(lb.feasible({1, 1}));

    auto ex = FeasibilityConstraint::explicit_sequences({{1, 2, 3}, {2}});
    CHECK(ex.feasible({}));
    CHECK(ex.feasible({1}));
    CHECK(ex.feasible({1, 2}));
    CHECK(ex.feasible({2}));
    CHECK_FALSE(ex.feasible({2, 1}));
    CHECK_FALSE(ex.feasible({3}));

    auto dc = FeasibilityConstraint::downward_closed({{1, 2}, {3}});
    CHECK(dc.feasible({2, 1}));
    CHECK(dc.feasible({3}));
    CHECK_FALSE(dc.feasible({1, 3}));

    json j = ex.to_json();
    auto back = FeasibilityConstraint::from_json(j);
    CHECK(back.feasible({1, 2}));
    CHECK_FALSE(back.feasible({2, 1}));
}

TEST_CASE("instance validation")
{
    Instance inst = two_bernoulli();
    CHECK_NOTHROW(inst.validate());
    CHECK(inst.all_bernoulli());

    Instance bad = inst;
    bad.elements[0].probs = {Rat(1, 2), Rat(1, 4)};
    CHECK_THROWS_AS(bad.validate(), InputError);

    Instance neg = inst;
    neg.elements[0].values = {Rat(-1), Rat(1)};
    CHECK_THROWS_AS(neg.validate(), InputError);

    Instance dead = inst;
    dead.elements[0] = make_dist({Rat(0), Rat(1)}, {Rat(1), Rat(0)});
    CHECK_THROWS_AS(dead.validate(), InputError);

    json j = inst.to_json();
    Instance back = Instance::from_json(j);
    CHECK(back.n == 2);
    CHECK(back.dist(2).bern_c() == Rat(1, 2));
    CHECK(back.to_json() == j);
}

TEST_CASE("tree structure and paths")
{
    DecisionTree t = small_tree();
    CHECK(t.parent[0] == -1);
    CHECK(t.parent[2] == 0);
    CHECK(t.arc[2] == 1);
    CHECK(t.arc[1] == 0);

    // DFS order, low outcome first
    CHECK(t.leaves() == std::vector<int>{1, 3, 4});

    PathInfo pi = path_info(t, 4);
    CHECK(pi.P == std::vector<int>{0, 2, 4});
    CHECK(pi.A == std::vector<int>{0, 2});
    CHECK(pi.depth.at(0) == 0);
    CHECK(pi.depth.at(2) == 1);
    CHECK(pi.depth.at(4) == 2);

    PathInfo pn = path_info(t, 1);
    CHECK(pn.A.empty());
    CHECK(pn.depth.at(1) == 0);

    json j = t.to_json();
    DecisionTree back = DecisionTree::from_json(j);
    CHECK(back.leaves() == t.leaves());
}

TEST_CASE("tree validation catches repeats and arity mismatch")
{
    Instance inst = two_bernoulli();
    DecisionTree t = small_tree();
    CHECK(validate_tree(t, inst).empty());

    DecisionTree rep = t;
    rep.nodes[2].elt = 1; // element 1 probed twice on one path
    rep.finalize();
    CHECK_FALSE(validate_tree(rep, inst).empty());
}

TEST_CASE("leaf distribution is exact")
{
    Instance inst = two_bernoulli();
    DecisionTree t = small_tree();
    auto dist = leaf_distribution(t, inst);
    Rat total = 0;
    std::map<int, Rat> by_leaf;
    for (auto &[leaf, pr] : dist)
    {
        total += pr;
        by_leaf[leaf] = pr;
    }
    CHECK(total == Rat(1));
    CHECK(by_leaf[1] == Rat(1, 2));
    CHECK(by_leaf[3] == Rat(1, 2) * Rat(1, 4));
    CHECK(by_leaf[4] == Rat(1, 2) * Rat(3, 4));
}

TEST_CASE("feasible sequence enumeration")
{
    Instance inst;
    inst.n = 3;
    for (int i = 0; i < 3; ++i)
        inst.elements.push_back(
            make_dist({Rat(0), Rat(1)}, {Rat(1, 2), Rat(1, 2)}));
    inst.constraint = FeasibilityConstraint::length_bound(2);
    auto seqs = enumerate_feasible(inst, 3);
    CHECK(seqs.size() == 10); // empty + 3 singletons + 6 ordered pairs
}
