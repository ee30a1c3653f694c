#include <doctest.h>

#include "generators.hpp"
#include "norms.hpp"

using namespace probelab;

TEST_CASE("norm evaluation by variant")
{
    Norm lin = make_linear({Rat(1), Rat(2), Rat(3)});
    CHECK(evaluate(lin, {Rat(1), Rat(1, 2), Rat(0)}) == Rat(2));

    Norm xos = make_xos({{Rat(1), Rat(0)}, {Rat(1, 2), Rat(1, 2)}});
    CHECK(evaluate(xos, {Rat(1), Rat(0)}) == Rat(1));
    CHECK(evaluate(xos, {Rat(1), Rat(2)}) == Rat(3, 2));

    Norm bx = make_binary_xos({{Rat(1), Rat(0), Rat(1)}, {Rat(0), Rat(1), Rat(1)}});
    CHECK(evaluate_set(bx, {1, 2}) == Rat(1));
    CHECK(evaluate_set(bx, {2, 3}) == Rat(2));

    // max(Top-1, Top-2 with halved second coordinate)
    Norm sym = make_symmetric({{Rat(1)}, {Rat(1), Rat(1, 2)}}, 3);
    CHECK(evaluate(sym, {Rat(1, 2), Rat(2), Rat(1)}) == Rat(2) + Rat(1, 2));
    // symmetric: invariant under permutations
    CHECK(evaluate(sym, {Rat(2), Rat(1), Rat(1, 2)}) ==
          evaluate(sym, {Rat(1, 2), Rat(2), Rat(1)}));

    Norm sp = make_special_xos({{1, 2}, {2, 3}}, 3);
    CHECK(evaluate_set(sp, {2}) == Rat(1));
    CHECK(evaluate_set(sp, {1, 2, 3}) == Rat(2));
    CHECK(evaluate_set(sp, {}) == Rat(0));
}

TEST_CASE("evaluate_subset bounds")
{
    Norm lin = make_linear({Rat(1), Rat(1)});
    CHECK(evaluate_subset(lin, {2}, {Rat(5), Rat(7)}) == Rat(7));
    CHECK_THROWS_AS(evaluate_subset(lin, {3}, {Rat(1), Rat(1)}), InputError);
}

TEST_CASE("norm JSON round trips")
{
    for (const Norm &f :
         {make_linear({Rat(1), Rat(1, 2)}),
          make_xos({{Rat(1), Rat(0)}, {Rat(1, 4), Rat(3, 4)}}),
          make_symmetric({{Rat(1), Rat(1)}}, 2),
          make_special_xos({{1}, {1, 2}}, 2)})
    {
        Norm back = Norm::from_json(f.to_json());
        CHECK(back.dim == f.dim);
        CHECK(evaluate(back, {Rat(1), Rat(1, 2)}) ==
              evaluate(f, {Rat(1), Rat(1, 2)}));
    }
}

TEST_CASE("axioms hold for the norm classes")
{
    for (uint64_t seed = 1; seed <= 3; ++seed)
    {
        AxiomCheck a = verify_norm_axioms(gen_random_xos(4, 3, 70, seed), 200, seed);
        CHECK(a.all());
    }
    AxiomCheck s = verify_norm_axioms(gen_random_topk(4, {1, 3}), 200, 7);
    CHECK(s.all());
    CHECK(s.exhaustive_grid);
}

TEST_CASE("axiom checker catches violations")
{
    // max(v1 - v2, 0): homogeneous and subadditive but not monotone
    auto f = [](const std::vector<Rat> &v) {
        return std::max(v[0] - v[1], Rat(0));
    };
    AxiomCheck a = verify_axioms_fn(f, 2, 300, 11);
    CHECK_FALSE(a.monotone);
    CHECK_FALSE(a.counterexamples.empty());

    // v1 + 1 on nonzero inputs is not homogeneous
    auto g = [](const std::vector<Rat> &v) {
        return v[0] > 0 ? v[0] + 1 : Rat(0);
    };
    AxiomCheck b = verify_axioms_fn(g, 2, 300, 11);
    CHECK_FALSE(b.homogeneous);
}

TEST_CASE("weight buckets under the maximizing vector")
{
    // chain: probe 1 then 2, both Yes arcs
    DecisionTree t;
    t.nodes.resize(5);
    t.nodes[0].elt = 1;
    t.nodes[0].kids = {1, 2};
    t.nodes[2].elt = 2;
    t.nodes[2].kids = {3, 4};
    t.finalize();

    // vector 0 and vector 1 tie on {1,2}; smallest index wins
    Norm f = make_xos({{Rat(1, 2), Rat(1, 16)}, {Rat(1, 16), Rat(1, 2)}});
    auto buckets = round_and_bucket(f, t, 4);
    REQUIRE(buckets.size() == 3);
    for (const auto &lb : buckets)
    {
        if (lb.leaf != 4)
            continue;
        CHECK(lb.maximizer == 0);
        // with r=4 there are 3 buckets; w=1/2 lands in bucket 1 and the
        // w=1/16 weight falls below 2^-3 into the residual
        REQUIRE(lb.bucket.count(1));
        CHECK(t.elt(lb.bucket.at(1).front()) == 1);
        REQUIRE(lb.bucket.count(0));
        CHECK(t.elt(lb.bucket.at(0).front()) == 2);
    }
}

TEST_CASE("special XOS from per-leaf subsets")
{
    DecisionTree t;
    t.nodes.resize(5);
    t.nodes[0].elt = 1;
    t.nodes[0].kids = {1, 2};
    t.nodes[2].elt = 2;
    t.nodes[2].kids = {3, 4};
    t.finalize();

    std::map<int, std::vector<int>> subsets{{4, {0, 2}}, {3, {0}}, {1, {}}};
    Norm sp = build_special_xos(t, subsets);
    CHECK(evaluate_set(sp, {1, 2}) == Rat(2));
    CHECK(evaluate_set(sp, {2}) == Rat(1));

    // node 2 is not an active ancestor of leaf 3
    std::map<int, std::vector<int>> bad{{3, {2}}};
    CHECK_THROWS_AS(build_special_xos(t, bad), InputError);
}
