#include <doctest.h>

#include "generators.hpp"
#include "oracles.hpp"

using namespace probelab;

TEST_CASE("complete tree family structure")
{
    Rat lam(1, 2);
    auto art = gen_complete_tree(3, lam);
    REQUIRE(art.tree.has_value());
    REQUIRE(art.norm.has_value());
    const DecisionTree &t = *art.tree;
    CHECK(t.nodes.size() == 15); // 2^(h+1) - 1
    CHECK(t.leaves().size() == 8);
    CHECK(art.instance.n == 7); // one fresh element per internal node
    CHECK(art.instance.all_bernoulli());
    for (int i = 1; i <= art.instance.n; ++i)
    {
        CHECK(art.instance.dist(i).bern_p() == lam);
        CHECK(art.instance.dist(i).bern_c() == Rat(1));
    }
    CHECK(validate_tree(t, art.instance).empty());

    // every root-leaf path probes h distinct elements
    for (int leaf : t.leaves())
        CHECK(path_info(t, leaf).P.size() == 4);
}

TEST_CASE("random Bernoulli family respects its ranges")
{
    for (uint64_t seed = 1; seed <= 5; ++seed)
    {
        auto art = gen_random_bernoulli(6, Rat(1, 4), Rat(3, 4), seed);
        CHECK(art.instance.n == 6);
        CHECK_NOTHROW(art.instance.validate());
        for (int i = 1; i <= 6; ++i)
        {
            Rat p = art.instance.dist(i).bern_p();
            CHECK(p >= Rat(1, 4));
            CHECK(p <= Rat(3, 4));
            CHECK(art.instance.dist(i).bern_c() > 0);
        }
    }
    // determinism
    auto a = gen_random_bernoulli(4, Rat(1, 16), Rat(15, 16), 3);
    auto b = gen_random_bernoulli(4, Rat(1, 16), Rat(15, 16), 3);
    CHECK(a.instance.to_json() == b.instance.to_json());
}

TEST_CASE("random trees validate and respect budgets")
{
    for (uint64_t seed = 1; seed <= 10; ++seed)
    {
        auto art = gen_random_tree(15, 6, seed);
        REQUIRE(art.tree.has_value());
        CHECK(art.tree->nodes.size() <= 15);
        CHECK(validate_tree(*art.tree, art.instance).empty());
        for (int leaf : art.tree->leaves())
            CHECK(path_info(*art.tree, leaf).P.size() <= 7);
    }
}

TEST_CASE("random XOS and Top-k norms")
{
    Norm f = gen_random_xos(5, 4, 60, 2);
    CHECK(f.dim == 5);
    const auto &vecs = std::get<XosNorm>(f.v).vecs;
    CHECK(vecs.size() == 4);
    for (const auto &row : vecs)
        for (const Rat &w : row)
        {
            CHECK(w >= 0);
            CHECK(w < 1);
        }

    Norm s = gen_random_topk(4, {1, 3});
    CHECK(s.dim == 4);
    const auto &profiles = std::get<SymmetricNorm>(s.v).profiles;
    for (const auto &p : profiles)
        for (size_t i = 1; i < p.size(); ++i)
            CHECK(p[i] <= p[i - 1]);
}

TEST_CASE("family spec dispatch")
{
    json spec{{"family", "complete-tree"}, {"h", 2}, {"lambda", "1/4"}};
    auto art = generate(spec);
    CHECK(art.instance.n == 3);

    json bad{{"family", "no-such-family"}};
    CHECK_THROWS_AS(generate(bad), InputError);
}

TEST_CASE("complete tree closed forms at small height")
{
    // adaptive reward lambda*h; active-restricted path sampling lambda^2*h
    Rat lam(1, 4);
    auto art = gen_complete_tree(3, lam);
    Norm unit = make_linear(std::vector<Rat>(art.instance.n, Rat(1)));
    CHECK(oracles::adap_plain(*art.tree, art.instance, unit) == lam * 3);
    CHECK(oracles::expected_active_probed_plain(*art.tree, art.instance) ==
          lam * lam * 3);
}
