#include <doctest.h>

#include "generators.hpp"
#include "labeling.hpp"

#include <cmath>

using namespace probelab;

namespace {

// single Yes-path chain of `len` probes, fresh element per node, p = 1/2
std::pair<DecisionTree, Instance> yes_chain(int len)
{
    DecisionTree t;
    Instance inst;
    inst.n = len;
    inst.constraint = FeasibilityConstraint::length_bound(len);
    int cur = static_cast<int>(t.nodes.size());
    t.nodes.emplace_back();
    for (int i = 1; i <= len; ++i)
    {
        inst.elements.push_back(
            make_dist({Rat(0), Rat(1)}, {Rat(1, 2), Rat(1, 2)}));
        t.nodes[cur].elt = i;
        int no = static_cast<int>(t.nodes.size());
        t.nodes.emplace_back();
        int yes = static_cast<int>(t.nodes.size());
        t.nodes.emplace_back();
        t.nodes[cur].kids = {no, yes};
        cur = yes;
    }
    t.finalize();
    return {t, inst};
}

std::map<int, std::vector<int>> full_active(const DecisionTree &t)
{
    std::map<int, std::vector<int>> ap;
    for (int leaf : t.leaves())
        ap[leaf] = path_info(t, leaf).A;
    return ap;
}

} // namespace

TEST_CASE("label validity rules")
{
    Label b;
    b.m = 2;
    b.s = 4;
    b.d = {3, 1};
    b.e = {0, 2};
    b.y = {3, 1};
    CHECK(label_valid(b, 5, 2));

    Label dup = b;
    dup.d = {3, 3}; // depths must strictly decrease
    CHECK_FALSE(label_valid(dup, 5, 2));

    Label oob = b;
    oob.e = {0, 9}; // element outside [1, n]
    CHECK_FALSE(label_valid(oob, 5, 2));

    Label ylen = b;
    ylen.y = {3}; // needs floor(s/K) = 2 entries
    CHECK_FALSE(label_valid(ylen, 5, 2));

    CHECK(b.prefix(1).m == 1);
    CHECK(b.prefix(1).s == 4);
    CHECK(b.prefix(1).d == std::vector<int>{3});

    Label back = Label::from_json(b.to_json(), 2);
    CHECK(back == b);
}

TEST_CASE("parameter presets and the damped tail function")
{
    CHECK(preset_k3(2) == 50); // ceil(25 * 1) + 25
    CHECK(preset_k3(4) == 75);
    CHECK(preset_k4(4) == 150); // 50 * ceil(2 / 1) + 50
    CHECK(preset_k3(1000) > preset_k3(100));

    CHECK(g_eval(0, 0.3) == 0.3);
    CHECK(g_eval(5, 0.0) == 0.0);
    CHECK(g_eval(1, 1.0) == doctest::Approx(std::exp(-0.1)));
    // damping grows with h at fixed p
    CHECK(g_eval(10, 0.5) < g_eval(10, 0.9));
}

TEST_CASE("grid inequality holds on a coarse grid")
{
    GridCheckReport rep = g_inequality_check(20, 10);
    CHECK(rep.pass);
    CHECK(rep.violations == 0);
    CHECK(rep.checked > 0);
}

TEST_CASE("initial labels on a Yes-chain")
{
    auto [t, inst] = yes_chain(3);
    LabelingWorkbench wb(t, inst, 1, full_active(t));

    // deepest leaf: all 3 ancestors are special, depths 2,1,0 bottom-up
    int deep = -1;
    for (int leaf : wb.leaves())
        if (wb.pinfo(leaf).A.size() == 3)
            deep = leaf;
    REQUIRE(deep != -1);
    Label b = wb.leaf_label(deep);
    CHECK(b.m == 1);
    CHECK(b.s == 3);
    CHECK(b.d == std::vector<int>{3});
    CHECK(b.e == std::vector<int>{0});
    CHECK(b.y == std::vector<int>{2, 1, 0});

    // empty R leaves the label at its initial value
    auto run = wb.run_labeling(deep, {});
    CHECK(run.label == b);
    CHECK(run.triggers == std::vector<int>{deep});

    // determinism
    auto r1 = wb.run_labeling(deep, {1, 3});
    auto r2 = wb.run_labeling(deep, {1, 3});
    CHECK(r1.label == r2.label);
    CHECK(r1.label.m >= 1);

    // the final label's prefixes are themselves valid labels
    for (int a = 1; a <= r1.label.m; ++a)
        CHECK(label_valid(r1.label.prefix(a), inst.n, 1));
}

TEST_CASE("outcome probabilities are a distribution")
{
    auto art = gen_random_tree(13, 5, 3);
    LabelingWorkbench wb(*art.tree, art.instance, 2, full_active(*art.tree));
    Rat total = 0;
    for (const auto &o : wb.outcomes())
        total += o.prob;
    CHECK(total == Rat(1));
}

TEST_CASE("label tail bound on random trees")
{
    for (uint64_t seed = 1; seed <= 6; ++seed)
    {
        auto art = gen_random_tree(13, 6, seed);
        for (int K : {1, 2})
        {
            LabelingWorkbench wb(*art.tree, art.instance, K,
                                 full_active(*art.tree));
            TailReport rep = wb.tail_check();
            CHECK(rep.pass);
            for (const auto &ent : rep.entries)
                CHECK(ent.prob <= ent.bound);
        }
    }
}

TEST_CASE("exclusion-set counting on a realized label")
{
    auto art = gen_random_tree(13, 5, 7);
    LabelingWorkbench wb(*art.tree, art.instance, 1, full_active(*art.tree));
    for (const Label &b : wb.realized_labels())
    {
        const AnalysisSets &as = wb.analysis_sets(b);
        for (int u : as.T)
            CHECK_FALSE(art.tree->is_leaf(u));
        for (int leaf : as.S)
        {
            const PathInfo &pi = wb.pinfo(leaf);
            int hits = 0;
            for (int u : pi.A)
                if (as.T.count(u))
                    ++hits;
            CHECK(hits >= b.s - b.m * wb.K());
        }
    }
}

TEST_CASE("survival probability induction on a chain is exact")
{
    auto [t, inst] = yes_chain(4);
    LabelingWorkbench wb(t, inst, 4, full_active(t));
    int deep = -1;
    for (int leaf : wb.leaves())
        if (wb.pinfo(leaf).A.size() == 4)
            deep = leaf;
    std::set<int> T;
    for (int u : wb.pinfo(deep).A)
        T.insert(u);
    InductionReport rep = wb.induction_check({deep}, T, 4);
    CHECK(rep.preconditions_ok);
    CHECK(rep.pass);
    CHECK(rep.bound == Rat(1, 16));
    // pi(deep) = 2^-4 and all four p=1/2 probes must miss
    CHECK(rep.lhs == Rat(1, 256));
}

TEST_CASE("event structure checks pass on a small tree")
{
    auto art = gen_random_tree(11, 4, 5);
    LabelingWorkbench wb(*art.tree, art.instance, 1, full_active(*art.tree));
    auto labels = wb.realized_labels();
    REQUIRE_FALSE(labels.empty());
    for (const Label &b : labels)
    {
        EventReport rep = wb.event_checks(b);
        CHECK(rep.pass());
        if (!rep.pass())
            for (const auto &msg : rep.failures)
                MESSAGE(msg);
    }
}
