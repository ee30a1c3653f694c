#include "verify.hpp"

#include "generators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace probelab {

bool SuiteReport::pass() const
{
    for (const auto &r : rows)
        if (!r.pass)
            return false;
    return true;
}

json SuiteReport::to_json() const
{
    json j;
    j["suite"] = suite;
    j["pass"] = pass();
    j["checks"] = json::array();
    for (const auto &r : rows)
        j["checks"].push_back(
            {{"id", r.id}, {"pass", r.pass}, {"detail", r.detail}});
    return j;
}

std::string SuiteReport::csv() const
{
    std::string out = "suite,check,pass,detail\n";
    for (const auto &r : rows)
    {
        std::string d = r.detail;
        std::replace(d.begin(), d.end(), ',', ';');
        out += suite + "," + r.id + "," + (r.pass ? "1" : "0") + "," + d + "\n";
    }
    return out;
}

std::vector<std::string> suite_names()
{
    return {"3.9", "3.10", "3.11", "3.13", "3.12/4.2", "4.4", "5.3", "5.4",
            "B.1", "C.2"};
}

// ---------------------------------------------------------------------------
// shared case construction for the labeling suites

namespace {

struct WbCase {
    std::string tag;
    Instance inst;
    DecisionTree tree;
    int K = 1;
    std::map<int, std::vector<int>> aprime;
};

std::map<int, std::vector<int>> full_aprime(const DecisionTree &t)
{
    std::map<int, std::vector<int>> ap;
    for (int leaf : t.leaves())
        ap[leaf] = path_info(t, leaf).A;
    return ap;
}

std::map<int, std::vector<int>> random_aprime(const DecisionTree &t,
                                              uint64_t seed)
{
    std::mt19937_64 rng(seed ^ 0x5bd1e995ULL);
    std::map<int, std::vector<int>> ap;
    for (int leaf : t.leaves())
    {
        std::vector<int> keep;
        for (int u : path_info(t, leaf).A)
            if (rng() % 2)
                keep.push_back(u);
        ap[leaf] = std::move(keep);
    }
    return ap;
}

std::vector<WbCase> labeling_cases(const json &cfg, int def_seeds,
                                   int def_nodes, int def_path,
                                   std::vector<int> def_ks)
{
    int seeds = cfg.value("seeds", def_seeds);
    uint64_t seed0 = cfg.value("seed0", static_cast<uint64_t>(1));
    int max_nodes = cfg.value("max_nodes", def_nodes);
    int max_path = cfg.value("max_path", def_path);
    std::vector<int> ks = def_ks;
    if (cfg.contains("k_values"))
        ks = cfg.at("k_values").get<std::vector<int>>();

    std::vector<WbCase> cases;
    for (int s = 0; s < seeds; ++s)
    {
        uint64_t seed = seed0 + static_cast<uint64_t>(s);
        auto art = gen_random_tree(max_nodes, max_path, seed);
        for (int K : ks)
        {
            WbCase full{"seed" + std::to_string(seed) + "/K" +
                            std::to_string(K) + "/full",
                        art.instance, *art.tree, K, full_aprime(*art.tree)};
            WbCase rnd{"seed" + std::to_string(seed) + "/K" +
                           std::to_string(K) + "/rand",
                       art.instance, *art.tree, K,
                       random_aprime(*art.tree, seed)};
            cases.push_back(std::move(full));
            cases.push_back(std::move(rnd));
        }
    }
    return cases;
}

std::string rat_brief(const Rat &x)
{
    return rat_str(x) + " (" + std::to_string(to_double(x)) + ")";
}

// ---------------------------------------------------------------------------
// individual suites

SuiteReport suite_3_9(const json &cfg)
{
    SuiteReport rep{"3.9", {}};
    for (const auto &c : labeling_cases(cfg, 20, 15, 8, {1, 2, 3}))
    {
        LabelingWorkbench wb(c.tree, c.inst, c.K, c.aprime);
        Norm fxos = wb.special_xos();
        bool ok = true;
        std::string why;
        for (const auto &oc : wb.outcomes())
        {
            std::vector<int> present(oc.R.begin(), oc.R.end());
            Rat fx = fxos.dim > 0 ? evaluate_set(fxos, present) : Rat(0);
            if (fx < oc.label.m - 1)
            {
                ok = false;
                why = "f_xos below m-1 at leaf " + std::to_string(oc.leaf);
                break;
            }
            if (oc.label.s !=
                static_cast<int>(wb.aprime(oc.leaf).size()))
            {
                ok = false;
                why = "s mismatch at leaf " + std::to_string(oc.leaf);
                break;
            }
        }
        rep.rows.push_back({c.tag, ok, ok ? "all outcomes" : why});
    }
    return rep;
}

SuiteReport suite_3_13(const json &cfg)
{
    SuiteReport rep{"3.13", {}};
    auto cases = labeling_cases(cfg, 50, 15, 8, {1, 2, 3});
    int complete_h = cfg.value("complete_h", 6);
    if (complete_h > 0)
    {
        auto art = gen_complete_tree(complete_h, Rat(1, 2));
        cases.push_back({"complete-h" + std::to_string(complete_h),
                         art.instance, *art.tree, 2, full_aprime(*art.tree)});
    }
    for (const auto &c : cases)
    {
        LabelingWorkbench wb(c.tree, c.inst, c.K, c.aprime);
        TailReport t = wb.tail_check();
        Rat worst = 0; // largest prob/bound ratio over realized labels
        for (const auto &e : t.entries)
            worst = std::max(worst, e.prob / e.bound);
        rep.rows.push_back({c.tag, t.pass,
                            std::to_string(t.entries.size()) +
                                " labels, worst prob/bound " +
                                rat_brief(worst)});
    }
    return rep;
}

SuiteReport suite_3_10(const json &cfg)
{
    SuiteReport rep{"3.10", {}};
    for (const auto &c : labeling_cases(cfg, 50, 15, 8, {1, 2, 3}))
    {
        LabelingWorkbench wb(c.tree, c.inst, c.K, c.aprime);
        bool ok = true;
        std::string why = "all labels";
        for (const Label &B0 : wb.realized_labels())
        {
            const auto &as = wb.analysis_sets(B0);
            for (int u : as.T)
                if (c.tree.is_leaf(u))
                {
                    ok = false;
                    why = "leaf in T for " + B0.str();
                }
            int need = B0.s - B0.m * c.K;
            for (int leaf : as.S)
            {
                const auto &A = wb.pinfo(leaf).A;
                auto count_in = [&](const std::set<int> &nodes) {
                    int cnt = 0;
                    for (int u : A)
                        if (nodes.count(u))
                            ++cnt;
                    return cnt;
                };
                std::set<int> imp(as.imp.at(leaf).begin(),
                                  as.imp.at(leaf).end());
                if (count_in(imp) < need || count_in(as.Tprime) < need)
                {
                    ok = false;
                    why = "active-ancestor bound fails for " + B0.str();
                }
            }
            if (!ok)
                break;
        }
        rep.rows.push_back({c.tag, ok, why});
    }
    return rep;
}

SuiteReport suite_3_11(const json &cfg)
{
    SuiteReport rep{"3.11", {}};
    for (const auto &c : labeling_cases(cfg, 50, 15, 8, {1, 2, 3}))
    {
        LabelingWorkbench wb(c.tree, c.inst, c.K, c.aprime);
        bool ok = true;
        std::string why = "all outcomes";
        for (const auto &oc : wb.outcomes())
        {
            const auto &as = wb.analysis_sets(oc.label);
            for (int u : wb.pinfo(oc.leaf).P)
                if (!c.tree.is_leaf(u) && as.T.count(u) &&
                    oc.R.count(c.tree.elt(u)))
                {
                    ok = false;
                    why = "excluded node active at leaf " +
                          std::to_string(oc.leaf);
                }
            if (!ok)
                break;
        }
        rep.rows.push_back({c.tag, ok, why});
    }
    return rep;
}

SuiteReport suite_induction(const json &cfg)
{
    SuiteReport rep{"3.12/4.2", {}};
    int seeds = cfg.value("seeds", 200);
    uint64_t seed0 = cfg.value("seed0", static_cast<uint64_t>(1));
    for (int s = 0; s < seeds; ++s)
    {
        uint64_t seed = seed0 + static_cast<uint64_t>(s);
        auto art = gen_random_tree(cfg.value("max_nodes", 40),
                                   cfg.value("max_path", 10), seed);
        LabelingWorkbench wb(*art.tree, art.instance, 1, {});
        std::mt19937_64 rng(seed ^ 0x2545f491ULL);
        std::set<int> T;
        for (size_t u = 0; u < art.tree->nodes.size(); ++u)
            if (!art.tree->is_leaf(static_cast<int>(u)) && rng() % 3 == 0)
                T.insert(static_cast<int>(u));
        int h = static_cast<int>(rng() % 5);
        std::set<int> S;
        std::map<int, Rat> weights;
        for (int leaf : wb.leaves())
        {
            int a = 0;
            for (int u : wb.pinfo(leaf).A)
                if (T.count(u))
                    ++a;
            if (a >= h)
                S.insert(leaf);
            weights[leaf] = Rat(static_cast<long>(rng() % 17), 16);
        }
        auto r = wb.induction_check(S, T, h, &weights);
        bool ok = r.preconditions_ok && r.pass && r.pass_weighted;
        rep.rows.push_back(
            {"seed" + std::to_string(seed), ok,
             "h=" + std::to_string(h) + " lhs=" + rat_brief(r.lhs) +
                 " lhs_w=" + std::to_string(r.lhs_weighted) +
                 " g=" + std::to_string(r.g_bound)});
    }
    return rep;
}

SuiteReport suite_4_4(const json &cfg)
{
    SuiteReport rep{"4.4", {}};
    for (const auto &c : labeling_cases(cfg, 50, 12, 5, {1, 2}))
    {
        LabelingWorkbench wb(c.tree, c.inst, c.K, c.aprime);
        bool ok = true;
        std::string why = "all labels";
        for (const Label &B0 : wb.realized_labels())
        {
            EventReport er = wb.event_checks(B0);
            if (!er.pass())
            {
                ok = false;
                why = er.failures.empty() ? "event check failed"
                                          : er.failures.front();
                break;
            }
        }
        rep.rows.push_back({c.tag, ok, why});
    }
    return rep;
}

SuiteReport suite_5_3(const json &cfg)
{
    SuiteReport rep{"5.3", {}};
    int seeds = cfg.value("seeds", 200);
    uint64_t seed0 = cfg.value("seed0", static_cast<uint64_t>(1));
    for (int s = 0; s < seeds; ++s)
    {
        uint64_t seed = seed0 + static_cast<uint64_t>(s);
        auto art = gen_random_tree(cfg.value("max_nodes", 40),
                                   cfg.value("max_path", 10), seed);
        // thin activation probabilities so the mass precondition is reachable
        Instance inst = art.instance;
        for (auto &el : inst.elements)
            el = make_dist({Rat(0), el.bern_c()}, {Rat(15, 16), Rat(1, 16)});
        const DecisionTree &t = *art.tree;
        std::mt19937_64 rng(seed ^ 0x9e3779b9ULL);
        std::set<int> T;
        for (size_t u = 0; u < t.nodes.size(); ++u)
            if (!t.is_leaf(static_cast<int>(u)) && rng() % 2 == 0)
                T.insert(static_cast<int>(u));
        int h = static_cast<int>(rng() % 3);
        double q = (rng() % 2) ? 0.5 : 0.0;
        Rat qr = rat_parse(std::to_string(q));
        std::set<int> S;
        int nontrivial = 0;
        for (int leaf : t.leaves())
        {
            PathInfo pi = path_info(t, leaf);
            int a = 0;
            Rat mass = 0;
            for (int u : pi.A)
                if (T.count(u))
                    ++a;
            for (int u : pi.P)
                if (!t.is_leaf(u) && T.count(u))
                    mass += inst.dist(t.elt(u)).bern_p();
            if (a >= h && Rat(a) >= 8 * mass + qr)
            {
                S.insert(leaf);
                if (a > 0)
                    ++nontrivial;
            }
        }
        auto r = bad_leaf_tail_check(t, inst, T, S, h, q);
        rep.rows.push_back({"seed" + std::to_string(seed),
                            r.preconditions_ok && r.pass,
                            "|S|=" + std::to_string(S.size()) + " (" +
                                std::to_string(nontrivial) +
                                " active) prob=" + rat_brief(r.prob) +
                                " bound=" + std::to_string(r.bound)});
    }
    return rep;
}

SuiteReport suite_5_4(const json &cfg)
{
    SuiteReport rep{"5.4", {}};
    int seeds = cfg.value("seeds", 100);
    uint64_t seed0 = cfg.value("seed0", static_cast<uint64_t>(1));
    for (int s = 0; s < seeds; ++s)
    {
        uint64_t seed = seed0 + static_cast<uint64_t>(s);
        int n = 3 + static_cast<int>(seed % 3);
        auto art = gen_random_bernoulli(n, Rat(1, 2), Rat(15, 16), seed);
        Norm f = gen_random_topk(n, {std::min(2, n)});
        std::string id = "seed" + std::to_string(seed);
        SymState st;
        try
        {
            st = preprocess(art.instance, f, 0);
        }
        catch (const InputError &ex)
        {
            rep.rows.push_back({id, true,
                                std::string("skipped: ") + ex.what()});
            continue;
        }
        classify(st, Rat(1));
        bool ok = true;
        std::string why = "literal thresholds";
        for (const auto &lc : st.leaves)
        {
            auto r = chernoff_path_check(st, lc.leaf);
            if (!r.pass)
            {
                ok = false;
                why = "literal check failed at leaf " +
                      std::to_string(lc.leaf);
            }
        }
        auto e4 = reward_in_big_classes_check(st);
        if (!e4.pass)
        {
            ok = false;
            why = "class-reward inequality failed";
        }
        auto bm = bad_mass_check(st);
        if (bm.literal_thresholds && !bm.pass)
        {
            ok = false;
            why = "bad-class mass above budget";
        }
        // surrogate thresholds: report the measured ratio without asserting
        Rat theta = 0;
        for (const auto &lc : st.leaves)
            for (auto &[k, nodes] : lc.active_by_class)
            {
                Rat t = Rat(static_cast<long>(nodes.size())) / rat_pow2(k);
                if (t > theta)
                    theta = t;
            }
        if (theta > 0 && theta < 1)
        {
            classify(st, theta);
            int held = 0, total = 0;
            for (const auto &lc : st.leaves)
            {
                auto r = chernoff_path_check(st, lc.leaf);
                ++total;
                if (r.pass)
                    ++held;
            }
            why += "; surrogate theta=" + rat_str(theta) + " held " +
                   std::to_string(held) + "/" + std::to_string(total);
        }
        rep.rows.push_back({id, ok, why});
    }
    return rep;
}

SuiteReport suite_b1(const json &cfg)
{
    SuiteReport rep{"B.1", {}};
    auto r = g_inequality_check(cfg.value("grid_steps", 100),
                                cfg.value("h_max", 30),
                                cfg.value("slack", 1e-12));
    rep.rows.push_back({"grid", r.pass,
                        std::to_string(r.checked) + " points, " +
                            std::to_string(r.violations) + " violations"});
    return rep;
}

Instance random_general_instance(int n, int max_support, std::mt19937_64 &rng)
{
    Instance inst;
    inst.n = n;
    for (int i = 0; i < n; ++i)
    {
        int k = 2 + static_cast<int>(rng() % (max_support - 1));
        std::vector<int> picks;
        while (static_cast<int>(picks.size()) < k)
        {
            int v = static_cast<int>(rng() % 10);
            if (std::find(picks.begin(), picks.end(), v) == picks.end())
                picks.push_back(v);
        }
        std::sort(picks.begin(), picks.end());
        std::vector<Rat> values, weights;
        for (int v : picks)
            values.push_back(Rat(v, 8));
        long total = 0;
        for (int j = 0; j < k; ++j)
        {
            long w = 1 + static_cast<long>(rng() % 5);
            // occasionally drop an interior support point to probability 0
            if (j > 0 && j + 1 < k && rng() % 4 == 0)
                w = 0;
            weights.push_back(Rat(w));
            total += w;
        }
        std::vector<Rat> probs;
        for (const Rat &w : weights)
            probs.push_back(w / total);
        inst.elements.push_back(make_dist(values, probs));
    }
    inst.constraint = FeasibilityConstraint::length_bound(n);
    inst.validate();
    return inst;
}

DecisionTree random_general_tree(const Instance &inst, int max_depth,
                                 std::mt19937_64 &rng)
{
    DecisionTree t;
    std::vector<int> used;
    std::function<int(int)> build = [&](int depth) -> int {
        int id = static_cast<int>(t.nodes.size());
        t.nodes.emplace_back();
        bool must_leaf = depth >= max_depth ||
                         static_cast<int>(used.size()) >= inst.n;
        if (must_leaf || (depth > 0 && rng() % 3 == 0))
            return id;
        int e;
        do
            e = 1 + static_cast<int>(rng() % inst.n);
        while (std::find(used.begin(), used.end(), e) != used.end());
        t.nodes[id].elt = e;
        used.push_back(e);
        std::vector<int> kids;
        for (size_t j = 0; j < inst.dist(e).values.size(); ++j)
            kids.push_back(build(depth + 1));
        t.nodes[id].kids = std::move(kids);
        used.pop_back();
        return id;
    };
    build(0);
    t.finalize();
    return t;
}

SuiteReport suite_c2(const json &cfg)
{
    SuiteReport rep{"C.2", {}};
    int seeds = cfg.value("seeds", 100);
    uint64_t seed0 = cfg.value("seed0", static_cast<uint64_t>(1));
    for (int s = 0; s < seeds; ++s)
    {
        uint64_t seed = seed0 + static_cast<uint64_t>(s);
        std::mt19937_64 rng(seed);
        int n = 2 + static_cast<int>(rng() % 4);
        Instance inst = random_general_instance(n, 4, rng);
        DecisionTree t = random_general_tree(inst, 3, rng);
        std::string id = "seed" + std::to_string(seed);
        try
        {
            Bernoullized b = bernoullize(t, inst);
            bool chain = chain_probabilities_exact(b);
            bool marg = leaf_marginals_exact(b, t);
            // induced norm on an indicator recovers the single-coordinate value
            bool ind = true;
            Norm f = gen_random_topk(n, {1});
            Norm fp = induced_norm(f, b, false);
            for (auto &[key, eid] : b.elt_id)
            {
                if (evaluate_set(fp, {eid}) != b.value.at(eid))
                    ind = false;
            }
            rep.rows.push_back({id, chain && marg && ind,
                                std::string(chain ? "" : "chain probs differ; ") +
                                    (marg ? "" : "marginals differ; ") +
                                    (ind ? "exact" : "indicator mismatch")});
        }
        catch (const InputError &ex)
        {
            rep.rows.push_back({id, true, std::string("skipped: ") + ex.what()});
        }
    }
    return rep;
}

} // namespace

SuiteReport run_suite(const std::string &suite, const json &config)
{
    if (suite == "3.9")
        return suite_3_9(config);
    if (suite == "3.10")
        return suite_3_10(config);
    if (suite == "3.11")
        return suite_3_11(config);
    if (suite == "3.13")
        return suite_3_13(config);
    if (suite == "3.12/4.2")
        return suite_induction(config);
    if (suite == "4.4")
        return suite_4_4(config);
    if (suite == "5.3")
        return suite_5_3(config);
    if (suite == "5.4")
        return suite_5_4(config);
    if (suite == "B.1")
        return suite_b1(config);
    if (suite == "C.2")
        return suite_c2(config);
    throw InputError("unknown suite '" + suite + "'");
}

json log_bound_report(int h, const Rat &lambda)
{
    auto art = gen_complete_tree(h, lambda);
    auto ap = full_aprime(*art.tree);
    Norm fxos = build_special_xos(*art.tree, ap);
    int n = art.instance.n;
    Rat e_aprime = lambda * h;
    double logn = std::log2(static_cast<double>(n));
    Rat nadp = nadp_exact(*art.tree, art.instance, fxos).value;
    double bound = to_double(e_aprime) / (200.0 * logn);
    json j;
    j["h"] = h;
    j["lambda"] = rat_str(lambda);
    j["n"] = n;
    j["K3"] = preset_k3(n);
    j["expected_aprime_size"] = to_double(e_aprime);
    j["size_threshold"] = 200.0 * logn;
    j["threshold_met"] = to_double(e_aprime) >= 200.0 * logn;
    j["nadp_fxos"] = to_double(nadp);
    j["one_sided_bound"] = bound;
    j["holds"] = to_double(nadp) >= bound;
    return j;
}

json gap_growth_report(const std::vector<int> &hs,
                       const std::vector<Rat> &lambdas)
{
    json rows = json::array();
    for (int h : hs)
        for (const Rat &lambda : lambdas)
        {
            auto art = gen_complete_tree(h, lambda);
            Rat adap = adap_exact(*art.tree, art.instance, *art.norm).value;
            Rat nadp =
                nadp_exact(*art.tree, art.instance, *art.norm, true).value;
            json r;
            r["h"] = h;
            r["lambda"] = rat_str(lambda);
            r["adap"] = to_double(adap);
            r["nadp_restricted"] = to_double(nadp);
            r["tree_gap"] = to_double(adap / nadp);
            rows.push_back(std::move(r));
        }
    json j;
    j["family"] = "complete-tree";
    j["rows"] = std::move(rows);
    return j;
}

} // namespace probelab
