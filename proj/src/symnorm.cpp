#include "symnorm.hpp"

#include <cmath>
#include <functional>
#include <random>

namespace probelab {

static int class_of(const Rat &c)
{
    // c is an exact negative power of 4 after rounding
    Rat v = Rat(1, 4);
    int k = 1;
    while (v != c)
    {
        v /= 4;
        if (++k > 512)
            throw std::logic_error("value is not a negative power of 4");
    }
    return k;
}

SymState preprocess(const Instance &inst, const Norm &f, int small_k)
{
    inst.validate();
    if (!inst.all_bernoulli())
        throw InputError("symmetric pipeline requires Bernoulli values");
    if (!std::holds_alternative<SymmetricNorm>(f.v))
        throw InputError("symmetric pipeline requires a symmetric norm");

    SymState st;
    std::vector<Rat> unit(inst.n, Rat(0));
    unit[0] = 1;
    Rat fu = evaluate(f, unit);
    if (fu == 0)
        throw InputError("symmetric pipeline: norm vanishes on unit vectors");
    st.f = f;
    for (auto &profile : std::get<SymmetricNorm>(st.f.v).profiles)
        for (auto &w : profile)
            w /= fu;
    st.scale_f = fu;

    Rat opt = optimal_adaptive(inst, st.f).value;
    if (opt == 0)
        throw InputError("symmetric pipeline: zero adaptive optimum");
    st.scale_v = opt;

    st.inst = inst;
    Rat small = rat_pow2(-2 * small_k); // 4^-small_k
    for (auto &el : st.inst.elements)
    {
        Rat c = el.bern_c() / opt;
        if (c >= small)
            throw InputError("symmetric pipeline: element value is not "
                             "4^-" + std::to_string(small_k) + "-small after "
                             "normalization");
        // round down to the largest negative power of 4 strictly below
        el = make_dist({Rat(0), rat_pow4_neg(pow4_below(c))},
                       {el.probs[0], el.probs[1]});
    }

    auto oa = optimal_adaptive(st.inst, st.f);
    st.opt_tree = oa.tree;
    st.opt1 = oa.value;
    st.opt1_ok = st.opt1 >= Rat(1, 4);

    // stop before any probe that would start from reward >= 1
    std::vector<Rat> vals(st.inst.n, Rat(0));
    DecisionTree trunc;
    std::function<int(int)> rec = [&](int u) -> int {
        int id = static_cast<int>(trunc.nodes.size());
        trunc.nodes.emplace_back();
        if (st.opt_tree.is_leaf(u) || evaluate(st.f, vals) >= 1)
            return id;
        int e = st.opt_tree.elt(u);
        trunc.nodes[id].elt = e;
        int no = rec(st.opt_tree.nodes[u].kids[0]);
        vals[e - 1] = st.inst.dist(e).bern_c();
        int yes = rec(st.opt_tree.nodes[u].kids[1]);
        vals[e - 1] = 0;
        trunc.nodes[id].kids = {no, yes};
        return id;
    };
    rec(st.opt_tree.root);
    trunc.root = 0;
    trunc.finalize();
    st.trunc_tree = std::move(trunc);

    st.trunc_adap = adap_exact(st.trunc_tree, st.inst, st.f).value;
    st.trunc_adap_ok = st.trunc_adap >= Rat(1, 8);

    st.leaf_cap_ok = true;
    for (int leaf : st.trunc_tree.leaves())
    {
        PathInfo pi = path_info(st.trunc_tree, leaf);
        std::vector<int> elts;
        for (int u : pi.A)
            elts.push_back(st.trunc_tree.elt(u));
        std::vector<Rat> cs(st.inst.n, Rat(0));
        for (int e : elts)
            cs[e - 1] = st.inst.dist(e).bern_c();
        if (evaluate_subset(st.f, elts, cs) > 2)
            st.leaf_cap_ok = false;
    }
    return st;
}

static std::vector<Rat> element_values(const Instance &inst)
{
    std::vector<Rat> cs(inst.n, Rat(0));
    for (int e = 1; e <= inst.n; ++e)
        cs[e - 1] = inst.dist(e).bern_c();
    return cs;
}

void classify(SymState &st, const Rat &theta)
{
    if (theta <= 0)
        throw InputError("classify requires theta > 0");
    st.theta = theta;
    st.node_class.clear();
    st.leaves.clear();
    for (size_t u = 0; u < st.trunc_tree.nodes.size(); ++u)
        if (!st.trunc_tree.is_leaf(static_cast<int>(u)))
            st.node_class[static_cast<int>(u)] =
                class_of(st.inst.dist(st.trunc_tree.elt(static_cast<int>(u)))
                             .bern_c());

    for (int leaf : st.trunc_tree.leaves())
    {
        PathInfo pi = path_info(st.trunc_tree, leaf);
        LeafClasses lc;
        lc.leaf = leaf;
        for (int u : pi.A)
            lc.active_by_class[st.node_class.at(u)].push_back(u);
        for (auto &[k, nodes] : lc.active_by_class)
        {
            if (Rat(static_cast<long>(nodes.size())) < theta * rat_pow2(k))
                continue;
            lc.big.insert(k);
            lc.D.insert(lc.D.end(), nodes.begin(), nodes.end());
            Rat path_mass = 0;
            for (int u : pi.P)
                if (!st.trunc_tree.is_leaf(u) && st.node_class.at(u) == k)
                    path_mass += st.inst.dist(st.trunc_tree.elt(u)).bern_p();
            if (path_mass <= Rat(static_cast<long>(nodes.size()), 8))
            {
                lc.bad.insert(k);
                lc.G.insert(lc.G.end(), nodes.begin(), nodes.end());
            }
        }
        st.leaves.push_back(std::move(lc));
    }
}

Eq4Report reward_in_big_classes_check(const SymState &st)
{
    Eq4Report rep;
    rep.lhs = 0;
    auto cs = element_values(st.inst);
    std::map<int, Rat> pi;
    for (auto &[leaf, pr] : leaf_distribution(st.trunc_tree, st.inst))
        pi[leaf] = pr;
    std::set<int> occurring;
    for (auto &[u, k] : st.node_class)
        occurring.insert(k);
    for (const auto &lc : st.leaves)
    {
        std::vector<int> elts;
        for (int u : lc.D)
            elts.push_back(st.trunc_tree.elt(u));
        rep.lhs += pi[lc.leaf] * evaluate_subset(st.f, elts, cs);
    }
    Rat loss = 0;
    for (int k : occurring)
        loss += st.theta * rat_pow2(k) * rat_pow4_neg(k);
    rep.rhs = st.trunc_adap - loss;
    rep.pass = rep.lhs >= rep.rhs;
    return rep;
}

BadLeafTailReport bad_leaf_tail_check(const DecisionTree &t, const Instance &inst,
                                      const std::set<int> &T_nodes,
                                      const std::set<int> &S_leaves, int h,
                                      double q)
{
    BadLeafTailReport rep;
    for (int u : T_nodes)
        if (t.is_leaf(u))
        {
            rep.preconditions_ok = false;
            rep.precondition_violations.push_back("T contains leaf " +
                                                  std::to_string(u));
        }
    rep.prob = 0;
    for (auto &[leaf, pr] : leaf_distribution(t, inst))
    {
        if (!S_leaves.count(leaf))
            continue;
        PathInfo pi = path_info(t, leaf);
        int active = 0;
        Rat mass = 0;
        for (int u : pi.A)
            if (T_nodes.count(u))
                ++active;
        for (int u : pi.P)
            if (!t.is_leaf(u) && T_nodes.count(u))
                mass += inst.dist(t.elt(u)).bern_p();
        if (active < h || Rat(active) < 8 * mass + rat_parse(std::to_string(q)))
        {
            rep.preconditions_ok = false;
            rep.precondition_violations.push_back(
                "leaf " + std::to_string(leaf) +
                " violates the activation-mass precondition");
        }
        rep.prob += pr;
    }
    rep.bound = std::exp(-static_cast<double>(h) - q);
    rep.pass = to_double(rep.prob) <= rep.bound + 1e-12;
    return rep;
}

BadMassReport bad_mass_check(const SymState &st)
{
    BadMassReport rep;
    rep.mass = 0;
    rep.literal_thresholds = st.theta == 1;
    auto cs = element_values(st.inst);
    std::map<int, Rat> pi;
    for (auto &[leaf, pr] : leaf_distribution(st.trunc_tree, st.inst))
        pi[leaf] = pr;
    std::set<int> bad_classes;
    for (const auto &lc : st.leaves)
    {
        std::vector<int> elts;
        for (int u : lc.G)
            elts.push_back(st.trunc_tree.elt(u));
        rep.mass += pi[lc.leaf] * evaluate_subset(st.f, elts, cs);
        bad_classes.insert(lc.bad.begin(), lc.bad.end());
    }
    rep.budget = 0;
    for (int k : bad_classes)
        rep.budget += 2 * std::exp2(-std::exp2(static_cast<double>(k)));
    rep.pass = to_double(rep.mass) <= rep.budget + 1e-12;
    return rep;
}

ChernoffPathReport chernoff_path_check(const SymState &st, int leaf,
                                       long long samples, uint64_t seed)
{
    const LeafClasses *lc = nullptr;
    for (const auto &c : st.leaves)
        if (c.leaf == leaf)
            lc = &c;
    if (!lc)
        throw InputError("chernoff_path_check: unknown truncated-tree leaf");
    auto cs = element_values(st.inst);

    // elements probed on the path whose class is big for this leaf
    PathInfo pi = path_info(st.trunc_tree, leaf);
    std::vector<int> cand;
    for (int u : pi.P)
        if (!st.trunc_tree.is_leaf(u) && lc->big.count(st.node_class.at(u)))
            cand.push_back(st.trunc_tree.elt(u));

    ChernoffPathReport rep;
    std::set<int> gset;
    for (int u : lc->G)
        gset.insert(u);
    std::vector<int> keep;
    for (int u : lc->D)
        if (!gset.count(u))
            keep.push_back(st.trunc_tree.elt(u));
    rep.rhs64 = evaluate_subset(st.f, keep, cs) / 64;

    if (cand.size() <= 20)
    {
        Rat lhs = 0;
        size_t count = size_t(1) << cand.size();
        for (size_t mask = 0; mask < count; ++mask)
        {
            Rat pr = 1;
            std::vector<int> S;
            for (size_t i = 0; i < cand.size(); ++i)
            {
                Rat p = st.inst.dist(cand[i]).bern_p();
                if (mask & (size_t(1) << i))
                {
                    S.push_back(cand[i]);
                    pr *= p;
                }
                else
                    pr *= 1 - p;
            }
            lhs += pr * evaluate_subset(st.f, S, cs);
        }
        rep.lhs = lhs;
        rep.lhs_d = to_double(lhs);
        rep.pass = lhs >= rep.rhs64;
        return rep;
    }
    if (samples < 1)
        throw CapError("chernoff_path_check: path too long for exact "
                       "enumeration; pass a sample budget");
    std::mt19937_64 rng(seed);
    double mean = 0, m2 = 0;
    for (long long k = 1; k <= samples; ++k)
    {
        std::vector<int> S;
        for (int e : cand)
            if (static_cast<double>(rng() >> 11) * 0x1.0p-53 <
                to_double(st.inst.dist(e).bern_p()))
                S.push_back(e);
        double x = to_double(evaluate_subset(st.f, S, cs));
        double delta = x - mean;
        mean += delta / static_cast<double>(k);
        m2 += delta * (x - mean);
    }
    rep.exact = false;
    rep.lhs_d = mean;
    rep.stderr_ = samples > 1 ? std::sqrt(m2 / static_cast<double>(samples - 1) /
                                          static_cast<double>(samples))
                              : 0.0;
    rep.pass = mean + 4 * rep.stderr_ >= to_double(rep.rhs64);
    return rep;
}

SubsequenceReport subsequence_check(const Instance &inst, const Norm &f)
{
    auto oa = optimal_adaptive(inst, f);
    SubsequenceReport rep;
    rep.opt = oa.value;
    const DecisionTree &t = oa.tree;

    std::map<size_t, Rat> post; // t -> E[f of values collected after t probes]
    std::vector<Rat> vals(inst.n, Rat(0));
    std::vector<std::pair<int, Rat>> collected; // (element, value) in order
    std::function<void(int, Rat)> rec = [&](int u, Rat pr) {
        if (t.is_leaf(u))
        {
            for (size_t cut = 0; cut <= collected.size(); ++cut)
            {
                std::vector<Rat> tail(inst.n, Rat(0));
                for (size_t i = cut; i < collected.size(); ++i)
                    tail[collected[i].first - 1] = collected[i].second;
                post[cut] += pr * evaluate(f, tail);
            }
            return;
        }
        int e = t.elt(u);
        const auto &d = inst.dist(e);
        for (size_t j = 0; j < d.values.size(); ++j)
        {
            collected.emplace_back(e, d.values[j]);
            rec(t.nodes[u].kids[j], pr * d.probs[j]);
            collected.pop_back();
        }
    };
    rec(t.root, Rat(1));

    rep.worst = 0;
    for (auto &[cut, v] : post)
        rep.worst = std::max(rep.worst, v);
    rep.pass = rep.worst <= rep.opt;
    return rep;
}

ConstantGapReport constant_gap_check(const Instance &inst, const Norm &f)
{
    ConstantGapReport rep;
    rep.gaps = gap_report(inst, f);
    rep.gap_ok = rep.gaps.gap <= 2050;
    try
    {
        SymState st = preprocess(inst, f);
        classify(st);
        rep.premises_hold = true;
        rep.trunc_nadp = nadp_exact(st.trunc_tree, st.inst, st.f).value;
        rep.nadp_ok = rep.trunc_nadp >= Rat(1, 1025);
        rep.eq4 = reward_in_big_classes_check(st);
    }
    catch (const InputError &ex)
    {
        rep.premise_note = ex.what();
    }
    return rep;
}

} // namespace probelab
