#include "reductions.hpp"

#include <boost/multiprecision/integer.hpp>
#include <functional>

namespace probelab {

bool outcome_is_large(const Norm &f, int n, int elt, const Rat &x,
                      const Rat &lambda, const Rat &opt)
{
    std::vector<Rat> v(n, Rat(0));
    v.at(elt - 1) = x;
    return evaluate(f, v) >= lambda * opt;
}

Decomposition decompose_large_small(const Instance &inst, const Norm &f,
                                    const Rat &opt_value, const Rat &lambda)
{
    if (lambda <= 0)
        throw InputError("decompose_large_small requires lambda > 0");
    if (opt_value <= 0)
        throw InputError("decompose_large_small requires opt_value > 0");
    Decomposition dec;
    dec.lambda = lambda;
    for (int i = 1; i <= inst.n; ++i)
    {
        const auto &d = inst.dist(i);
        std::vector<Rat> yv, zv;
        std::vector<bool> flags;
        for (size_t j = 0; j < d.values.size(); ++j)
        {
            bool lg = d.values[j] > 0 &&
                      outcome_is_large(f, inst.n, i, d.values[j], lambda,
                                       opt_value);
            flags.push_back(lg);
            yv.push_back(lg ? d.values[j] : Rat(0));
            zv.push_back(lg ? Rat(0) : d.values[j]);
        }
        dec.Y.push_back(make_dist(yv, d.probs));
        dec.Z.push_back(make_dist(zv, d.probs));
        dec.large.push_back(std::move(flags));
    }
    return dec;
}

DecisionTree truncate_at_first_large(const DecisionTree &t, const Instance &inst,
                                     const Norm &f, const Rat &lambda,
                                     const Rat &opt_value)
{
    auto violations = validate_tree(t, inst);
    if (!violations.empty())
        throw InputError("truncate_at_first_large: invalid tree: " +
                         violations.front());
    DecisionTree out;
    std::function<int(int)> rec = [&](int u) -> int {
        int id = static_cast<int>(out.nodes.size());
        out.nodes.emplace_back();
        if (t.is_leaf(u))
            return id;
        int e = t.elt(u);
        out.nodes[id].elt = e;
        const auto &d = inst.dist(e);
        std::vector<int> kids;
        for (size_t j = 0; j < t.nodes[u].kids.size(); ++j)
        {
            if (d.values[j] > 0 &&
                outcome_is_large(f, inst.n, e, d.values[j], lambda, opt_value))
            {
                // stop probing: the large outcome is kept, the subtree is not
                int leaf = static_cast<int>(out.nodes.size());
                out.nodes.emplace_back();
                kids.push_back(leaf);
            }
            else
                kids.push_back(rec(t.nodes[u].kids[j]));
        }
        out.nodes[id].kids = std::move(kids);
        return id;
    };
    rec(t.root);
    out.root = 0;
    out.finalize();
    return out;
}

// enumerate full outcome realizations and hand each (walked path, values,
// probability) to the visitor
static void for_each_realization(
    const DecisionTree &t, const Instance &inst,
    const std::function<void(const std::vector<int> &, const std::vector<Rat> &,
                             const Rat &)> &visit)
{
    long long count = 1;
    for (int i = 1; i <= inst.n; ++i)
    {
        count *= static_cast<long long>(inst.dist(i).values.size());
        if (count > (1LL << 22))
            throw CapError("realization space too large for exhaustive "
                           "enumeration");
    }
    std::vector<Rat> vals(inst.n, Rat(0));
    std::vector<int> idx(inst.n, 0);
    std::function<void(int, Rat)> rec = [&](int i, Rat pr) {
        if (i > inst.n)
        {
            // walk the tree under this realization
            std::vector<int> probed;
            int u = t.root;
            while (!t.is_leaf(u))
            {
                probed.push_back(t.elt(u));
                u = t.nodes[u].kids[idx[t.elt(u) - 1]];
            }
            visit(probed, vals, pr);
            return;
        }
        const auto &d = inst.dist(i);
        for (size_t j = 0; j < d.values.size(); ++j)
        {
            if (d.probs[j] == 0)
                continue;
            idx[i - 1] = static_cast<int>(j);
            vals[i - 1] = d.values[j];
            rec(i + 1, pr * d.probs[j]);
        }
        vals[i - 1] = 0;
    };
    rec(1, Rat(1));
}

LargeFilterReport large_filter_quantities(const DecisionTree &t,
                                          const Instance &inst, const Norm &f,
                                          const Rat &lambda, const Rat &opt_value)
{
    auto violations = validate_tree(t, inst);
    if (!violations.empty())
        throw InputError("large_filter_quantities: invalid tree: " +
                         violations.front());
    LargeFilterReport rep;
    rep.opt_prime = rep.opt_zero = rep.e_f_y = 0;
    for_each_realization(
        t, inst,
        [&](const std::vector<int> &probed, const std::vector<Rat> &vals,
            const Rat &pr) {
            std::vector<Rat> y(inst.n, Rat(0));
            size_t first_large = probed.size();
            for (size_t i = 0; i < probed.size(); ++i)
            {
                int e = probed[i];
                if (vals[e - 1] > 0 &&
                    outcome_is_large(f, inst.n, e, vals[e - 1], lambda,
                                     opt_value))
                {
                    y[e - 1] = vals[e - 1];
                    if (first_large == probed.size())
                        first_large = i;
                }
            }
            rep.e_f_y += pr * evaluate(f, y);
            std::vector<Rat> y1(inst.n, Rat(0)), y2(inst.n, Rat(0));
            for (size_t i = 0; i < probed.size(); ++i)
                (i <= first_large ? y1 : y2)[probed[i] - 1] =
                    y[probed[i] - 1];
            rep.opt_prime += pr * evaluate(f, y1);
            rep.opt_zero += pr * evaluate(f, y2);
        });
    rep.subadditive_ok = rep.opt_prime + rep.opt_zero >= rep.e_f_y;
    rep.filter_ok = lambda * rep.opt_zero <= rep.opt_prime;
    return rep;
}

Rat nonadaptive_simulation(const DecisionTree &t, const Instance &inst,
                           const Norm &f, const Rat &lambda, const Rat &opt_value)
{
    auto violations = validate_tree(t, inst);
    if (!violations.empty())
        throw InputError("nonadaptive_simulation: invalid tree: " +
                         violations.front());
    // small-conditioned outcome probabilities per element on the tree
    std::map<int, std::vector<Rat>> cond;
    for (size_t u = 0; u < t.nodes.size(); ++u)
    {
        if (t.is_leaf(static_cast<int>(u)))
            continue;
        int e = t.elt(static_cast<int>(u));
        if (cond.count(e))
            continue;
        const auto &d = inst.dist(e);
        Rat small_mass = 0;
        std::vector<Rat> probs(d.values.size(), Rat(0));
        for (size_t j = 0; j < d.values.size(); ++j)
        {
            bool lg = d.values[j] > 0 &&
                      outcome_is_large(f, inst.n, e, d.values[j], lambda,
                                       opt_value);
            if (!lg)
            {
                small_mass += d.probs[j];
                probs[j] = d.probs[j];
            }
        }
        if (small_mass == 0)
            throw InputError("element " + std::to_string(e) +
                             " has no small-outcome mass; the conditional "
                             "sampling strategy is undefined");
        for (auto &p : probs)
            p /= small_mass;
        cond[e] = std::move(probs);
    }
    // walk the tree under the fake conditioned outcomes; each leaf's path is
    // then probed for real
    Rat total = 0;
    std::function<void(int, Rat, std::vector<int> &)> rec =
        [&](int u, Rat pr, std::vector<int> &probed) {
            if (pr == 0)
                return;
            if (t.is_leaf(u))
            {
                total += pr * expected_reward(inst, f, probed);
                return;
            }
            int e = t.elt(u);
            const auto &probs = cond.at(e);
            probed.push_back(e);
            for (size_t j = 0; j < probs.size(); ++j)
                rec(t.nodes[u].kids[j], pr * probs[j], probed);
            probed.pop_back();
        };
    std::vector<int> probed;
    rec(t.root, Rat(1), probed);
    return total;
}

Instance geometric_round(const Instance &inst, const Norm &f, int r)
{
    if (r < 1)
        throw InputError("geometric_round requires r >= 1");
    Instance out = inst;
    Rat floor_val = Rat(1, 4 * static_cast<long>(r));
    for (int i = 1; i <= inst.n; ++i)
    {
        std::vector<Rat> unit(inst.n, Rat(0));
        unit[i - 1] = 1;
        Rat fv = evaluate(f, unit);
        if (fv == 0)
            throw InputError("geometric_round: norm vanishes on element " +
                             std::to_string(i));
        const auto &d = inst.dist(i);
        std::vector<Rat> values;
        for (const Rat &x : d.values)
        {
            if (x == 0)
            {
                values.push_back(x);
                continue;
            }
            Rat fx = x * fv; // f(x e_i) by homogeneity
            if (fx > 1)
                throw InputError("geometric_round: outcome norm value above 1 "
                                 "on element " + std::to_string(i));
            Rat target = rat_pow2(floor_log2_strict(fx));
            values.push_back(target < floor_val ? Rat(0) : x * target / fx);
        }
        out.elements[i - 1] = make_dist(values, d.probs);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Bernoulli-ization

Bernoullized bernoullize(const DecisionTree &t, const Instance &inst)
{
    auto violations = validate_tree(t, inst);
    if (!violations.empty())
        throw InputError("bernoullize: invalid tree: " + violations.front());
    Bernoullized b;
    b.prepped = inst;

    // per element: support indices kept in the chain (nonzero value and
    // nonzero probability), ascending
    std::vector<std::vector<size_t>> kept(inst.n);
    for (int i = 1; i <= inst.n; ++i)
    {
        const auto &d = inst.dist(i);
        for (size_t j = 0; j < d.values.size(); ++j)
        {
            if (d.values[j] == 0)
                continue;
            if (d.probs[j] == 0)
            {
                if (j + 1 == d.values.size())
                    throw InputError("bernoullize: element " +
                                     std::to_string(i) +
                                     " has a zero-probability top outcome");
                continue; // dropped zero-probability support point
            }
            kept[i - 1].push_back(j);
        }
    }

    b.binst.n = 0;
    for (int i = 1; i <= inst.n; ++i)
    {
        const auto &d = inst.dist(i);
        Rat below = d.values[0] == 0 ? d.probs[0] : Rat(0);
        for (size_t j : kept[i - 1])
        {
            Rat q = d.probs[j] / (below + d.probs[j]);
            below += d.probs[j];
            int id = ++b.binst.n;
            b.elt_id[{i, static_cast<int>(j)}] = id;
            b.value[id] = d.values[j];
            b.binst.elements.push_back(make_dist({Rat(0), Rat(1)}, {1 - q, q}));
        }
    }

    // rebuild the tree: each probe of element i becomes a top-down chain over
    // its kept outcomes, active arcs leaving to the matching subtree
    DecisionTree out;
    std::function<int(int)> tr = [&](int u) -> int {
        if (t.is_leaf(u))
        {
            int id = static_cast<int>(out.nodes.size());
            out.nodes.emplace_back();
            b.leaf_map[id] = u;
            return id;
        }
        int i = t.elt(u);
        const auto &ks = kept[i - 1];
        const auto &d = inst.dist(i);
        if (ks.empty()) // element is deterministically zero
            return tr(t.nodes[u].kids[0]);
        std::function<int(int)> chain = [&](int pos) -> int {
            size_t j = ks[pos];
            int id = static_cast<int>(out.nodes.size());
            out.nodes.emplace_back();
            out.nodes[id].elt = b.elt_id.at({i, static_cast<int>(j)});
            int yes = tr(t.nodes[u].kids[j]);
            int no;
            if (pos > 0)
                no = chain(pos - 1);
            else if (d.values[0] == 0)
                no = tr(t.nodes[u].kids[0]);
            else
            {
                no = static_cast<int>(out.nodes.size()); // unreachable
                out.nodes.emplace_back();
            }
            out.nodes[id].kids = {no, yes};
            return id;
        };
        return chain(static_cast<int>(ks.size()) - 1);
    };
    tr(t.root);
    out.root = 0;
    out.finalize();

    std::vector<std::vector<int>> seqs;
    std::function<void(int, std::vector<int> &)> collect =
        [&](int u, std::vector<int> &seq) {
            if (out.is_leaf(u))
            {
                seqs.push_back(seq);
                return;
            }
            seq.push_back(out.elt(u));
            for (int kid : out.nodes[u].kids)
                collect(kid, seq);
            seq.pop_back();
        };
    std::vector<int> seq;
    collect(out.root, seq);
    b.binst.constraint = FeasibilityConstraint::explicit_sequences(std::move(seqs));
    b.binst.validate();
    b.ttree = std::move(out);
    return b;
}

bool chain_probabilities_exact(const Bernoullized &b)
{
    for (int i = 1; i <= b.prepped.n; ++i)
    {
        const auto &d = b.prepped.dist(i);
        Rat all_inactive = 1;
        for (size_t j = 0; j < d.values.size(); ++j)
        {
            auto it = b.elt_id.find({i, static_cast<int>(j)});
            if (it == b.elt_id.end())
                continue;
            Rat q = b.binst.dist(it->second).bern_p();
            // e_{i,j} active, every higher e_{i,j'} inactive
            Rat composite = q;
            for (size_t j2 = j + 1; j2 < d.values.size(); ++j2)
            {
                auto it2 = b.elt_id.find({i, static_cast<int>(j2)});
                if (it2 != b.elt_id.end())
                    composite *= 1 - b.binst.dist(it2->second).bern_p();
            }
            if (composite != d.probs[j])
                return false;
            all_inactive *= 1 - q;
        }
        // the all-inactive branch carries exactly the zero-outcome mass
        Rat zero_mass = d.values[0] == 0 ? d.probs[0] : Rat(0);
        bool has_chain = false;
        for (size_t j = 0; j < d.values.size(); ++j)
            if (b.elt_id.count({i, static_cast<int>(j)}))
                has_chain = true;
        if (has_chain && all_inactive != zero_mass)
            return false;
    }
    return true;
}

bool leaf_marginals_exact(const Bernoullized &b, const DecisionTree &t)
{
    std::map<int, Rat> marginal;
    for (auto &[leaf, pr] : leaf_distribution(b.ttree, b.binst))
    {
        auto it = b.leaf_map.find(leaf);
        if (it == b.leaf_map.end())
        {
            if (pr != 0)
                return false; // unreachable filler leaves carry no mass
            continue;
        }
        marginal[it->second] += pr;
    }
    for (auto &[leaf, pr] : leaf_distribution(t, b.prepped))
    {
        auto it = marginal.find(leaf);
        Rat got = it == marginal.end() ? Rat(0) : it->second;
        if (got != pr)
            return false;
    }
    return true;
}

Norm induced_norm(const Norm &f, const Bernoullized &b, bool symmetric)
{
    if (f.dim != b.prepped.n)
        throw InputError("induced_norm: base norm dimension mismatch");
    if (symmetric && !std::holds_alternative<SymmetricNorm>(f.v))
        throw InputError("induced_norm: symmetric variant requires a "
                         "symmetric base norm");
    InducedNorm g;
    g.base = std::make_shared<Norm>(f);
    g.top_n = symmetric;
    g.coeffs.assign(b.prepped.n, {});
    for (auto &[key, id] : b.elt_id)
        g.coeffs[key.first - 1].push_back(b.value.at(id));
    Norm out;
    out.dim = b.binst.n;
    out.v = std::move(g);
    return out;
}

XosPipelineResult xos_pipeline(const DecisionTree &t, const Instance &inst,
                               const Norm &f, int r)
{
    auto buckets = round_and_bucket(f, t, r);
    auto dist = leaf_distribution(t, inst);
    std::map<int, Rat> pi;
    for (auto &[leaf, pr] : dist)
        pi[leaf] = pr;
    int jmax = static_cast<int>(boost::multiprecision::msb(BigInt(r))) + 1;
    int j0 = 1;
    Rat best = -1;
    for (int j = 1; j <= jmax; ++j)
    {
        Rat mass = 0;
        for (const auto &lb : buckets)
        {
            auto it = lb.bucket.find(j);
            if (it != lb.bucket.end())
                mass += pi[lb.leaf] * static_cast<long>(it->second.size());
        }
        Rat score = mass / rat_pow2(j - 1);
        if (score > best)
        {
            best = score;
            j0 = j;
        }
    }
    XosPipelineResult res;
    res.j0 = j0;
    for (const auto &lb : buckets)
    {
        auto it = lb.bucket.find(j0);
        res.aprime[lb.leaf] =
            it != lb.bucket.end() ? it->second : std::vector<int>{};
    }
    res.fxos = build_special_xos(t, res.aprime);
    return res;
}

} // namespace probelab
