#include "engine.hpp"

#include "caps.hpp"

#include <functional>
#include <map>
#include <random>

namespace probelab {

json EvalResult::to_json() const
{
    json j;
    switch (mode)
    {
    case EvalMode::ExactRational:
        j["mode"] = "exact-rational";
        break;
    case EvalMode::ExactFloat:
        j["mode"] = "exact-float";
        break;
    case EvalMode::MonteCarlo:
        j["mode"] = "monte-carlo";
        break;
    }
    if (mode != EvalMode::MonteCarlo)
        j["value"] = rat_to_json(value);
    j["value_double"] = value_d;
    if (mode == EvalMode::MonteCarlo)
    {
        j["samples"] = samples;
        j["seed"] = seed;
        j["stderr"] = stderr_;
    }
    return j;
}

static void require_valid(const DecisionTree &t, const Instance &inst)
{
    auto v = validate_tree(t, inst);
    if (!v.empty())
        throw InputError("invalid tree: " + v.front());
}

EvalResult adap_exact(const DecisionTree &t, const Instance &inst, const Norm &f)
{
    require_valid(t, inst);
    Rat total = 0;
    if (auto *lin = std::get_if<LinearNorm>(&f.v))
    {
        // linear norms accumulate along arcs; no per-leaf evaluation needed
        std::function<void(int, Rat, Rat)> lrec = [&](int u, Rat pr, Rat acc) {
            if (t.is_leaf(u))
            {
                total += pr * acc;
                return;
            }
            const auto &d = inst.dist(t.elt(u));
            for (size_t j = 0; j < t.nodes[u].kids.size(); ++j)
                lrec(t.nodes[u].kids[j], pr * d.probs[j],
                     acc + lin->w[t.elt(u) - 1] * d.values[j]);
        };
        lrec(t.root, Rat(1), Rat(0));
        EvalResult res;
        res.value = total;
        res.value_d = to_double(total);
        return res;
    }
    std::vector<Rat> vals(inst.n, Rat(0));
    std::function<void(int, Rat)> rec = [&](int u, Rat pr) {
        if (t.is_leaf(u))
        {
            total += pr * evaluate(f, vals);
            return;
        }
        const auto &d = inst.dist(t.elt(u));
        for (size_t j = 0; j < t.nodes[u].kids.size(); ++j)
        {
            vals[t.elt(u) - 1] = d.values[j];
            rec(t.nodes[u].kids[j], pr * d.probs[j]);
        }
        vals[t.elt(u) - 1] = 0;
    };
    rec(t.root, Rat(1));
    EvalResult res;
    res.value = total;
    res.value_d = to_double(total);
    return res;
}

Rat expected_reward(const Instance &inst, const Norm &f,
                    const std::vector<int> &elems)
{
    // linear norms split over coordinates; skip the product space
    if (auto *lin = std::get_if<LinearNorm>(&f.v))
    {
        Rat s = 0;
        for (int e : elems)
            s += lin->w[e - 1] * inst.dist(e).expectation();
        return s;
    }
    long long count = 1;
    for (int e : elems)
    {
        count *= static_cast<long long>(inst.dist(e).values.size());
        if (count > (1LL << 22))
            throw CapError("nadp_exact: outcome product space too large; "
                           "use nadp_mc");
    }
    Rat total = 0;
    std::vector<Rat> vals(inst.n, Rat(0));
    std::function<void(size_t, Rat)> rec = [&](size_t i, Rat pr) {
        if (i == elems.size())
        {
            total += pr * evaluate(f, vals);
            return;
        }
        const auto &d = inst.dist(elems[i]);
        for (size_t j = 0; j < d.values.size(); ++j)
        {
            vals[elems[i] - 1] = d.values[j];
            rec(i + 1, pr * d.probs[j]);
        }
        vals[elems[i] - 1] = 0;
    };
    rec(0, Rat(1));
    return total;
}

static std::vector<int> path_elements(const DecisionTree &t, const PathInfo &pi,
                                      bool restrict_active)
{
    std::vector<int> elems;
    const auto &src = restrict_active ? pi.A : pi.P;
    for (int u : src)
        if (!t.is_leaf(u))
            elems.push_back(t.elt(u));
    return elems;
}

EvalResult nadp_exact(const DecisionTree &t, const Instance &inst, const Norm &f,
                      bool restrict_active)
{
    require_valid(t, inst);
    Rat total = 0;
    for (auto &[leaf, pr] : leaf_distribution(t, inst))
    {
        PathInfo pi = path_info(t, leaf);
        if (static_cast<int>(pi.P.size()) - 1 > caps().path_len &&
            !std::holds_alternative<LinearNorm>(f.v))
            throw CapError("nadp_exact: path length exceeds cap " +
                           std::to_string(caps().path_len) + "; use nadp_mc");
        total += pr * expected_reward(inst, f,
                                             path_elements(t, pi, restrict_active));
    }
    EvalResult res;
    res.value = total;
    res.value_d = to_double(total);
    return res;
}

static double uniform01(std::mt19937_64 &rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

EvalResult nadp_mc(const DecisionTree &t, const Instance &inst, const Norm &f,
                   long long samples, uint64_t seed, bool restrict_active)
{
    require_valid(t, inst);
    if (samples < 1)
        throw InputError("nadp_mc requires samples >= 1");

    auto dist = leaf_distribution(t, inst);
    std::vector<double> cum;
    double acc = 0;
    for (auto &[leaf, pr] : dist)
    {
        acc += to_double(pr);
        cum.push_back(acc);
    }
    std::vector<std::vector<int>> elems_per_leaf;
    for (auto &[leaf, pr] : dist)
        elems_per_leaf.push_back(
            path_elements(t, path_info(t, leaf), restrict_active));

    std::mt19937_64 rng(seed);
    double mean = 0, m2 = 0;
    std::vector<Rat> vals(inst.n, Rat(0));
    for (long long k = 1; k <= samples; ++k)
    {
        double u = uniform01(rng) * acc;
        size_t idx =
            std::lower_bound(cum.begin(), cum.end(), u) - cum.begin();
        if (idx >= cum.size())
            idx = cum.size() - 1;
        const auto &elems = elems_per_leaf[idx];
        for (int e : elems)
        {
            const auto &d = inst.dist(e);
            double x = uniform01(rng);
            double c = 0;
            size_t j = 0;
            for (; j + 1 < d.probs.size(); ++j)
            {
                c += to_double(d.probs[j]);
                if (x < c)
                    break;
            }
            vals[e - 1] = d.values[j];
        }
        double reward = to_double(evaluate(f, vals));
        for (int e : elems)
            vals[e - 1] = 0;
        double delta = reward - mean;
        mean += delta / static_cast<double>(k);
        m2 += delta * (reward - mean);
    }
    EvalResult res;
    res.mode = EvalMode::MonteCarlo;
    res.samples = samples;
    res.seed = seed;
    res.value_d = mean;
    res.stderr_ = samples > 1
                      ? std::sqrt(m2 / static_cast<double>(samples - 1) /
                                  static_cast<double>(samples))
                      : 0.0;
    return res;
}

// ---------------------------------------------------------------------------
// Brute-force solvers

namespace {

bool uses_explicit(const FeasibilityConstraint &c)
{
    if (c.kind == FeasibilityConstraint::Kind::ExplicitSequences)
        return true;
    return c.inner && uses_explicit(*c.inner);
}

struct AdaptiveSolver {
    const Instance &inst;
    const Norm &f;
    bool seq_key;
    std::map<std::string, Rat> memo;
    std::vector<int> seq;
    std::vector<int> outcome;
    std::vector<Rat> vals;

    AdaptiveSolver(const Instance &i, const Norm &g)
        : inst(i), f(g), seq_key(uses_explicit(i.constraint)),
          vals(i.n, Rat(0))
    {}

    std::string key() const
    {
        std::string k;
        if (seq_key)
        {
            for (size_t i = 0; i < seq.size(); ++i)
            {
                k += static_cast<char>(seq[i]);
                k += static_cast<char>(outcome[i]);
            }
        }
        else
        {
            std::vector<std::pair<int, int>> pairs;
            for (size_t i = 0; i < seq.size(); ++i)
                pairs.emplace_back(seq[i], outcome[i]);
            std::sort(pairs.begin(), pairs.end());
            for (auto &[e, o] : pairs)
            {
                k += static_cast<char>(e);
                k += static_cast<char>(o);
            }
        }
        return k;
    }

    Rat value()
    {
        std::string k = key();
        auto it = memo.find(k);
        if (it != memo.end())
            return it->second;
        Rat best = evaluate(f, vals);
        for (int e = 1; e <= inst.n; ++e)
        {
            if (std::find(seq.begin(), seq.end(), e) != seq.end())
                continue;
            seq.push_back(e);
            if (inst.constraint.feasible(seq))
                best = std::max(best, probe_value(e));
            seq.pop_back();
        }
        memo.emplace(std::move(k), best);
        return best;
    }

    // expected continuation value of probing e (call with e already on seq)
    Rat probe_value(int e)
    {
        const auto &d = inst.dist(e);
        Rat ev = 0;
        for (size_t j = 0; j < d.values.size(); ++j)
        {
            outcome.push_back(static_cast<int>(j));
            vals[e - 1] = d.values[j];
            ev += d.probs[j] * value();
            outcome.pop_back();
        }
        vals[e - 1] = 0;
        return ev;
    }

    // rebuilds the argmax tree; probes only when strictly better than stopping
    int build(DecisionTree &t)
    {
        Rat stop = evaluate(f, vals);
        int best_e = 0;
        Rat best = stop;
        for (int e = 1; e <= inst.n; ++e)
        {
            if (std::find(seq.begin(), seq.end(), e) != seq.end())
                continue;
            seq.push_back(e);
            if (inst.constraint.feasible(seq))
            {
                Rat ev = probe_value(e);
                if (ev > best)
                {
                    best = ev;
                    best_e = e;
                }
            }
            seq.pop_back();
        }
        int id = static_cast<int>(t.nodes.size());
        t.nodes.emplace_back();
        if (best_e == 0)
            return id; // leaf
        t.nodes[id].elt = best_e;
        const auto &d = inst.dist(best_e);
        std::vector<int> kids;
        seq.push_back(best_e);
        for (size_t j = 0; j < d.values.size(); ++j)
        {
            outcome.push_back(static_cast<int>(j));
            vals[best_e - 1] = d.values[j];
            kids.push_back(build(t));
            outcome.pop_back();
        }
        vals[best_e - 1] = 0;
        seq.pop_back();
        t.nodes[id].kids = std::move(kids);
        return id;
    }
};

} // namespace

OptAdaptiveResult optimal_adaptive(const Instance &inst, const Norm &f)
{
    inst.validate();
    if (inst.n > caps().cap_n)
        throw CapError("optimal_adaptive: n " + std::to_string(inst.n) +
                       " exceeds cap " + std::to_string(caps().cap_n));
    AdaptiveSolver solver(inst, f);
    OptAdaptiveResult res;
    res.value = solver.value();
    DecisionTree t;
    solver.build(t);
    t.root = 0;
    t.finalize();
    res.tree = std::move(t);
    return res;
}

OptNonAdaptiveResult optimal_nonadaptive(const Instance &inst, const Norm &f)
{
    inst.validate();
    auto seqs = enumerate_feasible(inst, inst.n);
    if (static_cast<long long>(seqs.size()) > caps().seq_count)
        throw CapError("optimal_nonadaptive: feasible sequence count exceeds cap");
    // f ignores order, so evaluate once per distinct element set
    std::map<std::vector<int>, Rat> by_set;
    OptNonAdaptiveResult res;
    res.value = -1;
    for (const auto &seq : seqs)
    {
        std::vector<int> key = seq;
        std::sort(key.begin(), key.end());
        auto it = by_set.find(key);
        Rat v;
        if (it != by_set.end())
            v = it->second;
        else
        {
            v = expected_reward(inst, f, seq);
            by_set.emplace(std::move(key), v);
        }
        if (v > res.value)
        {
            res.value = v;
            res.sequence = seq;
        }
    }
    return res;
}

json GapReport::to_json() const
{
    json j;
    j["opt_adaptive"] = rat_to_json(opt_adaptive);
    j["opt_nonadaptive"] = rat_to_json(opt_nonadaptive);
    j["tree_adap"] = rat_to_json(tree_adap);
    j["tree_nadp"] = rat_to_json(tree_nadp);
    j["gap"] = rat_to_json(gap);
    j["tree_gap"] = rat_to_json(tree_gap);
    j["gap_double"] = to_double(gap);
    j["tree_gap_double"] = to_double(tree_gap);
    return j;
}

static Rat safe_ratio(const Rat &num, const Rat &den, const char *what)
{
    if (den == 0)
    {
        if (num == 0)
            return Rat(1);
        throw std::logic_error(std::string(what) +
                               ": positive numerator over zero denominator");
    }
    return num / den;
}

GapReport gap_report(const Instance &inst, const Norm &f, bool restrict_active)
{
    auto oa = optimal_adaptive(inst, f);
    auto on = optimal_nonadaptive(inst, f);
    GapReport rep;
    rep.opt_adaptive = oa.value;
    rep.opt_nonadaptive = on.value;
    rep.tree_adap = adap_exact(oa.tree, inst, f).value;
    rep.tree_nadp = nadp_exact(oa.tree, inst, f, restrict_active).value;
    rep.gap = safe_ratio(rep.opt_adaptive, rep.opt_nonadaptive, "gap");
    rep.tree_gap = safe_ratio(rep.tree_adap, rep.tree_nadp, "tree_gap");
    return rep;
}

} // namespace probelab
