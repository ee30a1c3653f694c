#pragma once

// Independent oracle implementations used to pin down [DERIVED] expectations.
// These are deliberately plain (no memoization, no shortcuts, no shared code
// with the library's solvers) so that agreement is meaningful.

#include "engine.hpp"
#include "norms.hpp"

#include <algorithm>
#include <functional>
#include <vector>

namespace oracles {

using namespace probelab;

// Plain exponential recursion for the optimal adaptive value. State is the
// probe sequence plus the realized outcome index of each probed element.
inline Rat optimal_adaptive_plain(const Instance &inst, const Norm &f,
                                  std::vector<int> &seq,
                                  std::vector<int> &outcome)
{
    std::vector<Rat> vals(inst.n, Rat(0));
    for (size_t i = 0; i < seq.size(); ++i)
        vals[seq[i] - 1] = inst.dist(seq[i]).values[outcome[i]];
    std::vector<Rat> v(vals);
    Rat best = evaluate(f, v);
    for (int e = 1; e <= inst.n; ++e)
    {
        if (std::find(seq.begin(), seq.end(), e) != seq.end())
            continue;
        seq.push_back(e);
        if (inst.constraint.feasible(seq))
        {
            const auto &d = inst.dist(e);
            Rat ev = 0;
            for (size_t j = 0; j < d.values.size(); ++j)
            {
                outcome.push_back(static_cast<int>(j));
                ev += d.probs[j] * optimal_adaptive_plain(inst, f, seq, outcome);
                outcome.pop_back();
            }
            best = std::max(best, ev);
        }
        seq.pop_back();
    }
    return best;
}

inline Rat optimal_adaptive_plain(const Instance &inst, const Norm &f)
{
    std::vector<int> seq, outcome;
    return optimal_adaptive_plain(inst, f, seq, outcome);
}

// E[f(X_S)] for a fixed probe set, by full product-space enumeration.
inline Rat expected_reward_plain(const Instance &inst, const Norm &f,
                                 const std::vector<int> &S)
{
    Rat total = 0;
    std::vector<Rat> vals(inst.n, Rat(0));
    std::function<void(size_t, Rat)> rec = [&](size_t i, Rat pr) {
        if (i == S.size())
        {
            total += pr * evaluate(f, vals);
            return;
        }
        const auto &d = inst.dist(S[i]);
        for (size_t j = 0; j < d.values.size(); ++j)
        {
            vals[S[i] - 1] = d.values[j];
            rec(i + 1, pr * d.probs[j]);
        }
        vals[S[i] - 1] = 0;
    };
    rec(0, Rat(1));
    return total;
}

// Optimal non-adaptive value by enumerating every feasible sequence.
inline Rat optimal_nonadaptive_plain(const Instance &inst, const Norm &f)
{
    Rat best = 0;
    for (const auto &seq : enumerate_feasible(inst, inst.n))
        best = std::max(best, expected_reward_plain(inst, f, seq));
    return best;
}

// Nadp(T, f) by brute force: for every leaf, enumerate the product space of
// all path-element outcomes (not just subsets: general supports allowed).
// When restrict_active is set, only elements probed at active-ancestor nodes
// of the sampled leaf keep their value (the rest are zeroed).
inline Rat nadp_plain(const DecisionTree &t, const Instance &inst, const Norm &f,
                      bool restrict_active = false)
{
    Rat total = 0;
    for (auto &[leaf, pr] : leaf_distribution(t, inst))
    {
        PathInfo pi = path_info(t, leaf);
        std::vector<int> elems;
        const auto &src = restrict_active ? pi.A : pi.P;
        for (int u : src)
            if (!t.is_leaf(u))
                elems.push_back(t.elt(u));
        total += pr * expected_reward_plain(inst, f, elems);
    }
    return total;
}

// Adap(T, f) by walking every realization of the tree.
inline Rat adap_plain(const DecisionTree &t, const Instance &inst, const Norm &f)
{
    Rat total = 0;
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
    return total;
}

// E_{ell,R} |R cap A_ell| for Bernoulli instances, by direct summation
// (independence: each active ancestor contributes its own p).
inline Rat expected_active_probed_plain(const DecisionTree &t, const Instance &inst)
{
    Rat total = 0;
    for (auto &[leaf, pr] : leaf_distribution(t, inst))
    {
        PathInfo pi = path_info(t, leaf);
        Rat s = 0;
        for (int u : pi.A)
            s += inst.dist(t.elt(u)).bern_p();
        total += pr * s;
    }
    return total;
}

} // namespace oracles
