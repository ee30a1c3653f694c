#pragma once

#include "norms.hpp"

namespace probelab {

enum class EvalMode { ExactRational, ExactFloat, MonteCarlo };

struct EvalResult {
    Rat value;           // meaningful in exact modes
    double value_d = 0;  // double projection / MC estimate
    EvalMode mode = EvalMode::ExactRational;
    long long samples = 0;
    uint64_t seed = 0;
    double stderr_ = 0; // MC only

    json to_json() const;
};

// E[f(X_S)] over the product space of the given elements' outcomes, exact.
Rat expected_reward(const Instance &inst, const Norm &f,
                    const std::vector<int> &elems);

// Adap(T, f): expected reward of running the tree, exact.
EvalResult adap_exact(const DecisionTree &t, const Instance &inst, const Norm &f);

// Nadp(T, f): sample a leaf, probe its whole path non-adaptively, exact
// product-space enumeration. restrict_active evaluates f only on elements
// probed at active-ancestor nodes of the sampled leaf (the path-restricted
// quantity the complete-tree family reports).
EvalResult nadp_exact(const DecisionTree &t, const Instance &inst, const Norm &f,
                      bool restrict_active = false);

EvalResult nadp_mc(const DecisionTree &t, const Instance &inst, const Norm &f,
                   long long samples, uint64_t seed,
                   bool restrict_active = false);

struct OptAdaptiveResult {
    Rat value;
    DecisionTree tree;
};

// Exhaustive optimal adaptive strategy with memoization; n <= caps().cap_n.
OptAdaptiveResult optimal_adaptive(const Instance &inst, const Norm &f);

struct OptNonAdaptiveResult {
    Rat value;
    std::vector<int> sequence;
};

OptNonAdaptiveResult optimal_nonadaptive(const Instance &inst, const Norm &f);

struct GapReport {
    Rat opt_adaptive;
    Rat opt_nonadaptive;
    Rat tree_adap;
    Rat tree_nadp;
    Rat gap;      // opt_adaptive / opt_nonadaptive (1 when both are 0)
    Rat tree_gap; // tree_adap / tree_nadp of the optimal tree

    json to_json() const;
};

GapReport gap_report(const Instance &inst, const Norm &f,
                     bool restrict_active = false);

} // namespace probelab
