#pragma once

#include "engine.hpp"

namespace probelab {

// Per-leaf class structure of the truncated tree.
struct LeafClasses {
    int leaf = 0;
    std::map<int, std::vector<int>> active_by_class; // k -> A_ell cap Q_k
    std::set<int> big;  // k with |A_ell cap Q_k| >= theta * 2^k
    std::set<int> bad;  // big k whose path activation mass is too thin
    std::vector<int> D; // union of big classes' active nodes
    std::vector<int> G; // union of bad classes' active nodes
};

// Symmetric-value pipeline state: rescaled norm with f(unit) = 1 and
// adaptive optimum 1, values rounded down to negative powers of 4, the
// optimal tree truncated once the collected reward reaches 1.
struct SymState {
    Instance inst; // normalized and rounded values
    Norm f;        // rescaled norm
    Rat scale_f;   // original f = scale_f * f
    Rat scale_v;   // original values = scale_v * values
    DecisionTree opt_tree;
    DecisionTree trunc_tree;
    Rat opt1;       // adaptive value of opt_tree on the rounded instance
    Rat trunc_adap; // E[f(A_ell)] over the truncated tree
    bool opt1_ok = false;       // opt1 >= 1/4
    bool trunc_adap_ok = false; // trunc_adap >= 1/8
    bool leaf_cap_ok = false;   // every truncated leaf has f(A_ell) <= 2
    std::map<int, int> node_class; // internal truncated node -> k (c = 4^-k)
    Rat theta;                     // surrogate multiplier on the 2^k thresholds
    std::vector<LeafClasses> leaves;
};

// Normalize, round, solve, truncate. Requires Bernoulli values and a
// symmetric norm; throws InputError when some value is not 4^-small_k-small
// after normalization. small_k below 4 relaxes the threshold so the pipeline
// mechanics can be exercised on instances too small to meet the literal one.
SymState preprocess(const Instance &inst, const Norm &f, int small_k = 4);

// Populate classes and per-leaf D/G with thresholds theta * 2^k.
void classify(SymState &st, const Rat &theta = Rat(1));

// E[f(A cap D)] >= E[f(A)] - sum over occurring classes of theta 2^k f(4^-k e)
struct Eq4Report {
    Rat lhs, rhs;
    bool pass = false;
};
Eq4Report reward_in_big_classes_check(const SymState &st);

// exact Pr[leaf in S] <= e^{-h-q} under the activation-mass preconditions
struct BadLeafTailReport {
    bool preconditions_ok = true;
    std::vector<std::string> precondition_violations;
    Rat prob;
    double bound = 0;
    bool pass = false;
};
BadLeafTailReport bad_leaf_tail_check(const DecisionTree &t, const Instance &inst,
                                      const std::set<int> &T_nodes,
                                      const std::set<int> &S_leaves, int h,
                                      double q);

// total bad-class mass: E_ell[f(G_ell)] with its 2 sum 2^{-2^k} budget;
// asserted only at theta = 1 (the literal thresholds)
struct BadMassReport {
    Rat mass;
    double budget = 0;
    bool literal_thresholds = false;
    bool pass = false; // mass <= budget, meaningful when literal_thresholds
};
BadMassReport bad_mass_check(const SymState &st);

// E_R[f(R cap P_ell, big classes only)] >= (1/64) f((A cap D) \ G)
struct ChernoffPathReport {
    Rat lhs;     // exact mode
    double lhs_d = 0;
    double stderr_ = 0; // MC mode
    Rat rhs64;          // f((A cap D) \ G) / 64
    bool exact = true;
    bool pass = false;
};
ChernoffPathReport chernoff_path_check(const SymState &st, int leaf,
                                       long long samples = 0, uint64_t seed = 0);

// for every probe count t: E[f(values collected after the first t probes)]
// stays below the adaptive optimum
struct SubsequenceReport {
    Rat opt;
    Rat worst; // max over t of the post-prefix expectation
    bool pass = false;
};
SubsequenceReport subsequence_check(const Instance &inst, const Norm &f);

struct ConstantGapReport {
    GapReport gaps;
    bool gap_ok = false; // gap <= 2050
    bool premises_hold = false;
    std::string premise_note;
    Rat trunc_nadp;       // meaningful when premises_hold
    bool nadp_ok = false; // trunc_nadp >= 1/1025
    Eq4Report eq4;        // meaningful when premises_hold
};

// Brute-force gap bound plus, when the smallness premises hold, the full
// pipeline lower bound on the truncated tree's non-adaptive value.
ConstantGapReport constant_gap_check(const Instance &inst, const Norm &f);

} // namespace probelab
