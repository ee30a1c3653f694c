#pragma once

#include "engine.hpp"

namespace probelab {

// is f(x on coordinate i, 0 elsewhere) >= lambda * opt? (>= counts as large)
bool outcome_is_large(const Norm &f, int n, int elt, const Rat &x,
                      const Rat &lambda, const Rat &opt);

// Split of each element into a large part Y (carrying the outcome when its
// single-coordinate norm value reaches lambda*opt) and a small part Z.
struct Decomposition {
    Rat lambda;
    std::vector<ElementDist> Y, Z;
    // large[i][j]: whether outcome j of element i+1 went to Y
    std::vector<std::vector<bool>> large;
};

Decomposition decompose_large_small(const Instance &inst, const Norm &f,
                                    const Rat &opt_value, const Rat &lambda);

// Replace the subtree below every large-outcome arc with a leaf.
DecisionTree truncate_at_first_large(const DecisionTree &t, const Instance &inst,
                                     const Norm &f, const Rat &lambda,
                                     const Rat &opt_value);

// Exhaustive large-outcome accounting for one tree: P is the full probed set,
// P1 the prefix ending at the first large outcome.
struct LargeFilterReport {
    Rat opt_prime;  // E[f(Y restricted to P1)]
    Rat opt_zero;   // E[f(Y restricted to P \ P1)]
    Rat e_f_y;      // E[f(Y restricted to P)]
    bool subadditive_ok = false; // opt_prime + opt_zero >= e_f_y
    bool filter_ok = false;      // lambda * opt_zero <= opt_prime
};

LargeFilterReport large_filter_quantities(const DecisionTree &t,
                                          const Instance &inst, const Norm &f,
                                          const Rat &lambda, const Rat &opt_value);

// Expected reward of the sequence-sampling strategy that draws fake outcomes
// from the small-conditioned distributions, follows the tree, and probes the
// resulting path for real. Errors when some tree element has no small outcome.
Rat nonadaptive_simulation(const DecisionTree &t, const Instance &inst,
                           const Norm &f, const Rat &lambda, const Rat &opt_value);

// Rescale every nonzero outcome so its single-coordinate norm value is the
// largest power of 2 strictly below the original, landing in [1/(4r), 1/2];
// values below that window are zeroed.
Instance geometric_round(const Instance &inst, const Norm &f, int r);

struct Bernoullized {
    Instance prepped; // original after zero-prob support cleanup
    Instance binst;   // indicator elements e_{i,j}
    DecisionTree ttree;
    std::map<std::pair<int, int>, int> elt_id; // (orig element, support j) -> id
    std::map<int, Rat> value;                  // new element -> c_{i,j}
    std::map<int, int> leaf_map;               // ttree leaf -> original leaf
};

Bernoullized bernoullize(const DecisionTree &t, const Instance &inst);

// composite activation probabilities reproduce the original ones exactly
bool chain_probabilities_exact(const Bernoullized &b);

// per original leaf, the transformed leaf masses marginalize exactly
bool leaf_marginals_exact(const Bernoullized &b, const DecisionTree &t);

// Norm over the e_{i,j} coordinates: base f applied per-group maxima
// (general), or to the top-dim(f) products when f is symmetric.
Norm induced_norm(const Norm &f, const Bernoullized &b, bool symmetric);

struct XosPipelineResult {
    Norm fxos; // the special max-of-intersections norm
    int j0 = 1;
    std::map<int, std::vector<int>> aprime; // leaf -> A'_ell (bucket j0)
};

// Bucket active ancestors by rounded weight under each leaf's maximizing XOS
// vector, pick the bucket index with the largest expected mass over 2^{j-1},
// and build the induced max-of-intersections norm.
XosPipelineResult xos_pipeline(const DecisionTree &t, const Instance &inst,
                               const Norm &f, int r);

} // namespace probelab
