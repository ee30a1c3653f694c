#pragma once

#include "norms.hpp"

#include <optional>

namespace probelab {

struct GeneratedArtifacts {
    Instance instance;
    std::optional<DecisionTree> tree;
    std::optional<Norm> norm;

    json to_json() const;
};

// Complete binary tree of height h: a fresh Bernoulli(lambda) element per
// internal node, unit values, cardinality objective.
GeneratedArtifacts gen_complete_tree(int h, const Rat &lambda);

// n Bernoulli elements with probabilities drawn from {1/16..15/16} clipped to
// [p_min, p_max] and values from {1/8..8/8}; LengthBound(n) constraint.
GeneratedArtifacts gen_random_bernoulli(int n, const Rat &p_min, const Rat &p_max,
                                        uint64_t seed);

// Random binary decision tree over a random Bernoulli instance: at most
// max_nodes nodes and paths of at most max_path probes.
GeneratedArtifacts gen_random_tree(int max_nodes, int max_path, uint64_t seed);

// Random XOS norm over n elements: W vectors, each weight nonzero with the
// given density (percent), weights in (0, 1).
Norm gen_random_xos(int n, int W, int density_pct, uint64_t seed);

// Symmetric norm: max of Top-k profiles for the given ks.
Norm gen_random_topk(int n, const std::vector<int> &ks);

// FamilySpec JSON dispatch:
//   {"family":"complete-tree","h":8,"lambda":"1/4"}
//   {"family":"random-bernoulli","n":5,"p_min":"1/16","p_max":"15/16","seed":1}
//   {"family":"random-tree","max_nodes":15,"max_path":8,"seed":1}
//   {"family":"random-xos","n":6,"W":4,"density_pct":60,"seed":1}
//   {"family":"random-topk","n":6,"ks":[1,3]}
GeneratedArtifacts generate(const json &spec);

} // namespace probelab
