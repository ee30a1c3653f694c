#pragma once

#include "rational.hpp"

#include <json.hpp>

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <vector>

namespace probelab {

using json = nlohmann::ordered_json;

// Finite discrete distribution of one element. Support values are kept
// strictly increasing; construction canonicalizes (sorts, merges duplicates).
struct ElementDist {
    std::vector<Rat> values;
    std::vector<Rat> probs;

    // support {0, c} (the zero outcome may carry probability 0)
    bool is_bernoulli() const;
    Rat bern_p() const; // activation probability
    Rat bern_c() const; // active value
    Rat expectation() const;
};

// sorts by value and merges duplicates; zero-probability points are kept
ElementDist make_dist(std::vector<Rat> values, std::vector<Rat> probs);

struct FeasibilityConstraint {
    enum class Kind { ExplicitSequences, LengthBound, DownwardClosed };
    Kind kind = Kind::LengthBound;
    int r = 0;                                      // LengthBound
    std::shared_ptr<FeasibilityConstraint> inner;   // optional LengthBound wrap
    std::vector<std::vector<int>> sequences;        // ExplicitSequences
    std::vector<std::vector<int>> sets;             // DownwardClosed family

    // seq must already be duplicate-free; checked here anyway
    bool feasible(const std::vector<int> &seq) const;

    static FeasibilityConstraint length_bound(int r);
    static FeasibilityConstraint explicit_sequences(std::vector<std::vector<int>> seqs);
    static FeasibilityConstraint downward_closed(std::vector<std::vector<int>> family);

    json to_json() const;
    static FeasibilityConstraint from_json(const json &j);

  private:
    // prefix closure of `sequences`, materialized once for membership tests
    mutable std::shared_ptr<std::set<std::vector<int>>> prefix_set_;
    const std::set<std::vector<int>> &prefix_set() const;
};

struct Instance {
    int n = 0;
    std::vector<ElementDist> elements; // index i-1 holds element i
    FeasibilityConstraint constraint;

    const ElementDist &dist(int elt) const { return elements.at(elt - 1); }
    bool all_bernoulli() const;

    // throws InputError on violated invariants (probs outside [0,1], sums
    // != 1, negative values, deterministic-zero Bernoulli elements)
    void validate() const;

    json to_json() const;
    static Instance from_json(const json &j);
};

struct TreeNode {
    int elt = 0;           // 0 = dummy (leaf)
    std::vector<int> kids; // outcome-indexed: kids[j] follows outcome j
    bool leaf() const { return kids.empty(); }
};

struct DecisionTree {
    std::vector<TreeNode> nodes;
    int root = 0;

    // derived links; call finalize() after building nodes by hand
    std::vector<int> parent;  // -1 at root
    std::vector<int> arc;     // outcome index taken from parent (-1 at root)
    void finalize();

    bool is_leaf(int u) const { return nodes[u].leaf(); }
    int elt(int u) const { return nodes[u].elt; }
    std::vector<int> leaves() const;          // in DFS order, low outcome first
    std::vector<int> path_to_root(int u) const; // u, parent(u), ..., root

    json to_json() const;
    static DecisionTree from_json(const json &j);
};

struct PathInfo {
    int leaf = 0;
    std::vector<int> P;          // node ids root -> leaf (leaf included)
    std::vector<int> A;          // subset of P where a nonzero-outcome arc is taken
    std::map<int, int> depth;    // per node on the path
};

std::vector<std::string> validate_tree(const DecisionTree &t, const Instance &inst);

// leaf id -> probability, exact; requires validate_tree to pass
std::vector<std::pair<int, Rat>> leaf_distribution(const DecisionTree &t,
                                                   const Instance &inst);

PathInfo path_info(const DecisionTree &t, int leaf);

// all feasible probe sequences of length <= max_len, each exactly once
std::vector<std::vector<int>> enumerate_feasible(const Instance &inst, int max_len);

Rat rat_from_json(const json &j);
json rat_to_json(const Rat &x);

} // namespace probelab
