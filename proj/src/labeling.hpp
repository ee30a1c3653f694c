#pragma once

#include "norms.hpp"

#include <set>

namespace probelab {

// The classifier output (m; s; d_1..d_m; e_1..e_m; y_1..y_{floor(s/K)}).
struct Label {
    int m = 1;
    int s = 0;
    std::vector<int> d; // strictly decreasing, length m
    std::vector<int> e; // e[0] = 0 placeholder, e[1..] distinct elements
    std::vector<int> y; // strictly decreasing, length floor(s/K)

    bool operator==(const Label &) const = default;
    auto operator<=>(const Label &) const = default;

    Label prefix(int a) const;

    json to_json() const; // [m, s, d..., e..., y...]
    static Label from_json(const json &j, int K);
    std::string str() const;
};

// membership in the label set: bounds, monotone depths, distinct elements
bool label_valid(const Label &B, int n, int K);

// K presets (base-2 logarithms)
int preset_k3(int n); // ceil(25 log2 n) + 25
int preset_k4(int n); // 50 ceil(log2 n / log2 log2 n) + 50, n >= 3

// g(h, p) = p exp(-0.1 h p^{1/h}), g(0, p) = p
double g_eval(int h, double p);

struct GridCheckReport {
    bool pass = true;
    long long checked = 0;
    long long violations = 0;
    double worst_violation = 0; // max of rhs - lhs over violations
};

// g(h, lp+(1-l)q) >= (1-l)[l g(h-1,p) + (1-l) g(h,q)] over the full grid
GridCheckReport g_inequality_check(int grid_steps = 100, int h_max = 30,
                                   double slack = 1e-12);

struct AnalysisSets {
    Label B0;
    std::vector<int> S;                      // generating leaves, DFS order
    std::map<int, std::vector<int>> v;       // leaf -> v_1..v_m (v_1 = leaf)
    std::map<int, std::vector<int>> imp;     // leaf -> Imp(leaf, B0)
    std::set<int> T;                         // union of Imp over S
    std::set<int> Tprime;                    // T filtered to depths in I(B0)
    std::vector<std::pair<int, int>> intervals; // I_j = [y_j, y_{j-1}), j not in J
    std::set<int> J;
};

struct TailEntry {
    Label label;
    Rat prob;
    Rat bound; // 2^{mK - s}
    bool pass = true;
};

struct TailReport {
    std::vector<TailEntry> entries;
    bool pass = true;
};

struct InductionReport {
    bool preconditions_ok = true;
    std::vector<std::string> precondition_violations;
    Rat lhs;              // E[1_S prod_{T cap path} (1-p)]
    Rat bound;            // 2^{-h}
    bool pass = false;    // lhs <= bound (only meaningful when preconditions_ok)
    double lhs_weighted = 0;
    double p_weighted = 0;
    double g_bound = 0;
    bool pass_weighted = false;
};

struct EventReport {
    bool inclusion_pass = true;    // [B = B0] subset of D cap [R cap T' empty]
    bool independence_pass = true; // exact product rule per generating leaf
    bool group_sum_pass = true;    // sum over same-J labels of Pr[D] <= 1
    bool disjoint_pass = true;     // at most one D event per realization
    std::vector<std::string> failures;
    bool pass() const
    {
        return inclusion_pass && independence_pass && group_sum_pass &&
               disjoint_pass;
    }
};

// Greedy labeling machinery over one Bernoulli tree with per-leaf subsets
// A'_ell of active ancestors. All probabilities are exact.
class LabelingWorkbench {
  public:
    LabelingWorkbench(const DecisionTree &t, const Instance &inst, int K,
                      std::map<int, std::vector<int>> aprime);

    const DecisionTree &tree() const { return t_; }
    int K() const { return K_; }
    const std::vector<int> &leaves() const { return leaves_; }
    const PathInfo &pinfo(int leaf) const { return pinfo_.at(leaf); }
    const std::vector<int> &aprime(int leaf) const { return aprime_.at(leaf); }
    int node_depth(int u) const { return node_depth_[u]; }
    Norm special_xos() const; // f_xos built from the A' family

    Label leaf_label(int leaf) const;
    std::vector<int> level_set(const Label &B, int a) const;
    std::vector<int> special_ancestors(const Label &B, int u) const;

    struct RunResult {
        Label label;
        std::vector<int> triggers; // nodes that updated the label; [0] = leaf
    };
    RunResult run_labeling(int leaf, const std::set<int> &R) const;

    const AnalysisSets &analysis_sets(const Label &B0) const;

    // every (leaf, R) outcome with its exact probability and label
    struct Outcome {
        int leaf;
        std::set<int> R; // element ids present among the path's probes
        Rat prob;        // pi(leaf) * prod p / (1-p) over the path elements
        Label label;
    };
    const std::vector<Outcome> &outcomes() const;

    TailReport tail_check() const;
    std::vector<Label> realized_labels() const;

    InductionReport induction_check(const std::set<int> &S_leaves,
                                    const std::set<int> &T_nodes, int h,
                                    const std::map<int, Rat> *weights = nullptr) const;

    EventReport event_checks(const Label &B0) const;

  private:
    DecisionTree t_;
    Instance inst_;
    int K_;
    std::map<int, std::vector<int>> aprime_;
    std::vector<int> leaves_;
    std::map<int, PathInfo> pinfo_;
    std::vector<int> node_depth_;
    mutable std::map<Label, AnalysisSets> analysis_cache_;
    mutable std::vector<Outcome> outcomes_;

    // DFS-leftmost leaf witnessing the element-at-depth constraints of B up
    // to index a (1-based); -1 when none exists
    int witness(const Label &B, int a) const;
    bool in_level1(int leaf, const Label &B) const;
};

} // namespace probelab
