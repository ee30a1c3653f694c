#pragma once

#include "model.hpp"

#include <functional>
#include <variant>

namespace probelab {

struct Norm;

struct LinearNorm {
    std::vector<Rat> w;
};

struct XosNorm {
    std::vector<std::vector<Rat>> vecs; // each of length dim
};

struct BinaryXosNorm {
    std::vector<std::vector<Rat>> vecs; // entries in {0,1}
};

// max over profiles of <profile, sort_desc(v)>; profiles nonincreasing
struct SymmetricNorm {
    std::vector<std::vector<Rat>> profiles;
};

// f_xos(S) = max over families F of |F cap S|; on vectors: max_F sum_{e in F} v_e
struct SpecialXosNorm {
    std::vector<std::vector<int>> families; // element subsets, sorted
};

// Norm over grouped coordinates (i,j), flattened group-major. With
// top_n=false: base applied to (max_j coeffs[i][j] * x_{i,j})_i.
// With top_n=true: base applied to the dim(base) largest coeffs[i][j]*x_{i,j}.
struct InducedNorm {
    std::shared_ptr<Norm> base;
    std::vector<std::vector<Rat>> coeffs; // per group i, coefficient of slot j
    bool top_n = false;
};

struct Norm {
    std::variant<LinearNorm, XosNorm, BinaryXosNorm, SymmetricNorm, SpecialXosNorm,
                 InducedNorm>
        v;
    int dim = 0;

    json to_json() const;
    static Norm from_json(const json &j);
};

Norm make_linear(std::vector<Rat> w);
Norm make_xos(std::vector<std::vector<Rat>> vecs);
Norm make_binary_xos(std::vector<std::vector<Rat>> vecs);
Norm make_symmetric(std::vector<std::vector<Rat>> profiles, int dim);
Norm make_special_xos(std::vector<std::vector<int>> families, int dim);

Rat evaluate(const Norm &f, const std::vector<Rat> &v);

// evaluate on the vector with values[e-1] at coordinates e in S, 0 elsewhere
Rat evaluate_subset(const Norm &f, const std::vector<int> &S,
                    const std::vector<Rat> &values);

// f(S) with all-ones values (the 0/1 probing case)
Rat evaluate_set(const Norm &f, const std::vector<int> &S);

struct AxiomCheck {
    bool normalized = true;
    bool monotone = true;
    bool subadditive = true;
    bool homogeneous = true;
    bool exhaustive_grid = false; // whether the n<=4 grid pass ran
    std::vector<std::string> counterexamples;
    bool all() const { return normalized && monotone && subadditive && homogeneous; }
};

AxiomCheck verify_norm_axioms(const Norm &f, int trials, uint64_t seed);

// test hook: same checks against an arbitrary function
AxiomCheck verify_axioms_fn(const std::function<Rat(const std::vector<Rat> &)> &f,
                            int dim, int trials, uint64_t seed,
                            bool homogeneous_expected = true);

// Weight-bucket decomposition of the active ancestors of each leaf under the
// maximizing XOS vector: bucket j (1 <= j <= floor(log2 r)+1) holds nodes with
// 2^-j <= w < 2^-(j-1); bucket 0 holds the residual (w <= 1/r).
struct LeafBuckets {
    int leaf = 0;
    int maximizer = 0;                     // I(ell), smallest-index tie-break
    std::map<int, std::vector<int>> bucket; // j -> node ids
};

std::vector<LeafBuckets> round_and_bucket(const Norm &f, const DecisionTree &t,
                                          int r);

// subsets: per-leaf node sets, each contained in that leaf's active ancestors
Norm build_special_xos(const DecisionTree &t,
                       const std::map<int, std::vector<int>> &subsets);

} // namespace probelab
