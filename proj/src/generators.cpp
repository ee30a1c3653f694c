#include "generators.hpp"

#include <functional>
#include <random>

namespace probelab {

json GeneratedArtifacts::to_json() const
{
    json j;
    j["instance"] = instance.to_json();
    if (tree)
        j["tree"] = tree->to_json();
    if (norm)
        j["norm"] = norm->to_json();
    return j;
}

static ElementDist bernoulli(const Rat &p, const Rat &c)
{
    return make_dist({Rat(0), c}, {1 - p, p});
}

GeneratedArtifacts gen_complete_tree(int h, const Rat &lambda)
{
    if (h < 1 || lambda <= 0 || lambda > 1)
        throw InputError("complete-tree family requires h >= 1, lambda in (0,1]");
    if (h > 16)
        throw CapError("complete-tree family capped at h = 16");
    GeneratedArtifacts art;
    int internal = (1 << h) - 1;
    art.instance.n = internal;
    for (int i = 0; i < internal; ++i)
        art.instance.elements.push_back(bernoulli(lambda, Rat(1)));
    art.instance.constraint = FeasibilityConstraint::length_bound(h);
    art.instance.validate();

    DecisionTree t;
    int next_elt = 1;
    std::function<int(int)> build = [&](int depth) -> int {
        int id = static_cast<int>(t.nodes.size());
        t.nodes.emplace_back();
        if (depth == h)
            return id;
        t.nodes[id].elt = next_elt++;
        int no = build(depth + 1);
        int yes = build(depth + 1);
        t.nodes[id].kids = {no, yes};
        return id;
    };
    build(0);
    t.finalize();
    art.tree = std::move(t);
    art.norm = make_linear(std::vector<Rat>(internal, Rat(1)));
    return art;
}

static Rat clip(const Rat &x, const Rat &lo, const Rat &hi)
{
    return std::max(lo, std::min(hi, x));
}

GeneratedArtifacts gen_random_bernoulli(int n, const Rat &p_min, const Rat &p_max,
                                        uint64_t seed)
{
    if (n < 1 || p_min <= 0 || p_max > 1 || p_min > p_max)
        throw InputError("random-bernoulli family requires n >= 1 and "
                         "0 < p_min <= p_max <= 1");
    std::mt19937_64 rng(seed);
    GeneratedArtifacts art;
    art.instance.n = n;
    for (int i = 0; i < n; ++i)
    {
        Rat p = clip(Rat(1 + static_cast<long>(rng() % 15), 16), p_min, p_max);
        Rat c = Rat(1 + static_cast<long>(rng() % 8), 8);
        art.instance.elements.push_back(bernoulli(p, c));
    }
    art.instance.constraint = FeasibilityConstraint::length_bound(n);
    art.instance.validate();
    return art;
}

GeneratedArtifacts gen_random_tree(int max_nodes, int max_path, uint64_t seed)
{
    if (max_nodes < 1 || max_path < 1)
        throw InputError("random-tree family requires positive sizes");
    std::mt19937_64 rng(seed);
    int n = std::min(max_path + 2, 2 * max_path);
    GeneratedArtifacts art = gen_random_bernoulli(n, Rat(1, 16), Rat(15, 16), rng());
    art.instance.constraint = FeasibilityConstraint::length_bound(max_path);

    // grow a random binary tree; each internal node probes a random unused
    // element of its path, leaves appear with growing probability by depth
    DecisionTree t;
    int budget = max_nodes;
    std::vector<int> used;
    std::function<int(int)> build = [&](int depth) -> int {
        int id = static_cast<int>(t.nodes.size());
        t.nodes.emplace_back();
        bool must_leaf = depth >= max_path || budget < 3 ||
                         static_cast<int>(used.size()) >= n;
        if (must_leaf || rng() % (max_path + 1) < static_cast<uint64_t>(depth))
            return id;
        int e;
        do
            e = 1 + static_cast<int>(rng() % n);
        while (std::find(used.begin(), used.end(), e) != used.end());
        t.nodes[id].elt = e;
        used.push_back(e);
        budget -= 2;
        int no = build(depth + 1);
        int yes = build(depth + 1);
        t.nodes[id].kids = {no, yes};
        used.pop_back();
        return id;
    };
    build(0);
    t.finalize();
    art.tree = std::move(t);
    return art;
}

Norm gen_random_xos(int n, int W, int density_pct, uint64_t seed)
{
    if (n < 1 || W < 1 || density_pct < 1 || density_pct > 100)
        throw InputError("random-xos family requires n, W >= 1 and density in "
                         "[1,100]");
    std::mt19937_64 rng(seed);
    std::vector<std::vector<Rat>> vecs(W, std::vector<Rat>(n, Rat(0)));
    for (auto &row : vecs)
    {
        bool any = false;
        for (auto &w : row)
            if (static_cast<int>(rng() % 100) < density_pct)
            {
                w = Rat(1 + static_cast<long>(rng() % 63), 64);
                any = true;
            }
        if (!any)
            row[rng() % n] = Rat(1 + static_cast<long>(rng() % 63), 64);
    }
    return make_xos(std::move(vecs));
}

Norm gen_random_topk(int n, const std::vector<int> &ks)
{
    std::vector<std::vector<Rat>> profiles;
    for (int k : ks)
    {
        if (k < 1 || k > n)
            throw InputError("top-k profile needs 1 <= k <= n");
        profiles.emplace_back(k, Rat(1));
    }
    return make_symmetric(std::move(profiles), n);
}

GeneratedArtifacts generate(const json &spec)
{
    try
    {
        std::string family = spec.at("family").get<std::string>();
        if (family == "complete-tree")
            return gen_complete_tree(spec.at("h").get<int>(),
                                     rat_from_json(spec.at("lambda")));
        if (family == "random-bernoulli")
            return gen_random_bernoulli(
                spec.at("n").get<int>(),
                spec.contains("p_min") ? rat_from_json(spec.at("p_min")) : Rat(1, 16),
                spec.contains("p_max") ? rat_from_json(spec.at("p_max"))
                                       : Rat(15, 16),
                spec.at("seed").get<uint64_t>());
        if (family == "random-tree")
            return gen_random_tree(spec.at("max_nodes").get<int>(),
                                   spec.at("max_path").get<int>(),
                                   spec.at("seed").get<uint64_t>());
        if (family == "random-xos")
        {
            GeneratedArtifacts art = gen_random_bernoulli(
                spec.at("n").get<int>(), Rat(1, 16), Rat(15, 16),
                spec.at("seed").get<uint64_t>() ^ 0x9e3779b97f4a7c15ULL);
            art.norm = gen_random_xos(spec.at("n").get<int>(), spec.at("W").get<int>(),
                                      spec.value("density_pct", 60),
                                      spec.at("seed").get<uint64_t>());
            return art;
        }
        if (family == "random-topk")
        {
            GeneratedArtifacts art = gen_random_bernoulli(
                spec.at("n").get<int>(), Rat(1, 16), Rat(15, 16),
                spec.value("seed", static_cast<uint64_t>(0)));
            art.norm = gen_random_topk(spec.at("n").get<int>(),
                                       spec.at("ks").get<std::vector<int>>());
            return art;
        }
        throw InputError("unknown family '" + family + "'");
    }
    catch (const json::exception &ex)
    {
        throw InputError(std::string("malformed family spec: ") + ex.what());
    }
}

} // namespace probelab
