#include "norms.hpp"

#include <algorithm>
#include <random>

namespace probelab {

Norm make_linear(std::vector<Rat> w)
{
    for (const auto &x : w)
        if (x < 0)
            throw InputError("linear norm weights must be nonnegative");
    Norm f;
    f.dim = static_cast<int>(w.size());
    f.v = LinearNorm{std::move(w)};
    return f;
}

static void check_matrix(const std::vector<std::vector<Rat>> &vecs, bool binary)
{
    if (vecs.empty())
        throw InputError("XOS norm needs at least one weight vector");
    for (const auto &row : vecs)
    {
        if (row.size() != vecs[0].size())
            throw InputError("XOS weight vectors must share a length");
        for (const auto &x : row)
        {
            if (x < 0)
                throw InputError("XOS weights must be nonnegative");
            if (binary && x != 0 && x != 1)
                throw InputError("binary-XOS weights must be 0 or 1");
        }
    }
}

Norm make_xos(std::vector<std::vector<Rat>> vecs)
{
    check_matrix(vecs, false);
    Norm f;
    f.dim = static_cast<int>(vecs[0].size());
    f.v = XosNorm{std::move(vecs)};
    return f;
}

Norm make_binary_xos(std::vector<std::vector<Rat>> vecs)
{
    check_matrix(vecs, true);
    Norm f;
    f.dim = static_cast<int>(vecs[0].size());
    f.v = BinaryXosNorm{std::move(vecs)};
    return f;
}

Norm make_symmetric(std::vector<std::vector<Rat>> profiles, int dim)
{
    for (const auto &p : profiles)
        for (size_t j = 0; j < p.size(); ++j)
        {
            if (p[j] < 0)
                throw InputError("symmetric profiles must be nonnegative");
            if (j > 0 && p[j] > p[j - 1])
                throw InputError("symmetric profiles must be nonincreasing");
        }
    Norm f;
    f.dim = dim;
    f.v = SymmetricNorm{std::move(profiles)};
    return f;
}

Norm make_special_xos(std::vector<std::vector<int>> families, int dim)
{
    for (auto &fam : families)
    {
        std::sort(fam.begin(), fam.end());
        for (int e : fam)
            if (e < 1 || e > dim)
                throw InputError("special-XOS family references element outside [1,n]");
    }
    Norm f;
    f.dim = dim;
    f.v = SpecialXosNorm{std::move(families)};
    return f;
}

static Rat dot(const std::vector<Rat> &a, const std::vector<Rat> &b)
{
    Rat s = 0;
    size_t m = std::min(a.size(), b.size());
    for (size_t i = 0; i < m; ++i)
        s += a[i] * b[i];
    return s;
}

Rat evaluate(const Norm &f, const std::vector<Rat> &v)
{
    if (static_cast<int>(v.size()) != f.dim)
        throw InputError("vector length does not match norm dimension");
    for (const auto &x : v)
        if (x < 0)
            throw InputError("norm arguments must be nonnegative");
    return std::visit(
        [&](const auto &g) -> Rat {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, LinearNorm>)
                return dot(g.w, v);
            else if constexpr (std::is_same_v<T, XosNorm> ||
                               std::is_same_v<T, BinaryXosNorm>)
            {
                Rat best = 0;
                for (const auto &row : g.vecs)
                    best = std::max(best, dot(row, v));
                return best;
            }
            else if constexpr (std::is_same_v<T, SymmetricNorm>)
            {
                std::vector<Rat> s = v;
                std::sort(s.begin(), s.end(), std::greater<Rat>());
                Rat best = 0;
                for (const auto &p : g.profiles)
                    best = std::max(best, dot(p, s));
                return best;
            }
            else if constexpr (std::is_same_v<T, SpecialXosNorm>)
            {
                Rat best = 0;
                for (const auto &fam : g.families)
                {
                    Rat s = 0;
                    for (int e : fam)
                        s += v[e - 1];
                    best = std::max(best, s);
                }
                return best;
            }
            else // InducedNorm
            {
                size_t pos = 0;
                if (!g.top_n)
                {
                    std::vector<Rat> y(g.coeffs.size(), Rat(0));
                    for (size_t i = 0; i < g.coeffs.size(); ++i)
                        for (size_t j = 0; j < g.coeffs[i].size(); ++j)
                            y[i] = std::max(y[i], g.coeffs[i][j] * v[pos++]);
                    return evaluate(*g.base, y);
                }
                std::vector<Rat> z;
                for (size_t i = 0; i < g.coeffs.size(); ++i)
                    for (size_t j = 0; j < g.coeffs[i].size(); ++j)
                        z.push_back(g.coeffs[i][j] * v[pos++]);
                std::sort(z.begin(), z.end(), std::greater<Rat>());
                z.resize(g.base->dim, Rat(0));
                return evaluate(*g.base, z);
            }
        },
        f.v);
}

Rat evaluate_subset(const Norm &f, const std::vector<int> &S,
                    const std::vector<Rat> &values)
{
    std::vector<Rat> v(f.dim, Rat(0));
    for (int e : S)
    {
        if (e < 1 || e > f.dim)
            throw InputError("subset element outside [1,n]");
        v[e - 1] = values.at(e - 1);
    }
    return evaluate(f, v);
}

Rat evaluate_set(const Norm &f, const std::vector<int> &S)
{
    std::vector<Rat> ones(f.dim, Rat(1));
    return evaluate_subset(f, S, ones);
}

// ---------------------------------------------------------------------------
// Axiom verification

static std::vector<Rat> random_vector(std::mt19937_64 &rng, int dim)
{
    std::vector<Rat> v(dim);
    for (auto &x : v)
        x = Rat(static_cast<long>(rng() % 17), 8);
    return v;
}

AxiomCheck verify_axioms_fn(const std::function<Rat(const std::vector<Rat> &)> &f,
                            int dim, int trials, uint64_t seed,
                            bool homogeneous_expected)
{
    AxiomCheck rep;
    auto note = [&](bool &flag, const std::string &msg) {
        flag = false;
        if (rep.counterexamples.size() < 20)
            rep.counterexamples.push_back(msg);
    };
    auto vec_str = [](const std::vector<Rat> &v) {
        std::string s = "(";
        for (size_t i = 0; i < v.size(); ++i)
            s += (i ? "," : "") + rat_str(v[i]);
        return s + ")";
    };

    if (f(std::vector<Rat>(dim, Rat(0))) != 0)
        note(rep.normalized, "f(0) != 0");

    std::mt19937_64 rng(seed);
    for (int t = 0; t < trials; ++t)
    {
        auto u = random_vector(rng, dim);
        auto w = random_vector(rng, dim);
        std::vector<Rat> sum(dim);
        for (int i = 0; i < dim; ++i)
            sum[i] = u[i] + w[i];
        if (f(sum) > f(u) + f(w))
            note(rep.subadditive, "subadditivity fails at u=" + vec_str(u) +
                                      " v=" + vec_str(w));
        if (f(sum) < f(u))
            note(rep.monotone, "monotonicity fails at u=" + vec_str(u) +
                                   " u+v=" + vec_str(sum));
        if (homogeneous_expected)
        {
            Rat theta(static_cast<long>(rng() % 9), 4);
            std::vector<Rat> su(dim);
            for (int i = 0; i < dim; ++i)
                su[i] = theta * u[i];
            if (f(su) != theta * f(u))
                note(rep.homogeneous,
                     "homogeneity fails at theta=" + rat_str(theta) +
                         " u=" + vec_str(u));
        }
    }

    if (dim <= 4)
    {
        rep.exhaustive_grid = true;
        std::vector<std::vector<Rat>> grid;
        std::vector<Rat> cur(dim, Rat(0));
        std::function<void(int)> gen = [&](int i) {
            if (i == dim)
            {
                grid.push_back(cur);
                return;
            }
            for (int k = 0; k <= 2; ++k)
            {
                cur[i] = Rat(k);
                gen(i + 1);
            }
        };
        gen(0);
        for (const auto &u : grid)
            for (const auto &w : grid)
            {
                std::vector<Rat> sum(dim);
                bool leq = true;
                for (int i = 0; i < dim; ++i)
                {
                    sum[i] = u[i] + w[i];
                    if (u[i] > w[i])
                        leq = false;
                }
                if (f(sum) > f(u) + f(w))
                    note(rep.subadditive,
                         "grid subadditivity fails at u=" + vec_str(u) +
                             " v=" + vec_str(w));
                if (leq && f(u) > f(w))
                    note(rep.monotone, "grid monotonicity fails at u=" + vec_str(u) +
                                           " v=" + vec_str(w));
            }
    }
    return rep;
}

AxiomCheck verify_norm_axioms(const Norm &f, int trials, uint64_t seed)
{
    return verify_axioms_fn([&](const std::vector<Rat> &v) { return evaluate(f, v); },
                            f.dim, trials, seed);
}

// ---------------------------------------------------------------------------
// Bucketing

static const std::vector<std::vector<Rat>> &xos_vectors(const Norm &f)
{
    if (auto *x = std::get_if<XosNorm>(&f.v))
        return x->vecs;
    if (auto *b = std::get_if<BinaryXosNorm>(&f.v))
        return b->vecs;
    throw InputError("round_and_bucket requires an XOS norm");
}

std::vector<LeafBuckets> round_and_bucket(const Norm &f, const DecisionTree &t,
                                          int r)
{
    const auto &vecs = xos_vectors(f);
    for (const auto &row : vecs)
        for (const auto &w : row)
            if (w >= 1)
                throw InputError("round_and_bucket requires all weights < 1");
    if (r < 1)
        throw InputError("round_and_bucket requires r >= 1");
    int jmax = static_cast<int>(msb(BigInt(r))) + 1; // floor(log2 r) + 1

    std::vector<LeafBuckets> out;
    for (int leaf : t.leaves())
    {
        PathInfo pi = path_info(t, leaf);
        LeafBuckets lb;
        lb.leaf = leaf;
        Rat best = -1;
        for (size_t i = 0; i < vecs.size(); ++i)
        {
            Rat s = 0;
            for (int u : pi.A)
                s += vecs[i][t.elt(u) - 1];
            if (s > best)
            {
                best = s;
                lb.maximizer = static_cast<int>(i);
            }
        }
        for (int u : pi.A)
        {
            Rat w = vecs[lb.maximizer][t.elt(u) - 1];
            int bucket = 0;
            if (w > 0)
            {
                int j = 1;
                while (j <= jmax && rat_pow2(-j) > w)
                    ++j;
                bucket = (j <= jmax) ? j : 0;
            }
            lb.bucket[bucket].push_back(u);
        }
        out.push_back(std::move(lb));
    }
    return out;
}

Norm build_special_xos(const DecisionTree &t,
                       const std::map<int, std::vector<int>> &subsets)
{
    int n = 0;
    for (const auto &nd : t.nodes)
        n = std::max(n, nd.elt);
    std::vector<std::vector<int>> families;
    for (const auto &[leaf, nodes] : subsets)
    {
        PathInfo pi = path_info(t, leaf);
        std::set<int> active(pi.A.begin(), pi.A.end());
        std::vector<int> fam;
        for (int u : nodes)
        {
            if (!active.count(u))
                throw InputError("A' subset at leaf " + std::to_string(leaf) +
                                 " contains non-active-ancestor node " +
                                 std::to_string(u));
            fam.push_back(t.elt(u));
        }
        families.push_back(std::move(fam));
    }
    return make_special_xos(std::move(families), n);
}

// ---------------------------------------------------------------------------
// JSON

json Norm::to_json() const
{
    json j;
    std::visit(
        [&](const auto &g) {
            using T = std::decay_t<decltype(g)>;
            auto mat = [&](const std::vector<std::vector<Rat>> &vecs) {
                json rows = json::array();
                for (const auto &row : vecs)
                {
                    json r = json::array();
                    for (const auto &x : row)
                        r.push_back(rat_to_json(x));
                    rows.push_back(r);
                }
                return rows;
            };
            if constexpr (std::is_same_v<T, LinearNorm>)
            {
                j["kind"] = "linear";
                json w = json::array();
                for (const auto &x : g.w)
                    w.push_back(rat_to_json(x));
                j["weights"] = w;
            }
            else if constexpr (std::is_same_v<T, XosNorm>)
            {
                j["kind"] = "xos";
                j["vectors"] = mat(g.vecs);
            }
            else if constexpr (std::is_same_v<T, BinaryXosNorm>)
            {
                j["kind"] = "binary-xos";
                j["vectors"] = mat(g.vecs);
            }
            else if constexpr (std::is_same_v<T, SymmetricNorm>)
            {
                j["kind"] = "symmetric";
                j["dim"] = dim;
                j["profiles"] = mat(g.profiles);
            }
            else if constexpr (std::is_same_v<T, SpecialXosNorm>)
            {
                j["kind"] = "special-xos";
                j["dim"] = dim;
                j["families"] = g.families;
            }
            else
            {
                j["kind"] = "induced";
                j["top_n"] = g.top_n;
                j["base"] = g.base->to_json();
                j["coeffs"] = mat(g.coeffs);
            }
        },
        v);
    return j;
}

static std::vector<std::vector<Rat>> mat_from_json(const json &j)
{
    std::vector<std::vector<Rat>> m;
    for (const auto &row : j)
    {
        std::vector<Rat> r;
        for (const auto &x : row)
            r.push_back(rat_from_json(x));
        m.push_back(std::move(r));
    }
    return m;
}

Norm Norm::from_json(const json &j)
{
    try
    {
        std::string kind = j.at("kind").get<std::string>();
        if (kind == "linear")
        {
            std::vector<Rat> w;
            for (const auto &x : j.at("weights"))
                w.push_back(rat_from_json(x));
            return make_linear(std::move(w));
        }
        if (kind == "xos")
            return make_xos(mat_from_json(j.at("vectors")));
        if (kind == "binary-xos")
            return make_binary_xos(mat_from_json(j.at("vectors")));
        if (kind == "symmetric")
            return make_symmetric(mat_from_json(j.at("profiles")),
                                  j.at("dim").get<int>());
        if (kind == "special-xos")
            return make_special_xos(
                j.at("families").get<std::vector<std::vector<int>>>(),
                j.at("dim").get<int>());
        if (kind == "induced")
        {
            InducedNorm g;
            g.top_n = j.at("top_n").get<bool>();
            g.base = std::make_shared<Norm>(from_json(j.at("base")));
            g.coeffs = mat_from_json(j.at("coeffs"));
            Norm f;
            f.dim = 0;
            for (const auto &row : g.coeffs)
                f.dim += static_cast<int>(row.size());
            f.v = std::move(g);
            return f;
        }
        throw InputError("unknown norm kind '" + kind + "'");
    }
    catch (const json::exception &ex)
    {
        throw InputError(std::string("malformed norm JSON: ") + ex.what());
    }
}

} // namespace probelab
