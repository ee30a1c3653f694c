#include "model.hpp"

#include "caps.hpp"

#include <algorithm>
#include <functional>

namespace probelab {

bool ElementDist::is_bernoulli() const
{
    return values.size() == 2 && values[0] == 0;
}

Rat ElementDist::bern_p() const
{
    if (!is_bernoulli())
        throw InputError("element is not Bernoulli");
    return probs[1];
}

Rat ElementDist::bern_c() const
{
    if (!is_bernoulli())
        throw InputError("element is not Bernoulli");
    return values[1];
}

Rat ElementDist::expectation() const
{
    Rat e = 0;
    for (size_t j = 0; j < values.size(); ++j)
        e += values[j] * probs[j];
    return e;
}

ElementDist make_dist(std::vector<Rat> values, std::vector<Rat> probs)
{
    if (values.size() != probs.size() || values.empty())
        throw InputError("distribution needs matching nonempty values/probs");
    std::vector<size_t> idx(values.size());
    for (size_t i = 0; i < idx.size(); ++i)
        idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](size_t a, size_t b) { return values[a] < values[b]; });
    ElementDist d;
    for (size_t i : idx)
    {
        if (!d.values.empty() && d.values.back() == values[i])
            d.probs.back() += probs[i];
        else
        {
            d.values.push_back(values[i]);
            d.probs.push_back(probs[i]);
        }
    }
    return d;
}

// ---------------------------------------------------------------------------
// FeasibilityConstraint

FeasibilityConstraint FeasibilityConstraint::length_bound(int r)
{
    FeasibilityConstraint c;
    c.kind = Kind::LengthBound;
    c.r = r;
    return c;
}

FeasibilityConstraint
FeasibilityConstraint::explicit_sequences(std::vector<std::vector<int>> seqs)
{
    FeasibilityConstraint c;
    c.kind = Kind::ExplicitSequences;
    c.sequences = std::move(seqs);
    return c;
}

FeasibilityConstraint
FeasibilityConstraint::downward_closed(std::vector<std::vector<int>> family)
{
    FeasibilityConstraint c;
    c.kind = Kind::DownwardClosed;
    c.sets = std::move(family);
    for (auto &s : c.sets)
        std::sort(s.begin(), s.end());
    return c;
}

const std::set<std::vector<int>> &FeasibilityConstraint::prefix_set() const
{
    if (!prefix_set_)
    {
        auto ps = std::make_shared<std::set<std::vector<int>>>();
        for (const auto &seq : sequences)
            for (size_t len = 0; len <= seq.size(); ++len)
                ps->insert(std::vector<int>(seq.begin(), seq.begin() + len));
        ps->insert({});
        prefix_set_ = ps;
    }
    return *prefix_set_;
}

bool FeasibilityConstraint::feasible(const std::vector<int> &seq) const
{
    std::set<int> seen;
    for (int e : seq)
        if (!seen.insert(e).second)
            return false;
    switch (kind)
    {
    case Kind::ExplicitSequences:
        return prefix_set().count(seq) > 0;
    case Kind::LengthBound:
        if (static_cast<int>(seq.size()) > r)
            return false;
        return inner ? inner->feasible(seq) : true;
    case Kind::DownwardClosed: {
        if (seq.empty())
            return true;
        for (const auto &s : sets)
        {
            bool ok = true;
            for (int e : seq)
                if (!std::binary_search(s.begin(), s.end(), e))
                {
                    ok = false;
                    break;
                }
            if (ok)
                return true;
        }
        return false;
    }
    }
    return false;
}

json FeasibilityConstraint::to_json() const
{
    json j;
    switch (kind)
    {
    case Kind::ExplicitSequences:
        j["kind"] = "explicit-sequences";
        j["sequences"] = sequences;
        break;
    case Kind::LengthBound:
        j["kind"] = "length-bound";
        j["r"] = r;
        if (inner)
            j["inner"] = inner->to_json();
        break;
    case Kind::DownwardClosed:
        j["kind"] = "downward-closed";
        j["sets"] = sets;
        break;
    }
    return j;
}

FeasibilityConstraint FeasibilityConstraint::from_json(const json &j)
{
    if (!j.is_object() || !j.contains("kind"))
        throw InputError("constraint must be an object with a 'kind'");
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "explicit-sequences")
        return explicit_sequences(j.at("sequences").get<std::vector<std::vector<int>>>());
    if (kind == "length-bound")
    {
        auto c = length_bound(j.at("r").get<int>());
        if (j.contains("inner"))
            c.inner = std::make_shared<FeasibilityConstraint>(from_json(j.at("inner")));
        return c;
    }
    if (kind == "downward-closed")
        return downward_closed(j.at("sets").get<std::vector<std::vector<int>>>());
    throw InputError("unknown constraint kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Instance

bool Instance::all_bernoulli() const
{
    for (const auto &d : elements)
        if (!d.is_bernoulli())
            return false;
    return true;
}

void Instance::validate() const
{
    if (n < 0 || static_cast<int>(elements.size()) != n)
        throw InputError("element count does not match n");
    for (int i = 0; i < n; ++i)
    {
        const auto &d = elements[i];
        if (d.values.empty() || d.values.size() != d.probs.size())
            throw InputError("element " + std::to_string(i + 1) +
                             ": malformed distribution");
        Rat sum = 0;
        for (size_t j = 0; j < d.values.size(); ++j)
        {
            if (d.values[j] < 0)
                throw InputError("element " + std::to_string(i + 1) +
                                 ": negative outcome value");
            if (d.probs[j] < 0 || d.probs[j] > 1)
                throw InputError("element " + std::to_string(i + 1) +
                                 ": probability outside [0,1]");
            if (j > 0 && !(d.values[j - 1] < d.values[j]))
                throw InputError("element " + std::to_string(i + 1) +
                                 ": support not strictly increasing");
            sum += d.probs[j];
        }
        if (sum != 1)
            throw InputError("element " + std::to_string(i + 1) +
                             ": probabilities sum to " + rat_str(sum));
        if (d.is_bernoulli() && d.bern_p() == 0)
            throw InputError("element " + std::to_string(i + 1) +
                             ": activation probability 0 is rejected");
    }
    if (constraint.kind == FeasibilityConstraint::Kind::ExplicitSequences ||
        constraint.kind == FeasibilityConstraint::Kind::DownwardClosed)
    {
        auto check_range = [&](const std::vector<std::vector<int>> &seqs) {
            for (const auto &s : seqs)
                for (int e : s)
                    if (e < 1 || e > n)
                        throw InputError("constraint references element " +
                                         std::to_string(e) + " outside [1,n]");
        };
        check_range(constraint.kind == FeasibilityConstraint::Kind::ExplicitSequences
                        ? constraint.sequences
                        : constraint.sets);
    }
}

json Instance::to_json() const
{
    json j;
    j["n"] = n;
    j["elements"] = json::array();
    for (const auto &d : elements)
    {
        json e;
        e["values"] = json::array();
        e["probs"] = json::array();
        for (const auto &v : d.values)
            e["values"].push_back(rat_to_json(v));
        for (const auto &p : d.probs)
            e["probs"].push_back(rat_to_json(p));
        j["elements"].push_back(e);
    }
    j["constraint"] = constraint.to_json();
    return j;
}

Instance Instance::from_json(const json &j)
{
    Instance inst;
    try
    {
        inst.n = j.at("n").get<int>();
        for (const auto &e : j.at("elements"))
        {
            std::vector<Rat> values, probs;
            for (const auto &v : e.at("values"))
                values.push_back(rat_from_json(v));
            for (const auto &p : e.at("probs"))
                probs.push_back(rat_from_json(p));
            inst.elements.push_back(make_dist(values, probs));
        }
        inst.constraint = FeasibilityConstraint::from_json(j.at("constraint"));
    }
    catch (const json::exception &ex)
    {
        throw InputError(std::string("malformed instance JSON: ") + ex.what());
    }
    inst.validate();
    return inst;
}

// ---------------------------------------------------------------------------
// DecisionTree

void DecisionTree::finalize()
{
    parent.assign(nodes.size(), -1);
    arc.assign(nodes.size(), -1);
    for (size_t u = 0; u < nodes.size(); ++u)
        for (size_t j = 0; j < nodes[u].kids.size(); ++j)
        {
            int k = nodes[u].kids[j];
            if (k < 0 || k >= static_cast<int>(nodes.size()))
                throw InputError("tree child id out of range");
            parent[k] = static_cast<int>(u);
            arc[k] = static_cast<int>(j);
        }
}

std::vector<int> DecisionTree::leaves() const
{
    std::vector<int> out;
    std::function<void(int)> dfs = [&](int u) {
        if (nodes[u].leaf())
        {
            out.push_back(u);
            return;
        }
        for (int k : nodes[u].kids)
            dfs(k);
    };
    dfs(root);
    return out;
}

std::vector<int> DecisionTree::path_to_root(int u) const
{
    std::vector<int> out;
    for (int v = u; v != -1; v = parent[v])
        out.push_back(v);
    return out;
}

json DecisionTree::to_json() const
{
    json j;
    j["root"] = root;
    j["nodes"] = json::array();
    for (const auto &nd : nodes)
    {
        json e;
        e["elt"] = nd.elt;
        e["kids"] = nd.kids;
        j["nodes"].push_back(e);
    }
    return j;
}

DecisionTree DecisionTree::from_json(const json &j)
{
    DecisionTree t;
    try
    {
        t.root = j.at("root").get<int>();
        for (const auto &e : j.at("nodes"))
        {
            TreeNode nd;
            nd.elt = e.at("elt").get<int>();
            nd.kids = e.at("kids").get<std::vector<int>>();
            t.nodes.push_back(nd);
        }
    }
    catch (const json::exception &ex)
    {
        throw InputError(std::string("malformed tree JSON: ") + ex.what());
    }
    if (t.nodes.empty() || t.root < 0 || t.root >= static_cast<int>(t.nodes.size()))
        throw InputError("tree root out of range");
    t.finalize();
    return t;
}

// ---------------------------------------------------------------------------
// Tree operations

std::vector<std::string> validate_tree(const DecisionTree &t, const Instance &inst)
{
    std::vector<std::string> violations;
    if (t.nodes.empty())
    {
        violations.push_back("tree is empty");
        return violations;
    }
    std::vector<int> path;
    std::set<int> on_path;
    std::function<void(int)> dfs = [&](int u) {
        const auto &nd = t.nodes[u];
        if (nd.leaf())
        {
            if (nd.elt != 0)
                violations.push_back("leaf " + std::to_string(u) +
                                     " carries element " + std::to_string(nd.elt) +
                                     " instead of dummy 0");
            if (!inst.constraint.feasible(path))
                violations.push_back("root-leaf sequence at leaf " +
                                     std::to_string(u) + " is infeasible");
            return;
        }
        if (nd.elt < 1 || nd.elt > inst.n)
        {
            violations.push_back("internal node " + std::to_string(u) +
                                 " has element " + std::to_string(nd.elt) +
                                 " outside [1,n]");
            return;
        }
        if (nd.kids.size() != inst.dist(nd.elt).values.size())
            violations.push_back("node " + std::to_string(u) + " has " +
                                 std::to_string(nd.kids.size()) +
                                 " children but element " + std::to_string(nd.elt) +
                                 " has support size " +
                                 std::to_string(inst.dist(nd.elt).values.size()));
        if (!on_path.insert(nd.elt).second)
        {
            violations.push_back("element " + std::to_string(nd.elt) +
                                 " repeats on a root-leaf path");
            return;
        }
        path.push_back(nd.elt);
        for (int k : nd.kids)
            dfs(k);
        path.pop_back();
        on_path.erase(nd.elt);
    };
    dfs(t.root);
    return violations;
}

std::vector<std::pair<int, Rat>> leaf_distribution(const DecisionTree &t,
                                                   const Instance &inst)
{
    std::vector<std::pair<int, Rat>> out;
    std::function<void(int, Rat)> dfs = [&](int u, Rat pr) {
        const auto &nd = t.nodes[u];
        if (nd.leaf())
        {
            out.emplace_back(u, pr);
            return;
        }
        const auto &d = inst.dist(nd.elt);
        for (size_t j = 0; j < nd.kids.size(); ++j)
            dfs(nd.kids[j], pr * d.probs[j]);
    };
    dfs(t.root, Rat(1));
    return out;
}

PathInfo path_info(const DecisionTree &t, int leaf)
{
    if (leaf < 0 || leaf >= static_cast<int>(t.nodes.size()) || !t.is_leaf(leaf))
        throw InputError("unknown leaf id " + std::to_string(leaf));
    PathInfo pi;
    pi.leaf = leaf;
    auto up = t.path_to_root(leaf);
    pi.P.assign(up.rbegin(), up.rend());
    int d = 0;
    for (size_t i = 0; i < pi.P.size(); ++i)
    {
        int u = pi.P[i];
        pi.depth[u] = d;
        if (i + 1 < pi.P.size())
        {
            int next = pi.P[i + 1];
            if (t.arc[next] >= 1)
            {
                pi.A.push_back(u);
                ++d;
            }
        }
    }
    return pi;
}

std::vector<std::vector<int>> enumerate_feasible(const Instance &inst, int max_len)
{
    if (max_len > caps().enum_len)
        throw CapError("enumerate_feasible: max_len " + std::to_string(max_len) +
                       " exceeds cap " + std::to_string(caps().enum_len));
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::function<void()> dfs = [&]() {
        out.push_back(cur);
        if (static_cast<int>(cur.size()) >= max_len)
            return;
        for (int e = 1; e <= inst.n; ++e)
        {
            if (std::find(cur.begin(), cur.end(), e) != cur.end())
                continue;
            cur.push_back(e);
            if (inst.constraint.feasible(cur))
                dfs();
            cur.pop_back();
        }
    };
    dfs();
    return out;
}

Rat rat_from_json(const json &j)
{
    if (j.is_string())
        return rat_parse(j.get<std::string>());
    if (j.is_number_integer())
        return Rat(j.get<long long>());
    throw InputError("rational values must be \"num/den\" strings or integers");
}

json rat_to_json(const Rat &x) { return json(rat_str(x)); }

} // namespace probelab
