#include "labeling.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace probelab {

// ---------------------------------------------------------------------------
// Label

Label Label::prefix(int a) const
{
    if (a < 1 || a > m)
        throw InputError("label prefix index out of range");
    Label p;
    p.m = a;
    p.s = s;
    p.d.assign(d.begin(), d.begin() + a);
    p.e.assign(e.begin(), e.begin() + a);
    p.y = y;
    return p;
}

json Label::to_json() const
{
    json j = json::array();
    j.push_back(m);
    j.push_back(s);
    for (int x : d)
        j.push_back(x);
    for (int x : e)
        j.push_back(x);
    for (int x : y)
        j.push_back(x);
    return j;
}

Label Label::from_json(const json &j, int K)
{
    if (!j.is_array() || j.size() < 2)
        throw InputError("label JSON must be an array [m, s, d..., e..., y...]");
    Label b;
    size_t pos = 0;
    b.m = j.at(pos++).get<int>();
    b.s = j.at(pos++).get<int>();
    if (b.m < 1 || b.s < 0 || K < 1)
        throw InputError("malformed label header");
    size_t ylen = static_cast<size_t>(b.s / K);
    if (j.size() != 2 + 2 * static_cast<size_t>(b.m) + ylen)
        throw InputError("label JSON length does not match (m, s, K)");
    for (int i = 0; i < b.m; ++i)
        b.d.push_back(j.at(pos++).get<int>());
    for (int i = 0; i < b.m; ++i)
        b.e.push_back(j.at(pos++).get<int>());
    for (size_t i = 0; i < ylen; ++i)
        b.y.push_back(j.at(pos++).get<int>());
    return b;
}

std::string Label::str() const
{
    std::string s_ = "(" + std::to_string(m) + ";" + std::to_string(s) + ";d=";
    for (int x : d)
        s_ += std::to_string(x) + " ";
    s_ += ";e=";
    for (int x : e)
        s_ += std::to_string(x) + " ";
    s_ += ";y=";
    for (int x : y)
        s_ += std::to_string(x) + " ";
    return s_ + ")";
}

bool label_valid(const Label &B, int n, int K)
{
    if (B.m < 1 || B.s < 0 || B.s > n)
        return false;
    if (static_cast<int>(B.d.size()) != B.m || static_cast<int>(B.e.size()) != B.m)
        return false;
    if (static_cast<int>(B.y.size()) != B.s / K)
        return false;
    for (int i = 0; i < B.m; ++i)
    {
        if (B.d[i] < 0 || B.d[i] > n)
            return false;
        if (i > 0 && B.d[i] >= B.d[i - 1])
            return false;
    }
    if (B.e[0] != 0)
        return false;
    for (int i = 1; i < B.m; ++i)
    {
        if (B.e[i] < 1 || B.e[i] > n)
            return false;
        for (int k = 1; k < i; ++k)
            if (B.e[k] == B.e[i])
                return false;
    }
    for (size_t i = 0; i < B.y.size(); ++i)
    {
        if (B.y[i] < 0 || B.y[i] > n)
            return false;
        if (i > 0 && B.y[i] >= B.y[i - 1])
            return false;
    }
    return true;
}

int preset_k3(int n)
{
    if (n < 1)
        throw InputError("preset_k3 requires n >= 1");
    return static_cast<int>(std::ceil(25.0 * std::log2(double(n)) - 1e-9)) + 25;
}

int preset_k4(int n)
{
    if (n < 3)
        throw InputError("preset_k4 requires n >= 3");
    double ll = std::log2(std::log2(double(n)));
    return 50 * static_cast<int>(
                    std::ceil(std::log2(double(n)) / ll - 1e-9)) +
           50;
}

double g_eval(int h, double p)
{
    if (h < 0 || p < 0 || p > 1)
        throw InputError("g_eval requires h >= 0 and p in [0,1]");
    if (h == 0)
        return p;
    return p * std::exp(-0.1 * h * std::pow(p, 1.0 / h));
}

GridCheckReport g_inequality_check(int grid_steps, int h_max, double slack)
{
    if (grid_steps < 1 || h_max < 1)
        throw InputError("grid check requires positive sizes");
    GridCheckReport rep;
    std::vector<std::vector<double>> table(h_max + 1,
                                           std::vector<double>(grid_steps + 1));
    for (int h = 0; h <= h_max; ++h)
        for (int i = 0; i <= grid_steps; ++i)
            table[h][i] = g_eval(h, double(i) / grid_steps);
    for (int h = 1; h <= h_max; ++h)
        for (int il = 0; il <= grid_steps; ++il)
        {
            double lam = double(il) / grid_steps;
            for (int ip = 0; ip <= grid_steps; ++ip)
            {
                double p = double(ip) / grid_steps;
                for (int iq = 0; iq <= grid_steps; ++iq)
                {
                    double q = double(iq) / grid_steps;
                    double lhs = g_eval(h, lam * p + (1 - lam) * q);
                    double rhs = (1 - lam) * (lam * table[h - 1][ip] +
                                              (1 - lam) * table[h][iq]);
                    ++rep.checked;
                    if (lhs < rhs - slack)
                    {
                        ++rep.violations;
                        rep.pass = false;
                        rep.worst_violation =
                            std::max(rep.worst_violation, rhs - lhs);
                    }
                }
            }
        }
    return rep;
}

// ---------------------------------------------------------------------------
// LabelingWorkbench

LabelingWorkbench::LabelingWorkbench(const DecisionTree &t, const Instance &inst,
                                     int K, std::map<int, std::vector<int>> aprime)
    : t_(t), inst_(inst), K_(K), aprime_(std::move(aprime))
{
    if (K_ < 1)
        throw InputError("labeling requires K >= 1");
    if (!inst_.all_bernoulli())
        throw InputError("labeling requires a Bernoulli instance");
    auto violations = validate_tree(t_, inst_);
    if (!violations.empty())
        throw InputError("labeling: invalid tree: " + violations.front());
    leaves_ = t_.leaves();
    node_depth_.assign(t_.nodes.size(), 0);
    std::function<void(int, int)> dfs = [&](int u, int depth) {
        node_depth_[u] = depth;
        const auto &kids = t_.nodes[u].kids;
        for (size_t j = 0; j < kids.size(); ++j)
            dfs(kids[j], depth + (j >= 1 ? 1 : 0));
    };
    dfs(t_.root, 0);
    for (int leaf : leaves_)
    {
        pinfo_.emplace(leaf, path_info(t_, leaf));
        auto it = aprime_.find(leaf);
        if (it == aprime_.end())
        {
            aprime_[leaf] = {};
            continue;
        }
        const auto &pi = pinfo_.at(leaf);
        std::set<int> active(pi.A.begin(), pi.A.end());
        for (int u : it->second)
            if (!active.count(u))
                throw InputError("A' at leaf " + std::to_string(leaf) +
                                 " is not a subset of its active ancestors");
        // keep A' sorted by decreasing depth (bottom first)
        std::sort(it->second.begin(), it->second.end(), [&](int a, int b) {
            return node_depth_[a] > node_depth_[b];
        });
    }
}

Norm LabelingWorkbench::special_xos() const
{
    return build_special_xos(t_, aprime_);
}

Label LabelingWorkbench::leaf_label(int leaf) const
{
    const auto &ap = aprime_.at(leaf);
    Label B;
    B.m = 1;
    B.s = static_cast<int>(ap.size());
    B.d = {node_depth_[leaf]};
    B.e = {0};
    for (int i = 1; i <= B.s / K_; ++i)
        B.y.push_back(node_depth_[ap[i * K_ - 1]]); // iK-th from the bottom
    return B;
}

bool LabelingWorkbench::in_level1(int leaf, const Label &B) const
{
    Label mine = leaf_label(leaf);
    return mine.s == B.s && mine.d[0] == B.d[0] && mine.y == B.y;
}

int LabelingWorkbench::witness(const Label &B, int a) const
{
    for (int leaf : leaves_)
    {
        if (!in_level1(leaf, B))
            continue;
        bool ok = true;
        for (int i = 2; i <= a && ok; ++i)
        {
            // the unique A' node at depth d_i must represent e_i
            bool found = false;
            for (int u : aprime_.at(leaf))
                if (node_depth_[u] == B.d[i - 1])
                {
                    found = (t_.elt(u) == B.e[i - 1]);
                    break;
                }
            ok = found;
        }
        if (ok)
            return leaf; // leaves_ is DFS order, so this is the leftmost
    }
    return -1;
}

std::vector<int> LabelingWorkbench::level_set(const Label &B, int a) const
{
    if (a < 1 || a > B.m)
        throw InputError("level_set index out of range");
    Label Bp = B.prefix(a);
    std::vector<int> out;
    if (a == 1)
    {
        for (int leaf : leaves_)
            if (in_level1(leaf, Bp))
                out.push_back(leaf);
        return out;
    }
    if (witness(Bp, a) == -1)
        return out;
    for (size_t u = 0; u < t_.nodes.size(); ++u)
        if (!t_.is_leaf(static_cast<int>(u)) &&
            node_depth_[u] == Bp.d[a - 1] && t_.elt(static_cast<int>(u)) == Bp.e[a - 1])
            out.push_back(static_cast<int>(u));
    return out;
}

std::vector<int> LabelingWorkbench::special_ancestors(const Label &B, int u) const
{
    int a = B.m;
    auto lvl = level_set(B, a);
    if (std::find(lvl.begin(), lvl.end(), u) == lvl.end())
        throw InputError("special_ancestors: node is not in the level set");
    int src = (a == 1) ? u : witness(B, a);
    std::vector<int> out;
    for (int w : aprime_.at(src))
        if (node_depth_[w] < B.d[a - 1])
            out.push_back(w);
    return out;
}

LabelingWorkbench::RunResult LabelingWorkbench::run_labeling(
    int leaf, const std::set<int> &R) const
{
    RunResult res;
    res.label = leaf_label(leaf);
    res.triggers = {leaf};
    // climb every internal ancestor, the root included
    for (int u = t_.parent[leaf]; u != -1; u = t_.parent[u])
    {
        if (!(R.count(t_.elt(u)) || u == leaf))
            continue;
        const Label &B = res.label;
        int dd = node_depth_[u];
        int ee = t_.elt(u);
        Label B1 = B;
        B1.m += 1;
        B1.d.push_back(dd);
        B1.e.push_back(ee);
        if (!label_valid(B1, inst_.n, K_))
            continue;
        if (witness(B1, B1.m) == -1) // u not in L_{a+1}(B1)
            continue;
        res.label = std::move(B1);
        res.triggers.push_back(u);
    }
    return res;
}

const std::vector<LabelingWorkbench::Outcome> &LabelingWorkbench::outcomes() const
{
    if (!outcomes_.empty())
        return outcomes_;
    auto dist = leaf_distribution(t_, inst_);
    std::map<int, Rat> pi;
    for (auto &[leaf, pr] : dist)
        pi[leaf] = pr;
    for (int leaf : leaves_)
    {
        const auto &pinf = pinfo_.at(leaf);
        std::vector<int> elems;
        for (int u : pinf.P)
            if (!t_.is_leaf(u))
                elems.push_back(t_.elt(u));
        size_t count = size_t(1) << elems.size();
        for (size_t mask = 0; mask < count; ++mask)
        {
            Outcome oc;
            oc.leaf = leaf;
            oc.prob = pi[leaf];
            for (size_t i = 0; i < elems.size(); ++i)
            {
                Rat p = inst_.dist(elems[i]).bern_p();
                if (mask & (size_t(1) << i))
                {
                    oc.R.insert(elems[i]);
                    oc.prob *= p;
                }
                else
                    oc.prob *= 1 - p;
            }
            oc.label = run_labeling(leaf, oc.R).label;
            outcomes_.push_back(std::move(oc));
        }
    }
    return outcomes_;
}

TailReport LabelingWorkbench::tail_check() const
{
    std::map<Label, Rat> mass;
    for (const auto &oc : outcomes())
        mass[oc.label] += oc.prob;
    TailReport rep;
    for (auto &[label, prob] : mass)
    {
        TailEntry e;
        e.label = label;
        e.prob = prob;
        e.bound = rat_pow2(label.m * K_ - label.s);
        e.pass = prob <= e.bound;
        if (!e.pass)
            rep.pass = false;
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

std::vector<Label> LabelingWorkbench::realized_labels() const
{
    std::set<Label> seen;
    for (const auto &oc : outcomes())
        seen.insert(oc.label);
    return {seen.begin(), seen.end()};
}

const AnalysisSets &LabelingWorkbench::analysis_sets(const Label &B0) const
{
    auto it = analysis_cache_.find(B0);
    if (it != analysis_cache_.end())
        return it->second;
    if (!label_valid(B0, inst_.n, K_))
        throw InputError("analysis_sets: invalid label " + B0.str());

    AnalysisSets as;
    as.B0 = B0;
    for (const auto &oc : outcomes())
    {
        if (!(oc.label == B0))
            continue;
        if (as.v.count(oc.leaf))
            continue;
        as.S.push_back(oc.leaf);
        as.v[oc.leaf] = run_labeling(oc.leaf, oc.R).triggers;
    }

    for (int leaf : as.S)
    {
        const auto &pinf = pinfo_.at(leaf);
        std::map<int, int> pos;
        for (size_t i = 0; i < pinf.P.size(); ++i)
            pos[pinf.P[i]] = static_cast<int>(i);
        const auto &vs = as.v.at(leaf);
        std::set<int> impset;
        for (int a = 1; a <= B0.m; ++a)
        {
            for (int u : pinf.P)
            {
                if (t_.is_leaf(u))
                    continue;
                int dd = node_depth_[u];
                int ee = t_.elt(u);
                Label B1 = B0.prefix(a);
                B1.m += 1;
                B1.d.push_back(dd);
                B1.e.push_back(ee);
                if (!label_valid(B1, inst_.n, K_))
                    continue;
                if (a < B0.m)
                {
                    // strict descendant of v_{a+1}
                    int va1 = vs[a]; // vs[0] = leaf = v_1, vs[a] = v_{a+1}
                    if (pos[u] <= pos[va1])
                        continue;
                }
                if (witness(B1, B1.m) == -1)
                    continue;
                impset.insert(u);
            }
        }
        as.imp[leaf] = {impset.begin(), impset.end()};
        as.T.insert(impset.begin(), impset.end());
    }

    // depth intervals I_j = [y_j, y_{j-1}), y_0 = d_1; J marks intervals
    // hit by some d_i, i >= 2
    int jcount = B0.s / K_;
    for (int j = 1; j <= jcount; ++j)
    {
        int hi = (j == 1) ? B0.d[0] : B0.y[j - 2];
        int lo = B0.y[j - 1];
        bool hit = false;
        for (int i = 2; i <= B0.m; ++i)
            if (B0.d[i - 1] >= lo && B0.d[i - 1] < hi)
                hit = true;
        if (hit)
            as.J.insert(j);
        else
            as.intervals.emplace_back(lo, hi);
    }
    for (int u : as.T)
        for (auto &[lo, hi] : as.intervals)
            if (node_depth_[u] >= lo && node_depth_[u] < hi)
            {
                as.Tprime.insert(u);
                break;
            }

    auto [pos2, _] = analysis_cache_.emplace(B0, std::move(as));
    return pos2->second;
}

InductionReport LabelingWorkbench::induction_check(
    const std::set<int> &S_leaves, const std::set<int> &T_nodes, int h,
    const std::map<int, Rat> *weights) const
{
    InductionReport rep;
    for (int u : T_nodes)
        if (t_.is_leaf(u))
        {
            rep.preconditions_ok = false;
            rep.precondition_violations.push_back(
                "T contains leaf " + std::to_string(u));
        }
    auto dist = leaf_distribution(t_, inst_);
    Rat lhs = 0;
    double lhs_w = 0, p_w = 0;
    for (auto &[leaf, pr] : dist)
    {
        Rat x = 1;
        if (weights)
        {
            auto it = weights->find(leaf);
            x = (it != weights->end()) ? it->second : Rat(1);
            if (x < 0 || x > 1)
            {
                rep.preconditions_ok = false;
                rep.precondition_violations.push_back(
                    "weight outside [0,1] at leaf " + std::to_string(leaf));
            }
        }
        if (!S_leaves.count(leaf))
            continue;
        const auto &pinf = pinfo_.at(leaf);
        int active_in_T = 0;
        for (int u : pinf.A)
            if (T_nodes.count(u))
                ++active_in_T;
        if (active_in_T < h)
        {
            rep.preconditions_ok = false;
            rep.precondition_violations.push_back(
                "leaf " + std::to_string(leaf) + " has only " +
                std::to_string(active_in_T) + " active ancestors in T");
        }
        Rat avoid = 1;
        for (int u : pinf.P)
            if (!t_.is_leaf(u) && T_nodes.count(u))
                avoid *= 1 - inst_.dist(t_.elt(u)).bern_p();
        lhs += pr * avoid;
        lhs_w += to_double(pr * x * avoid);
        p_w += to_double(pr * x);
    }
    rep.lhs = lhs;
    rep.bound = rat_pow2(-h);
    rep.pass = lhs <= rep.bound;
    rep.lhs_weighted = lhs_w;
    rep.p_weighted = p_w;
    rep.g_bound = g_eval(h, std::min(1.0, p_w));
    rep.pass_weighted = lhs_w <= rep.g_bound + 1e-12;
    return rep;
}

EventReport LabelingWorkbench::event_checks(const Label &B0) const
{
    EventReport rep;
    const auto &as = analysis_sets(B0);
    for (int leaf : as.S)
    {
        const auto &pinf = pinfo_.at(leaf);
        std::vector<int> elems;
        std::set<int> t_minus_elems, t_prime_elems;
        for (int u : pinf.P)
        {
            if (t_.is_leaf(u))
                continue;
            elems.push_back(t_.elt(u));
            if (as.Tprime.count(u))
                t_prime_elems.insert(t_.elt(u));
            else if (as.T.count(u))
                t_minus_elems.insert(t_.elt(u));
        }
        std::set<int> v_elems;
        const auto &vs = as.v.at(leaf);
        for (size_t a = 1; a < vs.size(); ++a)
            v_elems.insert(t_.elt(vs[a]));

        Rat prD = 0, prTp = 0, prBoth = 0;
        size_t count = size_t(1) << elems.size();
        for (size_t mask = 0; mask < count; ++mask)
        {
            std::set<int> R;
            Rat prob = 1;
            for (size_t i = 0; i < elems.size(); ++i)
            {
                Rat p = inst_.dist(elems[i]).bern_p();
                if (mask & (size_t(1) << i))
                {
                    R.insert(elems[i]);
                    prob *= p;
                }
                else
                    prob *= 1 - p;
            }
            bool eD = std::includes(R.begin(), R.end(), v_elems.begin(),
                                    v_elems.end());
            for (int e : t_minus_elems)
                if (R.count(e))
                    eD = false;
            bool eTp = true;
            for (int e : t_prime_elems)
                if (R.count(e))
                    eTp = false;
            if (eD)
                prD += prob;
            if (eTp)
                prTp += prob;
            if (eD && eTp)
                prBoth += prob;
            if (run_labeling(leaf, R).label == B0 && !(eD && eTp))
            {
                rep.inclusion_pass = false;
                rep.failures.push_back("inclusion fails at leaf " +
                                       std::to_string(leaf));
            }
        }
        if (prBoth != prD * prTp)
        {
            rep.independence_pass = false;
            rep.failures.push_back("independence fails at leaf " +
                                   std::to_string(leaf));
        }

        // per-(leaf, J) group: sum over realized labels B' of Pr[D(leaf,B')]
        std::set<Label> leaf_labels;
        for (const auto &oc : outcomes())
            if (oc.leaf == leaf)
                leaf_labels.insert(oc.label);
        std::map<std::set<int>, Rat> group_sum;
        std::map<std::set<int>, std::vector<const AnalysisSets *>> groups;
        for (const Label &B1 : leaf_labels)
        {
            const auto &as1 = analysis_sets(B1);
            groups[as1.J].push_back(&as1);
        }
        for (auto &[J, members] : groups)
        {
            Rat sum = 0;
            for (size_t mask = 0; mask < count; ++mask)
            {
                std::set<int> R;
                Rat prob = 1;
                for (size_t i = 0; i < elems.size(); ++i)
                {
                    Rat p = inst_.dist(elems[i]).bern_p();
                    if (mask & (size_t(1) << i))
                    {
                        R.insert(elems[i]);
                        prob *= p;
                    }
                    else
                        prob *= 1 - p;
                }
                int satisfied = 0;
                for (const AnalysisSets *as1 : members)
                {
                    std::set<int> v1, tm1;
                    for (size_t a = 1; a < as1->v.at(leaf).size(); ++a)
                        v1.insert(t_.elt(as1->v.at(leaf)[a]));
                    for (int u : pinf.P)
                        if (!t_.is_leaf(u) && as1->T.count(u) &&
                            !as1->Tprime.count(u))
                            tm1.insert(t_.elt(u));
                    bool eD = std::includes(R.begin(), R.end(), v1.begin(),
                                            v1.end());
                    for (int e : tm1)
                        if (R.count(e))
                            eD = false;
                    if (eD)
                    {
                        ++satisfied;
                        sum += prob;
                    }
                }
                if (satisfied > 1)
                {
                    rep.disjoint_pass = false;
                    rep.failures.push_back("non-disjoint D events at leaf " +
                                           std::to_string(leaf));
                }
            }
            if (sum > 1)
            {
                rep.group_sum_pass = false;
                rep.failures.push_back("D-event group sum exceeds 1 at leaf " +
                                       std::to_string(leaf));
            }
            group_sum[J] = sum;
        }
    }
    return rep;
}

} // namespace probelab
