#include "probelab.h"

#include "caps.hpp"
#include "generators.hpp"
#include "verify.hpp"

#include <cstring>

using namespace probelab;

struct pl_instance {
    Instance v;
};
struct pl_tree {
    DecisionTree v;
};
struct pl_norm {
    Norm v;
};

namespace {

thread_local std::string g_err;

char *dup_string(const std::string &s)
{
    char *out = static_cast<char *>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename F> pl_status guard(F &&fn)
{
    try
    {
        return fn();
    }
    catch (const CapError &ex)
    {
        g_err = ex.what();
        return PL_ERR_CAP;
    }
    catch (const InputError &ex)
    {
        g_err = ex.what();
        return PL_ERR_INPUT;
    }
    catch (const json::exception &ex)
    {
        g_err = ex.what();
        return PL_ERR_INPUT;
    }
    catch (const std::exception &ex)
    {
        g_err = ex.what();
        return PL_ERR_INTERNAL;
    }
}

json parse_json(const char *s, const char *what)
{
    if (!s)
        throw InputError(std::string(what) + ": null input");
    json j = json::parse(s, nullptr, false);
    if (j.is_discarded())
        throw InputError(std::string(what) + ": invalid JSON");
    return j;
}

std::map<int, std::vector<int>> aprime_from_json(const json &j)
{
    std::map<int, std::vector<int>> ap;
    if (j.is_null())
        return ap;
    for (auto it = j.begin(); it != j.end(); ++it)
        ap[std::stoi(it.key())] = it.value().get<std::vector<int>>();
    return ap;
}

json aprime_to_json(const std::map<int, std::vector<int>> &ap)
{
    json j = json::object();
    for (auto &[leaf, nodes] : ap)
        j[std::to_string(leaf)] = nodes;
    return j;
}

json dist_to_json(const ElementDist &d)
{
    json vs = json::array(), ps = json::array();
    for (const Rat &v : d.values)
        vs.push_back(rat_to_json(v));
    for (const Rat &p : d.probs)
        ps.push_back(rat_to_json(p));
    return json{{"values", vs}, {"probs", ps}};
}

} // namespace

extern "C" {

const char *pl_last_error(void)
{
    return g_err.c_str();
}

void pl_string_free(char *s)
{
    std::free(s);
}

pl_status pl_set_caps(const char *spec)
{
    return guard([&] {
        set_caps_from_string(spec ? spec : "");
        return PL_OK;
    });
}

pl_status pl_instance_parse(const char *text, pl_instance **out)
{
    return guard([&] {
        auto h = std::make_unique<pl_instance>();
        h->v = Instance::from_json(parse_json(text, "instance"));
        h->v.validate();
        *out = h.release();
        return PL_OK;
    });
}

pl_status pl_instance_to_json(const pl_instance *inst, char **out)
{
    return guard([&] {
        *out = dup_string(inst->v.to_json().dump());
        return PL_OK;
    });
}

void pl_instance_free(pl_instance *inst)
{
    delete inst;
}

pl_status pl_tree_parse(const char *text, pl_tree **out)
{
    return guard([&] {
        auto h = std::make_unique<pl_tree>();
        h->v = DecisionTree::from_json(parse_json(text, "tree"));
        *out = h.release();
        return PL_OK;
    });
}

pl_status pl_tree_to_json(const pl_tree *t, char **out)
{
    return guard([&] {
        *out = dup_string(t->v.to_json().dump());
        return PL_OK;
    });
}

void pl_tree_free(pl_tree *t)
{
    delete t;
}

pl_status pl_norm_parse(const char *text, pl_norm **out)
{
    return guard([&] {
        auto h = std::make_unique<pl_norm>();
        h->v = Norm::from_json(parse_json(text, "norm"));
        *out = h.release();
        return PL_OK;
    });
}

pl_status pl_norm_to_json(const pl_norm *f, char **out)
{
    return guard([&] {
        *out = dup_string(f->v.to_json().dump());
        return PL_OK;
    });
}

void pl_norm_free(pl_norm *f)
{
    delete f;
}

pl_status pl_tree_validate(const pl_tree *t, const pl_instance *inst, char **out)
{
    return guard([&] {
        json j = validate_tree(t->v, inst->v);
        *out = dup_string(j.dump());
        return PL_OK;
    });
}

pl_status pl_adap_exact(const pl_tree *t, const pl_instance *inst,
                        const pl_norm *f, char **out)
{
    return guard([&] {
        *out = dup_string(adap_exact(t->v, inst->v, f->v).to_json().dump());
        return PL_OK;
    });
}

pl_status pl_nadp_exact(const pl_tree *t, const pl_instance *inst,
                        const pl_norm *f, int restrict_active, char **out)
{
    return guard([&] {
        *out = dup_string(
            nadp_exact(t->v, inst->v, f->v, restrict_active != 0)
                .to_json()
                .dump());
        return PL_OK;
    });
}

pl_status pl_nadp_mc(const pl_tree *t, const pl_instance *inst, const pl_norm *f,
                     long long samples, unsigned long long seed,
                     int restrict_active, char **out)
{
    return guard([&] {
        *out = dup_string(
            nadp_mc(t->v, inst->v, f->v, samples, seed, restrict_active != 0)
                .to_json()
                .dump());
        return PL_OK;
    });
}

pl_status pl_optimal_adaptive(const pl_instance *inst, const pl_norm *f,
                              char **out)
{
    return guard([&] {
        auto r = optimal_adaptive(inst->v, f->v);
        json j;
        j["value"] = rat_to_json(r.value);
        j["value_double"] = to_double(r.value);
        j["tree"] = r.tree.to_json();
        *out = dup_string(j.dump());
        return PL_OK;
    });
}

pl_status pl_optimal_nonadaptive(const pl_instance *inst, const pl_norm *f,
                                 char **out)
{
    return guard([&] {
        auto r = optimal_nonadaptive(inst->v, f->v);
        json j;
        j["value"] = rat_to_json(r.value);
        j["value_double"] = to_double(r.value);
        j["sequence"] = r.sequence;
        *out = dup_string(j.dump());
        return PL_OK;
    });
}

pl_status pl_gap_report(const pl_instance *inst, const pl_norm *f,
                        int restrict_active, char **out)
{
    return guard([&] {
        *out = dup_string(
            gap_report(inst->v, f->v, restrict_active != 0).to_json().dump());
        return PL_OK;
    });
}

pl_status pl_generate(const char *spec_json, char **out)
{
    return guard([&] {
        *out = dup_string(probelab::generate(parse_json(spec_json, "family spec"))
                              .to_json()
                              .dump());
        return PL_OK;
    });
}

pl_status pl_reduce(const char *request_json, char **out)
{
    return guard([&] {
        json req = parse_json(request_json, "reduce request");
        std::string op = req.at("op").get<std::string>();
        json res;
        res["op"] = op;
        if (op == "geometric-round")
        {
            Instance inst = Instance::from_json(req.at("instance"));
            Norm f = Norm::from_json(req.at("norm"));
            res["instance"] =
                geometric_round(inst, f, req.at("r").get<int>()).to_json();
        }
        else if (op == "decompose")
        {
            Instance inst = Instance::from_json(req.at("instance"));
            Norm f = Norm::from_json(req.at("norm"));
            auto dec = decompose_large_small(inst, f,
                                             rat_from_json(req.at("opt")),
                                             rat_from_json(req.at("lambda")));
            res["Y"] = json::array();
            res["Z"] = json::array();
            for (const auto &d : dec.Y)
                res["Y"].push_back(dist_to_json(d));
            for (const auto &d : dec.Z)
                res["Z"].push_back(dist_to_json(d));
            res["large"] = dec.large;
        }
        else if (op == "truncate-large" || op == "large-filter" ||
                 op == "nonadaptive-simulation")
        {
            Instance inst = Instance::from_json(req.at("instance"));
            DecisionTree t = DecisionTree::from_json(req.at("tree"));
            Norm f = Norm::from_json(req.at("norm"));
            Rat lambda = rat_from_json(req.at("lambda"));
            Rat opt = rat_from_json(req.at("opt"));
            if (op == "truncate-large")
                res["tree"] =
                    truncate_at_first_large(t, inst, f, lambda, opt).to_json();
            else if (op == "large-filter")
            {
                auto r = large_filter_quantities(t, inst, f, lambda, opt);
                res["opt_prime"] = rat_to_json(r.opt_prime);
                res["opt_zero"] = rat_to_json(r.opt_zero);
                res["e_f_large"] = rat_to_json(r.e_f_y);
                res["subadditive_ok"] = r.subadditive_ok;
                res["filter_ok"] = r.filter_ok;
            }
            else
            {
                Rat v = nonadaptive_simulation(t, inst, f, lambda, opt);
                res["value"] = rat_to_json(v);
                res["value_double"] = to_double(v);
            }
        }
        else if (op == "bernoullize" || op == "induced-norm")
        {
            Instance inst = Instance::from_json(req.at("instance"));
            DecisionTree t = DecisionTree::from_json(req.at("tree"));
            Bernoullized b = bernoullize(t, inst);
            if (op == "induced-norm")
            {
                Norm f = Norm::from_json(req.at("norm"));
                res["norm"] =
                    induced_norm(f, b, req.value("symmetric", false))
                        .to_json();
            }
            else
            {
                res["instance"] = b.binst.to_json();
                res["tree"] = b.ttree.to_json();
                json ids = json::array(), leafs = json::object();
                for (auto &[key, id] : b.elt_id)
                    ids.push_back({{"element", key.first},
                                   {"support", key.second},
                                   {"id", id},
                                   {"value", rat_to_json(b.value.at(id))}});
                for (auto &[nl, ol] : b.leaf_map)
                    leafs[std::to_string(nl)] = ol;
                res["elements"] = std::move(ids);
                res["leaf_map"] = std::move(leafs);
                res["chain_exact"] = chain_probabilities_exact(b);
                res["marginals_exact"] = leaf_marginals_exact(b, t);
            }
        }
        else if (op == "xos-pipeline")
        {
            Instance inst = Instance::from_json(req.at("instance"));
            DecisionTree t = DecisionTree::from_json(req.at("tree"));
            Norm f = Norm::from_json(req.at("norm"));
            auto r = xos_pipeline(t, inst, f, req.at("r").get<int>());
            res["norm"] = r.fxos.to_json();
            res["j0"] = r.j0;
            res["aprime"] = aprime_to_json(r.aprime);
        }
        else
            throw InputError("unknown reduce op '" + op + "'");
        *out = dup_string(res.dump());
        return PL_OK;
    });
}

pl_status pl_label_run(const char *request_json, char **out)
{
    return guard([&] {
        json req = parse_json(request_json, "label request");
        Instance inst = Instance::from_json(req.at("instance"));
        DecisionTree t = DecisionTree::from_json(req.at("tree"));
        int K = req.at("K").get<int>();
        auto ap = req.contains("aprime") ? aprime_from_json(req.at("aprime"))
                                         : std::map<int, std::vector<int>>{};
        if (!req.contains("aprime"))
            for (int leaf : t.leaves())
                ap[leaf] = path_info(t, leaf).A;
        LabelingWorkbench wb(t, inst, K, ap);
        std::string action = req.value("action", "run");
        json res;
        res["action"] = action;
        if (action == "run")
        {
            std::set<int> R;
            for (int e : req.at("R").get<std::vector<int>>())
                R.insert(e);
            auto r = wb.run_labeling(req.at("leaf").get<int>(), R);
            res["label"] = r.label.to_json();
            res["triggers"] = r.triggers;
        }
        else if (action == "labels")
        {
            res["labels"] = json::array();
            for (const Label &b : wb.realized_labels())
                res["labels"].push_back(b.to_json());
        }
        else if (action == "tail")
        {
            auto r = wb.tail_check();
            res["pass"] = r.pass;
            res["entries"] = json::array();
            for (const auto &e : r.entries)
                res["entries"].push_back({{"label", e.label.to_json()},
                                          {"prob", rat_to_json(e.prob)},
                                          {"bound", rat_to_json(e.bound)},
                                          {"pass", e.pass}});
        }
        else if (action == "analysis")
        {
            Label B0 = Label::from_json(req.at("label"), K);
            const auto &as = wb.analysis_sets(B0);
            res["S"] = as.S;
            res["T"] = std::vector<int>(as.T.begin(), as.T.end());
            res["T_prime"] =
                std::vector<int>(as.Tprime.begin(), as.Tprime.end());
            res["imp"] = aprime_to_json(as.imp);
            res["J"] = std::vector<int>(as.J.begin(), as.J.end());
        }
        else if (action == "events")
        {
            Label B0 = Label::from_json(req.at("label"), K);
            EventReport er = wb.event_checks(B0);
            res["pass"] = er.pass();
            res["inclusion"] = er.inclusion_pass;
            res["independence"] = er.independence_pass;
            res["group_sum"] = er.group_sum_pass;
            res["disjoint"] = er.disjoint_pass;
            res["failures"] = er.failures;
        }
        else
            throw InputError("unknown label action '" + action + "'");
        *out = dup_string(res.dump());
        return PL_OK;
    });
}

pl_status pl_verify(const char *suite, const char *config_json, char **out,
                    int *out_pass)
{
    json cfg = json::object();
    pl_status st = guard([&] {
        if (!suite)
            throw InputError("verify: null suite name");
        if (config_json && *config_json)
            cfg = parse_json(config_json, "verify config");
        SuiteReport rep = run_suite(suite, cfg);
        if (out)
            *out = dup_string(rep.to_json().dump());
        if (out_pass)
            *out_pass = rep.pass() ? 1 : 0;
        if (!rep.pass())
        {
            g_err = "suite " + rep.suite + " has failing checks";
            return PL_ERR_ASSERT;
        }
        return PL_OK;
    });
    return st;
}

pl_status pl_report(const char *request_json, char **out)
{
    return guard([&] {
        json req = parse_json(request_json, "report request");
        std::string kind = req.at("kind").get<std::string>();
        json res;
        if (kind == "log-bound")
            res = log_bound_report(req.value("h", 4),
                                   req.contains("lambda")
                                       ? rat_from_json(req.at("lambda"))
                                       : Rat(1, 2));
        else if (kind == "gap-growth")
        {
            std::vector<int> hs = req.contains("hs")
                                      ? req.at("hs").get<std::vector<int>>()
                                      : std::vector<int>{4, 8, 12};
            std::vector<Rat> lambdas;
            if (req.contains("lambdas"))
                for (const auto &l : req.at("lambdas"))
                    lambdas.push_back(rat_from_json(l));
            else
                lambdas = {Rat(1, 2), Rat(1, 4), Rat(1, 8)};
            res = gap_growth_report(hs, lambdas);
        }
        else
            throw InputError("unknown report kind '" + kind + "'");
        *out = dup_string(res.dump());
        return PL_OK;
    });
}

} // extern "C"
