// Command-line front end. Talks to the core strictly through the C API in
// probelab.h; JSON assembly here uses the header-only json library.
#include "probelab.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using json = nlohmann::ordered_json;

namespace {

int status_exit(pl_status st)
{
    switch (st)
    {
    case PL_OK:
        return 0;
    case PL_ERR_ASSERT:
        return 1;
    case PL_ERR_INPUT:
        return 2;
    case PL_ERR_CAP:
        return 3;
    default:
        return 4;
    }
}

[[noreturn]] void fail(pl_status st)
{
    std::cerr << "error: " << pl_last_error() << "\n";
    std::exit(status_exit(st));
}

std::string take(char *s)
{
    std::string out = s ? s : "";
    pl_string_free(s);
    return out;
}

std::string read_file(const std::string &path)
{
    if (path == "-")
    {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path);
    if (!in)
    {
        std::cerr << "error: cannot read '" << path << "'\n";
        std::exit(2);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Output {
    std::string path; // empty = stdout
    bool timestamp = true;

    void write(const std::string &text) const
    {
        if (path.empty())
        {
            std::cout << text;
            if (!text.empty() && text.back() != '\n')
                std::cout << "\n";
            return;
        }
        std::ofstream out(path);
        out << text;
        if (!text.empty() && text.back() != '\n')
            out << "\n";
    }

    void write_json(const json &config, const json &result) const
    {
        json doc;
        doc["config"] = config;
        if (timestamp)
            doc["timestamp"] = static_cast<long long>(
                std::chrono::duration_cast<std::chrono::seconds>(
                    std::chrono::system_clock::now().time_since_epoch())
                    .count());
        doc["result"] = result;
        write(doc.dump(2));
    }

    void write_csv(const json &config, const std::string &rows) const
    {
        std::string out = "# config " + config.dump() + "\n";
        if (timestamp)
            out += "# timestamp " +
                   std::to_string(static_cast<long long>(
                       std::chrono::duration_cast<std::chrono::seconds>(
                           std::chrono::system_clock::now()
                               .time_since_epoch())
                           .count())) +
                   "\n";
        write(out + rows);
    }
};

json family_spec(const std::string &family, int h, const std::string &lambda,
                 int n, uint64_t seed, int max_nodes, int max_path, int W,
                 int density, const std::vector<int> &ks)
{
    json spec;
    spec["family"] = family;
    if (family == "complete-tree")
    {
        spec["h"] = h;
        spec["lambda"] = lambda;
    }
    else if (family == "random-bernoulli")
    {
        spec["n"] = n;
        spec["seed"] = seed;
    }
    else if (family == "random-tree")
    {
        spec["max_nodes"] = max_nodes;
        spec["max_path"] = max_path;
        spec["seed"] = seed;
    }
    else if (family == "random-xos")
    {
        spec["n"] = n;
        spec["W"] = W;
        spec["density_pct"] = density;
        spec["seed"] = seed;
    }
    else if (family == "random-topk")
    {
        spec["n"] = n;
        spec["ks"] = ks;
        spec["seed"] = seed;
    }
    return spec;
}

struct Handles {
    pl_instance *inst = nullptr;
    pl_tree *tree = nullptr;
    pl_norm *norm = nullptr;

    ~Handles()
    {
        pl_instance_free(inst);
        pl_tree_free(tree);
        pl_norm_free(norm);
    }
};

// artifacts document: {instance, tree?, norm?}
void parse_artifacts(const json &doc, Handles &h, bool need_tree, bool need_norm)
{
    if (!doc.contains("instance"))
    {
        std::cerr << "error: input lacks an instance\n";
        std::exit(2);
    }
    pl_status st = pl_instance_parse(doc["instance"].dump().c_str(), &h.inst);
    if (st != PL_OK)
        fail(st);
    if (doc.contains("tree"))
    {
        st = pl_tree_parse(doc["tree"].dump().c_str(), &h.tree);
        if (st != PL_OK)
            fail(st);
    }
    else if (need_tree)
    {
        std::cerr << "error: input lacks a tree\n";
        std::exit(2);
    }
    if (doc.contains("norm"))
    {
        st = pl_norm_parse(doc["norm"].dump().c_str(), &h.norm);
        if (st != PL_OK)
            fail(st);
    }
    else if (need_norm)
    {
        std::cerr << "error: input lacks a norm\n";
        std::exit(2);
    }
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"stochastic probing workbench"};
    app.require_subcommand(1);

    std::string output_path;
    bool no_timestamp = false;
    int cap_n = 0, cap_path = 0;
    app.add_option("--output", output_path, "output file (default stdout)");
    app.add_flag("--no-timestamp", no_timestamp,
                 "omit the timestamp from output headers");
    app.add_option("--cap-n", cap_n, "solver ground-set cap");
    app.add_option("--cap-path", cap_path, "exact-enumeration path cap");

    // gen
    auto *gen = app.add_subcommand("gen", "generate an instance family");
    gen->set_help_flag("--help", "print help"); // frees -h for the height flag
    std::string family = "complete-tree", lambda = "1/2";
    int h = 4, n = 5, max_nodes = 15, max_path = 8, W = 4, density = 60;
    uint64_t seed = 1;
    std::vector<int> ks{1};
    gen->add_option("--family", family,
                    "complete-tree | random-bernoulli | random-tree | "
                    "random-xos | random-topk");
    gen->add_option("--h", h, "complete-tree height");
    gen->add_option("--lambda", lambda, "complete-tree activation probability");
    gen->add_option("--n", n, "element count");
    gen->add_option("--seed", seed, "generator seed");
    gen->add_option("--max-nodes", max_nodes, "random-tree node budget");
    gen->add_option("--max-path", max_path, "random-tree path budget");
    gen->add_option("--w", W, "random-xos vector count");
    gen->add_option("--density", density, "random-xos density percent");
    gen->add_option("--ks", ks, "random-topk profile sizes");

    // eval
    auto *eval = app.add_subcommand("eval", "evaluate a tree strategy");
    std::string input_path, mode = "exact", quantity = "adap";
    long long samples = 10000;
    bool restrict_active = false;
    eval->add_option("--input", input_path, "artifacts JSON {instance, tree, norm}")
        ->required();
    eval->add_option("--quantity", quantity, "adap | nadp");
    eval->add_option("--mode", mode, "exact | mc");
    eval->add_option("--samples", samples, "Monte-Carlo sample count");
    eval->add_option("--seed", seed, "Monte-Carlo seed");
    eval->add_flag("--restrict-active", restrict_active,
                   "evaluate the path strategy on active-ancestor probes only");

    // gap
    auto *gap = app.add_subcommand("gap", "adaptivity-gap report");
    gap->set_help_flag("--help", "print help");
    std::string gap_format = "csv";
    bool tree_only = false;
    gap->add_option("--input", input_path, "artifacts JSON {instance, tree?, norm}");
    gap->add_option("--family", family, "generate this family instead of --input");
    gap->add_option("--h", h, "complete-tree height");
    gap->add_option("--lambda", lambda, "complete-tree activation probability");
    gap->add_option("--n", n, "element count for random families");
    gap->add_option("--seed", seed, "generator seed");
    gap->add_option("--format", gap_format, "csv | json");
    gap->add_flag("--restrict-active", restrict_active,
                  "path strategy restricted to active-ancestor probes");
    gap->add_flag("--tree-only", tree_only,
                  "skip the brute-force optima (required beyond solver caps)");

    // reduce / label / report: raw request JSON
    auto *reduce = app.add_subcommand("reduce", "run a reduction request");
    reduce->add_option("--input", input_path, "request JSON (see README)")
        ->required();
    auto *label = app.add_subcommand("label", "run a labeling request");
    label->add_option("--input", input_path, "request JSON (see README)")
        ->required();
    auto *report = app.add_subcommand("report", "exploratory reports");
    report->set_help_flag("--help", "print help");
    std::string kind = "gap-growth";
    report->add_option("--kind", kind, "log-bound | gap-growth");
    report->add_option("--h", h, "complete-tree height (log-bound)");
    report->add_option("--lambda", lambda, "activation probability (log-bound)");

    // verify
    auto *verify = app.add_subcommand("verify", "run named check suites");
    std::string suite = "all", config_path;
    verify->add_option("--suite", suite,
                       "3.9 | 3.10 | 3.11 | 3.13 | 3.12/4.2 | 4.4 | 5.3 | 5.4 "
                       "| B.1 | C.2 | all");
    verify->add_option("--config", config_path, "suite config JSON file");

    // let the global output/cap flags appear after the verb
    for (CLI::App *sub : app.get_subcommands(nullptr))
        sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    if (cap_n > 0 || cap_path > 0)
    {
        std::string caps;
        if (cap_n > 0)
            caps += "cap_n=" + std::to_string(cap_n);
        if (cap_path > 0)
            caps += std::string(caps.empty() ? "" : ",") +
                    "path_len=" + std::to_string(cap_path);
        pl_status st = pl_set_caps(caps.c_str());
        if (st != PL_OK)
            fail(st);
    }

    Output out{output_path, !no_timestamp};

    if (gen->parsed())
    {
        json spec = family_spec(family, h, lambda, n, seed, max_nodes,
                                max_path, W, density, ks);
        char *res = nullptr;
        pl_status st = pl_generate(spec.dump().c_str(), &res);
        if (st != PL_OK)
            fail(st);
        out.write_json({{"verb", "gen"}, {"spec", spec}},
                       json::parse(take(res)));
        return 0;
    }

    if (eval->parsed())
    {
        json doc = json::parse(read_file(input_path), nullptr, false);
        if (doc.is_discarded())
        {
            std::cerr << "error: input is not valid JSON\n";
            return 2;
        }
        Handles hd;
        parse_artifacts(doc, hd, true, true);
        char *res = nullptr;
        pl_status st;
        if (quantity == "adap")
            st = pl_adap_exact(hd.tree, hd.inst, hd.norm, &res);
        else if (mode == "mc")
            st = pl_nadp_mc(hd.tree, hd.inst, hd.norm, samples, seed,
                            restrict_active ? 1 : 0, &res);
        else
            st = pl_nadp_exact(hd.tree, hd.inst, hd.norm,
                               restrict_active ? 1 : 0, &res);
        if (st != PL_OK)
            fail(st);
        json config{{"verb", "eval"},  {"quantity", quantity},
                    {"mode", mode},    {"samples", samples},
                    {"seed", seed},    {"restrict_active", restrict_active},
                    {"input", input_path}};
        out.write_json(config, json::parse(take(res)));
        return 0;
    }

    if (gap->parsed())
    {
        json doc;
        json config{{"verb", "gap"}, {"restrict_active", restrict_active}};
        if (!input_path.empty())
        {
            doc = json::parse(read_file(input_path), nullptr, false);
            if (doc.is_discarded())
            {
                std::cerr << "error: input is not valid JSON\n";
                return 2;
            }
            config["input"] = input_path;
        }
        else
        {
            json spec = family_spec(family, h, lambda, n, seed, max_nodes,
                                    max_path, W, density, ks);
            char *res = nullptr;
            pl_status st = pl_generate(spec.dump().c_str(), &res);
            if (st != PL_OK)
                fail(st);
            doc = json::parse(take(res));
            config["spec"] = spec;
            if (family == "complete-tree")
            {
                // the family's headline quantities are the path-restricted
                // ones, and its ground sets exceed the solver caps
                restrict_active = true;
                tree_only = true;
                config["restrict_active"] = true;
            }
        }
        Handles hd;
        parse_artifacts(doc, hd, tree_only, true);
        json result;
        if (tree_only)
        {
            char *a = nullptr, *b = nullptr;
            pl_status st = pl_adap_exact(hd.tree, hd.inst, hd.norm, &a);
            if (st != PL_OK)
                fail(st);
            st = pl_nadp_exact(hd.tree, hd.inst, hd.norm,
                               restrict_active ? 1 : 0, &b);
            if (st != PL_OK)
                fail(st);
            json ja = json::parse(take(a)), jb = json::parse(take(b));
            result["tree_adap"] = ja["value"];
            result["tree_nadp"] = jb["value"];
            double num = ja["value_double"].get<double>();
            double den = jb["value_double"].get<double>();
            result["tree_gap_double"] = den == 0 ? 1.0 : num / den;
        }
        else
        {
            char *res = nullptr;
            pl_status st = pl_gap_report(hd.inst, hd.norm,
                                         restrict_active ? 1 : 0, &res);
            if (st != PL_OK)
                fail(st);
            result = json::parse(take(res));
        }
        if (gap_format == "json")
            out.write_json(config, result);
        else
        {
            std::string header, row;
            for (auto it = result.begin(); it != result.end(); ++it)
            {
                header += (header.empty() ? "" : ",") + it.key();
                row += (row.empty() ? "" : ",") +
                       (it.value().is_string()
                            ? it.value().get<std::string>()
                            : it.value().dump());
            }
            out.write_csv(config, header + "\n" + row + "\n");
        }
        return 0;
    }

    if (reduce->parsed() || label->parsed())
    {
        std::string req = read_file(input_path);
        char *res = nullptr;
        pl_status st = reduce->parsed() ? pl_reduce(req.c_str(), &res)
                                        : pl_label_run(req.c_str(), &res);
        if (st != PL_OK)
            fail(st);
        out.write_json({{"verb", reduce->parsed() ? "reduce" : "label"},
                        {"input", input_path}},
                       json::parse(take(res)));
        return 0;
    }

    if (report->parsed())
    {
        json req{{"kind", kind}};
        if (kind == "log-bound")
        {
            req["h"] = h;
            req["lambda"] = lambda;
        }
        char *res = nullptr;
        pl_status st = pl_report(req.dump().c_str(), &res);
        if (st != PL_OK)
            fail(st);
        out.write_json({{"verb", "report"}, {"request", req}},
                       json::parse(take(res)));
        return 0;
    }

    if (verify->parsed())
    {
        std::string cfg = config_path.empty() ? "" : read_file(config_path);
        std::vector<std::string> suites;
        if (suite == "all")
            suites = {"3.9", "3.10", "3.11", "3.13", "3.12/4.2",
                      "4.4", "5.3",  "5.4",  "B.1",  "C.2"};
        else
            suites = {suite};
        std::string rows = "suite,check,pass,detail\n";
        bool all_pass = true;
        for (const std::string &s : suites)
        {
            char *res = nullptr;
            int pass = 0;
            pl_status st = pl_verify(s.c_str(), cfg.c_str(), &res, &pass);
            if (st != PL_OK && st != PL_ERR_ASSERT)
                fail(st);
            all_pass = all_pass && pass;
            json rep = json::parse(take(res));
            for (const auto &row : rep["checks"])
            {
                std::string detail = row["detail"].get<std::string>();
                std::replace(detail.begin(), detail.end(), ',', ';');
                rows += s + "," + row["id"].get<std::string>() + "," +
                        (row["pass"].get<bool>() ? "1" : "0") + "," + detail +
                        "\n";
            }
        }
        json config{{"verb", "verify"}, {"suite", suite}};
        if (!cfg.empty())
            config["config"] = json::parse(cfg);
        out.write_csv(config, rows);
        return all_pass ? 0 : 1;
    }

    return 0;
}
