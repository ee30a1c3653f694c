#pragma once

#include "labeling.hpp"
#include "reductions.hpp"
#include "symnorm.hpp"

namespace probelab {

struct CheckRow {
    std::string id;
    bool pass = false;
    std::string detail;
};

struct SuiteReport {
    std::string suite;
    std::vector<CheckRow> rows;

    bool pass() const;
    json to_json() const;
    std::string csv() const; // header + one row per check
};

// suite ids: 3.9, 3.10, 3.11, 3.13, 3.12/4.2, 4.4, 5.3, 5.4, B.1, C.2
std::vector<std::string> suite_names();

// config keys (all optional): seeds, seed0, max_nodes, max_path, k_values,
// grid_steps, h_max, n
SuiteReport run_suite(const std::string &suite, const json &config = json::object());

// One-sided report for the logarithmic lower bound on the path strategy:
// measured E_R[f_xos] against E[|A'|]/(200 log2 n) on a complete tree.
json log_bound_report(int h, const Rat &lambda);

// Non-asserting gap growth of the complete-tree family across (h, lambda).
json gap_growth_report(const std::vector<int> &hs,
                       const std::vector<Rat> &lambdas);

} // namespace probelab
