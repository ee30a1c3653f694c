#pragma once

#include <string>

namespace probelab {

// Enumeration limits for the brute-force machinery. Defaults are desk-scale;
// the PROBELAB_CAPS environment variable ("name=value,name=value") or an
// explicit set_caps call overrides them.
struct Caps {
    int enum_len = 12;             // max sequence length in enumerate_feasible
    int path_len = 20;             // max probed path length for exact Nadp
    int cap_n = 8;                 // max ground-set size for optimal_adaptive
    long long seq_count = 1000000; // max feasible sequences for optimal_nonadaptive
};

Caps &caps();

// Parses "enum_len=14,path_len=24,..." and applies it to the process caps.
void set_caps_from_string(const std::string &spec);

} // namespace probelab
