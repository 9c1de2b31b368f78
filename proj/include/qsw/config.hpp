#pragma once

#include "qsw/suites.hpp"
#include "qsw/walk.hpp"

#include <string>
#include <vector>

namespace qsw {

// One experiment description: a mode plus the data that mode consumes. Builds
// either from a preset name with parameters or from explicit matrices; defaults
// tol = 1e-10, cutoff = 24, seed = 12345.
struct ExperimentConfig {
    std::string mode;         // verify | converge | dilate | uniqueness
    std::string suite = "all";
    unsigned seed = 12345;
    double tol = 1e-10;
    bool tolExplicit = false;  // verify only overrides row tolerances on request
    int cutoff = 24;

    CMat rho;          // particle state
    WalkModel model{};
    StepFunction f, g;
    CVec u, v;
    double T = 1.0;
    std::vector<long> nList;
    std::string outPath;
};

// Parses a JSON document: complex entries as [re, im] pairs (plain reals
// accepted), matrices as nested row-major arrays. Throws std::invalid_argument
// naming the offending field on malformed input, dimension mismatches, and
// non-self-adjoint Hamiltonians.
ExperimentConfig parse_config(const std::string& text);

struct SuiteResult {
    int exitStatus = 0;  // nonzero iff any row failed
    std::vector<ReportRow> rows;
    std::string report;  // human-readable, seed in the header
    std::string csv;     // converge mode only; header n,tau,abs_error,ratio
};

SuiteResult run_suite(const ExperimentConfig& config);

}  // namespace qsw
