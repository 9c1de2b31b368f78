#pragma once

#include <string>
#include <vector>

namespace qsw {

// One verified quantity. `residual` is the measured defect, `tol` the bound it
// must stay under; `computed`/`reference` carry the values behind the residual
// when they are meaningful on their own (otherwise they repeat the residual/0).
struct ReportRow {
    std::string id;
    std::string quantity;
    double computed = 0.0;
    double reference = 0.0;
    double residual = 0.0;
    double tol = 0.0;
    bool pass = false;
};

ReportRow make_row(std::string id, std::string quantity, double computed,
                   double reference, double tol);
ReportRow make_residual_row(std::string id, std::string quantity, double residual,
                            double tol);

// Invariant suites, one per module. `tolOverride > 0` replaces every built-in
// tolerance (looser or tighter, caller's choice).
std::vector<ReportRow> invariants_algebra(unsigned seed);
std::vector<ReportRow> invariants_fock(unsigned seed);
std::vector<ReportRow> invariants_qsc(unsigned seed);
std::vector<ReportRow> invariants_quasifree(unsigned seed);
std::vector<ReportRow> invariants_walk(unsigned seed);

// suite in {"algebra","fock","qsc","quasifree","walk","all"}.
std::vector<ReportRow> suite_report(const std::string& suite, unsigned seed,
                                    double tolOverride);

// Release gates. Each returns the full set of checked quantities; the gate
// passes iff every row passes. Tolerances are fixed inside each function.
std::vector<ReportRow> criterion_symplectic_roundtrip(unsigned seed);
std::vector<ReportRow> criterion_partial_conjugation(unsigned seed);
std::vector<ReportRow> criterion_weyl_single_mode();
std::vector<ReportRow> criterion_quasifree_weyl();
std::vector<ReportRow> criterion_gaussian_cocycle(unsigned seed);
std::vector<ReportRow> criterion_pure_noise(unsigned seed);
std::vector<ReportRow> criterion_change_of_variables(unsigned seed);
std::vector<ReportRow> criterion_integral_identity();
std::vector<ReportRow> criterion_thermal_dilation(unsigned seed);
std::vector<ReportRow> criterion_walk_convergence();

}  // namespace qsw
