#include "qsw/config.hpp"

#include "qsw/quasifree.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>

namespace qsw {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& why) {
    throw std::invalid_argument(field + ": " + why);
}

const json& require(const json& j, const char* key, const std::string& field) {
    const auto it = j.find(key);
    if (it == j.end()) fail(field, "missing");
    return *it;
}

double parse_real(const json& j, const std::string& field) {
    if (!j.is_number()) fail(field, "expected a number");
    return j.get<double>();
}

// Complex entries are [re, im] pairs; plain numbers mean re alone.
cplx parse_complex(const json& j, const std::string& field) {
    if (j.is_number()) return cplx(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return cplx(j[0].get<double>(), j[1].get<double>());
    fail(field, "expected a number or an [re, im] pair");
}

CVec parse_vector(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty()) fail(field, "expected a non-empty array");
    CVec out(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        out(static_cast<Eigen::Index>(i)) =
            parse_complex(j[i], field + "[" + std::to_string(i) + "]");
    return out;
}

CMat parse_matrix(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty()) fail(field, "expected a non-empty array of rows");
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    if (cols == 0) fail(field, "expected non-empty rows");
    CMat out(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array() || j[r].size() != cols) fail(field, "rows have unequal length");
        for (std::size_t c = 0; c < cols; ++c)
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = parse_complex(
                j[r][c], field + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
    return out;
}

CMat parse_selfadjoint(const json& j, const std::string& field) {
    const CMat m = parse_matrix(j, field);
    if (m.rows() != m.cols()) fail(field, "expected a square matrix");
    if (maxAbs(CMat(m - m.adjoint())) > 1e-12) fail(field, "not self-adjoint");
    return m;
}

StepFunction parse_step(const json& j, const std::string& field) {
    const json& segs = require(j, "segments", field + ".segments");
    if (!segs.is_array() || segs.empty())
        fail(field + ".segments", "expected a non-empty array");
    std::vector<std::pair<double, CVec>> parsed;
    Eigen::Index dim = -1;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const std::string name = field + ".segments[" + std::to_string(i) + "]";
        const double dt = parse_real(require(segs[i], "duration", name + ".duration"),
                                     name + ".duration");
        if (dt <= 0.0) fail(name + ".duration", "must be positive");
        CVec value = parse_vector(require(segs[i], "value", name + ".value"),
                                  name + ".value");
        if (dim < 0) dim = value.size();
        if (value.size() != dim) fail(name + ".value", "segment dimensions differ");
        parsed.emplace_back(dt, std::move(value));
    }
    return StepFunction::make(dim, std::move(parsed));
}

void parse_model(const json& j, ExperimentConfig& config) {
    if (!j.is_object()) fail("model", "expected an object");
    if (j.contains("preset")) {
        const std::string preset = j["preset"].get<std::string>();
        if (preset != "thermal_qubit") fail("model.preset", "unknown preset " + preset);
        const double gamma0 = j.contains("gamma0")
                                  ? parse_real(j["gamma0"], "model.gamma0")
                                  : 0.8;
        if (gamma0 <= 0.5 || gamma0 >= 1.0)
            fail("model.gamma0", "must lie in (0.5, 1)");
        if (j.contains("systemDim") &&
            parse_real(j["systemDim"], "model.systemDim") != 2.0)
            fail("model.systemDim", "thermal_qubit preset supports systemDim 2 only");
        const WalkExperiment ex = thermal_qubit_experiment(gamma0);
        config.rho = ex.rho;
        config.model = ex.model;
        config.f = ex.f;
        config.g = ex.g;
        config.u = ex.u;
        config.v = ex.v;
        config.T = ex.T;
        config.nList = ex.nList;
        return;
    }
    const CMat rho = parse_selfadjoint(require(j, "rho", "rho"), "rho");
    const CMat HS = parse_selfadjoint(require(j, "H_S", "H_S"), "H_S");
    const CMat HP = parse_selfadjoint(require(j, "H_P", "H_P"), "H_P");
    const CMat HI = parse_selfadjoint(require(j, "H_I", "H_I"), "H_I");
    if (HP.rows() != rho.rows()) fail("H_P", "dimension differs from rho");
    if (HI.rows() != rho.rows() * HS.rows())
        fail("H_I", "dimension is not particle dim times system dim");
    config.rho = rho;
    config.model = make_walk_model(rho.rows(), HS.rows(), HS, HP, HI);
}

void parse_grid(const json& j, ExperimentConfig& config) {
    if (!j.is_object()) fail("grid", "expected an object");
    if (j.contains("T")) {
        config.T = parse_real(j["T"], "grid.T");
        if (config.T <= 0.0) fail("grid.T", "must be positive");
    }
    if (j.contains("nList")) {
        const json& lst = j["nList"];
        if (!lst.is_array() || lst.empty())
            fail("grid.nList", "expected a non-empty array");
        config.nList.clear();
        for (const auto& entry : lst) {
            if (!entry.is_number_integer() || entry.get<long>() <= 0)
                fail("grid.nList", "entries must be positive integers");
            config.nList.push_back(entry.get<long>());
        }
        for (std::size_t i = 1; i < config.nList.size(); ++i)
            if (config.nList[i] <= config.nList[i - 1])
                fail("grid.nList", "must increase strictly");
    }
}

std::string flag_text(const AmplitudeSet& xi, Eigen::Index dimK) {
    if (xi.singleton()) return "amplitude set is a single point";
    if (xi.degeneracyL1.cols() == dimK) return "all amplitudes admissible";
    return "amplitude set is a " + std::to_string(xi.degeneracyL1.cols()) +
           "-parameter family";
}

std::string format_g17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string format_report(const std::vector<ReportRow>& rows, unsigned seed) {
    std::string out = "# seed " + std::to_string(seed) + "\n";
    for (const auto& r : rows) {
        char line[512];
        std::snprintf(line, sizeof(line),
                      "%s  %-26s %s: computed %.10g, reference %.10g, residual "
                      "%.3g, tol %.3g\n",
                      r.pass ? "PASS" : "FAIL", r.id.c_str(), r.quantity.c_str(),
                      r.computed, r.reference, r.residual, r.tol);
        out += line;
    }
    return out;
}

void require_model(const ExperimentConfig& config) {
    if (config.rho.size() == 0) fail("model", "required for this mode");
}

SuiteResult run_converge(const ExperimentConfig& config) {
    require_model(config);
    if (config.nList.empty()) fail("grid.nList", "required for converge mode");
    if (config.f.dim == 0) fail("f", "required for converge mode");
    if (config.g.dim == 0) fail("g", "required for converge mode");
    if (config.u.size() == 0) fail("u", "required for converge mode");
    if (config.v.size() == 0) fail("v", "required for converge mode");

    const GNSModel gns = gns_build(config.rho);
    const auto study = convergence_study(config.model, gns, config.f, config.g,
                                         config.u, config.v, config.T, config.nList);

    SuiteResult result;
    result.csv = "n,tau,abs_error,ratio\n";
    long notDecreasing = 0;
    for (std::size_t i = 0; i < study.size(); ++i) {
        const auto& r = study[i];
        result.csv += std::to_string(r.n) + "," + format_g17(r.tau) + "," +
                      format_g17(r.absError) + "," + format_g17(r.ratio) + "\n";
        if (i > 0 && r.absError >= study[i - 1].absError) ++notDecreasing;
    }
    result.rows.push_back(make_residual_row(
        "converge.decreasing",
        "refinements where the element error failed to decrease strictly",
        static_cast<double>(notDecreasing), 0.5));
    result.rows.push_back(make_residual_row(
        "converge.final", "element error at the finest grid", study.back().absError,
        1e-2));
    return result;
}

SuiteResult run_dilate(const ExperimentConfig& config) {
    require_model(config);
    const GNSModel gns = gns_build(config.rho);
    const LimitGenerator lim = limit_generator(config.model, gns);
    const AWAmplitude sigma = sigma_rho(gns);
    const AmplitudeSet xi = amplitude_set(sigma_lift(lim.qf), sigma.A);

    SuiteResult result;
    double blockDefect = 0.0;
    std::string coshLine = "# sigma cosh diagonal:";
    std::string sinhLine = "# sigma sinh diagonal:";
    for (Eigen::Index m = 0; m < gns.dimNoise; ++m) {
        const auto& [a, b, i, j] = gns.blockIndex[static_cast<std::size_t>(m)];
        const double gap = gns.gamma(b) - gns.gamma(a);
        const cplx c = sigma.sigmaBlocks(m, m);
        const cplx s = sigma.sigmaBlocks(gns.dimNoise + m, gns.dimNoise + m);
        blockDefect = std::max({blockDefect, std::abs(c - std::sqrt(gns.gamma(b) / gap)),
                                std::abs(s - std::sqrt(gns.gamma(a) / gap))});
        coshLine += " " + format_g17(c.real());
        sinhLine += " " + format_g17(s.real());
    }
    result.report = coshLine + "\n" + sinhLine + "\n";

    result.rows.push_back(make_residual_row(
        "dilate.sigma_blocks", "amplitude hyperbolics match the eigenvalue ratios",
        blockDefect, 1e-12));
    result.rows.push_back(make_residual_row(
        "dilate.block_residual",
        "interaction column is supported on the doubled pair block",
        lim.blockResidual, config.tol));
    result.rows.push_back(make_residual_row(
        "dilate.coupling_residual",
        "coupling column equals the amplitude-dressed creation pair",
        lim.couplingResidual, config.tol));
    result.rows.push_back(make_residual_row(
        "dilate.coupling_norm",
        "squared coupling norm matches the averaged squared interaction",
        std::abs(lim.L.squaredNorm() -
                 gns.rhotilde(CMat(config.model.HI * config.model.HI),
                              config.model.systemDim)
                     .trace()
                     .real()),
        config.tol));
    result.rows.push_back(make_residual_row(
        "dilate.singleton", flag_text(xi, gns.dimNoise),
        xi.singleton() == lim.unique ? 0.0 : 1.0, 0.5));
    return result;
}

SuiteResult run_uniqueness(const ExperimentConfig& config) {
    require_model(config);
    const GNSModel gns = gns_build(config.rho);
    const LimitGenerator lim = limit_generator(config.model, gns);
    const AWAmplitude sigma = sigma_rho(gns);
    const AmplitudeSet xi = amplitude_set(sigma_lift(lim.qf), sigma.A);

    double sigmaMin = 0.0;
    const bool minimal = minimality_check(lim.L, 1e-8, &sigmaMin);

    SuiteResult result;
    result.rows.push_back(make_residual_row(
        "unique.minimal",
        minimal ? "doubled noise carries no scalar compression"
                : "doubled noise admits a scalar compression",
        minimal ? 0.0 : 1.0, 1.5));
    result.rows.push_back(make_row("unique.kernel_sigma",
                                   "smallest singular value of the compression map",
                                   sigmaMin, sigmaMin, 0.5));
    result.rows.push_back(make_residual_row(
        "unique.consistent", "kernel criterion and degeneracy space agree",
        (lim.strongLISigmaMin > 1e-8) == lim.unique ? 0.0 : 1.0, 0.5));
    result.rows.push_back(make_residual_row(
        "unique.contains_base", "admissible set contains the spectral amplitude",
        xi.contains(sigma.A) ? 0.0 : 1.0, 0.5));
    result.rows.push_back(make_residual_row(
        "unique.singleton", flag_text(xi, gns.dimNoise),
        xi.singleton() == lim.unique ? 0.0 : 1.0, 0.5));
    return result;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& err) {
        throw std::invalid_argument(std::string("config: malformed JSON: ") + err.what());
    }
    if (!j.is_object()) fail("config", "expected a JSON object");

    ExperimentConfig config;
    if (j.contains("mode")) {
        config.mode = j["mode"].get<std::string>();
        if (config.mode != "verify" && config.mode != "converge" &&
            config.mode != "dilate" && config.mode != "uniqueness")
            fail("mode", "expected verify, converge, dilate, or uniqueness");
    }
    if (j.contains("suite")) {
        config.suite = j["suite"].get<std::string>();
        if (config.suite != "all" && config.suite != "algebra" &&
            config.suite != "fock" && config.suite != "qsc" &&
            config.suite != "quasifree" && config.suite != "walk")
            fail("suite", "unknown suite " + config.suite);
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) fail("seed", "expected a non-negative integer");
        config.seed = j["seed"].get<unsigned>();
    }
    if (j.contains("tol")) {
        config.tol = parse_real(j["tol"], "tol");
        if (config.tol <= 0.0) fail("tol", "must be positive");
        config.tolExplicit = true;
    }
    if (j.contains("cutoff")) {
        if (!j["cutoff"].is_number_integer() || j["cutoff"].get<int>() < 1)
            fail("cutoff", "expected a positive integer");
        config.cutoff = j["cutoff"].get<int>();
    }
    if (j.contains("model")) parse_model(j["model"], config);
    if (j.contains("grid")) parse_grid(j["grid"], config);
    if (j.contains("f")) config.f = parse_step(j["f"], "f");
    if (j.contains("g")) config.g = parse_step(j["g"], "g");
    if (j.contains("u")) config.u = parse_vector(j["u"], "u");
    if (j.contains("v")) config.v = parse_vector(j["v"], "v");
    if (j.contains("out")) config.outPath = j["out"].get<std::string>();

    if (config.rho.size() != 0) {
        const Eigen::Index dimTest = config.rho.rows() * config.rho.rows() - 1;
        if (config.f.dim != 0 && config.f.dim != dimTest)
            fail("f", "dimension must be particle dim squared minus one");
        if (config.g.dim != 0 && config.g.dim != dimTest)
            fail("g", "dimension must be particle dim squared minus one");
        if (config.u.size() != 0 && config.u.size() != config.model.systemDim)
            fail("u", "dimension differs from the system space");
        if (config.v.size() != 0 && config.v.size() != config.model.systemDim)
            fail("v", "dimension differs from the system space");
    }
    return config;
}

SuiteResult run_suite(const ExperimentConfig& config) {
    SuiteResult result;
    if (config.mode == "verify") {
        result.rows = suite_report(config.suite, config.seed,
                                   config.tolExplicit ? config.tol : 0.0);
    } else if (config.mode == "converge") {
        result = run_converge(config);
    } else if (config.mode == "dilate") {
        result = run_dilate(config);
    } else if (config.mode == "uniqueness") {
        result = run_uniqueness(config);
    } else {
        fail("mode", config.mode.empty() ? "missing" : "unknown mode " + config.mode);
    }
    for (const auto& r : result.rows)
        if (!r.pass) result.exitStatus = 1;
    result.report = format_report(result.rows, config.seed) + result.report;
    return result;
}

}  // namespace qsw
