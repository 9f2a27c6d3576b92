#ifndef MSH_HARNESS_HPP
#define MSH_HARNESS_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "msh/coefficient.hpp"

namespace msh {

struct ForcingSpec {
    std::string expr;    // plain-mode expression in x
    std::string preset;  // "smooth" | "step"
    bool empty() const { return expr.empty() && preset.empty(); }
};

struct CoefficientSpec {
    std::string expr;
    std::vector<double> scales;  // used when no family is given
    double lambda = 0.25;
    double tau = 1.0;
    double L = 50.0;
};

struct FamilySpec {
    std::vector<double> eps1;        // leading-scale values
    std::vector<std::string> rules;  // one rule per scale, functions of eps1
    bool empty() const { return eps1.empty(); }
};

struct QpSpec {
    std::string B;  // periodic kernel on T^N, variables y1[1..N]
    std::vector<std::vector<double>> M;
    double lambda = 0.25;
    double tau = 1.0;
    double L = 50.0;
};

struct LipschitzSpec {
    double alpha = 0.25;
    int ladder = 12;
    double p = 4.0;
    int delta_index = 0;  // 0: two-scale window; j >= 1: delta = eps_j path
};

struct SweepConfig {
    std::string name = "sweep";
    std::string kind = "cz";  // cz | lipschitz | quasiperiodic
    int dim = 1;
    CoefficientSpec coefficient;
    FamilySpec family;
    QpSpec qp;
    ForcingSpec f;  // divergence forcing (cz)
    ForcingSpec F;  // bulk forcing (lipschitz)
    std::vector<double> p_list{2.0, 4.0};
    double grid_factor = 16.0;
    long max_nodes = 4000000;
    LipschitzSpec lip;
    std::uint64_t seed = 0;
};

SweepConfig parse_config(const std::string& path);
SweepConfig parse_config_text(const std::string& json_text);
/// Canonical JSON emission; parse(emit(parse(x))) is the identity on the
/// semantic content and emit's output feeds the config hash.
std::string emit_config(const SweepConfig& cfg);
std::uint64_t config_hash(const SweepConfig& cfg);

struct InstanceRecord {
    int index = 0;
    std::vector<double> eps;
    double h = 0.0;
    std::vector<std::pair<std::string, double>> values;  // sorted by key
    std::string error;  // nonempty: instance failed or was skipped
};

struct ExperimentReport {
    std::string name;
    std::string kind;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    std::string version;
    std::vector<InstanceRecord> records;
    std::vector<std::pair<std::string, double>> aggregates;
    bool pass = false;
    std::string verdict;
    std::string csv_name;  // rates.csv or profile.csv
    std::string csv;
};

/// Uniform Calderon-Zygmund proxy: R(eps,p) = |grad u|_p / |f|_p per family
/// member; PASS iff the log-log slope of R against 1/eps_n stays within 0.05
/// and the spread within 3x for every p.
ExperimentReport run_cz_sweep(const SweepConfig& cfg, int threads = 1);

/// Large-scale Lipschitz profiles r -> (avg over B_r |grad u|^2)^(1/2) at the
/// domain center over a geometric radius ladder; records the profile constant
/// K per instance and passes when K is stable across the family.
ExperimentReport run_lipschitz(const SweepConfig& cfg, int threads = 1);

/// Lifts B(Mx/eps) and delegates to the CZ sweep.
ExperimentReport run_quasiperiodic(const SweepConfig& cfg, int threads = 1);

/// Writes report.json plus the CSV plot table into out_dir.
void emit_report(const ExperimentReport& report, const std::string& out_dir);

std::string report_to_json(const ExperimentReport& report, bool with_timestamp = true);

}  // namespace msh

#endif
