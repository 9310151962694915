#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "wavebench/mpc.hpp"
#include "wavebench/train.hpp"

namespace wavebench {

struct ReportRow {
    std::string configuration;  // e.g. "M=1 (P)"
    std::string task;
    std::string method;
    double mean = 0.0;
    double stddev = 0.0;
    int runs = 0;
};

struct ReportTable {
    std::vector<ReportRow> rows;
};

void emit_report_csv(const ReportTable& t, const std::filesystem::path& p);
void emit_report_markdown(const ReportTable& t, const std::filesystem::path& p);
ReportTable parse_report_csv(const std::filesystem::path& p);

struct BenchmarkSpec {
    Scenario scenario;
    Task task = Task::Suppress;
    std::vector<std::string> methods;  // random | mpc-aem | mpc-node
    int runs = 12;
    std::uint64_t seed = 2026;
    std::filesystem::path ckpt_aem;
    std::filesystem::path ckpt_node;
    MpcConfig mpc;
    std::filesystem::path out_dir;  // empty: no artifacts written
    int threads = 0;

    void validate() const;
};

struct BenchmarkResult {
    ReportTable table;
    // energies[method_index][run]
    std::vector<std::vector<double>> energies;
};

// Table-I-style protocol: per method x run, a seeded random feasible initial
// design, a 200-step closed-loop episode, and the window-mean scattered
// energy. Per-run metrics CSVs land in out_dir when set.
BenchmarkResult run_benchmark(const BenchmarkSpec& spec);

std::string configuration_label(const Scenario& sc);

// Window-mean scattered energy of a frozen design over one episode.
double frozen_design_energy(const Scenario& sc, const DesignState& d, int steps);

struct OracleResult {
    DesignState best;
    double energy = 0.0;
    int evaluated = 0;
};

// Brute-force frozen-configuration search: exhaustive over a position
// lattice x radius levels for M=1 (and M=2), coordinate descent with three
// sweeps for larger M. Suppression minimizes, focusing maximizes.
OracleResult oracle_frozen_config(const Scenario& sc, Task task, int grid_res = 9,
                                  int radius_levels = 5, int threads = 0);

struct LongTermReport {
    std::vector<double> gt_mean;  // mean |sigma| per action step, ground truth
    PredictionCurves aem;
    PredictionCurves aem_nopml;  // AEM trained with the damping field forced to zero
    PredictionCurves node;
};

LongTermReport long_term_prediction_report(const Model& aem, const Model& aem_nopml,
                                           const Model& node, const Scenario& sc,
                                           const Dataset& ds, int ep_begin, int ep_end,
                                           int horizon);
void write_long_term_csv(const LongTermReport& r, const std::filesystem::path& p);

}  // namespace wavebench
