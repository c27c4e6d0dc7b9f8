#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dcosim/algorithms.hpp"

namespace dcosim {

// Everything a run needs, parsed from one JSON config file. (config, seed)
// fully determines every semantic output byte; wall clock is the one
// recorded-but-nondeterministic column.
struct TopologyConfig {
    std::string kind = "ring";  // ring | complete | edges
    int n = -1;                 // defaults to problem.n
    double neighbor_weight = 1.0 / 3.0;
    Network::EdgeList edges;
};

struct ProblemConfig {
    std::string kind = "quadratic";  // quadratic | logistic
    int n = 8, m = 1, p = 10;
    double l1 = 0.0, l2 = 0.0;
    double heterogeneity = 0.0;
    uint64_t seed = 0;
};

struct CompressorConfig {
    std::string kind = "identity";  // identity | quant_inf_norm
    int bits = 2;
    int block_size = 256;
    std::optional<double> c_param;
};

struct OracleConfig {
    std::string kind = "full";  // full | sgd | lsvrg | saga
    double lsvrg_p = -1.0;      // < 0 -> 1/m
};

struct AlgorithmConfig {
    std::string name = "prox_lead";       // prox_lead | lead | dgd | nids
    std::string params = "cor6";          // thm5 | cor6 | thm7 | thm8 | thm9 | experimental
    double eta = std::numeric_limits<double>::quiet_NaN();  // override
};

struct RunConfig {
    long iterations = 1000;
    int replicas = 1;
    uint64_t seed = 0;
    long metrics_stride = 1;
    std::string output = "out";
};

struct ExperimentConfig {
    TopologyConfig topology;
    ProblemConfig problem;
    CompressorConfig compressor;
    OracleConfig oracle;
    AlgorithmConfig algorithm;
    RunConfig run;

    std::string label;  // filename stem, defaults to the config file stem

    static ExperimentConfig from_file(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text, const std::string& label);

    std::string canonical_json() const;  // defaults materialized, keys sorted
    std::string hash_hex() const;        // 64-bit FNV over canonical_json
    std::string problem_key() const;     // canonical problem subobject (cache key)
    std::string setup_key() const;       // problem + topology (compare compatibility)

    // Output directory after the DCOSIM_OUTPUT_DIR override.
    std::string output_dir() const;
};

struct MetricsRow {
    long k = 0;
    double suboptimality = 0.0;  // ||X - X*||_F^2 / n
    double consensus_err = 0.0;  // ||X - 1 xbar'||_F
    double phi = 0.0;            // Lyapunov value (phi_tilde for lsvrg/saga)
    long long bits_cum = 0;
    long long grad_evals_cum = 0;
    long long wall_ns = 0;
};

// Wired-up experiment pieces shared by every replica.
struct ExperimentSetup {
    Network net;
    CompositeProblem problem;
    CompressorSpec compressor;
    double c_effective = 0.0;
    Params params;  // meaningful for prox_lead / lead
    double eta = 0.0;
    ReferenceSolution reference;
};

ExperimentSetup build_setup(const ExperimentConfig& cfg, bool use_reference_cache = true);

// One replica, in memory.
std::vector<MetricsRow> run_replica(const ExperimentConfig& cfg, const ExperimentSetup& setup,
                                    int replica);

struct RunOutputs {
    std::vector<std::string> replica_files;
    std::string aggregate_file;  // empty unless replicas > 1
};

// Full run: per-replica CSVs plus a mean/stderr aggregate when replicas > 1.
RunOutputs run_experiment(const ExperimentConfig& cfg);

// Grid over one dotted config key ("algorithm.eta", "compressor.bits", ...),
// one run per value with a deterministically derived seed.
std::vector<RunOutputs> sweep_experiment(const ExperimentConfig& base, const std::string& axis,
                                         const std::vector<std::string>& values);

// Align several runs (shared problem + topology) on a budget axis for
// plotting; returns the written CSV path.
std::string compare_experiments(const std::vector<ExperimentConfig>& cfgs,
                                const std::string& align_axis);

NoiseEstimate run_estimate_c(const ExperimentConfig& cfg, int trials, int reps);

// Reference solution via the sidecar cache in the output directory.
ReferenceSolution reference_for(const ExperimentConfig& cfg, bool use_cache,
                                std::string* cache_path = nullptr);

void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> read_metrics_csv(const std::string& path);

}  // namespace dcosim
