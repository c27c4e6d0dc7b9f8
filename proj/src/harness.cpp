#include "dcosim/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace dcosim {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void require_keys(const json& obj, const std::string& section,
                  const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw config_error("unknown key '" + it.key() + "' in section '" + section + "'");
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw config_error("bad value for '" + key + "': " + e.what());
    }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str(), fs::path(path).stem().string());
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text,
                                                  const std::string& label) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw config_error(std::string("config parse error: ") + e.what());
    }
    require_keys(j, "(top level)",
                 {"topology", "problem", "compressor", "oracle", "algorithm", "run"});

    ExperimentConfig cfg;
    cfg.label = label.empty() ? "run" : label;

    if (j.contains("problem")) {
        const json& p = j["problem"];
        require_keys(p, "problem", {"kind", "n", "m", "p", "l1", "l2", "heterogeneity", "seed"});
        cfg.problem.kind = get_or<std::string>(p, "kind", cfg.problem.kind);
        cfg.problem.n = get_or<int>(p, "n", cfg.problem.n);
        cfg.problem.m = get_or<int>(p, "m", cfg.problem.m);
        cfg.problem.p = get_or<int>(p, "p", cfg.problem.p);
        cfg.problem.l1 = get_or<double>(p, "l1", cfg.problem.l1);
        cfg.problem.l2 = get_or<double>(p, "l2", cfg.problem.l2);
        cfg.problem.heterogeneity = get_or<double>(p, "heterogeneity", cfg.problem.heterogeneity);
        cfg.problem.seed = get_or<uint64_t>(p, "seed", cfg.problem.seed);
    }
    if (j.contains("topology")) {
        const json& t = j["topology"];
        require_keys(t, "topology", {"kind", "n", "neighbor_weight", "edges"});
        cfg.topology.kind = get_or<std::string>(t, "kind", cfg.topology.kind);
        cfg.topology.n = get_or<int>(t, "n", cfg.topology.n);
        cfg.topology.neighbor_weight =
            get_or<double>(t, "neighbor_weight", cfg.topology.neighbor_weight);
        if (t.contains("edges")) {
            for (const auto& e : t["edges"]) {
                if (!e.is_array() || e.size() != 2)
                    throw config_error("topology.edges entries must be [i, j] pairs");
                cfg.topology.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
            }
        }
    }
    if (j.contains("compressor")) {
        const json& c = j["compressor"];
        require_keys(c, "compressor", {"kind", "bits", "block_size", "c_param"});
        cfg.compressor.kind = get_or<std::string>(c, "kind", cfg.compressor.kind);
        cfg.compressor.bits = get_or<int>(c, "bits", cfg.compressor.bits);
        cfg.compressor.block_size = get_or<int>(c, "block_size", cfg.compressor.block_size);
        if (c.contains("c_param")) cfg.compressor.c_param = c["c_param"].get<double>();
    }
    if (j.contains("oracle")) {
        const json& o = j["oracle"];
        require_keys(o, "oracle", {"kind", "lsvrg_p"});
        cfg.oracle.kind = get_or<std::string>(o, "kind", cfg.oracle.kind);
        cfg.oracle.lsvrg_p = get_or<double>(o, "lsvrg_p", cfg.oracle.lsvrg_p);
    }
    if (j.contains("algorithm")) {
        const json& a = j["algorithm"];
        require_keys(a, "algorithm", {"name", "params", "eta"});
        cfg.algorithm.name = get_or<std::string>(a, "name", cfg.algorithm.name);
        cfg.algorithm.params = get_or<std::string>(a, "params", cfg.algorithm.params);
        cfg.algorithm.eta = get_or<double>(a, "eta", cfg.algorithm.eta);
    }
    if (j.contains("run")) {
        const json& r = j["run"];
        require_keys(r, "run", {"iterations", "replicas", "seed", "metrics_stride", "output"});
        cfg.run.iterations = get_or<long>(r, "iterations", cfg.run.iterations);
        cfg.run.replicas = get_or<int>(r, "replicas", cfg.run.replicas);
        cfg.run.seed = get_or<uint64_t>(r, "seed", cfg.run.seed);
        cfg.run.metrics_stride = get_or<long>(r, "metrics_stride", cfg.run.metrics_stride);
        cfg.run.output = get_or<std::string>(r, "output", cfg.run.output);
    }

    if (cfg.run.iterations < 0) throw config_error("run.iterations must be >= 0");
    if (cfg.run.replicas < 1) throw config_error("run.replicas must be >= 1");
    if (cfg.run.metrics_stride < 1) throw config_error("run.metrics_stride must be >= 1");
    static const std::set<std::string> algos = {"prox_lead", "lead", "dgd", "nids"};
    if (!algos.count(cfg.algorithm.name))
        throw config_error("unknown algorithm: " + cfg.algorithm.name);
    return cfg;
}

namespace {

json topology_json(const ExperimentConfig& c) {
    json t{{"kind", c.topology.kind},
           {"n", c.topology.n < 0 ? c.problem.n : c.topology.n},
           {"neighbor_weight", c.topology.neighbor_weight}};
    if (!c.topology.edges.empty()) {
        json e = json::array();
        for (auto [a, b] : c.topology.edges) e.push_back({a, b});
        t["edges"] = e;
    }
    return t;
}

json problem_json(const ExperimentConfig& c) {
    return json{{"kind", c.problem.kind},           {"n", c.problem.n},
                {"m", c.problem.m},                 {"p", c.problem.p},
                {"l1", c.problem.l1},               {"l2", c.problem.l2},
                {"heterogeneity", c.problem.heterogeneity},
                {"seed", c.problem.seed}};
}

}  // namespace

std::string ExperimentConfig::canonical_json() const {
    json j{{"topology", topology_json(*this)},
           {"problem", problem_json(*this)},
           {"compressor",
            json{{"kind", compressor.kind},
                 {"bits", compressor.bits},
                 {"block_size", compressor.block_size},
                 {"c_param", compressor.c_param ? json(*compressor.c_param) : json(nullptr)}}},
           {"oracle", json{{"kind", oracle.kind}, {"lsvrg_p", oracle.lsvrg_p}}},
           {"algorithm", json{{"name", algorithm.name},
                              {"params", algorithm.params},
                              {"eta", std::isfinite(algorithm.eta) ? json(algorithm.eta)
                                                                   : json(nullptr)}}},
           {"run", json{{"iterations", run.iterations},
                        {"replicas", run.replicas},
                        {"seed", run.seed},
                        {"metrics_stride", run.metrics_stride}}}};
    return j.dump();
}

std::string ExperimentConfig::hash_hex() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(canonical_json())));
    return buf;
}

std::string ExperimentConfig::problem_key() const { return problem_json(*this).dump(); }

std::string ExperimentConfig::setup_key() const {
    return problem_json(*this).dump() + topology_json(*this).dump();
}

std::string ExperimentConfig::output_dir() const {
    const char* env = std::getenv("DCOSIM_OUTPUT_DIR");
    return env && *env ? std::string(env) : run.output;
}

namespace {

Network build_network(const ExperimentConfig& cfg) {
    int n = cfg.topology.n < 0 ? cfg.problem.n : cfg.topology.n;
    if (cfg.topology.n >= 0 && cfg.topology.n != cfg.problem.n)
        throw config_error("topology.n and problem.n disagree");
    try {
        if (cfg.topology.kind == "ring") return Network::ring(n, cfg.topology.neighbor_weight);
        if (cfg.topology.kind == "complete") return Network::complete(n);
        if (cfg.topology.kind == "edges") return Network::from_edges(n, cfg.topology.edges);
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("topology: ") + e.what());
    }
    throw config_error("unknown topology kind: " + cfg.topology.kind);
}

CompressorSpec build_compressor(const ExperimentConfig& cfg) {
    if (cfg.compressor.kind == "identity") return CompressorSpec::identity();
    if (cfg.compressor.kind == "quant_inf_norm")
        return CompressorSpec::quantizer(cfg.compressor.bits, cfg.compressor.block_size,
                                         cfg.compressor.c_param);
    throw config_error("unknown compressor kind: " + cfg.compressor.kind);
}

std::string reference_cache_path(const ExperimentConfig& cfg) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(cfg.problem_key())));
    return (fs::path(cfg.output_dir()) / (std::string("ref-") + buf + ".csv")).string();
}

}  // namespace

ReferenceSolution reference_for(const ExperimentConfig& cfg, bool use_cache,
                                std::string* cache_path_out) {
    CompositeProblem prob =
        generate_synthetic(cfg.problem.seed, cfg.problem.n, cfg.problem.m, cfg.problem.p,
                           problem_kind_from_string(cfg.problem.kind),
                           cfg.problem.heterogeneity, cfg.problem.l1, cfg.problem.l2);
    const std::string path = reference_cache_path(cfg);
    if (cache_path_out) *cache_path_out = path;

    // The cache stores only x*; everything derived is one gradient pass.
    auto assemble = [&prob](Vector x_star, double tol, long iters) {
        ReferenceSolution ref;
        ref.x_star = std::move(x_star);
        ref.eta = 1.0;
        const int n = prob.nodes();
        ref.X_star = Matrix(n, prob.dim());
        ref.X_star.rowwise() = ref.x_star.transpose();
        ref.grad_star = prob.grad_matrix(ref.X_star);
        ref.mean_grad = ref.grad_star.colwise().mean();
        ref.D_star = -(ref.grad_star.rowwise() - ref.mean_grad.transpose());
        ref.Z_star = ref.Z_star_for(ref.eta);
        ref.obj_star = prob.objective(ref.x_star);
        ref.tol = tol;
        ref.iterations = iters;
        return ref;
    };

    if (use_cache && fs::exists(path)) {
        std::ifstream in(path);
        std::string header, line;
        std::getline(in, header);
        std::getline(in, line);
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ss, cell, ',')) vals.push_back(std::strtod(cell.c_str(), nullptr));
        if (static_cast<int>(vals.size()) == cfg.problem.p + 2) {
            Vector x(cfg.problem.p);
            for (int i = 0; i < cfg.problem.p; ++i) x(i) = vals[i + 2];
            return assemble(std::move(x), vals[0], static_cast<long>(vals[1]));
        }
        // stale or foreign cache: fall through and rebuild
    }

    ReferenceSolution ref = solve_reference(prob, 1.0, 1e-13);
    if (use_cache) {
        fs::create_directories(fs::path(path).parent_path());
        std::ofstream out(path);
        out << "tol,iterations";
        for (int i = 0; i < prob.dim(); ++i) out << ",x" << i;
        out << "\n" << fmt_double(ref.tol) << "," << ref.iterations;
        for (int i = 0; i < prob.dim(); ++i) out << "," << fmt_double(ref.x_star(i));
        out << "\n";
    }
    return ref;
}

ExperimentSetup build_setup(const ExperimentConfig& cfg, bool use_reference_cache) {
    Network net = build_network(cfg);
    CompositeProblem prob =
        generate_synthetic(cfg.problem.seed, cfg.problem.n, cfg.problem.m, cfg.problem.p,
                           problem_kind_from_string(cfg.problem.kind),
                           cfg.problem.heterogeneity, cfg.problem.l1, cfg.problem.l2);
    CompressorSpec comp = build_compressor(cfg);
    const double c_eff = effective_c(comp, prob.dim());

    Params params;
    double eta;
    if (cfg.algorithm.name == "prox_lead" || cfg.algorithm.name == "lead") {
        try {
            params = select_params(params_source_from_string(cfg.algorithm.params), prob.mu(),
                                   prob.smoothness(), c_eff, net.spectral(),
                                   prob.batches_per_node(),
                                   cfg.oracle.lsvrg_p < 0 ? 1.0 / prob.batches_per_node()
                                                          : cfg.oracle.lsvrg_p,
                                   cfg.algorithm.eta);
        } catch (const std::invalid_argument& e) {
            throw config_error(std::string("params: ") + e.what());
        }
        eta = params.at(0).eta;
    } else {
        eta = std::isfinite(cfg.algorithm.eta) ? cfg.algorithm.eta
                                               : 1.0 / (2.0 * prob.smoothness());
        if (eta <= 0.0) throw config_error("algorithm.eta must be positive");
        params.eta = eta;
    }

    ReferenceSolution ref = reference_for(cfg, use_reference_cache);
    return ExperimentSetup{std::move(net), std::move(prob),  comp, c_eff,
                           params,         eta,              std::move(ref)};
}

std::vector<MetricsRow> run_replica(const ExperimentConfig& cfg, const ExperimentSetup& setup,
                                    int replica) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto& prob = setup.problem;
    const auto& net = setup.net;
    const int n = prob.nodes();
    const Matrix X0 = Matrix::Zero(n, prob.dim());

    RngStream oracle_rng(cfg.run.seed, replica, "oracle");
    RngStream comp_rng(cfg.run.seed, replica, "compressor");
    OracleState oracle = OracleState::init(oracle_kind_from_string(cfg.oracle.kind), prob, X0,
                                           cfg.oracle.lsvrg_p);

    const bool is_pd = cfg.algorithm.name == "prox_lead" || cfg.algorithm.name == "lead";
    const bool is_nids = cfg.algorithm.name == "nids";
    if (is_nids || cfg.algorithm.name == "dgd") {
        if (oracle.kind() != OracleKind::full)
            throw config_error(cfg.algorithm.name + " runs with the full gradient oracle");
    }
    if (cfg.algorithm.name == "lead" && prob.regularizer().kind != RegularizerKind::zero)
        throw config_error("lead handles smooth problems only; use prox_lead for l1");

    AlgorithmState state;
    Matrix X_dgd;
    long long dgd_bits = 0;
    long long baseline_grad_evals = 0;  // dgd/nids bypass the oracle
    if (cfg.algorithm.name == "prox_lead")
        state = init_prox_lead(prob, oracle, net, setup.params, X0, oracle_rng);
    else if (cfg.algorithm.name == "lead")
        state = init_lead(prob, oracle, net, setup.params, X0, oracle_rng);
    else if (is_nids) {
        state = make_state(prob.prox(setup.eta, X0 - setup.eta * prob.grad_matrix(X0)),
                           Matrix::Zero(n, prob.dim()), X0, net);
        baseline_grad_evals += static_cast<long long>(n) * prob.batches_per_node();
    } else {
        X_dgd = X0;
    }

    std::vector<MetricsRow> rows;
    auto record = [&](long k) {
        MetricsRow r;
        r.k = k;
        const Matrix& X = cfg.algorithm.name == "dgd" ? X_dgd : state.X;
        r.suboptimality = (X - setup.reference.X_star).squaredNorm() / n;
        Matrix centered = X;
        centered.rowwise() -= X.colwise().mean().eval();
        r.consensus_err = centered.norm();
        if (cfg.algorithm.name == "dgd") {
            r.phi = std::numeric_limits<double>::quiet_NaN();
            r.bits_cum = dgd_bits;
        } else if (is_nids) {
            Params::Resolved rp{setup.eta, 1.0, setup.eta};
            r.phi = lyapunov(state, setup.reference, rp, 0.0, prob, net).phi;
            r.bits_cum = state.bits_sent;
        } else {
            r.phi = lyapunov(state, setup.reference, setup.params.at(state.k),
                             setup.c_effective, prob, net, &oracle)
                        .phi_tilde;
            r.bits_cum = state.bits_sent;
        }
        r.grad_evals_cum = is_pd ? oracle.grad_evals() : baseline_grad_evals;
        r.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
        rows.push_back(r);
    };

    for (long it = 1; it <= cfg.run.iterations; ++it) {
        if (cfg.algorithm.name == "prox_lead")
            prox_lead_step(state, prob, oracle, setup.compressor, net, setup.params, oracle_rng,
                           comp_rng);
        else if (cfg.algorithm.name == "lead")
            lead_step(state, prob, oracle, setup.compressor, net, setup.params, oracle_rng,
                      comp_rng);
        else if (is_nids) {
            nids_step(state, prob, net, setup.eta);
            baseline_grad_evals += static_cast<long long>(n) * prob.batches_per_node();
        } else {
            X_dgd = dgd_step(X_dgd, prob, net, setup.eta);
            baseline_grad_evals += static_cast<long long>(n) * prob.batches_per_node();
            dgd_bits += static_cast<long long>(n) * 32ll * prob.dim();
        }
        if (it % cfg.run.metrics_stride == 0 || it == cfg.run.iterations) record(it);
    }
    return rows;
}

void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows) {
    fs::create_directories(fs::path(path).parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "k,suboptimality,consensus_err,phi,bits_cum,grad_evals_cum,wall_ns\n";
    for (const auto& r : rows)
        out << r.k << ',' << fmt_double(r.suboptimality) << ',' << fmt_double(r.consensus_err)
            << ',' << fmt_double(r.phi) << ',' << r.bits_cum << ',' << r.grad_evals_cum << ','
            << r.wall_ns << "\n";
}

std::vector<MetricsRow> read_metrics_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string line;
    std::getline(in, line);  // header
    std::vector<MetricsRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 7) throw std::runtime_error("malformed metrics row in " + path);
        MetricsRow r;
        r.k = std::strtol(cells[0].c_str(), nullptr, 10);
        r.suboptimality = std::strtod(cells[1].c_str(), nullptr);
        r.consensus_err = std::strtod(cells[2].c_str(), nullptr);
        r.phi = std::strtod(cells[3].c_str(), nullptr);
        r.bits_cum = std::strtoll(cells[4].c_str(), nullptr, 10);
        r.grad_evals_cum = std::strtoll(cells[5].c_str(), nullptr, 10);
        r.wall_ns = std::strtoll(cells[6].c_str(), nullptr, 10);
        rows.push_back(r);
    }
    return rows;
}

RunOutputs run_experiment(const ExperimentConfig& cfg) {
    const ExperimentSetup setup = build_setup(cfg);
    const fs::path dir(cfg.output_dir());
    fs::create_directories(dir);
    const std::string stem = cfg.label + "-" + cfg.hash_hex();

    std::vector<std::vector<MetricsRow>> all(cfg.run.replicas);
    RunOutputs outputs;

    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
    for (int r = 0; r < cfg.run.replicas; ++r) {
        try {
            all[r] = run_replica(cfg, setup, r);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    for (int r = 0; r < cfg.run.replicas; ++r) {
        const std::string path = (dir / (stem + "-r" + std::to_string(r) + ".csv")).string();
        write_metrics_csv(path, all[r]);
        outputs.replica_files.push_back(path);
    }

    if (cfg.run.replicas > 1) {
        // All replicas share the recording grid, so aggregation is rowwise.
        const size_t nrows = all[0].size();
        for (const auto& rep : all)
            if (rep.size() != nrows)
                throw std::runtime_error("replica row counts disagree");
        const std::string path = (dir / (stem + "-agg.csv")).string();
        std::ofstream out(path);
        out << "k,suboptimality_mean,suboptimality_stderr,consensus_err_mean,"
               "consensus_err_stderr,phi_mean,phi_stderr,bits_cum_mean,grad_evals_cum_mean\n";
        const double R = cfg.run.replicas;
        for (size_t i = 0; i < nrows; ++i) {
            auto stats = [&](auto getter) {
                double mean = 0.0;
                for (const auto& rep : all) mean += getter(rep[i]);
                mean /= R;
                double var = 0.0;
                for (const auto& rep : all) {
                    const double d = getter(rep[i]) - mean;
                    var += d * d;
                }
                const double stderr_ = R > 1 ? std::sqrt(var / (R - 1) / R) : 0.0;
                return std::pair<double, double>(mean, stderr_);
            };
            auto [sm, ss] = stats([](const MetricsRow& r) { return r.suboptimality; });
            auto [cm, cs] = stats([](const MetricsRow& r) { return r.consensus_err; });
            auto [pm, ps] = stats([](const MetricsRow& r) { return r.phi; });
            auto [bm, bs] = stats([](const MetricsRow& r) { return double(r.bits_cum); });
            auto [gm, gs] = stats([](const MetricsRow& r) { return double(r.grad_evals_cum); });
            (void)bs;
            (void)gs;
            out << all[0][i].k << ',' << fmt_double(sm) << ',' << fmt_double(ss) << ','
                << fmt_double(cm) << ',' << fmt_double(cs) << ',' << fmt_double(pm) << ','
                << fmt_double(ps) << ',' << fmt_double(bm) << ',' << fmt_double(gm) << "\n";
        }
        outputs.aggregate_file = path;
    }
    return outputs;
}

namespace {

void patch_config(ExperimentConfig& cfg, const std::string& axis, const std::string& value) {
    auto as_double = [&]() { return std::strtod(value.c_str(), nullptr); };
    auto as_int = [&]() { return static_cast<int>(std::strtol(value.c_str(), nullptr, 10)); };
    if (axis == "algorithm.eta") cfg.algorithm.eta = as_double();
    else if (axis == "algorithm.params") cfg.algorithm.params = value;
    else if (axis == "compressor.bits") cfg.compressor.bits = as_int();
    else if (axis == "compressor.block_size") cfg.compressor.block_size = as_int();
    else if (axis == "compressor.kind") cfg.compressor.kind = value;
    else if (axis == "oracle.kind") cfg.oracle.kind = value;
    else if (axis == "oracle.lsvrg_p") cfg.oracle.lsvrg_p = as_double();
    else if (axis == "problem.heterogeneity") cfg.problem.heterogeneity = as_double();
    else if (axis == "problem.l1") cfg.problem.l1 = as_double();
    else if (axis == "problem.seed") cfg.problem.seed = std::strtoull(value.c_str(), nullptr, 10);
    else if (axis == "run.iterations") cfg.run.iterations = std::strtol(value.c_str(), nullptr, 10);
    else throw config_error("unsupported sweep axis: " + axis);
}

}  // namespace

std::vector<RunOutputs> sweep_experiment(const ExperimentConfig& base, const std::string& axis,
                                         const std::vector<std::string>& values) {
    if (values.empty()) throw config_error("sweep: empty value list");
    std::vector<RunOutputs> outs;
    for (size_t i = 0; i < values.size(); ++i) {
        ExperimentConfig cfg = base;
        patch_config(cfg, axis, values[i]);
        uint64_t state = base.run.seed ^ (0x9e3779b97f4a7c15ull * (i + 1));
        cfg.run.seed = splitmix64(state);
        cfg.label = base.label + "-sweep" + std::to_string(i);
        outs.push_back(run_experiment(cfg));
    }
    return outs;
}

std::string compare_experiments(const std::vector<ExperimentConfig>& cfgs,
                                const std::string& align_axis) {
    if (cfgs.empty()) throw config_error("compare: no configs");
    if (align_axis != "iterations" && align_axis != "bits" && align_axis != "grad_evals")
        throw config_error("compare: align axis must be iterations | bits | grad_evals");
    for (const auto& c : cfgs)
        if (c.setup_key() != cfgs.front().setup_key())
            throw config_error("compare: configs disagree on problem/topology");

    auto axis_of = [&](const MetricsRow& r) -> double {
        if (align_axis == "iterations") return static_cast<double>(r.k);
        if (align_axis == "bits") return static_cast<double>(r.bits_cum);
        return static_cast<double>(r.grad_evals_cum);
    };

    std::vector<std::vector<MetricsRow>> series;
    std::vector<std::string> names;
    for (const auto& c : cfgs) {
        const ExperimentSetup setup = build_setup(c);
        series.push_back(run_replica(c, setup, 0));
        names.push_back(c.algorithm.name + "_" + c.hash_hex().substr(0, 6));
        if (series.back().empty()) throw config_error("compare: a run produced no rows");
    }

    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    std::set<double> grid;
    for (const auto& s : series) {
        lo = std::max(lo, axis_of(s.front()));
        hi = std::min(hi, axis_of(s.back()));
        for (const auto& r : s) grid.insert(axis_of(r));
    }

    const fs::path dir(cfgs.front().output_dir());
    fs::create_directories(dir);
    const std::string path =
        (dir / ("compare-" + align_axis + "-" + cfgs.front().hash_hex().substr(0, 8) + ".csv"))
            .string();
    std::ofstream out(path);
    out << "axis";
    for (const auto& n : names) out << ',' << n;
    out << "\n";
    for (double t : grid) {
        if (t < lo || t > hi) continue;
        out << fmt_double(t);
        for (const auto& s : series) {
            // last recorded value at or before budget t
            double v = s.front().suboptimality;
            for (const auto& r : s) {
                if (axis_of(r) <= t) v = r.suboptimality;
                else break;
            }
            out << ',' << fmt_double(v);
        }
        out << "\n";
    }
    return path;
}

NoiseEstimate run_estimate_c(const ExperimentConfig& cfg, int trials, int reps) {
    const CompressorSpec comp = build_compressor(cfg);
    RngStream rng(cfg.run.seed, 0, "compressor");
    return estimate_c(comp, gaussian_sampler(cfg.problem.p), trials, rng, reps);
}

}  // namespace dcosim
