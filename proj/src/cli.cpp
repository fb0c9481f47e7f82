// Copyright 2026 The mcmlab authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mcmlab/cli.hpp"

#include <filesystem>
#include <iostream>
#include <sstream>

namespace mcmlab::cli {

namespace fs = std::filesystem;

namespace {

std::string join(const RunContext& ctx, const std::string& name) {
    fs::create_directories(ctx.out_dir);
    return (fs::path(ctx.out_dir) / name).string();
}

std::string resolve_input(const RunContext& ctx, const std::string& path) {
    fs::path p(path);
    if (p.is_absolute() || fs::exists(p)) return p.string();
    return (fs::path(ctx.config_dir) / p).string();
}

uint64_t require_seed(const json& config, const RunContext& ctx) {
    if (ctx.seed_override) return *ctx.seed_override;
    if (!config.contains("seed")) throw std::invalid_argument("config requires a \"seed\" field");
    return config.at("seed").get<uint64_t>();
}

RawInstrumentModel model_from_config(const json& config, const RunContext& ctx, uint64_t seed,
                                     uint64_t model_stream) {
    MCMLayerSpec layer;
    if (config.contains("layer")) layer = layer_from_json(config.at("layer"));
    if (config.contains("model_file")) {
        return model_from_json(load_json_file(resolve_input(ctx, config.at("model_file"))));
    }
    if (config.contains("model")) {
        return model_from_json(config.at("model"));
    }
    if (config.contains("sampler")) {
        if (!config.contains("layer")) {
            throw std::invalid_argument("sampler configs require a \"layer\"");
        }
        SamplerSpec spec = sampler_spec_from_json(config.at("sampler"));
        Philox rng(seed, model_stream, 0);
        return sample_random_usi(layer, spec, rng);
    }
    throw std::invalid_argument("config needs one of \"model\", \"model_file\", \"sampler\"");
}

McmcbOptions options_from_config(const json& config, const RunContext& ctx) {
    McmcbOptions opt;
    std::string mode = config.value("mode", "uniform");
    if (mode == "uniform") {
        opt.mode = SamplingMode::UniformK;
    } else if (mode == "exhaustive") {
        opt.mode = SamplingMode::Exhaustive;
    } else {
        throw std::invalid_argument("mode must be \"uniform\" or \"exhaustive\"");
    }
    opt.K = config.value("K", 100u);
    if (config.contains("depths")) opt.depths = config.at("depths").get<std::vector<uint32_t>>();
    opt.circuits_per_depth = config.value("circuits_per_depth", 30u);
    opt.shots = config.value("shots", 1000u);
    opt.delta = config.value("delta", 0.05);
    opt.bootstrap_resamples = config.value("bootstrap", 200u);
    opt.jobs = ctx.jobs;
    return opt;
}

std::string decays_csv(const MCMCBResult& result) {
    std::ostringstream csv;
    csv << "P,c1,c2,d,f_mean,sem\n";
    uint32_t m = result.layer.m();
    for (const TripletResult& t : result.triplets) {
        for (size_t di = 0; di < result.depths.size(); di++) {
            csv << (result.layer.num_unmeasured() ? t.p.str() : "") << ","
                << ZMask(t.c1, m).str() << "," << ZMask(t.c2, m).str() << ","
                << result.depths[di] << "," << t.depth_means[di] << "," << t.depth_sems[di]
                << "\n";
        }
    }
    return csv.str();
}

constexpr uint64_t kModelStream = 0x5a4d0de1;

}  // namespace

int cmd_simulate(const json& config, const RunContext& ctx) {
    uint64_t seed = require_seed(config, ctx);
    CircuitIR circuit;
    if (config.contains("circuit_file")) {
        circuit = circuit_from_json(load_json_file(resolve_input(ctx, config.at("circuit_file"))));
    } else {
        circuit = circuit_from_json(config.at("circuit"));
    }
    uint32_t shots = config.value("shots", 1000u);
    uint32_t m = 0;
    for (const auto& op : circuit.ops) {
        if (const auto* mcm = std::get_if<McmInst>(&op)) {
            m = std::max<uint32_t>(m, static_cast<uint32_t>(mcm->qubits.size()));
        }
    }
    std::ostringstream lines;
    run_shots_visit(circuit, shots, seed, [&](const ShotRecord& shot) {
        lines << shot_to_jsonl(shot, circuit.n, m) << "\n";
    });
    write_text_file(join(ctx, "shots.jsonl"), lines.str());
    json summary;
    summary["seed"] = seed;
    summary["shots"] = shots;
    summary["n"] = circuit.n;
    write_text_file(join(ctx, "simulate.json"), summary.dump(2) + "\n");
    return 0;
}

int cmd_mcmcb(const json& config, const RunContext& ctx) {
    uint64_t seed = require_seed(config, ctx);
    RawInstrumentModel model = model_from_config(config, ctx, seed, kModelStream);
    McmcbOptions opt = options_from_config(config, ctx);

    bool save_shots = config.value("save_shots", true);
    std::vector<std::vector<std::string>> shot_lines;
    if (save_shots) {
        shot_lines.resize(count_mcmcb_groups(model.layer, opt, seed));
        uint32_t n = model.layer.n;
        uint32_t m = model.layer.m();
        opt.shot_sink = [&shot_lines, n, m](size_t group, const PauliOp& p, uint32_t depth,
                                            uint32_t circuit, const ShotRecord& shot) {
            json j;
            j["P"] = p.n == 0 ? "" : p.str();
            j["d"] = depth;
            j["circuit"] = circuit;
            json mcm = json::array();
            for (uint64_t w : shot.mcm_bits) {
                mcm.push_back(ZMask(w, m).str());
            }
            j["mcm"] = mcm;
            j["final"] = ZMask(shot.final_bits, n).str();
            j["seed"] = shot.shot_index;
            shot_lines[group].push_back(j.dump());
        };
    }

    MCMCBResult result = run_mcmcb(model, opt, seed);

    json out = result_to_json(result);
    out["model"] = model_to_json(model);
    write_text_file(join(ctx, "results.json"), out.dump(2) + "\n");
    write_text_file(join(ctx, "decays.csv"), decays_csv(result));
    if (save_shots) {
        std::ostringstream all;
        for (const auto& group : shot_lines) {
            for (const std::string& line : group) all << line << "\n";
        }
        write_text_file(join(ctx, "shots.jsonl"), all.str());
    }
    std::cout << "F_hat = " << result.F_hat << " +/- " << result.sigma << "\n";
    return 0;
}

int cmd_sweep(const json& config, const RunContext& ctx) {
    uint64_t seed = require_seed(config, ctx);
    if (!config.contains("layer")) throw std::invalid_argument("sweep requires \"layer\"");
    MCMLayerSpec layer = layer_from_json(config.at("layer"));
    SamplerSpec sampler = sampler_spec_from_json(config.value("sampler", json::object()));
    McmcbOptions opt = options_from_config(config, ctx);

    if (config.contains("kscaling")) {
        // sigma(F_hat) as a function of K, from resampling the analytic
        // decay-parameter pool of one sampled model.
        const json& ks = config.at("kscaling");
        std::vector<uint32_t> k_list = ks.value("K", std::vector<uint32_t>{10, 25, 50, 100, 200, 400});
        uint32_t reps = ks.value("repetitions", 400u);
        Philox model_rng(seed, kModelStream, 0);
        RawInstrumentModel model = sample_random_usi(layer, sampler, model_rng);
        USI usi = usi_from_raw(model);
        LambdaTildeTable table = lambda_tilde_table(usi);
        uint32_t nm = layer.num_unmeasured();
        uint32_t m = layer.m();
        std::vector<double> pool;
        for (uint64_t pi = 0; pi < (1ULL << (2 * nm)); pi++) {
            PauliOp p = pauli_from_index(pi, nm);
            for (uint64_t c1 = 0; c1 < (1ULL << m); c1++) {
                for (uint64_t c2 = 0; c2 < (1ULL << m); c2++) {
                    pool.push_back(predict_r(layer, table, p, c1, c2, -1.0).r);
                }
            }
        }
        Philox rng(seed, 0x4b5ca1e, 0);
        std::ostringstream csv;
        csv << "K,sigma_F\n";
        for (uint32_t K : k_list) {
            std::vector<double> f_hats;
            for (uint32_t rep = 0; rep < reps; rep++) {
                double acc = 0;
                for (uint32_t k = 0; k < K; k++) acc += pool[rng.below(pool.size())];
                f_hats.push_back(acc / K);
            }
            csv << K << "," << sample_std(f_hats) << "\n";
        }
        write_text_file(join(ctx, "kscaling.csv"), csv.str());
        return 0;
    }

    std::vector<double> grid;
    if (config.contains("p_grid")) {
        if (config.at("p_grid").is_array()) {
            grid = config.at("p_grid").get<std::vector<double>>();
        } else {
            const json& g = config.at("p_grid");
            double start = g.at("start").get<double>();
            double stop = g.at("stop").get<double>();
            uint32_t count = g.at("count").get<uint32_t>();
            if (count == 0) throw std::invalid_argument("empty sweep grid");
            for (uint32_t i = 0; i < count; i++) {
                grid.push_back(count == 1 ? start
                                          : start + (stop - start) * i / (count - 1.0));
            }
        }
    }
    if (grid.empty()) throw std::invalid_argument("empty sweep grid");

    std::ostringstream csv;
    csv << "index,p,seed,F_true,F_hat,sigma,abs_err_over_sigma\n";
    for (size_t i = 0; i < grid.size(); i++) {
        uint64_t model_seed = seed + 1000003ULL * i;
        SamplerSpec spec = sampler;
        spec.p = grid[i];
        Philox model_rng(model_seed, kModelStream, 0);
        RawInstrumentModel model = sample_random_usi(layer, spec, model_rng);
        double f_true = usi_fidelity(usi_from_raw(model));
        MCMCBResult result = run_mcmcb(model, opt, model_seed);
        double ratio = result.sigma > 0 ? std::abs(result.F_hat - f_true) / result.sigma : 0.0;
        csv << i << "," << grid[i] << "," << model_seed << "," << f_true << "," << result.F_hat
            << "," << result.sigma << "," << ratio << "\n";
    }
    write_text_file(join(ctx, "sweep.csv"), csv.str());
    return 0;
}

int cmd_ptg(const json& config, const RunContext& ctx) {
    if (!config.contains("layers")) throw std::invalid_argument("ptg requires \"layers\"");
    std::vector<MCMLayerSpec> layers;
    for (const json& lj : config.at("layers")) layers.push_back(layer_from_json(lj));
    PTG graph = build_ptg(layers);

    std::map<std::string, size_t> by_label;
    for (size_t i = 0; i < graph.edges.size(); i++) by_label[graph.edges[i].label] = i;

    json report;
    report["num_vertices"] = graph.vertices.size();
    report["num_edges"] = graph.edges.size();
    report["num_components"] = graph.num_components();
    report["cycle_dim"] = graph.cycle_dim();
    std::vector<ParameterMonomial> basis = learnable_basis(graph);
    report["basis_size"] = basis.size();
    json basis_json = json::array();
    for (const ParameterMonomial& mono : basis) {
        json mj = json::array();
        for (const auto& [edge, exp] : mono) {
            mj.push_back(json{{"label", graph.edges[edge].label}, {"exp", exp}});
        }
        basis_json.push_back(mj);
    }
    report["basis"] = basis_json;

    json verdicts = json::array();
    for (const json& qj : config.value("queries", json::array())) {
        ParameterMonomial mono;
        for (const json& factor : qj) {
            std::string label = factor.at("label").get<std::string>();
            auto it = by_label.find(label);
            if (it == by_label.end()) {
                throw std::invalid_argument("unknown edge label '" + label + "'");
            }
            mono[it->second] += factor.value("exp", 1);
        }
        verdicts.push_back(json{{"monomial", qj}, {"learnable", is_learnable(graph, mono)}});
    }
    report["queries"] = verdicts;

    write_text_file(join(ctx, "ptg_report.json"), report.dump(2) + "\n");
    write_text_file(join(ctx, "ptg.dot"), ptg_to_dot(graph));
    return 0;
}

int cmd_lscb(const json& config, const RunContext& ctx) {
    uint64_t seed = require_seed(config, ctx);
    std::vector<MCMLayerSpec> layers;
    for (const json& lj : config.at("layers")) layers.push_back(layer_from_json(lj));
    PTG graph = build_ptg(layers);
    std::map<std::string, size_t> by_label;
    for (size_t i = 0; i < graph.edges.size(); i++) by_label[graph.edges[i].label] = i;

    std::vector<size_t> cycle;
    for (const json& label : config.at("cycle")) {
        auto it = by_label.find(label.get<std::string>());
        if (it == by_label.end()) {
            throw std::invalid_argument("unknown edge label '" + label.get<std::string>() + "'");
        }
        cycle.push_back(it->second);
    }

    std::vector<RawInstrumentModel> models;
    for (const json& mj : config.at("models")) models.push_back(model_from_json(mj));

    LscbOptions opt;
    if (config.contains("germ_reps")) {
        opt.germ_reps = config.at("germ_reps").get<std::vector<uint32_t>>();
    }
    opt.circuits_per_depth = config.value("circuits_per_depth", 30u);
    opt.shots = config.value("shots", 1000u);
    opt.delta = config.value("delta", 0.05);

    LscbResult result = run_lscb(graph, cycle, models, opt, seed);
    std::vector<LambdaTildeTable> tables;
    for (const RawInstrumentModel& m : models) tables.push_back(lambda_tilde_table(usi_from_raw(m)));
    DecayPrediction predicted = predict_lscb_decay(graph, cycle, tables, opt.delta);

    json out;
    out["seed"] = seed;
    out["cycle"] = config.at("cycle");
    out["r_hat"] = result.est.r_hat;
    out["stderr"] = result.est.stderr_r;
    out["A_hat"] = result.est.A_hat;
    out["reliable"] = result.est.reliable;
    out["predicted_r"] = predicted.r;
    out["germ_reps"] = opt.germ_reps;
    out["f_means"] = result.depth_means;
    out["f_sems"] = result.depth_sems;
    write_text_file(join(ctx, "lscb_results.json"), out.dump(2) + "\n");
    return 0;
}

int cmd_report(const json& config, const RunContext& ctx) {
    json rj = load_json_file(resolve_input(ctx, config.at("results_file")));
    MCMCBResult result = result_from_json(rj);
    std::ostringstream out;
    out << "MCM-CB result summary\n";
    out << "  layer: n=" << result.layer.n << " m=" << result.layer.m() << "\n";
    out << "  seed: " << result.seed << "\n";
    out << "  F_hat = " << result.F_hat << "  sigma = " << result.sigma << "  95% CI = ["
        << result.ci_lo << ", " << result.ci_hi << "]\n";
    out << "  triplets: " << result.triplets.size() << " (unreliable draws: "
        << result.num_unreliable << ")\n";
    if (config.contains("subsystems")) {
        out << "  marginal subsystem infidelities:\n";
        for (const json& sub : config.at("subsystems")) {
            std::vector<uint32_t> qubits = sub.get<std::vector<uint32_t>>();
            double inf = marginal_subsystem_infidelity(result, qubits);
            out << "    {";
            for (size_t i = 0; i < qubits.size(); i++) {
                out << (i ? "," : "") << qubits[i];
            }
            out << "}: " << inf << "\n";
        }
    }
    if (config.value("error_rates", false)) {
        EigenvalueEstimates eigs = extract_eigenvalues_m1(result);
        PauliErrorRates rates = extract_pauli_error_rates(eigs);
        out << "  largest Pauli error rates (no-flip class):\n";
        std::vector<std::pair<double, PauliOp>> sorted;
        for (const auto& [p, v] : rates.no_flip) {
            if (!p.is_identity()) sorted.push_back({v, p});
        }
        std::sort(sorted.begin(), sorted.end(),
                  [](const auto& a, const auto& b) { return a.first > b.first; });
        for (size_t i = 0; i < std::min<size_t>(10, sorted.size()); i++) {
            out << "    " << sorted[i].second.str() << ": " << sorted[i].first << "\n";
        }
    }
    write_text_file(join(ctx, "report.txt"), out.str());
    std::cout << out.str();
    return 0;
}

int dispatch(const std::string& command, const std::string& config_path, const RunContext& ctx_in) {
    RunContext ctx = ctx_in;
    ctx.config_dir = fs::path(config_path).parent_path().string();
    if (ctx.config_dir.empty()) ctx.config_dir = ".";
    json config = load_json_file(config_path);
    if (command == "simulate") return cmd_simulate(config, ctx);
    if (command == "mcmcb") return cmd_mcmcb(config, ctx);
    if (command == "sweep") return cmd_sweep(config, ctx);
    if (command == "ptg") return cmd_ptg(config, ctx);
    if (command == "lscb") return cmd_lscb(config, ctx);
    if (command == "report") return cmd_report(config, ctx);
    throw std::invalid_argument("unknown command '" + command + "'");
}

}  // namespace mcmlab::cli
