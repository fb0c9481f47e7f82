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

#include "mcmlab/json_io.hpp"

#include <fstream>
#include <sstream>

namespace mcmlab {

namespace {

std::string bits_str(uint64_t bits, uint32_t width) {
    std::string s(width, '0');
    for (uint32_t i = 0; i < width; i++) {
        if ((bits >> i) & 1) s[i] = '1';
    }
    return s;
}

uint64_t bits_from_str(const std::string& s) {
    uint64_t bits = 0;
    for (size_t i = 0; i < s.size(); i++) {
        if (s[i] == '1') {
            bits |= 1ULL << i;
        } else if (s[i] != '0') {
            throw std::invalid_argument("bad bit string '" + s + "'");
        }
    }
    return bits;
}

json gates_to_json(const std::vector<GateApp>& gates) {
    json arr = json::array();
    for (const GateApp& g : gates) {
        json item = json::array();
        item.push_back(gate_name(g.gate));
        item.push_back(g.q0);
        if (is_two_qubit(g.gate)) item.push_back(g.q1);
        arr.push_back(item);
    }
    return arr;
}

std::vector<GateApp> gates_from_json(const json& arr) {
    std::vector<GateApp> gates;
    for (const json& item : arr) {
        Gate g = gate_from_name(item.at(0).get<std::string>());
        uint32_t q0 = item.at(1).get<uint32_t>();
        uint32_t q1 = is_two_qubit(g) ? item.at(2).get<uint32_t>() : q0;
        gates.emplace_back(g, q0, q1);
    }
    return gates;
}

}  // namespace

json prob_table_to_json(const ProbTable<PauliOp>& table) {
    json j = json::object();
    for (const auto& [p, v] : table.entries) {
        j[p.n == 0 ? "" : p.str()] = v;
    }
    return j;
}

ProbTable<PauliOp> prob_table_from_json(const json& j, uint32_t n) {
    ProbTable<PauliOp> table;
    for (auto it = j.begin(); it != j.end(); ++it) {
        PauliOp p = it.key().empty() ? PauliOp::identity(0) : PauliOp::from_str(it.key());
        if (p.n != n) throw std::invalid_argument("Pauli key '" + it.key() + "' has wrong length");
        table.entries[p] = it.value().get<double>();
    }
    return table;
}

json layer_to_json(const MCMLayerSpec& layer) {
    json j;
    j["n"] = layer.n;
    j["measured"] = layer.measured;
    j["v_gates"] = gates_to_json(layer.v_gates);
    return j;
}

MCMLayerSpec layer_from_json(const json& j) {
    MCMLayerSpec layer;
    layer.n = j.at("n").get<uint32_t>();
    layer.measured = j.value("measured", std::vector<uint32_t>{});
    if (j.contains("v_gates")) layer.v_gates = gates_from_json(j.at("v_gates"));
    layer.validate();
    return layer;
}

json model_to_json(const RawInstrumentModel& model) {
    json j;
    j["n"] = model.layer.n;
    j["m"] = model.layer.m();
    j["measured"] = model.layer.measured;
    j["v_gates"] = gates_to_json(model.layer.v_gates);
    j["e_pre"] = prob_table_to_json(model.e_pre);
    j["t_mid"] = prob_table_to_json(model.t_mid);
    j["e_post"] = prob_table_to_json(model.e_post);
    json conds = json::array();
    for (const CondError& c : model.conditioned) {
        json cj;
        cj["mask"] = bits_str(c.mask, model.layer.m());
        cj["value"] = bits_str(c.value, model.layer.m());
        cj["table"] = prob_table_to_json(c.table);
        conds.push_back(cj);
    }
    j["conditioned"] = conds;
    json spam;
    spam["prep"] = model.spam.prep;
    spam["meas"] = model.spam.meas;
    j["spam"] = spam;
    return j;
}

RawInstrumentModel model_from_json(const json& j) {
    RawInstrumentModel model;
    model.layer.n = j.at("n").get<uint32_t>();
    model.layer.measured = j.value("measured", std::vector<uint32_t>{});
    if (j.contains("v_gates")) model.layer.v_gates = gates_from_json(j.at("v_gates"));
    uint32_t nm = model.layer.num_unmeasured();
    model.e_pre = prob_table_from_json(j.at("e_pre"), model.layer.n);
    model.t_mid = prob_table_from_json(j.at("t_mid"), nm);
    model.e_post = prob_table_from_json(j.at("e_post"), model.layer.n);
    if (j.contains("conditioned")) {
        for (const json& cj : j.at("conditioned")) {
            CondError c;
            c.mask = bits_from_str(cj.at("mask").get<std::string>());
            c.value = bits_from_str(cj.at("value").get<std::string>());
            c.table = prob_table_from_json(cj.at("table"), model.layer.n);
            model.conditioned.push_back(std::move(c));
        }
    }
    if (j.contains("spam")) {
        model.spam.prep = j.at("spam").value("prep", std::vector<double>{});
        model.spam.meas = j.at("spam").value("meas", std::vector<double>{});
    }
    model.validate();
    return model;
}

json circuit_to_json(const CircuitIR& circuit) {
    json j;
    j["n"] = circuit.n;
    j["uid"] = circuit.uid;
    json ops = json::array();
    for (const auto& op : circuit.ops) {
        json oj;
        if (const auto* prep = std::get_if<PrepInst>(&op)) {
            oj["type"] = "prep";
            json basis = json::array();
            for (PrepBasis b : prep->basis) basis.push_back(prep_basis_name(b));
            oj["basis"] = basis;
        } else if (const auto* layer = std::get_if<GateLayerInst>(&op)) {
            oj["type"] = "gates";
            oj["gates"] = gates_to_json(layer->gates);
        } else if (const auto* noise = std::get_if<PauliNoiseInst>(&op)) {
            oj["type"] = "pauli_noise";
            oj["table"] = noise->table;
        } else if (const auto* flips = std::get_if<XFlipInst>(&op)) {
            oj["type"] = "x_flip";
            oj["probs"] = flips->probs;
        } else if (const auto* mcm = std::get_if<McmInst>(&op)) {
            oj["type"] = "mcm";
            oj["qubits"] = mcm->qubits;
            oj["record"] = mcm->record;
            oj["flip_mask"] = bits_str(mcm->flip_mask, static_cast<uint32_t>(mcm->qubits.size()));
        } else if (const auto* cond = std::get_if<CondPauliInst>(&op)) {
            oj["type"] = "cond_pauli";
            oj["record"] = cond->record;
            oj["mask"] = bits_str(cond->mask, 64);
            oj["value"] = bits_str(cond->value, 64);
            oj["table"] = cond->table;
        } else if (const auto* fin = std::get_if<FinalMeasureInst>(&op)) {
            oj["type"] = "final";
            oj["record"] = fin->record;
            oj["readout_flip"] = fin->readout_flip;
        }
        ops.push_back(oj);
    }
    j["ops"] = ops;
    json tables = json::array();
    for (const SampledTable& t : circuit.tables) tables.push_back(prob_table_to_json(t.source));
    j["tables"] = tables;
    return j;
}

CircuitIR circuit_from_json(const json& j) {
    CircuitIR circuit;
    circuit.n = j.at("n").get<uint32_t>();
    circuit.uid = j.value("uid", 0ULL);
    for (const json& tj : j.value("tables", json::array())) {
        circuit.tables.push_back(SampledTable::build(prob_table_from_json(tj, circuit.n),
                                                     circuit.n));
    }
    for (const json& oj : j.at("ops")) {
        std::string type = oj.at("type").get<std::string>();
        if (type == "prep") {
            PrepInst prep;
            for (const json& b : oj.at("basis")) {
                prep.basis.push_back(prep_basis_from_name(b.get<std::string>()));
            }
            circuit.ops.push_back(std::move(prep));
        } else if (type == "gates") {
            circuit.ops.push_back(GateLayerInst{gates_from_json(oj.at("gates"))});
        } else if (type == "pauli_noise") {
            circuit.ops.push_back(PauliNoiseInst{oj.at("table").get<uint32_t>()});
        } else if (type == "x_flip") {
            circuit.ops.push_back(XFlipInst{oj.at("probs").get<std::vector<double>>()});
        } else if (type == "mcm") {
            McmInst mcm;
            mcm.qubits = oj.at("qubits").get<std::vector<uint32_t>>();
            mcm.record = oj.at("record").get<uint32_t>();
            mcm.flip_mask = bits_from_str(oj.value("flip_mask", std::string()));
            circuit.ops.push_back(std::move(mcm));
        } else if (type == "cond_pauli") {
            CondPauliInst cond;
            cond.record = oj.at("record").get<uint32_t>();
            cond.mask = bits_from_str(oj.at("mask").get<std::string>());
            cond.value = bits_from_str(oj.at("value").get<std::string>());
            cond.table = oj.at("table").get<uint32_t>();
            circuit.ops.push_back(cond);
        } else if (type == "final") {
            FinalMeasureInst fin;
            fin.record = oj.at("record").get<uint32_t>();
            fin.readout_flip = oj.value("readout_flip", std::vector<double>{});
            circuit.ops.push_back(std::move(fin));
        } else {
            throw std::invalid_argument("unknown instruction type '" + type + "'");
        }
    }
    circuit.validate();
    return circuit;
}

std::string shot_to_jsonl(const ShotRecord& shot, uint32_t n, uint32_t m) {
    json j;
    json mcm = json::array();
    for (uint64_t w : shot.mcm_bits) mcm.push_back(bits_str(w, m));
    j["mcm"] = mcm;
    j["final"] = bits_str(shot.final_bits, n);
    j["seed"] = shot.shot_index;
    return j.dump();
}

json result_to_json(const MCMCBResult& result) {
    json j;
    j["seed"] = result.seed;
    j["layer"] = layer_to_json(result.layer);
    j["mode"] = result.mode == SamplingMode::UniformK ? "uniform" : "exhaustive";
    j["K"] = result.K;
    j["depths"] = result.depths;
    j["circuits_per_depth"] = result.circuits_per_depth;
    j["shots"] = result.shots;
    j["delta"] = result.delta;
    j["F_hat"] = result.F_hat;
    j["sigma"] = result.sigma;
    j["ci"] = json::array({result.ci_lo, result.ci_hi});
    j["num_unreliable"] = result.num_unreliable;
    uint32_t m = result.layer.m();
    uint32_t nm = result.layer.num_unmeasured();
    json triplets = json::array();
    for (const TripletResult& t : result.triplets) {
        json tj;
        tj["P"] = nm == 0 ? "" : t.p.str();
        tj["c1"] = bits_str(t.c1, m);
        tj["c2"] = bits_str(t.c2, m);
        tj["multiplicity"] = t.multiplicity;
        tj["r_hat"] = t.est.r_hat;
        tj["A_hat"] = t.est.A_hat;
        tj["stderr"] = t.est.stderr_r;
        tj["reliable"] = t.est.reliable;
        tj["f_means"] = t.depth_means;
        tj["f_sems"] = t.depth_sems;
        triplets.push_back(tj);
    }
    j["triplets"] = triplets;
    return j;
}

MCMCBResult result_from_json(const json& j) {
    MCMCBResult result;
    result.seed = j.at("seed").get<uint64_t>();
    result.layer = layer_from_json(j.at("layer"));
    result.mode = j.at("mode").get<std::string>() == "uniform" ? SamplingMode::UniformK
                                                               : SamplingMode::Exhaustive;
    result.K = j.value("K", 0u);
    result.depths = j.at("depths").get<std::vector<uint32_t>>();
    result.circuits_per_depth = j.value("circuits_per_depth", 0u);
    result.shots = j.value("shots", 0u);
    result.delta = j.value("delta", 0.05);
    result.F_hat = j.at("F_hat").get<double>();
    result.sigma = j.value("sigma", 0.0);
    if (j.contains("ci")) {
        result.ci_lo = j.at("ci").at(0).get<double>();
        result.ci_hi = j.at("ci").at(1).get<double>();
    }
    result.num_unreliable = j.value("num_unreliable", 0u);
    uint32_t nm = result.layer.num_unmeasured();
    for (const json& tj : j.at("triplets")) {
        TripletResult t;
        std::string p = tj.at("P").get<std::string>();
        t.p = p.empty() ? PauliOp::identity(0) : PauliOp::from_str(p);
        if (t.p.n != nm) throw std::invalid_argument("triplet P has wrong length");
        t.c1 = bits_from_str(tj.at("c1").get<std::string>());
        t.c2 = bits_from_str(tj.at("c2").get<std::string>());
        t.multiplicity = tj.value("multiplicity", 1u);
        t.est.r_hat = tj.at("r_hat").get<double>();
        t.est.A_hat = tj.value("A_hat", 0.0);
        t.est.stderr_r = tj.value("stderr", 0.0);
        t.est.reliable = tj.value("reliable", true);
        t.depth_means = tj.value("f_means", std::vector<double>{});
        t.depth_sems = tj.value("f_sems", std::vector<double>{});
        result.triplets.push_back(std::move(t));
    }
    return result;
}

json sampler_spec_to_json(const SamplerSpec& spec) {
    json j;
    switch (spec.recipe) {
        case SamplerRecipe::Sparse: j["recipe"] = "sparse"; break;
        case SamplerRecipe::DepolCrosstalk: j["recipe"] = "depol_crosstalk"; break;
        case SamplerRecipe::SuiteSparse: j["recipe"] = "suite_sparse"; break;
        case SamplerRecipe::SuiteDepolMcmCrosstalk: j["recipe"] = "suite_depol_mcm"; break;
        case SamplerRecipe::SuiteDepolPreCrosstalk: j["recipe"] = "suite_depol_pre"; break;
    }
    j["p"] = spec.p;
    j["num_terms"] = spec.num_terms;
    j["prep_flip_mean"] = spec.prep_flip_mean;
    j["meas_flip_mean"] = spec.meas_flip_mean;
    return j;
}

SamplerSpec sampler_spec_from_json(const json& j) {
    SamplerSpec spec;
    std::string recipe = j.value("recipe", "sparse");
    if (recipe == "sparse") {
        spec.recipe = SamplerRecipe::Sparse;
    } else if (recipe == "depol_crosstalk") {
        spec.recipe = SamplerRecipe::DepolCrosstalk;
    } else if (recipe == "suite_sparse") {
        spec.recipe = SamplerRecipe::SuiteSparse;
    } else if (recipe == "suite_depol_mcm") {
        spec.recipe = SamplerRecipe::SuiteDepolMcmCrosstalk;
    } else if (recipe == "suite_depol_pre") {
        spec.recipe = SamplerRecipe::SuiteDepolPreCrosstalk;
    } else {
        throw std::invalid_argument("unknown sampler recipe '" + recipe + "'");
    }
    spec.p = j.value("p", 0.01);
    spec.num_terms = j.value("num_terms", 0u);
    spec.prep_flip_mean = j.value("prep_flip_mean", 0.0);
    spec.meas_flip_mean = j.value("meas_flip_mean", 0.0);
    return spec;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

json load_json_file(const std::string& path) {
    return json::parse(read_text_file(path));
}

}  // namespace mcmlab
