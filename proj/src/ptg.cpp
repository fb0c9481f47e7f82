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

#include "mcmlab/ptg.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <sstream>

namespace mcmlab {

namespace {

std::string support_str(uint64_t bits, uint32_t n) {
    std::string s(n, '0');
    for (uint32_t i = 0; i < n; i++) {
        if ((bits >> i) & 1) s[i] = '1';
    }
    return s;
}

struct UnionFind {
    std::vector<size_t> parent;
    explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    size_t find(size_t v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    }
    bool unite(size_t a, size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[a] = b;
        return true;
    }
};

}  // namespace

size_t PTG::vertex_index(uint64_t support) const {
    auto it = std::lower_bound(vertices.begin(), vertices.end(), support);
    if (it == vertices.end() || *it != support) throw std::invalid_argument("unknown PTG vertex");
    return static_cast<size_t>(it - vertices.begin());
}

uint32_t PTG::num_components() const {
    UnionFind uf(vertices.size());
    for (const PtgEdge& e : edges) {
        uf.unite(vertex_index(e.tail), vertex_index(e.head));
    }
    std::vector<bool> seen(vertices.size(), false);
    uint32_t count = 0;
    for (size_t v = 0; v < vertices.size(); v++) {
        size_t root = uf.find(v);
        if (!seen[root]) {
            seen[root] = true;
            count++;
        }
    }
    return count;
}

size_t PTG::cycle_dim() const {
    return edges.size() - vertices.size() + num_components();
}

PTG build_ptg(const std::vector<MCMLayerSpec>& layers) {
    if (layers.empty()) throw std::invalid_argument("empty layer set");
    PTG graph;
    graph.n = layers[0].n;
    graph.layers = layers;
    for (uint32_t li = 0; li < layers.size(); li++) {
        const MCMLayerSpec& layer = layers[li];
        layer.validate();
        if (layer.n != graph.n) throw std::invalid_argument("layer sets must share n");
        uint32_t nm = layer.num_unmeasured();
        uint32_t m = layer.m();
        if (m == 0) {
            // One eigenvalue edge per n-qubit Pauli.
            for (uint64_t qi = 0; qi < (1ULL << (2 * graph.n)); qi++) {
                PtgEdge e;
                e.layer_index = li;
                e.is_mcm = false;
                e.pre = pauli_from_index(qi, graph.n);
                PauliOp local;
                layer.split(e.pre, &local, nullptr);
                e.post = layer.embed(layer.conjugate_by_v(local), 0);
                e.p_local = local;
                e.tail = e.pre.support();
                e.head = e.post.support();
                e.label = "L" + std::to_string(li) + "[" + e.pre.str() + "]";
                graph.edges.push_back(std::move(e));
            }
        } else {
            for (uint64_t pi = 0; pi < (1ULL << (2 * nm)); pi++) {
                PauliOp p = pauli_from_index(pi, nm);
                PauliOp vp = layer.conjugate_by_v(p);
                for (uint64_t c1 = 0; c1 < (1ULL << m); c1++) {
                    for (uint64_t c2 = 0; c2 < (1ULL << m); c2++) {
                        PtgEdge e;
                        e.layer_index = li;
                        e.is_mcm = true;
                        e.pre = layer.embed(p, c1);
                        e.post = layer.embed(vp, c2);
                        e.p_local = p;
                        e.c1 = c1;
                        e.c2 = c2;
                        e.t_mask = c1 ^ c2;
                        e.tail = e.pre.support();
                        e.head = e.post.support();
                        std::ostringstream label;
                        label << "L" << li << "[" << (nm ? p.str() : "-") << ",("
                              << ZMask(c1, m).str() << "," << ZMask(c2, m).str() << ")]";
                        e.label = label.str();
                        graph.edges.push_back(std::move(e));
                    }
                }
            }
        }
    }
    std::vector<uint64_t> verts;
    for (const PtgEdge& e : graph.edges) {
        verts.push_back(e.tail);
        verts.push_back(e.head);
    }
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    graph.vertices = std::move(verts);
    return graph;
}

bool is_learnable(const PTG& graph, const ParameterMonomial& monomial) {
    std::vector<int64_t> net(graph.vertices.size(), 0);
    for (const auto& [edge_id, exponent] : monomial) {
        if (edge_id >= graph.edges.size()) throw std::invalid_argument("unknown edge in monomial");
        const PtgEdge& e = graph.edges[edge_id];
        net[graph.vertex_index(e.head)] += exponent;
        net[graph.vertex_index(e.tail)] -= exponent;
    }
    return std::all_of(net.begin(), net.end(), [](int64_t v) { return v == 0; });
}

std::vector<ParameterMonomial> learnable_basis(const PTG& graph) {
    size_t nv = graph.vertices.size();
    UnionFind uf(nv);
    // adjacency over tree edges: vertex -> (neighbor, edge id, forward?)
    std::vector<std::vector<std::tuple<size_t, size_t, bool>>> tree(nv);
    std::vector<size_t> extra;  // non-tree edges, self-loops included

    for (size_t ei = 0; ei < graph.edges.size(); ei++) {
        const PtgEdge& e = graph.edges[ei];
        size_t t = graph.vertex_index(e.tail);
        size_t h = graph.vertex_index(e.head);
        if (t != h && uf.unite(t, h)) {
            tree[t].emplace_back(h, ei, true);
            tree[h].emplace_back(t, ei, false);
        } else {
            extra.push_back(ei);
        }
    }

    std::vector<ParameterMonomial> basis;
    for (size_t ei : extra) {
        const PtgEdge& e = graph.edges[ei];
        ParameterMonomial mono;
        mono[ei] += 1;
        size_t start = graph.vertex_index(e.head);
        size_t goal = graph.vertex_index(e.tail);
        if (start != goal) {
            // BFS the tree path head -> tail, orienting each tree edge as
            // traversed.
            std::vector<int> prev_vertex(nv, -1);
            std::vector<size_t> prev_edge(nv, SIZE_MAX);
            std::vector<bool> prev_forward(nv, false);
            std::deque<size_t> queue{start};
            std::vector<bool> seen(nv, false);
            seen[start] = true;
            while (!queue.empty()) {
                size_t v = queue.front();
                queue.pop_front();
                if (v == goal) break;
                for (const auto& [next, edge_id, forward] : tree[v]) {
                    if (seen[next]) continue;
                    seen[next] = true;
                    prev_vertex[next] = static_cast<int>(v);
                    prev_edge[next] = edge_id;
                    prev_forward[next] = forward;
                    queue.push_back(next);
                }
            }
            if (!seen[goal]) throw std::logic_error("non-tree edge spans components");
            for (size_t v = goal; v != start; v = static_cast<size_t>(prev_vertex[v])) {
                mono[prev_edge[v]] += prev_forward[v] ? 1 : -1;
            }
        }
        basis.push_back(std::move(mono));
    }
    return basis;
}

std::string ptg_to_dot(const PTG& graph) {
    std::ostringstream out;
    out << "digraph ptg {\n";
    for (uint64_t v : graph.vertices) {
        out << "  \"" << support_str(v, graph.n) << "\";\n";
    }
    for (const PtgEdge& e : graph.edges) {
        out << "  \"" << support_str(e.tail, graph.n) << "\" -> \""
            << support_str(e.head, graph.n) << "\" [label=\"" << e.label << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

namespace {

// Minimal single-qubit Clifford mapping one Pauli letter to another,
// in circuit order.
std::vector<Gate> connector_gates(char from, char to) {
    if (from == to) return {};
    if (from == 'I' || to == 'I') throw std::invalid_argument("connector: support mismatch");
    if (from == 'X' && to == 'Y') return {Gate::S};
    if (from == 'X' && to == 'Z') return {Gate::H};
    if (from == 'Y' && to == 'X') return {Gate::SDG};
    if (from == 'Y' && to == 'Z') return {Gate::SDG, Gate::H};
    if (from == 'Z' && to == 'X') return {Gate::H};
    if (from == 'Z' && to == 'Y') return {Gate::H, Gate::S};
    throw std::invalid_argument("connector: bad letters");
}

std::vector<GateApp> connector_layer(const PauliOp& from, const PauliOp& to) {
    if (from.n != to.n) throw std::invalid_argument("connector: dimension mismatch");
    if (from.support() != to.support()) {
        throw std::invalid_argument("invalid cycle: consecutive supports differ");
    }
    std::vector<GateApp> gates;
    for (uint32_t q = 0; q < from.n; q++) {
        for (Gate g : connector_gates(from.letter(q), to.letter(q))) {
            gates.emplace_back(g, q);
        }
    }
    return gates;
}

// Final rotation of an n-qubit Pauli onto Z-type, same rule as the MCM-CB
// final layer but over every qubit in the support.
std::vector<GateApp> z_rotation_layer(const PauliOp& p, uint64_t* t_f) {
    std::vector<GateApp> gates;
    *t_f = p.support();
    for (uint32_t q = 0; q < p.n; q++) {
        switch (p.letter(q)) {
            case 'I':
            case 'Z':
                break;
            case 'X':
                gates.emplace_back(Gate::H, q);
                break;
            case 'Y':
                gates.emplace_back(Gate::SDG, q);
                gates.emplace_back(Gate::H, q);
                break;
        }
    }
    return gates;
}

std::vector<PrepBasis> eigenstate_prep(const PauliOp& p, Philox& rng, int* sign) {
    std::vector<PrepBasis> basis(p.n, PrepBasis::ZPlus);
    *sign = 1;
    for (uint32_t q = 0; q < p.n; q++) {
        bool minus = rng.below(2) == 1;
        char letter = p.letter(q);
        switch (letter) {
            case 'I':
                basis[q] = minus ? PrepBasis::ZMinus : PrepBasis::ZPlus;
                break;
            case 'X':
                basis[q] = minus ? PrepBasis::XMinus : PrepBasis::XPlus;
                break;
            case 'Y':
                basis[q] = minus ? PrepBasis::YMinus : PrepBasis::YPlus;
                break;
            case 'Z':
                basis[q] = minus ? PrepBasis::ZMinus : PrepBasis::ZPlus;
                break;
        }
        if (letter != 'I' && minus) *sign = -*sign;
    }
    return basis;
}

}  // namespace

LscbSet build_lscb_circuits(const PTG& graph, const std::vector<size_t>& cycle,
                            const std::vector<RawInstrumentModel>* models,
                            const std::vector<uint32_t>& germ_reps, uint32_t circuits_per_depth,
                            uint64_t seed, uint64_t uid_base) {
    if (cycle.empty()) throw std::invalid_argument("empty cycle");
    if (models && models->size() != graph.layers.size()) {
        throw std::invalid_argument("need one model per layer");
    }
    size_t k = cycle.size();
    for (size_t j = 0; j < k; j++) {
        const PtgEdge& cur = graph.edges.at(cycle[j]);
        const PtgEdge& nxt = graph.edges.at(cycle[(j + 1) % k]);
        if (cur.head != nxt.tail) {
            throw std::invalid_argument("invalid cycle: edge " + std::to_string(j) +
                                        " head does not meet the next tail");
        }
    }

    LscbSet set;
    set.cycle = cycle;
    set.germ_reps = germ_reps;
    set.per_depth = circuits_per_depth;

    const PauliOp& start = graph.edges[cycle[0]].pre;

    // Connectors between consecutive edges (wrapping back to the start).
    std::vector<std::vector<GateApp>> connectors(k);
    for (size_t j = 0; j < k; j++) {
        const PtgEdge& cur = graph.edges[cycle[j]];
        const PtgEdge& nxt = graph.edges[cycle[(j + 1) % k]];
        connectors[j] = connector_layer(cur.post, nxt.pre);
    }
    std::vector<GateApp> final_gates = z_rotation_layer(start, &set.t_f);

    // Shared noise tables per layer: [e_pre, t_mid, e_post, cond...].
    std::vector<SampledTable> tables;
    std::vector<std::array<uint32_t, 3>> layer_table_base(graph.layers.size());
    std::vector<uint32_t> cond_base(graph.layers.size());
    if (models) {
        for (size_t li = 0; li < graph.layers.size(); li++) {
            const RawInstrumentModel& mod = (*models)[li];
            if (mod.layer.n != graph.n || mod.layer.measured != graph.layers[li].measured) {
                throw std::invalid_argument("model layer mismatch at index " + std::to_string(li));
            }
            layer_table_base[li][0] = static_cast<uint32_t>(tables.size());
            tables.push_back(SampledTable::build(mod.e_pre, graph.n));
            ProbTable<PauliOp> mid;
            for (const auto& [q, v] : mod.t_mid.entries) {
                mid.entries[mod.layer.embed(q, 0)] = v;
            }
            layer_table_base[li][1] = static_cast<uint32_t>(tables.size());
            tables.push_back(SampledTable::build(mid, graph.n));
            layer_table_base[li][2] = static_cast<uint32_t>(tables.size());
            tables.push_back(SampledTable::build(mod.e_post, graph.n));
            cond_base[li] = static_cast<uint32_t>(tables.size());
            for (const CondError& c : mod.conditioned) {
                tables.push_back(SampledTable::build(c.table, graph.n));
            }
        }
    }

    for (uint32_t di = 0; di < germ_reps.size(); di++) {
        for (uint32_t cj = 0; cj < circuits_per_depth; cj++) {
            uint64_t uid = uid_base + di * circuits_per_depth + cj;
            Philox gen(seed, uid, kBuildPosition);

            LscbCircuit sub;
            sub.germ_reps = germ_reps[di];
            sub.ideal.n = sub.noisy.n = graph.n;
            sub.ideal.uid = sub.noisy.uid = uid;
            sub.noisy.tables = tables;

            int prep_sign = 1;
            std::vector<PrepBasis> basis = eigenstate_prep(start, gen, &prep_sign);
            sub.ideal.ops.push_back(PrepInst{basis});
            sub.noisy.ops.push_back(PrepInst{basis});

            uint32_t record = 0;
            std::vector<uint64_t> masks;
            for (uint32_t rep = 0; rep < germ_reps[di]; rep++) {
                for (size_t j = 0; j < k; j++) {
                    const PtgEdge& edge = graph.edges[cycle[j]];
                    const MCMLayerSpec& layer = graph.layers[edge.layer_index];
                    CompiledLayer rc = compile_rc_layer(layer, gen);
                    GateLayerInst pre{rc.pre_gates()};
                    GateLayerInst post{rc.post_gates()};
                    GateLayerInst vlayer{layer.v_gates};
                    for (CircuitIR* c : {&sub.ideal, &sub.noisy}) {
                        bool with_noise = c == &sub.noisy && models;
                        if (!pre.gates.empty()) c->ops.push_back(pre);
                        if (with_noise) {
                            c->ops.push_back(PauliNoiseInst{layer_table_base[edge.layer_index][0]});
                        }
                        if (!vlayer.gates.empty()) c->ops.push_back(vlayer);
                        if (!layer.measured.empty()) {
                            McmInst mcm;
                            mcm.qubits = layer.measured;
                            mcm.record = record;
                            mcm.flip_mask = rc.flip_mask;
                            c->ops.push_back(mcm);
                        }
                        if (with_noise) {
                            c->ops.push_back(PauliNoiseInst{layer_table_base[edge.layer_index][1]});
                            c->ops.push_back(PauliNoiseInst{layer_table_base[edge.layer_index][2]});
                            const auto& conds = (*models)[edge.layer_index].conditioned;
                            for (uint32_t ci = 0; ci < conds.size(); ci++) {
                                c->ops.push_back(CondPauliInst{record, conds[ci].mask,
                                                               conds[ci].value,
                                                               cond_base[edge.layer_index] + ci});
                            }
                        }
                        if (!post.gates.empty()) c->ops.push_back(post);
                        if (!connectors[j].empty()) c->ops.push_back(GateLayerInst{connectors[j]});
                    }
                    if (!layer.measured.empty()) {
                        masks.push_back(edge.t_mask);
                        record++;
                    }
                }
            }

            if (!final_gates.empty()) {
                sub.ideal.ops.push_back(GateLayerInst{final_gates});
                sub.noisy.ops.push_back(GateLayerInst{final_gates});
            }
            FinalMeasureInst fm;
            fm.record = record;
            sub.ideal.ops.push_back(fm);
            sub.noisy.ops.push_back(fm);

            sub.ideal = merge_adjacent_pauli_layers(sub.ideal);
            sub.noisy = merge_adjacent_pauli_layers(sub.noisy);

            if (di == 0 && cj == 0) set.mcm_masks = masks;
            TableauSim tableau(graph.n);
            Philox ideal_rng(seed, uid, kIdealPosition);
            sub.ideal_record = run_one_shot(sub.ideal, tableau, ideal_rng);
            set.circuits.push_back(std::move(sub));
        }
    }
    return set;
}

namespace {

/// f(C) for an LSCB shot: per-record masks cycle through the germ pattern.
int analyze_lscb_shot(const ShotRecord& shot, uint64_t t_f, const std::vector<uint64_t>& pattern,
                      int t0) {
    int s = t0 ^ dot2(shot.final_bits, t_f);
    if (!pattern.empty()) {
        for (size_t i = 0; i < shot.mcm_bits.size(); i++) {
            s ^= dot2(shot.mcm_bits[i], pattern[i % pattern.size()]);
        }
    }
    return s ? -1 : 1;
}

}  // namespace

DecayPrediction predict_lscb_decay(const PTG& graph, const std::vector<size_t>& cycle,
                                   const std::vector<LambdaTildeTable>& tables, double delta) {
    if (tables.size() != graph.layers.size()) {
        throw std::invalid_argument("need one lambda-tilde table per layer");
    }
    DecayPrediction out;
    double product = 1;
    for (size_t edge_id : cycle) {
        const PtgEdge& e = graph.edges.at(edge_id);
        const MCMLayerSpec& layer = graph.layers[e.layer_index];
        PauliOp post_local;
        layer.split(e.post, &post_local, nullptr);
        double factor = tables[e.layer_index].at(post_local, e.c1, e.c2);
        if (factor <= delta) out.reliable = false;
        product *= factor;
    }
    if (product <= 0) {
        out.r = 0;
        out.reliable = false;
        return out;
    }
    out.r = std::pow(product, 1.0 / static_cast<double>(cycle.size()));
    return out;
}

LscbResult run_lscb(const PTG& graph, const std::vector<size_t>& cycle,
                    const std::vector<RawInstrumentModel>& models, const LscbOptions& options,
                    uint64_t seed) {
    LscbSet set = build_lscb_circuits(graph, cycle, &models, options.germ_reps,
                                      options.circuits_per_depth, seed, 1);
    LscbResult result;
    result.cycle = cycle;
    result.seed = seed;
    size_t k = cycle.size();
    // Each mcm record in the per-rep pattern repeats every germ.
    std::vector<uint64_t> pattern = set.mcm_masks;

    for (uint32_t di = 0; di < options.germ_reps.size(); di++) {
        std::vector<double> circuit_means;
        for (uint32_t cj = 0; cj < options.circuits_per_depth; cj++) {
            const LscbCircuit& sub = set.at(di, cj);
            int t0 = analyze_lscb_shot(sub.ideal_record, set.t_f, pattern, 0) < 0 ? 1 : 0;
            int64_t sum = 0;
            run_shots_visit(sub.noisy, options.shots, seed, [&](const ShotRecord& shot) {
                sum += analyze_lscb_shot(shot, set.t_f, pattern, t0);
            });
            circuit_means.push_back(static_cast<double>(sum) / options.shots);
        }
        result.circuit_means.push_back(circuit_means);
        result.depth_means.push_back(mean_of(circuit_means));
        result.depth_sems.push_back(sem_of(circuit_means));
    }
    // Fit against layer steps so the decay is the per-layer geometric mean.
    std::vector<double> dd;
    for (uint32_t d : options.germ_reps) dd.push_back(static_cast<double>(d) * k);
    result.est = fit_decay(dd, result.depth_means, result.depth_sems, options.delta);
    return result;
}

}  // namespace mcmlab
