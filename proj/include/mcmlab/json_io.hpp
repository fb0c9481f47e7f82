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

#pragma once

#include <string>

#include "json.hpp"
#include "mcmlab/mcmcb.hpp"
#include "mcmlab/noise_model.hpp"
#include "mcmlab/ptg.hpp"

namespace mcmlab {

using nlohmann::json;

json prob_table_to_json(const ProbTable<PauliOp>& table);
ProbTable<PauliOp> prob_table_from_json(const json& j, uint32_t n);

json layer_to_json(const MCMLayerSpec& layer);
MCMLayerSpec layer_from_json(const json& j);

json model_to_json(const RawInstrumentModel& model);
RawInstrumentModel model_from_json(const json& j);

json circuit_to_json(const CircuitIR& circuit);
CircuitIR circuit_from_json(const json& j);

/// One JSONL line per shot: {"mcm": [...], "final": "...", "seed": ...}.
std::string shot_to_jsonl(const ShotRecord& shot, uint32_t n, uint32_t m);

json result_to_json(const MCMCBResult& result);
/// Rebuilds the analysis-facing part of a result (triplets, estimates,
/// fidelity); per-circuit data is not round-tripped.
MCMCBResult result_from_json(const json& j);

json sampler_spec_to_json(const SamplerSpec& spec);
SamplerSpec sampler_spec_from_json(const json& j);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
json load_json_file(const std::string& path);

}  // namespace mcmlab
