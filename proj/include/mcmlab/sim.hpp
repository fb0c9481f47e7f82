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

#include <functional>

#include "mcmlab/circuit.hpp"
#include "mcmlab/tableau.hpp"

namespace mcmlab {

/// Runs one shot. The tableau is reset by the circuit's prep instruction;
/// rng must be the shot's own stream.
ShotRecord run_one_shot(const CircuitIR& circuit, TableauSim& tableau, Philox& rng,
                        uint32_t shot_index = 0);

/// Runs `shots` independent shots. Each shot uses the stream
/// (seed, circuit.uid, shot index), so any subset can be reproduced.
std::vector<ShotRecord> run_shots(const CircuitIR& circuit, uint32_t shots, uint64_t seed);

/// Streaming variant; avoids materializing every record.
void run_shots_visit(const CircuitIR& circuit, uint32_t shots, uint64_t seed,
                     const std::function<void(const ShotRecord&)>& visit);

}  // namespace mcmlab
