// JSON (de)serialization of run configurations shared by the C API and CLI.
#pragma once

#include <nlohmann/json.hpp>

#include "core/entropy_lab.hpp"

namespace doflab {

// {M,N1,N2,beta1,beta2,P,delta,epsilon,f_max,seed}; P is optional and only
// recorded (sweeps carry their own power list).
BcConfig bc_config_from_json(const nlohmann::json& j);
nlohmann::ordered_json bc_config_to_json(const BcConfig& cfg);

// Suite-level keys: P_sweep, draws, tau, budget_bits, labels (all optional).
LabConfig lab_config_from_json(const nlohmann::json& j, uint64_t seed, int threads);

Lemma3Config lemma3_from_json(const nlohmann::json& j);

}  // namespace doflab
