#pragma once

#include <string>

#include "grasplab/sac.hpp"
#include "grasplab/success_model.hpp"

namespace grasplab::learn {

// Versioned JSON checkpoints: layer dims, flat parameters, optimizer state.
// Doubles are serialized with round-trip precision, so reloads are exact.

void save_policy_checkpoint(const std::string& path, const GaussianPolicy& policy);
GaussianPolicy load_policy_checkpoint(const std::string& path);

void save_sac_checkpoint(const std::string& path, const SacNets& nets,
                         const SacTrainerState& state);
// Loads the nets; optimizer state is restored into `state` when non-null.
SacNets load_sac_checkpoint(const std::string& path, SacTrainerState* state = nullptr);

// Any checkpoint kind that contains a policy ("policy" or "sac") yields one.
GaussianPolicy load_any_policy(const std::string& path);

void save_sm_checkpoint(const std::string& path, const sm::SmModel& model);
sm::SmModel load_sm_checkpoint(const std::string& path);

}  // namespace grasplab::learn
