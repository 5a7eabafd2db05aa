#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "cfgx/tensor.hpp"

namespace cfgx {

// Versioned JSON checkpoint of named tensors. `kind` tags the producing
// model (autoencoder / gcn / pgexplainer), `meta` carries config hash + seed.
struct Checkpoint {
  std::string kind;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::map<std::string, Tensor> tensors;
};

std::string checkpoint_to_json(const Checkpoint& ck);
Checkpoint checkpoint_from_json(const std::string& text);
void save_checkpoint(const Checkpoint& ck, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace cfgx
