#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sgb/tensor.hpp"

namespace sgb {

using NamedParams = std::vector<std::pair<std::string, TensorPtr>>;

// Versioned text checkpoint: a header string, one line of free-form metadata
// (JSON in practice), then one entry per parameter with shape and row-major
// values. Values are written as hexfloats so a round trip is bit-exact and a
// fixed seed yields byte-identical files.
//
//   sgb-checkpoint v1
//   meta <json>
//   param <name> <rank> <extents...>
//   <values...>
//   end

struct Checkpoint {
    std::string meta;
    std::vector<std::pair<std::string, TensorPtr>> params;

    const TensorPtr& find(const std::string& name) const;
};

void save_checkpoint(const std::string& path, const std::string& meta, const NamedParams& params);
Checkpoint load_checkpoint(const std::string& path);

// Copies checkpoint values into an existing parameter set; every name must
// be present with a matching shape.
void restore_params(const Checkpoint& ckpt, const NamedParams& params);

}  // namespace sgb
