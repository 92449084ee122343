#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bagnet/autograd.hpp"

namespace bagnet::nn {

// Flat binary parameter checkpoint. Layout, all integers 64-bit
// little-endian unsigned, values 64-bit little-endian IEEE reals:
//   magic "BAGNET01" | parameter count |
//   per parameter: name length | name bytes (UTF-8) | rank | dims... | values...
void save_checkpoint(const std::string& path,
                     const std::vector<const Parameter*>& params);

std::vector<std::pair<std::string, Tensor>> load_checkpoint(const std::string& path);

// Loads values by name into existing parameters; every parameter must be
// present in the file with a matching shape.
void load_checkpoint_into(const std::string& path,
                          const std::vector<Parameter*>& params);

}  // namespace bagnet::nn
