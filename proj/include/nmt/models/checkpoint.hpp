#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "nmt/models/networks.hpp"

namespace nmt::models {

inline constexpr const char* kCheckpointMagic = "NMTCKPT";
inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  Models models;
  std::uint64_t iteration = 0;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> meta;  // free-form extras (mode, dataset path, ...)
};

// Header carries the ModelShapes, iteration, seed and meta; the payload holds
// every parameter array with its Adam state, in Models::all_parameters order.
void save_checkpoint(const std::filesystem::path& path, Models& models, std::uint64_t iteration,
                     std::uint64_t seed, const std::map<std::string, std::string>& meta = {});
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::string join_sizes(const std::vector<std::size_t>& v);
std::vector<std::size_t> split_sizes(const std::string& s);

}  // namespace nmt::models
