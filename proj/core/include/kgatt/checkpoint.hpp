#pragma once

#include <filesystem>
#include <iosfwd>

#include "kgatt/encoder.hpp"
#include "kgatt/training.hpp"

namespace kgatt {

struct Checkpoint {
  TrainConfig config;
  ModelParameters params;
};

/// Text checkpoint: header, config echo with its fingerprint, then every
/// parameter block as rows of shortest round-trip decimals.
void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace kgatt
