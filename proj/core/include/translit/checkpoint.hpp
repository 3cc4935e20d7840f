#pragma once

#include <cstdint>
#include <filesystem>

#include "translit/alphabet.hpp"
#include "translit/net.hpp"

namespace translit {

struct CheckpointMeta {
  uint32_t version = 1;
  uint64_t source_alphabet_hash = 0;
  uint64_t target_alphabet_hash = 0;
  ModelDims dims;
};

// Versioned binary container: a fixed header (format version, alphabet
// hashes, dimensions) followed by row-major float32 parameter blocks in
// visit_params order, closed by a content digest. A plain-text sidecar
// "<path>.manifest.txt" is written alongside for inspection.
void save_checkpoint(const std::filesystem::path& path, const ModelParams<float>& params,
                     const Alphabet& source_alphabet, const Alphabet& target_alphabet);

// Throws Error on a truncated or corrupted file, or an unknown version.
ModelParams<float> load_checkpoint(const std::filesystem::path& path,
                                   CheckpointMeta* meta = nullptr);

// Refuses to pair a checkpoint with alphabets it was not trained against.
void check_alphabets(const CheckpointMeta& meta, const Alphabet& source_alphabet,
                     const Alphabet& target_alphabet);

}  // namespace translit
