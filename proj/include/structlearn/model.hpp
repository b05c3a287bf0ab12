#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "structlearn/dataset.hpp"
#include "structlearn/lexicon.hpp"
#include "structlearn/weight_vector.hpp"

namespace structlearn {

inline constexpr std::uint32_t kModelFormatVersion = 1;

// Everything needed to rebuild a trained predictor.
struct ModelArtifact {
    WeightVector weights;
    TaskKind task = TaskKind::sequence;
    Lexicon feature_lexicon;
    Lexicon label_lexicon;
    std::uint32_t format_version = kModelFormatVersion;
    std::map<std::string, std::string> trainer_meta;

    friend bool operator==(const ModelArtifact& a, const ModelArtifact& b);
};

// Binary container:
//   8-byte magic "STRUCTSL", u32 format version, then sections
//   [u32 tag][u64 payload length][payload] for task, trainer meta, feature
//   lexicon, label lexicon and weights. Integers and doubles little-endian.
std::vector<std::uint8_t> encode_model(const ModelArtifact& model);
ModelArtifact decode_model(const std::vector<std::uint8_t>& bytes);

void save_model(const ModelArtifact& model, const std::filesystem::path& path);
ModelArtifact load_model(const std::filesystem::path& path);

}  // namespace structlearn
