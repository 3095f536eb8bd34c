#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "accent/audio.hpp"
#include "accent/mfcc.hpp"

namespace accent {

struct ExtractionResult {
  std::vector<FeatureVector> rows;   // manifest order, labelled, id = manifest path
  std::vector<std::string> failures;  // one message per failed clip, manifest order
};

/// Loads every clip named in the manifest (relative paths resolve against
/// `base_dir`) and returns its labelled mean-MFCC vector. Clips are processed
/// on up to `threads` workers; the output does not depend on the thread count.
ExtractionResult extract_features(const CorpusManifest& manifest,
                                  const std::filesystem::path& base_dir,
                                  const MfccConfig& config, int threads = 1);

}  // namespace accent
