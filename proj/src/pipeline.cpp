#include "accent/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

namespace accent {

ExtractionResult extract_features(const CorpusManifest& manifest,
                                  const std::filesystem::path& base_dir,
                                  const MfccConfig& config, int threads) {
  validate(config);
  const auto n = manifest.entries.size();
  std::vector<FeatureVector> rows(n);
  std::vector<std::string> errors(n);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      const auto& entry = manifest.entries[i];
      try {
        const std::filesystem::path path(entry.path);
        AudioClip clip = load_wav(path.is_absolute() ? path : base_dir / path);
        clip.source_id = entry.path;
        rows[i] = summarize_mean(compute_mfcc(clip, config));
        rows[i].label = entry.label;
      } catch (const std::exception& e) {
        errors[i] = entry.path + ": " + e.what();
      }
    }
  };
  const auto n_workers = static_cast<std::size_t>(std::max(threads, 1));
  if (n_workers == 1 || n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(n_workers, n); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  ExtractionResult result;
  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i].empty()) {
      result.failures.push_back(std::move(errors[i]));
    } else {
      result.rows.push_back(std::move(rows[i]));
    }
  }
  return result;
}

}  // namespace accent
