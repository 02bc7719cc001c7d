#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace hclex {

// Every knob of every pipeline stage, so a saved config reproduces a run.
// Serialized as `key = value` lines; '#' starts a comment.
struct RunConfig {
  std::uint64_t seed = 42;
  int workers = 1;

  // prepare
  int min_count = 5;  // vocabulary floor
  int phrase_min_count = 5;
  double phrase_threshold = 10.0;
  int phrase_passes = 2;

  // train
  int dimension = 100;
  int window = 5;
  int negatives = 5;
  int epochs = 5;
  double initial_lr = 0.025;
  double min_lr = 1e-4;
  double subsample = 1e-3;

  // expand
  double expand_threshold = 0.5;
  bool include_antonyms = true;

  // cluster
  int k_min = 2;
  int k_max = 25;
  int cluster_k = 6;  // k for the composition report
  int kmeans_restarts = 10;
  int kmeans_max_iters = 300;

  // score / aggregate
  std::string bucket = "days:10";
  std::vector<std::string> exclude_subcategories;

  // evaldataset
  int neg_ratio = 2;
  double train_frac = 0.8;

  // Applies one key=value pair; unknown keys and malformed values throw.
  void apply(std::string_view key, std::string_view value);

  void load(std::istream& in);
  void save(std::ostream& out) const;
};

// Stage-namespaced seed so stages draw independent randomness from --seed.
std::uint64_t stage_seed(const RunConfig& config, std::string_view stage);

}  // namespace hclex
