#include <doctest.h>

#include <sstream>

#include "hclex/error.hpp"
#include "hclex/run_config.hpp"

using namespace hclex;

TEST_CASE("defaults") {
  const RunConfig cfg;
  CHECK_EQ(cfg.seed, 42);
  CHECK_EQ(cfg.workers, 1);
  CHECK_EQ(cfg.min_count, 5);
  CHECK_EQ(cfg.phrase_min_count, 5);
  CHECK_EQ(cfg.phrase_threshold, 10.0);
  CHECK_EQ(cfg.phrase_passes, 2);
  CHECK_EQ(cfg.dimension, 100);
  CHECK_EQ(cfg.window, 5);
  CHECK_EQ(cfg.negatives, 5);
  CHECK_EQ(cfg.epochs, 5);
  CHECK_EQ(cfg.initial_lr, 0.025);
  CHECK_EQ(cfg.min_lr, 1e-4);
  CHECK_EQ(cfg.subsample, 1e-3);
  CHECK_EQ(cfg.expand_threshold, 0.5);
  CHECK(cfg.include_antonyms);
  CHECK_EQ(cfg.k_min, 2);
  CHECK_EQ(cfg.k_max, 25);
  CHECK_EQ(cfg.bucket, "days:10");
  CHECK(cfg.exclude_subcategories.empty());
  CHECK_EQ(cfg.neg_ratio, 2);
  CHECK_EQ(cfg.train_frac, 0.8);
}

TEST_CASE("load parses key = value with comments") {
  std::istringstream in(
      "# a comment\n"
      "seed = 99\n"
      "\n"
      "  dimension=64  \n"
      "include_antonyms = false\n"
      "bucket = year\n"
      "exclude_subcategories = covid,general\n"
      "train_frac = 0.75\n");
  RunConfig cfg;
  cfg.load(in);
  CHECK_EQ(cfg.seed, 99);
  CHECK_EQ(cfg.dimension, 64);
  CHECK_FALSE(cfg.include_antonyms);
  CHECK_EQ(cfg.bucket, "year");
  CHECK_EQ(cfg.exclude_subcategories, std::vector<std::string>{"covid", "general"});
  CHECK_EQ(cfg.train_frac, 0.75);
  CHECK_EQ(cfg.workers, 1);  // untouched keys keep defaults
}

TEST_CASE("load rejects unknown keys and bad values with line numbers") {
  std::istringstream unknown("seed = 1\nnot_a_key = 2\n");
  RunConfig cfg;
  try {
    cfg.load(unknown);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    CHECK(std::string(e.what()).find("not_a_key") != std::string::npos);
  }
  std::istringstream bad_int("dimension = large\n");
  CHECK_THROWS_AS(cfg.load(bad_int), DataError);
  std::istringstream bad_bool("include_antonyms = maybe\n");
  CHECK_THROWS_AS(cfg.load(bad_bool), DataError);
  std::istringstream no_eq("just words\n");
  CHECK_THROWS_AS(cfg.load(no_eq), DataError);
}

TEST_CASE("apply accepts flag-style overrides") {
  RunConfig cfg;
  cfg.apply("expand_threshold", "0.7");
  cfg.apply("workers", "4");
  cfg.apply("include_antonyms", "0");
  CHECK_EQ(cfg.expand_threshold, 0.7);
  CHECK_EQ(cfg.workers, 4);
  CHECK_FALSE(cfg.include_antonyms);
  CHECK_THROWS_AS(cfg.apply("bogus", "1"), DataError);
}

TEST_CASE("save then load reproduces every field") {
  RunConfig cfg;
  cfg.seed = 1234567890123ull;
  cfg.workers = 3;
  cfg.phrase_threshold = 9.25;
  cfg.initial_lr = 0.0375;
  cfg.expand_threshold = 0.93;
  cfg.include_antonyms = false;
  cfg.bucket = "days:30";
  cfg.exclude_subcategories = {"covid"};
  cfg.train_frac = 0.9;

  std::ostringstream out;
  cfg.save(out);
  RunConfig back;
  std::istringstream in(out.str());
  back.load(in);

  std::ostringstream again;
  back.save(again);
  CHECK_EQ(again.str(), out.str());
  CHECK_EQ(back.seed, cfg.seed);
  CHECK_EQ(back.exclude_subcategories, cfg.exclude_subcategories);
  CHECK_EQ(back.expand_threshold, cfg.expand_threshold);
}

TEST_CASE("stage seeds are stable and distinct") {
  RunConfig cfg;
  const auto train1 = stage_seed(cfg, "train");
  const auto train2 = stage_seed(cfg, "train");
  const auto cluster = stage_seed(cfg, "cluster");
  CHECK_EQ(train1, train2);
  CHECK_NE(train1, cluster);

  RunConfig other;
  other.seed = 43;
  CHECK_NE(stage_seed(other, "train"), train1);
}
