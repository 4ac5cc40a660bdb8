#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "rzsr/config.hpp"

using namespace rzsr;

TEST_CASE("defaults reproduce the published settings") {
  SRConfig cfg;
  CHECK(cfg.depth_bins == 5);
  CHECK(cfg.threshold == 0.9);
  CHECK(cfg.patch_side == 48);
  CHECK(cfg.tile_stride == 4);
  CHECK(cfg.lr == 0.001);
  CHECK(cfg.scale == 2);
  CHECK(cfg.k_divisor == 100);
  CHECK(cfg.channels == 128);
  CHECK(cfg.mode == NetMode::Full);
  CHECK(cfg.retrieval == RetrievalMode::Database);
  CHECK(cfg.descriptor == DescriptorBackend::GradientPyramid);
  CHECK(cfg.bp_iters == 8);
  CHECK(cfg.max_iters == 3000);
  CHECK(cfg.min_lr == 1e-6);
  CHECK(cfg.check_every == 50);
  CHECK(cfg.augment == true);
  CHECK(cfg.ensemble == false);
  CHECK(cfg.noise_sigma == 0.0);
}

TEST_CASE("set/get round-trips every key") {
  SRConfig cfg;
  for (const auto& key : SRConfig::keys()) {
    std::string v = cfg.get(key);
    cfg.set(key, v);  // idempotent
    CHECK(cfg.get(key) == v);
  }
  cfg.set("mode", "reference-free");
  CHECK(cfg.mode == NetMode::ReferenceFree);
  cfg.set("retrieval", "exhaustive-no-depth");
  CHECK(cfg.retrieval == RetrievalMode::ExhaustiveNoDepth);
  cfg.set("threshold", "0.7");
  CHECK(cfg.threshold == 0.7);
  cfg.set("ensemble", "true");
  CHECK(cfg.ensemble);

  CHECK_THROWS_AS(cfg.set("nope", "1"), Error);
  CHECK_THROWS_AS(cfg.set("scale", "abc"), Error);
  CHECK_THROWS_AS(cfg.set("mode", "fancy"), Error);
  CHECK_THROWS_AS(cfg.get("nope"), Error);
}

TEST_CASE("config file: comments, overrides, malformed lines") {
  {
    std::ofstream f("tmp_cfg.txt");
    f << "# experiment defaults\n"
      << "scale = 4\n"
      << "threshold=0.8\n"
      << "\n"
      << "mode = single-scale\n";
  }
  SRConfig cfg;
  cfg.load_file("tmp_cfg.txt");
  CHECK(cfg.scale == 4);
  CHECK(cfg.threshold == 0.8);
  CHECK(cfg.mode == NetMode::SingleScale);
  std::remove("tmp_cfg.txt");

  {
    std::ofstream f("tmp_bad.txt");
    f << "scale 4\n";
  }
  SRConfig bad;
  CHECK_THROWS_AS(bad.load_file("tmp_bad.txt"), Error);
  std::remove("tmp_bad.txt");
  CHECK_THROWS_AS(bad.load_file("missing_config.txt"), Error);
}

TEST_CASE("json echo covers every key verbatim") {
  SRConfig cfg;
  cfg.set("image", "in.png");
  cfg.set("seed", "1234");
  auto j = nlohmann::json::parse(cfg.to_json());
  for (const auto& key : SRConfig::keys())
    CHECK(j.at(key).get<std::string>() == cfg.get(key));
}
