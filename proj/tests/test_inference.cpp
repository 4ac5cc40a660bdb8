#include <cmath>
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "rzsr/inference.hpp"
#include "rzsr/metrics.hpp"
#include "synth.hpp"

using namespace rzsr;

namespace {

SrOptions basic_options(int patch_side, int stride,
                        const PatchDatabase* db = nullptr) {
  SrOptions opt;
  opt.patch_side = patch_side;
  opt.tile_stride = stride;
  opt.db2 = db;
  if (!db) opt.retrieval = RetrievalMode::None;
  return opt;
}

// cheapest valid model: the residual path alone
Tensor identity_model(const Tensor& son_up, const Tensor*) { return son_up; }

struct CoarseSetup {
  Image img2, depth2;
  FeatureMap fm2;
  PatchDatabase db2;
  CoarseSetup(const Image& img, const Image& depth, int patch_side, int bins,
              int kdiv) {
    img2 = resize_bicubic(img, 0.5);
    depth2 = resize_bilinear_to(depth, img2.width, img2.height);
    FeatureOptions fo;
    fm2 = extract_image_features(img2, fo);
    DatabaseBuildConfig dbc;
    dbc.patch_side = patch_side;
    dbc.depth_bins = bins;
    dbc.k_divisor = kdiv;
    db2 = build_database(img2, depth2, fm2, dbc, ScaleTag::Half);
  }
};

}  // namespace

TEST_CASE("plan_tiles: single tile, edge clamping, full coverage") {
  TilePlan one = plan_tiles(48, 48, 48, 4);
  CHECK(one.centers.size() == 1);
  CHECK(one.centers[0] == std::pair<int, int>(24, 24));

  TilePlan two = plan_tiles(52, 48, 48, 4);
  REQUIRE(two.centers.size() == 2);
  CHECK(two.centers[0] == std::pair<int, int>(24, 24));
  CHECK(two.centers[1] == std::pair<int, int>(28, 24));  // flush right edge

  // brute-force coverage count at every pixel
  TilePlan plan = plan_tiles(96, 96, 48, 4);
  std::vector<int> counts(96 * 96, 0);
  for (auto [cx, cy] : plan.centers)
    for (int y = cy - 24; y < cy + 24; ++y)
      for (int x = cx - 24; x < cx + 24; ++x) ++counts[y * 96 + x];
  for (int v : counts) CHECK(v >= 1);
  // interior pixels see the full s-lattice of overlapping tiles
  CHECK(counts[48 * 96 + 48] == 12 * 12);

  CHECK_THROWS_AS(plan_tiles(40, 40, 48, 4), Error);
  CHECK_THROWS_AS(plan_tiles(96, 96, 48, 50), Error);
}

TEST_CASE("sr_image: constant stub model fills the output with its value") {
  Image img = synth::smooth(64, 64, 3);
  Image depth = synth::ramp_depth(64, 64);
  TileModel half = [](const Tensor& son_up, const Tensor*) {
    return Tensor(son_up.channels, son_up.height, son_up.width, 0.5);
  };
  Image out = sr_image(img, depth, half, basic_options(16, 4));
  REQUIRE(out.width == 128);
  REQUIRE(out.height == 128);
  for (double v : out.data) CHECK(v == 0.5);
}

TEST_CASE("sr_image: residual-only model reproduces global bicubic") {
  Image img = synth::bricks(64, 60, 3, 16, 8);  // non-square on purpose
  Image depth = synth::ramp_depth(64, 60);
  Image out = sr_image(img, depth, identity_model, basic_options(16, 4));
  REQUIRE(out.width == 128);
  REQUIRE(out.height == 120);
  Image want = clamp01(resize_bicubic(img, 2.0));
  for (size_t i = 0; i < out.data.size(); ++i)
    CHECK(out.data[i] == doctest::Approx(want.data[i]).epsilon(1e-6));
}

TEST_CASE("sr_image: images smaller than the tile get padded and cropped") {
  Image img = synth::smooth(12, 10, 3);
  Image depth(12, 10, 1, 0.0);
  Image out = sr_image(img, depth, identity_model, basic_options(16, 4));
  CHECK(out.width == 24);
  CHECK(out.height == 20);
}

TEST_CASE("sr_image: audited retrievals respect the strict depth constraint") {
  Image img = synth::drift_grating(96, 96, 3, 6.0, 1.1);
  Image depth = synth::ramp_depth(96, 96);
  CoarseSetup s(img, depth, 16, 4, 10);
  REQUIRE(!s.db2.entries.empty());

  SrOptions opt = basic_options(16, 8, &s.db2);
  opt.threshold = 1.9;
  std::vector<TileAuditRow> audit;
  Image out = sr_image(img, depth, identity_model, opt, &audit);
  REQUIRE(!audit.empty());
  int non_fb = 0;
  for (const auto& row : audit) {
    if (row.used_fallback) continue;
    ++non_fb;
    CHECK(row.entry_depth < row.query_depth);
    CHECK(row.distance <= 1.9);
  }
  CHECK(non_fb > 0);

  write_audit_csv(audit, "tmp_audit.csv");
  std::ifstream f("tmp_audit.csv");
  std::string header;
  std::getline(f, header);
  CHECK(header ==
        "tile_cx,tile_cy,cousin_cx,cousin_cy,distance,used_fallback,"
        "query_depth,entry_depth");
  std::remove("tmp_audit.csv");
}

TEST_CASE("sr_image: threshold zero equals the forced-fallback pathway") {
  Image img = synth::drift_grating(64, 64, 3, 5.0, 0.9);
  Image depth = synth::ramp_depth(64, 64);
  CoarseSetup s(img, depth, 16, 3, 10);

  // a model that uses the cousin, so cousin differences would show up
  TileModel mix = [](const Tensor& son_up, const Tensor* cousin) {
    Tensor out = son_up;
    REQUIRE(cousin != nullptr);
    for (size_t i = 0; i < out.data.size(); ++i)
      out.data[i] = 0.7 * out.data[i] + 0.3 * cousin->data[i];
    return out;
  };

  SrOptions t0 = basic_options(16, 4, &s.db2);
  t0.retrieval = RetrievalMode::Database;
  t0.threshold = 0.0;
  std::vector<TileAuditRow> audit;
  Image out_t0 = sr_image(img, depth, mix, t0, &audit);
  for (const auto& row : audit) CHECK(row.used_fallback);

  SrOptions none = basic_options(16, 4, &s.db2);
  none.retrieval = RetrievalMode::None;
  Image out_none = sr_image(img, depth, mix, none);
  CHECK(out_t0.data == out_none.data);
}

TEST_CASE("back_project: fixed point, identity at zero iters, convergence") {
  Image hr = synth::smooth(64, 64, 3);
  Image lr = resize_bicubic(hr, 0.5);

  // iters = 0 is the identity
  Image sr0 = back_project(hr, lr, nullptr, 2, 0);
  CHECK(sr0.data == hr.data);

  // a downscale-consistent image is a fixed point
  Image consistent = resize_bicubic(lr, 2.0);
  Image lr_of = resize_bicubic(consistent, 0.5);
  Image fixed = back_project(consistent, lr_of, nullptr, 2, 5);
  for (size_t i = 0; i < fixed.data.size(); ++i)
    CHECK(fixed.data[i] == doctest::Approx(consistent.data[i]).epsilon(1e-6));

  // starting from plain bicubic, the residual shrinks monotonically
  Image start = resize_bicubic(lr, 2.0);
  auto resid_norm = [&](const Image& sr) {
    Image down = resize_bicubic(sr, 0.5);
    double n = 0.0;
    for (size_t i = 0; i < down.data.size(); ++i) {
      double d = down.data[i] - lr.data[i];
      n += d * d;
    }
    return std::sqrt(n);
  };
  double prev = resid_norm(start);
  Image cur = start;
  for (int i = 0; i < 4; ++i) {
    cur = back_project(cur, lr, nullptr, 2, 1);
    double now = resid_norm(cur);
    CHECK(now < prev);
    prev = now;
  }

  CHECK_THROWS_AS(back_project(hr, synth::constant(10, 10, 3, 0.5), nullptr, 2, 1),
                  Error);
}

TEST_CASE("geometric_ensemble: disabled passthrough and explicit mean") {
  Image img = synth::bricks(40, 40, 3, 10, 5);
  Image depth = synth::ramp_depth(40, 40);

  auto run = [&](const Image& im, const Image&) {
    return clamp01(resize_bicubic(im, 2.0));
  };
  Image single = geometric_ensemble(img, depth, run, false);
  CHECK(single.data == run(img, depth).data);

  Image ens = geometric_ensemble(img, depth, run, true);
  // recompute the mean of the 8 inverse-transformed member outputs
  Image acc(80, 80, 3, 0.0);
  for (int t = 0; t < 8; ++t) {
    Image o = run(dihedral_transform(img, t), depth);
    Image back = dihedral_transform(o, dihedral_inverse(t));
    for (size_t i = 0; i < acc.data.size(); ++i) acc.data[i] += back.data[i];
  }
  for (auto& v : acc.data) v /= 8.0;
  for (size_t i = 0; i < ens.data.size(); ++i)
    CHECK(ens.data[i] == doctest::Approx(acc.data[i]).epsilon(1e-12));

  // bicubic commutes with the dihedral group, so the ensemble of a pure
  // bicubic model equals the single pass (up to rounding)
  for (size_t i = 0; i < ens.data.size(); ++i)
    CHECK(ens.data[i] == doctest::Approx(single.data[i]).epsilon(1e-9));
}

TEST_CASE("tile accumulation order does not affect the average") {
  // run with two different strides covering the same image: both averages
  // must be exact on a model that returns tile-position-independent content
  Image img = synth::smooth(64, 64, 1);
  Image depth(64, 64, 1, 0.0);
  Image a = sr_image(img, depth, identity_model, basic_options(16, 4));
  Image b = sr_image(img, depth, identity_model, basic_options(16, 8));
  Image want = clamp01(resize_bicubic(img, 2.0));
  for (size_t i = 0; i < a.data.size(); ++i) {
    CHECK(a.data[i] == doctest::Approx(want.data[i]).epsilon(1e-9));
    CHECK(b.data[i] == doctest::Approx(want.data[i]).epsilon(1e-9));
  }
}
