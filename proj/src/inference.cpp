#include "rzsr/inference.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace rzsr {

namespace {

std::vector<int> axis_centers(int dim, int side, int stride) {
  int h = side / 2;
  std::vector<int> cs;
  for (int c = h; c <= dim - h; c += stride) cs.push_back(c);
  if (cs.empty() || cs.back() != dim - h) cs.push_back(dim - h);  // flush edge
  return cs;
}

Image mirror_pad(const Image& img, int min_w, int min_h) {
  int w = std::max(img.width, min_w), h = std::max(img.height, min_h);
  if (w == img.width && h == img.height) return img;
  Image out(w, h, img.channels);
  int ox = (w - img.width) / 2, oy = (h - img.height) / 2;
  for (int c = 0; c < img.channels; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        out.at(c, y, x) = img.at_mirror(c, y - oy, x - ox);
  return out;
}

}  // namespace

TilePlan plan_tiles(int width, int height, int patch_side, int stride) {
  if (patch_side <= 0 || patch_side % 2 != 0)
    throw Error(ErrorCode::InvalidArgument, "tile patch side must be even");
  if (stride < 1 || stride > patch_side)
    throw Error(ErrorCode::InvalidArgument,
                "tile stride must be in [1, patch_side] for full coverage");
  if (width < patch_side || height < patch_side)
    throw Error(ErrorCode::InvalidArgument, "image smaller than tile");
  TilePlan plan;
  plan.patch_side = patch_side;
  plan.stride = stride;
  for (int cy : axis_centers(height, patch_side, stride))
    for (int cx : axis_centers(width, patch_side, stride))
      plan.centers.emplace_back(cx, cy);
  return plan;
}

Image sr_image(const Image& img, const Image& depth, const TileModel& model,
               const SrOptions& opt, std::vector<TileAuditRow>* audit) {
  const int M = opt.patch_side;
  if (depth.width != img.width || depth.height != img.height)
    throw Error(ErrorCode::Shape, "depth map not aligned to image");

  bool padded = img.width < M || img.height < M;
  if (padded && opt.features.backend == DescriptorBackend::ExternalFile)
    throw Error(ErrorCode::Config,
                "external feature maps cannot be used on images smaller than "
                "the patch side");
  Image work = padded ? mirror_pad(img, M, M) : img;
  Image work_depth = padded ? mirror_pad(depth, M, M) : depth;

  Image up = resize_bicubic(work, 2.0);
  FeatureMap fm = extract_image_features(work, opt.features);
  TilePlan plan = plan_tiles(work.width, work.height, M, opt.tile_stride);

  Image acc(up.width, up.height, work.channels);
  std::vector<double> counts(acc.plane_size(), 0.0);
  CousinFit fit{work.width, work.height, 2 * M};

  for (auto [cx, cy] : plan.centers) {
    Patch son = extract_patch(work, cx, cy, M);
    Tensor son_up =
        image_to_tensor(extract_patch(up, 2 * cx, 2 * cy, 2 * M).pixels);
    double d = work_depth.at(0, cy, cx);

    Tensor out;
    TileAuditRow row;
    row.tile_cx = cx;
    row.tile_cy = cy;
    row.query_depth = d;
    if (!opt.with_reference) {
      out = model(son_up, nullptr);
    } else {
      RetrievalResult r;
      switch (opt.retrieval) {
        case RetrievalMode::Database: {
          Descriptor q = patch_descriptor(fm, cx, cy, M);
          r = retrieve_cousin(q, d, *opt.db2, opt.threshold, fit);
          if (!r.used_fallback)
            row.entry_depth = 0.0;  // filled below from the entry
          break;
        }
        case RetrievalMode::Exhaustive:
        case RetrievalMode::ExhaustiveNoDepth: {
          Descriptor q = patch_descriptor(fm, cx, cy, M);
          r = retrieve_exhaustive(q, d, *opt.img_coarse, *opt.depth_coarse,
                                  *opt.fm_coarse, M,
                                  opt.retrieval == RetrievalMode::Exhaustive,
                                  opt.threshold, fit);
          break;
        }
        case RetrievalMode::None:
          r.used_fallback = true;
          r.min_distance = std::numeric_limits<double>::infinity();
          break;
      }
      row.used_fallback = r.used_fallback;
      row.distance = r.min_distance;
      Image cousin_img;
      if (r.used_fallback) {
        cousin_img = resize_bicubic(son.pixels, 2.0);
      } else {
        row.cousin_cx = r.cousin_cx;
        row.cousin_cy = r.cousin_cy;
        if (opt.retrieval == RetrievalMode::Database) {
          // entry depth for the audit trail
          for (const PatchEntry& e : opt.db2->entries)
            if (e.cx == r.cousin_cx && e.cy == r.cousin_cy)
              row.entry_depth = double(e.depth);
        } else if (opt.depth_coarse) {
          row.entry_depth = opt.depth_coarse->at(0, r.cousin_cy, r.cousin_cx);
        }
        cousin_img =
            extract_patch(work, 2 * r.cousin_cx, 2 * r.cousin_cy, 2 * M).pixels;
      }
      Tensor cousin = image_to_tensor(cousin_img);
      try {
        out = model(son_up, &cousin);
      } catch (const Error& e) {
        throw Error(e.code(), std::string(e.what()) + " at tile (" +
                                  std::to_string(cx) + "," +
                                  std::to_string(cy) + ")");
      }
    }
    if (out.channels != work.channels || out.height != 2 * M || out.width != 2 * M)
      throw Error(ErrorCode::Shape,
                  "tile model returned wrong shape at tile (" +
                      std::to_string(cx) + "," + std::to_string(cy) + ")");

    int ox0 = 2 * cx - M, oy0 = 2 * cy - M;
    for (int c = 0; c < out.channels; ++c)
      for (int y = 0; y < 2 * M; ++y)
        for (int x = 0; x < 2 * M; ++x)
          acc.at(c, oy0 + y, ox0 + x) += out.at(c, y, x);
    for (int y = 0; y < 2 * M; ++y)
      for (int x = 0; x < 2 * M; ++x)
        counts[size_t(oy0 + y) * acc.width + (ox0 + x)] += 1.0;
    if (audit && opt.with_reference) audit->push_back(row);
  }

  for (int c = 0; c < acc.channels; ++c)
    for (int y = 0; y < acc.height; ++y)
      for (int x = 0; x < acc.width; ++x)
        acc.at(c, y, x) /= counts[size_t(y) * acc.width + x];
  acc = clamp01(acc);

  if (padded) {  // crop back to 2x original
    Image out(2 * img.width, 2 * img.height, img.channels);
    int ox = 2 * ((work.width - img.width) / 2);
    int oy = 2 * ((work.height - img.height) / 2);
    for (int c = 0; c < out.channels; ++c)
      for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x)
          out.at(c, y, x) = acc.at(c, y + oy, x + ox);
    return out;
  }
  return acc;
}

Image back_project(const Image& sr, const Image& lr, const BlurKernel* kernel,
                   int factor, int iters) {
  if (sr.width != factor * lr.width || sr.height != factor * lr.height)
    throw Error(ErrorCode::Shape, "back-projection dims mismatch");
  Image cur = sr;
  double prev_norm = std::numeric_limits<double>::infinity();
  int grew = 0;
  for (int i = 0; i < iters; ++i) {
    Image down = kernel ? downsample_with_kernel(cur, *kernel, factor)
                        : resize_bicubic_to(cur, lr.width, lr.height);
    if (down.width != lr.width || down.height != lr.height)
      throw Error(ErrorCode::Shape, "downscale model dims mismatch");
    Image resid(lr.width, lr.height, lr.channels);
    double norm = 0.0;
    for (size_t j = 0; j < resid.data.size(); ++j) {
      resid.data[j] = lr.data[j] - down.data[j];
      norm += resid.data[j] * resid.data[j];
    }
    norm = std::sqrt(norm);
    if (norm >= prev_norm) {
      if (++grew >= 2) break;  // diverging; keep the best-effort result
    } else {
      grew = 0;
    }
    prev_norm = norm;
    Image up = resize_bicubic_to(resid, sr.width, sr.height);
    for (size_t j = 0; j < cur.data.size(); ++j) cur.data[j] += up.data[j];
  }
  return cur;
}

Image geometric_ensemble(
    const Image& img, const Image& depth,
    const std::function<Image(const Image&, const Image&)>& run, bool enabled) {
  if (!enabled) return run(img, depth);
  Image acc;
  for (int t = 0; t < 8; ++t) {
    Image o = run(dihedral_transform(img, t), dihedral_transform(depth, t));
    Image back = dihedral_transform(o, dihedral_inverse(t));
    if (t == 0) {
      acc = back;
    } else {
      if (!(acc.width == back.width && acc.height == back.height))
        throw Error(ErrorCode::Shape, "ensemble member dims mismatch");
      for (size_t i = 0; i < acc.data.size(); ++i) acc.data[i] += back.data[i];
    }
  }
  for (auto& v : acc.data) v /= 8.0;
  return acc;
}

void write_audit_csv(const std::vector<TileAuditRow>& rows,
                     const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::Io, "cannot write audit log: " + path);
  f << "tile_cx,tile_cy,cousin_cx,cousin_cy,distance,used_fallback,"
       "query_depth,entry_depth\n";
  f.precision(9);
  for (const auto& r : rows)
    f << r.tile_cx << "," << r.tile_cy << "," << r.cousin_cx << ","
      << r.cousin_cy << "," << r.distance << "," << (r.used_fallback ? 1 : 0)
      << "," << r.query_depth << "," << r.entry_depth << "\n";
}

}  // namespace rzsr
