#include "rzsr/image.hpp"

#include <algorithm>
#include <string>

namespace rzsr {

Image::Image(int w, int h, int c, double fill)
    : width(w), height(h), channels(c),
      data(size_t(w) * h * c, fill) {
  if (w < 0 || h < 0 || (c != 0 && c != 1 && c != 3))
    throw Error(ErrorCode::InvalidArgument, "image dims must be >=0 with 1 or 3 channels");
}

int mirror_index(int i, int n) {
  if (n == 1) return 0;
  // fold until inside; each fold is the symmetric reflection at a border
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - 1 - i;
  }
  return i;
}

double Image::at_mirror(int c, int y, int x) const {
  return at(c, mirror_index(y, height), mirror_index(x, width));
}

const char* scale_tag_name(ScaleTag t) {
  switch (t) {
    case ScaleTag::Full: return "full";
    case ScaleTag::Half: return "half";
    case ScaleTag::Quarter: return "quarter";
  }
  return "?";
}

bool patch_fits(const Image& img, int cx, int cy, int side) {
  int h = side / 2;
  return cx - h >= 0 && cy - h >= 0 && cx + side - h <= img.width &&
         cy + side - h <= img.height;
}

Patch extract_patch(const Image& img, int cx, int cy, int side, ScaleTag tag) {
  if (side <= 0 || side % 2 != 0)
    throw Error(ErrorCode::InvalidArgument, "patch side must be positive and even");
  if (!patch_fits(img, cx, cy, side))
    throw Error(ErrorCode::Bounds,
                "patch (" + std::to_string(cx) + "," + std::to_string(cy) +
                    ") side " + std::to_string(side) + " out of bounds");
  Patch p;
  p.scale_tag = tag;
  p.cx = cx;
  p.cy = cy;
  p.side = side;
  p.pixels = Image(side, side, img.channels);
  int x0 = cx - side / 2, y0 = cy - side / 2;
  for (int c = 0; c < img.channels; ++c)
    for (int y = 0; y < side; ++y)
      for (int x = 0; x < side; ++x)
        p.pixels.at(c, y, x) = img.at(c, y0 + y, x0 + x);
  return p;
}

Image dihedral_transform(const Image& img, int id) {
  if (id < 0 || id > 7)
    throw Error(ErrorCode::InvalidArgument, "dihedral id must be in [0,8)");
  bool flip = (id & 4) != 0;
  int rot = id & 3;
  int w = img.width, h = img.height;
  int ow = (rot % 2 == 0) ? w : h;
  int oh = (rot % 2 == 0) ? h : w;
  Image out(ow, oh, img.channels);
  for (int c = 0; c < img.channels; ++c)
    for (int y = 0; y < oh; ++y)
      for (int x = 0; x < ow; ++x) {
        // invert the output coordinate back to the source pixel
        int rx = x, ry = y;
        switch (rot) {  // inverse of CCW rotation = CW rotation
          case 0: break;
          case 1: { int t = rx; rx = w - 1 - ry; ry = t; } break;
          case 2: rx = w - 1 - rx; ry = h - 1 - ry; break;
          case 3: { int t = rx; rx = ry; ry = h - 1 - t; } break;
        }
        if (flip) rx = w - 1 - rx;
        out.at(c, y, x) = img.at(c, ry, rx);
      }
  return out;
}

int dihedral_inverse(int id) {
  bool flip = (id & 4) != 0;
  int rot = id & 3;
  if (!flip) return (4 - rot) % 4;  // rotation inverse
  return id;                        // flip-then-rotate elements are involutions
}

Image clamp01(const Image& img) {
  Image out = img;
  for (auto& v : out.data) v = std::clamp(v, 0.0, 1.0);
  return out;
}

}  // namespace rzsr
