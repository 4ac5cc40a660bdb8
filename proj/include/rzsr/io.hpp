#pragma once

#include <cstdint>
#include <string>

#include "rzsr/image.hpp"

namespace rzsr {

/// 8-bit PNG (gray or RGB) to [0,1] doubles. RGBA alpha is stripped.
Image load_png(const std::string& path);

/// Quantizes round(v*255) with clamping; 1-channel writes gray PNG.
void save_png(const Image& img, const std::string& path);

/// Depth map: 16-bit or 8-bit PGM (P5), or float32 raw with a one-line
/// header "DPT width height". Values are min-max normalized to [0,1],
/// smaller = nearer.
Image load_depth(const std::string& path);
void save_depth_dpt(const Image& depth, const std::string& path);

/// FNV-1a of a file's bytes, for manifests.
uint64_t file_hash(const std::string& path);

bool file_exists(const std::string& path);

}  // namespace rzsr
