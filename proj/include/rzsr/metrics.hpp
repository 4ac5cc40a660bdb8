#pragma once

#include "rzsr/image.hpp"

namespace rzsr {

/// Y-channel PSNR in dB on [0,1] scale after shaving `shave` pixels from
/// each border (the usual SR convention: shave = scale). Identical crops
/// report +infinity.
double psnr_y(const Image& a, const Image& b, int shave);

/// Single-scale SSIM of the Y channel: 11x11 Gaussian window sigma 1.5,
/// C1 = 0.01^2, C2 = 0.03^2, averaged over valid window positions.
double ssim_y(const Image& a, const Image& b, int shave);

}  // namespace rzsr
