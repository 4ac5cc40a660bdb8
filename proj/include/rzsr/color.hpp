#pragma once

#include "rzsr/image.hpp"

namespace rzsr {

/// ITU-R BT.601 full-to-studio-range transform on [0,1] data, the convention
/// used by standard SR evaluation. Output channels are Y, Cb, Cr.
Image rgb_to_ycbcr(const Image& img);
Image ycbcr_to_rgb(const Image& img);

/// Y plane: the BT.601 luma of a 3-channel image, or the image itself when
/// single-channel.
Image luminance(const Image& img);

}  // namespace rzsr
