#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rzsr/rng.hpp"
#include "rzsr/tensor.hpp"

namespace rzsr {

enum class NetMode { Full, ReferenceFree, SingleScale };
const char* net_mode_name(NetMode m);
NetMode parse_net_mode(const std::string& s);

/// Span of one parameter blob and its gradient accumulator.
struct ParamView {
  double* value;
  double* grad;
  size_t count;
};

/// 3x3 convolution, symmetric padding 1, stride 1 or 2, optional ReLU.
struct ConvLayer {
  int in_ch = 0, out_ch = 0, stride = 1;
  bool relu = true;
  std::vector<double> w, b;    // w: [out][in][3][3]
  std::vector<double> gw, gb;

  ConvLayer() = default;
  ConvLayer(int in, int out, int stride, bool relu);

  struct Cache {
    Tensor input;
    Tensor output;  // post-activation
  };

  Tensor forward(const Tensor& x, Cache* cache) const;
  /// Returns gradient w.r.t. the input; accumulates gw/gb.
  Tensor backward(const Tensor& dout, const Cache& cache);
};

/// 4x4 transposed convolution with stride 2; output is exactly 2x the
/// input (one-sample crop on each side of the full output). Linear.
struct TransposedConvLayer {
  int in_ch = 0, out_ch = 0;
  std::vector<double> w, b;  // w: [out][in][4][4]
  std::vector<double> gw, gb;

  TransposedConvLayer() = default;
  TransposedConvLayer(int in, int out);

  struct Cache {
    Tensor input;
  };

  Tensor forward(const Tensor& x, Cache* cache) const;
  Tensor backward(const Tensor& dout, const Cache& cache);
};

/// Embedded-Gaussian non-local block with residual connection: each query
/// position adds h(sum_y softmax(theta(Fs_x) . phi(Fc_y)) g(Fc_y)).
struct NonLocalBlock {
  int ch = 0;     // feature channels
  int embed = 0;  // embedding dim (ch / 2)
  std::vector<double> wt, bt, wp, bp, wg, bg, wh, bh;      // theta/phi/g: [E][C], h: [C][E]
  std::vector<double> gwt, gbt, gwp, gbp, gwg, gbg, gwh, gbh;

  NonLocalBlock() = default;
  NonLocalBlock(int channels);

  struct Cache {
    int ps = 0, pc = 0;
    Tensor fs, fc;
    std::vector<double> t, p, g;  // [E][P*]
    std::vector<double> attw;     // softmax weights [Ps][Pc]
    std::vector<double> att;      // attended values [Ps][E]
  };

  /// Fs and Fc must share the channel count; spatial sizes may differ.
  Tensor forward(const Tensor& fs, const Tensor& fc, Cache* cache) const;
  /// dfc receives the cousin-side gradient; when the block ran as
  /// self-attention the caller adds it back onto the query gradient.
  Tensor backward(const Tensor& dout, const Cache& cache, Tensor* dfc);
};

struct NetConfig {
  NetMode mode = NetMode::Full;
  int channels = 128;
  uint64_t seed = 0;
};

/// The image-specific SR network: shared 8-layer extractor (last three
/// layers stride 2), coarse-to-fine non-local pyramid with transposed-conv
/// upsampling, reconstruction head, and a global residual from the
/// bicubic-upsampled input.
class RzsrNetwork {
 public:
  explicit RzsrNetwork(const NetConfig& cfg);

  NetMode mode() const { return cfg_.mode; }
  int channels() const { return cfg_.channels; }

  struct Cache;

  /// `son_up` is the bicubic-upsampled LR son at output size (3 channels);
  /// `cousin` is the HR cousin at the same size, required in full and
  /// single-scale modes and rejected in reference-free mode.
  Tensor forward(const Tensor& son_up, const Tensor* cousin,
                 Cache* cache = nullptr) const;

  /// Accumulates parameter gradients from d(loss)/d(output).
  void backward(const Tensor& dout, Cache& cache);

  std::vector<ParamView> params();
  size_t param_count() const;
  void zero_grad();

  /// He initialization with the config seed; the last head convolution is
  /// left at zero so the untrained network reproduces its residual input.
  void init_default();
  /// Randomizes every blob including the zero-initialized head (tests).
  void init_all_random(uint64_t seed);

  void save_checkpoint(const std::string& path) const;
  void load_checkpoint(const std::string& path);

  struct Cache {
    std::vector<ConvLayer::Cache> son_ext, cousin_ext;
    NonLocalBlock::Cache nl1, nl2, nl3;
    TransposedConvLayer::Cache tc1, tc2, tc3;
    ConvLayer::Cache head1, head2;
    bool has_cousin = false;
    int out_h = 0, out_w = 0;
  };

 private:
  NetConfig cfg_;
  std::vector<ConvLayer> ext_;     // 8 layers
  std::vector<NonLocalBlock> nl_;  // 3, or 1 in single-scale mode
  TransposedConvLayer tc1_, tc2_, tc3_;
  ConvLayer head1_, head2_;

  std::vector<ParamView> param_views_();
  std::vector<std::pair<const double*, size_t>> param_blobs_() const;

  /// Runs the shared extractor and returns the three tap outputs
  /// (1/2, 1/4, 1/8 of the input size).
  void run_extractor_(const Tensor& x, std::vector<ConvLayer::Cache>* caches,
                      Tensor* tap_half, Tensor* tap_quarter,
                      Tensor* tap_eighth) const;
};

/// Standard bias-corrected Adam (beta1 0.9, beta2 0.999, eps 1e-8).
struct AdamState {
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  long step = 0;
  std::vector<std::vector<double>> m, v;

  void init(const std::vector<ParamView>& params);
  void update(std::vector<ParamView>& params, double lr);
};

}  // namespace rzsr
