#include "rzsr/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace rzsr {

const char* net_mode_name(NetMode m) {
  switch (m) {
    case NetMode::Full: return "full";
    case NetMode::ReferenceFree: return "reference-free";
    case NetMode::SingleScale: return "single-scale";
  }
  return "?";
}

NetMode parse_net_mode(const std::string& s) {
  if (s == "full") return NetMode::Full;
  if (s == "reference-free") return NetMode::ReferenceFree;
  if (s == "single-scale") return NetMode::SingleScale;
  throw Error(ErrorCode::Config, "unknown network mode: " + s);
}

// ---------------------------------------------------------------------------
// ConvLayer

ConvLayer::ConvLayer(int in, int out, int stride_, bool relu_)
    : in_ch(in), out_ch(out), stride(stride_), relu(relu_),
      w(size_t(out) * in * 9, 0.0), b(size_t(out), 0.0),
      gw(w.size(), 0.0), gb(b.size(), 0.0) {}

namespace {

void im2col_3x3(const Tensor& x, int stride, std::vector<double>& col, int oh,
                int ow) {
  int P = oh * ow;
  col.assign(size_t(x.channels) * 9 * P, 0.0);
  for (int ci = 0; ci < x.channels; ++ci)
    for (int ky = 0; ky < 3; ++ky)
      for (int kx = 0; kx < 3; ++kx) {
        double* dst = col.data() + (size_t(ci) * 9 + ky * 3 + kx) * P;
        for (int oy = 0; oy < oh; ++oy) {
          int iy = mirror_index(stride * oy + ky - 1, x.height);
          for (int ox = 0; ox < ow; ++ox) {
            int ix = mirror_index(stride * ox + kx - 1, x.width);
            dst[oy * ow + ox] = x.at(ci, iy, ix);
          }
        }
      }
}

void col2im_3x3(const std::vector<double>& dcol, int stride, Tensor& dx,
                int oh, int ow) {
  int P = oh * ow;
  for (int ci = 0; ci < dx.channels; ++ci)
    for (int ky = 0; ky < 3; ++ky)
      for (int kx = 0; kx < 3; ++kx) {
        const double* src = dcol.data() + (size_t(ci) * 9 + ky * 3 + kx) * P;
        for (int oy = 0; oy < oh; ++oy) {
          int iy = mirror_index(stride * oy + ky - 1, dx.height);
          for (int ox = 0; ox < ow; ++ox) {
            int ix = mirror_index(stride * ox + kx - 1, dx.width);
            dx.at(ci, iy, ix) += src[oy * ow + ox];
          }
        }
      }
}

}  // namespace

Tensor ConvLayer::forward(const Tensor& x, Cache* cache) const {
  if (x.channels != in_ch)
    throw Error(ErrorCode::Shape, "conv expects " + std::to_string(in_ch) +
                                      " channels, got " + std::to_string(x.channels));
  int oh = (x.height + stride - 1) / stride;
  int ow = (x.width + stride - 1) / stride;
  int P = oh * ow;
  std::vector<double> col;
  im2col_3x3(x, stride, col, oh, ow);
  Tensor y(out_ch, oh, ow);
  for (int o = 0; o < out_ch; ++o)
    std::fill_n(y.data.begin() + size_t(o) * P, P, b[o]);
  gemm_nn(y.data.data(), w.data(), col.data(), out_ch, in_ch * 9, P);
  if (relu)
    for (auto& v : y.data) v = v > 0.0 ? v : 0.0;
  if (cache) {
    cache->input = x;
    cache->output = y;
  }
  return y;
}

Tensor ConvLayer::backward(const Tensor& dout, const Cache& cache) {
  const Tensor& x = cache.input;
  int oh = dout.height, ow = dout.width;
  int P = oh * ow;
  Tensor dy = dout;
  if (relu) {
    for (size_t i = 0; i < dy.data.size(); ++i)
      if (!(cache.output.data[i] > 0.0)) dy.data[i] = 0.0;
  }
  for (int o = 0; o < out_ch; ++o) {
    double acc = 0.0;
    const double* p = dy.data.data() + size_t(o) * P;
    for (int i = 0; i < P; ++i) acc += p[i];
    gb[o] += acc;
  }
  std::vector<double> col;
  im2col_3x3(x, stride, col, oh, ow);
  gemm_nt(gw.data(), dy.data.data(), col.data(), out_ch, P, in_ch * 9);
  std::vector<double> dcol(size_t(in_ch) * 9 * P, 0.0);
  gemm_tn(dcol.data(), w.data(), dy.data.data(), in_ch * 9, out_ch, P);
  Tensor dx(x.channels, x.height, x.width);
  col2im_3x3(dcol, stride, dx, oh, ow);
  return dx;
}

// ---------------------------------------------------------------------------
// TransposedConvLayer

TransposedConvLayer::TransposedConvLayer(int in, int out)
    : in_ch(in), out_ch(out), w(size_t(out) * in * 16, 0.0), b(size_t(out), 0.0),
      gw(w.size(), 0.0), gb(b.size(), 0.0) {}

Tensor TransposedConvLayer::forward(const Tensor& x, Cache* cache) const {
  if (x.channels != in_ch)
    throw Error(ErrorCode::Shape, "transposed conv channel mismatch");
  int oh = 2 * x.height, ow = 2 * x.width;
  Tensor y(out_ch, oh, ow);
  for (int co = 0; co < out_ch; ++co)
    std::fill_n(y.data.begin() + size_t(co) * y.plane(), y.plane(), b[co]);
  for (int ci = 0; ci < in_ch; ++ci)
    for (int iy = 0; iy < x.height; ++iy)
      for (int ix = 0; ix < x.width; ++ix) {
        double v = x.at(ci, iy, ix);
        if (v == 0.0) continue;
        for (int co = 0; co < out_ch; ++co) {
          const double* wk = w.data() + (size_t(co) * in_ch + ci) * 16;
          for (int ky = 0; ky < 4; ++ky) {
            int ty = 2 * iy + ky - 1;  // one-sample crop each side
            if (ty < 0 || ty >= oh) continue;
            for (int kx = 0; kx < 4; ++kx) {
              int tx = 2 * ix + kx - 1;
              if (tx < 0 || tx >= ow) continue;
              y.at(co, ty, tx) += v * wk[ky * 4 + kx];
            }
          }
        }
      }
  if (cache) cache->input = x;
  return y;
}

Tensor TransposedConvLayer::backward(const Tensor& dout, const Cache& cache) {
  const Tensor& x = cache.input;
  int oh = dout.height, ow = dout.width;
  for (int co = 0; co < out_ch; ++co) {
    double acc = 0.0;
    const double* p = dout.data.data() + size_t(co) * dout.plane();
    for (size_t i = 0; i < dout.plane(); ++i) acc += p[i];
    gb[co] += acc;
  }
  Tensor dx(x.channels, x.height, x.width);
  for (int ci = 0; ci < in_ch; ++ci)
    for (int iy = 0; iy < x.height; ++iy)
      for (int ix = 0; ix < x.width; ++ix) {
        double xv = x.at(ci, iy, ix);
        double acc = 0.0;
        for (int co = 0; co < out_ch; ++co) {
          double* gwk = gw.data() + (size_t(co) * in_ch + ci) * 16;
          const double* wk = w.data() + (size_t(co) * in_ch + ci) * 16;
          for (int ky = 0; ky < 4; ++ky) {
            int ty = 2 * iy + ky - 1;
            if (ty < 0 || ty >= oh) continue;
            for (int kx = 0; kx < 4; ++kx) {
              int tx = 2 * ix + kx - 1;
              if (tx < 0 || tx >= ow) continue;
              double dv = dout.at(co, ty, tx);
              gwk[ky * 4 + kx] += xv * dv;
              acc += wk[ky * 4 + kx] * dv;
            }
          }
        }
        dx.at(ci, iy, ix) = acc;
      }
  return dx;
}

// ---------------------------------------------------------------------------
// NonLocalBlock

NonLocalBlock::NonLocalBlock(int channels)
    : ch(channels), embed(channels / 2),
      wt(size_t(embed) * ch, 0.0), bt(size_t(embed), 0.0),
      wp(size_t(embed) * ch, 0.0), bp(size_t(embed), 0.0),
      wg(size_t(embed) * ch, 0.0), bg(size_t(embed), 0.0),
      wh(size_t(ch) * embed, 0.0), bh(size_t(ch), 0.0),
      gwt(wt.size(), 0.0), gbt(bt.size(), 0.0), gwp(wp.size(), 0.0),
      gbp(bp.size(), 0.0), gwg(wg.size(), 0.0), gbg(bg.size(), 0.0),
      gwh(wh.size(), 0.0), gbh(bh.size(), 0.0) {
  if (channels < 2 || channels % 2 != 0)
    throw Error(ErrorCode::Config, "non-local block needs an even channel count");
}

namespace {

// y[E][P] = W[E][C] * x[C][P] + b
void embed_1x1(std::vector<double>& y, const std::vector<double>& w,
               const std::vector<double>& b, const double* x, int E, int C,
               int P) {
  y.assign(size_t(E) * P, 0.0);
  for (int e = 0; e < E; ++e)
    std::fill_n(y.begin() + size_t(e) * P, P, b[e]);
  gemm_nn(y.data(), w.data(), x, E, C, P);
}

}  // namespace

Tensor NonLocalBlock::forward(const Tensor& fs, const Tensor& fc,
                              Cache* cache) const {
  if (fs.channels != ch || fc.channels != ch)
    throw Error(ErrorCode::Shape, "non-local block channel mismatch");
  int ps = fs.height * fs.width;
  int pc = fc.height * fc.width;

  std::vector<double> t, p, g;
  embed_1x1(t, wt, bt, fs.data.data(), embed, ch, ps);
  embed_1x1(p, wp, bp, fc.data.data(), embed, ch, pc);
  embed_1x1(g, wg, bg, fc.data.data(), embed, ch, pc);

  // logits[x][y] = t(:,x) . p(:,y), then a stable row softmax
  std::vector<double> attw(size_t(ps) * pc, 0.0);
  gemm_tn(attw.data(), t.data(), p.data(), ps, embed, pc);
  for (int x = 0; x < ps; ++x) {
    double* row = attw.data() + size_t(x) * pc;
    double mx = row[0];
    for (int y = 1; y < pc; ++y) mx = std::max(mx, row[y]);
    double sum = 0.0;
    for (int y = 0; y < pc; ++y) {
      row[y] = std::exp(row[y] - mx);
      sum += row[y];
    }
    for (int y = 0; y < pc; ++y) row[y] /= sum;
  }

  // att[x][e] = sum_y attw[x][y] g[e][y]
  std::vector<double> att(size_t(ps) * embed, 0.0);
  gemm_nt(att.data(), attw.data(), g.data(), ps, pc, embed);

  Tensor out = fs;
  for (int c = 0; c < ch; ++c) {
    double* oc = out.data.data() + size_t(c) * ps;
    const double* whc = wh.data() + size_t(c) * embed;
    for (int x = 0; x < ps; ++x) {
      const double* ax = att.data() + size_t(x) * embed;
      double acc = bh[c];
      for (int e = 0; e < embed; ++e) acc += whc[e] * ax[e];
      oc[x] += acc;
    }
  }

  if (cache) {
    cache->ps = ps;
    cache->pc = pc;
    cache->fs = fs;
    cache->fc = fc;
    cache->t = std::move(t);
    cache->p = std::move(p);
    cache->g = std::move(g);
    cache->attw = std::move(attw);
    cache->att = std::move(att);
  }
  return out;
}

Tensor NonLocalBlock::backward(const Tensor& dout, const Cache& cache,
                               Tensor* dfc) {
  int ps = cache.ps, pc = cache.pc;
  const Tensor& fs = cache.fs;
  const Tensor& fc = cache.fc;

  // residual
  Tensor dfs = dout;
  *dfc = Tensor(fc.channels, fc.height, fc.width);

  // h: out_x += wh * att_x + bh
  for (int c = 0; c < ch; ++c) {
    double acc = 0.0;
    const double* dc = dout.data.data() + size_t(c) * ps;
    for (int x = 0; x < ps; ++x) acc += dc[x];
    gbh[c] += acc;
  }
  // gwh[c][e] += sum_x dout[c][x] att[x][e]
  gemm_nn(gwh.data(), dout.data.data(), cache.att.data(), ch, ps, embed);
  // datt[x][e] = sum_c dout[c][x] wh[c][e]
  std::vector<double> datt(size_t(ps) * embed, 0.0);
  gemm_tn(datt.data(), dout.data.data(), wh.data(), ps, ch, embed);

  // dattw[x][y] = sum_e datt[x][e] g[e][y]
  std::vector<double> dattw(size_t(ps) * pc, 0.0);
  gemm_nn(dattw.data(), datt.data(), cache.g.data(), ps, embed, pc);
  // dg[e][y] = sum_x att_w[x][y] datt[x][e]
  std::vector<double> dg(size_t(embed) * pc, 0.0);
  gemm_tn(dg.data(), datt.data(), cache.attw.data(), embed, ps, pc);

  // softmax backward, row-wise
  std::vector<double> dlogit(size_t(ps) * pc);
  for (int x = 0; x < ps; ++x) {
    const double* a = cache.attw.data() + size_t(x) * pc;
    const double* da = dattw.data() + size_t(x) * pc;
    double dot = 0.0;
    for (int y = 0; y < pc; ++y) dot += a[y] * da[y];
    double* dl = dlogit.data() + size_t(x) * pc;
    for (int y = 0; y < pc; ++y) dl[y] = a[y] * (da[y] - dot);
  }

  // dt[e][x] = sum_y dlogit[x][y] p[e][y];  dp[e][y] = sum_x dlogit[x][y] t[e][x]
  std::vector<double> dt(size_t(embed) * ps, 0.0);
  gemm_nt(dt.data(), cache.p.data(), dlogit.data(), embed, pc, ps);
  std::vector<double> dp(size_t(embed) * pc, 0.0);
  gemm_nn(dp.data(), cache.t.data(), dlogit.data(), embed, ps, pc);

  auto backprop_embed = [](const std::vector<double>& dy, const Tensor& x,
                           const std::vector<double>& w, std::vector<double>& gw,
                           std::vector<double>& gb, Tensor& dx, int E, int C,
                           int P) {
    for (int e = 0; e < E; ++e) {
      double acc = 0.0;
      const double* d = dy.data() + size_t(e) * P;
      for (int i = 0; i < P; ++i) acc += d[i];
      gb[e] += acc;
    }
    gemm_nt(gw.data(), dy.data(), x.data.data(), E, P, C);
    gemm_tn(dx.data.data(), w.data(), dy.data(), C, E, P);
  };

  backprop_embed(dt, fs, wt, gwt, gbt, dfs, embed, ch, ps);
  backprop_embed(dp, fc, wp, gwp, gbp, *dfc, embed, ch, pc);
  backprop_embed(dg, fc, wg, gwg, gbg, *dfc, embed, ch, pc);
  return dfs;
}

// ---------------------------------------------------------------------------
// RzsrNetwork

RzsrNetwork::RzsrNetwork(const NetConfig& cfg) : cfg_(cfg) {
  int c = cfg.channels;
  if (c < 2 || c % 2 != 0)
    throw Error(ErrorCode::Config, "network channels must be even and >= 2");
  ext_.emplace_back(3, c, 1, true);
  for (int i = 1; i < 5; ++i) ext_.emplace_back(c, c, 1, true);
  for (int i = 5; i < 8; ++i) ext_.emplace_back(c, c, 2, true);
  int nl_count = cfg.mode == NetMode::SingleScale ? 1 : 3;
  for (int i = 0; i < nl_count; ++i) nl_.emplace_back(c);
  tc1_ = TransposedConvLayer(c, c);
  tc2_ = TransposedConvLayer(c, c);
  tc3_ = TransposedConvLayer(c, c);
  head1_ = ConvLayer(c, c, 1, true);
  head2_ = ConvLayer(c, 3, 1, false);
  init_default();
}

void RzsrNetwork::run_extractor_(const Tensor& x,
                                 std::vector<ConvLayer::Cache>* caches,
                                 Tensor* tap_half, Tensor* tap_quarter,
                                 Tensor* tap_eighth) const {
  if (caches) caches->resize(8);
  Tensor cur = x;
  for (int i = 0; i < 8; ++i) {
    cur = ext_[i].forward(cur, caches ? &(*caches)[i] : nullptr);
    if (i == 5) *tap_half = cur;
    if (i == 6) *tap_quarter = cur;
  }
  *tap_eighth = cur;
}

Tensor RzsrNetwork::forward(const Tensor& son_up, const Tensor* cousin,
                            Cache* cache) const {
  if (son_up.channels != 3)
    throw Error(ErrorCode::Shape, "network input must have 3 channels");
  if (son_up.height % 8 != 0 || son_up.width % 8 != 0)
    throw Error(ErrorCode::Shape,
                "network input dims must be divisible by 8 (use patch sides "
                "divisible by 4)");
  bool wants_cousin = cfg_.mode != NetMode::ReferenceFree;
  if (!wants_cousin && cousin)
    throw Error(ErrorCode::Config,
                "reference-free mode takes no cousin input");
  if (wants_cousin && !cousin)
    throw Error(ErrorCode::Config, "mode requires a cousin input");
  if (cousin && !son_up.same_shape(*cousin))
    throw Error(ErrorCode::Shape, "son and cousin spatial sizes differ");

  Tensor s_half, s_quarter, s_eighth;
  run_extractor_(son_up, cache ? &cache->son_ext : nullptr, &s_half, &s_quarter,
                 &s_eighth);
  Tensor c_half, c_quarter, c_eighth;
  if (cousin)
    run_extractor_(*cousin, cache ? &cache->cousin_ext : nullptr, &c_half,
                   &c_quarter, &c_eighth);
  if (cache) {
    cache->has_cousin = cousin != nullptr;
    cache->out_h = son_up.height;
    cache->out_w = son_up.width;
  }

  const Tensor& kv1 = cousin ? c_eighth : s_eighth;
  Tensor x = nl_[0].forward(s_eighth, kv1, cache ? &cache->nl1 : nullptr);
  x = tc1_.forward(x, cache ? &cache->tc1 : nullptr);
  if (cfg_.mode != NetMode::SingleScale) {
    const Tensor& kv2 = cousin ? c_quarter : x;
    x = nl_[1].forward(x, kv2, cache ? &cache->nl2 : nullptr);
  }
  x = tc2_.forward(x, cache ? &cache->tc2 : nullptr);
  if (cfg_.mode != NetMode::SingleScale) {
    const Tensor& kv3 = cousin ? c_half : x;
    x = nl_[2].forward(x, kv3, cache ? &cache->nl3 : nullptr);
  }
  x = tc3_.forward(x, cache ? &cache->tc3 : nullptr);
  x = head1_.forward(x, cache ? &cache->head1 : nullptr);
  x = head2_.forward(x, cache ? &cache->head2 : nullptr);

  // global residual: the network only learns the correction
  for (size_t i = 0; i < x.data.size(); ++i) x.data[i] += son_up.data[i];
  return x;
}

void RzsrNetwork::backward(const Tensor& dout, Cache& cache) {
  Tensor d = head2_.backward(dout, cache.head2);
  d = head1_.backward(d, cache.head1);
  d = tc3_.backward(d, cache.tc3);

  Tensor d_c_half, d_c_quarter, d_c_eighth;  // cousin tap gradients
  if (cfg_.mode != NetMode::SingleScale) {
    Tensor dkv;
    d = nl_[2].backward(d, cache.nl3, &dkv);
    if (cache.has_cousin)
      d_c_half = std::move(dkv);
    else
      for (size_t i = 0; i < d.data.size(); ++i) d.data[i] += dkv.data[i];
  }
  d = tc2_.backward(d, cache.tc2);
  if (cfg_.mode != NetMode::SingleScale) {
    Tensor dkv;
    d = nl_[1].backward(d, cache.nl2, &dkv);
    if (cache.has_cousin)
      d_c_quarter = std::move(dkv);
    else
      for (size_t i = 0; i < d.data.size(); ++i) d.data[i] += dkv.data[i];
  }
  d = tc1_.backward(d, cache.tc1);
  {
    Tensor dkv;
    d = nl_[0].backward(d, cache.nl1, &dkv);
    if (cache.has_cousin)
      d_c_eighth = std::move(dkv);
    else
      for (size_t i = 0; i < d.data.size(); ++i) d.data[i] += dkv.data[i];
  }

  // son branch: only the 1/8 tap feeds the pyramid
  for (int i = 7; i >= 0; --i) d = ext_[i].backward(d, cache.son_ext[i]);

  if (cache.has_cousin) {
    Tensor dc = std::move(d_c_eighth);
    dc = ext_[7].backward(dc, cache.cousin_ext[7]);
    if (d_c_quarter.size())
      for (size_t i = 0; i < dc.data.size(); ++i) dc.data[i] += d_c_quarter.data[i];
    dc = ext_[6].backward(dc, cache.cousin_ext[6]);
    if (d_c_half.size())
      for (size_t i = 0; i < dc.data.size(); ++i) dc.data[i] += d_c_half.data[i];
    for (int i = 5; i >= 0; --i) dc = ext_[i].backward(dc, cache.cousin_ext[i]);
  }
}

std::vector<ParamView> RzsrNetwork::param_views_() {
  std::vector<ParamView> out;
  auto add = [&](std::vector<double>& v, std::vector<double>& g) {
    out.push_back({v.data(), g.data(), v.size()});
  };
  for (auto& l : ext_) {
    add(l.w, l.gw);
    add(l.b, l.gb);
  }
  for (auto& n : nl_) {
    add(n.wt, n.gwt);
    add(n.bt, n.gbt);
    add(n.wp, n.gwp);
    add(n.bp, n.gbp);
    add(n.wg, n.gwg);
    add(n.bg, n.gbg);
    add(n.wh, n.gwh);
    add(n.bh, n.gbh);
  }
  for (auto* t : {&tc1_, &tc2_, &tc3_}) {
    add(t->w, t->gw);
    add(t->b, t->gb);
  }
  add(head1_.w, head1_.gw);
  add(head1_.b, head1_.gb);
  add(head2_.w, head2_.gw);
  add(head2_.b, head2_.gb);
  return out;
}

std::vector<ParamView> RzsrNetwork::params() { return param_views_(); }

size_t RzsrNetwork::param_count() const {
  size_t n = 0;
  for (const auto& blob : param_blobs_()) n += blob.second;
  return n;
}

std::vector<std::pair<const double*, size_t>> RzsrNetwork::param_blobs_() const {
  auto views = const_cast<RzsrNetwork*>(this)->param_views_();
  std::vector<std::pair<const double*, size_t>> out;
  out.reserve(views.size());
  for (const auto& v : views) out.emplace_back(v.value, v.count);
  return out;
}

void RzsrNetwork::zero_grad() {
  for (auto& v : param_views_()) std::fill_n(v.grad, v.count, 0.0);
}

namespace {

void he_fill(std::vector<double>& w, size_t fan_in, Rng& rng) {
  double s = std::sqrt(2.0 / double(fan_in));
  for (auto& v : w) v = s * rng.normal();
}

}  // namespace

void RzsrNetwork::init_default() {
  Rng rng(cfg_.seed);
  for (auto& l : ext_) {
    he_fill(l.w, size_t(l.in_ch) * 9, rng);
    std::fill(l.b.begin(), l.b.end(), 0.0);
  }
  for (auto& n : nl_) {
    he_fill(n.wt, size_t(n.ch), rng);
    he_fill(n.wp, size_t(n.ch), rng);
    he_fill(n.wg, size_t(n.ch), rng);
    he_fill(n.wh, size_t(n.embed), rng);
    std::fill(n.bt.begin(), n.bt.end(), 0.0);
    std::fill(n.bp.begin(), n.bp.end(), 0.0);
    std::fill(n.bg.begin(), n.bg.end(), 0.0);
    std::fill(n.bh.begin(), n.bh.end(), 0.0);
  }
  for (auto* t : {&tc1_, &tc2_, &tc3_}) {
    he_fill(t->w, size_t(t->in_ch) * 16, rng);
    std::fill(t->b.begin(), t->b.end(), 0.0);
  }
  he_fill(head1_.w, size_t(head1_.in_ch) * 9, rng);
  std::fill(head1_.b.begin(), head1_.b.end(), 0.0);
  // zero head: the untrained network reproduces the bicubic residual input
  std::fill(head2_.w.begin(), head2_.w.end(), 0.0);
  std::fill(head2_.b.begin(), head2_.b.end(), 0.0);
}

void RzsrNetwork::init_all_random(uint64_t seed) {
  init_default();
  Rng rng(seed ^ 0x5bd1e995u);
  he_fill(head2_.w, size_t(head2_.in_ch) * 9, rng);
  for (auto& v : head2_.b) v = 0.01 * rng.normal();
}

void RzsrNetwork::save_checkpoint(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot write checkpoint: " + path);
  f.write("RZNW", 4);
  uint16_t version = 1;
  uint8_t mode = uint8_t(cfg_.mode);
  uint16_t channels = uint16_t(cfg_.channels);
  f.write(reinterpret_cast<const char*>(&version), 2);
  f.write(reinterpret_cast<const char*>(&mode), 1);
  f.write(reinterpret_cast<const char*>(&channels), 2);
  for (const auto& [ptr, count] : param_blobs_()) {
    std::vector<float> raw(count);
    for (size_t i = 0; i < count; ++i) raw[i] = float(ptr[i]);
    f.write(reinterpret_cast<const char*>(raw.data()),
            std::streamsize(count * sizeof(float)));
  }
}

void RzsrNetwork::load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot open checkpoint: " + path);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, "RZNW", 4) != 0)
    throw Error(ErrorCode::Format, "not a RZNW checkpoint: " + path);
  uint16_t version = 0, channels = 0;
  uint8_t mode = 0;
  f.read(reinterpret_cast<char*>(&version), 2);
  f.read(reinterpret_cast<char*>(&mode), 1);
  f.read(reinterpret_cast<char*>(&channels), 2);
  if (!f || version != 1)
    throw Error(ErrorCode::Format, "unsupported checkpoint version");
  if (NetMode(mode) != cfg_.mode || channels != cfg_.channels)
    throw Error(ErrorCode::Config,
                "checkpoint mode/channels do not match this network");
  for (auto& v : param_views_()) {
    std::vector<float> raw(v.count);
    f.read(reinterpret_cast<char*>(raw.data()),
           std::streamsize(v.count * sizeof(float)));
    if (!f) throw Error(ErrorCode::Format, "truncated checkpoint: " + path);
    for (size_t i = 0; i < v.count; ++i) v.value[i] = raw[i];
  }
}

// ---------------------------------------------------------------------------
// Adam

void AdamState::init(const std::vector<ParamView>& params) {
  step = 0;
  m.clear();
  v.clear();
  for (const auto& p : params) {
    m.emplace_back(p.count, 0.0);
    v.emplace_back(p.count, 0.0);
  }
}

void AdamState::update(std::vector<ParamView>& params, double lr) {
  if (m.size() != params.size())
    throw Error(ErrorCode::Config, "Adam state does not match parameter set");
  ++step;
  double bc1 = 1.0 - std::pow(beta1, double(step));
  double bc2 = 1.0 - std::pow(beta2, double(step));
  for (size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i];
    for (size_t j = 0; j < p.count; ++j) {
      double g = p.grad[j];
      m[i][j] = beta1 * m[i][j] + (1.0 - beta1) * g;
      v[i][j] = beta2 * v[i][j] + (1.0 - beta2) * g * g;
      double mhat = m[i][j] / bc1;
      double vhat = v[i][j] / bc2;
      p.value[j] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

}  // namespace rzsr
