// Copyright 2026 The ZO-Forge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "zoforge/models/transformer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "zoforge/rng.hpp"

namespace zoforge {
namespace {

constexpr double kLnEps = 1e-5;
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * kInvSqrt2)); }

double gelu_derivative(double x) {
  return 0.5 * (1.0 + std::erf(x * kInvSqrt2)) +
         x * kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double log_sum_exp(std::span<const double> logits) {
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  double acc = 0.0;
  for (double v : logits) acc += std::exp(v - max_logit);
  return max_logit + std::log(acc);
}

// theta-relative offsets of one block's parameters.
struct BlockOffsets {
  std::size_t ln1_g, ln1_b;
  std::size_t wq, bq, wk, bk, wv, bv, wo, bo;
  std::size_t ln2_g, ln2_b;
  std::size_t w1, b1, w2, b2;
};

BlockOffsets block_offsets(std::size_t base, std::size_t m) {
  BlockOffsets o;
  const std::size_t ff = TransformerLoss::kFfExpansion * m;
  std::size_t at = base;
  o.ln1_g = at; at += m;
  o.ln1_b = at; at += m;
  o.wq = at; at += m * m;
  o.bq = at; at += m;
  o.wk = at; at += m * m;
  o.bk = at; at += m;
  o.wv = at; at += m * m;
  o.bv = at; at += m;
  o.wo = at; at += m * m;
  o.bo = at; at += m;
  o.ln2_g = at; at += m;
  o.ln2_b = at; at += m;
  o.w1 = at; at += ff * m;
  o.b1 = at; at += ff;
  o.w2 = at; at += m * ff;
  o.b2 = at; at += m;
  return o;
}

// y = W x + b, W row-major (rows x cols).
void linear(const double* w, const double* b, const double* x, double* y,
            std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = b[r];
    const double* wr = w + r * cols;
    for (std::size_t c = 0; c < cols; ++c) acc += wr[c] * x[c];
    y[r] = acc;
  }
}

void layer_norm(const double* x, const double* gamma, const double* beta,
                std::size_t m, double* xhat, double* y, double& inv_std) {
  double mean = 0.0;
  for (std::size_t i = 0; i < m; ++i) mean += x[i];
  mean /= static_cast<double>(m);
  double var = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double c = x[i] - mean;
    var += c * c;
  }
  var /= static_cast<double>(m);
  inv_std = 1.0 / std::sqrt(var + kLnEps);
  for (std::size_t i = 0; i < m; ++i) {
    xhat[i] = (x[i] - mean) * inv_std;
    y[i] = gamma[i] * xhat[i] + beta[i];
  }
}

// dx from upstream dy through layer norm, given cached xhat and inv_std.
void layer_norm_backward(const double* dy, const double* gamma,
                         const double* xhat, double inv_std, std::size_t m,
                         double* dgamma, double* dbeta, double* dx) {
  double mean_dxhat = 0.0;
  double mean_dxhat_xhat = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dxhat = dy[i] * gamma[i];
    mean_dxhat += dxhat;
    mean_dxhat_xhat += dxhat * xhat[i];
    dgamma[i] += dy[i] * xhat[i];
    dbeta[i] += dy[i];
  }
  mean_dxhat /= static_cast<double>(m);
  mean_dxhat_xhat /= static_cast<double>(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double dxhat = dy[i] * gamma[i];
    dx[i] = inv_std * (dxhat - mean_dxhat - xhat[i] * mean_dxhat_xhat);
  }
}

int token_id(double v, std::size_t vocab) {
  const long long raw = static_cast<long long>(v);
  const long long mod = static_cast<long long>(vocab);
  return static_cast<int>(((raw % mod) + mod) % mod);
}

}  // namespace

// Reusable per-evaluate buffers; sized once for the model.
struct TransformerLoss::Scratch {
  std::vector<double> x;        // S x m, running stream
  std::vector<double> xhat;     // S x m
  std::vector<double> hn;       // S x m
  std::vector<double> q, k, v;  // S x m each
  std::vector<double> probs;    // heads x S x S
  std::vector<double> ao;       // S x m
  std::vector<double> u;        // S x ff
  std::vector<double> act;      // S x ff
  std::vector<double> inv_std;  // S
  std::vector<double> pooled;   // m
  std::vector<double> logits;   // classes

  Scratch(std::size_t s, std::size_t m, std::size_t classes) {
    const std::size_t ff = kFfExpansion * m;
    x.resize(s * m);
    xhat.resize(s * m);
    hn.resize(s * m);
    q.resize(s * m);
    k.resize(s * m);
    v.resize(s * m);
    probs.resize(kNumHeads * s * s);
    ao.resize(s * m);
    u.resize(s * ff);
    act.resize(s * ff);
    inv_std.resize(s);
    pooled.resize(m);
    logits.resize(classes);
  }
};

// Full activation record of one sample, for backprop.
struct TransformerLoss::Cache {
  struct PerBlock {
    std::vector<double> x_in;     // S x m
    std::vector<double> xhat1;    // S x m
    std::vector<double> inv_std1; // S
    std::vector<double> hn1;      // S x m
    std::vector<double> q, k, v;  // S x m
    std::vector<double> probs;    // heads x S x S
    std::vector<double> ao;       // S x m
    std::vector<double> x_mid;    // S x m
    std::vector<double> xhat2;    // S x m
    std::vector<double> inv_std2; // S
    std::vector<double> hn2;      // S x m
    std::vector<double> u;        // S x ff
    std::vector<double> act;      // S x ff
  };
  std::vector<int> tokens;
  std::vector<PerBlock> per_block;
  std::vector<double> x_final;  // S x m
  std::vector<double> pooled;   // m
  std::vector<double> logits;   // classes
};

TransformerLoss::TransformerLoss(std::size_t vocab, std::size_t seq_len,
                                 std::size_t dim, std::size_t blocks,
                                 std::size_t num_classes, std::uint64_t seed)
    : LossFunction("transformer",
                   [&] {
                     if (vocab == 0 || seq_len == 0 || dim == 0 ||
                         num_classes == 0) {
                       throw std::invalid_argument(
                           "make_tiny_transformer: sizes must be >= 1");
                     }
                     if (dim % kNumHeads != 0) {
                       throw std::invalid_argument(
                           "make_tiny_transformer: dim must be divisible by "
                           "the head count");
                     }
                     const std::size_t embed = vocab * dim + seq_len * dim;
                     const std::size_t head = num_classes * dim + num_classes;
                     const std::size_t block = block_param_count(dim);
                     std::vector<IndexRange> layers;
                     for (std::size_t b = 0; b < blocks; ++b) {
                       layers.push_back({embed + b * block, block});
                     }
                     return LayerPartition(
                         {{0, embed}, {embed + blocks * block, head}},
                         std::move(layers));
                   }()),
      vocab_(vocab),
      seq_len_(seq_len),
      dim_(dim),
      blocks_(blocks),
      num_classes_(num_classes),
      seed_(seed) {}

void TransformerLoss::forward_sample(const ParameterVector& params,
                                     std::span<const double> tokens,
                                     int label, Scratch& s, Cache* cache,
                                     double& loss_out,
                                     std::size_t& pred_out) const {
  const double* theta = params.data();
  const std::size_t m = dim_;
  const std::size_t S = seq_len_;
  const std::size_t ff = kFfExpansion * m;
  const std::size_t head_dim = m / kNumHeads;
  const double attn_scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
  const std::size_t embed = vocab_ * m + S * m;
  const std::size_t pos_base = vocab_ * m;
  const std::size_t head_base = embed + blocks_ * block_param_count(m);

  if (cache) {
    cache->tokens.resize(S);
    cache->per_block.resize(blocks_);
  }

  // Embedding lookup plus learned positions.
  for (std::size_t t = 0; t < S; ++t) {
    const int tok = token_id(tokens[t], vocab_);
    if (cache) cache->tokens[t] = tok;
    const double* te = theta + static_cast<std::size_t>(tok) * m;
    const double* pe = theta + pos_base + t * m;
    double* xt = s.x.data() + t * m;
    for (std::size_t i = 0; i < m; ++i) xt[i] = te[i] + pe[i];
  }

  for (std::size_t b = 0; b < blocks_; ++b) {
    const BlockOffsets o = block_offsets(embed + b * block_param_count(m), m);
    Cache::PerBlock* cb = cache ? &cache->per_block[b] : nullptr;
    if (cb) cb->x_in = s.x;

    // Pre-norm attention.
    for (std::size_t t = 0; t < S; ++t) {
      layer_norm(s.x.data() + t * m, theta + o.ln1_g, theta + o.ln1_b, m,
                 s.xhat.data() + t * m, s.hn.data() + t * m, s.inv_std[t]);
    }
    if (cb) {
      cb->xhat1 = s.xhat;
      cb->inv_std1 = s.inv_std;
      cb->hn1 = s.hn;
    }
    for (std::size_t t = 0; t < S; ++t) {
      const double* hn_t = s.hn.data() + t * m;
      linear(theta + o.wq, theta + o.bq, hn_t, s.q.data() + t * m, m, m);
      linear(theta + o.wk, theta + o.bk, hn_t, s.k.data() + t * m, m, m);
      linear(theta + o.wv, theta + o.bv, hn_t, s.v.data() + t * m, m, m);
    }
    for (std::size_t h = 0; h < kNumHeads; ++h) {
      const std::size_t hoff = h * head_dim;
      double* probs_h = s.probs.data() + h * S * S;
      for (std::size_t i = 0; i < S; ++i) {
        double* row = probs_h + i * S;
        const double* qi = s.q.data() + i * m + hoff;
        double max_score = -1e300;
        for (std::size_t j = 0; j < S; ++j) {
          const double* kj = s.k.data() + j * m + hoff;
          double score = 0.0;
          for (std::size_t c = 0; c < head_dim; ++c) score += qi[c] * kj[c];
          row[j] = score * attn_scale;
          max_score = std::max(max_score, row[j]);
        }
        double denom = 0.0;
        for (std::size_t j = 0; j < S; ++j) {
          row[j] = std::exp(row[j] - max_score);
          denom += row[j];
        }
        const double inv = 1.0 / denom;
        for (std::size_t j = 0; j < S; ++j) row[j] *= inv;

        double* ao_i = s.ao.data() + i * m + hoff;
        for (std::size_t c = 0; c < head_dim; ++c) ao_i[c] = 0.0;
        for (std::size_t j = 0; j < S; ++j) {
          const double p = row[j];
          const double* vj = s.v.data() + j * m + hoff;
          for (std::size_t c = 0; c < head_dim; ++c) ao_i[c] += p * vj[c];
        }
      }
    }
    if (cb) {
      cb->q = s.q;
      cb->k = s.k;
      cb->v = s.v;
      cb->probs = s.probs;
      cb->ao = s.ao;
    }
    for (std::size_t t = 0; t < S; ++t) {
      double* xt = s.x.data() + t * m;
      const double* ao_t = s.ao.data() + t * m;
      for (std::size_t r = 0; r < m; ++r) {
        double acc = theta[o.bo + r];
        const double* wr = theta + o.wo + r * m;
        for (std::size_t c = 0; c < m; ++c) acc += wr[c] * ao_t[c];
        xt[r] += acc;
      }
    }
    if (cb) cb->x_mid = s.x;

    // Pre-norm feed-forward.
    for (std::size_t t = 0; t < S; ++t) {
      layer_norm(s.x.data() + t * m, theta + o.ln2_g, theta + o.ln2_b, m,
                 s.xhat.data() + t * m, s.hn.data() + t * m, s.inv_std[t]);
    }
    if (cb) {
      cb->xhat2 = s.xhat;
      cb->inv_std2 = s.inv_std;
      cb->hn2 = s.hn;
    }
    for (std::size_t t = 0; t < S; ++t) {
      linear(theta + o.w1, theta + o.b1, s.hn.data() + t * m,
             s.u.data() + t * ff, ff, m);
      double* ut = s.u.data() + t * ff;
      double* at = s.act.data() + t * ff;
      for (std::size_t i = 0; i < ff; ++i) at[i] = gelu(ut[i]);
    }
    if (cb) {
      cb->u = s.u;
      cb->act = s.act;
    }
    for (std::size_t t = 0; t < S; ++t) {
      double* xt = s.x.data() + t * m;
      const double* at = s.act.data() + t * ff;
      for (std::size_t r = 0; r < m; ++r) {
        double acc = theta[o.b2 + r];
        const double* wr = theta + o.w2 + r * ff;
        for (std::size_t c = 0; c < ff; ++c) acc += wr[c] * at[c];
        xt[r] += acc;
      }
    }
  }

  // Mean pool over positions, then the classification head.
  const double inv_s = 1.0 / static_cast<double>(S);
  for (std::size_t i = 0; i < m; ++i) {
    double acc = 0.0;
    for (std::size_t t = 0; t < S; ++t) acc += s.x[t * m + i];
    s.pooled[i] = acc * inv_s;
  }
  linear(theta + head_base, theta + head_base + num_classes_ * m,
         s.pooled.data(), s.logits.data(), num_classes_, m);

  if (cache) {
    cache->x_final = s.x;
    cache->pooled = s.pooled;
    cache->logits.assign(s.logits.begin(), s.logits.end());
  }

  const double lse = log_sum_exp(s.logits);
  loss_out = lse - s.logits[static_cast<std::size_t>(label)];
  pred_out = static_cast<std::size_t>(
      std::max_element(s.logits.begin(), s.logits.end()) - s.logits.begin());
}

double TransformerLoss::evaluate(const ParameterVector& params,
                                 const Batch& batch) const {
  batch.validate();
  if (batch.feature_dim != seq_len_) {
    throw std::invalid_argument("transformer: batch feature_dim != seq_len");
  }
  Scratch scratch(seq_len_, dim_, num_classes_);
  double total = 0.0;
  for (std::size_t r = 0; r < batch.rows; ++r) {
    const int label = batch.labels[r];
    if (label < 0 || static_cast<std::size_t>(label) >= num_classes_) {
      throw std::invalid_argument("transformer: label out of range");
    }
    double loss = 0.0;
    std::size_t pred = 0;
    forward_sample(params, batch.row(r), label, scratch, nullptr, loss, pred);
    total += loss;
  }
  return total / static_cast<double>(batch.rows);
}

double TransformerLoss::accuracy(const ParameterVector& params,
                                 const Batch& batch) const {
  batch.validate();
  Scratch scratch(seq_len_, dim_, num_classes_);
  std::size_t correct = 0;
  for (std::size_t r = 0; r < batch.rows; ++r) {
    double loss = 0.0;
    std::size_t pred = 0;
    forward_sample(params, batch.row(r), batch.labels[r], scratch, nullptr,
                   loss, pred);
    if (pred == static_cast<std::size_t>(batch.labels[r])) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(batch.rows);
}

void TransformerLoss::backward_sample(const ParameterVector& params,
                                      const Cache& cache, int label,
                                      double inv_rows,
                                      std::vector<double>& grad) const {
  const double* theta = params.data();
  const std::size_t m = dim_;
  const std::size_t S = seq_len_;
  const std::size_t ff = kFfExpansion * m;
  const std::size_t head_dim = m / kNumHeads;
  const double attn_scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
  const std::size_t embed = vocab_ * m + S * m;
  const std::size_t pos_base = vocab_ * m;
  const std::size_t head_base = embed + blocks_ * block_param_count(m);

  // Head and pooling.
  std::vector<double> dlogits(num_classes_);
  const double lse = log_sum_exp(cache.logits);
  for (std::size_t c = 0; c < num_classes_; ++c) {
    dlogits[c] = std::exp(cache.logits[c] - lse) * inv_rows;
  }
  dlogits[static_cast<std::size_t>(label)] -= inv_rows;

  std::vector<double> dpooled(m, 0.0);
  for (std::size_t c = 0; c < num_classes_; ++c) {
    grad[head_base + num_classes_ * m + c] += dlogits[c];
    const double* w = theta + head_base + c * m;
    double* gw = grad.data() + head_base + c * m;
    for (std::size_t i = 0; i < m; ++i) {
      gw[i] += dlogits[c] * cache.pooled[i];
      dpooled[i] += dlogits[c] * w[i];
    }
  }

  std::vector<double> dx(S * m);
  const double inv_s = 1.0 / static_cast<double>(S);
  for (std::size_t t = 0; t < S; ++t) {
    for (std::size_t i = 0; i < m; ++i) dx[t * m + i] = dpooled[i] * inv_s;
  }

  std::vector<double> dhn(S * m);
  std::vector<double> du(S * ff);
  std::vector<double> dao(S * m);
  std::vector<double> dq(S * m), dk(S * m), dv(S * m);

  for (std::size_t b = blocks_; b-- > 0;) {
    const BlockOffsets o = block_offsets(embed + b * block_param_count(m), m);
    const Cache::PerBlock& cb = cache.per_block[b];

    // Feed-forward sublayer: x_out = x_mid + W2 gelu(W1 hn2 + b1) + b2.
    std::fill(dhn.begin(), dhn.end(), 0.0);
    for (std::size_t t = 0; t < S; ++t) {
      const double* dxt = dx.data() + t * m;
      const double* at = cb.act.data() + t * ff;
      double* dut = du.data() + t * ff;
      std::fill(dut, dut + ff, 0.0);
      for (std::size_t r = 0; r < m; ++r) {
        const double g = dxt[r];
        grad[o.b2 + r] += g;
        const double* wr = theta + o.w2 + r * ff;
        double* gwr = grad.data() + o.w2 + r * ff;
        for (std::size_t c = 0; c < ff; ++c) {
          gwr[c] += g * at[c];
          dut[c] += g * wr[c];
        }
      }
      const double* ut = cb.u.data() + t * ff;
      for (std::size_t c = 0; c < ff; ++c) dut[c] *= gelu_derivative(ut[c]);

      const double* hn2_t = cb.hn2.data() + t * m;
      double* dhn_t = dhn.data() + t * m;
      for (std::size_t r = 0; r < ff; ++r) {
        const double g = dut[r];
        grad[o.b1 + r] += g;
        const double* wr = theta + o.w1 + r * m;
        double* gwr = grad.data() + o.w1 + r * m;
        for (std::size_t c = 0; c < m; ++c) {
          gwr[c] += g * hn2_t[c];
          dhn_t[c] += g * wr[c];
        }
      }
    }
    // Through ln2 into x_mid (residual adds dx through unchanged).
    for (std::size_t t = 0; t < S; ++t) {
      std::vector<double> dx_ln(m);
      layer_norm_backward(dhn.data() + t * m, theta + o.ln2_g,
                          cb.xhat2.data() + t * m, cb.inv_std2[t], m,
                          grad.data() + o.ln2_g, grad.data() + o.ln2_b,
                          dx_ln.data());
      double* dxt = dx.data() + t * m;
      for (std::size_t i = 0; i < m; ++i) dxt[i] += dx_ln[i];
    }

    // Attention sublayer: x_mid = x_in + Wo ao + bo.
    std::fill(dao.begin(), dao.end(), 0.0);
    for (std::size_t t = 0; t < S; ++t) {
      const double* dxt = dx.data() + t * m;
      const double* ao_t = cb.ao.data() + t * m;
      double* dao_t = dao.data() + t * m;
      for (std::size_t r = 0; r < m; ++r) {
        const double g = dxt[r];
        grad[o.bo + r] += g;
        const double* wr = theta + o.wo + r * m;
        double* gwr = grad.data() + o.wo + r * m;
        for (std::size_t c = 0; c < m; ++c) {
          gwr[c] += g * ao_t[c];
          dao_t[c] += g * wr[c];
        }
      }
    }

    std::fill(dq.begin(), dq.end(), 0.0);
    std::fill(dk.begin(), dk.end(), 0.0);
    std::fill(dv.begin(), dv.end(), 0.0);
    for (std::size_t h = 0; h < kNumHeads; ++h) {
      const std::size_t hoff = h * head_dim;
      const double* probs_h = cb.probs.data() + h * S * S;
      for (std::size_t i = 0; i < S; ++i) {
        const double* row = probs_h + i * S;
        const double* dao_i = dao.data() + i * m + hoff;

        // dp and the softmax Jacobian.
        double dot = 0.0;
        std::vector<double> dp(S);
        for (std::size_t j = 0; j < S; ++j) {
          const double* vj = cb.v.data() + j * m + hoff;
          double acc = 0.0;
          for (std::size_t c = 0; c < head_dim; ++c) acc += dao_i[c] * vj[c];
          dp[j] = acc;
          dot += row[j] * acc;
          double* dvj = dv.data() + j * m + hoff;
          for (std::size_t c = 0; c < head_dim; ++c) {
            dvj[c] += row[j] * dao_i[c];
          }
        }
        for (std::size_t j = 0; j < S; ++j) {
          const double ds = row[j] * (dp[j] - dot) * attn_scale;
          const double* kj = cb.k.data() + j * m + hoff;
          const double* qi = cb.q.data() + i * m + hoff;
          double* dqi = dq.data() + i * m + hoff;
          double* dkj = dk.data() + j * m + hoff;
          for (std::size_t c = 0; c < head_dim; ++c) {
            dqi[c] += ds * kj[c];
            dkj[c] += ds * qi[c];
          }
        }
      }
    }

    // Back through the q/k/v projections into hn1.
    std::fill(dhn.begin(), dhn.end(), 0.0);
    for (std::size_t t = 0; t < S; ++t) {
      const double* hn1_t = cb.hn1.data() + t * m;
      double* dhn_t = dhn.data() + t * m;
      struct Proj {
        std::size_t w, bias;
        const double* dout;
      };
      const Proj projs[3] = {{o.wq, o.bq, dq.data() + t * m},
                             {o.wk, o.bk, dk.data() + t * m},
                             {o.wv, o.bv, dv.data() + t * m}};
      for (const Proj& p : projs) {
        for (std::size_t r = 0; r < m; ++r) {
          const double g = p.dout[r];
          grad[p.bias + r] += g;
          const double* wr = theta + p.w + r * m;
          double* gwr = grad.data() + p.w + r * m;
          for (std::size_t c = 0; c < m; ++c) {
            gwr[c] += g * hn1_t[c];
            dhn_t[c] += g * wr[c];
          }
        }
      }
    }
    for (std::size_t t = 0; t < S; ++t) {
      std::vector<double> dx_ln(m);
      layer_norm_backward(dhn.data() + t * m, theta + o.ln1_g,
                          cb.xhat1.data() + t * m, cb.inv_std1[t], m,
                          grad.data() + o.ln1_g, grad.data() + o.ln1_b,
                          dx_ln.data());
      double* dxt = dx.data() + t * m;
      for (std::size_t i = 0; i < m; ++i) dxt[i] += dx_ln[i];
    }
  }

  // Embeddings.
  for (std::size_t t = 0; t < S; ++t) {
    const double* dxt = dx.data() + t * m;
    double* gte =
        grad.data() + static_cast<std::size_t>(cache.tokens[t]) * m;
    double* gpe = grad.data() + pos_base + t * m;
    for (std::size_t i = 0; i < m; ++i) {
      gte[i] += dxt[i];
      gpe[i] += dxt[i];
    }
  }
}

std::vector<double> TransformerLoss::analytic_gradient(
    const ParameterVector& params, const Batch& batch) const {
  batch.validate();
  Scratch scratch(seq_len_, dim_, num_classes_);
  std::vector<double> grad(dim(), 0.0);
  const double inv_rows = 1.0 / static_cast<double>(batch.rows);
  for (std::size_t r = 0; r < batch.rows; ++r) {
    Cache cache;
    double loss = 0.0;
    std::size_t pred = 0;
    forward_sample(params, batch.row(r), batch.labels[r], scratch, &cache,
                   loss, pred);
    backward_sample(params, cache, batch.labels[r], inv_rows, grad);
  }
  return grad;
}

ParameterVector TransformerLoss::initial_parameters() const {
  GaussianStream stream(seed_);
  std::vector<double> values(dim(), 0.0);
  const std::size_t m = dim_;
  const std::size_t embed = vocab_ * m + seq_len_ * m;
  const double init_std = 0.02;

  for (std::size_t i = 0; i < embed; ++i) values[i] = init_std * stream.next();
  for (std::size_t b = 0; b < blocks_; ++b) {
    const BlockOffsets o = block_offsets(embed + b * block_param_count(m), m);
    for (std::size_t i = o.ln1_g; i < o.ln1_b; ++i) values[i] = 1.0;
    for (std::size_t i = o.wq; i < o.bq; ++i) values[i] = init_std * stream.next();
    for (std::size_t i = o.wk; i < o.bk; ++i) values[i] = init_std * stream.next();
    for (std::size_t i = o.wv; i < o.bv; ++i) values[i] = init_std * stream.next();
    for (std::size_t i = o.wo; i < o.bo; ++i) values[i] = init_std * stream.next();
    for (std::size_t i = o.ln2_g; i < o.ln2_b; ++i) values[i] = 1.0;
    for (std::size_t i = o.w1; i < o.b1; ++i) values[i] = init_std * stream.next();
    for (std::size_t i = o.w2; i < o.b2; ++i) values[i] = init_std * stream.next();
  }
  const std::size_t head_base = embed + blocks_ * block_param_count(m);
  for (std::size_t i = head_base; i < head_base + num_classes_ * m; ++i) {
    values[i] = init_std * stream.next();
  }
  return ParameterVector(std::move(values), partition());
}

std::unique_ptr<TransformerLoss> make_tiny_transformer(
    std::size_t vocab, std::size_t seq_len, std::size_t dim,
    std::size_t blocks, std::size_t num_classes, std::uint64_t seed) {
  return std::make_unique<TransformerLoss>(vocab, seq_len, dim, blocks,
                                           num_classes, seed);
}

}  // namespace zoforge
