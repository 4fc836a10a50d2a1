#include "revs/transformer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

namespace revs {

namespace {

constexpr double kNormEps = 1e-5;

// Register-tiled GEMM: out = a b, or out += a b when `accumulate` is set.
// Every tile sums over the inner index in ascending order starting from
// zero, so without accumulation each element equals dot(a.row(r), b.col(c))
// bitwise, whatever the tile shape.
typedef double v8d __attribute__((vector_size(64)));

inline v8d load8(const double* p) {
    v8d v;
    std::memcpy(&v, p, sizeof(v));
    return v;
}

inline void store8(double* p, v8d v) { std::memcpy(p, &v, sizeof(v)); }

void gemm(const Matrix& a, const Matrix& b, Matrix& out, bool accumulate) {
    const std::size_t rows = a.rows();
    const std::size_t inner = a.cols();
    const std::size_t cols = b.cols();
    const double* A = a.data().data();
    const double* B = b.data().data();
    double* O = out.data().data();
    constexpr std::size_t kR = 4;
    constexpr std::size_t kC = 16;
    const std::size_t full_cols = cols - cols % kC;

    std::size_t r = 0;
    for (; r + kR <= rows; r += kR) {
        for (std::size_t c = 0; c < full_cols; c += kC) {
            v8d acc[kR][2] = {};
            for (std::size_t j = 0; j < inner; ++j) {
                const v8d b0 = load8(B + j * cols + c);
                const v8d b1 = load8(B + j * cols + c + 8);
                for (std::size_t k = 0; k < kR; ++k) {
                    const double av = A[(r + k) * inner + j];
                    acc[k][0] += av * b0;
                    acc[k][1] += av * b1;
                }
            }
            for (std::size_t k = 0; k < kR; ++k) {
                double* o = O + (r + k) * cols + c;
                if (accumulate) {
                    store8(o, load8(o) + acc[k][0]);
                    store8(o + 8, load8(o + 8) + acc[k][1]);
                } else {
                    store8(o, acc[k][0]);
                    store8(o + 8, acc[k][1]);
                }
            }
        }
    }
    // Leftover rows and columns, same summation order.
    auto scalar = [&](std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1) {
        for (std::size_t i = r0; i < r1; ++i)
            for (std::size_t c = c0; c < c1; ++c) {
                double acc = 0.0;
                for (std::size_t j = 0; j < inner; ++j) acc += A[i * inner + j] * B[j * cols + c];
                O[i * cols + c] = accumulate ? O[i * cols + c] + acc : acc;
            }
    };
    scalar(0, r, full_cols, cols);
    scalar(r, rows, 0, cols);
}

// y = x Wᵀ with W stored out × in.
void linear(const Matrix& x, const Matrix& w, Matrix& y) {
    y = Matrix(x.rows(), w.rows());
    gemm(x, w.transposed(), y, false);
}

// Given dy for y = x Wᵀ: dx += dy W, dW += dyᵀ x.
void linear_backward(const Matrix& x, const Matrix& w, const Matrix& dy, Matrix& dx, Matrix& dw) {
    gemm(dy, w, dx, true);
    gemm(dy.transposed(), x, dw, true);
}

void layer_norm(const Matrix& x, const Vector& gain, const Vector& bias, LayerNormCache& cache) {
    const std::size_t n = x.cols();
    cache.hat = Matrix(x.rows(), n);
    cache.out = Matrix(x.rows(), n);
    cache.rstd.assign(x.rows(), 0.0);
    for (std::size_t t = 0; t < x.rows(); ++t) {
        const auto row = x.row(t);
        double mean = 0.0;
        for (double v : row) mean += v;
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (double v : row) var += (v - mean) * (v - mean);
        var /= static_cast<double>(n);
        const double rstd = 1.0 / std::sqrt(var + kNormEps);
        cache.rstd[t] = rstd;
        for (std::size_t i = 0; i < n; ++i) {
            const double h = (row[i] - mean) * rstd;
            cache.hat(t, i) = h;
            cache.out(t, i) = h * gain[i] + bias[i];
        }
    }
}

void layer_norm_backward(const LayerNormCache& cache, const Vector& gain, const Matrix& dy, Matrix& dx,
                         Vector& dgain, Vector& dbias) {
    const std::size_t n = dy.cols();
    Vector dhat(n);
    for (std::size_t t = 0; t < dy.rows(); ++t) {
        double mean_dhat = 0.0;
        double mean_dhat_hat = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double g = dy(t, i);
            dgain[i] += g * cache.hat(t, i);
            dbias[i] += g;
            dhat[i] = g * gain[i];
            mean_dhat += dhat[i];
            mean_dhat_hat += dhat[i] * cache.hat(t, i);
        }
        mean_dhat /= static_cast<double>(n);
        mean_dhat_hat /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i)
            dx(t, i) += cache.rstd[t] * (dhat[i] - mean_dhat - cache.hat(t, i) * mean_dhat_hat);
    }
}

void attention(const ModelConfig& config, LayerCache& c) {
    const std::size_t T = c.q.rows();
    const std::size_t dh = config.d_model / config.n_heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    c.z = Matrix(T, config.d_model);
    c.probs.assign(config.n_heads, Matrix(T, T));
    for (std::size_t h = 0; h < config.n_heads; ++h) {
        const std::size_t off = h * dh;
        Matrix& p = c.probs[h];
        for (std::size_t i = 0; i < T; ++i) {
            const auto qi = c.q.row(i).subspan(off, dh);
            double mx = -INFINITY;
            for (std::size_t j = 0; j <= i; ++j) {
                p(i, j) = dot(qi, c.k.row(j).subspan(off, dh)) * scale;
                mx = std::max(mx, p(i, j));
            }
            double sum = 0.0;
            for (std::size_t j = 0; j <= i; ++j) {
                p(i, j) = std::exp(p(i, j) - mx);
                sum += p(i, j);
            }
            auto zi = c.z.row(i).subspan(off, dh);
            for (std::size_t j = 0; j <= i; ++j) {
                p(i, j) /= sum;
                axpy(p(i, j), c.v.row(j).subspan(off, dh), zi);
            }
        }
    }
}

void attention_backward(const ModelConfig& config, const LayerCache& c, const Matrix& dz, Matrix& dq, Matrix& dk,
                        Matrix& dv) {
    const std::size_t T = c.q.rows();
    const std::size_t dh = config.d_model / config.n_heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    Vector dp(T);
    for (std::size_t h = 0; h < config.n_heads; ++h) {
        const std::size_t off = h * dh;
        const Matrix& p = c.probs[h];
        for (std::size_t i = 0; i < T; ++i) {
            const auto dzi = dz.row(i).subspan(off, dh);
            double weighted = 0.0;
            for (std::size_t j = 0; j <= i; ++j) {
                dp[j] = dot(dzi, c.v.row(j).subspan(off, dh));
                axpy(p(i, j), dzi, dv.row(j).subspan(off, dh));
                weighted += p(i, j) * dp[j];
            }
            auto dqi = dq.row(i).subspan(off, dh);
            for (std::size_t j = 0; j <= i; ++j) {
                const double ds = p(i, j) * (dp[j] - weighted) * scale;
                if (ds == 0.0) continue;
                axpy(ds, c.k.row(j).subspan(off, dh), dqi);
                axpy(ds, c.q.row(i).subspan(off, dh), dk.row(j).subspan(off, dh));
            }
        }
    }
}

Matrix add(const Matrix& a, const Matrix& b) {
    Matrix out = a;
    axpy(1.0, b.data(), out.data());
    return out;
}

}  // namespace

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * std::numbers::sqrt2 / 2.0)); }

double gelu_derivative(double x) {
    const double cdf = 0.5 * (1.0 + std::erf(x * std::numbers::sqrt2 / 2.0));
    const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    return cdf + x * pdf;
}

void forward_layers(const ModelState& state, std::span<const TokenId> tokens, SequenceCache& cache) {
    const ModelConfig& cfg = state.config;
    validate_prompt(cfg, tokens);
    const std::size_t T = tokens.size();
    cache.tokens.assign(tokens.begin(), tokens.end());
    cache.layers.resize(cfg.n_layers);

    Matrix x(T, cfg.d_model);
    for (std::size_t t = 0; t < T; ++t) {
        auto row = x.row(t);
        axpy(1.0, state.token_embedding.row(static_cast<std::size_t>(tokens[t])), row);
        axpy(1.0, state.position_embedding.row(t), row);
    }
    for (std::size_t l = 0; l < cfg.n_layers; ++l) {
        const TransformerBlock& b = state.blocks[l];
        LayerCache& c = cache.layers[l];
        c.input = std::move(x);
        layer_norm(c.input, b.ln1_gain, b.ln1_bias, c.ln1);
        linear(c.ln1.out, b.w_q, c.q);
        linear(c.ln1.out, b.w_k, c.k);
        linear(c.ln1.out, b.w_v, c.v);
        attention(cfg, c);
        Matrix attn_out;
        linear(c.z, b.w_o, attn_out);
        c.mid = add(c.input, attn_out);
        layer_norm(c.mid, b.ln2_gain, b.ln2_bias, c.ln2);
        linear(c.ln2.out, b.ff1, c.pre);
        c.act = Matrix(T, cfg.d_ff);
        for (std::size_t i = 0; i < c.pre.size(); ++i) c.act.data()[i] = gelu(c.pre.data()[i]);
        Matrix mlp_out;
        linear(c.act, b.ff2, mlp_out);
        c.output = add(c.mid, mlp_out);
        x = c.output;
    }
}

void forward_sequence(const ModelState& state, std::span<const TokenId> tokens, SequenceCache& cache) {
    forward_layers(state, tokens, cache);
    layer_norm(cache.layers.back().output, state.final_gain, state.final_bias, cache.final_norm);
    linear(cache.final_norm.out, state.unembedding, cache.logits);
}

Vector project_to_vocabulary(const ModelState& state, std::span<const double> hidden) {
    Matrix h(1, hidden.size(), Vector(hidden.begin(), hidden.end()));
    LayerNormCache norm;
    layer_norm(h, state.final_gain, state.final_bias, norm);
    return matvec(state.unembedding, norm.out.row(0));
}

double next_token_loss(const SequenceCache& cache, double weight, Matrix& dlogits) {
    const std::size_t T = cache.tokens.size();
    const std::size_t V = cache.logits.cols();
    dlogits = Matrix(T, V);
    double loss = 0.0;
    for (std::size_t t = 0; t + 1 < T; ++t) {
        const auto row = cache.logits.row(t);
        const double mx = *std::max_element(row.begin(), row.end());
        double sum = 0.0;
        for (double v : row) sum += std::exp(v - mx);
        const double log_z = mx + std::log(sum);
        const auto target = static_cast<std::size_t>(cache.tokens[t + 1]);
        loss += weight * (log_z - row[target]);
        auto d = dlogits.row(t);
        for (std::size_t v = 0; v < V; ++v) d[v] = weight * std::exp(row[v] - log_z);
        d[target] -= weight;
    }
    return loss;
}

std::optional<Vector> backward_sequence(const ModelState& state, const SequenceCache& cache, const Matrix& dlogits,
                                        ModelState& grad, std::optional<std::size_t> capture_layer) {
    const ModelConfig& cfg = state.config;
    const std::size_t T = cache.tokens.size();
    std::optional<Vector> captured;

    Matrix dfinal(T, cfg.d_model);
    linear_backward(cache.final_norm.out, state.unembedding, dlogits, dfinal, grad.unembedding);
    Matrix dx(T, cfg.d_model);
    layer_norm_backward(cache.final_norm, state.final_gain, dfinal, dx, grad.final_gain, grad.final_bias);

    for (std::size_t l = cfg.n_layers; l-- > 0;) {
        const TransformerBlock& b = state.blocks[l];
        TransformerBlock& g = grad.blocks[l];
        const LayerCache& c = cache.layers[l];

        // output = mid + FF2 gelu(FF1 LN2(mid)); dx flows to mid unchanged.
        Matrix dact(T, cfg.d_ff);
        linear_backward(c.act, b.ff2, dx, dact, g.ff2);
        if (capture_layer && *capture_layer == l) {
            const auto last = dact.row(T - 1);
            captured = Vector(last.begin(), last.end());
        }
        Matrix dpre(T, cfg.d_ff);
        for (std::size_t i = 0; i < dpre.size(); ++i)
            dpre.data()[i] = dact.data()[i] * gelu_derivative(c.pre.data()[i]);
        Matrix dln2(T, cfg.d_model);
        linear_backward(c.ln2.out, b.ff1, dpre, dln2, g.ff1);
        layer_norm_backward(c.ln2, b.ln2_gain, dln2, dx, g.ln2_gain, g.ln2_bias);

        // mid = input + W_o attn(LN1(input)).
        Matrix dz(T, cfg.d_model);
        linear_backward(c.z, b.w_o, dx, dz, g.w_o);
        Matrix dq(T, cfg.d_model), dk(T, cfg.d_model), dv(T, cfg.d_model);
        attention_backward(cfg, c, dz, dq, dk, dv);
        Matrix dln1(T, cfg.d_model);
        linear_backward(c.ln1.out, b.w_q, dq, dln1, g.w_q);
        linear_backward(c.ln1.out, b.w_k, dk, dln1, g.w_k);
        linear_backward(c.ln1.out, b.w_v, dv, dln1, g.w_v);
        layer_norm_backward(c.ln1, b.ln1_gain, dln1, dx, g.ln1_gain, g.ln1_bias);
    }

    for (std::size_t t = 0; t < T; ++t) {
        const auto row = dx.row(t);
        axpy(1.0, row, grad.token_embedding.row(static_cast<std::size_t>(cache.tokens[t])));
        axpy(1.0, row, grad.position_embedding.row(t));
    }
    return captured;
}

}  // namespace revs
