#ifndef NAVSEED_TENSOR_HPP
#define NAVSEED_TENSOR_HPP

#include <cassert>
#include <cmath>
#include <cstdint>
#include <vector>

#include "navseed/common.hpp"

namespace navseed::nn {

// Row-major 2D tensor. Everything the networks touch is a (batch x features)
// matrix or a 1x1 scalar, so two dims keep the hot paths simple. The scalar
// type is a template parameter: the product uses float, gradient-check tests
// instantiate double.
template <typename S>
struct TensorT {
  int rows = 0;
  int cols = 0;
  std::vector<S> data;

  TensorT() = default;
  TensorT(int r, int c) { resize(r, c); }

  void resize(int r, int c) {
    rows = r;
    cols = c;
    data.assign(static_cast<size_t>(r) * c, S(0));
  }
  // keep capacity, no reinit when the shape already matches
  void reshape_for_reuse(int r, int c) {
    if (rows == r && cols == c) return;
    resize(r, c);
  }
  void zero() { std::fill(data.begin(), data.end(), S(0)); }
  size_t size() const { return data.size(); }
  S* row(int r) { return data.data() + static_cast<size_t>(r) * cols; }
  const S* row(int r) const { return data.data() + static_cast<size_t>(r) * cols; }
  S& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  S at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

  bool same_shape(const TensorT& o) const { return rows == o.rows && cols == o.cols; }

  bool all_finite() const {
    for (S v : data)
      if (!std::isfinite(static_cast<double>(v))) return false;
    return true;
  }
};

using Tensor = TensorT<float>;

#ifndef NDEBUG
#define NAVSEED_CHECK_FINITE(t) assert((t).all_finite() && "tensor has NaN/Inf")
#else
#define NAVSEED_CHECK_FINITE(t) ((void)0)
#endif

template <typename S>
void saxpy_rows(const TensorT<S>& A, const TensorT<S>& B, TensorT<S>& C, bool accumulate,
                int row0, int row1, int jstart);

// C (M x N) (+)= A (M x K) * B (K x N), saxpy form: the j loop over contiguous
// B and C rows vectorizes, k unrolled by 4 to cut C row traffic.
template <typename S>
void gemm_accum(const TensorT<S>& A, const TensorT<S>& B, TensorT<S>& C, bool accumulate) {
  assert(A.cols == B.rows);
  const int M = A.rows, K = A.cols, N = B.cols;
  C.reshape_for_reuse(M, N);
  if (N <= 4) {
    // narrow outputs: unrolled k with independent accumulator banks so the
    // FMA chains overlap instead of serializing on latency
    for (int i = 0; i < M; ++i) {
      const S* a = A.row(i);
      const S* b = B.data.data();
      S acc[4][4] = {};
      int k = 0;
      for (; k + 4 <= K; k += 4) {
        for (int u = 0; u < 4; ++u) {
          const S ak = a[k + u];
          const S* bk = b + static_cast<size_t>(k + u) * N;
          for (int j = 0; j < N; ++j) acc[u][j] += ak * bk[j];
        }
      }
      for (; k < K; ++k) {
        const S ak = a[k];
        const S* bk = b + static_cast<size_t>(k) * N;
        for (int j = 0; j < N; ++j) acc[0][j] += ak * bk[j];
      }
      S* c = C.row(i);
      for (int j = 0; j < N; ++j) {
        S sum = acc[0][j] + acc[1][j] + acc[2][j] + acc[3][j];
        c[j] = accumulate ? c[j] + sum : sum;
      }
    }
    return;
  }
  // register-tiled main path: 4 C rows x 32 C cols held in accumulators
  constexpr int TI = 4, TJ = 32;
  int i0 = 0;
  if (N >= TJ) {
    for (; i0 + TI <= M; i0 += TI) {
      for (int j0 = 0; j0 + TJ <= N; j0 += TJ) {
        S acc[TI][TJ] = {};
        for (int k = 0; k < K; ++k) {
          const S* __restrict bk = B.row(k) + j0;
          for (int r = 0; r < TI; ++r) {
            const S ar = A.at(i0 + r, k);
            for (int j = 0; j < TJ; ++j) acc[r][j] += ar * bk[j];
          }
        }
        for (int r = 0; r < TI; ++r) {
          S* __restrict c = C.row(i0 + r) + j0;
          for (int j = 0; j < TJ; ++j) c[j] = accumulate ? c[j] + acc[r][j] : acc[r][j];
        }
      }
      // column remainder for these rows
      int j0 = (N / TJ) * TJ;
      if (j0 < N) saxpy_rows(A, B, C, accumulate, i0, i0 + TI, j0);
    }
  }
  saxpy_rows(A, B, C, accumulate, i0, M, 0);
}

// fallback rows/columns: k-unrolled saxpy over [row0, row1) x [jstart, N)
template <typename S>
void saxpy_rows(const TensorT<S>& A, const TensorT<S>& B, TensorT<S>& C, bool accumulate,
                int row0, int row1, int jstart) {
  const int K = A.cols, N = B.cols;
  for (int i = row0; i < row1; ++i) {
    S* __restrict c = C.row(i) + jstart;
    const int n = N - jstart;
    if (!accumulate)
      for (int j = 0; j < n; ++j) c[j] = S(0);
    const S* a = A.row(i);
    int k = 0;
    for (; k + 4 <= K; k += 4) {
      const S a0 = a[k], a1 = a[k + 1], a2 = a[k + 2], a3 = a[k + 3];
      const S* __restrict b0 = B.row(k) + jstart;
      const S* __restrict b1 = B.row(k + 1) + jstart;
      const S* __restrict b2 = B.row(k + 2) + jstart;
      const S* __restrict b3 = B.row(k + 3) + jstart;
      for (int j = 0; j < n; ++j) c[j] += a0 * b0[j] + a1 * b1[j] + a2 * b2[j] + a3 * b3[j];
    }
    for (; k < K; ++k) {
      const S ak = a[k];
      const S* __restrict b = B.row(k) + jstart;
      for (int j = 0; j < n; ++j) c[j] += ak * b[j];
    }
  }
}

template <typename S>
void transpose_into(const TensorT<S>& A, TensorT<S>& out) {
  out.reshape_for_reuse(A.cols, A.rows);
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.cols; ++j) out.data[static_cast<size_t>(j) * A.rows + i] = A.at(i, j);
}

/// out[r, :] += bias for every row
template <typename S>
void add_bias_rows(TensorT<S>& out, const TensorT<S>& bias) {
  assert(bias.rows == 1 && bias.cols == out.cols);
  for (int i = 0; i < out.rows; ++i) {
    S* o = out.row(i);
    const S* b = bias.row(0);
    for (int j = 0; j < out.cols; ++j) o[j] += b[j];
  }
}

/// bias_grad[0, :] += column sums of g
template <typename S>
void colsum_accum(const TensorT<S>& g, TensorT<S>& bias_grad) {
  assert(bias_grad.rows == 1 && bias_grad.cols == g.cols);
  for (int i = 0; i < g.rows; ++i) {
    const S* gi = g.row(i);
    S* b = bias_grad.row(0);
    for (int j = 0; j < g.cols; ++j) b[j] += gi[j];
  }
}

// Trainable parameter: value plus gradient accumulator. requires_grad gates
// gradient accumulation so actor updates can skip critic weight gradients.
template <typename S>
struct ParamT {
  TensorT<S> value;
  TensorT<S> grad;
  bool requires_grad = true;

  void init_shape(int r, int c) {
    value.resize(r, c);
    grad.resize(r, c);
  }
  void zero_grad() { grad.zero(); }
};

using Param = ParamT<float>;

}  // namespace navseed::nn

#endif  // NAVSEED_TENSOR_HPP
