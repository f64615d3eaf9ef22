#ifndef NAVSEED_AUTODIFF_HPP
#define NAVSEED_AUTODIFF_HPP

#include <cmath>
#include <vector>

#include "navseed/tensor.hpp"

namespace navseed::nn {

// Reverse-mode tape over 2D tensors, restricted to the operator set the
// actor-critic losses need: dense layers, relu/tanh, concat/slice,
// elementwise min/sub/mul/square, scale, mean, and the squashed-Gaussian
// sample with its log-density. Node slots are reused across updates so a
// steady-state training step performs no allocations.
template <typename S>
class GraphT {
 public:
  enum class Op {
    Input,
    Linear,
    Relu,
    Tanh,
    Concat,
    SliceCols,
    Min2,
    Add,
    Sub,
    Mul,
    Square,
    Scale,
    Mean,
    SquashedGaussian,
  };

  struct Node {
    Op op = Op::Input;
    int a = -1, b = -1;
    ParamT<S>* weight = nullptr;
    ParamT<S>* bias = nullptr;
    S scalar = S(0);
    int c0 = 0, c1 = 0;  // slice bounds / action dims
    bool needs_grad = false;
    TensorT<S> out, grad;
    TensorT<S> aux;  // eps for SquashedGaussian, scratch transposes for Linear
    TensorT<S> aux2;
  };

  void reset() { cursor_ = 0; }
  const TensorT<S>& value(int id) const { return nodes_[id].out; }
  int size() const { return cursor_; }

  int input(const TensorT<S>& t) {
    Node& n = next();
    n.op = Op::Input;
    n.needs_grad = false;
    n.out.reshape_for_reuse(t.rows, t.cols);
    n.out.data = t.data;
    return cursor_ - 1;
  }

  int linear(int x, ParamT<S>& W, ParamT<S>& b) {
    Node& n = next();
    n.op = Op::Linear;
    n.a = x;
    n.weight = &W;
    n.bias = &b;
    n.needs_grad = nodes_[x].needs_grad || W.requires_grad || b.requires_grad;
    gemm_accum(nodes_[x].out, W.value, n.out, false);
    add_bias_rows(n.out, b.value);
    NAVSEED_CHECK_FINITE(n.out);
    return cursor_ - 1;
  }

  int relu(int x) {
    Node& n = unary(Op::Relu, x);
    const TensorT<S>& in = nodes_[x].out;
    n.out.reshape_for_reuse(in.rows, in.cols);
    for (size_t i = 0; i < in.size(); ++i) n.out.data[i] = in.data[i] > S(0) ? in.data[i] : S(0);
    return cursor_ - 1;
  }

  int tanh_(int x) {
    Node& n = unary(Op::Tanh, x);
    const TensorT<S>& in = nodes_[x].out;
    n.out.reshape_for_reuse(in.rows, in.cols);
    for (size_t i = 0; i < in.size(); ++i) n.out.data[i] = std::tanh(in.data[i]);
    return cursor_ - 1;
  }

  int concat(int a, int b) {
    Node& n = binary(Op::Concat, a, b);
    const TensorT<S>& A = nodes_[a].out;
    const TensorT<S>& B = nodes_[b].out;
    n.out.reshape_for_reuse(A.rows, A.cols + B.cols);
    for (int i = 0; i < A.rows; ++i) {
      S* o = n.out.row(i);
      const S* pa = A.row(i);
      const S* pb = B.row(i);
      for (int j = 0; j < A.cols; ++j) o[j] = pa[j];
      for (int j = 0; j < B.cols; ++j) o[A.cols + j] = pb[j];
    }
    return cursor_ - 1;
  }

  int slice_cols(int x, int c0, int c1) {
    Node& n = unary(Op::SliceCols, x);
    n.c0 = c0;
    n.c1 = c1;
    const TensorT<S>& in = nodes_[x].out;
    n.out.reshape_for_reuse(in.rows, c1 - c0);
    for (int i = 0; i < in.rows; ++i) {
      const S* p = in.row(i);
      S* o = n.out.row(i);
      for (int j = c0; j < c1; ++j) o[j - c0] = p[j];
    }
    return cursor_ - 1;
  }

  int min2(int a, int b) {
    Node& n = binary(Op::Min2, a, b);
    const TensorT<S>& A = nodes_[a].out;
    const TensorT<S>& B = nodes_[b].out;
    n.out.reshape_for_reuse(A.rows, A.cols);
    for (size_t i = 0; i < A.size(); ++i)
      n.out.data[i] = A.data[i] <= B.data[i] ? A.data[i] : B.data[i];
    return cursor_ - 1;
  }

  int add(int a, int b) {
    Node& n = binary(Op::Add, a, b);
    const TensorT<S>& A = nodes_[a].out;
    const TensorT<S>& B = nodes_[b].out;
    n.out.reshape_for_reuse(A.rows, A.cols);
    for (size_t i = 0; i < A.size(); ++i) n.out.data[i] = A.data[i] + B.data[i];
    return cursor_ - 1;
  }

  int sub(int a, int b) {
    Node& n = binary(Op::Sub, a, b);
    const TensorT<S>& A = nodes_[a].out;
    const TensorT<S>& B = nodes_[b].out;
    n.out.reshape_for_reuse(A.rows, A.cols);
    for (size_t i = 0; i < A.size(); ++i) n.out.data[i] = A.data[i] - B.data[i];
    return cursor_ - 1;
  }

  int mul(int a, int b) {
    Node& n = binary(Op::Mul, a, b);
    const TensorT<S>& A = nodes_[a].out;
    const TensorT<S>& B = nodes_[b].out;
    n.out.reshape_for_reuse(A.rows, A.cols);
    for (size_t i = 0; i < A.size(); ++i) n.out.data[i] = A.data[i] * B.data[i];
    return cursor_ - 1;
  }

  int square(int x) {
    Node& n = unary(Op::Square, x);
    const TensorT<S>& in = nodes_[x].out;
    n.out.reshape_for_reuse(in.rows, in.cols);
    for (size_t i = 0; i < in.size(); ++i) n.out.data[i] = in.data[i] * in.data[i];
    return cursor_ - 1;
  }

  int scale(int x, S s) {
    Node& n = unary(Op::Scale, x);
    n.scalar = s;
    const TensorT<S>& in = nodes_[x].out;
    n.out.reshape_for_reuse(in.rows, in.cols);
    for (size_t i = 0; i < in.size(); ++i) n.out.data[i] = s * in.data[i];
    return cursor_ - 1;
  }

  /// Mean over all elements; the sum runs in double per the numeric contract.
  int mean(int x) {
    Node& n = unary(Op::Mean, x);
    const TensorT<S>& in = nodes_[x].out;
    n.out.reshape_for_reuse(1, 1);
    double acc = 0.0;
    for (size_t i = 0; i < in.size(); ++i) acc += static_cast<double>(in.data[i]);
    n.out.data[0] = static_cast<S>(acc / static_cast<double>(in.size()));
    return cursor_ - 1;
  }

  // Reparameterized tanh-Gaussian: mu and log_std are (B x D), eps is a fixed
  // (B x D) standard-normal draw. Output is (B x D+1): the squashed action
  // followed by the summed log-probability with the tanh correction.
  int squashed_gaussian(int mu, int log_std, const TensorT<S>& eps) {
    Node& n = binary(Op::SquashedGaussian, mu, log_std);
    const TensorT<S>& M = nodes_[mu].out;
    const TensorT<S>& L = nodes_[log_std].out;
    const int B = M.rows, D = M.cols;
    n.c0 = D;
    n.aux.reshape_for_reuse(B, D);
    n.aux.data = eps.data;
    n.out.reshape_for_reuse(B, D + 1);
    for (int i = 0; i < B; ++i) {
      const S* m = M.row(i);
      const S* l = L.row(i);
      const S* e = n.aux.row(i);
      S* o = n.out.row(i);
      double logp = 0.0;
      for (int d = 0; d < D; ++d) {
        S lc = clamp(l[d], S(kLogStdMin), S(kLogStdMax));
        S u = m[d] + std::exp(lc) * e[d];
        S a = std::tanh(u);
        o[d] = a;
        logp += -0.5 * static_cast<double>(e[d]) * e[d] - static_cast<double>(lc) -
                0.91893853320467274178 -
                std::log(1.0 - static_cast<double>(a) * a + kSquashEps);
      }
      o[D] = static_cast<S>(logp);
    }
    return cursor_ - 1;
  }

  void backward(int loss) {
    for (int i = 0; i < cursor_; ++i) {
      Node& n = nodes_[i];
      if (!n.needs_grad) continue;
      n.grad.reshape_for_reuse(n.out.rows, n.out.cols);
      n.grad.zero();
    }
    Node& ln = nodes_[loss];
    if (!ln.needs_grad) return;  // nothing trainable feeds the loss
    for (S& g : ln.grad.data) g = S(1);

    for (int id = loss; id >= 0; --id) {
      Node& n = nodes_[id];
      if (!n.needs_grad) continue;
      switch (n.op) {
        case Op::Input:
          break;
        case Op::Linear: {
          Node& x = nodes_[n.a];
          if (x.needs_grad) {
            transpose_into(n.weight->value, n.aux);
            gemm_accum(n.grad, n.aux, x.grad, true);
          }
          if (n.weight->requires_grad) {
            transpose_into(x.out, n.aux2);
            gemm_accum(n.aux2, n.grad, n.weight->grad, true);
          }
          if (n.bias->requires_grad) colsum_accum(n.grad, n.bias->grad);
          break;
        }
        case Op::Relu: {
          Node& x = nodes_[n.a];
          if (!x.needs_grad) break;
          for (size_t i = 0; i < n.out.size(); ++i)
            if (n.out.data[i] > S(0)) x.grad.data[i] += n.grad.data[i];
          break;
        }
        case Op::Tanh: {
          Node& x = nodes_[n.a];
          if (!x.needs_grad) break;
          for (size_t i = 0; i < n.out.size(); ++i) {
            S t = n.out.data[i];
            x.grad.data[i] += n.grad.data[i] * (S(1) - t * t);
          }
          break;
        }
        case Op::Concat: {
          Node& A = nodes_[n.a];
          Node& B = nodes_[n.b];
          for (int i = 0; i < n.out.rows; ++i) {
            const S* g = n.grad.row(i);
            if (A.needs_grad) {
              S* ga = A.grad.row(i);
              for (int j = 0; j < A.out.cols; ++j) ga[j] += g[j];
            }
            if (B.needs_grad) {
              S* gb = B.grad.row(i);
              for (int j = 0; j < B.out.cols; ++j) gb[j] += g[A.out.cols + j];
            }
          }
          break;
        }
        case Op::SliceCols: {
          Node& x = nodes_[n.a];
          if (!x.needs_grad) break;
          for (int i = 0; i < n.out.rows; ++i) {
            const S* g = n.grad.row(i);
            S* gx = x.grad.row(i);
            for (int j = n.c0; j < n.c1; ++j) gx[j] += g[j - n.c0];
          }
          break;
        }
        case Op::Min2: {
          Node& A = nodes_[n.a];
          Node& B = nodes_[n.b];
          for (size_t i = 0; i < n.out.size(); ++i) {
            bool take_a = A.out.data[i] <= B.out.data[i];
            if (take_a && A.needs_grad) A.grad.data[i] += n.grad.data[i];
            if (!take_a && B.needs_grad) B.grad.data[i] += n.grad.data[i];
          }
          break;
        }
        case Op::Add: {
          Node& A = nodes_[n.a];
          Node& B = nodes_[n.b];
          for (size_t i = 0; i < n.out.size(); ++i) {
            if (A.needs_grad) A.grad.data[i] += n.grad.data[i];
            if (B.needs_grad) B.grad.data[i] += n.grad.data[i];
          }
          break;
        }
        case Op::Sub: {
          Node& A = nodes_[n.a];
          Node& B = nodes_[n.b];
          for (size_t i = 0; i < n.out.size(); ++i) {
            if (A.needs_grad) A.grad.data[i] += n.grad.data[i];
            if (B.needs_grad) B.grad.data[i] -= n.grad.data[i];
          }
          break;
        }
        case Op::Mul: {
          Node& A = nodes_[n.a];
          Node& B = nodes_[n.b];
          for (size_t i = 0; i < n.out.size(); ++i) {
            if (A.needs_grad) A.grad.data[i] += n.grad.data[i] * B.out.data[i];
            if (B.needs_grad) B.grad.data[i] += n.grad.data[i] * A.out.data[i];
          }
          break;
        }
        case Op::Square: {
          Node& x = nodes_[n.a];
          if (!x.needs_grad) break;
          for (size_t i = 0; i < n.out.size(); ++i)
            x.grad.data[i] += S(2) * x.out.data[i] * n.grad.data[i];
          break;
        }
        case Op::Scale: {
          Node& x = nodes_[n.a];
          if (!x.needs_grad) break;
          for (size_t i = 0; i < n.out.size(); ++i) x.grad.data[i] += n.scalar * n.grad.data[i];
          break;
        }
        case Op::Mean: {
          Node& x = nodes_[n.a];
          if (!x.needs_grad) break;
          S g = n.grad.data[0] / static_cast<S>(x.out.size());
          for (size_t i = 0; i < x.out.size(); ++i) x.grad.data[i] += g;
          break;
        }
        case Op::SquashedGaussian: {
          Node& M = nodes_[n.a];
          Node& L = nodes_[n.b];
          const int B = M.out.rows, D = n.c0;
          for (int i = 0; i < B; ++i) {
            const S* m = M.out.row(i);
            const S* l = L.out.row(i);
            const S* e = n.aux.row(i);
            const S* o = n.out.row(i);
            const S* g = n.grad.row(i);
            S gl = g[D];  // grad of the summed log-prob
            for (int d = 0; d < D; ++d) {
              S lc = clamp(l[d], S(kLogStdMin), S(kLogStdMax));
              bool pass = l[d] > S(kLogStdMin) && l[d] < S(kLogStdMax);
              S a = o[d];
              S one_m_a2 = S(1) - a * a;
              S denom = one_m_a2 + S(kSquashEps);
              S dlp_da = S(2) * a / denom;
              S da_dmu = one_m_a2;
              S da_dlc = one_m_a2 * std::exp(lc) * e[d];
              S gmu = g[d] * da_dmu + gl * dlp_da * da_dmu;
              S glc = g[d] * da_dlc + gl * (S(-1) + dlp_da * da_dlc);
              if (M.needs_grad) M.grad.row(i)[d] += gmu;
              if (L.needs_grad && pass) L.grad.row(i)[d] += glc;
            }
          }
          break;
        }
      }
    }
  }

  /// Smallest distance to a relu/min kink in the recorded forward pass.
  /// Finite-difference gradient checks need this comfortably above the
  /// perturbation size, otherwise the loss is not differentiable at the point.
  double min_kink_gap() const {
    double gap = 1e300;
    for (int i = 0; i < cursor_; ++i) {
      const Node& n = nodes_[i];
      if (n.op == Op::Relu) {
        for (S v : nodes_[n.a].out.data)
          gap = std::min(gap, static_cast<double>(std::abs(v)));
      } else if (n.op == Op::Min2) {
        const auto& A = nodes_[n.a].out;
        const auto& B = nodes_[n.b].out;
        for (size_t k = 0; k < A.size(); ++k)
          gap = std::min(gap, static_cast<double>(std::abs(A.data[k] - B.data[k])));
      }
    }
    return gap;
  }

  static constexpr double kLogStdMin = -20.0;
  static constexpr double kLogStdMax = 2.0;
  static constexpr double kSquashEps = 1e-6;

 private:
  Node& next() {
    if (cursor_ == static_cast<int>(nodes_.size())) nodes_.emplace_back();
    Node& n = nodes_[cursor_++];
    n.a = n.b = -1;
    n.weight = n.bias = nullptr;
    return n;
  }

  Node& unary(Op op, int x) {
    Node& n = next();
    n.op = op;
    n.a = x;
    n.needs_grad = nodes_[x].needs_grad;
    return n;
  }

  Node& binary(Op op, int a, int b) {
    Node& n = next();
    n.op = op;
    n.a = a;
    n.b = b;
    n.needs_grad = nodes_[a].needs_grad || nodes_[b].needs_grad;
    return n;
  }

  std::vector<Node> nodes_;
  int cursor_ = 0;
};

using Graph = GraphT<float>;

}  // namespace navseed::nn

#endif  // NAVSEED_AUTODIFF_HPP
