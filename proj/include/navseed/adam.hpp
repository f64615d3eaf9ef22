#ifndef NAVSEED_ADAM_HPP
#define NAVSEED_ADAM_HPP

#include <vector>

#include "navseed/tensor.hpp"

namespace navseed::nn {

// Bias-corrected Adam over a fixed set of parameters. Moment accumulators
// mirror the parameter shapes; t advances once per step() call.
template <typename S>
class AdamT {
 public:
  explicit AdamT(std::vector<ParamT<S>*> params, double beta1 = 0.9, double beta2 = 0.999,
                 double eps = 1e-8)
      : params_(std::move(params)), beta1_(beta1), beta2_(beta2), eps_(eps) {
    m_.resize(params_.size());
    v_.resize(params_.size());
    for (size_t i = 0; i < params_.size(); ++i) {
      m_[i].resize(params_[i]->value.rows, params_[i]->value.cols);
      v_[i].resize(params_[i]->value.rows, params_[i]->value.cols);
    }
  }

  void step(double lr) {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (size_t i = 0; i < params_.size(); ++i) {
      auto& p = params_[i]->value.data;
      auto& g = params_[i]->grad.data;
      auto& m = m_[i].data;
      auto& v = v_[i].data;
      for (size_t k = 0; k < p.size(); ++k) {
        m[k] = static_cast<S>(beta1_ * m[k] + (1.0 - beta1_) * g[k]);
        v[k] = static_cast<S>(beta2_ * v[k] + (1.0 - beta2_) * g[k] * g[k]);
        double mhat = m[k] / bc1;
        double vhat = v[k] / bc2;
        p[k] -= static_cast<S>(lr * mhat / (std::sqrt(vhat) + eps_));
      }
    }
  }

  void zero_grad() {
    for (auto* p : params_) p->zero_grad();
  }

  int64_t t() const { return t_; }

 private:
  std::vector<ParamT<S>*> params_;
  std::vector<TensorT<S>> m_, v_;
  int64_t t_ = 0;
  double beta1_, beta2_, eps_;
};

using Adam = AdamT<float>;

}  // namespace navseed::nn

#endif  // NAVSEED_ADAM_HPP
