#ifndef SHAPCRED_OPTIMIZER_HPP
#define SHAPCRED_OPTIMIZER_HPP

#include <cmath>
#include <cstddef>
#include <string>

#include "shapcred/param_vector.hpp"

namespace shapcred {

enum class OptimizerKind { adam, rmsprop };

struct OptimizerConfig {
   OptimizerKind kind = OptimizerKind::adam;
   double learning_rate = 0.01;
   double beta1 = 0.9;
   double beta2 = 0.999;
   /// squared-gradient decay for RMSProp
   double decay = 0.99;
   double epsilon = 1e-8;

   static OptimizerConfig adam(double lr) { return {OptimizerKind::adam, lr, 0.9, 0.999, 0.99, 1e-8}; }
   static OptimizerConfig rmsprop(double lr) { return {OptimizerKind::rmsprop, lr, 0.9, 0.999, 0.99, 1e-5}; }
};

/// Adaptive first-order optimizer over a flat parameter vector.
class Optimizer {
  public:
   Optimizer(OptimizerConfig cfg, std::size_t n_params)
       : cfg_(cfg), m_(Vec::Zero(static_cast< Eigen::Index >(n_params))), v_(Vec::Zero(static_cast< Eigen::Index >(n_params)))
   {
   }

   [[nodiscard]] const OptimizerConfig& config() const noexcept { return cfg_; }
   [[nodiscard]] std::size_t step_count() const noexcept { return steps_; }
   [[nodiscard]] std::size_t size() const noexcept { return static_cast< std::size_t >(m_.size()); }

   void step(ParamVector& params, const ParamVector& grad) { step(params.data(), grad.data()); }

   void step(Vec& params, const Vec& grad)
   {
      if(params.size() != m_.size() || grad.size() != m_.size()) {
         throw ShapeError(
            "Optimizer: expected " + std::to_string(m_.size()) + " parameters, got params="
            + std::to_string(params.size()) + " grad=" + std::to_string(grad.size()));
      }
      ++steps_;
      if(cfg_.kind == OptimizerKind::adam) {
         m_ = cfg_.beta1 * m_ + (1. - cfg_.beta1) * grad;
         v_ = cfg_.beta2 * v_ + (1. - cfg_.beta2) * grad.cwiseAbs2();
         const double c1 = 1. - std::pow(cfg_.beta1, static_cast< double >(steps_));
         const double c2 = 1. - std::pow(cfg_.beta2, static_cast< double >(steps_));
         params.array() -= cfg_.learning_rate * (m_.array() / c1) / ((v_.array() / c2).sqrt() + cfg_.epsilon);
      } else {
         v_ = cfg_.decay * v_ + (1. - cfg_.decay) * grad.cwiseAbs2();
         params.array() -= cfg_.learning_rate * grad.array() / (v_.array().sqrt() + cfg_.epsilon);
      }
   }

  private:
   OptimizerConfig cfg_;
   Vec m_;
   Vec v_;
   std::size_t steps_ = 0;
};

/// Scales `grad` in place so its L2 norm is at most `max_norm`; no-op when max_norm <= 0.
inline double clip_grad_norm(Vec& grad, double max_norm)
{
   const double norm = grad.norm();
   if(max_norm > 0. && norm > max_norm) {
      grad *= max_norm / norm;
   }
   return norm;
}

}  // namespace shapcred

#endif  // SHAPCRED_OPTIMIZER_HPP
