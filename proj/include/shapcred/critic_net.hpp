#ifndef SHAPCRED_CRITIC_NET_HPP
#define SHAPCRED_CRITIC_NET_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "shapcred/errors.hpp"
#include "shapcred/param_vector.hpp"
#include "shapcred/rng.hpp"

namespace shapcred {

using RowVec = Eigen::RowVectorXd;

/// One-hot action encoding of width n_actions.
inline Vec one_hot(std::size_t action, std::size_t n_actions)
{
   if(action >= n_actions) {
      throw ValidationError("one_hot: action id out of range");
   }
   Vec v = Vec::Zero(static_cast< Eigen::Index >(n_actions));
   v(static_cast< Eigen::Index >(action)) = 1.;
   return v;
}

/// Glorot-uniform fill of a weight matrix (rows = fan_out, cols = fan_in).
inline void glorot_uniform(MatMap w, Rng& rng, double fan_in, double fan_out)
{
   const double limit = std::sqrt(6. / (fan_in + fan_out));
   std::uniform_real_distribution< double > dist(-limit, limit);
   for(Eigen::Index j = 0; j < w.cols(); ++j) {
      for(Eigen::Index i = 0; i < w.rows(); ++i) {
         w(i, j) = dist(rng);
      }
   }
}

struct CriticArch {
   std::size_t n_agents = 1;
   /// per-agent observation width at the critic input
   std::size_t obs_dim = 1;
   std::size_t n_actions = 2;
   /// group label per agent; equal labels share extractor parameters
   std::vector< std::string > groups;
   std::size_t units = 64;
   /// 0: the fused features feed one linear output unit; otherwise a ReLU layer
   /// of this width sits between the fused features and the output unit
   std::size_t head_hidden = 0;

   [[nodiscard]] std::size_t input_dim() const noexcept { return obs_dim + n_actions; }
   [[nodiscard]] std::size_t fused_dim() const noexcept { return n_agents * units; }
};

/// Central critic: per-group two-layer ReLU feature extractors over
/// (observation, action encoding), concatenation of all agents' features, and
/// a scalar head.
///
/// Inputs are given per agent as a matrix with one column per sample.
class CriticNet {
  public:
   explicit CriticNet(CriticArch arch) : arch_(std::move(arch))
   {
      if(arch_.n_agents == 0 || arch_.units == 0) {
         throw ShapeError("CriticNet: agent count and width must be positive");
      }
      if(arch_.groups.empty()) {
         arch_.groups.assign(arch_.n_agents, "agent");
      }
      if(arch_.groups.size() != arch_.n_agents) {
         throw ShapeError("CriticNet: one group label per agent required");
      }
      auto layout = std::make_shared< ParamLayout >();
      const auto in = arch_.input_dim();
      const auto u = arch_.units;
      std::map< std::string, std::size_t > seen;
      for(const auto& g : arch_.groups) {
         if(seen.contains(g)) {
            group_of_.push_back(seen[g]);
            continue;
         }
         Extractor e;
         e.w1 = layout->add("ext." + g + ".w1", u, in);
         e.b1 = layout->add("ext." + g + ".b1", u, 1);
         e.w2 = layout->add("ext." + g + ".w2", u, u);
         e.b2 = layout->add("ext." + g + ".b2", u, 1);
         seen[g] = extractors_.size();
         group_of_.push_back(extractors_.size());
         extractors_.push_back(e);
      }
      const auto fused = arch_.fused_dim();
      if(arch_.head_hidden == 0) {
         head_w1_ = layout->add("head.w", 1, fused);
         head_b1_ = layout->add("head.b", 1, 1);
      } else {
         head_w1_ = layout->add("head.w1", arch_.head_hidden, fused);
         head_b1_ = layout->add("head.b1", arch_.head_hidden, 1);
         head_w2_ = layout->add("head.w2", 1, arch_.head_hidden);
         head_b2_ = layout->add("head.b2", 1, 1);
      }
      params_ = ParamVector(std::move(layout));
   }

   [[nodiscard]] const CriticArch& arch() const noexcept { return arch_; }
   ParamVector& params() noexcept { return params_; }
   [[nodiscard]] const ParamVector& params() const noexcept { return params_; }
   [[nodiscard]] std::size_t n_agents() const noexcept { return arch_.n_agents; }
   [[nodiscard]] std::size_t group_of(std::size_t agent) const { return group_of_.at(agent); }
   [[nodiscard]] std::size_t head_width() const noexcept { return arch_.head_hidden == 0 ? 1 : arch_.head_hidden; }

   void init(Rng& rng)
   {
      params_.set_zero();
      const auto in = static_cast< double >(arch_.input_dim());
      const auto u = static_cast< double >(arch_.units);
      for(const auto& e : extractors_) {
         glorot_uniform(seg(e.w1), rng, in, u);
         glorot_uniform(seg(e.w2), rng, u, u);
      }
      const auto fused = static_cast< double >(arch_.fused_dim());
      if(arch_.head_hidden == 0) {
         glorot_uniform(seg(head_w1_), rng, fused, 1.);
      } else {
         const auto h = static_cast< double >(arch_.head_hidden);
         glorot_uniform(seg(head_w1_), rng, fused, h);
         glorot_uniform(seg(head_w2_), rng, h, 1.);
      }
   }

   /// Stacks observation and action encoding into one input column.
   [[nodiscard]] Vec make_input(std::span< const double > obs, const Vec& action_encoding) const
   {
      if(obs.size() != arch_.obs_dim || static_cast< std::size_t >(action_encoding.size()) != arch_.n_actions) {
         throw ShapeError("CriticNet: input has the wrong width");
      }
      Vec x(static_cast< Eigen::Index >(arch_.input_dim()));
      for(std::size_t k = 0; k < obs.size(); ++k) {
         x(static_cast< Eigen::Index >(k)) = obs[k];
      }
      x.tail(static_cast< Eigen::Index >(arch_.n_actions)) = action_encoding;
      return x;
   }

   /// Q_tot for a single joint input: one observation and one action encoding per agent.
   [[nodiscard]] double forward(const std::vector< std::vector< double > >& obs, const std::vector< Vec >& encodings) const
   {
      if(obs.size() != arch_.n_agents || encodings.size() != arch_.n_agents) {
         throw ShapeError("CriticNet: expected one observation and encoding per agent");
      }
      std::vector< Mat > in(arch_.n_agents);
      for(std::size_t i = 0; i < arch_.n_agents; ++i) {
         in[i] = make_input(obs[i], encodings[i]);
      }
      return forward_batch(in)(0);
   }

   /// Batched evaluation without recording.
   [[nodiscard]] RowVec forward_batch(const std::vector< Mat >& inputs) const
   {
      check_inputs(inputs);
      Mat fused(static_cast< Eigen::Index >(arch_.fused_dim()), inputs[0].cols());
      for(std::size_t i = 0; i < arch_.n_agents; ++i) {
         fused.middleRows(block_row(i), units()) = features(i, inputs[i]);
      }
      return head(fused);
   }

   /// Pre-fusion features of `agent` for each input column.
   [[nodiscard]] Mat features(std::size_t agent, const Mat& x) const
   {
      const auto& e = extractors_.at(group_of_.at(agent));
      Mat a1 = ((cseg(e.w1) * x).colwise() + cseg(e.b1).col(0)).cwiseMax(0.);
      return ((cseg(e.w2) * a1).colwise() + cseg(e.b2).col(0)).cwiseMax(0.);
   }

   /// Contribution of one agent's feature block to the first head layer's
   /// pre-activation (bias excluded). Summing over agents and passing the sum
   /// to head_from_preactivation reproduces the full head.
   [[nodiscard]] Mat head_block(std::size_t agent, const Mat& feats) const
   {
      return cseg(head_w1_).middleCols(block_row(agent), units()) * feats;
   }

   [[nodiscard]] RowVec head_from_preactivation(const Mat& pre) const
   {
      Mat z = pre.colwise() + cseg(head_b1_).col(0);
      if(arch_.head_hidden == 0) {
         return z.row(0);
      }
      Mat a = z.cwiseMax(0.);
      return (cseg(head_w2_) * a).array() + cseg(head_b2_)(0, 0);
   }

   // ----- training path ---------------------------------------------------

   /// Batched evaluation that records activations for a following backward().
   RowVec forward_train(const std::vector< Mat >& inputs)
   {
      check_inputs(inputs);
      Tape t;
      t.inputs = inputs;
      const auto cols = inputs[0].cols();
      t.z1.resize(arch_.n_agents);
      t.z2.resize(arch_.n_agents);
      t.fused.resize(static_cast< Eigen::Index >(arch_.fused_dim()), cols);
      for(std::size_t i = 0; i < arch_.n_agents; ++i) {
         const auto& e = extractors_[group_of_[i]];
         t.z1[i] = (cseg(e.w1) * inputs[i]).colwise() + cseg(e.b1).col(0);
         t.z2[i] = (cseg(e.w2) * t.z1[i].cwiseMax(0.)).colwise() + cseg(e.b2).col(0);
         t.fused.middleRows(block_row(i), units()) = t.z2[i].cwiseMax(0.);
      }
      t.zh = (cseg(head_w1_) * t.fused).colwise() + cseg(head_b1_).col(0);
      RowVec out = arch_.head_hidden == 0 ? RowVec(t.zh.row(0))
                                          : RowVec((cseg(head_w2_) * t.zh.cwiseMax(0.)).array() + cseg(head_b2_)(0, 0));
      tape_ = std::move(t);
      return out;
   }

   /// Gradient of sum_b upstream(b) * output(b) with respect to every
   /// parameter. Shared extractor segments accumulate over agents.
   ParamVector backward(const RowVec& upstream)
   {
      if(! tape_) {
         throw LifecycleError("CriticNet::backward called without a recorded forward pass");
      }
      Tape t = std::move(*tape_);
      tape_.reset();
      if(upstream.size() != t.fused.cols()) {
         throw ShapeError("CriticNet::backward: upstream gradient has the wrong batch size");
      }
      ParamVector g = params_.zeros_like();
      Mat dzh;
      if(arch_.head_hidden == 0) {
         dzh = upstream;
      } else {
         Mat ah = t.zh.cwiseMax(0.);
         g.view(seg_of(head_w2_)) = upstream * ah.transpose();
         g.view(seg_of(head_b2_))(0, 0) = upstream.sum();
         dzh = (cseg(head_w2_).transpose() * upstream).cwiseProduct(relu_mask(t.zh));
      }
      g.view(seg_of(head_w1_)) = dzh * t.fused.transpose();
      g.view(seg_of(head_b1_)) = dzh.rowwise().sum();
      Mat dfused = cseg(head_w1_).transpose() * dzh;

      for(std::size_t i = 0; i < arch_.n_agents; ++i) {
         const auto& e = extractors_[group_of_[i]];
         Mat dz2 = dfused.middleRows(block_row(i), units()).cwiseProduct(relu_mask(t.z2[i]));
         g.view(seg_of(e.w2)) += dz2 * t.z1[i].cwiseMax(0.).transpose();
         g.view(seg_of(e.b2)) += dz2.rowwise().sum();
         Mat dz1 = (cseg(e.w2).transpose() * dz2).cwiseProduct(relu_mask(t.z1[i]));
         g.view(seg_of(e.w1)) += dz1 * t.inputs[i].transpose();
         g.view(seg_of(e.b1)) += dz1.rowwise().sum();
      }
      return g;
   }

   [[nodiscard]] bool has_tape() const noexcept { return tape_.has_value(); }

  private:
   struct Extractor {
      std::size_t w1 = 0, b1 = 0, w2 = 0, b2 = 0;
   };
   struct Tape {
      std::vector< Mat > inputs;
      std::vector< Mat > z1, z2;
      Mat fused;
      Mat zh;
   };

   static Mat relu_mask(const Mat& z) { return (z.array() > 0.).cast< double >().matrix(); }

   [[nodiscard]] Eigen::Index units() const noexcept { return static_cast< Eigen::Index >(arch_.units); }
   [[nodiscard]] Eigen::Index block_row(std::size_t agent) const noexcept
   {
      return static_cast< Eigen::Index >(agent * arch_.units);
   }
   [[nodiscard]] const Segment& seg_of(std::size_t idx) const { return params_.layout().segments()[idx]; }
   MatMap seg(std::size_t idx) { return params_.view(seg_of(idx)); }
   [[nodiscard]] ConstMatMap cseg(std::size_t idx) const { return params_.view(seg_of(idx)); }

   void check_inputs(const std::vector< Mat >& inputs) const
   {
      if(inputs.size() != arch_.n_agents) {
         throw ShapeError(
            "CriticNet: expected inputs for " + std::to_string(arch_.n_agents) + " agents, got "
            + std::to_string(inputs.size()));
      }
      for(const auto& x : inputs) {
         if(static_cast< std::size_t >(x.rows()) != arch_.input_dim() || x.cols() != inputs[0].cols()) {
            throw ShapeError("CriticNet: input matrix has the wrong shape");
         }
      }
      if(inputs[0].cols() == 0) {
         throw ShapeError("CriticNet: empty batch");
      }
   }

   [[nodiscard]] RowVec head(const Mat& fused) const
   {
      return head_from_preactivation(cseg(head_w1_) * fused);
   }

   CriticArch arch_;
   std::vector< Extractor > extractors_;
   std::vector< std::size_t > group_of_;
   std::size_t head_w1_ = 0, head_b1_ = 0, head_w2_ = 0, head_b2_ = 0;
   ParamVector params_;
   std::optional< Tape > tape_;
};

}  // namespace shapcred

#endif  // SHAPCRED_CRITIC_NET_HPP
