#ifndef SHAPCRED_AGENT_NET_HPP
#define SHAPCRED_AGENT_NET_HPP

#include <Eigen/Dense>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "shapcred/critic_net.hpp"
#include "shapcred/errors.hpp"
#include "shapcred/param_vector.hpp"
#include "shapcred/rng.hpp"

namespace shapcred {

struct AgentArch {
   std::size_t obs_dim = 1;
   std::size_t hidden = 64;
   std::size_t units = 64;
   std::size_t n_actions = 2;
};

/// LSTM hidden and cell state for a batch (one column per sequence).
struct HiddenState {
   Mat h;
   Mat c;

   static HiddenState zeros(std::size_t hidden, Eigen::Index batch = 1)
   {
      const auto d = static_cast< Eigen::Index >(hidden);
      return {Mat::Zero(d, batch), Mat::Zero(d, batch)};
   }
};

struct AgentStep {
   Vec q;
   HiddenState next;
};

/// Local agent: LSTM cell, ReLU dense layer, linear output of one value per action.
///
/// Gate order in the stacked LSTM weights is input, forget, cell, output.
class AgentNet {
  public:
   explicit AgentNet(AgentArch arch) : arch_(arch)
   {
      if(arch_.obs_dim == 0 || arch_.hidden == 0 || arch_.units == 0 || arch_.n_actions == 0) {
         throw ShapeError("AgentNet: all dimensions must be positive");
      }
      auto layout = std::make_shared< ParamLayout >();
      const auto h4 = 4 * arch_.hidden;
      wx_ = layout->add("lstm.wx", h4, arch_.obs_dim);
      wh_ = layout->add("lstm.wh", h4, arch_.hidden);
      b_ = layout->add("lstm.b", h4, 1);
      w1_ = layout->add("fc1.w", arch_.units, arch_.hidden);
      b1_ = layout->add("fc1.b", arch_.units, 1);
      w2_ = layout->add("fc2.w", arch_.n_actions, arch_.units);
      b2_ = layout->add("fc2.b", arch_.n_actions, 1);
      params_ = ParamVector(std::move(layout));
   }

   [[nodiscard]] const AgentArch& arch() const noexcept { return arch_; }
   ParamVector& params() noexcept { return params_; }
   [[nodiscard]] const ParamVector& params() const noexcept { return params_; }

   /// Glorot-uniform weights, zero biases, forget-gate bias +1.
   void init(Rng& rng)
   {
      params_.set_zero();
      const auto d = static_cast< double >(arch_.obs_dim);
      const auto h = static_cast< double >(arch_.hidden);
      glorot_uniform(seg(wx_), rng, d + h, h);
      glorot_uniform(seg(wh_), rng, d + h, h);
      const auto hi = static_cast< Eigen::Index >(arch_.hidden);
      seg(b_).middleRows(hi, hi).setOnes();
      glorot_uniform(seg(w1_), rng, h, static_cast< double >(arch_.units));
      glorot_uniform(seg(w2_), rng, static_cast< double >(arch_.units), static_cast< double >(arch_.n_actions));
   }

   /// One recurrent step for a single observation.
   [[nodiscard]] AgentStep step(std::span< const double > obs, const HiddenState& h) const
   {
      if(obs.size() != arch_.obs_dim) {
         throw ShapeError("AgentNet: observation has the wrong width");
      }
      check_hidden(h, 1);
      Mat x = Eigen::Map< const Vec >(obs.data(), static_cast< Eigen::Index >(obs.size()));
      StepCache c = cell(x, h);
      AgentStep out;
      out.q = c.q.col(0);
      out.next = {c.h, c.c};
      return out;
   }

   /// Unrolls a batch of sequences from `h0` without recording.
   [[nodiscard]] std::vector< Mat > forward(const std::vector< Mat >& obs_seq, const HiddenState& h0) const
   {
      check_hidden(h0, obs_seq.empty() ? 0 : obs_seq[0].cols());
      std::vector< Mat > qs;
      HiddenState h = h0;
      for(const auto& x : obs_seq) {
         if(static_cast< std::size_t >(x.rows()) != arch_.obs_dim || x.cols() != h.h.cols()) {
            throw ShapeError("AgentNet: observation batch has the wrong shape");
         }
         StepCache c = cell(x, h);
         h = {std::move(c.h), std::move(c.c)};
         qs.push_back(std::move(c.q));
      }
      return qs;
   }

   /// Unrolls a batch of sequences from `h0`; returns q-values per step
   /// (n_actions x batch). Records the unroll for backward().
   std::vector< Mat > forward_train(const std::vector< Mat >& obs_seq, const HiddenState& h0)
   {
      if(obs_seq.empty()) {
         throw ShapeError("AgentNet: empty sequence");
      }
      const auto batch = obs_seq[0].cols();
      check_hidden(h0, batch);
      Tape t;
      t.steps.reserve(obs_seq.size());
      std::vector< Mat > qs;
      qs.reserve(obs_seq.size());
      HiddenState h = h0;
      for(const auto& x : obs_seq) {
         if(static_cast< std::size_t >(x.rows()) != arch_.obs_dim || x.cols() != batch) {
            throw ShapeError("AgentNet: observation batch has the wrong shape");
         }
         StepCache c = cell(x, h);
         c.x = x;
         c.h_prev = h.h;
         c.c_prev = h.c;
         h = {c.h, c.c};
         qs.push_back(c.q);
         t.steps.push_back(std::move(c));
      }
      tape_ = std::move(t);
      return qs;
   }

   /// Gradient of sum_t sum_b upstream[t](:, b) . q_t(:, b) through the
   /// recorded unroll (backpropagation through time).
   ParamVector backward(const std::vector< Mat >& upstream)
   {
      if(! tape_) {
         throw LifecycleError("AgentNet::backward called without a recorded forward pass");
      }
      Tape t = std::move(*tape_);
      tape_.reset();
      if(upstream.size() != t.steps.size()) {
         throw ShapeError("AgentNet::backward: upstream length differs from the unroll");
      }
      ParamVector g = params_.zeros_like();
      auto gwx = g.view(seg_of(wx_));
      auto gwh = g.view(seg_of(wh_));
      auto gb = g.view(seg_of(b_));
      auto gw1 = g.view(seg_of(w1_));
      auto gb1 = g.view(seg_of(b1_));
      auto gw2 = g.view(seg_of(w2_));
      auto gb2 = g.view(seg_of(b2_));
      const auto H = static_cast< Eigen::Index >(arch_.hidden);
      const auto batch = t.steps.front().x.cols();
      Mat dh_next = Mat::Zero(H, batch);
      Mat dc_next = Mat::Zero(H, batch);

      for(std::size_t k = t.steps.size(); k-- > 0;) {
         const auto& s = t.steps[k];
         const Mat& dq = upstream[k];
         if(dq.rows() != s.q.rows() || dq.cols() != batch) {
            throw ShapeError("AgentNet::backward: upstream gradient has the wrong shape");
         }
         Mat a1 = s.z1.cwiseMax(0.);
         gw2 += dq * a1.transpose();
         gb2 += dq.rowwise().sum();
         Mat dz1 = (cseg(w2_).transpose() * dq).cwiseProduct((s.z1.array() > 0.).cast< double >().matrix());
         gw1 += dz1 * s.h.transpose();
         gb1 += dz1.rowwise().sum();
         Mat dh = cseg(w1_).transpose() * dz1 + dh_next;

         const auto& i = s.gi;
         const auto& f = s.gf;
         const auto& gg = s.gg;
         const auto& o = s.go;
         Mat do_ = dh.cwiseProduct(s.tanh_c).cwiseProduct(o.cwiseProduct((1. - o.array()).matrix()));
         Mat dc = dh.cwiseProduct(o).cwiseProduct((1. - s.tanh_c.array().square()).matrix()) + dc_next;
         Mat di = dc.cwiseProduct(gg).cwiseProduct(i.cwiseProduct((1. - i.array()).matrix()));
         Mat df = dc.cwiseProduct(s.c_prev).cwiseProduct(f.cwiseProduct((1. - f.array()).matrix()));
         Mat dg = dc.cwiseProduct(i).cwiseProduct((1. - gg.array().square()).matrix());
         dc_next = dc.cwiseProduct(f);

         Mat dz(4 * H, batch);
         dz.middleRows(0, H) = di;
         dz.middleRows(H, H) = df;
         dz.middleRows(2 * H, H) = dg;
         dz.middleRows(3 * H, H) = do_;
         gwx += dz * s.x.transpose();
         gwh += dz * s.h_prev.transpose();
         gb += dz.rowwise().sum();
         dh_next = cseg(wh_).transpose() * dz;
      }
      return g;
   }

   [[nodiscard]] bool has_tape() const noexcept { return tape_.has_value(); }

  private:
   struct StepCache {
      Mat x, h_prev, c_prev;
      Mat gi, gf, gg, go;
      Mat c, tanh_c, h;
      Mat z1, q;
   };
   struct Tape {
      std::vector< StepCache > steps;
   };

   static Mat sigmoid(const Mat& z) { return (1. / (1. + (-z.array()).exp())).matrix(); }

   [[nodiscard]] StepCache cell(const Mat& x, const HiddenState& h) const
   {
      const auto H = static_cast< Eigen::Index >(arch_.hidden);
      Mat z = (cseg(wx_) * x + cseg(wh_) * h.h).colwise() + cseg(b_).col(0);
      StepCache s;
      s.gi = sigmoid(z.middleRows(0, H));
      s.gf = sigmoid(z.middleRows(H, H));
      s.gg = z.middleRows(2 * H, H).array().tanh().matrix();
      s.go = sigmoid(z.middleRows(3 * H, H));
      s.c = s.gf.cwiseProduct(h.c) + s.gi.cwiseProduct(s.gg);
      s.tanh_c = s.c.array().tanh().matrix();
      s.h = s.go.cwiseProduct(s.tanh_c);
      s.z1 = (cseg(w1_) * s.h).colwise() + cseg(b1_).col(0);
      s.q = (cseg(w2_) * s.z1.cwiseMax(0.)).colwise() + cseg(b2_).col(0);
      return s;
   }

   void check_hidden(const HiddenState& h, Eigen::Index batch) const
   {
      const auto H = static_cast< Eigen::Index >(arch_.hidden);
      if(h.h.rows() != H || h.c.rows() != H || h.h.cols() != batch || h.c.cols() != batch) {
         throw ShapeError("AgentNet: hidden state has the wrong shape");
      }
   }

   [[nodiscard]] const Segment& seg_of(std::size_t idx) const { return params_.layout().segments()[idx]; }
   MatMap seg(std::size_t idx) { return params_.view(seg_of(idx)); }
   [[nodiscard]] ConstMatMap cseg(std::size_t idx) const { return params_.view(seg_of(idx)); }

   AgentArch arch_;
   std::size_t wx_ = 0, wh_ = 0, b_ = 0, w1_ = 0, b1_ = 0, w2_ = 0, b2_ = 0;
   ParamVector params_;
   std::optional< Tape > tape_;
};

}  // namespace shapcred

#endif  // SHAPCRED_AGENT_NET_HPP
