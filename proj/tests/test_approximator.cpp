#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "shapcred/agent_net.hpp"
#include "shapcred/critic_net.hpp"
#include "shapcred/errors.hpp"
#include "shapcred/optimizer.hpp"
#include "shapcred/param_vector.hpp"

using namespace shapcred;

namespace {

CriticArch small_critic(std::size_t head_hidden, std::vector< std::string > groups = {"a", "b"})
{
   CriticArch a;
   a.n_agents = groups.size();
   a.obs_dim = 3;
   a.n_actions = 3;
   a.groups = std::move(groups);
   a.units = 8;
   a.head_hidden = head_hidden;
   return a;
}

void randomize(ParamVector& p, Rng& rng, double scale = 0.5)
{
   std::uniform_real_distribution< double > u(-scale, scale);
   for(Eigen::Index k = 0; k < p.data().size(); ++k) {
      p.data()[k] = u(rng);
   }
}

std::vector< Mat > random_inputs(const CriticNet& net, Eigen::Index batch, Rng& rng)
{
   std::uniform_real_distribution< double > u(0., 1.);
   std::uniform_int_distribution< std::size_t > act(0, net.arch().n_actions - 1);
   std::vector< Mat > in(net.n_agents(), Mat(net.arch().input_dim(), batch));
   for(auto& m : in) {
      for(Eigen::Index b = 0; b < batch; ++b) {
         std::vector< double > obs(net.arch().obs_dim);
         for(auto& o : obs) {
            o = u(rng);
         }
         m.col(b) = net.make_input(obs, one_hot(act(rng), net.arch().n_actions));
      }
   }
   return in;
}

}  // namespace

TEST(ParamLayout, SegmentsPartitionTheVector)
{
   CriticNet c(small_critic(4, {"a", "a", "b"}));
   std::size_t expect = 0;
   for(const auto& s : c.params().layout().segments()) {
      EXPECT_EQ(s.offset, expect) << s.name;
      expect += s.length();
   }
   EXPECT_EQ(expect, c.params().size());
   EXPECT_THROW((void)c.params().layout().at("nope"), ShapeError);
}

TEST(CopyParams, BitIdenticalAndShapeChecked)
{
   Rng rng(1);
   CriticNet a(small_critic(0)), b(small_critic(0));
   randomize(a.params(), rng);
   copy_params(a.params(), b.params());
   EXPECT_EQ(a.params().data(), b.params().data());
   CriticNet c(small_critic(5));
   EXPECT_THROW(copy_params(a.params(), c.params()), ShapeError);
}

TEST(CriticNet, ZeroParametersGiveZero)
{
   CriticNet c(small_critic(4));
   Rng rng(2);
   const auto in = random_inputs(c, 5, rng);
   EXPECT_EQ(c.forward_batch(in), RowVec::Zero(5));
}

TEST(CriticNet, SameGroupSharesExtractor)
{
   CriticNet c(small_critic(0, {"g", "g", "h"}));
   Rng rng(3);
   c.init(rng);
   EXPECT_EQ(c.group_of(0), c.group_of(1));
   EXPECT_NE(c.group_of(0), c.group_of(2));
   EXPECT_NE(c.params().layout().find("ext.g.w1"), nullptr);
   EXPECT_EQ(c.params().layout().find("ext.g.w1"), &c.params().layout().at("ext.g.w1"));
   const auto in = random_inputs(c, 4, rng);
   EXPECT_EQ(c.features(0, in[0]), c.features(1, in[0]));
   EXPECT_NE(c.features(0, in[0]), c.features(2, in[0]));
}

TEST(CriticNet, RejectsMalformedInputs)
{
   CriticNet c(small_critic(0));
   std::vector< Mat > in(2, Mat::Zero(5, 1));
   EXPECT_THROW((void)c.forward_batch(in), ShapeError);
   std::vector< Mat > one(1, Mat::Zero(6, 1));
   EXPECT_THROW((void)c.forward_batch(one), ShapeError);
   EXPECT_THROW((void)c.backward(RowVec::Zero(1)), LifecycleError);
}

TEST(CriticNet, ForwardPathsAgree)
{
   Rng rng(4);
   for(std::size_t h : {0u, 6u}) {
      CriticNet c(small_critic(h));
      c.init(rng);
      randomize(c.params(), rng);
      const auto in = random_inputs(c, 3, rng);
      const RowVec batch = c.forward_batch(in);
      const RowVec train = c.forward_train(in);
      EXPECT_EQ(batch, train);
      RowVec via_blocks(3);
      Mat pre = c.head_block(0, c.features(0, in[0])) + c.head_block(1, c.features(1, in[1]));
      via_blocks = c.head_from_preactivation(pre);
      for(int b = 0; b < 3; ++b) {
         EXPECT_NEAR(via_blocks(b), batch(b), 1e-12);
      }
   }
}

TEST(CriticGradient, MatchesFiniteDifferences)
{
   for(std::uint64_t seed = 0; seed < 10; ++seed) {
      for(std::size_t h : {0u, 6u}) {
         Rng rng(seed);
         CriticNet c(small_critic(h));
         ASSERT_LE(c.params().size(), 1000u);
         randomize(c.params(), rng);
         const auto in = random_inputs(c, 4, rng);
         RowVec up(4);
         std::uniform_real_distribution< double > u(-1., 1.);
         for(int b = 0; b < 4; ++b) {
            up(b) = u(rng);
         }
         c.forward_train(in);
         const Vec analytic = c.backward(up).data();
         auto loss = [&](const Vec& theta) {
            CriticNet probe = c;
            probe.params().data() = theta;
            return probe.forward_batch(in).dot(up);
         };
         const Vec numeric = oracle::fd_gradient(loss, c.params().data());
         EXPECT_LE(oracle::max_relative_error(analytic, numeric), 1e-4) << "seed " << seed << " head " << h;
      }
   }
}

TEST(CriticGradient, InputDirectionalDerivative)
{
   for(std::uint64_t seed = 0; seed < 10; ++seed) {
      Rng rng(100 + seed);
      CriticNet c(small_critic(6));
      randomize(c.params(), rng);
      auto in = random_inputs(c, 1, rng);
      c.forward_train(in);
      const ParamVector g = c.backward(RowVec::Ones(1));
      // through the first layer: d out / d x_k = sum_j W1[j,k] * (dL/dW1[j,k]) / x_k
      const auto w1 = c.params()["ext.a.w1"];
      const auto gw1 = g["ext.a.w1"];
      const Eigen::Index k = 1;
      const double xk = in[0](k, 0);
      ASSERT_GT(std::abs(xk), 1e-3);
      double analytic = 0.;
      for(Eigen::Index j = 0; j < w1.rows(); ++j) {
         analytic += w1(j, k) * gw1(j, k) / xk;
      }
      const double eps = 1e-5;
      auto up = in, down = in;
      up[0](k, 0) += eps;
      down[0](k, 0) -= eps;
      const double numeric = (c.forward_batch(up)(0) - c.forward_batch(down)(0)) / (2 * eps);
      EXPECT_LE(std::abs(analytic - numeric), 1e-4 * std::max({std::abs(analytic), std::abs(numeric), 1e-6}));
   }
}

TEST(CriticGradient, SharedGroupAccumulates)
{
   Rng rng(5);
   CriticNet shared(small_critic(0, {"g", "g"}));
   randomize(shared.params(), rng);
   const auto in = random_inputs(shared, 2, rng);
   shared.forward_train(in);
   const Vec analytic = shared.backward(RowVec::Ones(2)).data();
   auto loss = [&](const Vec& theta) {
      CriticNet probe = shared;
      probe.params().data() = theta;
      return probe.forward_batch(in).sum();
   };
   EXPECT_LE(oracle::max_relative_error(analytic, oracle::fd_gradient(loss, shared.params().data())), 1e-4);
}

TEST(AgentNet, ZeroParametersGiveTiedValues)
{
   AgentNet a(AgentArch{3, 6, 5, 4});
   const std::vector< double > obs{0.2, -1., 3.};
   const auto out = a.step(obs, HiddenState::zeros(6));
   EXPECT_EQ(out.q, Vec::Zero(4));
   EXPECT_EQ(out.next.h.rows(), 6);
}

TEST(AgentNet, StepAndUnrollAgree)
{
   Rng rng(6);
   AgentNet a(AgentArch{3, 6, 5, 4});
   a.init(rng);
   std::vector< Mat > seq;
   HiddenState h = HiddenState::zeros(6);
   std::vector< Vec > stepwise;
   for(int t = 0; t < 4; ++t) {
      Vec x = Vec::Random(3);
      seq.push_back(x);
      const auto s = a.step(std::span< const double >(x.data(), 3), h);
      stepwise.push_back(s.q);
      h = s.next;
   }
   const auto unrolled = a.forward(seq, HiddenState::zeros(6));
   for(int t = 0; t < 4; ++t) {
      EXPECT_TRUE(unrolled[t].col(0).isApprox(stepwise[t], 1e-14));
   }
   EXPECT_THROW((void)a.step(std::vector< double >(2, 0.), HiddenState::zeros(6)), ShapeError);
   EXPECT_THROW((void)a.step(std::vector< double >(3, 0.), HiddenState::zeros(5)), ShapeError);
}

TEST(AgentGradient, ThreeStepUnrollMatchesFiniteDifferences)
{
   for(std::uint64_t seed = 0; seed < 10; ++seed) {
      Rng rng(seed);
      AgentNet a(AgentArch{3, 6, 5, 3});
      ASSERT_LE(a.params().size(), 1000u);
      randomize(a.params(), rng);
      std::vector< Mat > seq;
      std::vector< Mat > up;
      std::uniform_real_distribution< double > u(-1., 1.);
      for(int t = 0; t < 3; ++t) {
         Mat x(3, 2), g(3, 2);
         for(Eigen::Index k = 0; k < x.size(); ++k) {
            x.data()[k] = u(rng);
            g.data()[k] = u(rng);
         }
         seq.push_back(x);
         up.push_back(g);
      }
      HiddenState h0 = HiddenState::zeros(6, 2);
      h0.h.setRandom();
      h0.c.setRandom();
      a.forward_train(seq, h0);
      const Vec analytic = a.backward(up).data();
      auto loss = [&](const Vec& theta) {
         AgentNet probe = a;
         probe.params().data() = theta;
         const auto qs = probe.forward(seq, h0);
         double l = 0.;
         for(int t = 0; t < 3; ++t) {
            l += qs[t].cwiseProduct(up[t]).sum();
         }
         return l;
      };
      const Vec numeric = oracle::fd_gradient(loss, a.params().data());
      EXPECT_LE(oracle::max_relative_error(analytic, numeric), 1e-4) << "seed " << seed;
   }
}

TEST(AgentGradient, BackwardNeedsARecordedUnroll)
{
   AgentNet a(AgentArch{3, 6, 5, 3});
   EXPECT_THROW((void)a.backward({}), LifecycleError);
}

TEST(Optimizer, ZeroGradientLeavesParametersUnchanged)
{
   for(auto cfg : {OptimizerConfig::adam(0.01), OptimizerConfig::rmsprop(0.005)}) {
      Optimizer opt(cfg, 4);
      Vec p(4);
      p << 1., -2., 3., 0.5;
      const Vec before = p;
      for(int k = 0; k < 3; ++k) {
         opt.step(p, Vec::Zero(4));
      }
      EXPECT_EQ(p, before);
      EXPECT_EQ(opt.step_count(), 3u);
   }
}

TEST(Optimizer, AdamFirstStepIsAboutTheLearningRate)
{
   for(double g : {1e-3, 0.7, -42.}) {
      Optimizer opt(OptimizerConfig::adam(0.01), 1);
      Vec p = Vec::Zero(1);
      opt.step(p, Vec::Constant(1, g));
      // bias-corrected moments are g and g^2: step = lr * g / (|g| + eps)
      EXPECT_NEAR(p(0), -0.01 * g / (std::abs(g) + 1e-8), 1e-15);
      EXPECT_NEAR(std::abs(p(0)), 0.01, 1e-7);
   }
}

TEST(Optimizer, RmspropFirstStepClosedForm)
{
   Optimizer opt(OptimizerConfig::rmsprop(0.005), 1);
   Vec p = Vec::Zero(1);
   const double g = 0.3;
   opt.step(p, Vec::Constant(1, g));
   EXPECT_NEAR(p(0), -0.005 * g / (std::sqrt(0.01 * g * g) + 1e-5), 1e-15);
}

TEST(Optimizer, DeterministicAndShapeChecked)
{
   Rng rng(7);
   Vec g = Vec::Random(5);
   Optimizer a(OptimizerConfig::adam(0.01), 5), b(OptimizerConfig::adam(0.01), 5);
   Vec pa = Vec::Ones(5), pb = Vec::Ones(5);
   for(int k = 0; k < 10; ++k) {
      a.step(pa, g * k);
      b.step(pb, g * k);
   }
   EXPECT_EQ(pa, pb);
   Vec wrong = Vec::Zero(4);
   EXPECT_THROW(a.step(pa, wrong), ShapeError);
}

TEST(Optimizer, GradientClipping)
{
   Vec g(2);
   g << 3., 4.;
   EXPECT_DOUBLE_EQ(clip_grad_norm(g, 0.), 5.);
   EXPECT_EQ(g, (Vec(2) << 3., 4.).finished());
   clip_grad_norm(g, 1.);
   EXPECT_NEAR(g.norm(), 1., 1e-15);
}
