#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <set>

#include "shapcred/envs/matrix_game.hpp"
#include "shapcred/envs/team_gridworld.hpp"
#include "shapcred/errors.hpp"
#include "shapcred/trainer.hpp"

using namespace shapcred;

namespace {

std::vector< double > matrix_payoff() { return {0.3, 0., 0., 0., 0., 0.6, 0., 1., 0.}; }

std::unique_ptr< Environment > matrix_env() { return std::make_unique< MatrixGame >(2, 3, matrix_payoff()); }

GridworldParams small_grid()
{
   GridworldParams p;
   p.width = 3;
   p.height = 3;
   p.n_agents = 2;
   p.targets = {{0, 0}, {2, 0}};
   p.starts = {{0, 2}, {2, 2}};
   p.episode_limit = 6;
   return p;
}

Hyperparams small_hp(std::uint64_t seed = 0)
{
   Hyperparams hp;
   hp.batch_size = 4;
   hp.buffer_capacity = 16;
   hp.training_episodes = 20;
   hp.exploration_episodes = 10;
   hp.eval_interval = 10;
   hp.eval_episodes = 5;
   hp.target_sync_interval = 5;
   hp.mc_samples = 2;
   hp.seed = seed;
   return hp;
}

ModelParams small_model()
{
   ModelParams m;
   m.critic_units = 8;
   m.critic_head_hidden = 4;
   m.agent_hidden = 6;
   m.agent_units = 6;
   return m;
}

std::vector< AgentNet > agents_for(const Environment& env, std::uint64_t seed)
{
   Rng rng(seed);
   std::vector< AgentNet > out;
   for(std::size_t i = 0; i < env.spec().n_agents; ++i) {
      out.emplace_back(AgentArch{env.spec().obs_dim, 6, 6, env.spec().action_space_size});
      out.back().init(rng);
   }
   return out;
}

Episode tagged_episode(double tag)
{
   Episode ep;
   EpisodeStep s;
   s.reward = tag;
   s.done = true;
   ep.steps.push_back(s);
   return ep;
}

}  // namespace

TEST(Epsilon, LinearAnnealThenFloor)
{
   Hyperparams hp;
   hp.epsilon_start = 1.;
   hp.epsilon_end = 0.05;
   hp.exploration_episodes = 100;
   EXPECT_EQ(epsilon(0, hp), 1.);
   EXPECT_NEAR(epsilon(50, hp), 0.525, 1e-12);
   EXPECT_NEAR(epsilon(100, hp), 0.05, 1e-12);
   EXPECT_EQ(epsilon(5000, hp), 0.05);
   double prev = 2.;
   for(std::size_t e = 0; e < 300; ++e) {
      const double v = epsilon(e, hp);
      EXPECT_LE(v, prev);
      EXPECT_GE(v, 0.05);
      prev = v;
   }
}

TEST(GreedyAction, LowestIndexWinsTies)
{
   EXPECT_EQ(greedy_action((Vec(4) << 1., 3., 3., 2.).finished()), 1u);
   EXPECT_EQ(greedy_action(Vec::Zero(5)), 0u);
}

TEST(RunEpisode, MatrixGameIsOneStep)
{
   auto env = matrix_env();
   auto agents = agents_for(*env, 0);
   Rng rng(1);
   const auto ep = run_episode(agents, *env, 0.5, rng);
   ASSERT_EQ(ep.length(), 1u);
   EXPECT_TRUE(ep.steps[0].done);
   ASSERT_EQ(ep.steps[0].hidden.size(), 2u);
   EXPECT_EQ(ep.steps[0].hidden[0].h, Mat::Zero(6, 1));
   EXPECT_EQ(ep.steps[0].reward, dynamic_cast< MatrixGame& >(*env).payoff(JointAction{ep.steps[0].actions}));
}

TEST(RunEpisode, GridworldRecordsHiddenStatesAndEndsOnce)
{
   TeamGridworld env(small_grid());
   auto agents = agents_for(env, 2);
   Rng rng(3);
   const auto ep = run_episode(agents, env, 1., rng);
   ASSERT_GE(ep.length(), 1u);
   EXPECT_LE(ep.length(), 6u);
   for(std::size_t t = 0; t + 1 < ep.length(); ++t) {
      EXPECT_FALSE(ep.steps[t].done);
   }
   EXPECT_TRUE(ep.steps.back().done);
   // the recorded state at t+1 is the agent's state after consuming observation t
   for(std::size_t t = 0; t + 1 < ep.length(); ++t) {
      for(std::size_t i = 0; i < 2; ++i) {
         const auto out = agents[i].step(ep.steps[t].observations[i], ep.steps[t].hidden[i]);
         EXPECT_EQ(out.next.h, ep.steps[t + 1].hidden[i].h);
         EXPECT_EQ(out.next.c, ep.steps[t + 1].hidden[i].c);
      }
   }
   std::vector< AgentNet > one(1, agents[0]);
   EXPECT_THROW((void)run_episode(one, env, 0., rng), ShapeError);
}

TEST(RunEpisode, GreedyMatchesArgmax)
{
   auto env = matrix_env();
   auto agents = agents_for(*env, 4);
   Rng rng(0);
   const auto ep = run_episode(agents, *env, 0., rng);
   for(std::size_t i = 0; i < 2; ++i) {
      const auto out = agents[i].step(ep.steps[0].observations[i], HiddenState::zeros(6));
      EXPECT_EQ(ep.steps[0].actions[i], greedy_action(out.q));
   }
}

TEST(Evaluate, NeedsEpisodes)
{
   auto env = matrix_env();
   auto agents = agents_for(*env, 0);
   Rng rng(0);
   EXPECT_THROW((void)evaluate(agents, *env, 0, rng), ParameterError);
   const auto r = evaluate(agents, *env, 3, rng);
   EXPECT_GE(r.success_rate, 0.);
   EXPECT_LE(r.success_rate, 1.);
}

TEST(ReplayBuffer, DropsOldestFirst)
{
   ReplayBuffer buf(3);
   for(int k = 0; k < 5; ++k) {
      buf.push(tagged_episode(k));
   }
   ASSERT_EQ(buf.size(), 3u);
   EXPECT_EQ(buf[0].steps[0].reward, 2.);
   EXPECT_EQ(buf[2].steps[0].reward, 4.);
   EXPECT_THROW(ReplayBuffer(0), ParameterError);
}

TEST(ReplayBuffer, SamplesDistinctEpisodes)
{
   ReplayBuffer buf(10);
   for(int k = 0; k < 10; ++k) {
      buf.push(tagged_episode(k));
   }
   Rng rng(5);
   for(int trial = 0; trial < 50; ++trial) {
      const auto s = buf.sample(4, rng);
      ASSERT_EQ(s.size(), 4u);
      EXPECT_EQ(std::set< const Episode* >(s.begin(), s.end()).size(), 4u);
   }
   EXPECT_EQ(buf.sample(25, rng).size(), 10u);
   EXPECT_THROW((void)buf.sample(0, rng), ParameterError);
}

TEST(Collate, PadsAndLinksSteps)
{
   TeamGridworld env(small_grid());
   auto agents = agents_for(env, 6);
   Rng rng(8);
   Episode a = run_episode(agents, env, 1., rng);
   Episode b = run_episode(agents, env, 1., rng);
   b.steps.resize(1);
   b.steps[0].done = true;
   const Batch batch = collate({&a, &b}, env.spec());
   EXPECT_EQ(batch.steps(), a.length() + 1);
   EXPECT_EQ(batch.max_len, a.length());
   for(std::size_t t = 0; t < a.length(); ++t) {
      EXPECT_EQ(batch.col_of[0][t], static_cast< long >(t));
      EXPECT_EQ(batch.next_col[t], t + 1 < a.length() ? static_cast< long >(t + 1) : -1);
   }
   EXPECT_EQ(batch.col_of[1][0], static_cast< long >(a.length()));
   for(std::size_t t = 1; t < batch.max_len; ++t) {
      EXPECT_EQ(batch.col_of[1][t], -1);
      EXPECT_EQ(batch.agent_obs[0][t].col(1), Vec::Zero(static_cast< Eigen::Index >(env.spec().obs_dim)));
   }
   const auto so = static_cast< Eigen::Index >(env.spec().state_obs_dim);
   for(std::size_t c = 0; c < batch.steps(); ++c) {
      for(std::size_t i = 0; i < 2; ++i) {
         const auto enc = batch.critic_inputs[i].col(static_cast< Eigen::Index >(c)).tail(5);
         EXPECT_EQ(enc.sum(), 1.);
         EXPECT_EQ(enc(static_cast< Eigen::Index >(batch.actions[i][c])), 1.);
      }
   }
   (void)so;
   EXPECT_THROW((void)collate({}, env.spec()), ParameterError);
}

TEST(TdTargets, TerminalStepsUseTheRewardOnly)
{
   TeamGridworld env(small_grid());
   auto agents = agents_for(env, 9);
   Rng rng(10);
   Episode a = run_episode(agents, env, 1., rng);
   Episode b = run_episode(agents, env, 1., rng);
   const Batch batch = collate({&a, &b}, env.spec());
   CriticArch arch;
   arch.n_agents = 2;
   arch.obs_dim = env.spec().state_obs_dim;
   arch.n_actions = 5;
   arch.groups = env.spec().groups;
   arch.units = 8;
   arch.head_hidden = 4;
   CriticNet target(arch);
   target.init(rng);
   const Vec y = td_targets(target, batch, 0.9);
   const RowVec q = target.forward_batch(batch.critic_inputs);
   for(std::size_t c = 0; c < batch.steps(); ++c) {
      const auto ci = static_cast< Eigen::Index >(c);
      if(batch.next_col[c] < 0) {
         EXPECT_EQ(y(ci), batch.rewards(ci));
      } else {
         EXPECT_NEAR(y(ci), batch.rewards(ci) + 0.9 * q(batch.next_col[c]), 1e-14);
      }
   }
   // bootstrapping with the recorded actions given explicitly changes nothing
   EXPECT_EQ(td_targets(target, batch, 0.9, &batch.actions), y);
   const auto greedy = greedy_actions(agents, batch);
   ASSERT_EQ(greedy.size(), 2u);
   EXPECT_EQ(greedy[0].size(), batch.steps());
}

TEST(CriticUpdate, ReducesTdErrorOnAFixedBatch)
{
   auto env = matrix_env();
   auto agents = agents_for(*env, 0);
   Rng rng(1);
   std::vector< Episode > eps;
   for(int k = 0; k < 8; ++k) {
      eps.push_back(run_episode(agents, *env, 1., rng));
   }
   std::vector< const Episode* > ptrs;
   for(const auto& e : eps) {
      ptrs.push_back(&e);
   }
   const Batch b = collate(ptrs, env->spec());
   CriticArch arch;
   arch.n_agents = 2;
   arch.obs_dim = env->spec().state_obs_dim;
   arch.n_actions = 3;
   arch.groups = env->spec().groups;
   arch.units = 8;
   CriticNet critic(arch);
   critic.init(rng);
   const CriticNet target = critic;
   Optimizer opt(OptimizerConfig::adam(0.01), critic.params().size());
   const double first = critic_td_update(critic, target, b, opt, 0.99);
   double last = first;
   for(int k = 0; k < 200; ++k) {
      last = critic_td_update(critic, target, b, opt, 0.99);
   }
   EXPECT_LT(last, 0.1 * first);
   EXPECT_NE(critic.params().data(), target.params().data());
}

TEST(AgentUpdate, LeavesTheCriticUntouched)
{
   auto env = matrix_env();
   auto agents = agents_for(*env, 0);
   Rng rng(2);
   Episode e = run_episode(agents, *env, 1., rng);
   const Batch b = collate({&e}, env->spec());
   CriticArch arch;
   arch.n_agents = 2;
   arch.obs_dim = env->spec().state_obs_dim;
   arch.n_actions = 3;
   arch.groups = env->spec().groups;
   arch.units = 8;
   arch.head_hidden = 4;
   CriticNet critic(arch);
   critic.init(rng);
   const Vec before = critic.params().data();
   std::vector< Optimizer > opts;
   for(const auto& a : agents) {
      opts.emplace_back(OptimizerConfig::rmsprop(0.005), a.params().size());
   }
   const Vec agent_before = agents[0].params().data();
   Hyperparams hp = small_hp();
   for(auto s : {CreditStrategy::shapley_mc, CreditStrategy::shapley_exact, CreditStrategy::plain_cf,
                 CreditStrategy::uniform}) {
      hp.credit_strategy = s;
      const auto r = agent_update(agents, critic, b, hp, rng, opts);
      EXPECT_EQ(critic.params().data(), before);
      EXPECT_GT(r.critic_evaluations, 0u);
      if(s == CreditStrategy::uniform) {
         EXPECT_EQ(r.credits[0][0], r.credits[1][0]);
      }
   }
   EXPECT_NE(agents[0].params().data(), agent_before);
}

TEST(Trainer, CreditsUseTheFreshlyUpdatedCritic)
{
   Trainer t(matrix_env(), small_hp(), small_model());
   EXPECT_EQ(t.critic_version(), 0u);
   for(std::size_t k = 1; k <= 7; ++k) {
      t.train_episode();
      EXPECT_EQ(t.critic_version(), k);
      EXPECT_EQ(t.credit_critic_version(), t.critic_version());
   }
   EXPECT_EQ(t.episodes_done(), 7u);
   EXPECT_EQ(t.buffer().size(), 7u);
}

TEST(Trainer, TargetFollowsTheSyncInterval)
{
   Trainer t(matrix_env(), small_hp(), small_model());
   for(int k = 0; k < 4; ++k) {
      t.train_episode();
   }
   EXPECT_NE(t.critic().params().data(), t.target_critic().params().data());
   t.train_episode();
   EXPECT_EQ(t.critic().params().data(), t.target_critic().params().data());
}

TEST(Trainer, SameSeedSameRun)
{
   for(auto s : {CreditStrategy::shapley_mc, CreditStrategy::plain_cf}) {
      Hyperparams hp = small_hp(7);
      hp.credit_strategy = s;
      Trainer a(std::make_unique< TeamGridworld >(small_grid()), hp, small_model());
      Trainer b(std::make_unique< TeamGridworld >(small_grid()), hp, small_model());
      const auto ra = a.train();
      const auto rb = b.train();
      ASSERT_EQ(ra.size(), 3u);
      ASSERT_EQ(ra.size(), rb.size());
      for(std::size_t k = 0; k < ra.size(); ++k) {
         EXPECT_EQ(ra[k].episode, rb[k].episode);
         EXPECT_EQ(ra[k].eval_return, rb[k].eval_return);
         EXPECT_EQ(std::bit_cast< std::uint64_t >(ra[k].critic_loss), std::bit_cast< std::uint64_t >(rb[k].critic_loss));
         EXPECT_EQ(std::bit_cast< std::uint64_t >(ra[k].credit_std), std::bit_cast< std::uint64_t >(rb[k].credit_std));
      }
      EXPECT_EQ(a.critic().params().data(), b.critic().params().data());
      EXPECT_EQ(a.agents()[1].params().data(), b.agents()[1].params().data());
   }
   Trainer c(std::make_unique< TeamGridworld >(small_grid()), small_hp(8), small_model());
   Trainer d(std::make_unique< TeamGridworld >(small_grid()), small_hp(7), small_model());
   EXPECT_NE(c.critic().params().data(), d.critic().params().data());
}

TEST(Trainer, ZeroEpisodesGiveOneRecord)
{
   Hyperparams hp = small_hp();
   hp.training_episodes = 0;
   Trainer t(matrix_env(), hp, small_model());
   const auto r = t.train();
   ASSERT_EQ(r.size(), 1u);
   EXPECT_EQ(r[0].episode, 0u);
   EXPECT_EQ(r[0].epsilon, 1.);
   EXPECT_TRUE(std::isnan(r[0].critic_loss));
   EXPECT_TRUE(std::isnan(r[0].credit_mean));
}

TEST(Trainer, CallbackCanStopTraining)
{
   Trainer t(matrix_env(), small_hp(), small_model());
   std::size_t calls = 0;
   const auto r = t.train([&](const MetricsRecord&) { return ++calls < 2; });
   EXPECT_EQ(r.size(), 2u);
   EXPECT_EQ(t.episodes_done(), 10u);
}

TEST(Trainer, RejectsBadConfiguration)
{
   Hyperparams hp = small_hp();
   hp.gamma = 1.5;
   try {
      Trainer t(matrix_env(), hp, small_model());
      FAIL() << "gamma = 1.5 accepted";
   } catch(const ConfigError& e) {
      EXPECT_EQ(e.field(), "gamma");
   }
   hp = small_hp();
   hp.credit_strategy = CreditStrategy::shapley_exact;
   hp.exact_cap = 1;
   EXPECT_THROW(Trainer(matrix_env(), hp, small_model()), ConfigError);
   EXPECT_THROW(Trainer(nullptr, small_hp(), small_model()), ConfigError);
}

TEST(Trainer, ZeroAgentsTieAtTheFirstAction)
{
   auto env = matrix_env();
   std::vector< AgentNet > zero;
   for(int i = 0; i < 2; ++i) {
      zero.emplace_back(AgentArch{env->spec().obs_dim, 6, 6, 3});
   }
   Rng rng(0);
   const auto r = evaluate(zero, *env, 4, rng);
   EXPECT_EQ(r.mean_return, 0.3);
}
