#ifndef SHAPCRED_TRAINER_HPP
#define SHAPCRED_TRAINER_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "shapcred/agent_net.hpp"
#include "shapcred/credit.hpp"
#include "shapcred/critic_net.hpp"
#include "shapcred/dec_pomdp.hpp"
#include "shapcred/episode.hpp"
#include "shapcred/errors.hpp"
#include "shapcred/optimizer.hpp"
#include "shapcred/rng.hpp"

namespace shapcred {

/// How the TD target picks the joint action at the next step.
enum class Bootstrap { recorded, greedy };

struct ModelParams {
   std::size_t critic_units = 64;
   /// 0 keeps the single linear output unit over the fused features
   std::size_t critic_head_hidden = 0;
   std::size_t agent_hidden = 64;
   std::size_t agent_units = 64;

   friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct Hyperparams {
   std::size_t batch_size = 32;
   std::size_t buffer_capacity = 1000;
   std::size_t training_episodes = 20000;
   std::size_t exploration_episodes = 1000;
   double epsilon_start = 1.0;
   double epsilon_end = 0.0;
   double gamma = 0.99;
   std::size_t target_sync_interval = 200;
   std::size_t eval_interval = 100;
   std::size_t eval_episodes = 100;
   double agent_lr = 0.005;
   double critic_lr = 0.01;
   std::size_t mc_samples = 5;
   CreditStrategy credit_strategy = CreditStrategy::shapley_mc;
   std::uint64_t seed = 0;
   std::size_t exact_cap = default_exact_cap;
   Bootstrap bootstrap = Bootstrap::recorded;
   /// global L2 gradient-norm bound per update; 0 disables clipping
   double grad_clip = 0.;

   friend bool operator==(const Hyperparams&, const Hyperparams&) = default;

   /// decrement of epsilon per episode
   [[nodiscard]] double sigma() const
   {
      return (epsilon_start - epsilon_end) / static_cast< double >(exploration_episodes);
   }

   void validate() const
   {
      auto positive = [](std::size_t v, const char* field) {
         if(v == 0) {
            throw ConfigError(field, "must be positive");
         }
      };
      positive(batch_size, "batch_size");
      positive(buffer_capacity, "buffer_capacity");
      positive(exploration_episodes, "exploration_episodes");
      positive(target_sync_interval, "target_sync_interval");
      positive(eval_interval, "eval_interval");
      positive(eval_episodes, "eval_episodes");
      positive(mc_samples, "mc_samples");
      positive(exact_cap, "exact_cap");
      if(! (gamma >= 0. && gamma <= 1.)) {
         throw ConfigError("gamma", "must lie in [0, 1]");
      }
      if(! (epsilon_start >= 0. && epsilon_start <= 1.)) {
         throw ConfigError("epsilon_start", "must lie in [0, 1]");
      }
      if(! (epsilon_end >= 0. && epsilon_end <= epsilon_start)) {
         throw ConfigError("epsilon_end", "must lie in [0, epsilon_start]");
      }
      if(! (agent_lr > 0.)) {
         throw ConfigError("agent_lr", "must be positive");
      }
      if(! (critic_lr > 0.)) {
         throw ConfigError("critic_lr", "must be positive");
      }
      if(! (grad_clip >= 0.)) {
         throw ConfigError("grad_clip", "must be non-negative");
      }
   }
};

/// max(epsilon_start - eps * sigma, 0), floored at epsilon_end.
inline double epsilon(std::size_t eps, const Hyperparams& hp)
{
   const double e = hp.epsilon_start - static_cast< double >(eps) * hp.sigma();
   return std::max({e, hp.epsilon_end, 0.});
}

/// Index of the largest value; the lowest index wins ties.
inline std::size_t greedy_action(const Vec& q)
{
   std::size_t best = 0;
   for(Eigen::Index a = 1; a < q.size(); ++a) {
      if(q(a) > q(static_cast< Eigen::Index >(best))) {
         best = static_cast< std::size_t >(a);
      }
   }
   return best;
}

/// Rolls out one episode: hidden states start at zero; each agent acts
/// greedily with probability 1 - eps and uniformly at random otherwise.
inline Episode run_episode(const std::vector< AgentNet >& agents, Environment& env, double eps, Rng& rng)
{
   const auto& sp = env.spec();
   if(agents.size() != sp.n_agents) {
      throw ShapeError("run_episode: agent count differs from the environment");
   }
   for(const auto& a : agents) {
      if(a.arch().n_actions != sp.action_space_size || a.arch().obs_dim != sp.obs_dim) {
         throw ShapeError("run_episode: agent network does not match the environment");
      }
   }
   std::uniform_int_distribution< std::size_t > random_action(0, sp.action_space_size - 1);
   Episode ep;
   StepResult cur = env.reset(rng);
   std::vector< HiddenState > h;
   h.reserve(sp.n_agents);
   for(const auto& a : agents) {
      h.push_back(HiddenState::zeros(a.arch().hidden));
   }
   while(true) {
      EpisodeStep step;
      step.observations = cur.observations;
      step.state_observations = cur.state_observations;
      step.hidden = h;
      step.actions.resize(sp.n_agents);
      for(std::size_t i = 0; i < sp.n_agents; ++i) {
         auto out = agents[i].step(cur.observations[i], h[i]);
         h[i] = std::move(out.next);
         const bool explore = uniform01(rng) < eps;
         step.actions[i] = explore ? random_action(rng) : greedy_action(out.q);
      }
      StepResult next = env.step(JointAction{step.actions});
      step.reward = next.reward;
      step.done = next.done;
      ep.steps.push_back(std::move(step));
      if(next.done) {
         break;
      }
      cur = std::move(next);
   }
   ep.success = env.episode_success();
   return ep;
}

struct EvalResult {
   double mean_return = 0.;
   double success_rate = 0.;
};

/// Greedy (eps = 0) rollouts.
inline EvalResult evaluate(const std::vector< AgentNet >& agents, Environment& env, std::size_t episodes, Rng& rng)
{
   if(episodes == 0) {
      throw ParameterError("evaluate: at least one episode is required");
   }
   EvalResult r;
   for(std::size_t k = 0; k < episodes; ++k) {
      const auto ep = run_episode(agents, env, 0., rng);
      r.mean_return += ep.total_return();
      r.success_rate += ep.success ? 1. : 0.;
   }
   r.mean_return /= static_cast< double >(episodes);
   r.success_rate /= static_cast< double >(episodes);
   return r;
}

/// Episodes collated for both training stages. Critic-side data is flattened
/// over valid steps (episode-major); agent-side data is time-major and
/// zero-padded to the longest episode.
struct Batch {
   std::size_t n_agents = 0;
   std::size_t n_actions = 0;
   std::size_t episodes = 0;
   std::size_t max_len = 0;
   /// per agent: critic input (state observation over one-hot action), one column per valid step
   std::vector< Mat > critic_inputs;
   /// per valid step: column of the next step, -1 at the terminal step
   std::vector< long > next_col;
   Vec rewards;
   /// actions[i][col]
   std::vector< std::vector< std::size_t > > actions;
   /// col_of[b][t]
   std::vector< std::vector< long > > col_of;
   /// per agent, per time step: observations (obs_dim x episodes)
   std::vector< std::vector< Mat > > agent_obs;
   /// per agent: recorded initial recurrent state
   std::vector< HiddenState > h0;

   [[nodiscard]] std::size_t steps() const noexcept { return next_col.size(); }
};

inline Batch collate(const std::vector< const Episode* >& episodes, const DecPomdpSpec& sp)
{
   if(episodes.empty()) {
      throw ParameterError("collate: empty batch");
   }
   Batch b;
   b.n_agents = sp.n_agents;
   b.n_actions = sp.action_space_size;
   b.episodes = episodes.size();
   std::size_t total = 0;
   for(const auto* ep : episodes) {
      b.max_len = std::max(b.max_len, ep->length());
      total += ep->length();
   }
   const auto n_cols = static_cast< Eigen::Index >(total);
   const auto in_dim = static_cast< Eigen::Index >(sp.state_obs_dim + sp.action_space_size);
   b.critic_inputs.assign(sp.n_agents, Mat::Zero(in_dim, n_cols));
   b.rewards.resize(n_cols);
   b.actions.assign(sp.n_agents, std::vector< std::size_t >(total));
   b.col_of.assign(episodes.size(), std::vector< long >(b.max_len, -1));
   b.next_col.reserve(total);
   const auto n_ep = static_cast< Eigen::Index >(episodes.size());
   b.agent_obs.assign(sp.n_agents,
                      std::vector< Mat >(b.max_len, Mat::Zero(static_cast< Eigen::Index >(sp.obs_dim), n_ep)));

   long col = 0;
   for(std::size_t e = 0; e < episodes.size(); ++e) {
      const auto& ep = *episodes[e];
      for(std::size_t t = 0; t < ep.length(); ++t, ++col) {
         const auto& s = ep.steps[t];
         b.col_of[e][t] = col;
         b.next_col.push_back(s.done ? -1 : col + 1);
         b.rewards(col) = s.reward;
         for(std::size_t i = 0; i < sp.n_agents; ++i) {
            auto& x = b.critic_inputs[i];
            for(std::size_t k = 0; k < sp.state_obs_dim; ++k) {
               x(static_cast< Eigen::Index >(k), col) = s.state_observations[i][k];
            }
            x(static_cast< Eigen::Index >(sp.state_obs_dim + s.actions[i]), col) = 1.;
            b.actions[i][static_cast< std::size_t >(col)] = s.actions[i];
            for(std::size_t k = 0; k < sp.obs_dim; ++k) {
               b.agent_obs[i][t](static_cast< Eigen::Index >(k), static_cast< Eigen::Index >(e))
                  = s.observations[i][k];
            }
         }
      }
   }
   for(std::size_t i = 0; i < sp.n_agents; ++i) {
      const auto hidden = episodes[0]->steps.at(0).hidden.at(i).h.rows();
      HiddenState h{Mat::Zero(hidden, n_ep), Mat::Zero(hidden, n_ep)};
      for(std::size_t e = 0; e < episodes.size(); ++e) {
         const auto& rec = episodes[e]->steps.at(0).hidden.at(i);
         h.h.col(static_cast< Eigen::Index >(e)) = rec.h.col(0);
         h.c.col(static_cast< Eigen::Index >(e)) = rec.c.col(0);
      }
      b.h0.push_back(std::move(h));
   }
   return b;
}

/// Greedy joint actions of the current agents at every valid step of the batch.
inline std::vector< std::vector< std::size_t > > greedy_actions(const std::vector< AgentNet >& agents, const Batch& b)
{
   std::vector< std::vector< std::size_t > > out(b.n_agents, std::vector< std::size_t >(b.steps()));
   for(std::size_t i = 0; i < b.n_agents; ++i) {
      const auto qs = agents[i].forward(b.agent_obs[i], b.h0[i]);
      for(std::size_t e = 0; e < b.episodes; ++e) {
         for(std::size_t t = 0; t < b.max_len; ++t) {
            const long col = b.col_of[e][t];
            if(col >= 0) {
               out[i][static_cast< std::size_t >(col)] = greedy_action(qs[t].col(static_cast< Eigen::Index >(e)));
            }
         }
      }
   }
   return out;
}

/// TD targets y = r + gamma * Q~_tot(next) at non-terminal steps, y = r at terminal ones.
inline Vec td_targets(const CriticNet& target,
                      const Batch& b,
                      double gamma,
                      const std::vector< std::vector< std::size_t > >* next_actions = nullptr)
{
   std::vector< Mat > next_in = b.critic_inputs;
   if(next_actions != nullptr) {
      const auto obs_dim = static_cast< Eigen::Index >(target.arch().obs_dim);
      const auto n_act = static_cast< Eigen::Index >(b.n_actions);
      for(std::size_t i = 0; i < b.n_agents; ++i) {
         next_in[i].bottomRows(n_act).setZero();
         for(std::size_t c = 0; c < b.steps(); ++c) {
            next_in[i](obs_dim + static_cast< Eigen::Index >((*next_actions)[i][c]), static_cast< Eigen::Index >(c)) = 1.;
         }
      }
   }
   const RowVec q_next = target.forward_batch(next_in);
   Vec y = b.rewards;
   for(std::size_t c = 0; c < b.steps(); ++c) {
      const long nx = b.next_col[c];
      if(nx >= 0) {
         y(static_cast< Eigen::Index >(c)) += gamma * q_next(nx);
      }
   }
   return y;
}

/// One TD step on the critic; returns the mean squared TD error before the step.
inline double critic_td_update(CriticNet& critic,
                               const CriticNet& target,
                               const Batch& b,
                               Optimizer& opt,
                               double gamma,
                               double grad_clip = 0.,
                               const std::vector< std::vector< std::size_t > >* next_actions = nullptr)
{
   if(b.steps() == 0) {
      throw ParameterError("critic_td_update: empty batch");
   }
   const Vec y = td_targets(target, b, gamma, next_actions);
   const RowVec q = critic.forward_train(b.critic_inputs);
   const RowVec err = q - y.transpose();
   const double n = static_cast< double >(b.steps());
   const double loss = err.squaredNorm() / n;
   ParamVector g = critic.backward(2. * err / n);
   clip_grad_norm(g.data(), grad_clip);
   opt.step(critic.params(), g);
   return loss;
}

/// Copies live critic parameters into the target every `interval` episodes.
inline bool sync_target(const CriticNet& critic, CriticNet& target, std::size_t episode, std::size_t interval)
{
   if(interval == 0 || episode % interval != 0) {
      return false;
   }
   copy_params(critic.params(), target.params());
   return true;
}

struct AgentUpdateResult {
   double loss = 0.;
   /// credits[i][col]
   std::vector< std::vector< double > > credits;
   std::size_t critic_evaluations = 0;
};

/// Credits for every valid step of the batch under the given strategy.
inline std::vector< std::vector< double > > batch_credits(const CriticNet& critic,
                                                          const Batch& b,
                                                          CreditStrategy strategy,
                                                          std::size_t mc_samples,
                                                          Rng& rng,
                                                          std::size_t exact_cap,
                                                          std::size_t* evaluations = nullptr)
{
   if(strategy == CreditStrategy::shapley_exact && b.n_agents > exact_cap) {
      throw SizeError("exact Shapley credits requested for " + std::to_string(b.n_agents)
                      + " agents, above the exact cap " + std::to_string(exact_cap));
   }
   const CriticCounterfactuals cf(critic, b.critic_inputs);
   std::vector< std::vector< double > > credits(b.n_agents, std::vector< double >(b.steps()));
   std::size_t evals = 0;
   for(std::size_t c = 0; c < b.steps(); ++c) {
      const auto game = cf.game(c);
      const auto cv = compute_credits(game, strategy, static_cast< std::int64_t >(mc_samples), rng, exact_cap);
      evals += cv.critic_evaluations;
      for(std::size_t i = 0; i < b.n_agents; ++i) {
         credits[i][c] = cv.credits[i];
      }
   }
   if(evaluations != nullptr) {
      *evaluations = evals;
   }
   return credits;
}

/// Regresses each agent's value of the action it took toward its credit.
/// Loss is the mean over agents and valid steps; one optimizer step per agent.
inline double agent_regression_step(std::vector< AgentNet >& agents,
                                    const Batch& b,
                                    const std::vector< std::vector< double > >& credits,
                                    std::vector< Optimizer >& opts,
                                    double grad_clip = 0.)
{
   if(agents.size() != b.n_agents || opts.size() != b.n_agents) {
      throw ShapeError("agent_update: one network and optimizer per agent required");
   }
   const double denom = static_cast< double >(b.n_agents * b.steps());
   double loss = 0.;
   for(std::size_t i = 0; i < b.n_agents; ++i) {
      auto qs = agents[i].forward_train(b.agent_obs[i], b.h0[i]);
      std::vector< Mat > upstream(qs.size());
      for(std::size_t t = 0; t < qs.size(); ++t) {
         upstream[t] = Mat::Zero(qs[t].rows(), qs[t].cols());
         for(std::size_t e = 0; e < b.episodes; ++e) {
            const long col = b.col_of[e][t];
            if(col < 0) {
               continue;
            }
            const auto c = static_cast< std::size_t >(col);
            const auto a = static_cast< Eigen::Index >(b.actions[i][c]);
            const auto ec = static_cast< Eigen::Index >(e);
            const double err = qs[t](a, ec) - credits[i][c];
            loss += err * err;
            upstream[t](a, ec) = 2. * err / denom;
         }
      }
      ParamVector g = agents[i].backward(upstream);
      clip_grad_norm(g.data(), grad_clip);
      opts[i].step(agents[i].params(), g);
   }
   return loss / denom;
}

inline AgentUpdateResult agent_update(std::vector< AgentNet >& agents,
                                      const CriticNet& critic,
                                      const Batch& b,
                                      const Hyperparams& hp,
                                      Rng& rng,
                                      std::vector< Optimizer >& opts)
{
   AgentUpdateResult r;
   r.credits = batch_credits(critic, b, hp.credit_strategy, hp.mc_samples, rng, hp.exact_cap, &r.critic_evaluations);
   r.loss = agent_regression_step(agents, b, r.credits, opts, hp.grad_clip);
   return r;
}

struct MetricsRecord {
   std::size_t episode = 0;
   double eval_return = 0.;
   double success_rate = 0.;
   double epsilon = 0.;
   double critic_loss = std::numeric_limits< double >::quiet_NaN();
   double agent_loss = std::numeric_limits< double >::quiet_NaN();
   double credit_mean = std::numeric_limits< double >::quiet_NaN();
   double credit_std = std::numeric_limits< double >::quiet_NaN();
};

/// Owns the networks, optimizers, buffer and random streams of one run and
/// drives the two-stage loop.
class Trainer {
  public:
   /// Called after every evaluation; returning false stops training.
   using MetricsCallback = std::function< bool(const MetricsRecord&) >;
   /// Called after every training episode.
   using EpisodeCallback = std::function< void(std::size_t episode, const Trainer&) >;

   Trainer(std::unique_ptr< Environment > env, Hyperparams hp, ModelParams model = {})
       : env_(checked(std::move(env))),
         hp_(validated(hp)),
         model_(model),
         critic_(make_critic_arch()),
         target_(critic_),
         critic_opt_(OptimizerConfig::adam(hp.critic_lr), critic_.params().size()),
         buffer_(hp.buffer_capacity),
         act_rng_(derive_seed(hp.seed, 1)),
         batch_rng_(derive_seed(hp.seed, 2)),
         credit_rng_(derive_seed(hp.seed, 3))
   {
      if(hp_.credit_strategy == CreditStrategy::shapley_exact && env_->spec().n_agents > hp_.exact_cap) {
         throw ConfigError("credit_strategy", "shapley_exact needs n_agents <= exact_cap");
      }
      Rng init_rng(derive_seed(hp_.seed, 0));
      critic_.init(init_rng);
      copy_params(critic_.params(), target_.params());
      const auto& sp = env_->spec();
      for(std::size_t i = 0; i < sp.n_agents; ++i) {
         agents_.emplace_back(AgentArch{sp.obs_dim, model_.agent_hidden, model_.agent_units, sp.action_space_size});
         agents_.back().init(init_rng);
         agent_opts_.emplace_back(OptimizerConfig::rmsprop(hp_.agent_lr), agents_.back().params().size());
      }
   }

   [[nodiscard]] const Hyperparams& hyperparams() const noexcept { return hp_; }
   [[nodiscard]] const ModelParams& model() const noexcept { return model_; }
   [[nodiscard]] const Environment& env() const noexcept { return *env_; }
   [[nodiscard]] const CriticNet& critic() const noexcept { return critic_; }
   [[nodiscard]] const CriticNet& target_critic() const noexcept { return target_; }
   [[nodiscard]] const std::vector< AgentNet >& agents() const noexcept { return agents_; }
   CriticNet& critic() noexcept { return critic_; }
   std::vector< AgentNet >& agents() noexcept { return agents_; }
   [[nodiscard]] const ReplayBuffer& buffer() const noexcept { return buffer_; }
   [[nodiscard]] std::size_t episodes_done() const noexcept { return episode_; }
   /// incremented by every TD step
   [[nodiscard]] std::size_t critic_version() const noexcept { return critic_version_; }
   /// critic version the most recent credits were computed with
   [[nodiscard]] std::size_t credit_critic_version() const noexcept { return credit_version_; }

   /// Greedy evaluation on a fresh copy of the environment. The k-th
   /// evaluation of a run always uses the same random stream.
   EvalResult evaluate_now()
   {
      auto env = env_->clone();
      Rng rng(derive_seed(hp_.seed, 1000 + eval_count_++));
      return evaluate(agents_, *env, hp_.eval_episodes, rng);
   }

   /// One iteration: collect an episode, then critic stage, target sync, agent stage.
   void train_episode()
   {
      const double eps = epsilon(episode_, hp_);
      buffer_.push(run_episode(agents_, *env_, eps, act_rng_));
      ++episode_;

      const auto sample = buffer_.sample(hp_.batch_size, batch_rng_);
      const Batch b = collate(sample, env_->spec());
      std::vector< std::vector< std::size_t > > greedy;
      if(hp_.bootstrap == Bootstrap::greedy) {
         greedy = greedy_actions(agents_, b);
      }
      const double closs = critic_td_update(critic_, target_, b, critic_opt_, hp_.gamma, hp_.grad_clip,
                                            hp_.bootstrap == Bootstrap::greedy ? &greedy : nullptr);
      ++critic_version_;
      sync_target(critic_, target_, episode_, hp_.target_sync_interval);

      credit_version_ = critic_version_;
      const auto res = agent_update(agents_, critic_, b, hp_, credit_rng_, agent_opts_);

      acc_.critic_loss += closs;
      acc_.agent_loss += res.loss;
      ++acc_.iterations;
      for(const auto& per_agent : res.credits) {
         for(double c : per_agent) {
            acc_.credit_sum += c;
            acc_.credit_sq += c * c;
            ++acc_.credit_count;
         }
      }
   }

   /// Runs the full loop: an initial evaluation, then `training_episodes`
   /// iterations with an evaluation every `eval_interval` episodes.
   std::vector< MetricsRecord > train(const MetricsCallback& on_metrics = {}, const EpisodeCallback& on_episode = {})
   {
      std::vector< MetricsRecord > out;
      auto emit = [&]() {
         out.push_back(make_record());
         return on_metrics ? on_metrics(out.back()) : true;
      };
      if(! emit()) {
         return out;
      }
      while(episode_ < hp_.training_episodes) {
         train_episode();
         if(on_episode) {
            on_episode(episode_, *this);
         }
         if(episode_ % hp_.eval_interval == 0 && ! emit()) {
            break;
         }
      }
      return out;
   }

  private:
   struct Accumulator {
      double critic_loss = 0.;
      double agent_loss = 0.;
      std::size_t iterations = 0;
      double credit_sum = 0.;
      double credit_sq = 0.;
      std::size_t credit_count = 0;
   };

   static std::unique_ptr< Environment > checked(std::unique_ptr< Environment > env)
   {
      if(! env) {
         throw ConfigError("env", "no environment");
      }
      return env;
   }
   static Hyperparams validated(Hyperparams hp)
   {
      hp.validate();
      return hp;
   }

   [[nodiscard]] CriticArch make_critic_arch() const
   {
      const auto& sp = env_->spec();
      CriticArch a;
      a.n_agents = sp.n_agents;
      a.obs_dim = sp.state_obs_dim;
      a.n_actions = sp.action_space_size;
      a.groups = sp.groups;
      a.units = model_.critic_units;
      a.head_hidden = model_.critic_head_hidden;
      return a;
   }

   MetricsRecord make_record()
   {
      MetricsRecord r;
      r.episode = episode_;
      r.epsilon = epsilon(episode_, hp_);
      const auto ev = evaluate_now();
      r.eval_return = ev.mean_return;
      r.success_rate = ev.success_rate;
      if(acc_.iterations > 0) {
         const auto it = static_cast< double >(acc_.iterations);
         r.critic_loss = acc_.critic_loss / it;
         r.agent_loss = acc_.agent_loss / it;
      }
      if(acc_.credit_count > 0) {
         const auto n = static_cast< double >(acc_.credit_count);
         r.credit_mean = acc_.credit_sum / n;
         r.credit_std = std::sqrt(std::max(0., acc_.credit_sq / n - r.credit_mean * r.credit_mean));
      }
      acc_ = {};
      return r;
   }

   std::unique_ptr< Environment > env_;
   Hyperparams hp_;
   ModelParams model_;
   CriticNet critic_;
   CriticNet target_;
   Optimizer critic_opt_;
   std::vector< AgentNet > agents_;
   std::vector< Optimizer > agent_opts_;
   ReplayBuffer buffer_;
   Rng act_rng_;
   Rng batch_rng_;
   Rng credit_rng_;
   std::size_t episode_ = 0;
   std::size_t eval_count_ = 0;
   std::size_t critic_version_ = 0;
   std::size_t credit_version_ = 0;
   Accumulator acc_;
};

}  // namespace shapcred

#endif  // SHAPCRED_TRAINER_HPP
