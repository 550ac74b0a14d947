#ifndef SHAPCRED_CREDIT_HPP
#define SHAPCRED_CREDIT_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shapcred/coalition.hpp"
#include "shapcred/coalition_game.hpp"
#include "shapcred/critic_net.hpp"
#include "shapcred/errors.hpp"

namespace shapcred {

enum class CreditStrategy { shapley_mc, shapley_exact, plain_cf, uniform };

inline std::string to_string(CreditStrategy s)
{
   switch(s) {
      case CreditStrategy::shapley_mc: return "shapley_mc";
      case CreditStrategy::shapley_exact: return "shapley_exact";
      case CreditStrategy::plain_cf: return "plain_cf";
      case CreditStrategy::uniform: return "uniform";
   }
   return "?";
}

inline std::optional< CreditStrategy > parse_credit_strategy(std::string_view s)
{
   if(s == "shapley_mc") return CreditStrategy::shapley_mc;
   if(s == "shapley_exact") return CreditStrategy::shapley_exact;
   if(s == "plain_cf") return CreditStrategy::plain_cf;
   if(s == "uniform") return CreditStrategy::uniform;
   return std::nullopt;
}

struct CreditVector {
   std::vector< double > credits;
   CreditStrategy strategy = CreditStrategy::shapley_mc;
   /// Monte Carlo samples per agent (shapley_mc only)
   std::size_t samples = 0;
   /// critic evaluations spent on this vector, including the unmasked one
   std::size_t critic_evaluations = 0;
   /// coalition values referenced before memoization (Shapley strategies only)
   std::size_t lookups = 0;
};

/// The counterfactual characteristic function at one time step:
/// w(S) = f(H_A) - f(H_{A\S}), where H_{A\S} replaces the action encodings of
/// every agent in S with the all-zero default encoding.
///
/// `masked_value(S)` must return f(H_{A\S}); f(H_A) is evaluated once at
/// construction and cached. w(empty) is exactly 0 without a critic call.
class CounterfactualGame {
  public:
   using MaskedValueFn = std::function< double(const Coalition&) >;

   CounterfactualGame(std::size_t n, MaskedValueFn masked_value)
       : n_(n), masked_(std::move(masked_value)), evals_(std::make_shared< std::size_t >(0))
   {
      if(n == 0 || n > Coalition::max_players) {
         throw ShapeError("CounterfactualGame: agent count must be in [1, 64]");
      }
      grand_ = masked(Coalition::empty(n));
   }

   /// Game over an arbitrary critic f(encodings) with the given taken encodings.
   static CounterfactualGame from_critic(std::function< double(const std::vector< Vec >&) > critic,
                                         std::vector< Vec > taken)
   {
      const std::size_t n = taken.size();
      auto fn = [critic = std::move(critic), taken = std::move(taken)](const Coalition& s) {
         std::vector< Vec > enc = taken;
         for(auto i : s.members()) {
            enc[i].setZero();
         }
         return critic(enc);
      };
      return CounterfactualGame(n, std::move(fn));
   }

   [[nodiscard]] std::size_t n() const noexcept { return n_; }

   /// w(S)
   double operator()(const Coalition& s) const
   {
      check(s);
      if(s.is_empty()) {
         return 0.;
      }
      return grand_ - masked(s);
   }

   /// f(H_{A\S})
   [[nodiscard]] double masked(const Coalition& s) const
   {
      check(s);
      ++*evals_;
      return masked_(s);
   }

   /// f(H_A)
   [[nodiscard]] double grand_value() const noexcept { return grand_; }

   /// Critic evaluations performed so far, including the cached f(H_A).
   [[nodiscard]] std::size_t critic_evaluations() const noexcept { return *evals_; }
   void reset_counter() const noexcept { *evals_ = 0; }

  private:
   void check(const Coalition& s) const
   {
      if(s.n() != n_) {
         throw ShapeError(
            "CounterfactualGame: coalition over " + std::to_string(s.n()) + " agents, game has "
            + std::to_string(n_));
      }
   }

   std::size_t n_;
   MaskedValueFn masked_;
   // shared so copies of a game report one budget
   std::shared_ptr< std::size_t > evals_;
   double grand_ = 0.;
};

/// Precomputed counterfactual evaluation of a CriticNet over a batch of steps.
///
/// Each agent's extractor is run once on its taken action and once on the
/// default encoding; a masked evaluation then only sums the matching head
/// contributions and applies the remainder of the head.
class CriticCounterfactuals {
  public:
   /// `inputs[i]` is agent i's critic input (observation over action encoding), one column per step.
   CriticCounterfactuals(const CriticNet& critic, const std::vector< Mat >& inputs) : critic_(&critic)
   {
      const auto& a = critic.arch();
      if(inputs.size() != a.n_agents) {
         throw ShapeError("CriticCounterfactuals: one input matrix per agent required");
      }
      const auto n_act = static_cast< Eigen::Index >(a.n_actions);
      taken_.resize(a.n_agents);
      base_.resize(a.n_agents);
      for(std::size_t i = 0; i < a.n_agents; ++i) {
         if(static_cast< std::size_t >(inputs[i].rows()) != a.input_dim() || inputs[i].cols() != inputs[0].cols()) {
            throw ShapeError("CriticCounterfactuals: input matrix has the wrong shape");
         }
         Mat masked = inputs[i];
         masked.bottomRows(n_act).setZero();
         taken_[i] = critic.head_block(i, critic.features(i, inputs[i]));
         base_[i] = critic.head_block(i, critic.features(i, masked));
      }
      steps_ = inputs.empty() ? 0 : static_cast< std::size_t >(inputs[0].cols());
   }

   [[nodiscard]] std::size_t steps() const noexcept { return steps_; }
   [[nodiscard]] std::size_t n_agents() const noexcept { return taken_.size(); }

   /// f(H_{A\S}) at step `t`.
   [[nodiscard]] double masked_value(std::size_t t, const Coalition& s) const
   {
      const auto col = static_cast< Eigen::Index >(t);
      Mat pre = Mat::Zero(taken_[0].rows(), 1);
      for(std::size_t i = 0; i < taken_.size(); ++i) {
         pre += ((s.bits() >> i) & 1U) ? base_[i].col(col) : taken_[i].col(col);
      }
      return critic_->head_from_preactivation(pre)(0);
   }

   /// The counterfactual game at step `t`. Keeps a reference to this object.
   [[nodiscard]] CounterfactualGame game(std::size_t t) const
   {
      if(t >= steps_) {
         throw IndexError("CriticCounterfactuals: step index out of range");
      }
      return CounterfactualGame(n_agents(), [this, t](const Coalition& s) { return masked_value(t, s); });
   }

  private:
   const CriticNet* critic_;
   std::vector< Mat > taken_;
   std::vector< Mat > base_;
   std::size_t steps_ = 0;
};

/// v_{S in A} = f(H_A) - f(H_{A\S}).
inline double coalition_contribution(const CounterfactualGame& game, const Coalition& s)
{
   return game(s);
}

/// v_{S in A} - v_{S\i in A}.
inline double marginal_credit(const CounterfactualGame& game, std::size_t i, const Coalition& s)
{
   return marginal_contribution(game, i, s);
}

/// Same quantity by the algebraic identity f(H_{A\(S\i)}) - f(H_{A\S}),
/// using two masked critic evaluations.
inline double marginal_credit_direct(const CounterfactualGame& game, std::size_t i, const Coalition& s)
{
   if(i >= game.n()) {
      throw IndexError("marginal_credit_direct: agent index out of range");
   }
   if(! s.contains(i)) {
      throw PreconditionError("marginal_credit_direct: agent " + std::to_string(i) + " not in " + s.to_string());
   }
   return game.masked(s.without(i)) - game.masked(s);
}

namespace detail {

inline CreditVector single_agent(const CounterfactualGame& game, CreditStrategy strategy)
{
   CreditVector cv;
   cv.strategy = strategy;
   cv.credits = {game(Coalition::full(1))};
   return cv;
}

}  // namespace detail

inline CreditVector shapley_credits_exact(const CounterfactualGame& game, std::size_t cap = default_exact_cap)
{
   const auto before = game.critic_evaluations();
   auto res = exact_shapley(game, cap);
   CreditVector cv;
   cv.strategy = CreditStrategy::shapley_exact;
   cv.lookups = res.lookups;
   cv.credits = std::move(res.values);
   cv.critic_evaluations = game.critic_evaluations() - before + 1;
   return cv;
}

template < std::uniform_random_bit_generator Rng >
CreditVector shapley_credits_mc(const CounterfactualGame& game, std::int64_t samples, Rng& rng)
{
   const auto before = game.critic_evaluations();
   auto res = mc_shapley(game, samples, rng);
   CreditVector cv;
   cv.strategy = CreditStrategy::shapley_mc;
   cv.samples = res.samples;
   cv.lookups = res.lookups;
   cv.credits = std::move(res.values);
   cv.critic_evaluations = game.critic_evaluations() - before + 1;
   return cv;
}

/// credits[i] = v_{{i} in A}: each agent masked alone.
inline CreditVector plain_counterfactual_credits(const CounterfactualGame& game)
{
   const auto before = game.critic_evaluations();
   CreditVector cv;
   cv.strategy = CreditStrategy::plain_cf;
   cv.credits.resize(game.n());
   for(std::size_t i = 0; i < game.n(); ++i) {
      cv.credits[i] = game(Coalition::singleton(game.n(), i));
   }
   cv.critic_evaluations = game.critic_evaluations() - before + 1;
   return cv;
}

/// credits[i] = f(H_A) / n. A single agent receives f(H_A) - f(masked) like every other strategy.
inline CreditVector uniform_credits(const CounterfactualGame& game)
{
   if(game.n() == 1) {
      auto cv = detail::single_agent(game, CreditStrategy::uniform);
      cv.critic_evaluations = 2;
      return cv;
   }
   CreditVector cv;
   cv.strategy = CreditStrategy::uniform;
   cv.credits.assign(game.n(), game.grand_value() / static_cast< double >(game.n()));
   cv.critic_evaluations = 1;
   return cv;
}

template < std::uniform_random_bit_generator Rng >
CreditVector compute_credits(const CounterfactualGame& game,
                             CreditStrategy strategy,
                             std::int64_t mc_samples,
                             Rng& rng,
                             std::size_t exact_cap = default_exact_cap)
{
   switch(strategy) {
      case CreditStrategy::shapley_mc: return shapley_credits_mc(game, mc_samples, rng);
      case CreditStrategy::shapley_exact: return shapley_credits_exact(game, exact_cap);
      case CreditStrategy::plain_cf: return plain_counterfactual_credits(game);
      case CreditStrategy::uniform: return uniform_credits(game);
   }
   throw ParameterError("compute_credits: unknown strategy");
}

}  // namespace shapcred

#endif  // SHAPCRED_CREDIT_HPP
