#ifndef SHAPCRED_ENVS_MATRIX_GAME_HPP
#define SHAPCRED_ENVS_MATRIX_GAME_HPP

#include <algorithm>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "shapcred/dec_pomdp.hpp"

namespace shapcred {

/// One-step cooperative matrix game. The payoff table is indexed row-major
/// over joint actions with agent 0 as the most significant digit.
/// Observations are a constant zero scalar.
class MatrixGame final : public Environment {
  public:
   MatrixGame(std::size_t n_agents, std::size_t n_actions, std::vector< double > payoff)
       : payoff_(std::move(payoff))
   {
      spec_.n_agents = n_agents;
      spec_.action_space_size = n_actions;
      spec_.obs_dim = 1;
      spec_.state_obs_dim = 1;
      spec_.episode_limit = 1;
      spec_.groups.assign(n_agents, "player");
      spec_.noop_action = 0;
      spec_.validate();
      std::size_t cells = 1;
      for(std::size_t i = 0; i < n_agents; ++i) {
         cells *= n_actions;
      }
      if(payoff_.size() != cells) {
         throw ValidationError(
            "MatrixGame: payoff table has " + std::to_string(payoff_.size()) + " entries, expected "
            + std::to_string(cells));
      }
      best_ = *std::max_element(payoff_.begin(), payoff_.end());
   }

   [[nodiscard]] const DecPomdpSpec& spec() const override { return spec_; }
   [[nodiscard]] std::unique_ptr< Environment > clone() const override
   {
      return std::make_unique< MatrixGame >(*this);
   }
   [[nodiscard]] std::string name() const override { return "matrix_game"; }

   [[nodiscard]] double payoff(const JointAction& a) const { return payoff_[index(a)]; }
   [[nodiscard]] const std::vector< double >& table() const noexcept { return payoff_; }

   [[nodiscard]] std::size_t index(const JointAction& a) const
   {
      std::size_t idx = 0;
      for(auto u : a.actions) {
         idx = idx * spec_.action_space_size + u;
      }
      return idx;
   }

   /// Joint action attaining the maximal payoff (first in table order).
   [[nodiscard]] JointAction optimal_joint_action() const
   {
      auto idx = static_cast< std::size_t >(
         std::distance(payoff_.begin(), std::max_element(payoff_.begin(), payoff_.end())));
      JointAction a;
      a.actions.assign(spec_.n_agents, 0);
      for(std::size_t i = spec_.n_agents; i-- > 0;) {
         a.actions[i] = idx % spec_.action_space_size;
         idx /= spec_.action_space_size;
      }
      return a;
   }

   [[nodiscard]] bool episode_success() const override { return last_reward_ >= best_ && stepped_; }
   [[nodiscard]] double optimal_return() const override { return best_; }

  protected:
   StepResult do_reset(Rng& /*rng*/) override
   {
      stepped_ = false;
      last_reward_ = 0.;
      return observe();
   }

   StepResult do_step(const JointAction& a) override
   {
      auto res = observe();
      last_reward_ = payoff(a);
      stepped_ = true;
      res.reward = last_reward_;
      res.done = true;
      return res;
   }

  private:
   [[nodiscard]] StepResult observe() const
   {
      StepResult r;
      r.observations.assign(spec_.n_agents, std::vector< double >(1, 0.));
      r.state_observations = r.observations;
      return r;
   }

   DecPomdpSpec spec_;
   std::vector< double > payoff_;
   double best_ = 0.;
   double last_reward_ = 0.;
   bool stepped_ = false;
};

}  // namespace shapcred

#endif  // SHAPCRED_ENVS_MATRIX_GAME_HPP
