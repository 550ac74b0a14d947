#ifndef SHAPCRED_ENVS_NULL_AGENT_WRAPPER_HPP
#define SHAPCRED_ENVS_NULL_AGENT_WRAPPER_HPP

#include <memory>
#include <string>
#include <vector>

#include "shapcred/dec_pomdp.hpp"

namespace shapcred {

/// Appends one agent whose actions never reach the inner environment. Its
/// observations are constant zeros; everything else is forwarded unchanged.
class NullAgentWrapper final : public Environment {
  public:
   explicit NullAgentWrapper(std::unique_ptr< Environment > inner) : inner_(std::move(inner))
   {
      if(! inner_) {
         throw ValidationError("NullAgentWrapper: inner environment is null");
      }
      spec_ = inner_->spec();
      spec_.n_agents += 1;
      spec_.groups.push_back("null");
      spec_.validate();
   }

   NullAgentWrapper(const NullAgentWrapper& other) : Environment(other), inner_(other.inner_->clone()), spec_(other.spec_) {}

   [[nodiscard]] const DecPomdpSpec& spec() const override { return spec_; }
   [[nodiscard]] std::unique_ptr< Environment > clone() const override
   {
      return std::make_unique< NullAgentWrapper >(*this);
   }
   [[nodiscard]] std::string name() const override { return "null_agent_wrapper(" + inner_->name() + ")"; }
   [[nodiscard]] const Environment& inner() const noexcept { return *inner_; }
   [[nodiscard]] std::size_t null_agent() const noexcept { return spec_.n_agents - 1; }

   [[nodiscard]] bool episode_success() const override { return inner_->episode_success(); }
   [[nodiscard]] double optimal_return() const override { return inner_->optimal_return(); }

  protected:
   StepResult do_reset(Rng& rng) override { return extend(inner_->reset(rng)); }

   StepResult do_step(const JointAction& a) override
   {
      JointAction in;
      in.actions.assign(a.actions.begin(), a.actions.end() - 1);
      return extend(inner_->step(in));
   }

  private:
   [[nodiscard]] StepResult extend(StepResult r) const
   {
      r.observations.emplace_back(spec_.obs_dim, 0.);
      r.state_observations.emplace_back(spec_.state_obs_dim, 0.);
      return r;
   }

   std::unique_ptr< Environment > inner_;
   DecPomdpSpec spec_;
};

}  // namespace shapcred

#endif  // SHAPCRED_ENVS_NULL_AGENT_WRAPPER_HPP
