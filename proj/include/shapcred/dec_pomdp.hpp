#ifndef SHAPCRED_DEC_POMDP_HPP
#define SHAPCRED_DEC_POMDP_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "shapcred/errors.hpp"
#include "shapcred/rng.hpp"

namespace shapcred {

/// Static description of a cooperative Dec-POMDP instance.
struct DecPomdpSpec {
   std::size_t n_agents = 1;
   std::size_t action_space_size = 2;
   /// width of each agent's (sight-restricted) observation
   std::size_t obs_dim = 1;
   /// width of each agent's unrestricted observation; the global state is their concatenation
   std::size_t state_obs_dim = 1;
   std::size_t episode_limit = 1;
   double gamma = 0.99;
   std::vector< std::string > groups;
   /// a legal environment-side no-op action id
   std::size_t noop_action = 0;

   /// Encoding of the default action at the critic input: all zeros.
   [[nodiscard]] std::vector< double > default_action_encoding() const
   {
      return std::vector< double >(action_space_size, 0.);
   }

   void validate() const
   {
      if(n_agents < 1) {
         throw ValidationError("DecPomdpSpec: n_agents must be >= 1");
      }
      if(action_space_size < 2) {
         throw ValidationError("DecPomdpSpec: action_space_size must be >= 2");
      }
      if(episode_limit < 1) {
         throw ValidationError("DecPomdpSpec: episode_limit must be >= 1");
      }
      if(groups.size() != n_agents) {
         throw ValidationError("DecPomdpSpec: groups must have one label per agent");
      }
      if(! (gamma >= 0. && gamma <= 1.)) {
         throw ValidationError("DecPomdpSpec: gamma must lie in [0, 1]");
      }
      if(noop_action >= action_space_size) {
         throw ValidationError("DecPomdpSpec: noop action out of range");
      }
   }
};

struct JointAction {
   std::vector< std::size_t > actions;
};

struct StepResult {
   /// one partial observation per agent
   std::vector< std::vector< double > > observations;
   /// one unrestricted observation per agent (critic side)
   std::vector< std::vector< double > > state_observations;
   double reward = 0.;
   bool done = false;

   /// Concatenation of all unrestricted observations.
   [[nodiscard]] std::vector< double > global_state() const
   {
      std::vector< double > out;
      for(const auto& o : state_observations) {
         out.insert(out.end(), o.begin(), o.end());
      }
      return out;
   }
};

/// Generative environment contract. Public calls validate inputs and enforce
/// the reset/step lifecycle; subclasses implement the transition rule.
class Environment {
  public:
   virtual ~Environment() = default;

   [[nodiscard]] virtual const DecPomdpSpec& spec() const = 0;
   [[nodiscard]] virtual std::unique_ptr< Environment > clone() const = 0;
   [[nodiscard]] virtual std::string name() const = 0;

   StepResult reset(Rng& rng)
   {
      t_ = 0;
      done_ = false;
      started_ = true;
      auto res = do_reset(rng);
      res.reward = 0.;
      res.done = false;
      check_result(res);
      return res;
   }

   StepResult step(const JointAction& a)
   {
      if(! started_) {
         throw LifecycleError(name() + ": step before reset");
      }
      if(done_) {
         throw LifecycleError(name() + ": step after episode end");
      }
      validate_action(a);
      ++t_;
      auto res = do_step(a);
      if(t_ >= spec().episode_limit) {
         res.done = true;
      }
      done_ = res.done;
      check_result(res);
      return res;
   }

   void validate_action(const JointAction& a) const
   {
      const auto& sp = spec();
      if(a.actions.size() != sp.n_agents) {
         throw ValidationError(
            name() + ": joint action has " + std::to_string(a.actions.size()) + " entries, expected "
            + std::to_string(sp.n_agents));
      }
      for(auto u : a.actions) {
         if(u >= sp.action_space_size) {
            throw ValidationError(name() + ": action id " + std::to_string(u) + " out of range");
         }
      }
   }

   /// Whether the episode so far meets the environment's success predicate.
   [[nodiscard]] virtual bool episode_success() const = 0;

   /// Best achievable undiscounted episode return, NaN when not known in closed form.
   [[nodiscard]] virtual double optimal_return() const { return std::numeric_limits< double >::quiet_NaN(); }

   [[nodiscard]] std::size_t time_step() const noexcept { return t_; }
   [[nodiscard]] bool done() const noexcept { return done_; }

  protected:
   Environment() = default;
   Environment(const Environment&) = default;
   Environment& operator=(const Environment&) = default;

   virtual StepResult do_reset(Rng& rng) = 0;
   virtual StepResult do_step(const JointAction& a) = 0;

  private:
   void check_result(const StepResult& r) const
   {
      const auto& sp = spec();
      if(r.observations.size() != sp.n_agents || r.state_observations.size() != sp.n_agents) {
         throw ShapeError(name() + ": wrong number of observations");
      }
      for(std::size_t i = 0; i < sp.n_agents; ++i) {
         if(r.observations[i].size() != sp.obs_dim || r.state_observations[i].size() != sp.state_obs_dim) {
            throw ShapeError(name() + ": observation width mismatch");
         }
      }
   }

   std::size_t t_ = 0;
   bool done_ = false;
   bool started_ = false;
};

}  // namespace shapcred

#endif  // SHAPCRED_DEC_POMDP_HPP
