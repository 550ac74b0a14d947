#ifndef SHAPCRED_CONFIG_HPP
#define SHAPCRED_CONFIG_HPP

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "shapcred/credit.hpp"
#include "shapcred/dec_pomdp.hpp"
#include "shapcred/envs/matrix_game.hpp"
#include "shapcred/envs/null_agent_wrapper.hpp"
#include "shapcred/envs/team_gridworld.hpp"
#include "shapcred/errors.hpp"
#include "shapcred/trainer.hpp"

namespace shapcred {

enum class EnvKind { matrix_game, team_gridworld };

struct MatrixParams {
   std::size_t n_agents = 2;
   std::size_t n_actions = 3;
   /// row-major over joint actions, agent 0 most significant
   std::vector< double > payoff;

   friend bool operator==(const MatrixParams&, const MatrixParams&) = default;
};

struct EnvConfig {
   EnvKind kind = EnvKind::matrix_game;
   /// append an agent whose actions have no effect
   bool null_agent = false;
   MatrixParams matrix;
   GridworldParams grid;

   friend bool operator==(const EnvConfig&, const EnvConfig&) = default;
};

struct OutputConfig {
   std::string dir = "run";
   /// episodes between checkpoints; 0 writes only the final one
   std::size_t checkpoint_interval = 0;

   friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

/// Everything one `train` invocation needs.
struct RunConfig {
   EnvConfig env;
   Hyperparams train;
   ModelParams model;
   OutputConfig output;

   friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

inline std::string trim(std::string_view s)
{
   const auto b = s.find_first_not_of(" \t\r\n");
   if(b == std::string_view::npos) {
      return {};
   }
   const auto e = s.find_last_not_of(" \t\r\n");
   return std::string(s.substr(b, e - b + 1));
}

inline std::vector< std::string > split(std::string_view s, char sep)
{
   std::vector< std::string > out;
   std::size_t start = 0;
   while(true) {
      const auto p = s.find(sep, start);
      out.push_back(trim(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start)));
      if(p == std::string_view::npos) {
         return out;
      }
      start = p + 1;
   }
}

template < class T >
T parse_number(const std::string& field, const std::string& raw)
{
   const std::string s = trim(raw);
   T v{};
   const auto* end = s.data() + s.size();
   auto [ptr, ec] = std::from_chars(s.data(), end, v);
   if(s.empty() || ec != std::errc{} || ptr != end) {
      throw ConfigError(field, "cannot parse '" + raw + "' as a number");
   }
   if constexpr(std::is_floating_point_v< T >) {
      if(! std::isfinite(v)) {
         throw ConfigError(field, "must be finite");
      }
   }
   return v;
}

template < class T >
std::string format_number(T v)
{
   char buf[64];
   auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
   return std::string(buf, ptr);
}

inline bool parse_bool(const std::string& field, const std::string& raw)
{
   const auto s = trim(raw);
   if(s == "true" || s == "1") return true;
   if(s == "false" || s == "0") return false;
   throw ConfigError(field, "expected true or false, got '" + raw + "'");
}

inline std::vector< double > parse_doubles(const std::string& field, const std::string& raw)
{
   std::vector< double > out;
   if(trim(raw).empty()) {
      return out;
   }
   for(const auto& tok : split(raw, ',')) {
      out.push_back(parse_number< double >(field, tok));
   }
   return out;
}

inline std::string format_doubles(const std::vector< double >& v)
{
   std::string out;
   for(std::size_t i = 0; i < v.size(); ++i) {
      out += (i ? ", " : "") + format_number(v[i]);
   }
   return out;
}

/// "x,y; x,y; ..."
inline std::vector< Cell > parse_cells(const std::string& field, const std::string& raw)
{
   std::vector< Cell > out;
   if(trim(raw).empty()) {
      return out;
   }
   for(const auto& tok : split(raw, ';')) {
      const auto xy = split(tok, ',');
      if(xy.size() != 2) {
         throw ConfigError(field, "cells are written as x,y separated by ';'");
      }
      out.push_back({parse_number< int >(field, xy[0]), parse_number< int >(field, xy[1])});
   }
   return out;
}

inline std::string format_cells(const std::vector< Cell >& cells)
{
   std::string out;
   for(std::size_t i = 0; i < cells.size(); ++i) {
      out += (i ? "; " : "") + std::to_string(cells[i].x) + "," + std::to_string(cells[i].y);
   }
   return out;
}

struct Field {
   std::string key;
   std::function< void(const std::string& field, const std::string& raw) > read;
   std::function< std::string() > write;
};

template < class T >
Field number_field(std::string key, T& ref)
{
   return {std::move(key), [&ref](const std::string& f, const std::string& raw) { ref = parse_number< T >(f, raw); },
           [&ref] { return format_number(ref); }};
}

inline Field bool_field(std::string key, bool& ref)
{
   return {std::move(key), [&ref](const std::string& f, const std::string& raw) { ref = parse_bool(f, raw); },
           [&ref] { return std::string(ref ? "true" : "false"); }};
}

inline std::string to_string(EnvKind k) { return k == EnvKind::matrix_game ? "matrix_game" : "team_gridworld"; }
inline std::string to_string(Bootstrap b) { return b == Bootstrap::recorded ? "recorded" : "greedy"; }

inline std::vector< Field > env_fields(EnvConfig& e)
{
   std::vector< Field > f;
   f.push_back(bool_field("null_agent", e.null_agent));
   if(e.kind == EnvKind::matrix_game) {
      auto& m = e.matrix;
      f.push_back(number_field("n_agents", m.n_agents));
      f.push_back(number_field("n_actions", m.n_actions));
      f.push_back({"payoff", [&m](const std::string& k, const std::string& raw) { m.payoff = parse_doubles(k, raw); },
                   [&m] { return format_doubles(m.payoff); }});
   } else {
      auto& g = e.grid;
      f.push_back(number_field("width", g.width));
      f.push_back(number_field("height", g.height));
      f.push_back(number_field("n_agents", g.n_agents));
      f.push_back({"targets", [&g](const std::string& k, const std::string& raw) { g.targets = parse_cells(k, raw); },
                   [&g] { return format_cells(g.targets); }});
      f.push_back({"starts", [&g](const std::string& k, const std::string& raw) { g.starts = parse_cells(k, raw); },
                   [&g] { return format_cells(g.starts); }});
      f.push_back(number_field("sight", g.sight));
      f.push_back(number_field("episode_limit", g.episode_limit));
      f.push_back(number_field("step_penalty", g.step_penalty));
   }
   return f;
}

inline std::vector< Field > train_fields(Hyperparams& h)
{
   std::vector< Field > f;
   f.push_back(number_field("batch_size", h.batch_size));
   f.push_back(number_field("buffer_capacity", h.buffer_capacity));
   f.push_back(number_field("training_episodes", h.training_episodes));
   f.push_back(number_field("exploration_episodes", h.exploration_episodes));
   f.push_back(number_field("epsilon_start", h.epsilon_start));
   f.push_back(number_field("epsilon_end", h.epsilon_end));
   f.push_back(number_field("gamma", h.gamma));
   f.push_back(number_field("target_sync_interval", h.target_sync_interval));
   f.push_back(number_field("eval_interval", h.eval_interval));
   f.push_back(number_field("eval_episodes", h.eval_episodes));
   f.push_back(number_field("agent_lr", h.agent_lr));
   f.push_back(number_field("critic_lr", h.critic_lr));
   f.push_back(number_field("mc_samples", h.mc_samples));
   f.push_back({"credit_strategy",
                [&h](const std::string& k, const std::string& raw) {
                   auto s = parse_credit_strategy(trim(raw));
                   if(! s) {
                      throw ConfigError(k, "unknown strategy '" + raw + "'");
                   }
                   h.credit_strategy = *s;
                },
                [&h] { return shapcred::to_string(h.credit_strategy); }});
   f.push_back(number_field("seed", h.seed));
   f.push_back(number_field("exact_cap", h.exact_cap));
   f.push_back({"bootstrap",
                [&h](const std::string& k, const std::string& raw) {
                   const auto s = trim(raw);
                   if(s == "recorded") {
                      h.bootstrap = Bootstrap::recorded;
                   } else if(s == "greedy") {
                      h.bootstrap = Bootstrap::greedy;
                   } else {
                      throw ConfigError(k, "expected recorded or greedy, got '" + raw + "'");
                   }
                },
                [&h] { return to_string(h.bootstrap); }});
   f.push_back(number_field("grad_clip", h.grad_clip));
   return f;
}

inline std::vector< Field > model_fields(ModelParams& m)
{
   return {number_field("critic_units", m.critic_units), number_field("critic_head_hidden", m.critic_head_hidden),
           number_field("agent_hidden", m.agent_hidden), number_field("agent_units", m.agent_units)};
}

inline std::vector< Field > output_fields(OutputConfig& o)
{
   return {{"dir", [&o](const std::string&, const std::string& raw) { o.dir = trim(raw); }, [&o] { return o.dir; }},
           number_field("checkpoint_interval", o.checkpoint_interval)};
}

struct Section {
   std::string name;
   std::vector< Field > fields;
};

inline std::vector< Section > sections(RunConfig& c)
{
   return {{"env", env_fields(c.env)},
           {"train", train_fields(c.train)},
           {"model", model_fields(c.model)},
           {"output", output_fields(c.output)}};
}

}  // namespace detail

inline std::unique_ptr< Environment > make_env(const EnvConfig& e)
{
   std::unique_ptr< Environment > env;
   if(e.kind == EnvKind::matrix_game) {
      env = std::make_unique< MatrixGame >(e.matrix.n_agents, e.matrix.n_actions, e.matrix.payoff);
   } else {
      env = std::make_unique< TeamGridworld >(e.grid);
   }
   if(e.null_agent) {
      env = std::make_unique< NullAgentWrapper >(std::move(env));
   }
   return env;
}

/// Checks every invariant of the configuration without building anything
/// expensive. Throws ConfigError naming the offending field.
inline void validate(const RunConfig& c)
{
   try {
      c.train.validate();
   } catch(const ConfigError& e) {
      const std::string what = e.what();
      throw ConfigError("train." + e.field(), what.substr(e.field().size() + 2));
   }
   auto positive = [](std::size_t v, const char* field) {
      if(v == 0) {
         throw ConfigError(field, "must be positive");
      }
   };
   positive(c.model.critic_units, "model.critic_units");
   positive(c.model.agent_hidden, "model.agent_hidden");
   positive(c.model.agent_units, "model.agent_units");
   if(c.output.dir.empty()) {
      throw ConfigError("output.dir", "must not be empty");
   }
   if(c.env.kind == EnvKind::matrix_game) {
      const auto& m = c.env.matrix;
      if(m.n_agents == 0 || m.n_agents > 16) {
         throw ConfigError("env.n_agents", "must be in [1, 16]");
      }
      if(m.n_actions < 2) {
         throw ConfigError("env.n_actions", "must be at least 2");
      }
      double cells = 1.;
      for(std::size_t i = 0; i < m.n_agents; ++i) {
         cells *= static_cast< double >(m.n_actions);
      }
      if(static_cast< double >(m.payoff.size()) != cells) {
         throw ConfigError("env.payoff", "needs n_actions^n_agents entries, got " + std::to_string(m.payoff.size()));
      }
   } else {
      const auto& g = c.env.grid;
      if(g.width <= 0 || g.height <= 0) {
         throw ConfigError(g.width <= 0 ? "env.width" : "env.height", "must be positive");
      }
      if(g.n_agents == 0) {
         throw ConfigError("env.n_agents", "must be positive");
      }
      if(g.targets.empty()) {
         throw ConfigError("env.targets", "at least one target cell required");
      }
      if(g.sight < 0) {
         throw ConfigError("env.sight", "must be non-negative");
      }
      if(g.episode_limit == 0) {
         throw ConfigError("env.episode_limit", "must be positive");
      }
      if(! g.starts.empty() && g.starts.size() != g.n_agents) {
         throw ConfigError("env.starts", "one start cell per agent, or none");
      }
   }
   const std::size_t n = (c.env.kind == EnvKind::matrix_game ? c.env.matrix.n_agents : c.env.grid.n_agents)
                         + (c.env.null_agent ? 1 : 0);
   if(c.train.credit_strategy == CreditStrategy::shapley_exact && n > c.train.exact_cap) {
      throw ConfigError("train.credit_strategy", "shapley_exact needs n_agents <= exact_cap");
   }
   try {
      (void)make_env(c.env);
   } catch(const std::exception& e) {
      throw ConfigError("env", e.what());
   }
}

/// Parses the sectioned key = value format. Unknown sections or keys, keys
/// outside a section and malformed values are errors.
inline RunConfig parse_config(std::istream& in)
{
   namespace pt = boost::property_tree;
   pt::ptree tree;
   try {
      pt::read_ini(in, tree);
   } catch(const pt::ini_parser_error& e) {
      throw ConfigError("config", e.message() + " (line " + std::to_string(e.line()) + ")");
   }

   RunConfig c;
   for(const auto& [name, sec] : tree) {
      if(sec.empty() && ! sec.data().empty()) {
         throw ConfigError(name, "key outside of any section");
      }
      if(name != "env" && name != "train" && name != "model" && name != "output") {
         throw ConfigError(name, "unknown section");
      }
   }
   if(auto env = tree.get_child_optional("env")) {
      if(auto kind = env->get_optional< std::string >("kind")) {
         const auto k = detail::trim(*kind);
         if(k == "matrix_game") {
            c.env.kind = EnvKind::matrix_game;
         } else if(k == "team_gridworld") {
            c.env.kind = EnvKind::team_gridworld;
         } else {
            throw ConfigError("env.kind", "expected matrix_game or team_gridworld, got '" + *kind + "'");
         }
      }
   }
   for(auto& sec : detail::sections(c)) {
      const auto child = tree.get_child_optional(sec.name);
      if(! child) {
         continue;
      }
      for(const auto& [key, node] : *child) {
         if(sec.name == "env" && key == "kind") {
            continue;
         }
         const std::string field = sec.name + "." + key;
         const auto it = std::find_if(sec.fields.begin(), sec.fields.end(), [&](const auto& f) { return f.key == key; });
         if(it == sec.fields.end()) {
            throw ConfigError(field, "unknown key");
         }
         it->read(field, node.data());
      }
   }
   validate(c);
   return c;
}

inline RunConfig parse_config_string(const std::string& text)
{
   std::istringstream in(text);
   return parse_config(in);
}

/// Every field, one per line; parse_config(serialize(c)) == c.
inline std::string serialize(const RunConfig& config)
{
   RunConfig c = config;
   std::string out;
   for(auto& sec : detail::sections(c)) {
      out += (out.empty() ? "[" : "\n[") + sec.name + "]\n";
      if(sec.name == "env") {
         out += "kind = " + detail::to_string(c.env.kind) + "\n";
      }
      for(const auto& f : sec.fields) {
         out += f.key + " = " + f.write() + "\n";
      }
   }
   return out;
}

}  // namespace shapcred

#endif  // SHAPCRED_CONFIG_HPP
