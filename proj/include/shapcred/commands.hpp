#ifndef SHAPCRED_COMMANDS_HPP
#define SHAPCRED_COMMANDS_HPP

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "shapcred/audit.hpp"
#include "shapcred/checkpoint.hpp"
#include "shapcred/config.hpp"
#include "shapcred/trainer.hpp"

namespace shapcred {

inline constexpr const char* metrics_header =
   "episode,eval_return,success_rate,epsilon,critic_loss,agent_loss,credit_mean,credit_std";

namespace detail {

inline std::string fmt(double v) { return format_number(v); }
inline std::string fmt(std::size_t v) { return std::to_string(v); }

/// The effective configuration as `# ` comment lines, without the output
/// directory so that artifacts do not depend on where they are written.
inline std::string config_echo(const RunConfig& c)
{
   RunConfig echo = c;
   echo.output.dir = "-";
   std::istringstream in(serialize(echo));
   std::string out;
   for(std::string line; std::getline(in, line);) {
      if(line.empty() || line.rfind("dir = ", 0) == 0) {
         continue;
      }
      out += "# " + line + "\n";
   }
   return out;
}

inline std::ofstream open_out(const std::filesystem::path& p)
{
   std::ofstream out(p, std::ios::trunc);
   if(! out) {
      throw std::runtime_error("cannot write " + p.string());
   }
   return out;
}

inline RunConfig read_config_file(const std::filesystem::path& p)
{
   std::ifstream in(p);
   if(! in) {
      throw std::runtime_error("cannot read config " + p.string());
   }
   return parse_config(in);
}

inline std::string metrics_row(const MetricsRecord& r)
{
   return fmt(r.episode) + "," + fmt(r.eval_return) + "," + fmt(r.success_rate) + "," + fmt(r.epsilon) + ","
          + fmt(r.critic_loss) + "," + fmt(r.agent_loss) + "," + fmt(r.credit_mean) + "," + fmt(r.credit_std);
}

inline nlohmann::json metrics_json(const MetricsRecord& r)
{
   auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
   return {{"episode", r.episode},        {"eval_return", num(r.eval_return)}, {"success_rate", num(r.success_rate)},
           {"epsilon", num(r.epsilon)},   {"critic_loss", num(r.critic_loss)}, {"agent_loss", num(r.agent_loss)},
           {"credit_mean", num(r.credit_mean)}, {"credit_std", num(r.credit_std)}};
}

}  // namespace detail

struct TrainOptions {
   std::filesystem::path config;
   std::optional< std::uint64_t > seed;
   std::optional< std::filesystem::path > out;
   bool overwrite = false;
};

/// Trains one configuration. Writes into the run directory:
///   config.cfg        effective configuration
///   metrics.csv       one row per evaluation
///   run_summary.json  final and best evaluation, seed, config, wall time
///   checkpoints/      episode_<k>/ at the configured cadence, and final/
inline int cmd_train(const TrainOptions& opt, std::ostream& log)
{
   namespace fs = std::filesystem;
   RunConfig cfg = detail::read_config_file(opt.config);
   if(opt.seed) {
      cfg.train.seed = *opt.seed;
   }
   if(opt.out) {
      cfg.output.dir = opt.out->string();
   }
   validate(cfg);

   const fs::path dir = cfg.output.dir;
   if(fs::exists(dir)) {
      if(! opt.overwrite) {
         throw std::runtime_error("run directory " + dir.string() + " exists; pass --overwrite to replace it");
      }
      fs::remove_all(dir);
   }
   fs::create_directories(dir);
   detail::open_out(dir / "config.cfg") << serialize(cfg);

   const auto started = std::chrono::steady_clock::now();
   Trainer trainer(make_env(cfg.env), cfg.train, cfg.model);
   const double optimal = trainer.env().optimal_return();

   auto csv = detail::open_out(dir / "metrics.csv");
   csv << "# shapcred train\n# seed = " << cfg.train.seed << "\n" << detail::config_echo(cfg) << metrics_header << "\n";

   std::optional< MetricsRecord > best;
   MetricsRecord last;
   trainer.train(
      [&](const MetricsRecord& r) {
         csv << detail::metrics_row(r) << "\n" << std::flush;
         log << "episode " << r.episode << "  return " << detail::fmt(r.eval_return) << "  success "
             << detail::fmt(r.success_rate) << "  epsilon " << detail::fmt(r.epsilon) << "\n";
         if(! best || r.eval_return > best->eval_return) {
            best = r;
         }
         last = r;
         return true;
      },
      [&](std::size_t episode, const Trainer& t) {
         if(cfg.output.checkpoint_interval > 0 && episode % cfg.output.checkpoint_interval == 0) {
            save_checkpoint(dir / "checkpoints" / ("episode_" + std::to_string(episode)), cfg, t);
         }
      });
   save_checkpoint(dir / "checkpoints" / "final", cfg, trainer);

   const double wall = std::chrono::duration< double >(std::chrono::steady_clock::now() - started).count();
   nlohmann::json summary = {{"command", "train"},
                             {"seed", cfg.train.seed},
                             {"episodes", trainer.episodes_done()},
                             {"credit_strategy", to_string(cfg.train.credit_strategy)},
                             {"final", detail::metrics_json(last)},
                             {"best", detail::metrics_json(*best)},
                             {"optimal_return", std::isfinite(optimal) ? nlohmann::json(optimal) : nlohmann::json(nullptr)},
                             {"wall_seconds", wall},
                             {"config", serialize(cfg)}};
   detail::open_out(dir / "run_summary.json") << summary.dump(2) << "\n";
   log << "wrote " << dir.string() << "\n";
   return 0;
}

struct AuditOptions {
   std::filesystem::path checkpoint;
   std::filesystem::path config;
   std::size_t steps = 100;
   std::vector< std::size_t > ms{1, 2, 4, 5, 8};
   std::optional< std::uint64_t > seed;
   std::filesystem::path out = "audit";
};

/// Writes audit.csv (one row per step and agent) and audit_summary.json.
inline int cmd_audit(const AuditOptions& opt, std::ostream& log)
{
   namespace fs = std::filesystem;
   const Checkpoint cp = load_checkpoint(opt.checkpoint);
   RunConfig cfg = detail::read_config_file(opt.config);
   if(opt.seed) {
      cfg.train.seed = *opt.seed;
   }
   auto env = make_env(cfg.env);
   const auto res = run_audit(cp.critic, cp.agents, *env, opt.steps, opt.ms, cfg.train.seed, cfg.train.exact_cap);

   fs::create_directories(opt.out);
   auto csv = detail::open_out(opt.out / "audit.csv");
   csv << "# shapcred audit\n# seed = " << cfg.train.seed << "\n# checkpoint_episode = " << cp.episode << "\n"
       << "# steps = " << opt.steps << "\n";
   if(! res.exact_available) {
      csv << "# exact column omitted: " << res.n_agents << " agents exceed exact_cap " << cfg.train.exact_cap << "\n";
   }
   csv << detail::config_echo(cfg);
   csv << "step,episode,t,agent,grand,all_masked";
   if(res.exact_available) {
      csv << ",exact";
   }
   for(auto m : res.ms) {
      csv << ",mc_" << m;
   }
   csv << ",plain_cf,uniform";
   if(res.exact_available) {
      csv << ",evals_exact";
   }
   for(auto m : res.ms) {
      csv << ",evals_mc_" << m;
   }
   csv << "\n";
   for(std::size_t k = 0; k < res.steps.size(); ++k) {
      const auto& s = res.steps[k];
      for(std::size_t i = 0; i < res.n_agents; ++i) {
         csv << k << "," << s.episode << "," << s.t << "," << i << "," << detail::fmt(s.grand) << ","
             << detail::fmt(s.all_masked);
         if(res.exact_available) {
            csv << "," << detail::fmt(s.exact[i]);
         }
         for(const auto& mc : s.mc) {
            csv << "," << detail::fmt(mc[i]);
         }
         csv << "," << detail::fmt(s.plain_cf[i]) << "," << detail::fmt(s.uniform[i]);
         if(res.exact_available) {
            csv << "," << s.exact_evaluations;
         }
         for(auto e : s.mc_evaluations) {
            csv << "," << e;
         }
         csv << "\n";
      }
   }

   auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
   nlohmann::json cols = nlohmann::json::array();
   log << "M     MAE vs exact   Spearman   max evals (bound)\n";
   for(const auto& c : res.columns) {
      cols.push_back({{"M", c.m},
                      {"mae", num(c.mae)},
                      {"spearman", num(c.spearman)},
                      {"spearman_steps", c.spearman_steps},
                      {"max_critic_evaluations", c.max_evaluations},
                      {"evaluation_bound", c.evaluation_bound}});
      log << c.m << "     " << detail::fmt(c.mae) << "   " << detail::fmt(c.spearman) << "   " << c.max_evaluations
          << " (" << c.evaluation_bound << ")\n";
   }
   nlohmann::json summary = {{"command", "audit"},
                             {"seed", cfg.train.seed},
                             {"steps", res.steps.size()},
                             {"n_agents", res.n_agents},
                             {"exact_available", res.exact_available},
                             {"checkpoint_episode", cp.episode},
                             {"mc", cols},
                             {"max_efficiency_residual", num(res.max_efficiency_residual)},
                             {"mean_abs_exact", res.mean_abs_exact},
                             {"config", serialize(cfg)}};
   detail::open_out(opt.out / "audit_summary.json") << summary.dump(2) << "\n";
   log << "wrote " << (opt.out / "audit.csv").string() << "\n";
   return 0;
}

struct BenchOptions {
   std::vector< std::size_t > ns{2, 3, 4, 5, 6, 7, 8, 9, 10};
   std::vector< std::size_t > ms{1, 5, 10};
   std::size_t trials = 20;
   std::uint64_t seed = 0;
   std::filesystem::path out = "bench";
};

inline constexpr const char* bench_header =
   "n,method,M,trials,coalition_evals_max,critic_evals_mean,critic_evals_max,critic_eval_bound,lookups_max,wall_us_mean";

/// Writes bench.csv and prints the same table.
inline int cmd_bench(const BenchOptions& opt, std::ostream& log)
{
   const auto rows = run_bench(opt.ns, opt.ms, opt.trials, opt.seed);
   std::filesystem::create_directories(opt.out);
   auto csv = detail::open_out(opt.out / "bench.csv");
   csv << "# shapcred bench\n# seed = " << opt.seed << "\n# trials = " << opt.trials << "\n" << bench_header << "\n";
   log << bench_header << "\n";
   for(const auto& r : rows) {
      std::string line = std::to_string(r.n) + "," + r.method + "," + std::to_string(r.m) + "," + std::to_string(r.trials)
                         + "," + std::to_string(r.coalition_evaluations_max) + "," + detail::fmt(r.critic_evaluations_mean)
                         + "," + std::to_string(r.critic_evaluations_max) + "," + std::to_string(r.critic_evaluation_bound)
                         + "," + std::to_string(r.lookups_max) + "," + detail::fmt(r.wall_us_mean);
      csv << line << "\n";
      log << line << "\n";
   }
   return 0;
}

/// "2..10", "1,5,10" or a mix such as "1,3..5".
inline std::vector< std::size_t > parse_count_list(const std::string& text)
{
   std::vector< std::size_t > out;
   for(const auto& tok : detail::split(text, ',')) {
      const auto dots = tok.find("..");
      if(dots == std::string::npos) {
         out.push_back(detail::parse_number< std::size_t >("list", tok));
         continue;
      }
      const auto lo = detail::parse_number< std::size_t >("list", tok.substr(0, dots));
      const auto hi = detail::parse_number< std::size_t >("list", tok.substr(dots + 2));
      if(hi < lo) {
         throw ConfigError("list", "empty range '" + tok + "'");
      }
      for(auto v = lo; v <= hi; ++v) {
         out.push_back(v);
      }
   }
   return out;
}

}  // namespace shapcred

#endif  // SHAPCRED_COMMANDS_HPP
