#include <CLI11.hpp>
#include <exception>
#include <iostream>
#include <string>

#include "shapcred/commands.hpp"

int main(int argc, char** argv)
{
   using namespace shapcred;
   CLI::App app{"Shapley counterfactual credit assignment: training, credit audits and cost benchmarks"};
   app.require_subcommand(1);

   TrainOptions train;
   std::string train_config;
   auto* tr = app.add_subcommand("train", "train agents and critic from a config file");
   tr->add_option("config", train_config, "config file")->required()->check(CLI::ExistingFile);
   tr->add_option("--seed", train.seed, "override train.seed");
   tr->add_option("--out", train.out, "override output.dir");
   tr->add_flag("--overwrite", train.overwrite, "replace an existing run directory");

   AuditOptions audit;
   std::string audit_ckpt, audit_config, audit_ms = "1,2,4,5,8";
   auto* au = app.add_subcommand("audit", "compare credit estimators on a trained critic");
   au->add_option("checkpoint", audit_ckpt, "checkpoint directory")->required()->check(CLI::ExistingDirectory);
   au->add_option("config", audit_config, "environment config")->required()->check(CLI::ExistingFile);
   au->add_option("--steps", audit.steps, "greedy steps to audit")->capture_default_str();
   au->add_option("--M", audit_ms, "Monte Carlo sample counts, e.g. 1,2,4,5,8")->capture_default_str();
   au->add_option("--seed", audit.seed, "override the config seed");
   au->add_option("--out", audit.out, "output directory")->capture_default_str();

   BenchOptions bench;
   std::string bench_ns = "2..10", bench_ms = "1,5,10";
   auto* be = app.add_subcommand("bench", "count critic evaluations of exact and sampled credits");
   be->add_option("--n", bench_ns, "agent counts, e.g. 2..10")->capture_default_str();
   be->add_option("--M", bench_ms, "Monte Carlo sample counts, e.g. 1,5,10")->capture_default_str();
   be->add_option("--trials", bench.trials, "random steps per configuration")->capture_default_str();
   be->add_option("--seed", bench.seed)->capture_default_str();
   be->add_option("--out", bench.out, "output directory")->capture_default_str();

   CLI11_PARSE(app, argc, argv);

   try {
      if(tr->parsed()) {
         train.config = train_config;
         return cmd_train(train, std::cout);
      }
      if(au->parsed()) {
         audit.checkpoint = audit_ckpt;
         audit.config = audit_config;
         audit.ms = parse_count_list(audit_ms);
         return cmd_audit(audit, std::cout);
      }
      bench.ns = parse_count_list(bench_ns);
      bench.ms = parse_count_list(bench_ms);
      return cmd_bench(bench, std::cout);
   } catch(const ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
   } catch(const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
   }
}
