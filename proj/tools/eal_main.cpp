#include <string>

#include <CLI11.hpp>

#include "eal/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"eal - long-run averages along integer-part iterate sequences"};
  app.set_version_flag("--version", eal::runner::version());
  app.require_subcommand(1);

  eal::runner::RunOptions opts;
  std::string chosen;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", opts.config_path, "config file (TOML or JSON)");
    if (config_required) c->required();
    sub->add_option("--out", opts.out_dir, "output directory");
    sub->add_option("--workers", opts.workers, "worker threads (0 = all cores)");
    sub->callback([&, sub]() { chosen = sub->get_name(); });
  };

  CLI::App* classify = app.add_subcommand("classify", "function-class verdicts");
  classify->add_option("--function", opts.functions, "function DSL text (repeatable)");
  classify->add_option("--classes", opts.classes, "classes to check (SL,F,T,S,D0..D2,M0..M2)")
      ->delimiter(',');
  add_common(classify, false);

  add_common(app.add_subcommand("average", "checkpointed multiple averages"), true);
  add_common(app.add_subcommand("limit", "closed-form limit predictions"), true);
  add_common(app.add_subcommand("invariance", "empirical-measure invariance defects"), true);
  add_common(app.add_subcommand("occupancy", "floor-iterate box counts"), true);
  add_common(app.add_subcommand("sweep", "grid of experiments, one row per cell"), true);

  CLI11_PARSE(app, argc, argv);
  return eal::runner::run_command(chosen, opts);
}
