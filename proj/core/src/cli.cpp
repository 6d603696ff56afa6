#include "defectscope/cli.hpp"

#include <iostream>

#include <CLI11.hpp>

namespace dscope {

namespace {

void add_forest_options(CLI::App* cmd, CliInvocation& inv) {
  cmd->add_option("--trees", inv.config.forest.n_tree, "Number of trees in the ensemble")
      ->capture_default_str();
  cmd->add_option("--seed", inv.config.forest.seed, "Random seed")->capture_default_str();
  cmd->add_option("--max-depth", inv.config.forest.max_depth, "Maximum tree depth")
      ->capture_default_str();
  cmd->add_option("--min-samples-leaf", inv.config.forest.min_samples_leaf,
                  "Minimum training rows per leaf")
      ->capture_default_str();
  cmd->add_option("--features-per-split", inv.config.forest.features_per_split,
                  "Characteristics sampled per split")
      ->capture_default_str();
  cmd->add_flag("--no-balance", [&inv](std::int64_t) { inv.config.forest.balance_classes = false; },
                "Disable balanced class weights");
  cmd->add_option("--good-learned-threshold", inv.config.forest.good_learned_threshold,
                  "Learning score needed to call the forest well-learned")
      ->capture_default_str();
}

void add_report_options(CLI::App* cmd, CliInvocation& inv) {
  cmd->add_flag("--route-plot", inv.config.route_plot, "Also draw the top decision routes");
  cmd->add_option("--top-k", inv.config.top_k, "Routes reported per leaf class")
      ->capture_default_str();
  cmd->add_flag("--dump-forest", inv.config.dumps.forest_json,
                "Write forest.json per reasoning target");
  cmd->add_flag("--dump-summary", inv.config.dumps.summary_json,
                "Write summary.json per reasoning target");
}

void add_dataset_options(CLI::App* cmd, CliInvocation& inv, std::string& task) {
  cmd->add_option("--images", inv.config.paths.images_dir, "Folder of original images")
      ->required();
  cmd->add_option("--gt", inv.config.paths.gt_dir, "Folder of ground-truth mask labels")
      ->required();
  cmd->add_option("--pred", inv.config.paths.pred_dir, "Folder of predicted mask labels")
      ->required();
  cmd->add_option("--task", task, "Task mode: detection, classification, or joint")
      ->check(CLI::IsMember({"detection", "classification", "joint"}))
      ->capture_default_str();
  cmd->add_option("--iou-threshold", inv.config.iou_threshold,
                  "Pixel-IoU needed to count a prediction as a detection")
      ->capture_default_str();
}

}  // namespace

CliParseResult parse_cli(const std::vector<std::string>& args) {
  CliParseResult result;
  CliInvocation inv;
  std::string task = "joint";

  CLI::App app{"Post-hoc reasoning for defect detection and classification models", "defectscope"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  CLI::App* run = app.add_subcommand("run", "Ingest a dataset and produce reasoning reports");
  add_dataset_options(run, inv, task);
  run->add_option("--out", inv.config.out_dir, "Output directory")->required();
  run->add_option("--threads", inv.config.threads, "Worker threads (0 = auto)")
      ->capture_default_str();
  add_forest_options(run, inv);
  add_report_options(run, inv);

  CLI::App* extract =
      app.add_subcommand("extract", "Ingest and extract characteristics, dumping CSV files");
  add_dataset_options(extract, inv, task);
  extract->add_option("--out", inv.config.out_dir, "Output directory")->required();
  extract->add_option("--threads", inv.config.threads, "Worker threads (0 = auto)")
      ->capture_default_str();

  CLI::App* reason =
      app.add_subcommand("reason", "Produce reasoning reports from extract's CSV dumps");
  reason->add_option("--matrix", inv.reason.matrix_csv, "dc_matrix.csv from extract")->required();
  reason->add_option("--targets", inv.reason.targets_csv, "targets.csv from extract")->required();
  reason->add_option("--out", inv.config.out_dir, "Output directory")->required();
  reason->add_option("--threads", inv.config.threads, "Worker threads (0 = auto)")
      ->capture_default_str();
  add_forest_options(reason, inv);
  add_report_options(reason, inv);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    result.exit_code = 0;
    result.message = app.help();
    return result;
  } catch (const CLI::CallForAllHelp& e) {
    result.exit_code = 0;
    result.message = app.help("", CLI::AppFormatMode::All);
    return result;
  } catch (const CLI::ParseError& e) {
    result.exit_code = kExitConfig;
    result.message = e.what();
    return result;
  }

  inv.config.task = *parse_task_mode(task);
  if (run->parsed()) {
    inv.verb = CliVerb::run;
  } else if (extract->parsed()) {
    inv.verb = CliVerb::extract;
  } else {
    inv.verb = CliVerb::reason;
  }
  result.invocation = inv;
  return result;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  CliParseResult parsed = parse_cli(args);
  if (!parsed.invocation) {
    if (parsed.exit_code == 0) {
      std::cout << parsed.message;
    } else {
      std::cerr << parsed.message << "\n";
    }
    return parsed.exit_code;
  }

  try {
    const CliInvocation& inv = *parsed.invocation;
    switch (inv.verb) {
      case CliVerb::run:
        return run_pipeline(inv.config);
      case CliVerb::extract:
        return run_extract(inv.config);
      case CliVerb::reason:
        return run_reason(inv.reason, inv.config);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace dscope
