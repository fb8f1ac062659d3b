#include "stparse/cli.hpp"

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "stparse/inference.hpp"
#include "stparse/io.hpp"
#include "stparse/learning.hpp"
#include "stparse/metrics.hpp"
#include "stparse/svg.hpp"
#include "stparse/synth.hpp"

namespace stparse {
namespace {

// --seed wins; otherwise STPARSE_SEED from the environment; otherwise 0.
// Every randomized command prints the seed it actually used.
std::uint64_t resolve_seed(const CLI::Option* option, std::uint64_t flag_value) {
  if (option->count() > 0) return flag_value;
  if (const char* env = std::getenv("STPARSE_SEED")) return std::strtoull(env, nullptr, 10);
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Trajectory grammar toolkit: learn latent sub-event templates of group"
               " events and jointly infer groupings, events, roles, and segmentations."};
  app.require_subcommand(1);

  std::string data_path, model_path, out_path, truth_path, pred_path, solution_path, script_arg;
  std::uint64_t seed_value = 0;
  int k = 27;
  Scalar unit = 2.0;
  bool metric_raw = false;
  std::string eval_out;
  InferenceConfig inference;

  CLI::App* train_cmd = app.add_subcommand("train", "Learn a model from an annotated dataset");
  train_cmd->add_option("--data", data_path, "annotated dataset JSON")->required();
  train_cmd->add_option("--out", out_path, "output model JSON")->required();
  train_cmd->add_option("--k", k, "number of latent templates");
  train_cmd->add_option("--unit", unit, "unit interval length in seconds");
  CLI::Option* train_seed = train_cmd->add_option("--seed", seed_value, "random seed");

  CLI::App* infer_cmd = app.add_subcommand("infer", "Parse a dataset with a trained model");
  infer_cmd->add_option("--data", data_path, "dataset JSON")->required();
  infer_cmd->add_option("--model", model_path, "model JSON")->required();
  infer_cmd->add_option("--out", out_path, "output solution JSON")->required();
  CLI::Option* infer_seed = infer_cmd->add_option("--seed", seed_value, "random seed");
  infer_cmd->add_option("--sweeps", inference.outer_iters, "outer iterations");
  infer_cmd->add_option("--grouping-sweeps", inference.grouping_sweeps,
                        "merge/split proposals per outer iteration");
  infer_cmd->add_option("--role-sweeps", inference.role_sweeps,
                        "role proposals per group per outer iteration");

  CLI::App* eval_cmd = app.add_subcommand("eval", "Score a solution against ground truth");
  eval_cmd->add_option("--truth", truth_path, "annotated dataset JSON")->required();
  eval_cmd->add_option("--pred", pred_path, "solution JSON")->required();
  eval_cmd->add_flag("--metric-raw", metric_raw,
                     "report per-group fraction sums instead of their mean");
  eval_cmd->add_option("--out", eval_out, "also write the report as JSON");

  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a dataset from a scenario script");
  synth_cmd->add_option("--script", script_arg, "scenario JSON, or suite:<name>")->required();
  synth_cmd->add_option("--out", out_path, "output dataset JSON")->required();
  CLI::Option* synth_seed = synth_cmd->add_option("--seed", seed_value, "random seed");

  CLI::App* render_cmd = app.add_subcommand("render", "Render a dataset (and solution) as SVG");
  render_cmd->add_option("--data", data_path, "dataset JSON")->required();
  render_cmd->add_option("--solution", solution_path, "solution JSON");
  render_cmd->add_option("--out", out_path, "output SVG file")->required();

  CLI::App* validate_cmd = app.add_subcommand("validate", "Check a dataset or model file");
  validate_cmd->add_option("--data", data_path, "dataset JSON");
  validate_cmd->add_option("--model", model_path, "model JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(train_cmd)) {
      TrainingConfig config;
      config.k = k;
      config.features.unit = unit;
      config.seed = resolve_seed(train_seed, seed_value);
      std::cout << "seed: " << config.seed << "\n";
      Dataset dataset = load_dataset(data_path);
      Model model = train(dataset, config);
      save_model(model, out_path);
      std::cout << "templates: " << model.grammar.template_count() << "\n";
      std::cout << "wrote " << out_path << "\n";
    } else if (app.got_subcommand(infer_cmd)) {
      inference.seed = resolve_seed(infer_seed, seed_value);
      std::cout << "seed: " << inference.seed << "\n";
      Dataset dataset = load_dataset(data_path);
      Model model = load_model(model_path);
      InferenceResult result = infer(dataset, model, inference);
      save_solution(result.solution, result.breakdown, dataset, out_path);
      std::cout << "groups: " << result.solution.groups.size() << "\n";
      std::cout << "energy: " << result.solution.energy << "\n";
      std::cout << "wrote " << out_path << "\n";
    } else if (app.got_subcommand(eval_cmd)) {
      Dataset truth = load_dataset(truth_path);
      LoadedSolution predicted = load_solution(pred_path, truth);
      EvalOptions options;
      options.raw = metric_raw;
      EvalReport report = evaluate(truth, predicted.solution, options);
      std::cout << eval_report_table(report, truth.vocabulary);
      if (!eval_out.empty()) {
        write_file(eval_out, eval_report_to_json(report, truth.vocabulary));
        std::cout << "wrote " << eval_out << "\n";
      }
    } else if (app.got_subcommand(synth_cmd)) {
      std::uint64_t seed = resolve_seed(synth_seed, seed_value);
      std::cout << "seed: " << seed << "\n";
      ScenarioScript script = script_arg.rfind("suite:", 0) == 0
                                  ? suite_script(script_arg.substr(6))
                                  : load_scenario(script_arg);
      SynthResult result = generate(script, seed);
      save_dataset(result.dataset, out_path);
      std::cout << "trajectories: " << result.dataset.trajectories.size() << "\n";
      std::cout << "groups: " << result.dataset.truth_groups.size() << "\n";
      std::cout << "wrote " << out_path << "\n";
    } else if (app.got_subcommand(render_cmd)) {
      Dataset dataset = load_dataset(data_path);
      if (!solution_path.empty()) {
        LoadedSolution loaded = load_solution(solution_path, dataset);
        write_file(out_path, render_svg(dataset, &loaded.solution));
      } else {
        write_file(out_path, render_svg(dataset));
      }
      std::cout << "wrote " << out_path << "\n";
    } else if (app.got_subcommand(validate_cmd)) {
      if (data_path.empty() == model_path.empty()) {
        std::cerr << "validate: exactly one of --data or --model is required\n";
        return 2;
      }
      if (!data_path.empty()) {
        load_dataset(data_path);
        std::cout << data_path << ": ok\n";
      } else {
        load_model(model_path);
        std::cout << model_path << ": ok\n";
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace stparse
