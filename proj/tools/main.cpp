#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cubepose/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"bounding-cube pose metrics, fitting, and dataset tools"};
  app.require_subcommand(1);

  std::string gt, pred, config, out, prior, intrinsics;
  std::string init = "perturbed";
  double fixed_mm = 0.0;

  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "score predictions against ground truth (ADD / ADD-S at k)");
  evaluate->add_option("--gt", gt, "ground-truth JSONL")->required();
  evaluate->add_option("--pred", pred, "prediction JSONL")->required();
  evaluate->add_option("--config", config, "experiment config (defaults if omitted)");
  evaluate->add_option("--out", out, "output directory")->required();

  CLI::App* fit = app.add_subcommand(
      "fit", "gradient-descent pose + scale fit of a prior cube to one record");
  fit->add_option("--prior", prior, "prior cube: .ply mesh or prior JSON")->required();
  fit->add_option("--gt", gt, "ground-truth JSONL (first record is the target)")
      ->required();
  fit->add_option("--config", config, "experiment config (defaults if omitted)");
  fit->add_option("--out", out, "output directory")->required();
  fit->add_option("--init", init, "starting point: perturbed (default) or gt")
      ->check(CLI::IsMember({"perturbed", "gt"}));

  CLI::App* gradcheck = app.add_subcommand(
      "gradcheck", "compare the analytic gradient against finite differences");
  gradcheck->add_option("--config", config, "experiment config (defaults if omitted)");

  CLI::App* audit = app.add_subcommand(
      "audit", "flag ground-truth cubes that cannot be visible in the camera");
  audit->add_option("--gt", gt, "ground-truth JSONL")->required();
  audit->add_option("--intrinsics", intrinsics, "camera key-value file")->required();
  audit->add_option("--config", config, "experiment config (defaults if omitted)");
  audit->add_option("--out", out, "output directory")->required();

  CLI::App* prior_cmd = app.add_subcommand(
      "prior", "per-class average bounding-cube priors from ground truth");
  prior_cmd->add_option("--gt", gt, "ground-truth JSONL")->required();
  prior_cmd->add_option("--out", out, "output directory")->required();
  prior_cmd->add_option("--fixed-mm", fixed_mm,
                        "override: centered cube with this edge length");
  prior_cmd->add_option("--config", config, "experiment config (defaults if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cubepose::kExitSuccess : cubepose::kExitInputError;
  }

  if (evaluate->parsed())
    return cubepose::cmd_evaluate(gt, pred, config, out, std::cout);
  if (fit->parsed())
    return cubepose::cmd_fit(prior, gt, config, out, init == "gt", std::cout);
  if (gradcheck->parsed()) return cubepose::cmd_gradcheck(config, std::cout);
  if (audit->parsed())
    return cubepose::cmd_audit(gt, intrinsics, config, out, std::cout);
  if (prior_cmd->parsed())
    return cubepose::cmd_prior(gt, out, fixed_mm, config, std::cout);
  return cubepose::kExitInputError;
}
