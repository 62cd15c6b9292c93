// SPDX-License-Identifier: Apache-2.0
#include "sepred/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "sepred/jsonio.hpp"
#include "sepred/report.hpp"

namespace sepred {

namespace {

constexpr double kGradCheckEpsilon = 1e-5;
constexpr double kGradCheckThreshold = 1e-6;

struct GenOptions {
  std::string out;
  std::size_t n_per_class = 500;
  double separation = 4.0;
  std::string signal = "both";
  double noise_stddev = 1.0;
  std::uint64_t seed = 42;
};

struct RunOptions {
  std::string data;
  std::string manifest;
  std::string out;
  std::string variant;   // empty on ablate = both variants
  std::string category;  // empty on ablate = all three categories
  std::size_t k = 10;
  std::uint64_t seed = 42;
  std::size_t epochs = 20;
  std::size_t batch_size = 32;
  bool dump_models = false;
};

struct GradcheckOptions {
  std::uint64_t seed = 42;
  bool corrupt = false;
};

ModelSpec spec_from(const RunOptions& o) {
  ModelSpec spec;
  spec.epochs = o.epochs;
  spec.batch_size = o.batch_size;
  spec.seed = o.seed;
  return spec;
}

Dataset load_input(const RunOptions& o) {
  const FeatureManifest manifest = o.manifest.empty()
                                       ? FeatureManifest::default_manifest()
                                       : FeatureManifest::load_json(o.manifest);
  return load_csv(o.data, manifest);
}

std::map<std::string, std::string> config_map(const RunOptions& o) {
  return {
      {"data", o.data},
      {"manifest", o.manifest.empty() ? "(default)" : o.manifest},
      {"out", o.out},
      {"variant", o.variant.empty() ? "(grid)" : o.variant},
      {"category", o.category.empty() ? "(grid)" : o.category},
      {"k", std::to_string(o.k)},
      {"seed", std::to_string(o.seed)},
      {"epochs", std::to_string(o.epochs)},
      {"batch-size", std::to_string(o.batch_size)},
      {"dump-models", o.dump_models ? "true" : "false"},
  };
}

void add_run_manifest(ReportBundle& bundle, const std::string& command,
                      const std::map<std::string, std::string>& config,
                      const std::string& fingerprint) {
  std::vector<std::string> outputs;
  for (const auto& [name, content] : bundle.files) outputs.push_back(name);
  outputs.push_back("run.json");
  bundle.add("run.json",
             dump_json(run_manifest_json(command, config, fingerprint, outputs)) + "\n");
}

/// Model for the optional dump: trained on every (standardized) row of the
/// selected dataset with the run seed.
std::string final_model_json(const Dataset& ds, ModelSpec spec, std::uint64_t seed) {
  const Standardizer standardizer = Standardizer::fit(ds);
  const Dataset all = standardizer.apply(ds);
  SeededRng rng(seed);
  return train(spec, all.x, all.y, rng).model.to_json() + "\n";
}

int run_gen(const GenOptions& o) {
  SynthConfig config{o.n_per_class, o.separation, selector_from_string(o.signal),
                     o.noise_stddev, o.seed};
  config.validate();
  const Dataset ds = gen_synthetic(config);
  ReportBundle bundle;
  bundle.add("dataset.csv", to_csv(ds));
  bundle.add("manifest.json", ds.manifest.to_json() + "\n");
  write_bundle(o.out, bundle);
  std::cout << "wrote " << ds.sample_count() << " samples to " << o.out
            << "/dataset.csv (+ manifest.json)\n";
  return 0;
}

int run_cv(const RunOptions& o) {
  const Dataset full = load_input(o);
  const auto category = selector_from_string(o.category);
  const auto variant = variant_from_string(o.variant);
  const Dataset ds = select_features(full, category);
  ModelSpec spec = spec_from(o);
  spec.variant = variant;

  const CvReport report = cross_validate(ds, spec, o.k, o.seed, category);

  ReportBundle bundle;
  bundle.add(fold_table_filename(variant, category), fold_table_csv(report));
  if (o.dump_models) {
    bundle.add(model_dump_filename(variant, category), final_model_json(ds, spec, o.seed));
  }
  add_run_manifest(bundle, "cv", config_map(o), dataset_fingerprint(full));
  write_bundle(o.out, bundle);

  std::printf("%s/%s: acc %.4f  auc %.4f  (k=%zu)\n", o.variant.c_str(),
              o.category.c_str(), report.average.accuracy, report.average.auc, o.k);
  return 0;
}

int run_ablate(const RunOptions& o) {
  const Dataset full = load_input(o);
  const std::vector<ModelVariant> variants =
      o.variant.empty()
          ? std::vector<ModelVariant>{ModelVariant::Dpnn, ModelVariant::Conv1d}
          : std::vector<ModelVariant>{variant_from_string(o.variant)};
  const std::vector<CategorySelector> categories =
      o.category.empty()
          ? std::vector<CategorySelector>{CategorySelector::All, CategorySelector::Genomic,
                                          CategorySelector::Epigenomic}
          : std::vector<CategorySelector>{selector_from_string(o.category)};

  const AblationReport report = ablate(full, spec_from(o), categories, variants, o.k, o.seed);

  ReportBundle bundle;
  for (const auto& cell : report.cells) {
    bundle.add(fold_table_filename(cell.variant, cell.category),
               fold_table_csv(cell.report));
  }
  bundle.add("ablation_summary.json", dump_json(ablation_summary_json(report)) + "\n");
  if (o.dump_models) {
    for (const auto& cell : report.cells) {
      ModelSpec spec = spec_from(o);
      spec.variant = cell.variant;
      bundle.add(model_dump_filename(cell.variant, cell.category),
                 final_model_json(select_features(full, cell.category), spec, o.seed));
    }
  }
  add_run_manifest(bundle, "ablate", config_map(o), dataset_fingerprint(full));
  write_bundle(o.out, bundle);

  for (const auto& cell : report.cells) {
    std::printf("%-7s %-11s acc %.4f  auc %.4f\n", to_string(cell.variant).c_str(),
                to_string(cell.category).c_str(), cell.report.average.accuracy,
                cell.report.average.auc);
  }
  return 0;
}

int run_gradcheck(const GradcheckOptions& o) {
  int status = 0;
  for (const ModelVariant variant : {ModelVariant::Dpnn, ModelVariant::Conv1d}) {
    ModelSpec spec;
    spec.variant = variant;
    spec.seed = o.seed;
    // Self-generated batch over the 45-feature width.
    SeededRng rng = SeededRng(o.seed).split(variant == ModelVariant::Dpnn ? 101 : 202);
    Tensor x({4, 45});
    for (double& v : x.values()) v = rng.next_gaussian();
    const std::vector<int> y = {0, 1, 1, 0};
    const double err =
        grad_check(spec, x, y, kGradCheckEpsilon, o.corrupt ? 1e-3 : 0.0);
    std::printf("%-7s max relative gradient error: %.3e (threshold %.0e)\n",
                to_string(variant).c_str(), err, kGradCheckThreshold);
    if (!(err < kGradCheckThreshold)) status = 3;
  }
  return status;
}

void add_run_options(CLI::App* cmd, RunOptions& o, bool grid_defaults) {
  cmd->add_option("--data", o.data, "Dataset CSV path")->required();
  cmd->add_option("--manifest", o.manifest,
                  "Feature manifest JSON (defaults to the built-in 45-feature schema)");
  cmd->add_option("--out", o.out, "Output directory")->required();
  if (grid_defaults) {
    cmd->add_option("--variant", o.variant, "Restrict to one model variant")
        ->check(CLI::IsMember({"dpnn", "conv1d"}));
    cmd->add_option("--category", o.category, "Restrict to one feature category")
        ->check(CLI::IsMember({"all", "genomic", "epigenomic"}));
  } else {
    o.variant = "dpnn";
    o.category = "all";
    cmd->add_option("--variant", o.variant, "Model variant")
        ->check(CLI::IsMember({"dpnn", "conv1d"}))
        ->capture_default_str();
    cmd->add_option("--category", o.category, "Feature category to train on")
        ->check(CLI::IsMember({"all", "genomic", "epigenomic"}))
        ->capture_default_str();
  }
  cmd->add_option("--k", o.k, "Number of cross-validation folds")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Run seed")->capture_default_str();
  cmd->add_option("--epochs", o.epochs, "Training epochs")->capture_default_str();
  cmd->add_option("--batch-size", o.batch_size, "Mini-batch size")->capture_default_str();
  cmd->add_flag("--dump-models", o.dump_models,
                "Also write model_<variant>_<category>.json files");
  cmd->set_config("--config", "", "Flat key=value config file; flags win over the file");
  cmd->allow_config_extras(false);
}

}  // namespace

int run_cli(std::vector<std::string> args) {
  CLI::App app{"Super-enhancer classification with small deterministic neural networks"};
  app.set_version_flag("--version", kArtifactVersion);
  app.require_subcommand(1);

  GenOptions gen_opts;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset CSV and manifest");
  gen->add_option("--out", gen_opts.out, "Output directory")->required();
  gen->add_option("--n-per-class", gen_opts.n_per_class, "Samples per class")
      ->capture_default_str();
  gen->add_option("--separation", gen_opts.separation,
                  "Standardized gap between class means on signal features")
      ->capture_default_str();
  gen->add_option("--signal", gen_opts.signal, "Which feature category carries signal")
      ->check(CLI::IsMember({"genomic", "epigenomic", "both"}))
      ->capture_default_str();
  gen->add_option("--noise-stddev", gen_opts.noise_stddev, "Feature noise level")
      ->capture_default_str();
  gen->add_option("--seed", gen_opts.seed, "Generator seed")->capture_default_str();
  gen->set_config("--config", "", "Flat key=value config file; flags win over the file");
  gen->allow_config_extras(false);

  RunOptions cv_opts;
  auto* cv = app.add_subcommand("cv", "Stratified k-fold cross-validation report");
  add_run_options(cv, cv_opts, /*grid_defaults=*/false);

  RunOptions ablate_opts;
  auto* ablate_cmd = app.add_subcommand(
      "ablate", "Cross-validate every (variant, feature category) grid cell");
  add_run_options(ablate_cmd, ablate_opts, /*grid_defaults=*/true);

  GradcheckOptions gc_opts;
  auto* gradcheck = app.add_subcommand(
      "gradcheck", "Verify analytic gradients against finite differences");
  gradcheck->add_option("--seed", gc_opts.seed, "Batch sampling seed")
      ->capture_default_str();
  gradcheck->add_flag("--corrupt-gradients", gc_opts.corrupt,
                      "Perturb analytic gradients to exercise the failure path");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (gen->parsed()) return run_gen(gen_opts);
    if (cv->parsed()) return run_cv(cv_opts);
    if (ablate_cmd->parsed()) return run_ablate(ablate_opts);
    if (gradcheck->parsed()) return run_gradcheck(gc_opts);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace sepred
