// dsre: weakly supervised relation extraction pipeline.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dsre/errors.h"
#include "dsre/pipeline.h"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitMissingArtifact = 2;
constexpr int kExitConfig = 3;

struct Flags {
  std::string config;
  std::optional<std::string> strategy;
  std::optional<std::string> nli;
  std::optional<std::string> remote_url;
  std::optional<double> tau;
  std::optional<uint64_t> seed;
  std::optional<std::string> workdir;
  bool batch = false;
  bool interactive = false;
  std::string data;
};

dsre::PipelineConfig BuildConfig(const Flags &flags) {
  dsre::PipelineConfig config = dsre::PipelineConfig::Load(flags.config);
  if (flags.strategy) config.strategy = dsre::ParseStrategy(*flags.strategy);
  if (flags.nli) {
    if (*flags.nli == "mock") {
      config.nli.backend = dsre::NliBackend::kMock;
    } else if (*flags.nli == "remote") {
      config.nli.backend = dsre::NliBackend::kRemote;
    } else {
      throw dsre::ConfigError("--nli must be mock or remote");
    }
  }
  if (const char *env = std::getenv(dsre::kNliUrlEnv); env && *env) {
    config.nli.remote_url = env;
  }
  if (flags.remote_url) config.nli.remote_url = *flags.remote_url;
  if (flags.tau) config.nli.tau = *flags.tau;
  if (flags.seed) config.seed = *flags.seed;
  if (flags.workdir) config.workdir = *flags.workdir;
  if (flags.batch) config.batch = true;
  return config;
}

int Run(const std::string &command, const Flags &flags) {
  try {
    dsre::PipelineConfig config = BuildConfig(flags);
    if (command == "pipeline" && !flags.interactive) config.batch = true;
    dsre::Pipeline pipeline(config);
    dsre::WorkdirLock lock(config.workdir);
    std::string data =
        flags.data.empty() ? std::string(dsre::StrategyName(config.strategy))
                           : flags.data;
    if (command == "annotate") {
      pipeline.Annotate();
    } else if (command == "mine") {
      pipeline.Mine();
    } else if (command == "group") {
      pipeline.Group();
    } else if (command == "screen") {
      pipeline.Screen();
    } else if (command == "infer") {
      pipeline.Infer();
    } else if (command == "consolidate") {
      pipeline.Consolidate();
    } else if (command == "simulate") {
      pipeline.Simulate();
    } else if (command == "train") {
      pipeline.Train(data);
    } else if (command == "eval") {
      pipeline.Eval(data);
    } else {
      pipeline.Run();
    }
    return 0;
  } catch (const dsre::MissingArtifactError &e) {
    std::cerr << "dsre " << command << ": " << e.what() << "\n";
    return kExitMissingArtifact;
  } catch (const dsre::ConfigError &e) {
    std::cerr << "dsre " << command << ": config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const dsre::TemplateError &e) {
    std::cerr << "dsre " << command << ": config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception &e) {
    std::cerr << "dsre " << command << ": " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Weakly supervised relation extraction with NLI consolidation"};
  app.require_subcommand(1);
  app.fallthrough();

  Flags flags;
  app.add_option("-c,--config", flags.config, "pipeline config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--strategy", flags.strategy, "consolidation: ipin or npin")
      ->check(CLI::IsMember({"ipin", "npin"}));
  app.add_option("--nli", flags.nli, "NLI backend: mock or remote")
      ->check(CLI::IsMember({"mock", "remote"}));
  app.add_option("--remote-url", flags.remote_url,
                 std::string("remote NLI endpoint (also ") + dsre::kNliUrlEnv +
                     ")");
  app.add_option("--tau", flags.tau, "entailment threshold");
  app.add_option("--seed", flags.seed, "classifier seed");
  app.add_option("--workdir", flags.workdir, "artifact directory");
  app.add_flag("--batch", flags.batch,
               "screen without the review UI (general templates only)");

  const char *commands[][2] = {
      {"annotate", "distant labels from the knowledge base"},
      {"mine", "collect patterns between DS-labeled entity pairs"},
      {"group", "filter, group and prune mined patterns"},
      {"screen", "review candidate patterns and write template sets"},
      {"infer", "zero-shot NLI labels for every instance"},
      {"consolidate", "combine DS and NLI labels (--strategy)"},
      {"simulate", "inject FN/FP noise into gold labels"},
      {"train", "fit the linear classifier"},
      {"eval", "score a trained model on the test corpus"},
      {"pipeline", "run every stage in order"},
  };
  for (const auto &[name, help] : commands) {
    CLI::App *sub = app.add_subcommand(name, help);
    if (std::string(name) == "train" || std::string(name) == "eval") {
      sub->add_option("--data", flags.data,
                      "training labels: ds, ipin, npin, simulated or gold")
          ->check(CLI::IsMember({"ds", "ipin", "npin", "simulated", "gold"}));
    }
    if (std::string(name) == "pipeline") {
      sub->add_flag("--interactive", flags.interactive,
                    "serve the review UI during the screen stage");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitConfig;
  }
  return Run(app.get_subcommands().front()->get_name(), flags);
}
