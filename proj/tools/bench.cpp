// bench: sweeps generated losses over MNIST and checks the library against
// its reference implementations.
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "acceptance_checks.hpp"
#include "fuzzyloss/fuzzyloss.hpp"

namespace {

using namespace fuzzyloss;
using json = nlohmann::json;

struct RunOptions {
  std::string config_path;
  std::map<std::string, std::string> given;  // long option name -> raw value
  bool full = false;
};

void fail(std::string_view kind, const std::string& message) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << std::endl;
}

ExperimentConfig resolve(const RunOptions& opts) {
  ExperimentConfig cfg;
  if (!opts.config_path.empty()) {
    std::ifstream in(opts.config_path);
    if (!in) throw ConfigError("cannot read config file '" + opts.config_path + "'");
    std::stringstream text;
    text << in.rdbuf();
    for (const auto& [key, value] : parse_config_text(text.str())) apply_setting(cfg, key, value);
  }
  for (const auto& [key, value] : opts.given) apply_setting(cfg, key, value);
  if (opts.full) cfg.full = true;
  validate(cfg);
  return cfg;
}

int run(const RunOptions& opts) {
  const ExperimentConfig cfg = resolve(opts);
  const MnistData data = prepare_data(cfg);
  const auto results = run_sweep(cfg, data);
  emit_csv(results, cfg.output_path);
  emit_plot_script(results, cfg.output_path, cfg.output_path + ".gp", cfg.output_path + ".png");
  std::cout << summary_table(results);
  std::cout << "wrote " << cfg.output_path << " and " << cfg.output_path << ".gp\n";
  return 0;
}

int verify(const std::string& data_dir, bool with_training) {
  auto checks = acceptance::property_suite();
  if (with_training) checks.push_back(acceptance::convergence(data_dir));
  std::vector<std::string> failed;
  for (const auto& c : checks) {
    std::cout << acceptance::report_line(c) << "\n";
    if (!c.pass && !c.known_failure) failed.push_back(c.id);
  }
  if (failed.empty()) return 0;
  std::cerr << json{{"error", "verify_failed"}, {"failed", failed}}.dump() << std::endl;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generated fuzzy-logic losses on MNIST"};
  app.require_subcommand(1);

  RunOptions opts;
  auto* run_cmd = app.add_subcommand("run", "train one network per (family, lambda) and write a CSV");
  run_cmd->add_option("--config", opts.config_path, "flat 'key = value' file; CLI flags override it");
  const std::vector<std::pair<std::string, std::string>> settings{
      {"family", "ss|frank|lukasiewicz|product|godel, comma-separated for several"},
      {"lambdas", "comma-separated lambda values, 'inf' for +infinity"},
      {"epochs", "training epochs"},
      {"batch", "minibatch size, 0 for full batch"},
      {"lr", "SGD learning rate"},
      {"train-size", "stratified training subsample size"},
      {"test-size", "stratified test subsample size"},
      {"seed", "seed for initialization and subsampling"},
      {"quantifier", "minmax|generator"},
      {"eps", "strict-generator clamp"},
      {"data-dir", "directory holding the four MNIST IDX files"},
      {"out", "CSV path; the plot script goes to <out>.gp"},
      {"jobs", "parallel runs, 0 for one per core"}};
  std::map<std::string, std::string> raw;
  std::map<std::string, CLI::Option*> flags;
  for (const auto& [name, help] : settings) flags[name] = run_cmd->add_option("--" + name, raw[name], help);
  run_cmd->add_flag("--full", opts.full, "use every available image");

  std::string verify_data = "data/mnist";
  bool with_training = false;
  auto* verify_cmd = app.add_subcommand("verify", "run the oracle and property checks");
  verify_cmd->add_option("--data-dir", verify_data, "MNIST directory for --convergence");
  verify_cmd->add_flag("--convergence", with_training, "also train product and lukasiewicz and compare");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    fail("usage", e.what());
    return 2;
  }

  try {
    if (*verify_cmd) return verify(verify_data, with_training);
    for (const auto& [name, opt] : flags) {
      if (opt->count()) opts.given[name] = raw[name];
    }
    return run(opts);
  } catch (const ConfigError& e) {
    fail("config", e.what());
  } catch (const ParameterDomainError& e) {
    fail("parameter_domain", e.what());
  } catch (const UnsupportedGeneratorError& e) {
    fail("unsupported_generator", e.what());
  } catch (const IdxError& e) {
    fail("data", e.what());
  } catch (const std::exception& e) {
    fail("runtime", e.what());
  }
  return 1;
}
