#include "fuzzyloss/bench.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"

namespace fuzzyloss {
namespace {

const MnistData& mnist() {
  static const MnistData data = load_idx(FUZZYLOSS_DATA_DIR);
  return data;
}

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.train_size = 200;
  cfg.test_size = 200;
  cfg.epochs = 2;
  cfg.batch_size = 50;
  cfg.jobs = 2;
  return cfg;
}

MnistData small_data(const ExperimentConfig& cfg) {
  return {subsample(mnist().train, cfg.train_size, cfg.seed), subsample(mnist().test, cfg.test_size, cfg.seed + 1)};
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

std::size_t count_of(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

TEST(ConfigTest, Families) {
  EXPECT_EQ(parse_family("ss"), SweepFamily::SchweizerSklar);
  EXPECT_EQ(parse_family("godel"), SweepFamily::Godel);
  EXPECT_THROW(parse_family("hamacher"), ConfigError);
  ExperimentConfig cfg;
  apply_setting(cfg, "family", "ss,frank");
  EXPECT_EQ(cfg.families, (std::vector<SweepFamily>{SweepFamily::SchweizerSklar, SweepFamily::Frank}));
}

TEST(ConfigTest, Lambdas) {
  EXPECT_EQ(parse_lambdas("-2, 0.5,inf"), (std::vector<double>{-2.0, 0.5, kInfinity}));
  EXPECT_EQ(parse_lambdas("inf"), std::vector<double>{kInfinity});
  for (const char* bad : {"", "1,,2", "x", "1e999", "nan"}) EXPECT_THROW(parse_lambdas(bad), ConfigError) << bad;
}

TEST(ConfigTest, DefaultGrids) {
  ExperimentConfig cfg;
  EXPECT_EQ(cfg.lambdas_for(SweepFamily::SchweizerSklar), (std::vector<double>{-2, -1, -0.5, 0, 0.5, 1, 2}));
  EXPECT_EQ(cfg.lambdas_for(SweepFamily::Frank).back(), kInfinity);
  EXPECT_EQ(cfg.lambdas_for(SweepFamily::Product), std::vector<double>{0});
  cfg.lambdas = {3};
  EXPECT_EQ(cfg.lambdas_for(SweepFamily::Frank), std::vector<double>{3});
  EXPECT_EQ(cfg.lambdas_for(SweepFamily::Lukasiewicz), std::vector<double>{0});
  EXPECT_EQ(cfg.learning_rate, 0.01);
  EXPECT_EQ(cfg.epochs, 30u);
  EXPECT_EQ(cfg.train_size, 5000u);
}

TEST(ConfigTest, SettingsAndErrors) {
  ExperimentConfig cfg;
  apply_setting(cfg, "epochs", "4");
  apply_setting(cfg, "lr", "0.5");
  apply_setting(cfg, "quantifier", "minmax");
  apply_setting(cfg, "full", "true");
  EXPECT_EQ(cfg.epochs, 4u);
  EXPECT_EQ(cfg.learning_rate, 0.5);
  EXPECT_EQ(cfg.quantifier_mode, QuantifierMode::MinMax);
  EXPECT_TRUE(cfg.full);
  EXPECT_THROW(apply_setting(cfg, "epochs", "-1"), ConfigError);
  EXPECT_THROW(apply_setting(cfg, "epochs", "3x"), ConfigError);
  EXPECT_THROW(apply_setting(cfg, "lr", "fast"), ConfigError);
  EXPECT_THROW(apply_setting(cfg, "quantifier", "mean"), ConfigError);
  EXPECT_THROW(apply_setting(cfg, "colour", "red"), ConfigError);
}

TEST(ConfigTest, ConfigText) {
  const auto kv = parse_config_text("# sweep\nfamily = frank\n\n lambdas=1, inf  # two\n");
  EXPECT_EQ(kv.at("family"), "frank");
  EXPECT_EQ(kv.at("lambdas"), "1, inf");
  EXPECT_THROW(parse_config_text("epochs 3\n"), ConfigError);
}

TEST(ConfigTest, Validation) {
  ExperimentConfig cfg;
  cfg.learning_rate = 0;
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg = {};
  cfg.eps = 0.1;
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg = {};
  cfg.train_size = 0;
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg = {};
  cfg.families.clear();
  EXPECT_THROW(validate(cfg), ConfigError);
}

TEST(RunSweepTest, OneLambdaOneRun) {
  ExperimentConfig cfg = small_config();
  cfg.families = {SweepFamily::Frank};
  cfg.lambdas = {2};
  const auto results = run_sweep(cfg, small_data(cfg));
  ASSERT_EQ(results.size(), 1u);
  EXPECT_EQ(results[0].checkpoints.size(), 3u);
  EXPECT_EQ(results[0].checkpoints[2].step, 8u);
  for (std::size_t e = 0; e < 3; ++e) EXPECT_EQ(results[0].checkpoints[e].epoch, e);
}

TEST(RunSweepTest, ZeroEpochsIsChanceLevel) {
  ExperimentConfig cfg = small_config();
  cfg.epochs = 0;
  cfg.train_size = 1000;
  cfg.test_size = 1000;
  cfg.families = {SweepFamily::Product};
  const auto results = run_sweep(cfg, small_data(cfg));
  ASSERT_EQ(results[0].checkpoints.size(), 1u);
  EXPECT_NEAR(results[0].checkpoints[0].test_accuracy, 0.1, 0.05);
}

TEST(RunSweepTest, GodelIsRejectedBeforeTraining) {
  ExperimentConfig cfg = small_config();
  cfg.families = {SweepFamily::Product, SweepFamily::Godel};
  EXPECT_THROW(run_sweep(cfg, small_data(cfg)), UnsupportedGeneratorError);
}

TEST(RunSweepTest, BadLambdaIsRejected) {
  ExperimentConfig cfg = small_config();
  cfg.families = {SweepFamily::Frank};
  cfg.lambdas = {0};
  EXPECT_THROW(run_sweep(cfg, small_data(cfg)), ParameterDomainError);
}

TEST(RunSweepTest, SharedInitialNetwork) {
  ExperimentConfig cfg = small_config();
  cfg.epochs = 0;
  cfg.families = {SweepFamily::Product, SweepFamily::Lukasiewicz};
  const auto results = run_sweep(cfg, small_data(cfg));
  EXPECT_EQ(results[0].checkpoints[0].test_accuracy, results[1].checkpoints[0].test_accuracy);
}

// SS lambda = 0 is the product t-norm, and its loss is plain cross-entropy.
TEST(RunSweepTest, SchweizerSklarZeroMatchesCrossEntropyBaseline) {
  ExperimentConfig cfg = small_config();
  cfg.epochs = 3;
  const MnistData data = small_data(cfg);
  cfg.families = {SweepFamily::SchweizerSklar};
  cfg.lambdas = {0.0};
  auto results = run_sweep(cfg, data);
  cfg.families = {SweepFamily::Frank};
  cfg.lambdas = {1.0};
  results.push_back(run_sweep(cfg, data).front());

  const auto train = make_batches(data.train, cfg.batch_size);
  Network net = init_network(cfg.seed);
  std::vector<double> full_losses;
  auto full_loss = [&] {
    double s = 0.0;
    for (const auto& b : train) s += oracle::cross_entropy(net, b.images, b.labels).loss * b.labels.size();
    return s / static_cast<double>(data.train.size());
  };
  full_losses.push_back(full_loss());
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    oracle::cross_entropy_trajectory(net, train, cfg.learning_rate, train.size());
    full_losses.push_back(full_loss());
  }
  for (const auto& r : results) {
    ASSERT_EQ(r.checkpoints.size(), full_losses.size());
    for (std::size_t k = 0; k < full_losses.size(); ++k) {
      EXPECT_NEAR(r.checkpoints[k].train_loss, full_losses[k], 1e-9) << to_string(r.family) << " epoch " << k;
    }
  }
}

TEST(RunSweepTest, DeterministicAcrossThreadCounts) {
  ExperimentConfig cfg = small_config();
  cfg.families = {SweepFamily::SchweizerSklar};
  cfg.lambdas = {-1, 0.5, 2};
  const MnistData data = small_data(cfg);
  cfg.jobs = 1;
  const std::string one = to_csv(run_sweep(cfg, data));
  cfg.jobs = 3;
  EXPECT_EQ(one, to_csv(run_sweep(cfg, data)));
}

TEST(CsvTest, RowsAndFormat) {
  RunResult r{0, SweepFamily::Frank, kInfinity, {}};
  for (std::size_t e = 0; e <= 2; ++e) r.checkpoints.push_back({e, e * 50, 1.0 / 3.0, 0.5, 7});
  const std::string csv = to_csv({r});
  EXPECT_EQ(count_lines(csv), 4u);
  std::istringstream in(csv);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "run_id,family,lambda,epoch,step,train_loss,test_accuracy,clamp_count");
  EXPECT_EQ(row, "0,frank,inf,0,0,0.333333333,0.5,7");
}

TEST(CsvTest, FormatReal) {
  EXPECT_EQ(format_real(kInfinity), "inf");
  EXPECT_EQ(format_real(-0.5), "-0.5");
  EXPECT_EQ(format_real(0.1234567891234), "0.123456789");
  EXPECT_EQ(format_real(123456789012.0), "1.23456789e+11");
}

TEST(CsvTest, EmitToDisk) {
  const std::string path = ::testing::TempDir() + "bench_test.csv";
  RunResult r{0, SweepFamily::Product, 0, {{0, 0, 2.3, 0.1, 0}}};
  emit_csv({r}, path);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), to_csv({r}));
  EXPECT_THROW(emit_csv({}, path), std::invalid_argument);
  EXPECT_THROW(emit_csv({r}, "/nonexistent/dir/out.csv"), std::runtime_error);
}

TEST(PlotScriptTest, OnePanelPerFamily) {
  std::vector<RunResult> results{{0, SweepFamily::SchweizerSklar, 0, {}},
                                 {1, SweepFamily::SchweizerSklar, 2, {}},
                                 {2, SweepFamily::Frank, kInfinity, {}}};
  const std::string s = plot_script(results, "r.csv", "r.png");
  EXPECT_NE(s.find("set multiplot layout 1,2"), std::string::npos);
  EXPECT_EQ(count_of(s, "set title"), 2u);
  EXPECT_EQ(count_of(s, "'r.csv'"), 3u);
  EXPECT_NE(s.find("lambda=inf"), std::string::npos);
}

TEST(PlotScriptTest, OneLambdaOneCurve) {
  const std::string s = plot_script({{0, SweepFamily::Frank, 2, {}}}, "r.csv", "r.png");
  EXPECT_EQ(count_of(s, "'r.csv'"), 1u);
  EXPECT_NE(s.find("layout 1,1"), std::string::npos);
}

TEST(PlotScriptTest, EmptyResultsWriteNothing) {
  const std::string path = ::testing::TempDir() + "empty_plot.gp";
  std::filesystem::remove(path);
  EXPECT_THROW(emit_plot_script({}, "r.csv", path, "r.png"), std::invalid_argument);
  EXPECT_FALSE(std::filesystem::exists(path));
}

TEST(SummaryTest, ReportsGapToCrossEntropy) {
  std::vector<RunResult> results{{0, SweepFamily::SchweizerSklar, 0, {{0, 0, 1, 0.5, 0}, {1, 1, 1, 0.7, 0}}},
                                 {1, SweepFamily::SchweizerSklar, 2, {{0, 0, 1, 0.5, 0}, {1, 1, 1, 0.8, 0}}}};
  const std::string s = summary_table(results);
  EXPECT_NE(s.find("+0.1000"), std::string::npos) << s;
  EXPECT_NE(s.find("+0.0500"), std::string::npos) << s;
}

}  // namespace
}  // namespace fuzzyloss
