#ifndef FUZZYLOSS_BENCH_HPP
#define FUZZYLOSS_BENCH_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "fuzzyloss/dataset.hpp"
#include "fuzzyloss/trainer.hpp"

namespace fuzzyloss {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Family selector for a sweep; Godel has no generator and fails at compile time.
enum class SweepFamily { SchweizerSklar, Frank, Lukasiewicz, Product, Godel };

inline std::string_view to_string(SweepFamily f) {
  switch (f) {
    case SweepFamily::SchweizerSklar: return "ss";
    case SweepFamily::Frank: return "frank";
    case SweepFamily::Lukasiewicz: return "lukasiewicz";
    case SweepFamily::Product: return "product";
    case SweepFamily::Godel: return "godel";
  }
  return "?";
}

inline SweepFamily parse_family(std::string_view s) {
  if (s == "ss") return SweepFamily::SchweizerSklar;
  if (s == "frank") return SweepFamily::Frank;
  if (s == "lukasiewicz") return SweepFamily::Lukasiewicz;
  if (s == "product") return SweepFamily::Product;
  if (s == "godel") return SweepFamily::Godel;
  throw ConfigError("unknown family '" + std::string(s) + "'");
}

inline bool takes_lambda(SweepFamily f) {
  return f == SweepFamily::SchweizerSklar || f == SweepFamily::Frank;
}

inline std::vector<double> default_lambdas(SweepFamily f) {
  switch (f) {
    case SweepFamily::SchweizerSklar: return {-2, -1, -0.5, 0, 0.5, 1, 2};
    case SweepFamily::Frank: return {0.5, 1, 2, 5, 10, kInfinity};
    default: return {0};
  }
}

/// Accepts a comma-separated list of reals; `inf` (or `+inf`) is +infinity.
inline std::vector<double> parse_lambdas(std::string_view s) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t end = std::min(s.find(',', pos), s.size());
    std::string item(s.substr(pos, end - pos));
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    pos = end + 1;
    if (item == "inf" || item == "+inf") {
      out.push_back(kInfinity);
      continue;
    }
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size() || !std::isfinite(v)) {
      throw ConfigError("invalid lambda '" + item + "'");
    }
    out.push_back(v);
  }
  return out;
}

struct ExperimentConfig {
  std::vector<SweepFamily> families{SweepFamily::SchweizerSklar};
  std::vector<double> lambdas;  // empty: per-family default grid
  QuantifierMode quantifier_mode = QuantifierMode::Generator;
  std::size_t epochs = 30;
  std::size_t batch_size = 100;  // 0: full batch
  double learning_rate = 0.01;
  std::size_t train_size = 5000;
  std::size_t test_size = 1000;
  bool full = false;  // use every available image, ignoring the sizes above
  std::uint64_t seed = 1;
  std::string data_dir = "data/mnist";
  std::string output_path = "results.csv";
  double eps = kDefaultEps;
  std::size_t jobs = 0;  // 0: hardware concurrency

  std::vector<double> lambdas_for(SweepFamily f) const {
    if (!takes_lambda(f)) return {0};
    return lambdas.empty() ? default_lambdas(f) : lambdas;
  }
};

/// Applies one `key = value` setting; keys match the long CLI option names.
inline void apply_setting(ExperimentConfig& cfg, std::string_view key, const std::string& value) {
  auto to_size = [&](const std::string& v) {
    std::size_t used = 0;
    long long n = -1;
    try {
      n = std::stoll(v, &used);
    } catch (const std::exception&) {
    }
    if (used != v.size() || n < 0) throw ConfigError("'" + std::string(key) + "' expects a non-negative integer, got '" + v + "'");
    return static_cast<std::size_t>(n);
  };
  auto to_real = [&](const std::string& v) {
    std::size_t used = 0;
    double x = 0;
    try {
      x = std::stod(v, &used);
    } catch (const std::exception&) {
    }
    if (used != v.size() || used == 0 || !std::isfinite(x)) throw ConfigError("'" + std::string(key) + "' expects a real, got '" + v + "'");
    return x;
  };
  if (key == "family") {
    cfg.families.clear();
    for (std::size_t pos = 0; pos <= value.size();) {
      const std::size_t end = std::min(value.find(',', pos), value.size());
      cfg.families.push_back(parse_family(value.substr(pos, end - pos)));
      pos = end + 1;
    }
  } else if (key == "lambdas") {
    cfg.lambdas = parse_lambdas(value);
  } else if (key == "quantifier") {
    if (value == "minmax") cfg.quantifier_mode = QuantifierMode::MinMax;
    else if (value == "generator") cfg.quantifier_mode = QuantifierMode::Generator;
    else throw ConfigError("quantifier must be 'minmax' or 'generator', got '" + value + "'");
  } else if (key == "epochs") {
    cfg.epochs = to_size(value);
  } else if (key == "batch") {
    cfg.batch_size = to_size(value);
  } else if (key == "lr") {
    cfg.learning_rate = to_real(value);
  } else if (key == "train-size") {
    cfg.train_size = to_size(value);
  } else if (key == "test-size") {
    cfg.test_size = to_size(value);
  } else if (key == "full") {
    cfg.full = value == "true" || value == "1" || value == "yes";
  } else if (key == "seed") {
    cfg.seed = to_size(value);
  } else if (key == "data-dir") {
    cfg.data_dir = value;
  } else if (key == "out") {
    cfg.output_path = value;
  } else if (key == "eps") {
    cfg.eps = to_real(value);
  } else if (key == "jobs") {
    cfg.jobs = to_size(value);
  } else {
    throw ConfigError("unknown setting '" + std::string(key) + "'");
  }
}

/// Reads flat `key = value` text; `#` starts a comment.
inline std::map<std::string, std::string> parse_config_text(std::string_view text) {
  std::map<std::string, std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  auto trim = [](std::string s) {
    s.erase(0, s.find_first_not_of(" \t\r"));
    s.erase(s.find_last_not_of(" \t\r") + 1);
    return s;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

inline void validate(const ExperimentConfig& cfg) {
  if (cfg.families.empty()) throw ConfigError("no family selected");
  if (!(cfg.learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(cfg.eps > 0.0 && cfg.eps <= 1e-3)) throw ConfigError("eps must lie in (0, 1e-3]");
  if (!cfg.full && (cfg.train_size == 0 || cfg.test_size == 0)) {
    throw ConfigError("train-size and test-size must be positive");
  }
}

struct Checkpoint {
  std::size_t epoch = 0;
  std::size_t step = 0;
  double train_loss = 0.0;
  double test_accuracy = 0.0;
  std::size_t clamp_count = 0;
};

struct RunResult {
  std::size_t run_id = 0;
  SweepFamily family = SweepFamily::Product;
  double lambda = 0.0;
  std::vector<Checkpoint> checkpoints;
};

inline TNormOp make_op(SweepFamily f, double lambda, double eps) {
  switch (f) {
    case SweepFamily::SchweizerSklar: return GeneratorSpec::schweizer_sklar(lambda, eps);
    case SweepFamily::Frank: return GeneratorSpec::frank(lambda, eps);
    case SweepFamily::Lukasiewicz: return GeneratorSpec::lukasiewicz(eps);
    case SweepFamily::Product: return GeneratorSpec::product(eps);
    case SweepFamily::Godel: return TNormOp::godel();
  }
  return TNormOp::godel();
}

/// Share of `d` as consecutive row blocks of at most `batch` rows (all rows when batch is 0).
struct Batch {
  Tensor images;
  std::vector<int> labels;
};

inline std::vector<Batch> make_batches(const Dataset& d, std::size_t batch) {
  if (batch == 0) batch = d.size();
  std::vector<Batch> out;
  const std::size_t width = d.images.cols();
  for (std::size_t start = 0; start < d.size(); start += batch) {
    const std::size_t n = std::min(batch, d.size() - start);
    Batch b{Tensor({n, width}), {d.labels.begin() + static_cast<std::ptrdiff_t>(start),
                                 d.labels.begin() + static_cast<std::ptrdiff_t>(start + n)}};
    std::copy_n(d.images.data.begin() + static_cast<std::ptrdiff_t>(start * width), n * width,
                b.images.data.begin());
    out.push_back(std::move(b));
  }
  return out;
}

inline double accuracy(const Network& net, const std::vector<Batch>& batches) {
  std::size_t correct = 0;
  std::size_t total = 0;
  for (const auto& b : batches) {
    const Tensor probs = forward(net, b.images);
    for (std::size_t i = 0; i < b.labels.size(); ++i) {
      const auto r = probs.row(i);
      const auto best = std::max_element(r.begin(), r.end()) - r.begin();
      correct += best == b.labels[i] ? 1 : 0;
    }
    total += b.labels.size();
  }
  return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
}

/// Trains one network under `op` and records a checkpoint before training
/// (epoch 0) and after every epoch. train_loss is the mean-reduced penalty
/// over the whole training set at the checkpoint; clamp_count accumulates
/// clamp events over all training steps so far.
inline RunResult train_run(std::size_t run_id, SweepFamily family, double lambda,
                           const ExperimentConfig& cfg, const std::vector<Batch>& train,
                           const std::vector<Batch>& test) {
  const TNormOp op = make_op(family, lambda, cfg.eps);
  std::vector<LossExpr> losses;
  losses.reserve(train.size());
  std::size_t train_count = 0;
  for (const auto& b : train) {
    losses.push_back(compile_batch_loss(b.labels, kClasses, op, Reduction::Mean, cfg.quantifier_mode));
    train_count += b.labels.size();
  }

  RunResult result{run_id, family, lambda, {}};
  Network net = init_network(cfg.seed, kImagePixels, 50, kClasses);
  OptimState opt{cfg.learning_rate, 0};
  std::size_t clamps = 0;

  auto checkpoint = [&](std::size_t epoch) {
    double loss = 0.0;
    for (std::size_t k = 0; k < train.size(); ++k) {
      const Tensor probs = forward(net, train[k].images);
      loss += losses[k].evaluate(probs.data).value * static_cast<double>(train[k].labels.size());
    }
    result.checkpoints.push_back(
        {epoch, opt.step, loss / static_cast<double>(train_count), accuracy(net, test), clamps});
  };

  checkpoint(0);
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (std::size_t k = 0; k < train.size(); ++k) {
      BackwardResult r = backward(losses[k], net, train[k].images, train[k].labels);
      clamps += r.clamp_count;
      net = sgd_step(std::move(net), r.gradients, opt);
    }
    checkpoint(epoch);
  }
  return result;
}

/// Loads and stratifies the data named by `cfg`.
inline MnistData prepare_data(const ExperimentConfig& cfg) {
  MnistData raw = load_idx(cfg.data_dir);
  if (cfg.full) return raw;
  return {subsample(raw.train, cfg.train_size, cfg.seed),
          subsample(raw.test, cfg.test_size, cfg.seed + 1)};
}

/// One run per (family, lambda), numbered in sweep order. Every run starts
/// from the same initial network, so curves differ only by the loss. Runs
/// execute on up to cfg.jobs threads; each run is single-threaded.
inline std::vector<RunResult> run_sweep(const ExperimentConfig& cfg, const MnistData& data) {
  validate(cfg);
  struct Job {
    SweepFamily family;
    double lambda;
  };
  std::vector<Job> jobs;
  for (SweepFamily f : cfg.families) {
    for (double l : cfg.lambdas_for(f)) jobs.push_back({f, l});
  }
  // Surface parameter and generator errors before any training starts.
  for (const auto& j : jobs) {
    const TNormOp op = make_op(j.family, j.lambda, cfg.eps);
    if (!op.has_generator()) {
      throw UnsupportedGeneratorError("family '" + std::string(to_string(j.family)) +
                                      "' has no additive generator and cannot define a loss");
    }
  }

  const auto train = make_batches(data.train, cfg.batch_size);
  const auto test = make_batches(data.test, 1000);
  std::vector<RunResult> results(jobs.size());
  std::size_t workers = cfg.jobs ? cfg.jobs : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, jobs.size());

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs.size());
  auto work = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      try {
        results[k] = train_run(k, jobs[k].family, jobs[k].lambda, cfg, train, test);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

inline std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline std::string lambda_label(const RunResult& r) {
  return takes_lambda(r.family) ? format_real(r.lambda) : "-";
}

/// CSV text: header plus one row per checkpoint.
inline std::string to_csv(const std::vector<RunResult>& results) {
  std::string out = "run_id,family,lambda,epoch,step,train_loss,test_accuracy,clamp_count\n";
  for (const auto& r : results) {
    for (const auto& c : r.checkpoints) {
      out += std::to_string(r.run_id) + "," + std::string(to_string(r.family)) + "," +
             format_real(r.lambda) + "," + std::to_string(c.epoch) + "," + std::to_string(c.step) +
             "," + format_real(c.train_loss) + "," + format_real(c.test_accuracy) + "," +
             std::to_string(c.clamp_count) + "\n";
    }
  }
  return out;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

inline void emit_csv(const std::vector<RunResult>& results, const std::string& path) {
  if (results.empty()) throw std::invalid_argument("emit_csv: no results");
  write_text(path, to_csv(results));
}

/// Gnuplot script drawing test accuracy against epoch, one panel per family
/// and one curve per lambda, read from the CSV at `csv_path`.
inline std::string plot_script(const std::vector<RunResult>& results, const std::string& csv_path,
                               const std::string& image_path) {
  if (results.empty()) throw std::invalid_argument("plot_script: no results");
  std::vector<SweepFamily> families;
  for (const auto& r : results) {
    if (std::find(families.begin(), families.end(), r.family) == families.end()) {
      families.push_back(r.family);
    }
  }
  std::ostringstream s;
  s << "# Test accuracy against epoch for each generator; render with `gnuplot <this file>`.\n"
    << "set datafile separator ','\n"
    << "set terminal pngcairo size " << 600 * families.size() << ",480\n"
    << "set output '" << image_path << "'\n"
    << "set multiplot layout 1," << families.size() << "\n"
    << "set xlabel 'epoch'\n"
    << "set ylabel 'test accuracy'\n"
    << "set key bottom right\n"
    << "set grid\n";
  for (SweepFamily f : families) {
    s << "set title '" << to_string(f) << "'\n" << "plot";
    bool first = true;
    for (const auto& r : results) {
      if (r.family != f) continue;
      s << (first ? " " : ", \\\n     ") << "'" << csv_path << "' every ::1 using 4:($1 == "
        << r.run_id << " ? $7 : NaN) with linespoints title '"
        << (takes_lambda(f) ? "lambda=" + lambda_label(r) : std::string(to_string(f))) << "'";
      first = false;
    }
    s << "\n";
  }
  s << "unset multiplot\n";
  return s.str();
}

inline void emit_plot_script(const std::vector<RunResult>& results, const std::string& csv_path,
                             const std::string& script_path, const std::string& image_path) {
  write_text(script_path, plot_script(results, csv_path, image_path));
}

/// Fixed-width table of final and mean accuracy per run, with the gap to
/// the cross-entropy run (Product, SS lambda=0 or Frank lambda=1) when the
/// sweep contains one.
inline std::string summary_table(const std::vector<RunResult>& results) {
  const RunResult* reference = nullptr;
  for (const auto& r : results) {
    const bool ce = r.family == SweepFamily::Product ||
                    (r.family == SweepFamily::SchweizerSklar && r.lambda == 0.0) ||
                    (r.family == SweepFamily::Frank && r.lambda == 1.0);
    if (ce && !reference) reference = &r;
  }
  auto mean_acc = [](const RunResult& r) {
    double s = 0;
    for (const auto& c : r.checkpoints) s += c.test_accuracy;
    return r.checkpoints.empty() ? 0.0 : s / static_cast<double>(r.checkpoints.size());
  };
  std::ostringstream s;
  char line[160];
  std::snprintf(line, sizeof line, "%-4s %-12s %-8s %10s %10s %12s %12s\n", "run", "family",
                "lambda", "final_acc", "mean_acc", "d_final_ce", "d_mean_ce");
  s << line;
  for (const auto& r : results) {
    if (r.checkpoints.empty()) continue;
    const double fin = r.checkpoints.back().test_accuracy;
    const double mean = mean_acc(r);
    std::string d_fin = "-", d_mean = "-";
    if (reference && !reference->checkpoints.empty()) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%+.4f", fin - reference->checkpoints.back().test_accuracy);
      d_fin = buf;
      std::snprintf(buf, sizeof buf, "%+.4f", mean - mean_acc(*reference));
      d_mean = buf;
    }
    std::snprintf(line, sizeof line, "%-4zu %-12s %-8s %10.4f %10.4f %12s %12s\n", r.run_id,
                  std::string(to_string(r.family)).c_str(), lambda_label(r).c_str(), fin, mean,
                  d_fin.c_str(), d_mean.c_str());
    s << line;
  }
  return s.str();
}

}  // namespace fuzzyloss

#endif  // FUZZYLOSS_BENCH_HPP
