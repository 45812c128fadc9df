#ifndef FUZZYLOSS_TRAINER_HPP
#define FUZZYLOSS_TRAINER_HPP

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fuzzyloss/compiler.hpp"
#include "fuzzyloss/network.hpp"

namespace fuzzyloss {

enum class Reduction { Sum, Mean };

class LabelError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Predicate name for the classifier output of class j ("P0", "P1", ...).
inline std::string class_predicate(std::size_t j) { return "P" + std::to_string(j); }
/// Known-predicate name for the label indicator of class j ("S0", ...).
inline std::string class_label(std::size_t j) { return "S" + std::to_string(j); }

inline void check_labels(std::span<const int> labels, std::size_t classes) {
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= classes) {
      throw LabelError("label " + std::to_string(y) + " outside [0, " + std::to_string(classes) + ")");
    }
  }
}

/// Grounding of a labelled batch: the patterns are 0..B-1, `Sj(i)` holds iff
/// labels[i] == j and `Pj(i)` reads slot i * classes + j of the softmax output.
struct BatchGrounding {
  GroundingDomain domain;
  SlotTable slots;
};

inline BatchGrounding ground_batch(std::span<const int> labels, std::size_t classes) {
  check_labels(labels, classes);
  BatchGrounding out;
  for (std::size_t i = 0; i < labels.size(); ++i) out.domain.default_samples.push_back(i);
  std::vector<int> owned(labels.begin(), labels.end());
  for (std::size_t j = 0; j < classes; ++j) {
    out.domain.known[class_label(j)] = [owned, j](std::span<const std::size_t> args) {
      return owned.at(args[0]) == static_cast<int>(j);
    };
  }
  out.slots = SlotTable([classes](std::string_view name, std::span<const std::size_t> args) {
    const std::size_t j = std::stoul(std::string(name.substr(1)));
    return args[0] * classes + j;
  });
  return out;
}

/// Compiles the supervision penalty of a batch over all classes with a
/// positive example.
///
/// Generator mode gives sum_j sum_{x in X_j} g(Pj(x)); MinMax mode gives
/// sum_j g(min_{x in X_j} Pj(x)). Mean divides by the batch size.
inline LossExpr compile_batch_loss(std::span<const int> labels, std::size_t classes,
                                   const TNormOp& op, Reduction reduction = Reduction::Mean,
                                   QuantifierMode mode = QuantifierMode::Generator) {
  BatchGrounding gb = ground_batch(labels, classes);
  Compiler c(op, gb.domain, gb.slots);
  auto& b = c.builder();
  std::vector<NodeId> per_class;
  for (std::size_t j = 0; j < classes; ++j) {
    bool present = false;
    for (int y : labels) present = present || y == static_cast<int>(j);
    if (!present) continue;
    if (mode == QuantifierMode::Generator) {
      per_class.push_back(c.positive_supervision(class_predicate(j), class_label(j)));
    } else {
      std::vector<NodeId> outputs;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != static_cast<int>(j)) continue;
        const std::size_t arg[] = {i};
        outputs.push_back(b.pred(gb.slots.slot(class_predicate(j), arg)));
      }
      per_class.push_back(b.gen_apply(c.generator(), b.min(outputs)));
    }
  }
  NodeId total = b.sum(per_class);
  if (reduction == Reduction::Mean && !labels.empty()) {
    total = b.weighted_sum({{1.0 / static_cast<double>(labels.size()), total}});
  }
  return c.finish(total);
}

/// Loss value of `expr` on softmax outputs [B x classes].
inline LossExpr::Evaluation loss_forward(const LossExpr& expr, const Tensor& outputs,
                                         std::span<const int> labels) {
  if (outputs.rows() != labels.size()) throw ShapeError("loss_forward: outputs/labels size mismatch");
  check_labels(labels, outputs.cols());
  return expr.evaluate(outputs.data);
}

struct BackwardResult {
  Network gradients;
  double loss = 0.0;
  std::size_t clamp_count = 0;
};

/// Reverse-mode gradients of expr(forward(net, batch)) with respect to every
/// network parameter.
inline BackwardResult backward(const LossExpr& expr, const Network& net, const Tensor& batch,
                               std::span<const int> labels) {
  const ForwardCache cache = forward_cached(net, batch);
  if (cache.probs.rows() != labels.size()) throw ShapeError("backward: batch/labels size mismatch");
  check_labels(labels, net.outputs());
  Tensor dprobs(cache.probs.shape);
  const auto eval = expr.gradient(cache.probs.data, dprobs.data);
  return {backward_from_probs(net, batch, cache, dprobs), eval.value, eval.clamp_count};
}

}  // namespace fuzzyloss

#endif  // FUZZYLOSS_TRAINER_HPP
