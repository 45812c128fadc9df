#ifndef FUZZYLOSS_COMPILER_HPP
#define FUZZYLOSS_COMPILER_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fuzzyloss/formula.hpp"
#include "fuzzyloss/loss_expr.hpp"
#include "fuzzyloss/tnorm.hpp"

namespace fuzzyloss {

class CompileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Empty sample sets, undefined known predicates and similar grounding faults.
class DomainError : public CompileError {
 public:
  using CompileError::CompileError;
};

/// A closed-form t-norm (Godel, Drastic) reached a translation that needs g.
class UnsupportedGeneratorError : public CompileError {
 public:
  using CompileError::CompileError;
};

/// Finite data over which formulas are grounded.
struct GroundingDomain {
  using KnownPredicate = std::function<bool(std::span<const std::size_t>)>;
  using PredicateEvaluator = std::function<double(std::string_view, std::span<const std::size_t>)>;

  /// Samples for a named variable; variables not listed range over `default_samples`.
  std::map<std::string, std::vector<std::size_t>, std::less<>> samples;
  std::vector<std::size_t> default_samples;
  /// Known predicates by name (without '@'); outputs are exactly 0 or 1.
  std::map<std::string, KnownPredicate, std::less<>> known;
  /// Optional evaluator for unknown predicates, used by bind().
  PredicateEvaluator predicate;

  const std::vector<std::size_t>& samples_for(std::string_view variable) const {
    auto it = samples.find(variable);
    const auto& xs = it != samples.end() ? it->second : default_samples;
    if (xs.empty()) throw DomainError("empty sample set for variable '" + std::string(variable) + "'");
    return xs;
  }

  bool known_value(std::string_view name, std::span<const std::size_t> args) const {
    auto it = known.find(name);
    if (it == known.end()) throw DomainError("undefined known predicate '@" + std::string(name) + "'");
    return it->second(args);
  }
};

/// Maps ground atoms (predicate, argument tuple) to slots of the value buffer
/// a LossExpr is evaluated against. Either interns atoms in first-seen order
/// or defers to a fixed binding supplied by the caller.
class SlotTable {
 public:
  using Key = std::pair<std::string, std::vector<std::size_t>>;
  using Binding = std::function<std::size_t(std::string_view, std::span<const std::size_t>)>;

  SlotTable() = default;
  explicit SlotTable(Binding binding) : binding_(std::move(binding)) {}

  std::size_t slot(std::string_view predicate, std::span<const std::size_t> args) {
    if (binding_) return binding_(predicate, args);
    Key key{std::string(predicate), std::vector<std::size_t>(args.begin(), args.end())};
    auto [it, inserted] = index_.emplace(key, keys_.size());
    if (inserted) keys_.push_back(std::move(key));
    return it->second;
  }

  /// Interned atoms in slot order.
  const std::vector<Key>& keys() const { return keys_; }
  std::size_t size() const { return keys_.size(); }

  /// Fills a value buffer for interned atoms from an evaluator.
  std::vector<double> bind(const GroundingDomain::PredicateEvaluator& eval) const {
    std::vector<double> values;
    values.reserve(keys_.size());
    for (const auto& [name, args] : keys_) values.push_back(eval(name, args));
    return values;
  }

 private:
  Binding binding_;
  std::map<Key, std::size_t> index_;
  std::vector<Key> keys_;
};

enum class QuantifierMode { MinMax, Generator };

struct WeightedFormula {
  FormulaPtr formula;
  double weight = 1.0;
};

struct KnowledgeBase {
  std::vector<WeightedFormula> formulas;
  GeneratorSpec generator;
  QuantifierMode quantifier_mode = QuantifierMode::Generator;
};

/// Translates formulas into LossExpr nodes under one t-norm.
///
/// Connectives: & -> t-norm, | -> dual t-conorm, -> -> residuum,
/// <-> -> biresiduum, ~ -> 1 - x. Known atoms fold to constants. Universal
/// quantifiers become min over groundings (MinMax) or g^(-1)(sum g)
/// (Generator); existential quantifiers become max in both modes.
class Compiler {
 public:
  Compiler(const TNormOp& op, const GroundingDomain& dom, SlotTable& slots)
      : op_(op), dom_(dom), slots_(slots) {}

  LossExpr::Builder& builder() { return builder_; }
  LossExpr finish(NodeId root) const { return builder_.build(root); }

  const Generator& generator() const {
    if (!op_.has_generator()) {
      throw UnsupportedGeneratorError("t-norm '" + op_.name() + "' has no additive generator");
    }
    return op_.generator();
  }

  /// Truth value of `f` in [0,1].
  NodeId truth(const Formula& f, QuantifierMode mode) {
    using K = Formula::Kind;
    auto& b = builder_;
    switch (f.kind()) {
      case K::Atom: return b.pred(slots_.slot(f.name(), ground(f)));
      case K::KnownAtom: return b.constant(dom_.known_value(f.name(), ground(f)) ? 1.0 : 0.0);
      case K::Not: return b.one_minus(truth(*f.body(), mode));
      case K::And: return tnorm(truth(*f.left(), mode), truth(*f.right(), mode));
      case K::Or: {
        const NodeId na = b.one_minus(truth(*f.left(), mode));
        const NodeId nb = b.one_minus(truth(*f.right(), mode));
        return b.one_minus(tnorm(na, nb));
      }
      case K::Implies: {
        const Generator& g = generator();
        const NodeId ga = b.gen_apply(g, truth(*f.left(), mode));
        const NodeId gb = b.gen_apply(g, truth(*f.right(), mode));
        return b.gen_inverse(g, b.max({b.constant(0.0), b.weighted_sum({{1.0, gb}, {-1.0, ga}})}));
      }
      case K::Iff: {
        const Generator& g = generator();
        const NodeId ga = b.gen_apply(g, truth(*f.left(), mode));
        const NodeId gb = b.gen_apply(g, truth(*f.right(), mode));
        return b.gen_inverse(g, b.abs(b.weighted_sum({{1.0, ga}, {-1.0, gb}})));
      }
      case K::Forall:
        if (mode == QuantifierMode::Generator) {
          const Generator& g = generator();
          return b.gen_inverse(g, b.sum(each_grounding(f, [&] {
            return b.gen_apply(g, truth(*f.body(), mode));
          })));
        }
        return b.min(each_grounding(f, [&] { return truth(*f.body(), mode); }));
      case K::Exists:
        return b.max(each_grounding(f, [&] { return truth(*f.body(), mode); }));
    }
    throw CompileError("unknown formula node");
  }

  /// Penalty of a top-level universal: min{g(0+), sum_x g(body)} for
  /// nilpotent generators, sum_x g(body) for strict ones.
  NodeId universal_penalty(const Formula& f) {
    if (f.kind() != Formula::Kind::Forall) {
      throw CompileError("generator translation expects an outermost universal quantifier");
    }
    const Generator& g = generator();
    auto& b = builder_;
    const NodeId total = b.sum(each_grounding(f, [&] {
      return b.gen_apply(g, truth(*f.body(), QuantifierMode::Generator));
    }));
    if (g.strictness() == Strictness::Strict) return total;
    return b.min({b.constant(g.at_zero().value()), total});
  }

  /// Per-formula penalty as used inside a knowledge base.
  NodeId penalty(const Formula& f, QuantifierMode mode) {
    if (mode == QuantifierMode::Generator && f.kind() == Formula::Kind::Forall) {
      return universal_penalty(f);
    }
    const Generator& g = generator();
    return builder_.gen_apply(g, truth(f, mode));
  }

  /// sum_x |g(S(x)) - g(P(x))| over the default samples.
  NodeId supervision(std::string_view predicate, std::string_view known) {
    const Generator& g = generator();
    auto& b = builder_;
    if (dom_.default_samples.empty()) throw DomainError("empty supervision sample set");
    std::vector<NodeId> terms;
    for (std::size_t x : dom_.default_samples) {
      const std::size_t arg[] = {x};
      const NodeId gs = b.gen_apply(g, b.constant(dom_.known_value(known, arg) ? 1.0 : 0.0));
      const NodeId gp = b.gen_apply(g, b.pred(slots_.slot(predicate, arg)));
      terms.push_back(b.abs(b.weighted_sum({{1.0, gs}, {-1.0, gp}})));
    }
    return b.sum(terms);
  }

  /// sum over positives of g(P(x)), the positives being x with S(x) = 1.
  NodeId positive_supervision(std::string_view predicate, std::string_view known) {
    const Generator& g = generator();
    auto& b = builder_;
    std::vector<NodeId> terms;
    for (std::size_t x : dom_.default_samples) {
      const std::size_t arg[] = {x};
      if (!dom_.known_value(known, arg)) continue;
      terms.push_back(b.gen_apply(g, b.pred(slots_.slot(predicate, arg))));
    }
    if (terms.empty()) {
      throw DomainError("no positive examples for '@" + std::string(known) + "'");
    }
    return b.sum(terms);
  }

 private:
  NodeId tnorm(NodeId a, NodeId b_) {
    const Generator& g = generator();
    auto& b = builder_;
    return b.gen_inverse(g, b.sum({b.gen_apply(g, a), b.gen_apply(g, b_)}));
  }

  std::vector<std::size_t> ground(const Formula& atom) const {
    std::vector<std::size_t> args;
    args.reserve(atom.args().size());
    for (const auto& v : atom.args()) {
      auto it = env_.find(v);
      if (it == env_.end()) throw CompileError("variable '" + v + "' is not ground");
      args.push_back(it->second);
    }
    return args;
  }

  template <typename Body>
  std::vector<NodeId> each_grounding(const Formula& q, Body&& body) {
    const auto& xs = dom_.samples_for(q.name());
    std::vector<NodeId> out;
    out.reserve(xs.size());
    for (std::size_t x : xs) {
      env_[q.name()] = x;
      out.push_back(body());
    }
    env_.erase(q.name());
    return out;
  }

  TNormOp op_;
  const GroundingDomain& dom_;
  SlotTable& slots_;
  LossExpr::Builder builder_;
  std::map<std::string, std::size_t, std::less<>> env_;
};

/// Truth value of a closed formula with min/max quantifiers.
inline LossExpr translate_quantifier_minmax(const Formula& f, const GroundingDomain& dom,
                                            const TNormOp& op, SlotTable& slots) {
  Compiler c(op, dom, slots);
  return c.finish(c.truth(f, QuantifierMode::MinMax));
}

/// Truth value g^(-1)(min{g(0+), sum_x g(f(x))}) of an outermost universal.
inline LossExpr translate_quantifier_generator(const Formula& f, const GroundingDomain& dom,
                                               const TNormOp& op, SlotTable& slots) {
  if (f.kind() != Formula::Kind::Forall) {
    throw CompileError("generator translation expects an outermost universal quantifier");
  }
  Compiler c(op, dom, slots);
  return c.finish(c.truth(f, QuantifierMode::Generator));
}

inline LossExpr loss_universal(const Formula& f, const GroundingDomain& dom, const TNormOp& op,
                               SlotTable& slots) {
  Compiler c(op, dom, slots);
  return c.finish(c.universal_penalty(f));
}

/// sum_h weight_h * penalty_h. Generator mode uses loss_universal for
/// top-level universals; MinMax mode applies g to the min/max truth value.
inline LossExpr kb_loss(const KnowledgeBase& kb, const GroundingDomain& dom, SlotTable& slots) {
  Compiler c(TNormOp(kb.generator), dom, slots);
  std::vector<std::pair<double, NodeId>> terms;
  for (const auto& [formula, weight] : kb.formulas) {
    if (!(weight >= 0.0) || !std::isfinite(weight)) {
      throw CompileError("formula weights must be finite and non-negative");
    }
    if (weight == 0.0) continue;
    terms.emplace_back(weight, c.penalty(*formula, kb.quantifier_mode));
  }
  return c.finish(c.builder().weighted_sum(terms));
}

inline LossExpr supervision_loss(std::string_view predicate, std::string_view known,
                                 const GroundingDomain& dom, const TNormOp& op, SlotTable& slots) {
  Compiler c(op, dom, slots);
  return c.finish(c.supervision(predicate, known));
}

inline LossExpr positive_supervision_loss(std::string_view predicate, std::string_view known,
                                          const GroundingDomain& dom, const TNormOp& op,
                                          SlotTable& slots) {
  Compiler c(op, dom, slots);
  return c.finish(c.positive_supervision(predicate, known));
}

/// Number of random segments in predicate-output space [0,1]^n that violate
/// midpoint convexity: expr((u+v)/2) > (expr(u) + expr(v))/2 + tol.
inline int convexity_violations(const LossExpr& expr, int trials, std::uint64_t seed = 0x5eed,
                                double tol = 1e-9) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t n = expr.slot_count();
  std::vector<double> u(n), v(n), mid(n);
  int violations = 0;
  for (int t = 0; t < trials; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      u[i] = unit(rng);
      v[i] = unit(rng);
      mid[i] = 0.5 * (u[i] + v[i]);
    }
    if (expr(mid) > 0.5 * (expr(u) + expr(v)) + tol) ++violations;
  }
  return violations;
}

inline bool convexity_probe(const LossExpr& expr, int trials, std::uint64_t seed = 0x5eed,
                            double tol = 1e-9) {
  return convexity_violations(expr, trials, seed, tol) == 0;
}

}  // namespace fuzzyloss

#endif  // FUZZYLOSS_COMPILER_HPP
