#ifndef FUZZYLOSS_LOSS_EXPR_HPP
#define FUZZYLOSS_LOSS_EXPR_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fuzzyloss/generator.hpp"

namespace fuzzyloss {

using NodeId = std::size_t;

/// A grounded scalar expression over predicate outputs.
///
/// Nodes are stored in topological order (children precede parents) and the
/// last node is the root. Leaves are constants or `PredOutput` slots indexing
/// a flat buffer of predicate values supplied at evaluation time. The
/// expression is immutable once built; evaluation and differentiation only
/// touch caller-owned buffers.
class LossExpr {
 public:
  enum class Op { Const, PredOutput, GenApply, GenInverse, Sum, Min, Max, Abs, OneMinus };

  struct Node {
    Op op = Op::Const;
    std::vector<NodeId> children;
    std::vector<double> coefs;  // Sum only, parallel to children
    double constant = 0.0;      // Const value, or Sum offset
    std::size_t slot = 0;       // PredOutput only
    std::optional<Generator> generator;
    bool nonnegative = false;
  };

  struct Evaluation {
    double value = 0.0;
    std::size_t clamp_count = 0;
  };

  class Builder;

  LossExpr() : LossExpr(std::vector<Node>{Node{}}, 0) {}

  std::span<const Node> nodes() const { return nodes_; }
  const Node& root() const { return nodes_.back(); }
  NodeId root_id() const { return nodes_.size() - 1; }
  /// One past the largest slot index referenced.
  std::size_t slot_count() const { return slot_count_; }
  bool is_constant() const { return root().op == Op::Const; }

  std::size_t count(Op op) const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [op](const Node& n) { return n.op == op; }));
  }

  Evaluation evaluate(std::span<const double> slots) const {
    std::vector<double> values(nodes_.size());
    std::size_t clamps = 0;
    forward(slots, values, clamps);
    return {values.back(), clamps};
  }

  double operator()(std::span<const double> slots) const { return evaluate(slots).value; }

  /// Evaluates and accumulates d(root)/d(slot) into `grad` (sized slot_count()
  /// or larger). Clamped generator arguments contribute zero gradient.
  Evaluation gradient(std::span<const double> slots, std::span<double> grad) const {
    std::vector<double> values(nodes_.size());
    std::size_t clamps = 0;
    forward(slots, values, clamps);
    std::vector<double> adj(nodes_.size(), 0.0);
    adj.back() = 1.0;
    for (std::size_t k = nodes_.size(); k-- > 0;) {
      const Node& n = nodes_[k];
      const double a = adj[k];
      if (a == 0.0) continue;
      switch (n.op) {
        case Op::Const: break;
        case Op::PredOutput: grad[n.slot] += a; break;
        case Op::GenApply: adj[n.children[0]] += a * n.generator->derivative(values[n.children[0]]); break;
        case Op::GenInverse:
          adj[n.children[0]] += a * n.generator->inverse_derivative(values[n.children[0]]);
          break;
        case Op::Sum:
          for (std::size_t i = 0; i < n.children.size(); ++i) adj[n.children[i]] += a * n.coefs[i];
          break;
        case Op::Min:
        case Op::Max: adj[active_child(n, values)] += a; break;
        case Op::Abs: {
          const double v = values[n.children[0]];
          adj[n.children[0]] += v > 0.0 ? a : (v < 0.0 ? -a : 0.0);
          break;
        }
        case Op::OneMinus: adj[n.children[0]] -= a; break;
      }
    }
    return {values.back(), clamps};
  }

 private:
  LossExpr(std::vector<Node> nodes, std::size_t slot_count)
      : nodes_(std::move(nodes)), slot_count_(slot_count) {}

  void forward(std::span<const double> slots, std::vector<double>& values,
               std::size_t& clamps) const {
    if (slots.size() < slot_count_) {
      throw std::invalid_argument("LossExpr: slot buffer has " + std::to_string(slots.size()) +
                                  " values, expression needs " + std::to_string(slot_count_));
    }
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
      const Node& n = nodes_[k];
      double v = 0.0;
      switch (n.op) {
        case Op::Const: v = n.constant; break;
        case Op::PredOutput: v = slots[n.slot]; break;
        case Op::GenApply: {
          const GeneratorValue gv = (*n.generator)(values[n.children[0]]);
          clamps += gv.clamped ? 1 : 0;
          v = gv.value.value();
          break;
        }
        case Op::GenInverse: v = n.generator->inverse(values[n.children[0]]); break;
        case Op::Sum:
          v = n.constant;
          for (std::size_t i = 0; i < n.children.size(); ++i) v += n.coefs[i] * values[n.children[i]];
          break;
        case Op::Min:
        case Op::Max: v = values[active_child(n, values)]; break;
        case Op::Abs: v = std::abs(values[n.children[0]]); break;
        case Op::OneMinus: v = 1.0 - values[n.children[0]]; break;
      }
      values[k] = v;
    }
  }

  // Extremal child; ties go to a non-constant child so a clamp such as
  // min{g(0+), sum} passes gradient through the active branch.
  NodeId active_child(const Node& n, const std::vector<double>& values) const {
    NodeId best = n.children[0];
    for (std::size_t i = 1; i < n.children.size(); ++i) {
      const NodeId c = n.children[i];
      const double vc = values[c];
      const double vb = values[best];
      const bool better = n.op == Op::Min ? vc < vb : vc > vb;
      const bool tie_preferred =
          vc == vb && nodes_[best].op == Op::Const && nodes_[c].op != Op::Const;
      if (better || tie_preferred) best = c;
    }
    return best;
  }

  std::vector<Node> nodes_;
  std::size_t slot_count_ = 0;
};

/// Incremental construction with local rewrites: constant folding,
/// g(g^(-1)(y)) -> min{limit, y}, and |s| -> s for provably non-negative s.
class LossExpr::Builder {
 public:
  NodeId constant(double c) {
    Node n;
    n.op = Op::Const;
    n.constant = c;
    n.nonnegative = c >= 0.0;
    return push(std::move(n));
  }

  NodeId pred(std::size_t slot) {
    Node n;
    n.op = Op::PredOutput;
    n.slot = slot;
    n.nonnegative = true;
    slot_count_ = std::max(slot_count_, slot + 1);
    return push(std::move(n));
  }

  NodeId gen_apply(const Generator& g, NodeId x) {
    const Node& arg = nodes_[x];
    if (arg.op == Op::Const) return constant(g(arg.constant).value.value());
    if (arg.op == Op::GenInverse && arg.generator->spec() == g.spec()) {
      // g(g^(-1)(y)) = min{limit, y} where limit is where the pseudo-inverse saturates.
      const double limit = g.strictness() == Strictness::Strict ? g(g.eps()).value.value()
                                                                 : g.at_zero().value();
      const NodeId y = arg.children[0];
      return min({constant(limit), y});
    }
    Node n;
    n.op = Op::GenApply;
    n.children = {x};
    n.generator = g;
    n.nonnegative = true;
    return push(std::move(n));
  }

  NodeId gen_inverse(const Generator& g, NodeId y) {
    const Node& arg = nodes_[y];
    if (arg.op == Op::Const) return constant(g.inverse(arg.constant));
    Node n;
    n.op = Op::GenInverse;
    n.children = {y};
    n.generator = g;
    n.nonnegative = true;
    return push(std::move(n));
  }

  /// offset + sum_i coef_i * term_i
  NodeId weighted_sum(const std::vector<std::pair<double, NodeId>>& terms, double offset = 0.0) {
    Node n;
    n.op = Op::Sum;
    n.constant = offset;
    for (const auto& [coef, id] : terms) {
      const Node& t = nodes_[id];
      if (coef == 0.0) continue;
      if (t.op == Op::Const) {
        n.constant += coef * t.constant;
      } else {
        n.children.push_back(id);
        n.coefs.push_back(coef);
      }
    }
    if (n.children.empty()) return constant(n.constant);
    if (n.children.size() == 1 && n.coefs[0] == 1.0 && n.constant == 0.0) return n.children[0];
    n.nonnegative = n.constant >= 0.0;
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      n.nonnegative = n.nonnegative && n.coefs[i] >= 0.0 && nodes_[n.children[i]].nonnegative;
    }
    return push(std::move(n));
  }

  NodeId sum(const std::vector<NodeId>& terms) {
    std::vector<std::pair<double, NodeId>> weighted;
    weighted.reserve(terms.size());
    for (NodeId t : terms) weighted.emplace_back(1.0, t);
    return weighted_sum(weighted);
  }

  NodeId min(const std::vector<NodeId>& args) { return extremum(Op::Min, args); }
  NodeId max(const std::vector<NodeId>& args) { return extremum(Op::Max, args); }

  NodeId abs(NodeId x) {
    const Node& arg = nodes_[x];
    if (arg.op == Op::Const) return constant(std::abs(arg.constant));
    if (arg.nonnegative) return x;
    // |-c * s| = c * s when s >= 0
    if (arg.op == Op::Sum && arg.constant == 0.0 && arg.children.size() == 1 &&
        arg.coefs[0] < 0.0 && nodes_[arg.children[0]].nonnegative) {
      return weighted_sum({{-arg.coefs[0], arg.children[0]}});
    }
    Node n;
    n.op = Op::Abs;
    n.children = {x};
    n.nonnegative = true;
    return push(std::move(n));
  }

  NodeId one_minus(NodeId x) {
    const Node& arg = nodes_[x];
    if (arg.op == Op::Const) return constant(1.0 - arg.constant);
    Node n;
    n.op = Op::OneMinus;
    n.children = {x};
    n.nonnegative = true;
    return push(std::move(n));
  }

  const Node& node(NodeId id) const { return nodes_[id]; }

  /// Extracts the sub-graph reachable from `root`, renumbered, root last.
  LossExpr build(NodeId root) const {
    std::vector<bool> live(nodes_.size(), false);
    live[root] = true;
    for (std::size_t k = root + 1; k-- > 0;) {
      if (!live[k]) continue;
      for (NodeId c : nodes_[k].children) live[c] = true;
    }
    std::vector<NodeId> remap(nodes_.size(), 0);
    std::vector<Node> out;
    for (std::size_t k = 0; k <= root; ++k) {
      if (!live[k]) continue;
      Node n = nodes_[k];
      for (NodeId& c : n.children) c = remap[c];
      remap[k] = out.size();
      out.push_back(std::move(n));
    }
    return LossExpr(std::move(out), slot_count_);
  }

 private:
  NodeId extremum(Op op, const std::vector<NodeId>& args) {
    if (args.empty()) throw std::invalid_argument("LossExpr: min/max of no arguments");
    Node n;
    n.op = op;
    bool have_const = false;
    double folded = 0.0;
    for (NodeId id : args) {
      const Node& a = nodes_[id];
      if (a.op == Op::Const) {
        // +inf never wins a min; -inf never wins a max.
        if (op == Op::Min && a.constant == kInfinity) continue;
        if (op == Op::Max && a.constant == -kInfinity) continue;
        folded = !have_const ? a.constant
                             : (op == Op::Min ? std::min(folded, a.constant)
                                              : std::max(folded, a.constant));
        have_const = true;
      } else {
        n.children.push_back(id);
      }
    }
    if (n.children.empty()) return constant(have_const ? folded : (op == Op::Min ? kInfinity : -kInfinity));
    if (have_const) n.children.insert(n.children.begin(), constant(folded));
    if (n.children.size() == 1) return n.children[0];
    n.nonnegative = true;
    for (NodeId c : n.children) n.nonnegative = n.nonnegative && nodes_[c].nonnegative;
    if (op == Op::Max) {
      n.nonnegative = false;
      for (NodeId c : n.children) n.nonnegative = n.nonnegative || nodes_[c].nonnegative;
    }
    return push(std::move(n));
  }

  NodeId push(Node n) {
    nodes_.push_back(std::move(n));
    return nodes_.size() - 1;
  }

  std::vector<Node> nodes_;
  std::size_t slot_count_ = 0;
};

}  // namespace fuzzyloss

#endif  // FUZZYLOSS_LOSS_EXPR_HPP
