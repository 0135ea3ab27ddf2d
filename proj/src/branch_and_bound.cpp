#include <algorithm>
#include <cmath>
#include <memory>
#include <queue>

#include "gss/milp.hpp"
#include "simplex.hpp"

namespace gss {

using detail::LpResult;
using detail::SimplexEngine;

namespace {

SolveStatus to_status(LpResult r) {
  switch (r) {
    case LpResult::optimal: return SolveStatus::optimal;
    case LpResult::infeasible: return SolveStatus::infeasible;
    case LpResult::unbounded: return SolveStatus::unbounded;
    case LpResult::failure: return SolveStatus::numerical_failure;
  }
  return SolveStatus::numerical_failure;
}

struct Fixing {
  VarId var;
  double value;
};

struct Node {
  double bound;  // parent LP bound, minimisation form
  std::size_t id;
  std::vector<Fixing> fixings;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

class BranchAndBound {
 public:
  BranchAndBound(const MilpModel& model, const ToleranceConfig& tol)
      : model_(model), tol_(tol), engine_(std::make_unique<SimplexEngine>(model, tol)) {
    sign_ = model.sense() == ObjSense::minimize ? 1.0 : -1.0;
    for (const auto& v : model.variables()) {
      if (v.kind == VarKind::binary) {
        binaries_.push_back(v.id);
        base_lo_.push_back(v.lower);
        base_hi_.push_back(v.upper);
      }
    }
    cur_lo_ = base_lo_;
    cur_hi_ = base_hi_;
    slot_.assign(model.variables().size(), binaries_.size());
    for (std::size_t b = 0; b < binaries_.size(); ++b) slot_[binaries_[b]] = b;
  }

  MilpSolution run();

 private:
  // Moves the engine to the bounds implied by `fixings` and re-solves.
  LpResult evaluate(const std::vector<Fixing>& fixings, bool fresh);
  void apply(const std::vector<Fixing>& fixings);
  std::size_t pick_branch(const std::vector<double>& x) const;
  void try_incumbent(const std::vector<double>& x, const std::vector<Fixing>& context);
  double cutoff() const;

  const MilpModel& model_;
  const ToleranceConfig tol_;
  std::unique_ptr<SimplexEngine> engine_;
  double sign_ = 1.0;
  std::vector<VarId> binaries_;
  std::vector<double> base_lo_, base_hi_, cur_lo_, cur_hi_;
  std::vector<std::size_t> slot_;

  bool have_incumbent_ = false;
  double incumbent_ = kInf;  // minimisation form
  std::vector<double> incumbent_x_;
  double incumbent_dual_ = std::nan("");
  std::size_t iterations_ = 0;
  bool failed_ = false;
};

void BranchAndBound::apply(const std::vector<Fixing>& fixings) {
  std::vector<double> lo = base_lo_, hi = base_hi_;
  for (const auto& f : fixings) {
    const std::size_t b = slot_[f.var];
    lo[b] = hi[b] = f.value;
  }
  for (std::size_t b = 0; b < binaries_.size(); ++b) {
    if (lo[b] != cur_lo_[b] || hi[b] != cur_hi_[b]) {
      engine_->set_bounds(binaries_[b], lo[b], hi[b]);
      cur_lo_[b] = lo[b];
      cur_hi_[b] = hi[b];
    }
  }
}

LpResult BranchAndBound::evaluate(const std::vector<Fixing>& fixings, bool fresh) {
  apply(fixings);
  const std::size_t before = engine_->iterations();
  LpResult r = fresh ? engine_->solve() : engine_->reoptimize();
  iterations_ += engine_->iterations() - before;
  if (r == LpResult::failure) {
    // Last resort: a brand-new engine on a copy of the model with the node bounds.
    MilpModel copy = model_;
    for (std::size_t b = 0; b < binaries_.size(); ++b) copy.set_bounds(binaries_[b], cur_lo_[b], cur_hi_[b]);
    engine_ = std::make_unique<SimplexEngine>(copy, tol_);
    r = engine_->solve();
    iterations_ += engine_->iterations();
  }
  return r;
}

std::size_t BranchAndBound::pick_branch(const std::vector<double>& x) const {
  std::size_t best = binaries_.size();
  double best_dist = 0.0;
  for (std::size_t b = 0; b < binaries_.size(); ++b) {
    const double v = x[binaries_[b]];
    const double frac = v - std::floor(v);
    if (frac <= tol_.integrality_tol || frac >= 1.0 - tol_.integrality_tol) continue;
    const double score = std::min(frac, 1.0 - frac);
    if (score > best_dist) {
      best_dist = score;
      best = b;
    }
  }
  return best;
}

double BranchAndBound::cutoff() const {
  if (!have_incumbent_) return kInf;
  const double slack = std::max(tol_.abs_gap, tol_.rel_gap * std::max(std::abs(incumbent_), 1e-9));
  return incumbent_ - slack;
}

// Fixes every binary to its rounded value and re-solves the continuous part,
// which both polishes an integral LP point and acts as a rounding heuristic.
void BranchAndBound::try_incumbent(const std::vector<double>& x, const std::vector<Fixing>& context) {
  std::vector<Fixing> fix;
  fix.reserve(binaries_.size());
  for (VarId v : binaries_) fix.push_back({v, std::round(x[v]) >= 0.5 ? 1.0 : 0.0});
  const LpResult r = evaluate(fix, false);
  if (r == LpResult::optimal) {
    const double obj = sign_ * engine_->objective();
    if (!have_incumbent_ || obj < incumbent_) {
      have_incumbent_ = true;
      incumbent_ = obj;
      incumbent_x_ = engine_->values();
      for (VarId v : binaries_) incumbent_x_[v] = std::round(incumbent_x_[v]);
      incumbent_dual_ = engine_->dual_objective();
    }
  } else if (r == LpResult::failure) {
    failed_ = true;
  }
  // Leave the engine positioned back on the caller's node.
  apply(context);
}

MilpSolution BranchAndBound::run() {
  MilpSolution sol;
  const LpResult root = evaluate({}, true);
  std::size_t nodes = 1;
  if (root != LpResult::optimal) {
    sol.status = to_status(root);
    sol.stats.nodes = nodes;
    sol.stats.lp_iterations = iterations_;
    return sol;
  }

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  std::size_t next_id = 1;
  double pruned_bound = kInf;  // smallest bound among nodes dropped within the gap tolerance
  bool hit_limit = false;

  Node current{sign_ * engine_->objective(), 0, {}};
  bool have_current = true;
  bool current_solved = true;
  std::size_t polish_counter = 0;

  for (;;) {
    if (!have_current) {
      if (open.empty()) break;
      current = open.top();
      open.pop();
      have_current = true;
      current_solved = false;
    }
    if (current.bound >= cutoff()) {
      if (current.bound < incumbent_) pruned_bound = std::min(pruned_bound, current.bound);
      have_current = false;
      continue;
    }
    if (!current_solved) {
      if (nodes >= tol_.node_limit) {
        hit_limit = true;
        open.push(current);
        break;
      }
      ++nodes;
      const LpResult r = evaluate(current.fixings, false);
      if (r == LpResult::failure) {
        failed_ = true;
        break;
      }
      if (r != LpResult::optimal) {
        have_current = false;
        continue;
      }
      current.bound = std::max(current.bound, sign_ * engine_->objective());
      if (current.bound >= cutoff()) {
        if (current.bound < incumbent_) pruned_bound = std::min(pruned_bound, current.bound);
        have_current = false;
        continue;
      }
    }
    const std::vector<double> x = engine_->values();
    const std::size_t b = pick_branch(x);
    if (b == binaries_.size()) {
      try_incumbent(x, current.fixings);
      if (failed_) break;
      have_current = false;
      continue;
    }
    if (polish_counter++ % 64 == 0) {
      try_incumbent(x, current.fixings);
      if (failed_) break;
      if (current.bound >= cutoff()) {
        have_current = false;
        continue;
      }
    }

    const VarId v = binaries_[b];
    const double up_first = x[v] >= 0.5 ? 1.0 : 0.0;
    Node sibling{current.bound, next_id++, current.fixings};
    sibling.fixings.push_back({v, 1.0 - up_first});
    open.push(std::move(sibling));
    current.fixings.push_back({v, up_first});
    current.id = next_id++;
    current_solved = false;
  }

  sol.stats.nodes = nodes;
  sol.stats.lp_iterations = iterations_;
  if (failed_) {
    sol.status = SolveStatus::numerical_failure;
    return sol;
  }
  double bound = pruned_bound;
  if (have_current && hit_limit) bound = std::min(bound, current.bound);
  if (!open.empty()) bound = std::min(bound, open.top().bound);
  if (have_incumbent_) bound = std::min(bound, incumbent_);

  if (!have_incumbent_) {
    sol.status = hit_limit ? SolveStatus::node_limit : SolveStatus::infeasible;
    if (hit_limit) sol.stats.best_bound = sign_ * bound;
    return sol;
  }
  sol.status = hit_limit ? SolveStatus::gap_limit : SolveStatus::optimal;
  sol.objective = sign_ * incumbent_;
  sol.values = incumbent_x_;
  sol.dual_objective = incumbent_dual_;
  sol.stats.best_bound = sign_ * bound;
  sol.stats.rel_gap = (incumbent_ - bound) / std::max(std::abs(incumbent_), 1e-9);
  return sol;
}

}  // namespace

MilpSolution solve_lp(const MilpModel& model, const ToleranceConfig& tol) {
  SimplexEngine engine(model, tol);
  const LpResult r = engine.solve();
  MilpSolution sol;
  sol.status = to_status(r);
  sol.stats.nodes = 1;
  sol.stats.lp_iterations = engine.iterations();
  if (r == LpResult::optimal) {
    sol.objective = engine.objective();
    sol.values = engine.values();
    sol.dual_objective = engine.dual_objective();
    sol.stats.best_bound = sol.objective;
    sol.stats.rel_gap = 0.0;
  }
  return sol;
}

MilpSolution solve_milp(const MilpModel& model, const ToleranceConfig& tol) {
  BranchAndBound bb(model, tol);
  return bb.run();
}

}  // namespace gss
