#include "simplex.hpp"

#include <algorithm>
#include <cmath>

namespace gss::detail {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kDropTol = 1e-13;
constexpr std::size_t kRefactorEvery = 400;
constexpr std::size_t kDegenerateBeforeBland = 150;

}  // namespace

SimplexEngine::SimplexEngine(const MilpModel& model, const ToleranceConfig& tol) : tol_(tol) {
  model.validate();
  const auto& vars = model.variables();
  num_model_vars_ = vars.size();
  col_pos_.assign(num_model_vars_, -1);
  col_neg_.assign(num_model_vars_, -1);

  // Columns for model variables.
  std::vector<double> lo, hi;
  // For each model variable: list of (column, sign).
  for (std::size_t v = 0; v < vars.size(); ++v) {
    const double l = vars[v].lower, u = vars[v].upper;
    if (std::isfinite(l)) {
      col_pos_[v] = static_cast<std::int64_t>(lo.size());
      lo.push_back(l);
      hi.push_back(u);
    } else if (std::isfinite(u)) {
      col_neg_[v] = static_cast<std::int64_t>(lo.size());
      lo.push_back(-u);
      hi.push_back(kInf);
    } else {
      col_pos_[v] = static_cast<std::int64_t>(lo.size());
      lo.push_back(0.0);
      hi.push_back(kInf);
      col_neg_[v] = static_cast<std::int64_t>(lo.size());
      lo.push_back(0.0);
      hi.push_back(kInf);
    }
  }
  n_struct_ = lo.size();

  auto expand = [&](const std::vector<Term>& terms) {
    std::vector<std::pair<std::size_t, double>> out;
    for (const auto& t : terms) {
      if (t.coef == 0.0) continue;
      if (col_pos_[t.var] >= 0) out.emplace_back(static_cast<std::size_t>(col_pos_[t.var]), t.coef);
      if (col_neg_[t.var] >= 0) out.emplace_back(static_cast<std::size_t>(col_neg_[t.var]), -t.coef);
    }
    return out;
  };

  // Objective, in minimisation form and scaled to unit max coefficient.
  obj_sign_ = model.sense() == ObjSense::minimize ? 1.0 : -1.0;
  obj_const_ = model.objective().constant();
  std::vector<double> raw_cost(n_struct_, 0.0);
  for (const auto& [c, a] : expand(model.objective().terms())) raw_cost[c] += obj_sign_ * a;

  // Rows: drop empty ones (checking them), scale the rest.
  struct PendingRow {
    std::vector<std::pair<std::size_t, double>> entries;
    RowSense sense;
    double rhs;
  };
  std::vector<PendingRow> pending;
  for (const auto& r : model.constraints()) {
    auto entries = expand(r.terms);
    if (entries.empty()) {
      const double b = r.rhs;
      const double ft = tol_.feasibility_tol;
      const bool ok = (r.sense == RowSense::le && 0.0 <= b + ft) || (r.sense == RowSense::ge && 0.0 >= b - ft) ||
                      (r.sense == RowSense::eq && std::abs(b) <= ft);
      if (!ok) trivially_infeasible_ = true;
      continue;
    }
    double amax = 0.0;
    for (const auto& e : entries) amax = std::max(amax, std::abs(e.second));
    const double s = 1.0 / amax;
    for (auto& e : entries) e.second *= s;
    pending.push_back({std::move(entries), r.sense, r.rhs * s});
  }

  // Column equilibration by powers of two: x = scale * x' with unit max entry
  // per column, so a small cost on a weakly coupled column is not lost below
  // the pricing tolerance.
  col_scale_.assign(n_struct_, 1.0);
  {
    std::vector<double> colmax(n_struct_, 0.0);
    for (const auto& p : pending)
      for (const auto& [c, a] : p.entries) colmax[c] = std::max(colmax[c], std::abs(a));
    for (std::size_t j = 0; j < n_struct_; ++j) {
      if (colmax[j] == 0.0) continue;
      const double e = std::clamp(std::round(-std::log2(colmax[j])), -30.0, 30.0);
      col_scale_[j] = std::exp2(e);
    }
    for (auto& p : pending)
      for (auto& [c, a] : p.entries) a *= col_scale_[c];
    for (std::size_t j = 0; j < n_struct_; ++j) {
      lo[j] /= col_scale_[j];
      hi[j] /= col_scale_[j];
      raw_cost[j] *= col_scale_[j];
    }
  }
  double cmax = 0.0;
  for (double c : raw_cost) cmax = std::max(cmax, std::abs(c));
  obj_scale_ = cmax > 0.0 ? 1.0 / cmax : 1.0;

  const std::size_t m = pending.size();
  n_slack_ = 0;
  for (const auto& p : pending)
    if (p.sense != RowSense::eq) ++n_slack_;
  n_total_ = n_struct_ + n_slack_ + m;
  stride_ = n_total_;
  width_ = n_total_;
  m_ = m;

  lo_ = std::move(lo);
  hi_ = std::move(hi);
  lo_.resize(n_total_, 0.0);
  hi_.resize(n_total_, kInf);
  cost_.assign(n_total_, 0.0);
  for (std::size_t j = 0; j < n_struct_; ++j) cost_[j] = raw_cost[j] * obj_scale_;
  phase1_cost_.assign(n_total_, 0.0);
  for (std::size_t a = 0; a < m; ++a) phase1_cost_[n_struct_ + n_slack_ + a] = 1.0;

  orig_rows_.resize(m);
  orig_rhs_.resize(m);
  std::size_t slack = n_struct_;
  for (std::size_t r = 0; r < m; ++r) {
    orig_rows_[r] = std::move(pending[r].entries);
    orig_rhs_[r] = pending[r].rhs;
    if (pending[r].sense == RowSense::le) {
      orig_rows_[r].emplace_back(slack++, 1.0);
    } else if (pending[r].sense == RowSense::ge) {
      orig_rows_[r].emplace_back(slack++, -1.0);
    }
  }
  art_sign_.assign(m, 1.0);
  status_.assign(n_total_, Status::at_lower);
  iteration_limit_ = 50 * (m + n_total_) + 20000;
}

double SimplexEngine::value_of(std::size_t j) const {
  return status_[j] == Status::at_upper ? hi_[j] : lo_[j];
}

void SimplexEngine::build_initial_basis() {
  const std::size_t m = m_;
  tab_.assign(m * stride_, 0.0);
  head_.resize(m);
  orig_row_.resize(m);
  beta_.assign(m, 0.0);
  for (std::size_t j = 0; j < n_total_; ++j) status_[j] = Status::at_lower;

  for (std::size_t r = 0; r < m; ++r) {
    orig_row_[r] = r;
    double resid = orig_rhs_[r];
    std::int64_t slack_col = -1;
    double slack_coef = 0.0;
    for (const auto& [c, a] : orig_rows_[r]) {
      if (c < n_struct_) {
        resid -= a * lo_[c];
      } else {
        slack_col = static_cast<std::int64_t>(c);
        slack_coef = a;
      }
    }
    double* t = row(r);
    for (const auto& [c, a] : orig_rows_[r]) t[c] = a;
    const std::size_t art = n_struct_ + n_slack_ + r;
    // A slack can start basic when its implied value is non-negative.
    if (slack_col >= 0 && resid * slack_coef >= 0.0) {
      const double inv = 1.0 / slack_coef;
      for (const auto& [c, a] : orig_rows_[r]) t[c] = a * inv;
      head_[r] = static_cast<std::size_t>(slack_col);
      status_[head_[r]] = Status::basic;
      beta_[r] = resid * inv;
      art_sign_[r] = slack_coef;  // artificial column mirrors the slack sign
      t[art] = 1.0 * inv * art_sign_[r];
      hi_[art] = 0.0;  // not needed for this row
    } else {
      const double sg = resid >= 0.0 ? 1.0 : -1.0;
      art_sign_[r] = sg;
      for (const auto& [c, a] : orig_rows_[r]) t[c] = a * sg;
      t[art] = 1.0;
      head_[r] = art;
      status_[art] = Status::basic;
      beta_[r] = std::abs(resid);
      hi_[art] = kInf;
    }
  }
  since_refactor_ = 0;
}

void SimplexEngine::recompute_reduced_costs() {
  const auto& c = *cur_cost_;
  d_.assign(n_total_, 0.0);
  for (std::size_t j = 0; j < width_; ++j) d_[j] = c[j];
  for (std::size_t i = 0; i < m_; ++i) {
    const double cb = c[head_[i]];
    if (cb == 0.0) continue;
    const double* t = row(i);
    for (std::size_t j = 0; j < width_; ++j) d_[j] -= cb * t[j];
  }
  for (std::size_t i = 0; i < m_; ++i) d_[head_[i]] = 0.0;
}

void SimplexEngine::pivot(std::size_t r, std::size_t q) {
  double* pr = row(r);
  const double inv = 1.0 / pr[q];
  nz_.clear();
  for (std::size_t j = 0; j < width_; ++j) {
    if (pr[j] != 0.0) {
      pr[j] *= inv;
      if (std::abs(pr[j]) < kDropTol) {
        pr[j] = 0.0;
      } else {
        nz_.push_back(j);
      }
    }
  }
  pr[q] = 1.0;
  for (std::size_t i = 0; i < m_; ++i) {
    if (i == r) continue;
    double* ti = row(i);
    const double f = ti[q];
    if (f == 0.0) continue;
    for (std::size_t j : nz_) {
      double v = ti[j] - f * pr[j];
      ti[j] = std::abs(v) < kDropTol ? 0.0 : v;
    }
    ti[q] = 0.0;
  }
  const double fd = d_[q];
  if (fd != 0.0) {
    for (std::size_t j : nz_) d_[j] -= fd * pr[j];
  }
  d_[q] = 0.0;
  head_[r] = q;
  status_[q] = Status::basic;
  ++since_refactor_;
}

bool SimplexEngine::refactor() {
  const std::size_t m = m_;
  std::vector<double> rb(m);
  std::fill(tab_.begin(), tab_.end(), 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t o = orig_row_[i];
    double* t = row(i);
    for (const auto& [c, a] : orig_rows_[o]) t[c] = a;
    if (width_ > n_struct_ + n_slack_) t[n_struct_ + n_slack_ + o] = art_sign_[o];
    rb[i] = orig_rhs_[o];
  }
  std::vector<std::size_t> basics = head_;
  std::vector<char> done(m, 0);
  std::vector<std::size_t> new_head(m);
  for (std::size_t h : basics) {
    std::size_t best = m;
    double bestv = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (done[i]) continue;
      const double v = std::abs(row(i)[h]);
      if (v > bestv) {
        bestv = v;
        best = i;
      }
    }
    if (best == m || bestv < 1e-11) return false;
    // Gauss-Jordan step on column h, carrying the right-hand side.
    double* pr = row(best);
    const double inv = 1.0 / pr[h];
    nz_.clear();
    for (std::size_t j = 0; j < width_; ++j) {
      if (pr[j] != 0.0) {
        pr[j] *= inv;
        if (std::abs(pr[j]) < kDropTol) {
          pr[j] = 0.0;
        } else {
          nz_.push_back(j);
        }
      }
    }
    pr[h] = 1.0;
    rb[best] *= inv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == best) continue;
      double* ti = row(i);
      const double f = ti[h];
      if (f == 0.0) continue;
      for (std::size_t j : nz_) {
        double v = ti[j] - f * pr[j];
        ti[j] = std::abs(v) < kDropTol ? 0.0 : v;
      }
      ti[h] = 0.0;
      rb[i] -= f * rb[best];
    }
    done[best] = 1;
    new_head[best] = h;
  }
  head_ = new_head;
  for (std::size_t i = 0; i < m; ++i) {
    double v = rb[i];
    const double* t = row(i);
    for (std::size_t j = 0; j < width_; ++j) {
      if (status_[j] == Status::basic || t[j] == 0.0) continue;
      const double x = value_of(j);
      if (x != 0.0) v -= t[j] * x;
    }
    beta_[i] = v;
  }
  recompute_reduced_costs();
  since_refactor_ = 0;
  return true;
}

void SimplexEngine::remove_row(std::size_t r) {
  const std::size_t last = m_ - 1;
  if (r != last) {
    std::copy_n(row(last), stride_, row(r));
    head_[r] = head_[last];
    beta_[r] = beta_[last];
    orig_row_[r] = orig_row_[last];
  }
  head_.pop_back();
  beta_.pop_back();
  orig_row_.pop_back();
  tab_.resize(last * stride_);
  m_ = last;
}

bool SimplexEngine::residuals_ok() const {
  // Row activities recomputed from the original rows at the current point.
  std::vector<double> x(n_total_);
  for (std::size_t j = 0; j < n_total_; ++j) x[j] = status_[j] == Status::basic ? 0.0 : value_of(j);
  for (std::size_t i = 0; i < m_; ++i) x[head_[i]] = beta_[i];
  for (std::size_t i = 0; i < m_; ++i) {
    const std::size_t o = orig_row_[i];
    double act = 0.0, mag = std::abs(orig_rhs_[o]);
    for (const auto& [c, a] : orig_rows_[o]) {
      act += a * x[c];
      mag = std::max(mag, std::abs(a * x[c]));
    }
    if (width_ > n_struct_ + n_slack_) act += art_sign_[o] * x[n_struct_ + n_slack_ + o];
    if (std::abs(act - orig_rhs_[o]) > 1e-9 * std::max(1.0, mag)) return false;
  }
  return true;
}

LpResult SimplexEngine::primal() {
  std::size_t degenerate = 0;
  bool bland = false;
  const double ft = tol_.feasibility_tol;
  for (;;) {
    if (++iterations_ > iteration_limit_) return LpResult::failure;
    if (since_refactor_ >= kRefactorEvery && !refactor()) return LpResult::failure;

    std::size_t q = n_total_;
    double best = 0.0;
    for (std::size_t j = 0; j < width_; ++j) {
      if (status_[j] == Status::basic || lo_[j] == hi_[j]) continue;
      const double dj = d_[j];
      double score = 0.0;
      if (status_[j] == Status::at_lower && dj < -tol_.optimality_tol) {
        score = -dj;
      } else if (status_[j] == Status::at_upper && dj > tol_.optimality_tol) {
        score = dj;
      } else {
        continue;
      }
      if (bland) {
        q = j;
        break;
      }
      if (score > best) {
        best = score;
        q = j;
      }
    }
    if (q == n_total_) return LpResult::optimal;

    const double dir = status_[q] == Status::at_lower ? 1.0 : -1.0;
    // Harris ratio test, pass 1: largest step with bounds relaxed by ft.
    double theta_max = kInf;
    for (std::size_t i = 0; i < m_; ++i) {
      const double a = row(i)[q] * dir;
      if (std::abs(a) < kPivotTol) continue;
      const std::size_t h = head_[i];
      if (a > 0.0) {
        if (std::isfinite(lo_[h])) theta_max = std::min(theta_max, (beta_[i] - lo_[h] + ft) / a);
      } else if (std::isfinite(hi_[h])) {
        theta_max = std::min(theta_max, (hi_[h] - beta_[i] + ft) / -a);
      }
    }
    const double flip = hi_[q] - lo_[q];
    if (!std::isfinite(theta_max) && !std::isfinite(flip)) return LpResult::unbounded;

    std::size_t r = m_;
    double theta = 0.0;
    if (std::isfinite(flip) && flip <= theta_max) {
      theta = flip;
    } else {
      // Pass 2: among rows within theta_max, take the largest pivot.
      double best_a = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = row(i)[q] * dir;
        if (std::abs(a) < kPivotTol) continue;
        const std::size_t h = head_[i];
        double ratio;
        if (a > 0.0) {
          if (!std::isfinite(lo_[h])) continue;
          ratio = (beta_[i] - lo_[h]) / a;
        } else {
          if (!std::isfinite(hi_[h])) continue;
          ratio = (hi_[h] - beta_[i]) / -a;
        }
        if (ratio > theta_max) continue;
        const bool better = bland ? (r == m_ || h < head_[r]) : std::abs(a) > best_a;
        if (better) {
          best_a = std::abs(a);
          r = i;
          theta = std::max(ratio, 0.0);
        }
      }
      if (r == m_) return LpResult::failure;
    }

    if (theta < 1e-12) {
      if (++degenerate > kDegenerateBeforeBland) bland = true;
    } else {
      degenerate = 0;
      bland = false;
    }

    const double step = dir * theta;
    if (step != 0.0) {
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = row(i)[q];
        if (a != 0.0) beta_[i] -= a * step;
      }
    }
    if (r == m_) {
      status_[q] = status_[q] == Status::at_lower ? Status::at_upper : Status::at_lower;
      continue;
    }
    const std::size_t h = head_[r];
    const double a = row(r)[q] * dir;
    const double entering_value = value_of(q) + step;
    status_[h] = a > 0.0 ? Status::at_lower : Status::at_upper;
    pivot(r, q);
    beta_[r] = entering_value;
  }
}

bool SimplexEngine::make_dual_feasible() {
  for (std::size_t j = 0; j < width_; ++j) {
    if (status_[j] == Status::basic || lo_[j] == hi_[j]) continue;
    const double dj = d_[j];
    if (status_[j] == Status::at_lower && dj < -tol_.optimality_tol) {
      if (!std::isfinite(hi_[j])) return false;
      const double delta = hi_[j] - lo_[j];
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = row(i)[j];
        if (a != 0.0) beta_[i] -= a * delta;
      }
      status_[j] = Status::at_upper;
    } else if (status_[j] == Status::at_upper && dj > tol_.optimality_tol) {
      const double delta = lo_[j] - hi_[j];
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = row(i)[j];
        if (a != 0.0) beta_[i] -= a * delta;
      }
      status_[j] = Status::at_lower;
    }
  }
  return true;
}

LpResult SimplexEngine::dual() {
  const double ft = tol_.feasibility_tol;
  std::size_t stalled = 0;
  bool bland = false;
  for (;;) {
    if (++iterations_ > iteration_limit_) return LpResult::failure;
    if (since_refactor_ >= kRefactorEvery) {
      if (!refactor()) return LpResult::failure;
      if (!make_dual_feasible()) return LpResult::failure;
    }

    std::size_t r = m_;
    double worst = 0.0;
    bool below = false;
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t h = head_[i];
      double infeas = 0.0;
      bool lowside = false;
      if (beta_[i] < lo_[h] - ft) {
        infeas = lo_[h] - beta_[i];
        lowside = true;
      } else if (beta_[i] > hi_[h] + ft) {
        infeas = beta_[i] - hi_[h];
      } else {
        continue;
      }
      const bool better = bland ? (r == m_ || h < head_[r]) : infeas > worst;
      if (better) {
        worst = infeas;
        r = i;
        below = lowside;
      }
    }
    if (r == m_) return LpResult::optimal;

    const double* pr = row(r);
    // Entering candidates keep the basic variable moving toward its bound.
    auto eligible = [&](std::size_t j, double a) {
      if (status_[j] == Status::basic || lo_[j] == hi_[j] || std::abs(a) < kPivotTol) return false;
      const bool up = status_[j] == Status::at_lower;
      return below ? ((up && a < 0.0) || (!up && a > 0.0)) : ((up && a > 0.0) || (!up && a < 0.0));
    };
    double ratio_max = kInf;
    for (std::size_t j = 0; j < width_; ++j) {
      const double a = pr[j];
      if (!eligible(j, a)) continue;
      ratio_max = std::min(ratio_max, (std::abs(d_[j]) + tol_.optimality_tol) / std::abs(a));
    }
    if (!std::isfinite(ratio_max)) return LpResult::infeasible;
    std::size_t q = n_total_;
    double best_a = 0.0;
    for (std::size_t j = 0; j < width_; ++j) {
      const double a = pr[j];
      if (!eligible(j, a)) continue;
      if (std::abs(d_[j]) / std::abs(a) > ratio_max) continue;
      const bool better = bland ? q == n_total_ : std::abs(a) > best_a;
      if (better) {
        best_a = std::abs(a);
        q = j;
      }
    }
    if (q == n_total_) return LpResult::failure;

    if (std::abs(d_[q]) < 1e-12) {
      if (++stalled > kDegenerateBeforeBland) bland = true;
    } else {
      stalled = 0;
      bland = false;
    }

    const std::size_t h = head_[r];
    const double target = below ? lo_[h] : hi_[h];
    const double delta = (beta_[r] - target) / pr[q];
    const double entering_value = value_of(q) + delta;
    for (std::size_t i = 0; i < m_; ++i) {
      const double a = row(i)[q];
      if (a != 0.0) beta_[i] -= a * delta;
    }
    status_[h] = below ? Status::at_lower : Status::at_upper;
    pivot(r, q);
    beta_[r] = entering_value;
  }
}

LpResult SimplexEngine::finish_phase1() {
  const std::size_t art0 = n_struct_ + n_slack_;
  for (std::size_t i = 0; i < m_; ++i) {
    if (head_[i] >= art0 && beta_[i] > 10.0 * tol_.feasibility_tol) return LpResult::infeasible;
  }
  // Drive zero-level artificials out of the basis; drop redundant rows.
  for (std::size_t i = 0; i < m_;) {
    if (head_[i] < art0) {
      ++i;
      continue;
    }
    const double* t = row(i);
    std::size_t q = n_total_;
    double best = 1e-7;
    for (std::size_t j = 0; j < art0; ++j) {
      if (status_[j] == Status::basic) continue;
      if (std::abs(t[j]) > best) {
        best = std::abs(t[j]);
        q = j;
      }
    }
    if (q == n_total_) {
      status_[head_[i]] = Status::at_lower;
      remove_row(i);
      continue;
    }
    const std::size_t h = head_[i];
    const double delta = (beta_[i] - 0.0) / t[q];
    const double entering_value = value_of(q) + delta;
    for (std::size_t k = 0; k < m_; ++k) {
      const double a = row(k)[q];
      if (a != 0.0) beta_[k] -= a * delta;
    }
    status_[h] = Status::at_lower;
    pivot(i, q);
    beta_[i] = entering_value;
    ++i;
  }
  for (std::size_t a = art0; a < n_total_; ++a) {
    hi_[a] = 0.0;
    status_[a] = Status::at_lower;
  }
  width_ = art0;
  phase1_done_ = true;
  return LpResult::optimal;
}

LpResult SimplexEngine::phase2_from_current() {
  cur_cost_ = &cost_;
  recompute_reduced_costs();
  for (int attempt = 0; attempt < 3; ++attempt) {
    const LpResult res = primal();
    if (res != LpResult::optimal) return res;
    if (residuals_ok()) return res;
    if (!refactor()) return LpResult::failure;
    // Refactoring may leave small primal infeasibilities; repair them.
    if (!make_dual_feasible()) continue;
    const LpResult d = dual();
    if (d != LpResult::optimal) return d;
  }
  return residuals_ok() ? LpResult::optimal : LpResult::failure;
}

LpResult SimplexEngine::solve() {
  if (trivially_infeasible_) return LpResult::infeasible;
  width_ = n_total_;
  build_initial_basis();
  cur_cost_ = &phase1_cost_;
  recompute_reduced_costs();
  const LpResult p1 = primal();
  if (p1 == LpResult::failure) return p1;
  if (p1 == LpResult::unbounded) return LpResult::failure;  // phase 1 is bounded below by 0
  const LpResult fin = finish_phase1();
  if (fin != LpResult::optimal) return fin;
  return phase2_from_current();
}

LpResult SimplexEngine::reoptimize() {
  if (!phase1_done_) return solve();
  if (!make_dual_feasible()) return solve();
  LpResult res = dual();
  if (res == LpResult::infeasible) {
    // Confirm on a fresh factorization before trusting the verdict.
    if (!refactor()) return solve();
    if (!make_dual_feasible()) return solve();
    res = dual();
  }
  if (res == LpResult::failure) {
    if (!refactor() || !make_dual_feasible()) return solve();
    res = dual();
    if (res == LpResult::failure) return solve();
  }
  if (res != LpResult::optimal) return res;
  for (int attempt = 0; attempt < 3; ++attempt) {
    res = primal();
    if (res != LpResult::optimal) return res;
    if (residuals_ok()) return res;
    if (!refactor() || !make_dual_feasible()) return solve();
    res = dual();
    if (res != LpResult::optimal) return res;
  }
  return residuals_ok() ? LpResult::optimal : LpResult::failure;
}

void SimplexEngine::set_bounds(VarId v, double lower, double upper) {
  const auto c = static_cast<std::size_t>(col_pos_.at(v));
  const double before = status_[c] == Status::basic ? 0.0 : value_of(c);
  lo_[c] = lower / col_scale_[c];
  hi_[c] = upper / col_scale_[c];
  if (status_[c] == Status::basic) return;
  if (status_[c] == Status::at_upper && !std::isfinite(upper)) status_[c] = Status::at_lower;
  const double delta = value_of(c) - before;
  if (delta == 0.0 || tab_.empty()) return;
  for (std::size_t i = 0; i < m_; ++i) {
    const double a = row(i)[c];
    if (a != 0.0) beta_[i] -= a * delta;
  }
}

std::vector<double> SimplexEngine::values() const {
  std::vector<double> x(n_total_);
  for (std::size_t j = 0; j < n_total_; ++j) x[j] = status_[j] == Status::basic ? 0.0 : value_of(j);
  for (std::size_t i = 0; i < m_; ++i) x[head_[i]] = beta_[i];
  std::vector<double> out(num_model_vars_, 0.0);
  for (std::size_t v = 0; v < num_model_vars_; ++v) {
    double val = 0.0;
    if (col_pos_[v] >= 0) {
      const auto c = static_cast<std::size_t>(col_pos_[v]);
      val += x[c] * col_scale_[c];
    }
    if (col_neg_[v] >= 0) {
      const auto c = static_cast<std::size_t>(col_neg_[v]);
      val -= x[c] * col_scale_[c];
    }
    out[v] = val;
  }
  return out;
}

double SimplexEngine::objective() const {
  std::vector<double> x(n_total_);
  for (std::size_t j = 0; j < n_total_; ++j) x[j] = status_[j] == Status::basic ? 0.0 : value_of(j);
  for (std::size_t i = 0; i < m_; ++i) x[head_[i]] = beta_[i];
  double acc = 0.0;
  for (std::size_t j = 0; j < n_struct_; ++j) acc += cost_[j] * x[j];
  return obj_sign_ * acc / obj_scale_ + obj_const_;
}

double SimplexEngine::dual_objective() const {
  const std::size_t m = m_;
  // Dense basis matrix B (rows: tableau rows' original rows, cols: basics).
  std::vector<double> B(m * m, 0.0);
  std::vector<std::size_t> col_index(n_total_, m);
  for (std::size_t k = 0; k < m; ++k) col_index[head_[k]] = k;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t o = orig_row_[i];
    for (const auto& [c, a] : orig_rows_[o]) {
      if (col_index[c] < m) B[i * m + col_index[c]] = a;
    }
    const std::size_t art = n_struct_ + n_slack_ + o;
    if (col_index[art] < m) B[i * m + col_index[art]] = art_sign_[o];
  }
  // Solve B^T y = c_B with partial pivoting on the transpose.
  std::vector<double> A(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < m; ++k) A[k * m + i] = B[i * m + k];
  std::vector<double> y(m);
  for (std::size_t k = 0; k < m; ++k) y[k] = cost_[head_[k]];
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < m; ++r)
      if (std::abs(A[r * m + c]) > std::abs(A[p * m + c])) p = r;
    if (std::abs(A[p * m + c]) < 1e-14) return std::nan("");
    if (p != c) {
      for (std::size_t k = 0; k < m; ++k) std::swap(A[p * m + k], A[c * m + k]);
      std::swap(y[p], y[c]);
    }
    for (std::size_t r = c + 1; r < m; ++r) {
      const double f = A[r * m + c] / A[c * m + c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k < m; ++k) A[r * m + k] -= f * A[c * m + k];
      y[r] -= f * y[c];
    }
  }
  for (std::size_t c = m; c-- > 0;) {
    double v = y[c];
    for (std::size_t k = c + 1; k < m; ++k) v -= A[c * m + k] * y[k];
    y[c] = v / A[c * m + c];
  }
  // y is indexed by tableau row; map to original rows.
  std::vector<double> yo(orig_rows_.size(), 0.0);
  for (std::size_t i = 0; i < m; ++i) yo[orig_row_[i]] = y[i];

  // Lagrangian bound: y.b + sum_j min over [lo, hi] of (c_j - y.A_j) x_j.
  std::vector<double> red(n_struct_ + n_slack_, 0.0);
  for (std::size_t j = 0; j < n_struct_; ++j) red[j] = cost_[j];
  double bound = 0.0;
  for (std::size_t o = 0; o < orig_rows_.size(); ++o) {
    if (yo[o] == 0.0) continue;
    bound += yo[o] * orig_rhs_[o];
    for (const auto& [c, a] : orig_rows_[o]) red[c] -= yo[o] * a;
  }
  const double slack_tol = 1e-9;
  for (std::size_t j = 0; j < n_struct_ + n_slack_; ++j) {
    const double dj = red[j];
    if (dj > 0.0) {
      bound += dj * lo_[j];
    } else if (dj < 0.0) {
      if (std::isfinite(hi_[j])) {
        bound += dj * hi_[j];
      } else if (dj < -slack_tol) {
        return -kInf * obj_sign_;
      }
    }
  }
  return obj_sign_ * bound / obj_scale_ + obj_const_;
}

}  // namespace gss::detail
