#include "v2g/simplex.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace v2g {

namespace {

constexpr double kPivotTol = 1e-9;   // minimum |w_i| for a blocking row
constexpr double kDropTol = 1e-12;   // eta sparsification threshold

enum class VarStatus : unsigned char { Basic, AtLower, AtUpper, Free };

struct Eta {
  int pos;
  double pivot;
  std::vector<std::pair<int, double>> other;
};

struct RatioHit {
  enum Kind { Pivot, BoundFlip, None } kind = None;
  double t = kInf;
  int basis_pos = -1;
};

class SimplexSolver {
 public:
  SimplexSolver(const LPModel& model, const SolveSettings& settings)
      : model_(model), st_(settings) {}

  SolveResult run();

 private:
  void presolve();
  void build_columns();
  void initial_basis();
  void refactor();
  Vec btran(const Vec& c_basic) const;
  Vec ftran(int var) const;
  std::optional<int> price(const Vec& y) const;
  RatioHit ratio_test(int q, int sigma, const Vec& w) const;
  void pivot(int q, int sigma, double t, int r, const Vec& w);
  void bound_flip(int q, int sigma, double t, const Vec& w);
  bool loop(int phase);  // returns false on iteration limit
  double current_objective() const;
  void extract(SolveResult& out);

  double col_dot(int var, const Vec& y) const {
    double s = 0.0;
    for (int p = col_ptr_[var]; p < col_ptr_[var + 1]; ++p) s += col_val_[p] * y[col_row_[p]];
    return s;
  }

  const LPModel& model_;
  SolveSettings st_;

  // presolve
  std::vector<int> kept_vars_, kept_rows_;          // internal -> original
  std::vector<int> var_map_, row_map_;              // original -> internal (-1 if removed)
  std::vector<double> fixed_value_;                 // per original var, NaN if kept
  std::vector<double> flip_;                        // per internal row, +-1
  bool presolve_infeasible_ = false;

  // internal problem
  int m_ = 0, ns_ = 0;         // rows, structural columns
  int nart_ = 0;
  Vec b_;                      // internal rhs (flipped, fixed vars substituted)
  std::vector<int> col_ptr_, col_row_;
  std::vector<double> col_val_;
  std::vector<double> lo_, hi_;
  Vec real_cost_, cost_;
  std::vector<double> col_norm_;
  std::vector<char> row_is_eq_;

  // simplex state
  std::vector<VarStatus> status_;
  std::vector<double> xval_;   // nonbasic values
  std::vector<int> basic_var_;
  Vec xB_;
  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;  // transpose() is non-const
  std::vector<Eta> etas_;
  int pivots_since_refactor_ = 0;
  bool bland_ = false;
  int stall_count_ = 0;
  double obj_ = 0.0;
  int iterations_ = 0;
  int phase1_iterations_ = 0;
  double max_residual_ = 0.0;
  std::vector<std::pair<int, int>> pivot_log_;
  SolveStatus status_code_ = SolveStatus::IterationLimit;
};

void SimplexSolver::presolve() {
  const int n = model_.num_vars();
  const int m = model_.num_rows();
  const auto& lo = model_.lower();
  const auto& hi = model_.upper();

  fixed_value_.assign(n, std::numeric_limits<double>::quiet_NaN());
  var_map_.assign(n, -1);
  for (int j = 0; j < n; ++j) {
    if (lo[j] == hi[j]) {
      fixed_value_[j] = lo[j];
    } else {
      var_map_[j] = static_cast<int>(kept_vars_.size());
      kept_vars_.push_back(j);
    }
  }

  // rhs after substituting fixed variables
  Vec rhs = model_.rhs();
  std::vector<int> row_nnz(m, 0);
  const auto& A = model_.matrix();
  for (int j = 0; j < n; ++j) {
    const bool fixed = var_map_[j] < 0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, j); it; ++it) {
      if (fixed)
        rhs[it.row()] -= it.value() * fixed_value_[j];
      else
        ++row_nnz[it.row()];
    }
  }

  row_map_.assign(m, -1);
  const double empty_tol = 1e-9 * (1.0 + (m > 0 ? rhs.cwiseAbs().maxCoeff() : 0.0));
  for (int i = 0; i < m; ++i) {
    if (row_nnz[i] == 0) {
      const double r = rhs[i];
      const RowSense s = model_.senses()[i];
      const bool ok = (s == RowSense::LessEqual && r >= -empty_tol) ||
                      (s == RowSense::GreaterEqual && r <= empty_tol) ||
                      (s == RowSense::Equal && std::abs(r) <= empty_tol);
      if (!ok) presolve_infeasible_ = true;
      continue;
    }
    row_map_[i] = static_cast<int>(kept_rows_.size());
    kept_rows_.push_back(i);
  }

  m_ = static_cast<int>(kept_rows_.size());
  ns_ = static_cast<int>(kept_vars_.size());
  b_.resize(m_);
  flip_.resize(m_);
  row_is_eq_.resize(m_);
  for (int i = 0; i < m_; ++i) {
    const int oi = kept_rows_[i];
    const RowSense s = model_.senses()[oi];
    flip_[i] = (s == RowSense::GreaterEqual) ? -1.0 : 1.0;
    row_is_eq_[i] = (s == RowSense::Equal) ? 1 : 0;
    b_[i] = flip_[i] * rhs[oi];
  }
}

void SimplexSolver::build_columns() {
  const auto& A = model_.matrix();
  col_ptr_.assign(1, 0);
  // structural columns (flipped rows applied)
  for (int jj = 0; jj < ns_; ++jj) {
    const int j = kept_vars_[jj];
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, j); it; ++it) {
      const int ri = row_map_[it.row()];
      if (ri < 0) continue;
      col_row_.push_back(ri);
      col_val_.push_back(flip_[ri] * it.value());
    }
    col_ptr_.push_back(static_cast<int>(col_row_.size()));
  }
  // slack columns
  for (int i = 0; i < m_; ++i) {
    col_row_.push_back(i);
    col_val_.push_back(1.0);
    col_ptr_.push_back(static_cast<int>(col_row_.size()));
  }

  lo_.resize(ns_ + m_);
  hi_.resize(ns_ + m_);
  real_cost_ = Vec::Zero(ns_ + m_);
  for (int jj = 0; jj < ns_; ++jj) {
    lo_[jj] = model_.lower()[kept_vars_[jj]];
    hi_[jj] = model_.upper()[kept_vars_[jj]];
    real_cost_[jj] = model_.objective()[kept_vars_[jj]];
  }
  for (int i = 0; i < m_; ++i) {
    lo_[ns_ + i] = 0.0;
    hi_[ns_ + i] = row_is_eq_[i] ? 0.0 : kInf;
  }

  col_norm_.resize(ns_ + m_);
  for (int j = 0; j < ns_ + m_; ++j) {
    double s = 1.0;
    for (int p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) s += col_val_[p] * col_val_[p];
    col_norm_[j] = std::sqrt(s);
  }
}

void SimplexSolver::initial_basis() {
  const int n_total = ns_ + m_;
  status_.assign(n_total, VarStatus::AtLower);
  xval_.assign(n_total, 0.0);
  for (int j = 0; j < n_total; ++j) {
    if (std::isfinite(lo_[j])) {
      status_[j] = VarStatus::AtLower;
      xval_[j] = lo_[j];
    } else if (std::isfinite(hi_[j])) {
      status_[j] = VarStatus::AtUpper;
      xval_[j] = hi_[j];
    } else {
      status_[j] = VarStatus::Free;
      xval_[j] = 0.0;
    }
  }

  Vec r = b_;
  for (int j = 0; j < n_total; ++j) {
    if (xval_[j] == 0.0) continue;
    for (int p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) r[col_row_[p]] -= col_val_[p] * xval_[j];
  }

  basic_var_.assign(m_, -1);
  xB_.resize(m_);
  nart_ = 0;
  for (int i = 0; i < m_; ++i) {
    const int s = ns_ + i;
    const bool slack_ok = row_is_eq_[i] ? std::abs(r[i]) <= st_.feas_tol : r[i] >= -st_.feas_tol;
    if (slack_ok) {
      basic_var_[i] = s;
      xB_[i] = row_is_eq_[i] ? 0.0 : std::max(r[i], 0.0);
      status_[s] = VarStatus::Basic;
    } else {
      // artificial column +-e_i carrying the residual
      const double coef = (r[i] >= 0.0) ? 1.0 : -1.0;
      col_row_.push_back(i);
      col_val_.push_back(coef);
      col_ptr_.push_back(static_cast<int>(col_row_.size()));
      lo_.push_back(0.0);
      hi_.push_back(kInf);
      col_norm_.push_back(std::sqrt(2.0));
      status_.push_back(VarStatus::Basic);
      xval_.push_back(0.0);
      const int a = n_total + nart_;
      basic_var_[i] = a;
      xB_[i] = std::abs(r[i]);
      ++nart_;
    }
  }
  real_cost_.conservativeResize(n_total + nart_);
  real_cost_.tail(nart_).setZero();
}

void SimplexSolver::refactor() {
  Eigen::SparseMatrix<double> B(m_, m_);
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < m_; ++i) {
    const int j = basic_var_[i];
    for (int p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p)
      trip.emplace_back(col_row_[p], i, col_val_[p]);
  }
  B.setFromTriplets(trip.begin(), trip.end());
  B.makeCompressed();
  lu_.compute(B);
  if (lu_.info() != Eigen::Success)
    throw std::runtime_error("simplex: singular basis during refactorization");

  Vec b_tilde = b_;
  const int n_total = static_cast<int>(lo_.size());
  for (int j = 0; j < n_total; ++j) {
    if (status_[j] == VarStatus::Basic || xval_[j] == 0.0) continue;
    for (int p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p)
      b_tilde[col_row_[p]] -= col_val_[p] * xval_[j];
  }
  xB_ = lu_.solve(b_tilde);

  // residual = B xB - b_tilde
  Vec residual = Vec::Zero(m_);
  for (int i = 0; i < m_; ++i) {
    const int j = basic_var_[i];
    for (int p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p)
      residual[col_row_[p]] += col_val_[p] * xB_[i];
  }
  residual -= b_tilde;
  max_residual_ = std::max(max_residual_, residual.cwiseAbs().maxCoeff());

  etas_.clear();
  pivots_since_refactor_ = 0;
  obj_ = current_objective();
}

Vec SimplexSolver::btran(const Vec& c_basic) const {
  Vec u = c_basic;
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double s = u[it->pos];
    for (const auto& [i, w] : it->other) s -= w * u[i];
    u[it->pos] = s / it->pivot;
  }
  return lu_.transpose().solve(u);
}

Vec SimplexSolver::ftran(int var) const {
  Vec rhs = Vec::Zero(m_);
  for (int p = col_ptr_[var]; p < col_ptr_[var + 1]; ++p) rhs[col_row_[p]] = col_val_[p];
  Vec v = lu_.solve(rhs);
  for (const auto& eta : etas_) {
    const double vp = v[eta.pos] / eta.pivot;
    v[eta.pos] = vp;
    if (vp != 0.0)
      for (const auto& [i, w] : eta.other) v[i] -= w * vp;
  }
  return v;
}

std::optional<int> SimplexSolver::price(const Vec& y) const {
  const int n_total = static_cast<int>(lo_.size());
  const double cost_scale = std::max(1.0, cost_.cwiseAbs().maxCoeff());
  const double dtol = st_.opt_tol * cost_scale;

  int best = -1;
  double best_score = 0.0;
  for (int j = 0; j < n_total; ++j) {
    if (status_[j] == VarStatus::Basic || lo_[j] == hi_[j]) continue;
    const double d = cost_[j] - col_dot(j, y);
    bool eligible = false;
    switch (status_[j]) {
      case VarStatus::AtLower: eligible = d < -dtol; break;
      case VarStatus::AtUpper: eligible = d > dtol; break;
      case VarStatus::Free: eligible = std::abs(d) > dtol; break;
      case VarStatus::Basic: break;
    }
    if (!eligible) continue;
    if (bland_) return j;  // lowest-index rule
    const double score = std::abs(d) / col_norm_[j];
    if (score > best_score) {
      best_score = score;
      best = j;
    }
  }
  if (best < 0) return std::nullopt;
  return best;
}

RatioHit SimplexSolver::ratio_test(int q, int sigma, const Vec& w) const {
  RatioHit hit;
  if (std::isfinite(lo_[q]) && std::isfinite(hi_[q])) {
    hit.kind = RatioHit::BoundFlip;
    hit.t = hi_[q] - lo_[q];
  }

  double t_min = hit.t;
  for (int i = 0; i < m_; ++i) {
    const double wh = sigma * w[i];
    if (std::abs(wh) <= kPivotTol) continue;
    const int bj = basic_var_[i];
    double t;
    if (wh > 0.0) {
      if (!std::isfinite(lo_[bj])) continue;
      t = (xB_[i] - lo_[bj]) / wh;
    } else {
      if (!std::isfinite(hi_[bj])) continue;
      t = (xB_[i] - hi_[bj]) / wh;
    }
    t = std::max(t, 0.0);
    if (t < t_min) t_min = t;
  }
  if (!std::isfinite(t_min)) return hit;  // None or BoundFlip at infinity

  // choose the leaving row among near-ties
  const double tie = bland_ ? 0.0 : 1e-9 * (1.0 + std::abs(t_min));
  int best_row = -1;
  double best_pivot = 0.0;
  int best_var = std::numeric_limits<int>::max();
  for (int i = 0; i < m_; ++i) {
    const double wh = sigma * w[i];
    if (std::abs(wh) <= kPivotTol) continue;
    const int bj = basic_var_[i];
    double t;
    if (wh > 0.0) {
      if (!std::isfinite(lo_[bj])) continue;
      t = (xB_[i] - lo_[bj]) / wh;
    } else {
      if (!std::isfinite(hi_[bj])) continue;
      t = (xB_[i] - hi_[bj]) / wh;
    }
    t = std::max(t, 0.0);
    if (t > t_min + tie) continue;
    if (bland_) {
      if (bj < best_var) {
        best_var = bj;
        best_row = i;
      }
    } else if (std::abs(w[i]) > best_pivot) {
      best_pivot = std::abs(w[i]);
      best_row = i;
    }
  }

  if (best_row >= 0) {
    hit.kind = RatioHit::Pivot;
    hit.t = t_min;
    hit.basis_pos = best_row;
  }
  return hit;
}

void SimplexSolver::pivot(int q, int sigma, double t, int r, const Vec& w) {
  const double x_enter = xval_[q] + sigma * t;
  if (t != 0.0)
    for (int i = 0; i < m_; ++i) xB_[i] -= t * sigma * w[i];

  const int leaving = basic_var_[r];
  if (sigma * w[r] > 0.0) {
    status_[leaving] = VarStatus::AtLower;
    xval_[leaving] = lo_[leaving];
  } else {
    status_[leaving] = VarStatus::AtUpper;
    xval_[leaving] = hi_[leaving];
  }

  basic_var_[r] = q;
  status_[q] = VarStatus::Basic;
  xB_[r] = x_enter;

  Eta eta;
  eta.pos = r;
  eta.pivot = w[r];
  for (int i = 0; i < m_; ++i)
    if (i != r && std::abs(w[i]) > kDropTol) eta.other.emplace_back(i, w[i]);
  etas_.push_back(std::move(eta));
  ++pivots_since_refactor_;
  if (st_.record_pivots) pivot_log_.emplace_back(q, leaving);
}

void SimplexSolver::bound_flip(int q, int sigma, double t, const Vec& w) {
  if (t != 0.0)
    for (int i = 0; i < m_; ++i) xB_[i] -= t * sigma * w[i];
  if (sigma > 0) {
    status_[q] = VarStatus::AtUpper;
    xval_[q] = hi_[q];
  } else {
    status_[q] = VarStatus::AtLower;
    xval_[q] = lo_[q];
  }
}

double SimplexSolver::current_objective() const {
  double v = 0.0;
  const int n_total = static_cast<int>(lo_.size());
  for (int j = 0; j < n_total; ++j)
    if (status_[j] != VarStatus::Basic) v += cost_[j] * xval_[j];
  for (int i = 0; i < m_; ++i) v += cost_[basic_var_[i]] * xB_[i];
  return v;
}

bool SimplexSolver::loop(int phase) {
  refactor();
  bland_ = st_.pivot_rule == PivotRule::Bland;
  stall_count_ = 0;

  Vec c_basic(m_);
  while (true) {
    if (iterations_ >= st_.max_iters) return false;
    if (pivots_since_refactor_ >= st_.refactor_interval) refactor();

    for (int i = 0; i < m_; ++i) c_basic[i] = cost_[basic_var_[i]];
    const Vec y = btran(c_basic);
    const auto q_opt = price(y);
    if (!q_opt) return true;  // phase optimal
    const int q = *q_opt;
    const double d = cost_[q] - col_dot(q, y);
    const int sigma = (status_[q] == VarStatus::AtUpper || (status_[q] == VarStatus::Free && d > 0.0)) ? -1 : 1;

    const Vec w = ftran(q);
    const RatioHit hit = ratio_test(q, sigma, w);
    if (hit.kind == RatioHit::None) {
      if (pivots_since_refactor_ > 0) {  // rule out a stale factorization first
        refactor();
        continue;
      }
      if (phase == 1) throw std::runtime_error("simplex: unbounded phase-1 subproblem");
      status_code_ = SolveStatus::Unbounded;
      return true;
    }

    ++iterations_;
    if (phase == 1) ++phase1_iterations_;
    const double delta_obj = d * sigma * hit.t;
    if (delta_obj > -1e-13 * (1.0 + std::abs(obj_))) {
      if (++stall_count_ >= st_.stall_pivots) bland_ = true;
    } else {
      stall_count_ = 0;
      // a strict decrease separates Bland episodes: no earlier basis can recur
      if (bland_ && st_.pivot_rule != PivotRule::Bland) bland_ = false;
    }
    obj_ += delta_obj;

    if (hit.kind == RatioHit::BoundFlip)
      bound_flip(q, sigma, hit.t, w);
    else
      pivot(q, sigma, hit.t, hit.basis_pos, w);
  }
}

void SimplexSolver::extract(SolveResult& out) {
  const int n = model_.num_vars();
  const int m = model_.num_rows();
  out.primal = Vec::Zero(n);
  for (int j = 0; j < n; ++j)
    if (var_map_[j] < 0) out.primal[j] = fixed_value_[j];
  for (int jj = 0; jj < ns_; ++jj)
    out.primal[kept_vars_[jj]] = (status_[jj] == VarStatus::Basic) ? 0.0 : xval_[jj];
  for (int i = 0; i < m_; ++i)
    if (basic_var_[i] < ns_) out.primal[kept_vars_[basic_var_[i]]] = xB_[i];

  // duals with real costs, mapped back to the original row orientation
  out.dual = Vec::Zero(m);
  if (m_ > 0) {
    Vec c_basic(m_);
    for (int i = 0; i < m_; ++i) c_basic[i] = real_cost_[basic_var_[i]];
    const Vec y = btran(c_basic);
    for (int i = 0; i < m_; ++i) out.dual[kept_rows_[i]] = flip_[i] * y[i];
  }

  out.reduced_costs = model_.objective();
  const auto& A = model_.matrix();
  for (int j = 0; j < n; ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, j); it; ++it)
      out.reduced_costs[j] -= it.value() * out.dual[it.row()];

  out.objective = model_.objective().dot(out.primal) + model_.objective_constant;
  out.iterations = iterations_;
  out.phase1_iterations = phase1_iterations_;
  out.max_refactor_residual = max_residual_;
  out.pivot_log = pivot_log_;
}

SolveResult SimplexSolver::run() {
  st_.validate();
  SolveResult out;
  presolve();
  if (presolve_infeasible_) {
    out.status = SolveStatus::Infeasible;
    return out;
  }

  build_columns();
  initial_basis();
  status_code_ = SolveStatus::Optimal;

  if (m_ > 0) {
    if (nart_ > 0) {
      cost_ = Vec::Zero(lo_.size());
      cost_.tail(nart_).setOnes();
      if (!loop(1)) {
        out.status = SolveStatus::IterationLimit;
        extract(out);
        return out;
      }
      const double p1 = current_objective();
      if (p1 > 1e-6 * (1.0 + b_.cwiseAbs().maxCoeff())) {
        out.status = SolveStatus::Infeasible;
        out.iterations = iterations_;
        out.phase1_iterations = phase1_iterations_;
        return out;
      }
      // artificials are pinned at zero for phase 2
      for (int a = ns_ + m_; a < static_cast<int>(lo_.size()); ++a) hi_[a] = 0.0;
    }

    cost_ = real_cost_;
    if (!loop(2)) {
      out.status = SolveStatus::IterationLimit;
      extract(out);
      return out;
    }
    if (status_code_ == SolveStatus::Unbounded) {
      out.status = SolveStatus::Unbounded;
      out.iterations = iterations_;
      return out;
    }
  } else {
    // no rows left: each variable sits at its cheapest bound
    for (int jj = 0; jj < ns_; ++jj) {
      const double c = real_cost_[jj];
      if (c > 0.0) {
        if (!std::isfinite(lo_[jj])) { out.status = SolveStatus::Unbounded; return out; }
        status_[jj] = VarStatus::AtLower; xval_[jj] = lo_[jj];
      } else if (c < 0.0) {
        if (!std::isfinite(hi_[jj])) { out.status = SolveStatus::Unbounded; return out; }
        status_[jj] = VarStatus::AtUpper; xval_[jj] = hi_[jj];
      }
    }
  }

  out.status = SolveStatus::Optimal;
  extract(out);
  return out;
}

}  // namespace

SolveResult solve(const LPModel& model, const SolveSettings& settings) {
  if (!model.finalized()) throw std::logic_error("solve: model must be finalized");
  SimplexSolver solver(model, settings);
  return solver.run();
}

CertificateReport certify(const LPModel& model, const SolveResult& result,
                          const SolveSettings& settings) {
  CertificateReport rep;
  if (result.status != SolveStatus::Optimal) {
    rep.failures.push_back("result status is not optimal; refusing to certify");
    return rep;
  }

  const int n = model.num_vars();
  const int m = model.num_rows();
  const Vec& x = result.primal;
  const Vec& y = result.dual;
  const double rhs_scale = 1.0 + (m > 0 ? model.rhs().cwiseAbs().maxCoeff() : 0.0);
  const double feas_thresh = std::max(1e-7, 100.0 * settings.feas_tol) * rhs_scale;
  const double dual_thresh = 1e-7 * (1.0 + (m > 0 ? y.cwiseAbs().maxCoeff() : 0.0));

  const Vec activity = model.row_activities(x);
  for (int i = 0; i < m; ++i) {
    const double a = activity[i], b = model.rhs()[i];
    double viol = 0.0;
    switch (model.senses()[i]) {
      case RowSense::LessEqual: viol = a - b; break;
      case RowSense::GreaterEqual: viol = b - a; break;
      case RowSense::Equal: viol = std::abs(a - b); break;
    }
    rep.max_primal_residual = std::max(rep.max_primal_residual, viol);
  }
  if (rep.max_primal_residual > feas_thresh)
    rep.failures.push_back("primal row residual exceeds tolerance");

  for (int j = 0; j < n; ++j) {
    const double below = model.lower()[j] - x[j];
    const double above = x[j] - model.upper()[j];
    rep.max_bound_violation = std::max({rep.max_bound_violation, below, above});
  }
  if (rep.max_bound_violation > feas_thresh)
    rep.failures.push_back("variable bound violation exceeds tolerance");

  // dual sign conditions: <= rows need y <= 0, >= rows need y >= 0 (min problem)
  for (int i = 0; i < m; ++i) {
    double viol = 0.0;
    if (model.senses()[i] == RowSense::LessEqual) viol = y[i];
    if (model.senses()[i] == RowSense::GreaterEqual) viol = -y[i];
    rep.max_dual_violation = std::max(rep.max_dual_violation, viol);
  }

  // reduced-cost signs and the bound contribution to the dual objective
  const Vec& d = result.reduced_costs;
  double dual_obj = (m > 0) ? model.rhs().dot(y) : 0.0;
  const double at_tol = 1e-6;
  for (int j = 0; j < n; ++j) {
    const double lo = model.lower()[j], hi = model.upper()[j];
    const bool at_lo = std::isfinite(lo) && x[j] <= lo + at_tol * (1.0 + std::abs(lo));
    const bool at_hi = std::isfinite(hi) && x[j] >= hi - at_tol * (1.0 + std::abs(hi));
    if (d[j] > dual_thresh) {
      if (!at_lo) rep.max_dual_violation = std::max(rep.max_dual_violation, d[j]);
      if (std::isfinite(lo)) dual_obj += d[j] * lo;
    } else if (d[j] < -dual_thresh) {
      if (!at_hi) rep.max_dual_violation = std::max(rep.max_dual_violation, -d[j]);
      if (std::isfinite(hi)) dual_obj += d[j] * hi;
    }
  }
  if (rep.max_dual_violation > dual_thresh)
    rep.failures.push_back("dual sign condition violated");

  const double primal_obj = model.objective().dot(x);
  rep.relative_gap = std::abs(primal_obj - dual_obj) / (1.0 + std::abs(primal_obj));
  if (rep.relative_gap > 1e-7)
    rep.failures.push_back("duality gap exceeds 1e-7");

  rep.ok = rep.failures.empty();
  return rep;
}

}  // namespace v2g
