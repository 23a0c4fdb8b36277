#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>

#include "omla/error.hpp"
#include "omla/simplex.hpp"

namespace omla::simplex {

std::string to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

namespace {

using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Vec = Eigen::VectorXd;

/// One product-form update: basis position `pos` was replaced, `alpha` is the
/// entering column expressed in the previous basis.
struct Eta {
  int pos = 0;
  double pivot = 1.0;
  std::vector<int> idx;  // excludes pos
  std::vector<double> val;
};

class RevisedSimplex {
 public:
  RevisedSimplex(const SparseLp& lp, const Options& opt) : lp_(lp), opt_(opt), m_(lp.rows), n_(lp.cols) {
    // Filtered copy of A so negligible entries never enter the basis.
    col_start_.assign(n_ + 1, 0);
    for (int j = 0; j < n_; ++j) {
      for (int k = lp.col_start[j]; k < lp.col_start[j + 1]; ++k) {
        if (std::abs(lp.value[k]) <= opt.drop_tol) continue;
        rows_.push_back(lp.row_index[k]);
        vals_.push_back(lp.value[k]);
      }
      col_start_[j + 1] = static_cast<int>(rows_.size());
    }
    head_.resize(m_);
    where_.assign(n_ + m_, -1);
    for (int i = 0; i < m_; ++i) {
      head_[i] = n_ + i;
      where_[n_ + i] = i;
    }
    xb_.assign(lp.b.begin(), lp.b.end());
  }

  Result run() {
    Result res;
    refactor();
    int degenerate_run = 0;
    bool bland = false;
    Vec y(m_), alpha(m_);
    std::vector<double> cb(m_);

    for (std::int64_t iter = 0;; ++iter) {
      if (iter >= opt_.max_iterations) {
        res.status = Status::iteration_limit;
        res.iterations = iter;
        break;
      }
      if (static_cast<int>(etas_.size()) >= opt_.refactor_interval) refactor();

      for (int i = 0; i < m_; ++i) cb[i] = cost(head_[i]);
      btran(cb, y);

      const int q = choose_entering(y, bland);
      if (q < 0) {
        res.status = Status::optimal;
        res.iterations = iter;
        break;
      }
      column(q, alpha);
      ftran(alpha);

      const int p = bland ? ratio_bland(alpha) : ratio_harris(alpha);
      if (p < 0) {
        res.status = Status::unbounded;
        res.iterations = iter;
        break;
      }
      const double step = std::max(xb_[p], 0.0) / alpha[p];
      if (step <= opt_.feasibility_tol) {
        if (++degenerate_run >= opt_.degenerate_switch) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
      pivot(p, q, step, alpha);
    }

    res.x.assign(n_, 0.0);
    for (int i = 0; i < m_; ++i)
      if (head_[i] < n_) res.x[head_[i]] = std::max(xb_[i], 0.0);
    double obj = 0.0;
    for (int j = 0; j < n_; ++j) obj += lp_.c[j] * res.x[j];
    res.objective = obj;
    return res;
  }

 private:
  double cost(int var) const { return var < n_ ? lp_.c[var] : 0.0; }

  void column(int var, Vec& out) const {
    out.setZero();
    if (var >= n_) {
      out[var - n_] = 1.0;
      return;
    }
    for (int k = col_start_[var]; k < col_start_[var + 1]; ++k) out[rows_[k]] = vals_[k];
  }

  void refactor() {
    std::vector<Eigen::Triplet<double, int>> trips;
    for (int i = 0; i < m_; ++i) {
      const int var = head_[i];
      if (var >= n_) {
        trips.emplace_back(var - n_, i, 1.0);
      } else {
        for (int k = col_start_[var]; k < col_start_[var + 1]; ++k) trips.emplace_back(rows_[k], i, vals_[k]);
      }
    }
    SpMat basis(m_, m_);
    basis.setFromTriplets(trips.begin(), trips.end());
    basis.makeCompressed();
    lu_.analyzePattern(basis);
    lu_.factorize(basis);
    require(lu_.info() == Eigen::Success, ErrorKind::contract_violation, "simplex basis became singular");
    etas_.clear();

    Vec rhs = Eigen::Map<const Vec>(lp_.b.data(), m_);
    Vec sol = lu_.solve(rhs);
    for (int i = 0; i < m_; ++i) xb_[i] = sol[i] < 0.0 && sol[i] > -opt_.feasibility_tol ? 0.0 : sol[i];
  }

  void ftran(Vec& v) const {
    v = lu_.solve(v).eval();
    for (const Eta& e : etas_) {
      const double zp = v[e.pos] / e.pivot;
      if (zp != 0.0)
        for (std::size_t k = 0; k < e.idx.size(); ++k) v[e.idx[k]] -= e.val[k] * zp;
      v[e.pos] = zp;
    }
  }

  void btran(const std::vector<double>& cb, Vec& y) const {
    Vec w = Eigen::Map<const Vec>(cb.data(), m_);
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double s = w[it->pos];
      for (std::size_t k = 0; k < it->idx.size(); ++k) s -= w[it->idx[k]] * it->val[k];
      w[it->pos] = s / it->pivot;
    }
    y = lu_.transpose().solve(w);
  }

  int choose_entering(const Vec& y, bool bland) const {
    int best = -1;
    double best_d = opt_.optimality_tol;
    for (int j = 0; j < n_ + m_; ++j) {
      if (where_[j] >= 0) continue;
      double d;
      if (j < n_) {
        d = lp_.c[j];
        for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) d -= y[rows_[k]] * vals_[k];
      } else {
        d = -y[j - n_];
      }
      if (d > best_d) {
        best = j;
        if (bland) return best;
        best_d = d;
      }
    }
    return best;
  }

  int ratio_harris(const Vec& alpha) const {
    double bound = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m_; ++i)
      if (alpha[i] > opt_.pivot_tol) bound = std::min(bound, (std::max(xb_[i], 0.0) + opt_.feasibility_tol) / alpha[i]);
    if (!std::isfinite(bound)) return -1;
    int best = -1;
    double best_alpha = 0.0;
    for (int i = 0; i < m_; ++i) {
      if (alpha[i] <= opt_.pivot_tol) continue;
      if (std::max(xb_[i], 0.0) / alpha[i] <= bound && alpha[i] > best_alpha) {
        best = i;
        best_alpha = alpha[i];
      }
    }
    return best;
  }

  int ratio_bland(const Vec& alpha) const {
    int best = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m_; ++i) {
      if (alpha[i] <= opt_.pivot_tol) continue;
      const double r = std::max(xb_[i], 0.0) / alpha[i];
      if (r < best_ratio - 1e-12) {
        best = i;
        best_ratio = r;
      } else if (r <= best_ratio + 1e-12 && head_[i] < head_[best]) {
        best = i;
        best_ratio = std::min(best_ratio, r);
      }
    }
    return best;
  }

  void pivot(int p, int q, double step, const Vec& alpha) {
    for (int i = 0; i < m_; ++i) {
      if (i == p || alpha[i] == 0.0) continue;
      xb_[i] -= step * alpha[i];
      if (xb_[i] < 0.0 && xb_[i] > -opt_.feasibility_tol) xb_[i] = 0.0;
    }
    xb_[p] = step;

    Eta eta;
    eta.pos = p;
    eta.pivot = alpha[p];
    for (int i = 0; i < m_; ++i) {
      if (i == p || std::abs(alpha[i]) <= 1e-14) continue;
      eta.idx.push_back(i);
      eta.val.push_back(alpha[i]);
    }
    etas_.push_back(std::move(eta));

    where_[head_[p]] = -1;
    head_[p] = q;
    where_[q] = p;
  }

  const SparseLp& lp_;
  Options opt_;
  int m_;
  int n_;
  std::vector<int> col_start_;
  std::vector<int> rows_;
  std::vector<double> vals_;
  std::vector<int> head_;   // basis position -> variable
  std::vector<int> where_;  // variable -> basis position or -1
  std::vector<double> xb_;
  mutable Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<Eta> etas_;
};

void check_shape(const SparseLp& lp) {
  require(static_cast<int>(lp.c.size()) == lp.cols && static_cast<int>(lp.b.size()) == lp.rows &&
              static_cast<int>(lp.col_start.size()) == lp.cols + 1,
          ErrorKind::invalid_argument, "malformed sparse LP");
  for (double bi : lp.b)
    require(bi >= 0.0, ErrorKind::invalid_argument, "simplex solvers require nonnegative right-hand sides");
}

}  // namespace

Result revised_simplex(const SparseLp& lp, const Options& opt) {
  check_shape(lp);
  if (lp.rows == 0) {
    Result r;
    r.x.assign(lp.cols, 0.0);
    for (int j = 0; j < lp.cols; ++j)
      if (lp.c[j] > opt.optimality_tol) {
        r.status = Status::unbounded;
        return r;
      }
    r.status = Status::optimal;
    return r;
  }
  return RevisedSimplex(lp, opt).run();
}

Result dense_tableau(const SparseLp& lp, const Options& opt) {
  check_shape(lp);
  const int m = lp.rows;
  const int n = lp.cols;
  const int w = n + m + 1;  // structural, slack, rhs
  // Row m is the reduced-cost row: entries are c_j - z_j.
  std::vector<double> tab(static_cast<std::size_t>(m + 1) * w, 0.0);
  auto at = [&](int r, int c) -> double& { return tab[static_cast<std::size_t>(r) * w + c]; };
  for (int j = 0; j < n; ++j) {
    for (int k = lp.col_start[j]; k < lp.col_start[j + 1]; ++k)
      if (std::abs(lp.value[k]) > opt.drop_tol) at(lp.row_index[k], j) += lp.value[k];
    at(m, j) = lp.c[j];
  }
  std::vector<int> head(m);
  for (int i = 0; i < m; ++i) {
    at(i, n + i) = 1.0;
    at(i, w - 1) = lp.b[i];
    head[i] = n + i;
  }

  Result res;
  int degenerate_run = 0;
  bool bland = false;
  for (std::int64_t iter = 0;; ++iter) {
    if (iter >= opt.max_iterations) {
      res.status = Status::iteration_limit;
      res.iterations = iter;
      break;
    }
    int q = -1;
    double best = opt.optimality_tol;
    for (int j = 0; j < n + m; ++j) {
      if (at(m, j) > best) {
        q = j;
        if (bland) break;
        best = at(m, j);
      }
    }
    if (q < 0) {
      res.status = Status::optimal;
      res.iterations = iter;
      break;
    }
    int p = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      const double a = at(i, q);
      if (a <= opt.pivot_tol) continue;
      const double r = std::max(at(i, w - 1), 0.0) / a;
      const bool tie = p >= 0 && std::abs(r - best_ratio) <= 1e-12;
      if (r < best_ratio - 1e-12 || (tie && (bland ? head[i] < head[p] : a > at(p, q)))) {
        best_ratio = std::min(best_ratio, r);
        p = i;
      }
    }
    if (p < 0) {
      res.status = Status::unbounded;
      res.iterations = iter;
      break;
    }
    if (best_ratio <= opt.feasibility_tol) {
      if (++degenerate_run >= opt.degenerate_switch) bland = true;
    } else {
      degenerate_run = 0;
      bland = false;
    }
    const double piv = at(p, q);
    for (int c = 0; c < w; ++c) at(p, c) /= piv;
    for (int r = 0; r <= m; ++r) {
      if (r == p) continue;
      const double f = at(r, q);
      if (f == 0.0) continue;
      for (int c = 0; c < w; ++c) at(r, c) -= f * at(p, c);
    }
    head[p] = q;
  }
  res.x.assign(n, 0.0);
  for (int i = 0; i < m; ++i)
    if (head[i] < n) res.x[head[i]] = std::max(at(i, w - 1), 0.0);
  for (int j = 0; j < n; ++j) res.objective += lp.c[j] * res.x[j];
  return res;
}

}  // namespace omla::simplex
