#pragma once

// Dense bounded-variable primal simplex.
//
// Problems are stated over original variables with arbitrary (possibly
// infinite) bounds and {<=, =, >=} rows.  Internally every variable is shifted
// or split so that it lives in [0, u], rows are equilibrated to unit max-norm,
// and a two-phase method with artificials runs on a dense tableau.  Pricing is
// Dantzig's rule; after 2(m+n) consecutive degenerate pivots the solver falls
// back to Bland's rule until a nondegenerate step is made.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nfvchain::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Relation { less_equal, equal, greater_equal };

enum class Status { optimal, infeasible, unbounded, iteration_limit };

inline std::string to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::iteration_limit: return "iteration-limit";
  }
  return "unknown";
}

struct Term {
  std::size_t var;
  double coef;
};

struct Constraint {
  std::vector<Term> terms;
  Relation relation = Relation::less_equal;
  double rhs = 0.0;
  std::string name;
};

struct Problem {
  std::vector<double> objective;  // minimized
  double offset = 0.0;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<Constraint> constraints;

  std::size_t num_variables() const { return objective.size(); }

  std::size_t add_variable(double cost, double lo = 0.0, double hi = kInfinity) {
    objective.push_back(cost);
    lower.push_back(lo);
    upper.push_back(hi);
    return objective.size() - 1;
  }

  void add_constraint(std::vector<Term> terms, Relation rel, double rhs,
                      std::string name = {}) {
    constraints.push_back(Constraint{std::move(terms), rel, rhs, std::move(name)});
  }

  // Throws std::invalid_argument on dimension mismatch or non-finite data.
  void validate() const {
    const std::size_t n = objective.size();
    if (lower.size() != n || upper.size() != n)
      throw std::invalid_argument("lp: bound vectors do not match objective dimension");
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(objective[j]))
        throw std::invalid_argument("lp: non-finite objective coefficient");
      if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] == kInfinity ||
          upper[j] == -kInfinity)
        throw std::invalid_argument("lp: invalid variable bound");
    }
    for (const auto& c : constraints) {
      if (!std::isfinite(c.rhs)) throw std::invalid_argument("lp: non-finite rhs");
      for (const auto& t : c.terms) {
        if (t.var >= n) throw std::invalid_argument("lp: constraint references unknown variable");
        if (!std::isfinite(t.coef)) throw std::invalid_argument("lp: non-finite coefficient");
      }
    }
  }
};

struct Options {
  double pivot_tolerance = 1e-9;
  double optimality_tolerance = 1e-9;
  double feasibility_tolerance = 1e-6;
  std::size_t max_iterations = 0;  // 0 selects 50*(rows+columns) + 10000
};

struct Solution {
  Status status = Status::infeasible;
  std::vector<double> x;
  double objective_value = 0.0;
  std::size_t iterations = 0;
  // Row multipliers y for the Lagrangian c'x - y'(Ax - b); y <= 0 on <= rows,
  // y >= 0 on >= rows at optimality.
  std::vector<double> duals;
  // Internal column indices of the final basis, one per active row.
  std::vector<std::size_t> basis;
};

namespace detail {

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

struct VariableMap {
  std::size_t col = npos;
  std::size_t neg_col = npos;  // set for free variables: x = x+ - x-
  double sign = 1.0;
  double shift = 0.0;
};

class Simplex {
 public:
  Simplex(const Problem& p, const Options& opt) : p_(p), opt_(opt) {}

  Solution run() {
    Solution out;
    if (!build(out)) return out;

    const std::size_t budget =
        opt_.max_iterations ? opt_.max_iterations : 50 * (m_ + ncols_) + 10000;

    // Phase 1: minimize the sum of artificials.
    std::vector<double> phase1(ncols_, 0.0);
    for (std::size_t k = art_begin_; k < ncols_; ++k) phase1[k] = 1.0;
    price(phase1);
    Status s = iterate(budget, /*allow_artificial=*/true);
    if (s == Status::iteration_limit) return finish(out, s);
    double infeas = 0.0;
    for (std::size_t r = 0; r < m_; ++r)
      if (basis_[r] >= art_begin_) infeas += std::max(0.0, xb_[r]);
    if (infeas > opt_.feasibility_tolerance) return finish(out, Status::infeasible);

    // Phase 2: artificials are pinned at zero and never re-enter.
    for (std::size_t k = art_begin_; k < ncols_; ++k) upper_[k] = 0.0;
    price(cost_);
    s = iterate(budget, /*allow_artificial=*/false);
    return finish(out, s);
  }

 private:
  bool build(Solution& out) {
    p_.validate();
    const std::size_t n = p_.num_variables();
    vars_.resize(n);
    std::size_t k = 0;
    std::vector<double> struct_upper;
    std::vector<double> struct_cost;
    double offset = p_.offset;
    for (std::size_t j = 0; j < n; ++j) {
      const double lo = p_.lower[j], hi = p_.upper[j], c = p_.objective[j];
      VariableMap& v = vars_[j];
      if (lo > hi) {
        out.status = Status::infeasible;
        out.x.assign(n, 0.0);
        out.duals.assign(p_.constraints.size(), 0.0);
        return false;
      }
      if (std::isfinite(lo)) {
        v = {k++, npos, 1.0, lo};
        struct_upper.push_back(std::isfinite(hi) ? hi - lo : kInfinity);
        struct_cost.push_back(c);
      } else if (std::isfinite(hi)) {
        v = {k++, npos, -1.0, hi};
        struct_upper.push_back(kInfinity);
        struct_cost.push_back(-c);
      } else {
        v = {k, k + 1, 1.0, 0.0};
        k += 2;
        struct_upper.insert(struct_upper.end(), {kInfinity, kInfinity});
        struct_cost.insert(struct_cost.end(), {c, -c});
      }
      offset += c * v.shift;
    }
    nstruct_ = k;

    // Rows, dense over structural columns.
    struct Row {
      std::vector<double> a;
      double rhs;
      double slack_coef;  // 0 for equality rows
      std::size_t source;
      double factor;  // sign * scale applied to the original row
    };
    std::vector<Row> rows;
    row_factor_.assign(p_.constraints.size(), 0.0);
    row_slot_.assign(p_.constraints.size(), npos);
    for (std::size_t r = 0; r < p_.constraints.size(); ++r) {
      const Constraint& con = p_.constraints[r];
      Row row{std::vector<double>(nstruct_, 0.0), con.rhs, 0.0, r, 1.0};
      for (const Term& t : con.terms) {
        const VariableMap& v = vars_[t.var];
        row.a[v.col] += t.coef * v.sign;
        if (v.neg_col != npos) row.a[v.neg_col] -= t.coef;
        row.rhs -= t.coef * v.shift;
      }
      double amax = 0.0;
      for (double a : row.a) amax = std::max(amax, std::abs(a));
      if (amax == 0.0) {
        const double tol = opt_.feasibility_tolerance;
        const bool ok = (con.relation == Relation::less_equal && row.rhs >= -tol) ||
                        (con.relation == Relation::greater_equal && row.rhs <= tol) ||
                        (con.relation == Relation::equal && std::abs(row.rhs) <= tol);
        if (!ok) {
          out.status = Status::infeasible;
          out.x.assign(n, 0.0);
          out.duals.assign(p_.constraints.size(), 0.0);
          return false;
        }
        continue;
      }
      const double scale = 1.0 / amax;
      for (double& a : row.a) a *= scale;
      row.rhs *= scale;
      row.factor = scale;
      if (con.relation == Relation::less_equal) row.slack_coef = 1.0;
      if (con.relation == Relation::greater_equal) row.slack_coef = -1.0;
      if (row.rhs < 0.0) {
        for (double& a : row.a) a = -a;
        row.rhs = -row.rhs;
        row.slack_coef = -row.slack_coef;
        row.factor = -row.factor;
      }
      rows.push_back(std::move(row));
    }
    m_ = rows.size();

    std::size_t nslack = 0, nart = 0;
    for (const Row& row : rows) {
      if (row.slack_coef != 0.0) ++nslack;
      if (row.slack_coef != 1.0) ++nart;
    }
    slack_begin_ = nstruct_;
    art_begin_ = nstruct_ + nslack;
    ncols_ = art_begin_ + nart;

    tab_.assign(m_ * ncols_, 0.0);
    xb_.assign(m_, 0.0);
    basis_.assign(m_, npos);
    identity_col_.assign(m_, npos);
    upper_.assign(ncols_, kInfinity);
    at_upper_.assign(ncols_, false);
    is_basic_.assign(ncols_, false);
    cost_.assign(ncols_, 0.0);
    std::copy(struct_upper.begin(), struct_upper.end(), upper_.begin());

    double cmax = 0.0;
    for (double c : struct_cost) cmax = std::max(cmax, std::abs(c));
    cost_scale_ = cmax > 0.0 ? 1.0 / cmax : 1.0;
    for (std::size_t j = 0; j < nstruct_; ++j) cost_[j] = struct_cost[j] * cost_scale_;
    offset_ = offset;

    std::size_t s = slack_begin_, a = art_begin_;
    for (std::size_t r = 0; r < m_; ++r) {
      const Row& row = rows[r];
      double* t = &tab_[r * ncols_];
      std::copy(row.a.begin(), row.a.end(), t);
      if (row.slack_coef != 0.0) {
        t[s] = row.slack_coef;
        if (row.slack_coef == 1.0) identity_col_[r] = s;
        ++s;
      }
      if (identity_col_[r] == npos) {
        t[a] = 1.0;
        identity_col_[r] = a++;
      }
      basis_[r] = identity_col_[r];
      is_basic_[basis_[r]] = true;
      xb_[r] = row.rhs;
      row_factor_[row.source] = row.factor;
      row_slot_[row.source] = r;
    }
    return true;
  }

  void price(const std::vector<double>& c) {
    d_ = c;
    for (std::size_t r = 0; r < m_; ++r) {
      const double cb = c[basis_[r]];
      if (cb == 0.0) continue;
      const double* t = &tab_[r * ncols_];
      for (std::size_t j = 0; j < ncols_; ++j)
        if (t[j] != 0.0) d_[j] -= cb * t[j];
    }
    for (std::size_t r = 0; r < m_; ++r) d_[basis_[r]] = 0.0;
  }

  Status iterate(std::size_t budget, bool allow_artificial) {
    const double dtol = opt_.optimality_tolerance;
    const double ptol = opt_.pivot_tolerance;
    std::size_t degenerate_run = 0;
    const std::size_t bland_after = 2 * (m_ + ncols_);
    for (;;) {
      if (iterations_ >= budget) return Status::iteration_limit;
      const bool bland = degenerate_run > bland_after;
      const std::size_t limit = allow_artificial ? ncols_ : art_begin_;

      std::size_t q = npos;
      double best = 0.0;
      for (std::size_t j = 0; j < limit; ++j) {
        if (is_basic_[j] || upper_[j] == 0.0) continue;
        const double dj = d_[j];
        const bool eligible = at_upper_[j] ? dj > dtol : dj < -dtol;
        if (!eligible) continue;
        if (bland) {
          q = j;
          break;
        }
        if (std::abs(dj) > best) {
          best = std::abs(dj);
          q = j;
        }
      }
      if (q == npos) return Status::optimal;
      ++iterations_;

      const double dir = at_upper_[q] ? -1.0 : 1.0;
      double step = upper_[q];
      std::size_t leave = npos;
      double leave_alpha = 0.0;
      for (std::size_t r = 0; r < m_; ++r) {
        const double alpha = tab_[r * ncols_ + q] * dir;
        double lim;
        if (alpha > ptol) {
          lim = std::max(xb_[r], 0.0) / alpha;
        } else if (alpha < -ptol && std::isfinite(upper_[basis_[r]])) {
          lim = std::max(upper_[basis_[r]] - xb_[r], 0.0) / -alpha;
        } else {
          continue;
        }
        bool take = false;
        if (lim < step) {
          take = true;
        } else if (lim == step && leave != npos) {
          take = bland ? basis_[r] < basis_[leave] : std::abs(alpha) > std::abs(leave_alpha);
        }
        if (take) {
          step = lim;
          leave = r;
          leave_alpha = alpha;
        }
      }
      if (leave == npos && !std::isfinite(step)) return Status::unbounded;

      if (step > 0.0) {
        for (std::size_t r = 0; r < m_; ++r) {
          const double t = tab_[r * ncols_ + q];
          if (t != 0.0) xb_[r] -= step * dir * t;
        }
      }
      degenerate_run = step <= 1e-12 ? degenerate_run + 1 : 0;

      if (leave == npos) {
        at_upper_[q] = !at_upper_[q];
        continue;
      }
      const double entering_value = at_upper_[q] ? upper_[q] - step : step;
      const std::size_t p = basis_[leave];
      at_upper_[p] = leave_alpha < 0.0;
      is_basic_[p] = false;
      pivot(leave, q);
      basis_[leave] = q;
      is_basic_[q] = true;
      at_upper_[q] = false;
      xb_[leave] = entering_value;
    }
  }

  void pivot(std::size_t r, std::size_t q) {
    double* pr = &tab_[r * ncols_];
    const double inv = 1.0 / pr[q];
    nz_.clear();
    for (std::size_t j = 0; j < ncols_; ++j) {
      if (pr[j] == 0.0) continue;
      pr[j] *= inv;
      if (std::abs(pr[j]) < 1e-14) {
        pr[j] = 0.0;
        continue;
      }
      nz_.push_back(j);
    }
    pr[q] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* ri = &tab_[i * ncols_];
      const double f = ri[q];
      if (f == 0.0) continue;
      for (std::size_t j : nz_) {
        double v = ri[j] - f * pr[j];
        ri[j] = std::abs(v) < 1e-13 ? 0.0 : v;
      }
      ri[q] = 0.0;
    }
    const double f = d_[q];
    if (f != 0.0) {
      for (std::size_t j : nz_) d_[j] -= f * pr[j];
      d_[q] = 0.0;
    }
  }

  Solution& finish(Solution& out, Status s) {
    out.status = s;
    out.iterations = iterations_;
    std::vector<double> internal(ncols_, 0.0);
    for (std::size_t j = 0; j < ncols_; ++j)
      if (!is_basic_[j] && at_upper_[j]) internal[j] = upper_[j];
    for (std::size_t r = 0; r < m_; ++r) internal[basis_[r]] = xb_[r];

    const std::size_t n = p_.num_variables();
    out.x.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const VariableMap& v = vars_[j];
      double val = v.shift + v.sign * std::max(0.0, internal[v.col]);
      if (v.neg_col != npos) val -= std::max(0.0, internal[v.neg_col]);
      out.x[j] = std::clamp(val, p_.lower[j], p_.upper[j]);
    }
    double obj = p_.offset;
    for (std::size_t j = 0; j < n; ++j) obj += p_.objective[j] * out.x[j];
    out.objective_value = obj;

    out.duals.assign(p_.constraints.size(), 0.0);
    if (s == Status::optimal) {
      for (std::size_t r = 0; r < p_.constraints.size(); ++r) {
        const std::size_t slot = row_slot_[r];
        if (slot == npos) continue;
        const double pi = -d_[identity_col_[slot]];
        out.duals[r] = row_factor_[r] * pi / cost_scale_;
      }
    }
    out.basis = basis_;
    return out;
  }

  const Problem& p_;
  const Options& opt_;
  std::vector<VariableMap> vars_;
  std::size_t nstruct_ = 0, slack_begin_ = 0, art_begin_ = 0, ncols_ = 0, m_ = 0;
  std::vector<double> tab_;
  std::vector<double> xb_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> identity_col_;
  std::vector<double> upper_;
  std::vector<bool> at_upper_;
  std::vector<bool> is_basic_;
  std::vector<double> cost_;
  std::vector<double> d_;
  std::vector<double> row_factor_;
  std::vector<std::size_t> row_slot_;
  std::vector<std::size_t> nz_;
  double cost_scale_ = 1.0;
  double offset_ = 0.0;
  std::size_t iterations_ = 0;
};

}  // namespace detail

inline Solution solve(const Problem& problem, const Options& options = {}) {
  return detail::Simplex(problem, options).run();
}

// Largest violation of any row or bound at x, in the problem's own units.
inline double max_violation(const Problem& p, std::span<const double> x) {
  double worst = 0.0;
  for (std::size_t j = 0; j < p.num_variables(); ++j) {
    worst = std::max(worst, p.lower[j] - x[j]);
    worst = std::max(worst, x[j] - p.upper[j]);
  }
  for (const Constraint& c : p.constraints) {
    double lhs = 0.0;
    for (const Term& t : c.terms) lhs += t.coef * x[t.var];
    switch (c.relation) {
      case Relation::less_equal: worst = std::max(worst, lhs - c.rhs); break;
      case Relation::greater_equal: worst = std::max(worst, c.rhs - lhs); break;
      case Relation::equal: worst = std::max(worst, std::abs(lhs - c.rhs)); break;
    }
  }
  return worst;
}

// Lagrangian lower bound  b'y + offset + sum_j min_{l<=x<=u} (c - A'y)_j x_j.
// Returns -infinity when y has the wrong sign on an inequality row or a reduced
// cost pushes toward an infinite bound.
inline double dual_bound(const Problem& p, std::span<const double> y, double tol = 1e-9) {
  std::vector<double> d = p.objective;
  double value = p.offset;
  for (std::size_t r = 0; r < p.constraints.size(); ++r) {
    const Constraint& c = p.constraints[r];
    double yr = y[r];
    if (c.relation == Relation::less_equal && yr > 0.0) {
      if (yr > tol) return -kInfinity;
      yr = 0.0;
    }
    if (c.relation == Relation::greater_equal && yr < 0.0) {
      if (yr < -tol) return -kInfinity;
      yr = 0.0;
    }
    value += c.rhs * yr;
    for (const Term& t : c.terms) d[t.var] -= t.coef * yr;
  }
  for (std::size_t j = 0; j < d.size(); ++j) {
    const double scale = std::max(1.0, std::abs(p.objective[j]));
    if (std::abs(d[j]) <= tol * scale) continue;
    const double bound = d[j] > 0.0 ? p.lower[j] : p.upper[j];
    if (!std::isfinite(bound)) return -kInfinity;
    value += d[j] * bound;
  }
  return value;
}

// LP-format style text dump, one constraint per line.
inline void write_text(const Problem& p, std::ostream& os) {
  auto term = [&](double coef, std::size_t j, bool first) {
    if (!first || coef < 0.0) os << (coef < 0.0 ? " - " : " + ");
    os << std::abs(coef) << " x" << j;
  };
  os.precision(17);
  os << "minimize\n obj:";
  bool first = true;
  for (std::size_t j = 0; j < p.num_variables(); ++j) {
    if (p.objective[j] == 0.0) continue;
    os << (first ? " " : "");
    term(p.objective[j], j, first);
    first = false;
  }
  if (p.offset != 0.0) os << (p.offset < 0.0 ? " - " : " + ") << std::abs(p.offset);
  os << "\nsubject to\n";
  for (std::size_t r = 0; r < p.constraints.size(); ++r) {
    const Constraint& c = p.constraints[r];
    os << ' ' << (c.name.empty() ? "r" + std::to_string(r) : c.name) << ':';
    first = true;
    for (const Term& t : c.terms) {
      os << (first ? " " : "");
      term(t.coef, t.var, first);
      first = false;
    }
    if (first) os << " 0";
    switch (c.relation) {
      case Relation::less_equal: os << " <= "; break;
      case Relation::greater_equal: os << " >= "; break;
      case Relation::equal: os << " = "; break;
    }
    os << c.rhs << '\n';
  }
  os << "bounds\n";
  for (std::size_t j = 0; j < p.num_variables(); ++j) {
    const double lo = p.lower[j], hi = p.upper[j];
    os << ' ';
    if (std::isfinite(lo)) os << lo; else os << "-inf";
    os << " <= x" << j << " <= ";
    if (std::isfinite(hi)) os << hi; else os << "+inf";
    os << '\n';
  }
  os << "end\n";
}

}  // namespace nfvchain::lp
