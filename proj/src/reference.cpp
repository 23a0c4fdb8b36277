#include "omla/reference.hpp"

#include <algorithm>

#include "omla/error.hpp"

namespace omla {

RefParams ref_params(const Instance& in, const LpSolution& x) {
  require(x.matches(in), ErrorKind::invalid_argument, "LP solution does not match instance dimensions");
  RefParams out;
  out.machines = in.machine_count();
  out.levels = in.levels();
  out.horizon = in.horizon();
  const std::size_t n = static_cast<std::size_t>(out.machines) * out.levels * out.horizon;
  out.p.assign(n, 0.0);
  out.q.assign(n, 0.0);
  out.r.assign(n, 0.0);
  for (MachineId u = 0; u < out.machines; ++u)
    for (LevelId l = 0; l < out.levels; ++l)
      for (int t = 1; t <= out.horizon; ++t) {
        double p = 0.0, qx = 0.0, qrx = 0.0;
        for (EdgeId e : in.edges_of_machine(u)) {
          const double xv = x.at(e, l, t);
          const double q = in.edge(e).accept_prob;
          p += xv;
          qx += q * xv;
          qrx += q * in.reward(e, l) * xv;
        }
        const std::size_t i = out.index(u, l, t);
        out.p[i] = p;
        out.q[i] = p == 0.0 ? 0.0 : qx / p;
        const double pq = p * out.q[i];
        out.r[i] = pq == 0.0 ? 0.0 : qrx / pq;
      }
  return out;
}

RefTables ref_tables(const Instance& in, const RefParams& par) {
  require(par.machines == in.machine_count() && par.levels == in.levels() && par.horizon == in.horizon(),
          ErrorKind::invalid_argument, "reference parameters do not match instance dimensions");
  RefTables rt;
  const int U = in.machine_count();
  const int L = in.levels();
  const int T = in.horizon();
  rt.machines_ = U;
  rt.levels_ = L;
  rt.horizon_ = T;
  rt.max_budget_ = in.all_unlimited() ? 0 : in.max_finite_budget();
  rt.unlimited_.resize(U);
  for (MachineId u = 0; u < U; ++u) rt.unlimited_[u] = in.budget(u).is_unlimited() ? 1 : 0;
  rt.rf_.assign(static_cast<std::size_t>(rt.max_budget_) * U * T, 0.0);
  rt.qf_.assign(static_cast<std::size_t>(rt.max_budget_) * U * L * T, 0.0);
  rt.ru_.assign(static_cast<std::size_t>(U) * T, 0.0);
  rt.qu_.assign(static_cast<std::size_t>(U) * L * T, 0.0);

  for (MachineId u = 0; u < U; ++u) {
    const bool unl = rt.unlimited(u);
    const int dmax = unl ? 1 : rt.max_budget_;
    for (int t = T; t >= 1; --t) {
      double mass = 0.0;
      for (LevelId l = 0; l < L; ++l) mass += par.p_at(u, l, t);
      for (int delta = 1; delta <= dmax; ++delta) {
        const double next = rt.baseline(u, delta, t + 1);
        double r = (1.0 - mass) * next;
        for (LevelId l = 0; l < L; ++l) {
          const DelayDist& d = in.delay(l);
          double conv = 0.0;
          const int kmax = std::min(T - t, d.support_max());
          for (int k = 1; k <= kmax; ++k) conv += d.prob(k) * rt.baseline(u, delta, t + k);
          const double q = par.q_at(u, l, t);
          const double rejected = unl ? next : rt.baseline(u, delta - in.penalty(l), t + 1);
          const double act = q * (par.r_at(u, l, t) + conv) + (1.0 - q) * rejected;
          if (unl)
            rt.qu_[(static_cast<std::size_t>(u) * L + l) * T + (t - 1)] = act;
          else
            rt.qf_[((static_cast<std::size_t>(delta - 1) * U + u) * L + l) * T + (t - 1)] = act;
          r += par.p_at(u, l, t) * std::max(act, next);
        }
        if (unl)
          rt.ru_[static_cast<std::size_t>(u) * T + (t - 1)] = r;
        else
          rt.rf_[(static_cast<std::size_t>(delta - 1) * U + u) * T + (t - 1)] = r;
      }
    }
  }
  return rt;
}

double RefTables::initial_value(const Instance& in, MachineId u) const {
  const Budget& b = in.budget(u);
  return baseline(u, b.is_unlimited() ? 0 : b.value(), 1);
}

}  // namespace omla
