#pragma once

// Independent ODE reference: adaptive Dormand-Prince 5(4) from Boost.Odeint,
// driven through the library's right-hand side only.

#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <vector>

#include "ctf/dynamics.hpp"

namespace ctf::oracle {

using State = std::vector<double>;

inline State dopri(const SystemParams& p, State x, double t_end, double tol = 1e-12) {
  namespace odeint = boost::numeric::odeint;
  auto grid = default_grid(p);
  auto f = [&](const State& s, State& d, double) { d = rhs(p, grid, s); };
  odeint::integrate_adaptive(odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(tol, tol), f, x, 0.0,
                             t_end, 1e-4);
  return x;
}

inline double relative_error(const State& got, const State& ref) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    num += (got[i] - ref[i]) * (got[i] - ref[i]);
    den += ref[i] * ref[i];
  }
  return std::sqrt(num / den);
}

}  // namespace ctf::oracle
