#pragma once

// Right-hand sides and fixed-step integrators for the six permanent-collection
// systems. ODEs use classical RK4; the periodic PDEs (Kuramoto-Sivashinsky and
// viscous Burgers) use a Fourier pseudo-spectral discretization with 2/3-rule
// dealiasing, advanced by ETDRK4 with contour-integral phi-functions.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ctf/array.hpp"
#include "ctf/error.hpp"
#include "ctf/fft.hpp"

namespace ctf {

enum class SystemId { Lorenz, Rossler, DoublePendulum, Lorenz96, KuramotoSivashinsky, Burgers };

inline constexpr std::array<SystemId, 6> kAllSystems = {
    SystemId::Lorenz,   SystemId::Rossler,             SystemId::DoublePendulum,
    SystemId::Lorenz96, SystemId::KuramotoSivashinsky, SystemId::Burgers};

constexpr std::string_view system_name(SystemId id) noexcept {
  switch (id) {
    case SystemId::Lorenz: return "Lorenz";
    case SystemId::Rossler: return "Rossler";
    case SystemId::DoublePendulum: return "DoublePendulum";
    case SystemId::Lorenz96: return "Lorenz96";
    case SystemId::KuramotoSivashinsky: return "KuramotoSivashinsky";
    case SystemId::Burgers: return "Burgers";
  }
  return "?";
}

/// Lower-case identifier used on the command line and in pack ids.
constexpr std::string_view system_slug(SystemId id) noexcept {
  switch (id) {
    case SystemId::Lorenz: return "lorenz";
    case SystemId::Rossler: return "rossler";
    case SystemId::DoublePendulum: return "double-pendulum";
    case SystemId::Lorenz96: return "lorenz96";
    case SystemId::KuramotoSivashinsky: return "ks";
    case SystemId::Burgers: return "burgers";
  }
  return "?";
}

inline SystemId parse_system(std::string_view text) {
  std::string key;
  for (char c : text) {
    if (c != '-' && c != '_') key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (key == "lorenz") return SystemId::Lorenz;
  if (key == "rossler") return SystemId::Rossler;
  if (key == "doublependulum") return SystemId::DoublePendulum;
  if (key == "lorenz96") return SystemId::Lorenz96;
  if (key == "ks" || key == "kuramotosivashinsky") return SystemId::KuramotoSivashinsky;
  if (key == "burgers") return SystemId::Burgers;
  throw Error(Errc::ConfigInvalid, "unknown system '" + std::string(text) + "'");
}

constexpr bool is_pde(SystemId id) noexcept {
  return id == SystemId::KuramotoSivashinsky || id == SystemId::Burgers;
}

// ---------------------------------------------------------------------------
// Parameters

struct LorenzParams {
  double sigma = 10.0;
  double rho = 28.0;
  double beta = 8.0 / 3.0;
};

struct RosslerParams {
  double a = 0.2;
  double b = 0.2;
  double c = 5.7;
};

struct DoublePendulumParams {
  double m1 = 1.0;
  double m2 = 1.0;
  double l1 = 1.0;
  double l2 = 1.0;
  double g = 9.81;
};

struct Lorenz96Params {
  double forcing = 8.0;
  std::size_t dim = 40;
};

struct KuramotoSivashinskyParams {
  double mu = 1.0;
  double length = 32.0 * std::numbers::pi;
};

struct BurgersParams {
  double nu = 0.1;
  double length = 8.0 * std::numbers::pi;
};

/// Alternative order matches SystemId.
using SystemParams = std::variant<LorenzParams, RosslerParams, DoublePendulumParams, Lorenz96Params,
                                  KuramotoSivashinskyParams, BurgersParams>;

inline SystemId system_of(const SystemParams& p) noexcept { return static_cast<SystemId>(p.index()); }

inline SystemParams default_params(SystemId id) {
  switch (id) {
    case SystemId::Lorenz: return LorenzParams{};
    case SystemId::Rossler: return RosslerParams{};
    case SystemId::DoublePendulum: return DoublePendulumParams{};
    case SystemId::Lorenz96: return Lorenz96Params{};
    case SystemId::KuramotoSivashinsky: return KuramotoSivashinskyParams{};
    case SystemId::Burgers: return BurgersParams{};
  }
  throw Error(Errc::ConfigInvalid, "unknown system");
}

/// Named view of the parameters, for manifests and generation records.
inline std::vector<std::pair<std::string, double>> param_values(const SystemParams& params) {
  return std::visit(
      [](const auto& p) -> std::vector<std::pair<std::string, double>> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LorenzParams>) {
          return {{"sigma", p.sigma}, {"rho", p.rho}, {"beta", p.beta}};
        } else if constexpr (std::is_same_v<T, RosslerParams>) {
          return {{"a", p.a}, {"b", p.b}, {"c", p.c}};
        } else if constexpr (std::is_same_v<T, DoublePendulumParams>) {
          return {{"m1", p.m1}, {"m2", p.m2}, {"l1", p.l1}, {"l2", p.l2}, {"g", p.g}};
        } else if constexpr (std::is_same_v<T, Lorenz96Params>) {
          return {{"F", p.forcing}, {"n", static_cast<double>(p.dim)}};
        } else if constexpr (std::is_same_v<T, KuramotoSivashinskyParams>) {
          return {{"mu", p.mu}, {"L", p.length}};
        } else {
          return {{"nu", p.nu}, {"L", p.length}};
        }
      },
      params);
}

inline void set_param(SystemParams& params, std::string_view name, double value) {
  bool ok = std::visit(
      [&](auto& p) {
        using T = std::decay_t<decltype(p)>;
        auto assign = [&](std::string_view key, double& field) {
          if (name != key) return false;
          field = value;
          return true;
        };
        if constexpr (std::is_same_v<T, LorenzParams>) {
          return assign("sigma", p.sigma) || assign("rho", p.rho) || assign("beta", p.beta);
        } else if constexpr (std::is_same_v<T, RosslerParams>) {
          return assign("a", p.a) || assign("b", p.b) || assign("c", p.c);
        } else if constexpr (std::is_same_v<T, DoublePendulumParams>) {
          return assign("m1", p.m1) || assign("m2", p.m2) || assign("l1", p.l1) ||
                 assign("l2", p.l2) || assign("g", p.g);
        } else if constexpr (std::is_same_v<T, Lorenz96Params>) {
          if (name == "n") {
            if (!(value >= 4.0) || value != std::floor(value)) return false;
            p.dim = static_cast<std::size_t>(value);
            return true;
          }
          return assign("F", p.forcing);
        } else if constexpr (std::is_same_v<T, KuramotoSivashinskyParams>) {
          return assign("mu", p.mu) || assign("L", p.length);
        } else {
          return assign("nu", p.nu) || assign("L", p.length);
        }
      },
      params);
  if (!ok) throw Error(Errc::ConfigInvalid, "cannot set parameter '" + std::string(name) + "'");
}

inline double get_param(const SystemParams& params, std::string_view name) {
  for (const auto& [k, v] : param_values(params)) {
    if (k == name) return v;
  }
  throw Error(Errc::ConfigInvalid, "no parameter '" + std::string(name) + "'");
}

inline void validate_params(const SystemParams& params) {
  for (const auto& [k, v] : param_values(params)) {
    if (!std::isfinite(v)) throw Error(Errc::ConfigInvalid, "parameter " + k + " is not finite");
  }
  std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Lorenz96Params>) {
          if (p.dim < 4) throw Error(Errc::ConfigInvalid, "Lorenz96 needs n >= 4");
        } else if constexpr (std::is_same_v<T, KuramotoSivashinskyParams>) {
          if (!(p.mu > 0) || !(p.length > 0)) throw Error(Errc::ConfigInvalid, "KS needs mu > 0, L > 0");
        } else if constexpr (std::is_same_v<T, BurgersParams>) {
          if (!(p.nu > 0) || !(p.length > 0)) throw Error(Errc::ConfigInvalid, "Burgers needs nu > 0, L > 0");
        } else if constexpr (std::is_same_v<T, DoublePendulumParams>) {
          if (!(p.l1 > 0) || !(p.l2 > 0) || !(p.m1 > 0) || !(p.m2 > 0)) {
            throw Error(Errc::ConfigInvalid, "double pendulum needs positive masses and lengths");
          }
        }
      },
      params);
}

// ---------------------------------------------------------------------------
// Discretization

/// Periodic uniform grid on [0, length).
struct GridSpec {
  std::size_t n_points = 128;
  double length = 32.0 * std::numbers::pi;
};

inline double domain_length(const SystemParams& params) {
  if (const auto* ks = std::get_if<KuramotoSivashinskyParams>(&params)) return ks->length;
  if (const auto* b = std::get_if<BurgersParams>(&params)) return b->length;
  return 0.0;
}

inline std::optional<GridSpec> default_grid(const SystemParams& params) {
  if (!is_pde(system_of(params))) return std::nullopt;
  return GridSpec{128, domain_length(params)};
}

enum class Method { RK4, ETDRK4 };

struct IntegratorConfig {
  double dt = 0.01;
  std::size_t steps = 0;  // sampling intervals; the trajectory has steps + 1 columns
  std::size_t substeps_per_sample = 1;
  Method method = Method::RK4;

  double sample_interval() const noexcept { return dt * static_cast<double>(substeps_per_sample); }
};

/// Fixed-step settings used for shipped data. Sample intervals land in 0.01-0.25.
inline IntegratorConfig default_integrator(SystemId id) {
  switch (id) {
    case SystemId::Lorenz: return {0.01, 0, 1, Method::RK4};
    case SystemId::Rossler: return {0.01, 0, 5, Method::RK4};
    case SystemId::DoublePendulum: return {0.001, 0, 10, Method::RK4};
    case SystemId::Lorenz96: return {0.01, 0, 5, Method::RK4};
    case SystemId::KuramotoSivashinsky: return {0.25, 0, 1, Method::ETDRK4};
    case SystemId::Burgers: return {0.05, 0, 2, Method::ETDRK4};
  }
  throw Error(Errc::ConfigInvalid, "unknown system");
}

inline std::size_t state_dimension(const SystemParams& params, const std::optional<GridSpec>& grid) {
  switch (system_of(params)) {
    case SystemId::Lorenz:
    case SystemId::Rossler: return 3;
    case SystemId::DoublePendulum: return 4;
    case SystemId::Lorenz96: return std::get<Lorenz96Params>(params).dim;
    case SystemId::KuramotoSivashinsky:
    case SystemId::Burgers:
      if (!grid) throw Error(Errc::ConfigInvalid, "PDE system requires a grid");
      return grid->n_points;
  }
  return 0;
}

inline constexpr double kBlowupThreshold = 1e8;

// ---------------------------------------------------------------------------
// ODE right-hand sides

namespace detail {

inline void ode_rhs(const SystemParams& params, std::span<const double> x, std::span<double> dx) {
  switch (system_of(params)) {
    case SystemId::Lorenz: {
      const auto& p = std::get<LorenzParams>(params);
      dx[0] = p.sigma * (x[1] - x[0]);
      dx[1] = x[0] * (p.rho - x[2]) - x[1];
      dx[2] = x[0] * x[1] - p.beta * x[2];
      return;
    }
    case SystemId::Rossler: {
      const auto& p = std::get<RosslerParams>(params);
      dx[0] = -x[1] - x[2];
      dx[1] = x[0] + p.a * x[1];
      dx[2] = p.b + x[2] * (x[0] - p.c);
      return;
    }
    case SystemId::DoublePendulum: {
      // State (theta1, theta2, omega1, omega2); angles measured from the downward vertical.
      const auto& p = std::get<DoublePendulumParams>(params);
      const double t1 = x[0], t2 = x[1], w1 = x[2], w2 = x[3];
      const double delta = t2 - t1;
      const double sd = std::sin(delta), cd = std::cos(delta);
      const double den1 = (p.m1 + p.m2) * p.l1 - p.m2 * p.l1 * cd * cd;
      const double den2 = (p.l2 / p.l1) * den1;
      dx[0] = w1;
      dx[1] = w2;
      dx[2] = (p.m2 * p.l1 * w1 * w1 * sd * cd + p.m2 * p.g * std::sin(t2) * cd +
               p.m2 * p.l2 * w2 * w2 * sd - (p.m1 + p.m2) * p.g * std::sin(t1)) /
              den1;
      dx[3] = (-p.m2 * p.l2 * w2 * w2 * sd * cd +
               (p.m1 + p.m2) * (p.g * std::sin(t1) * cd - p.l1 * w1 * w1 * sd - p.g * std::sin(t2))) /
              den2;
      return;
    }
    case SystemId::Lorenz96: {
      const auto& p = std::get<Lorenz96Params>(params);
      const std::size_t n = p.dim;
      for (std::size_t i = 0; i < n; ++i) {
        const double xp1 = x[(i + 1) % n];
        const double xm1 = x[(i + n - 1) % n];
        const double xm2 = x[(i + n - 2) % n];
        dx[i] = (xp1 - xm2) * xm1 - x[i] + p.forcing;
      }
      return;
    }
    default:
      throw Error(Errc::ConfigInvalid, "not an ODE system");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Pseudo-spectral model for the periodic PDEs

/// Holds the Fourier-space operators of u_t = L u + N(u) on a periodic grid:
///   KS:      L = k^2 - mu k^4,  N(u) = -(u^2/2)_x
///   Burgers: L = -nu k^2,       N(u) = -(u^2/2)_x
/// The state is the half spectrum (n/2 + 1 complex modes) of the real field.
class SpectralModel {
 public:
  using Spectrum = std::vector<std::complex<double>>;

  SpectralModel(const SystemParams& params, const GridSpec& grid)
      : n_(grid.n_points), fft_(grid.n_points) {
    if (n_ < 8 || (n_ & (n_ - 1)) != 0) {
      throw Error(Errc::ConfigInvalid, "grid size must be a power of two >= 8");
    }
    if (!(grid.length > 0)) throw Error(Errc::ConfigInvalid, "grid length must be positive");
    if (std::abs(grid.length - domain_length(params)) > 1e-12 * grid.length) {
      throw Error(Errc::ConfigInvalid, "grid length disagrees with the system's domain length");
    }
    const std::size_t half = n_ / 2 + 1;
    wavenumber_.resize(half);
    linear_.resize(half);
    keep_.resize(half);
    for (std::size_t j = 0; j < half; ++j) {
      const double k = 2.0 * std::numbers::pi * static_cast<double>(j) / grid.length;
      wavenumber_[j] = k;
      if (const auto* ks = std::get_if<KuramotoSivashinskyParams>(&params)) {
        linear_[j] = k * k - ks->mu * k * k * k * k;
      } else {
        linear_[j] = -std::get<BurgersParams>(params).nu * k * k;
      }
      // 2/3 rule; also drops the Nyquist mode from the odd derivative.
      keep_[j] = 3 * j < n_;
    }
    field_.resize(n_);
    work_.resize(half);
  }

  std::size_t grid_points() const noexcept { return n_; }
  std::size_t modes() const noexcept { return n_ / 2 + 1; }
  const std::vector<double>& linear() const noexcept { return linear_; }

  Spectrum to_spectral(std::span<const double> u) {
    Spectrum v(modes());
    fft_.forward(u, v);
    return v;
  }

  std::vector<double> to_physical(std::span<const std::complex<double>> v) {
    std::vector<double> u(n_);
    fft_.inverse(v, u);
    return u;
  }

  /// Dealiased -(ik/2) FFT(u^2).
  void nonlinear(std::span<const std::complex<double>> v, std::span<std::complex<double>> out) {
    for (std::size_t j = 0; j < modes(); ++j) work_[j] = keep_[j] ? v[j] : 0.0;
    fft_.inverse(work_, field_);
    for (double& u : field_) u = u * u;
    fft_.forward(field_, out);
    for (std::size_t j = 0; j < modes(); ++j) {
      out[j] = keep_[j] ? std::complex<double>(0.0, -0.5 * wavenumber_[j]) * out[j] : 0.0;
    }
  }

 private:
  std::size_t n_;
  RealFft fft_;
  std::vector<double> wavenumber_;
  std::vector<double> linear_;
  std::vector<bool> keep_;
  std::vector<double> field_;
  Spectrum work_;
};

/// ETDRK4 coefficients for a diagonal linear operator; phi-functions are
/// evaluated as means over a contour of radius 1 around each h*L to avoid
/// cancellation near zero.
struct EtdRk4Coefficients {
  std::vector<double> e, e2, q, f1, f2, f3;

  EtdRk4Coefficients(std::span<const double> linear, double h, int contour_points = 32) {
    const std::size_t n = linear.size();
    e.resize(n), e2.resize(n), q.resize(n), f1.resize(n), f2.resize(n), f3.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double hl = h * linear[j];
      e[j] = std::exp(hl);
      e2[j] = std::exp(hl / 2);
      std::complex<double> sq = 0, s1 = 0, s2 = 0, s3 = 0;
      for (int m = 1; m <= contour_points; ++m) {
        // Upper half circle; the functions are real on the real axis so the
        // real part of the half-circle mean equals the full-circle mean.
        const double angle = std::numbers::pi * (m - 0.5) / contour_points;
        const std::complex<double> z = hl + std::polar(1.0, angle);
        const std::complex<double> ez = std::exp(z);
        const std::complex<double> z3 = z * z * z;
        sq += (std::exp(z / 2.0) - 1.0) / z;
        s1 += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
        s2 += (2.0 + z + ez * (-2.0 + z)) / z3;
        s3 += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
      }
      const double inv = 1.0 / contour_points;
      q[j] = h * (sq * inv).real();
      f1[j] = h * (s1 * inv).real();
      f2[j] = h * (s2 * inv).real();
      f3[j] = h * (s3 * inv).real();
    }
  }
};

// ---------------------------------------------------------------------------
// Public operations

/// Time derivative of `state`. For the PDEs this is the pseudo-spectral
/// evaluation on the grid, returned in physical space.
inline std::vector<double> rhs(const SystemParams& params, const std::optional<GridSpec>& grid,
                               std::span<const double> state) {
  validate_params(params);
  const std::size_t dim = state_dimension(params, grid);
  if (state.size() != dim) {
    throw Error(Errc::DimensionMismatch,
                "state has " + std::to_string(state.size()) + " entries, system needs " + std::to_string(dim));
  }
  std::vector<double> out(dim);
  if (!is_pde(system_of(params))) {
    detail::ode_rhs(params, state, out);
    return out;
  }
  SpectralModel model(params, *grid);
  auto v = model.to_spectral(state);
  SpectralModel::Spectrum nl(model.modes());
  model.nonlinear(v, nl);
  for (std::size_t j = 0; j < model.modes(); ++j) nl[j] += model.linear()[j] * v[j];
  return model.to_physical(nl);
}

inline std::vector<double> rhs(const SystemParams& params, std::span<const double> state) {
  return rhs(params, default_grid(params), state);
}

namespace detail {

inline void check_finite_bounded(std::span<const double> x, std::size_t step) {
  for (double v : x) {
    if (!std::isfinite(v) || std::abs(v) > kBlowupThreshold) {
      throw Error(Errc::Blowup, "state left the finite/bounded region at integrator step " +
                                    std::to_string(step));
    }
  }
}

inline void rk4_step(const SystemParams& params, std::vector<double>& x, double h,
                     std::array<std::vector<double>, 5>& scratch) {
  auto& [k1, k2, k3, k4, tmp] = scratch;
  const std::size_t n = x.size();
  ode_rhs(params, x, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
  ode_rhs(params, tmp, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
  ode_rhs(params, tmp, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
  ode_rhs(params, tmp, k4);
  for (std::size_t i = 0; i < n; ++i) x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

inline ArrayF64 integrate_ode(const SystemParams& params, std::span<const double> x0,
                              const IntegratorConfig& cfg) {
  const std::size_t n = x0.size();
  ArrayF64 out(n, cfg.steps + 1);
  std::vector<double> x(x0.begin(), x0.end());
  std::array<std::vector<double>, 5> scratch;
  for (auto& s : scratch) s.resize(n);
  out.set_column(0, x);
  std::size_t step = 0;
  for (std::size_t s = 1; s <= cfg.steps; ++s) {
    for (std::size_t sub = 0; sub < cfg.substeps_per_sample; ++sub) {
      rk4_step(params, x, cfg.dt, scratch);
      ++step;
      check_finite_bounded(x, step);
    }
    out.set_column(s, x);
  }
  return out;
}

inline ArrayF64 integrate_pde(const SystemParams& params, const GridSpec& grid, std::span<const double> x0,
                              const IntegratorConfig& cfg) {
  SpectralModel model(params, grid);
  const EtdRk4Coefficients c(model.linear(), cfg.dt);
  const std::size_t modes = model.modes();
  using Spectrum = SpectralModel::Spectrum;

  ArrayF64 out(grid.n_points, cfg.steps + 1);
  out.set_column(0, x0);
  Spectrum v = model.to_spectral(x0);
  Spectrum nv(modes), na(modes), nb(modes), nc(modes), a(modes), b(modes), cc(modes);
  std::size_t step = 0;
  for (std::size_t s = 1; s <= cfg.steps; ++s) {
    for (std::size_t sub = 0; sub < cfg.substeps_per_sample; ++sub) {
      model.nonlinear(v, nv);
      for (std::size_t j = 0; j < modes; ++j) a[j] = c.e2[j] * v[j] + c.q[j] * nv[j];
      model.nonlinear(a, na);
      for (std::size_t j = 0; j < modes; ++j) b[j] = c.e2[j] * v[j] + c.q[j] * na[j];
      model.nonlinear(b, nb);
      for (std::size_t j = 0; j < modes; ++j) cc[j] = c.e2[j] * a[j] + c.q[j] * (2.0 * nb[j] - nv[j]);
      model.nonlinear(cc, nc);
      for (std::size_t j = 0; j < modes; ++j) {
        v[j] = c.e[j] * v[j] + c.f1[j] * nv[j] + 2.0 * c.f2[j] * (na[j] + nb[j]) + c.f3[j] * nc[j];
      }
      ++step;
      for (const auto& z : v) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
          throw Error(Errc::Blowup, "non-finite spectrum at integrator step " + std::to_string(step));
        }
      }
    }
    auto u = model.to_physical(v);
    check_finite_bounded(u, step);
    out.set_column(s, u);
  }
  return out;
}

}  // namespace detail

/// Fixed-step trajectory: column k is the state after k * substeps_per_sample
/// integrator steps, column 0 is x0.
inline ArrayF64 integrate(const SystemParams& params, const std::optional<GridSpec>& grid,
                          std::span<const double> x0, const IntegratorConfig& cfg) {
  validate_params(params);
  const SystemId id = system_of(params);
  const std::size_t dim = state_dimension(params, grid);
  if (x0.size() != dim) {
    throw Error(Errc::DimensionMismatch,
                "initial state has " + std::to_string(x0.size()) + " entries, system needs " + std::to_string(dim));
  }
  if (!(cfg.dt > 0) || !std::isfinite(cfg.dt) || cfg.substeps_per_sample == 0) {
    throw Error(Errc::ConfigInvalid, "dt must be positive and substeps_per_sample >= 1");
  }
  if ((cfg.method == Method::ETDRK4) != is_pde(id)) {
    throw Error(Errc::ConfigInvalid, "ODE systems integrate with RK4, PDE systems with ETDRK4");
  }
  detail::check_finite_bounded(x0, 0);
  return is_pde(id) ? detail::integrate_pde(params, *grid, x0, cfg) : detail::integrate_ode(params, x0, cfg);
}

inline ArrayF64 integrate(const SystemParams& params, std::span<const double> x0, const IntegratorConfig& cfg) {
  return integrate(params, default_grid(params), x0, cfg);
}

/// Transient discarded before any data is recorded, in time units.
inline double spin_up_horizon(SystemId id) noexcept { return is_pde(id) ? 100.0 : 50.0; }

/// Seeded perturbation of a reference state, integrated through the transient
/// so the returned state lies on the attractor.
inline std::vector<double> spin_up_initial_condition(const SystemParams& params, const std::optional<GridSpec>& grid,
                                                     std::uint64_t seed) {
  validate_params(params);
  const SystemId id = system_of(params);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t dim = state_dimension(params, grid);
  std::vector<double> x0(dim);

  switch (id) {
    case SystemId::Lorenz:
      for (auto& v : x0) v = 1.0 + normal(rng);
      break;
    case SystemId::Rossler:
      x0 = {1.0 + 0.5 * normal(rng), 1.0 + 0.5 * normal(rng), 0.5 * std::abs(normal(rng))};
      break;
    case SystemId::DoublePendulum:
      x0 = {2.0 + 0.1 * normal(rng), 1.5 + 0.1 * normal(rng), 0.1 * normal(rng), 0.1 * normal(rng)};
      break;
    case SystemId::Lorenz96: {
      const double f = std::get<Lorenz96Params>(params).forcing;
      for (auto& v : x0) v = f + 0.01 * normal(rng);
      break;
    }
    case SystemId::KuramotoSivashinsky:
    case SystemId::Burgers: {
      // Random low-wavenumber field: small seed for KS (the instability grows
      // it), order-one for Burgers (which only decays).
      const std::size_t modes = id == SystemId::KuramotoSivashinsky ? 8 : 3;
      const double amp = id == SystemId::KuramotoSivashinsky ? 0.01 : 0.5;
      std::vector<double> a(modes), b(modes);
      for (std::size_t m = 0; m < modes; ++m) {
        a[m] = amp * normal(rng);
        b[m] = amp * normal(rng);
      }
      for (std::size_t i = 0; i < dim; ++i) {
        const double x = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(dim);
        double u = 0;
        for (std::size_t m = 0; m < modes; ++m) {
          const double km = static_cast<double>(m + 1);
          u += a[m] * std::cos(km * x) + b[m] * std::sin(km * x);
        }
        x0[i] = u;
      }
      break;
    }
  }

  IntegratorConfig cfg = default_integrator(id);
  const double horizon = spin_up_horizon(id);
  cfg.substeps_per_sample = static_cast<std::size_t>(std::llround(horizon / cfg.dt));
  cfg.steps = 1;
  auto traj = integrate(params, grid, x0, cfg);
  return traj.column(1);
}

inline std::vector<double> spin_up_initial_condition(const SystemParams& params, std::uint64_t seed) {
  return spin_up_initial_condition(params, default_grid(params), seed);
}

}  // namespace ctf
