#include "nlclass/sim.hpp"

#include <cmath>
#include <cstdio>

#include "nlclass/errors.hpp"

namespace nlclass {

std::vector<double> InputSignal::at(double t, std::size_t m) const {
  std::vector<double> u(m, 0.0);
  if (kind == Kind::zero) return u;
  auto get = [](const std::vector<double>& v, std::size_t i) { return i < v.size() ? v[i] : 0.0; };
  for (std::size_t i = 0; i < m; ++i) {
    u[i] = get(offset, i);
    if (kind == Kind::sinusoid) u[i] += get(amplitude, i) * std::sin(get(omega, i) * t + get(phase, i));
  }
  return u;
}

namespace {

constexpr double kLimit = 1e12;

void check_finite(std::span<const double> v) {
  for (double x : v)
    if (!(std::fabs(x) <= kLimit)) throw NonFiniteState("state left the finite range (|x| > 1e12 or NaN)");
}

// Right-hand side of the stacked system s = (x, xhat). With no observer
// (`L` null) s = x.
class Dynamics {
 public:
  Dynamics(const SystemModel& model, const Matrix* L) : model_(model), nl_(model), L_(L) {}

  void eval(std::span<const double> s, std::span<const double> u, std::span<const double> y_hold,
            std::span<double> ds) const {
    const std::size_t n = model_.n;
    plant(s.first(n), u, ds.first(n));
    if (!L_) return;
    const auto xhat = s.subspan(n, n);
    auto dxhat = ds.subspan(n, n);
    plant(xhat, u, dxhat);
    // innovation y - C xhat, with y from the plant stage or held
    std::vector<double> innov(model_.p);
    for (std::size_t r = 0; r < model_.p; ++r) {
      double y = 0.0;
      double yhat = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        y += model_.C(r, j) * s[j];
        yhat += model_.C(r, j) * xhat[j];
      }
      innov[r] = (y_hold.empty() ? y : y_hold[r]) - yhat;
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t r = 0; r < model_.p; ++r) dxhat[i] += (*L_)(i, r) * innov[r];
  }

 private:
  void plant(std::span<const double> x, std::span<const double> u, std::span<double> dx) const {
    const std::size_t n = model_.n;
    nl_.gf(x, u, dx);
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += model_.A(i, j) * x[j];
      for (std::size_t j = 0; j < model_.m; ++j) acc += model_.B(i, j) * u[j];
      dx[i] += acc;
    }
  }

  const SystemModel& model_;
  Nonlinearity nl_;
  const Matrix* L_;
};

// Classic RK4. `u_at(c)` returns the input at t + c dt.
template <class InputAt>
void rk4(const Dynamics& f, std::vector<double>& s, double dt, const InputAt& u_at,
         std::span<const double> y_hold) {
  const std::size_t d = s.size();
  std::vector<double> k1(d), k2(d), k3(d), k4(d), tmp(d);
  const std::vector<double> u0 = u_at(0.0);
  const std::vector<double> uh = u_at(0.5);
  const std::vector<double> u1 = u_at(1.0);
  f.eval(s, u0, y_hold, k1);
  for (std::size_t i = 0; i < d; ++i) tmp[i] = s[i] + 0.5 * dt * k1[i];
  f.eval(tmp, uh, y_hold, k2);
  for (std::size_t i = 0; i < d; ++i) tmp[i] = s[i] + 0.5 * dt * k2[i];
  f.eval(tmp, uh, y_hold, k3);
  for (std::size_t i = 0; i < d; ++i) tmp[i] = s[i] + dt * k3[i];
  f.eval(tmp, u1, y_hold, k4);
  for (std::size_t i = 0; i < d; ++i) s[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  check_finite(s);
}

void check_step(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("time step must be positive");
}

void check_gain(const SystemModel& model, const Matrix& L) {
  if (L.rows() != model.n || L.cols() != model.p) throw DimensionMismatch("observer gain must be n x p");
}

}  // namespace

std::vector<double> step_plant(const SystemModel& model, std::span<const double> x,
                               std::span<const double> u, double dt) {
  check_step(dt);
  if (x.size() != model.n || u.size() != model.m) throw DimensionMismatch("plant state or input has the wrong length");
  const Dynamics f(model, nullptr);
  std::vector<double> s(x.begin(), x.end());
  const std::vector<double> held(u.begin(), u.end());
  rk4(f, s, dt, [&](double) { return held; }, {});
  return s;
}

std::vector<double> step_observer(const SystemModel& model, const Matrix& L,
                                  std::span<const double> xhat, std::span<const double> u,
                                  std::span<const double> y, double dt) {
  check_step(dt);
  check_gain(model, L);
  if (xhat.size() != model.n || u.size() != model.m || y.size() != model.p)
    throw DimensionMismatch("observer state, input or output has the wrong length");
  const Dynamics f(model, &L);
  // the plant half is a dummy copy; only the observer half is kept
  std::vector<double> s(2 * model.n);
  std::copy(xhat.begin(), xhat.end(), s.begin());
  std::copy(xhat.begin(), xhat.end(), s.begin() + static_cast<std::ptrdiff_t>(model.n));
  const std::vector<double> held(u.begin(), u.end());
  rk4(f, s, dt, [&](double) { return held; }, y);
  return std::vector<double>(s.begin() + static_cast<std::ptrdiff_t>(model.n), s.end());
}

Trajectory run(const SystemModel& model, const Matrix& L, const SimConfig& cfg) {
  check_step(cfg.dt);
  check_gain(model, L);
  if (!(cfg.t_end >= cfg.dt)) throw DomainError("t_end must be at least dt");
  const std::size_t n = model.n;
  if (cfg.x0.size() != n || cfg.xhat0.size() != n) throw DimensionMismatch("x0 and xhat0 must have length n");

  const auto steps = static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt));
  const Dynamics f(model, &L);
  std::vector<double> s(2 * n);
  std::copy(cfg.x0.begin(), cfg.x0.end(), s.begin());
  std::copy(cfg.xhat0.begin(), cfg.xhat0.end(), s.begin() + static_cast<std::ptrdiff_t>(n));
  check_finite(s);

  Trajectory tr;
  tr.times.reserve(steps + 1);
  auto record = [&](double t) {
    tr.times.push_back(t);
    tr.states.emplace_back(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(n));
    tr.estimates.emplace_back(s.begin() + static_cast<std::ptrdiff_t>(n), s.end());
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) e += (s[i] - s[n + i]) * (s[i] - s[n + i]);
    tr.errors.push_back(std::sqrt(e));
  };
  record(0.0);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    rk4(f, s, cfg.dt, [&](double c) { return cfg.input.at(t + c * cfg.dt, model.m); }, {});
    record(static_cast<double>(k + 1) * cfg.dt);
  }
  return tr;
}

void write_csv(std::ostream& out, const Trajectory& traj) {
  const std::size_t n = traj.states.empty() ? 0 : traj.states.front().size();
  out << "t";
  for (std::size_t i = 1; i <= n; ++i) out << ",x" << i;
  for (std::size_t i = 1; i <= n; ++i) out << ",xhat" << i;
  out << ",err\n";
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v + 0.0);
    out << buf;
  };
  for (std::size_t k = 0; k < traj.size(); ++k) {
    put(traj.times[k]);
    for (double v : traj.states[k]) out << ',', put(v);
    for (double v : traj.estimates[k]) out << ',', put(v);
    out << ',';
    put(traj.errors[k]);
    out << '\n';
  }
}

}  // namespace nlclass
