#pragma once

#include <cstddef>
#include <functional>
#include <ostream>
#include <span>
#include <vector>

#include "nlclass/matrix.hpp"
#include "nlclass/model.hpp"

namespace nlclass {

// u(t): zero, a constant vector, or per-channel offset + amplitude * sin(omega t + phase).
struct InputSignal {
  enum class Kind { zero, constant, sinusoid };
  Kind kind = Kind::zero;
  std::vector<double> offset;
  std::vector<double> amplitude;
  std::vector<double> omega;
  std::vector<double> phase;

  std::vector<double> at(double t, std::size_t m) const;
};

struct SimConfig {
  double t_end = 10.0;
  double dt = 1e-3;
  std::vector<double> x0;
  std::vector<double> xhat0;
  InputSignal input;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::vector<std::vector<double>> estimates;
  std::vector<double> errors;  // |x - xhat|_2

  std::size_t size() const { return times.size(); }
};

// One RK4 step of x' = A x + G f(x, u) + B u with u held over the step.
std::vector<double> step_plant(const SystemModel& model, std::span<const double> x,
                               std::span<const double> u, double dt);

// One RK4 step of xhat' = A xhat + G f(xhat, u) + B u + L (y - C xhat) with u
// and y held over the step.
std::vector<double> step_observer(const SystemModel& model, const Matrix& L,
                                  std::span<const double> xhat, std::span<const double> u,
                                  std::span<const double> y, double dt);

// Plant and observer integrated as one stacked system, so every RK4 stage of
// the observer sees y = C x of the matching plant stage. Throws
// NonFiniteState when a component is NaN or exceeds 1e12 in magnitude.
Trajectory run(const SystemModel& model, const Matrix& L, const SimConfig& cfg);

// Header t,x1..xn,xhat1..xhatn,err then one row per sample at 17 digits.
void write_csv(std::ostream& out, const Trajectory& traj);

}  // namespace nlclass
