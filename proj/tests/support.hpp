#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "nlclass/io.hpp"
#include "nlclass/model.hpp"

namespace testing {

inline std::string data_path(const std::string& name) { return std::string(NLCLASS_DATA_DIR) + "/" + name; }

inline nlclass::SystemModel moving_object() { return nlclass::load_system(data_path("moving_object.sys")); }

// Builds a model from expression strings with G = I and the given box for
// every state.
inline nlclass::SystemModel model_from(std::size_t n, const std::vector<std::string>& f, double r,
                                       nlclass::Matrix A = {}) {
  nlclass::SystemModel m;
  m.n = n;
  m.m = 0;
  m.p = n;
  m.g = f.size();
  m.A = A.rows() ? A : nlclass::Matrix(n, n);
  m.B = nlclass::Matrix(n, 0);
  m.C = nlclass::Matrix::identity(n);
  m.G = nlclass::Matrix(n, f.size());
  for (std::size_t i = 0; i < std::min(n, f.size()); ++i) m.G(i, i) = 1.0;
  for (const auto& s : f) m.f.push_back(nlclass::parse(s, n, 0));
  m.omega = nlclass::IntervalBox(std::vector<nlclass::Interval>(n, nlclass::Interval(-r, r)));
  m.validate();
  return m;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace testing
