#include "nlclass/matfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "nlclass/errors.hpp"
#include "nlclass/omp.hpp"

namespace nlclass {

SymMatrix::SymMatrix(const Matrix& m) : m_(m.rows(), m.cols()) {
  if (m.rows() != m.cols()) throw DimensionMismatch("symmetric matrix must be square");
  const std::size_t n = m.rows();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(m(i, j))) throw DomainError("symmetric matrix has a non-finite entry");
      m_(i, j) = 0.5 * (m(i, j) + m(j, i));
    }
  }
}

namespace {

double off_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

EigenDecomposition eig_sym(const SymMatrix& m) {
  const std::size_t n = m.n();
  Matrix a = m.matrix();
  Matrix v = Matrix::identity(n);
  const double target = 1e-12 * a.frobenius();
  int sweeps = 0;
  while (off_norm(a) >= target && off_norm(a) > 0.0) {
    if (sweeps == 100) throw NonConvergence("Jacobi eigensolver did not converge in 100 sweeps");
    ++sweeps;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::fabs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  out.sweeps = sweeps;
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

double lambda_max(const SymMatrix& m) {
  if (m.n() == 0) throw DimensionMismatch("eigenvalue of an empty matrix");
  return eig_sym(m).values.back();
}

double lambda_min(const SymMatrix& m) {
  if (m.n() == 0) throw DimensionMismatch("eigenvalue of an empty matrix");
  return eig_sym(m).values.front();
}

double gershgorin_max(const SymMatrix& m) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m.n(); ++i) {
    double r = m(i, i);
    for (std::size_t j = 0; j < m.n(); ++j)
      if (j != i) r += std::fabs(m(i, j));
    best = std::max(best, r);
  }
  return best;
}

double gershgorin_min(const SymMatrix& m) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m.n(); ++i) {
    double r = m(i, i);
    for (std::size_t j = 0; j < m.n(); ++j)
      if (j != i) r -= std::fabs(m(i, j));
    best = std::min(best, r);
  }
  return best;
}

double thm3_max(const SymMatrix& m, double zeta) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m.n(); ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < m.n(); ++j)
      if (j != i) off = std::max(off, std::fabs(m(i, j)));
    best = std::max(best, m(i, i) + zeta * off);
  }
  return best;
}

double zeta_n(std::size_t n) {
  if (n < 2) throw DomainError("zeta_n needs n >= 2");
  return static_cast<double>(n - 1);
}

double zeta_objective(const std::vector<double>& v, std::size_t i) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (i >= v.size() || !(v[i] > 0.0)) return nan;
  double total = 0.0;
  for (double x : v) {
    if (std::fabs(x) > v[i]) return nan;
    total += std::fabs(x);
  }
  if (std::fabs(total - 1.0) > 1e-12) return nan;
  return 1.0 / v[i] - 1.0;
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct ZetaSample {
  std::vector<double> v;
  std::size_t i = 0;
};

// Sample k: every fourth is a grid point, the rest alternate between the
// feasible construction and an unconstrained signed point on the l1 sphere.
ZetaSample zeta_sample(std::size_t n, std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(splitmix(seed ^ splitmix(k)));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ZetaSample s;
  s.v.assign(n, 0.0);
  s.i = static_cast<std::size_t>(rng() % n);
  std::vector<double> raw(n);
  switch (k % 4) {
    case 0: {
      constexpr int levels = 8;
      std::uint64_t code = k / 4;
      for (std::size_t j = 0; j < n; ++j) {
        raw[j] = static_cast<double>(code % (levels + 1)) / levels;
        code /= levels + 1;
      }
      raw[s.i] = 1.0;
      break;
    }
    case 1:
    case 2:
      for (std::size_t j = 0; j < n; ++j) raw[j] = unit(rng);
      raw[s.i] = 1.0;
      break;
    default:
      for (std::size_t j = 0; j < n; ++j) raw[j] = -std::log(1.0 - unit(rng));
      break;
  }
  double total = 0.0;
  for (double r : raw) total += r;
  for (std::size_t j = 0; j < n; ++j) {
    const double sign = (j != s.i && (rng() & 1u)) ? -1.0 : 1.0;
    s.v[j] = sign * raw[j] / total;
  }
  return s;
}

struct ZetaBest {
  std::size_t feasible = 0;
  double value = -std::numeric_limits<double>::infinity();
  std::size_t index = 0;

  void offer(double obj, std::size_t k) {
    if (std::isnan(obj)) return;
    ++feasible;
    if (obj > value || (obj == value && k < index)) {
      value = obj;
      index = k;
    }
  }
  void merge(const ZetaBest& o) {
    feasible += o.feasible;
    if (o.value > value || (o.value == value && o.index < index)) {
      value = o.value;
      index = o.index;
    }
  }
};

ZetaCheck finish(std::size_t n, std::size_t samples, std::uint64_t seed, const ZetaBest& best) {
  ZetaCheck out;
  out.n = n;
  out.samples = samples;
  out.feasible = best.feasible;
  out.best = best.feasible ? best.value : 0.0;
  if (best.feasible) out.best_point = zeta_sample(n, best.index, seed).v;
  out.uniform_value = zeta_objective(std::vector<double>(n, 1.0 / static_cast<double>(n)), 0);
  return out;
}

}  // namespace

ZetaCheck verify_zeta_serial(std::size_t n, std::size_t samples, std::uint64_t seed) {
  if (n < 2) throw DomainError("zeta verification needs n >= 2");
  ZetaBest best;
  for (std::size_t k = 0; k < samples; ++k) {
    const ZetaSample s = zeta_sample(n, k, seed);
    best.offer(zeta_objective(s.v, s.i), k);
  }
  return finish(n, samples, seed, best);
}

ZetaCheck verify_zeta(std::size_t n, std::size_t samples, std::uint64_t seed, int threads) {
  if (n < 2) throw DomainError("zeta verification needs n >= 2");
  const int nt = resolve_threads(threads);
  std::vector<ZetaBest> partial(static_cast<std::size_t>(nt));
  const auto count = static_cast<std::ptrdiff_t>(samples);
#pragma omp parallel num_threads(nt)
  {
    ZetaBest& mine = partial[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(static)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
      const ZetaSample s = zeta_sample(n, static_cast<std::size_t>(k), seed);
      mine.offer(zeta_objective(s.v, s.i), static_cast<std::size_t>(k));
    }
  }
  ZetaBest best;
  for (const auto& p : partial) best.merge(p);
  return finish(n, samples, seed, best);
}

}  // namespace nlclass
