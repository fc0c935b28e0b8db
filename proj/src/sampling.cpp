#include "nlclass/sampling.hpp"

#include "nlclass/errors.hpp"

namespace nlclass {

namespace {

std::vector<unsigned> first_primes(std::size_t count) {
  std::vector<unsigned> primes;
  for (unsigned c = 2; primes.size() < count; ++c) {
    bool prime = true;
    for (unsigned p : primes) {
      if (p * p > c) break;
      if (c % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(c);
  }
  return primes;
}

double lerp(const Interval& iv, double t) { return iv.lo() + t * (iv.hi() - iv.lo()); }

}  // namespace

double radical_inverse(std::uint64_t k, unsigned base) {
  if (base < 2) throw DomainError("radical inverse base must be at least 2");
  const double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (k > 0) {
    r += f * static_cast<double>(k % base);
    k /= base;
    f *= inv;
  }
  return r;
}

std::vector<double> halton_point(std::uint64_t k, const IntervalBox& box) {
  const auto primes = first_primes(box.size());
  std::vector<double> z(box.size());
  for (std::size_t d = 0; d < box.size(); ++d) z[d] = lerp(box[d], radical_inverse(k, primes[d]));
  return z;
}

std::vector<std::vector<double>> design_points(const IntervalBox& box, std::size_t budget) {
  const std::size_t dim = box.size();
  std::vector<std::vector<double>> pts;
  pts.push_back(box.midpoint());
  if (dim <= 12) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << dim); ++mask) {
      std::vector<double> v(dim);
      for (std::size_t d = 0; d < dim; ++d) v[d] = (mask >> d) & 1u ? box[d].hi() : box[d].lo();
      pts.push_back(std::move(v));
    }
  }
  const auto primes = first_primes(dim);
  for (std::uint64_t k = 1; k <= budget; ++k) {
    std::vector<double> z(dim);
    for (std::size_t d = 0; d < dim; ++d) z[d] = lerp(box[d], radical_inverse(k, primes[d]));
    pts.push_back(std::move(z));
  }
  return pts;
}

std::vector<double> uniform_point(const IntervalBox& box, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> z(box.size());
  for (std::size_t d = 0; d < box.size(); ++d) z[d] = lerp(box[d], unit(rng));
  return z;
}

}  // namespace nlclass
