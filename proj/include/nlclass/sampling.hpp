#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "nlclass/interval.hpp"

namespace nlclass {

// Van der Corput radical inverse of k in the given base, in [0, 1).
double radical_inverse(std::uint64_t k, unsigned base);

// Point k >= 1 of the Halton sequence mapped into box (prime bases 2, 3, 5, ...).
std::vector<double> halton_point(std::uint64_t k, const IntervalBox& box);

// Deterministic design: the box center, every vertex when the box has at
// most 12 dimensions, then `budget` Halton points.
std::vector<std::vector<double>> design_points(const IntervalBox& box, std::size_t budget);

// Uniform point in box.
std::vector<double> uniform_point(const IntervalBox& box, std::mt19937_64& rng);

}  // namespace nlclass
