#pragma once

#include <cstdint>
#include <vector>

#include "bbmx/offspring.hpp"
#include "bbmx/random.hpp"

namespace bbmx {

// One realization of the size-biased single-lineage description: branch
// times are a Poisson point process of intensity 2 dx on (0, horizon], each
// carrying a size-biased offspring count and a uniform mark.
struct SpineRealization {
  std::vector<double> times;             // strictly increasing
  std::vector<std::uint32_t> offspring;  // size-biased counts, >= 1
  std::vector<std::uint32_t> marks;      // uniform on {0, ..., offspring-1}
  double horizon = 0.0;
};

// Inter-arrival times iid Exp(2); counts from k p_k / 2; marks uniform given
// the count; all mutually independent.
SpineRealization sample_spine(double horizon, const OffspringDistribution& dist,
                              RandomStream& rng);

// sum (l_j - 1) exp(-t_j) over points with t_j in [r, t].
double campbell_functional(const SpineRealization& spine, double r, double t);

// P(T > s) for T the sum of i_star iid Exp(2) variables:
// exp(-2s) sum_{i < i_star} (2s)^i / i!.
double erlang_survival(std::uint32_t i_star, double s);

// P(first nonzero mark occurs at index i_star) computed from the size-biased
// law: E(1 - 1/l) * (E 1/l)^(i_star - 1). Bounded by ((1+p_1)/2)^(i_star-1).
double first_nonzero_mark_law(const OffspringDistribution& dist,
                              std::uint32_t i_star);

}  // namespace bbmx
