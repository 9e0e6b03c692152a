#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nmt/random.hpp"

namespace nmt::noise {

// Column-stochastic corruption model: at(j, i) = P(recorded j | true i).
class TransitionMatrix {
 public:
  TransitionMatrix(std::size_t k, std::vector<double> row_major);
  static TransitionMatrix identity(std::size_t k);

  std::size_t classes() const { return k_; }
  double at(std::size_t j, std::size_t i) const { return t_[j * k_ + i]; }
  std::span<const double> data() const { return t_; }
  // Throws std::invalid_argument if an entry is negative or a column does not
  // sum to 1 within 1e-9.
  void validate() const;

 private:
  std::size_t k_;
  std::vector<double> t_;
};

// Diagonal 1 - rho, off-diagonal rho / (K - 1).
TransitionMatrix uniform_flip_matrix(std::size_t k, double rho);

struct DiscreteCorruption {
  std::vector<int> labels;
  std::vector<std::uint8_t> flipped;  // 1 where the recorded label differs from the clean one
  double realized_rate() const;
};

// Each label independently resampled from column T[:, clean].
DiscreteCorruption corrupt_discrete(std::span<const int> clean, const TransitionMatrix& t, Rng& rng);

struct ContinuousCorruption {
  std::vector<double> values;          // (n, d) row-major
  std::vector<std::uint8_t> replaced;  // per row
  double realized_rate() const;
};

// With probability rho per row, the whole d-vector is replaced by a uniform
// draw from [-1, 1]^d.
ContinuousCorruption corrupt_continuous(std::span<const double> clean, std::size_t d, double rho,
                                        Rng& rng);

// Per-sample plurality label; ties broken uniformly at random among the tied
// classes (listed in ascending order, so the result does not depend on the
// order of the label sets).
std::vector<int> majority_vote(const std::vector<std::vector<int>>& label_sets, Rng& rng);

}  // namespace nmt::noise
