#include "nmt/noise/noise.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace nmt::noise {

TransitionMatrix::TransitionMatrix(std::size_t k, std::vector<double> row_major)
    : k_(k), t_(std::move(row_major)) {
  if (k < 2) throw std::invalid_argument("transition matrix needs K >= 2");
  if (t_.size() != k * k) throw std::invalid_argument("transition matrix must be K x K");
}

TransitionMatrix TransitionMatrix::identity(std::size_t k) { return uniform_flip_matrix(k, 0.0); }

void TransitionMatrix::validate() const {
  for (std::size_t i = 0; i < k_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < k_; ++j) {
      if (at(j, i) < 0.0) throw std::invalid_argument("transition matrix has a negative entry");
      s += at(j, i);
    }
    if (std::abs(s - 1.0) > 1e-9)
      throw std::invalid_argument("transition matrix column " + std::to_string(i) + " sums to " +
                                  std::to_string(s));
  }
}

TransitionMatrix uniform_flip_matrix(std::size_t k, double rho) {
  if (k < 2) throw std::invalid_argument("uniform_flip_matrix: K must be >= 2");
  if (!(rho >= 0.0 && rho < 1.0))
    throw std::invalid_argument("uniform_flip_matrix: rho must lie in [0, 1)");
  const double off = rho / static_cast<double>(k - 1);
  std::vector<double> t(k * k, off);
  for (std::size_t i = 0; i < k; ++i) t[i * k + i] = 1.0 - rho;
  return TransitionMatrix(k, std::move(t));
}

namespace {

template <class Mask>
double mask_rate(const Mask& m) {
  if (m.empty()) return 0.0;
  return static_cast<double>(std::count(m.begin(), m.end(), std::uint8_t{1})) /
         static_cast<double>(m.size());
}

}  // namespace

double DiscreteCorruption::realized_rate() const { return mask_rate(flipped); }
double ContinuousCorruption::realized_rate() const { return mask_rate(replaced); }

DiscreteCorruption corrupt_discrete(std::span<const int> clean, const TransitionMatrix& t, Rng& rng) {
  const std::size_t k = t.classes();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DiscreteCorruption out;
  out.labels.resize(clean.size());
  out.flipped.resize(clean.size());
  for (std::size_t n = 0; n < clean.size(); ++n) {
    const int c = clean[n];
    if (c < 0 || static_cast<std::size_t>(c) >= k)
      throw std::out_of_range("corrupt_discrete: label " + std::to_string(c) + " out of range");
    const double r = u(rng);
    double acc = 0.0;
    std::size_t j = 0;
    for (; j + 1 < k; ++j) {
      acc += t.at(j, static_cast<std::size_t>(c));
      if (r < acc) break;
    }
    out.labels[n] = static_cast<int>(j);
    out.flipped[n] = static_cast<int>(j) != c;
  }
  return out;
}

ContinuousCorruption corrupt_continuous(std::span<const double> clean, std::size_t d, double rho,
                                        Rng& rng) {
  if (d == 0 || clean.size() % d != 0)
    throw std::invalid_argument("corrupt_continuous: data is not a multiple of d");
  if (!(rho >= 0.0 && rho <= 1.0))
    throw std::invalid_argument("corrupt_continuous: rho must lie in [0, 1]");
  const std::size_t n = clean.size() / d;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  ContinuousCorruption out;
  out.values.assign(clean.begin(), clean.end());
  out.replaced.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    if (coin(rng) < rho) {
      out.replaced[r] = 1;
      for (std::size_t j = 0; j < d; ++j) out.values[r * d + j] = value(rng);
    }
  }
  return out;
}

std::vector<int> majority_vote(const std::vector<std::vector<int>>& sets, Rng& rng) {
  if (sets.empty()) throw std::invalid_argument("majority_vote: no label sets");
  const std::size_t n = sets.front().size();
  for (const auto& s : sets)
    if (s.size() != n) throw std::invalid_argument("majority_vote: label sets differ in length");
  std::vector<int> out(n);
  std::map<int, int> counts;
  std::vector<int> tied;
  for (std::size_t i = 0; i < n; ++i) {
    counts.clear();
    for (const auto& s : sets) ++counts[s[i]];
    int best = 0;
    for (const auto& [label, c] : counts) best = std::max(best, c);
    tied.clear();
    for (const auto& [label, c] : counts)
      if (c == best) tied.push_back(label);
    if (tied.size() == 1) {
      out[i] = tied.front();
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, tied.size() - 1);
      out[i] = tied[pick(rng)];
    }
  }
  return out;
}

}  // namespace nmt::noise
