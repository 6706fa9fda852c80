#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "priorlift/dataset.hpp"
#include "priorlift/logistic.hpp"

namespace testing {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// X ~ N(0, I_f), Y ~ Bernoulli(sigmoid(theta . (1, X))). Rows [0, r) keep
// labels; r == n gives a fully labeled dataset (with truth).
inline priorlift::Dataset logistic_sample(std::size_t n, std::size_t r, const std::vector<double>& theta,
                                          std::mt19937_64& gen) {
  const std::size_t f = theta.size() - 1;
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif;
  std::vector<double> x(n * f);
  std::vector<std::optional<int>> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double eta = theta[0];
    for (std::size_t k = 0; k < f; ++k) {
      x[i * f + k] = normal(gen);
      eta += theta[k + 1] * x[i * f + k];
    }
    const int label = unif(gen) < sigmoid(eta) ? 1 : 0;
    if (i < r) y[i] = label;
  }
  return priorlift::Dataset::create(std::move(x), f, y, 2);
}

// One standard-normal feature independent of Y ~ Bernoulli(p).
inline priorlift::Dataset independent_sample(std::size_t n, double p, std::mt19937_64& gen) {
  std::normal_distribution<double> normal;
  std::bernoulli_distribution coin(p);
  std::vector<double> x(n);
  std::vector<std::optional<int>> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = normal(gen);
    y[i] = coin(gen) ? 1 : 0;
  }
  return priorlift::Dataset::create(std::move(x), 1, y, 2);
}

inline priorlift::Coefficients coefficients(std::vector<double> theta) {
  priorlift::Coefficients c;
  c.theta = Eigen::Map<Eigen::VectorXd>(theta.data(), static_cast<Eigen::Index>(theta.size()));
  return c;
}

inline std::string data_path(const std::string& name) { return std::string(PRIORLIFT_DATA_DIR) + "/" + name; }

}  // namespace testing
