#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

// Small exact rationals for brute-force oracles. Inputs stay tiny, so 64-bit
// numerators and denominators with eager reduction never overflow.
namespace testing {

struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Fraction(std::int64_t n = 0, std::int64_t d = 1) : num(n), den(d) {
    if (den == 0) throw std::domain_error("zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  friend Fraction operator+(Fraction a, Fraction b) {
    const std::int64_t l = std::lcm(a.den, b.den);
    return {a.num * (l / a.den) + b.num * (l / b.den), l};
  }
  friend Fraction operator-(Fraction a, Fraction b) { return a + Fraction(-b.num, b.den); }
  friend Fraction operator*(Fraction a, Fraction b) {
    const Fraction x(a.num, b.den);
    const Fraction y(b.num, a.den);
    return {x.num * y.num, x.den * y.den};
  }
  friend bool operator<(Fraction a, Fraction b) { return (a - b).num < 0; }

  // Both parts are far below 2^53, so this single division is correctly rounded.
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct CellCounts {
  int labeled;
  int unlabeled;
  int hits;  // labeled rows in the class of interest
};

// q = sum_k p_k d_k and (1/n)[sum_k d_k^2 p_k (1 - p_k) - 2 sum_{k<s} d_k d_s p_k p_s].
inline std::pair<Fraction, Fraction> discrete_oracle(const std::vector<CellCounts>& cells) {
  int n = 0;
  for (const auto& c : cells) n += c.labeled + c.unlabeled;
  std::vector<Fraction> p;
  std::vector<Fraction> d;
  for (const auto& c : cells) {
    p.emplace_back(c.labeled + c.unlabeled, n);
    d.emplace_back(c.hits, c.labeled);
  }
  Fraction q;
  Fraction bracket;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    q = q + p[k] * d[k];
    bracket = bracket + d[k] * d[k] * p[k] * (Fraction(1) - p[k]);
    for (std::size_t s = k + 1; s < cells.size(); ++s) {
      bracket = bracket - Fraction(2) * d[k] * d[s] * p[k] * p[s];
    }
  }
  return {q, bracket * Fraction(1, n)};
}

}  // namespace testing
