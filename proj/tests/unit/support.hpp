#pragma once

#include <cstdint>
#include <random>

#include "jcanyon/fock.hpp"

namespace testing {

struct Rng {
  std::mt19937_64 engine;
  explicit Rng(std::uint64_t seed) : engine(seed) {}
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine); }
  jcanyon::Complex gaussian() {
    std::normal_distribution<double> n;
    return {n(engine), n(engine)};
  }
  jcanyon::CVector unit(jcanyon::Index d) {
    jcanyon::CVector v(d);
    for (jcanyon::Index i = 0; i < d; ++i) v(i) = gaussian();
    return v / v.norm();
  }
  jcanyon::CMatrix matrix(jcanyon::Index d) {
    jcanyon::CMatrix a(d, d);
    for (jcanyon::Index i = 0; i < d; ++i)
      for (jcanyon::Index j = 0; j < d; ++j) a(i, j) = gaussian();
    return a;
  }
};

inline double max_abs(const jcanyon::CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace testing
