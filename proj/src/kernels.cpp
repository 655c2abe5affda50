#include "jcanyon/kernels.hpp"

namespace jcanyon::kernels {

namespace {

std::vector<std::size_t> chain_indices(std::size_t n, std::size_t stride) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < n; i += stride) idx.push_back(i);
  if (idx.back() != n - 1) idx.push_back(n - 1);
  return idx;
}

}  // namespace

namespace serial {

std::vector<CVector> loop_states(const SchwingerFrame& frame, const CVector& psi,
                                 const std::vector<SpherePoint>& samples, FrameGauge gauge) {
  std::vector<CVector> out(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    out[k] = frame.rotate(psi, samples[k].theta, samples[k].phi, gauge);
  }
  return out;
}

std::vector<Complex> chain_overlaps(const std::vector<CVector>& states, std::size_t stride) {
  const auto idx = chain_indices(states.size(), stride);
  std::vector<Complex> out(idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const std::size_t next = j + 1 < idx.size() ? idx[j + 1] : 0;
    out[j] = states[idx[j]].dot(states[next]);
  }
  return out;
}

}  // namespace serial

namespace omp {

std::vector<CVector> loop_states(const SchwingerFrame& frame, const CVector& psi,
                                 const std::vector<SpherePoint>& samples, FrameGauge gauge,
                                 int jobs) {
  std::vector<CVector> out(samples.size());
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
  const long n = static_cast<long>(samples.size());
#pragma omp parallel for schedule(static) num_threads(threads)
  for (long k = 0; k < n; ++k) {
    out[k] = frame.rotate(psi, samples[k].theta, samples[k].phi, gauge);
  }
  return out;
}

std::vector<Complex> chain_overlaps(const std::vector<CVector>& states, std::size_t stride, int jobs) {
  const auto idx = chain_indices(states.size(), stride);
  std::vector<Complex> out(idx.size());
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
  const long n = static_cast<long>(idx.size());
#pragma omp parallel for schedule(static) num_threads(threads)
  for (long j = 0; j < n; ++j) {
    const std::size_t next = j + 1 < n ? idx[j + 1] : 0;
    out[j] = states[idx[j]].dot(states[next]);
  }
  return out;
}

}  // namespace omp

}  // namespace jcanyon::kernels
