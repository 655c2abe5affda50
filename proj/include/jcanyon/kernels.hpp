#pragma once

// Data-parallel kernels. Every kernel has a serial reference under
// kernels::serial and an OpenMP version under kernels::omp with identical
// results: the parallel versions only distribute independent work items and
// leave all reductions to a fixed-order serial pass.

#include <cstddef>
#include <exception>
#include <optional>
#include <type_traits>
#include <vector>

#include <omp.h>

#include "jcanyon/parampath.hpp"

namespace jcanyon::kernels {

namespace serial {

/// psi_k = U(theta_k, phi_k) psi for every sample.
std::vector<CVector> loop_states(const SchwingerFrame& frame, const CVector& psi,
                                 const std::vector<SpherePoint>& samples, FrameGauge gauge);

/// <psi_k|psi_{k+stride}> along the chain 0, stride, 2 stride, ..., plus the
/// closing overlap from the last chain element back to psi_0.
std::vector<Complex> chain_overlaps(const std::vector<CVector>& states, std::size_t stride = 1);

template <class F>
auto map(std::size_t n, F&& f) -> std::vector<std::invoke_result_t<F&, std::size_t>> {
  std::vector<std::invoke_result_t<F&, std::size_t>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(f(i));
  return out;
}

}  // namespace serial

namespace omp {

std::vector<CVector> loop_states(const SchwingerFrame& frame, const CVector& psi,
                                 const std::vector<SpherePoint>& samples, FrameGauge gauge,
                                 int jobs = 0);

std::vector<Complex> chain_overlaps(const std::vector<CVector>& states, std::size_t stride = 1,
                                    int jobs = 0);

/// f(0), ..., f(n-1) on a dynamic schedule; results are stored by index and
/// the exception from the lowest failing index is rethrown.
template <class F>
auto map(std::size_t n, F&& f, int jobs = 0) -> std::vector<std::invoke_result_t<F&, std::size_t>> {
  using R = std::invoke_result_t<F&, std::size_t>;
  std::vector<std::optional<R>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long i = 0; i < count; ++i) {
    try {
      slots[i].emplace(f(static_cast<std::size_t>(i)));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<R> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace omp

}  // namespace jcanyon::kernels
