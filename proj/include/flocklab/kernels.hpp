#pragma once

// Data-parallel kernels. Each kernel has a serial reference in
// kernels::serial and an OpenMP version in kernels::parallel; the two return
// identical results (every work item is independent and deterministic), which
// the tests check bit-for-bit.

#include "flocklab/frequency_response.hpp"

#include <exception>
#include <optional>
#include <span>
#include <type_traits>
#include <vector>

#include <omp.h>

namespace flocklab::kernels {

/// Applies FLOCKLAB_THREADS (if set and positive) as the OpenMP thread cap.
/// Returns the resulting maximum thread count.
int configure_threads();

namespace serial {

std::vector<ResponsePoint> response_sweep(const ResponseSolver& solver,
                                          std::span<const double> grid);

/// |a_N| per grid point; -1 marks a point where the solve failed.
std::vector<double> gain_sweep(const ResponseSolver& solver,
                               std::span<const double> grid);

/// Evaluates fn(item) for every item in order. Exceptions propagate from the
/// first failing item.
template <class T, class F>
auto map(const std::vector<T>& items, F&& fn)
    -> std::vector<std::invoke_result_t<F&, const T&>>
{
  std::vector<std::invoke_result_t<F&, const T&>> out;
  out.reserve(items.size());
  for (const T& item : items)
    out.push_back(fn(item));
  return out;
}

} // namespace serial

namespace parallel {

std::vector<ResponsePoint> response_sweep(const ResponseSolver& solver,
                                          std::span<const double> grid);

std::vector<double> gain_sweep(const ResponseSolver& solver,
                               std::span<const double> grid);

/// Same contract as serial::map; the exception of the lowest failing index is
/// rethrown after all items finish.
template <class T, class F>
auto map(const std::vector<T>& items, F&& fn)
    -> std::vector<std::invoke_result_t<F&, const T&>>
{
  using R = std::invoke_result_t<F&, const T&>;
  const auto n = static_cast<long>(items.size());
  std::vector<std::optional<R>> slots(items.size());
  std::vector<std::exception_ptr> errors(items.size());

#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    try {
      slots[static_cast<std::size_t>(i)].emplace(
          fn(items[static_cast<std::size_t>(i)]));
    }
    catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }

  for (const auto& e : errors)
    if (e)
      std::rethrow_exception(e);

  std::vector<R> out;
  out.reserve(items.size());
  for (auto& s : slots)
    out.push_back(std::move(*s));
  return out;
}

} // namespace parallel

} // namespace flocklab::kernels
