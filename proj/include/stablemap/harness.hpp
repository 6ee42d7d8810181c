#pragma once

// Reproducible farm of independent realisations. Realisation i always sees
// RealisationStreams::derive(seed, i), and results are stored by index, so
// the output does not depend on the number of workers or on scheduling.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "stablemap/errors.hpp"
#include "stablemap/rng.hpp"

namespace stablemap {

enum class Outcome : std::uint8_t { ok, guard_exceeded, diverged, singularity, failed };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::ok: return "ok";
    case Outcome::guard_exceeded: return "guard_exceeded";
    case Outcome::diverged: return "diverged";
    case Outcome::singularity: return "singularity_hit";
    case Outcome::failed: return "failed";
  }
  return "unknown";
}

struct FailureCounts {
  std::uint64_t guard_exceeded = 0;
  std::uint64_t diverged = 0;
  std::uint64_t singularity = 0;
  std::uint64_t failed = 0;

  std::uint64_t total() const noexcept { return guard_exceeded + diverged + singularity + failed; }
};

struct RunOptions {
  std::uint64_t realisations = 1;
  std::uint64_t master_seed = 0;
  unsigned width = 1;  // worker threads; 0 means hardware concurrency
};

template <class T>
struct RunResult {
  std::vector<std::optional<T>> values;  // by realisation index; empty on failure
  std::vector<Outcome> outcomes;
  std::vector<std::string> messages;  // failure message per index, empty when ok
  FailureCounts failures;

  /// Successful values in index order.
  std::vector<T> successes() const {
    std::vector<T> out;
    out.reserve(values.size());
    for (const auto& v : values)
      if (v) out.push_back(*v);
    return out;
  }
};

/// Every realisation failed.
class run_error : public std::runtime_error {
public:
  run_error(const std::string& what, FailureCounts counts) : std::runtime_error(what), counts_(counts) {}
  const FailureCounts& counts() const noexcept { return counts_; }

private:
  FailureCounts counts_;
};

/// Execute `task(index, streams)` for every index in [0, realisations).
/// Exceptions from a task are recorded per realisation and never abort the
/// run; if all realisations fail, run_error is thrown.
template <class Task>
auto run(const RunOptions& opts, Task&& task)
    -> RunResult<std::decay_t<std::invoke_result_t<Task&, std::uint64_t, RealisationStreams&>>> {
  using T = std::decay_t<std::invoke_result_t<Task&, std::uint64_t, RealisationStreams&>>;
  if (opts.realisations == 0) throw invalid_parameter("realisation count must be at least 1");
  const std::uint64_t count = opts.realisations;
  RunResult<T> result;
  result.values.resize(count);
  result.outcomes.assign(count, Outcome::ok);
  result.messages.resize(count);

  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (std::uint64_t i = next.fetch_add(1, std::memory_order_relaxed); i < count;
         i = next.fetch_add(1, std::memory_order_relaxed)) {
      RealisationStreams streams = RealisationStreams::derive(opts.master_seed, i);
      try {
        result.values[i] = task(i, streams);
      } catch (const guard_exceeded& e) {
        result.outcomes[i] = Outcome::guard_exceeded;
        result.messages[i] = e.what();
      } catch (const diverged_trajectory& e) {
        result.outcomes[i] = Outcome::diverged;
        result.messages[i] = e.what();
      } catch (const singularity_hit& e) {
        result.outcomes[i] = Outcome::singularity;
        result.messages[i] = e.what();
      } catch (const invalid_parameter&) {
        throw;
      } catch (const std::exception& e) {
        result.outcomes[i] = Outcome::failed;
        result.messages[i] = e.what();
      }
    }
  };

  unsigned width = opts.width == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opts.width;
  width = static_cast<unsigned>(std::min<std::uint64_t>(width, count));
  if (width <= 1) {
    worker();
  } else {
    std::vector<std::exception_ptr> errors(width);
    std::vector<std::thread> pool;
    pool.reserve(width);
    for (unsigned w = 0; w < width; ++w)
      pool.emplace_back([&, w] {
        try {
          worker();
        } catch (...) {
          errors[w] = std::current_exception();
          next.store(count);
        }
      });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  for (const Outcome o : result.outcomes) {
    switch (o) {
      case Outcome::ok: break;
      case Outcome::guard_exceeded: ++result.failures.guard_exceeded; break;
      case Outcome::diverged: ++result.failures.diverged; break;
      case Outcome::singularity: ++result.failures.singularity; break;
      case Outcome::failed: ++result.failures.failed; break;
    }
  }
  if (result.failures.total() == count) throw run_error("all realisations failed", result.failures);
  return result;
}

}  // namespace stablemap
