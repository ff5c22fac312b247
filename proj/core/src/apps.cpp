#include <cmath>
#include <numbers>
#include <stdexcept>

#include "smc/rng.hpp"
#include "smc/runtime.hpp"

namespace smc {
namespace {

// Dense integer matrix multiply; work unit = one output cell.
class MatmulApp final : public Application {
 public:
  MatmulApp(std::uint64_t run_seed, std::int64_t n_units) {
    dim_ = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(n_units))));
    if (dim_ * dim_ != n_units)
      throw std::invalid_argument("matmul requires N to be a perfect square");
    Rng rng(derive_seed(run_seed, 0xA));
    a_.resize(static_cast<std::size_t>(n_units));
    b_.resize(static_cast<std::size_t>(n_units));
    for (auto& v : a_) v = static_cast<std::int64_t>(rng.bounded(19)) - 9;
    for (auto& v : b_) v = static_cast<std::int64_t>(rng.bounded(19)) - 9;
  }

  std::string name() const override { return "matmul"; }
  StabilityClass stability() const override { return StabilityClass::DetInDetOut; }
  std::int64_t total_units() const override { return dim_ * dim_; }

  Bytes execute(std::int64_t lo, std::int64_t hi, std::uint64_t, Tick) const override {
    Bytes out;
    out.reserve(static_cast<std::size_t>(hi - lo) * 8);
    for (std::int64_t c = lo; c < hi; ++c) append_i64(out, cell(c));
    return out;
  }

  Bytes merge(std::span<const StoredResult> results) const override {
    Bytes out;
    for (const auto& r : results) out.insert(out.end(), r.payload.begin(), r.payload.end());
    return out;
  }

  bool verify(const Bytes& answer) const override {
    const std::int64_t n = total_units();
    if (answer.size() != static_cast<std::size_t>(n) * 8) return false;
    for (std::int64_t c = 0; c < n; ++c) {
      if (read_i64(answer, static_cast<std::size_t>(c) * 8) != cell(c)) return false;
    }
    return true;
  }

 private:
  std::int64_t cell(std::int64_t c) const {
    const std::int64_t i = c / dim_;
    const std::int64_t j = c % dim_;
    std::int64_t sum = 0;
    for (std::int64_t k = 0; k < dim_; ++k)
      sum += a_[static_cast<std::size_t>(i * dim_ + k)] *
             b_[static_cast<std::size_t>(k * dim_ + j)];
    return sum;
  }
  std::int64_t dim_;
  std::vector<std::int64_t> a_, b_;
};

// Find any index of a target value. Which hit wins depends on acceptance
// order, so the merged answer is assignment-dependent (Det-in, NonDet-out).
class ParallelSearchApp final : public Application {
 public:
  ParallelSearchApp(std::uint64_t run_seed, std::int64_t n_units) : n_(n_units) {
    Rng rng(derive_seed(run_seed, 0xB));
    haystack_.resize(static_cast<std::size_t>(n_));
    for (auto& v : haystack_) v = static_cast<std::int64_t>(rng.bounded(1 << 16));
    target_ = haystack_[rng.bounded(static_cast<std::uint64_t>(n_))];
  }

  std::string name() const override { return "parallel_search"; }
  StabilityClass stability() const override { return StabilityClass::DetInNonDetOut; }
  std::int64_t total_units() const override { return n_; }

  Bytes execute(std::int64_t lo, std::int64_t hi, std::uint64_t, Tick) const override {
    std::int64_t found = -1;
    for (std::int64_t i = lo; i < hi; ++i) {
      if (haystack_[static_cast<std::size_t>(i)] == target_) {
        found = i;
        break;
      }
    }
    Bytes out;
    append_i64(out, found);
    return out;
  }

  Bytes merge(std::span<const StoredResult> results) const override {
    std::int64_t answer = -1;
    std::uint64_t best_seq = UINT64_MAX;
    for (const auto& r : results) {
      const std::int64_t idx = read_i64(r.payload, 0);
      if (idx >= 0 && r.accept_seq < best_seq) {
        best_seq = r.accept_seq;
        answer = idx;
      }
    }
    Bytes out;
    append_i64(out, answer);
    return out;
  }

  bool verify(const Bytes& answer) const override {
    const std::int64_t idx = read_i64(answer, 0);
    return idx >= 0 && idx < n_ && haystack_[static_cast<std::size_t>(idx)] == target_;
  }

  std::int64_t target() const { return target_; }
  std::vector<std::int64_t> valid_indices() const {
    std::vector<std::int64_t> v;
    for (std::int64_t i = 0; i < n_; ++i)
      if (haystack_[static_cast<std::size_t>(i)] == target_) v.push_back(i);
    return v;
  }

 private:
  std::int64_t n_;
  std::vector<std::int64_t> haystack_;
  std::int64_t target_;
};

// Quarter-circle hit counting. Samples are task-seeded, so the estimate
// depends only on the decomposition, never on assignment or faults.
class MonteCarloPiApp final : public Application {
 public:
  MonteCarloPiApp(std::int64_t n_units) : n_(n_units) {}

  std::string name() const override { return "monte_carlo_pi"; }
  StabilityClass stability() const override { return StabilityClass::NonDetInNonDetOut; }
  std::int64_t total_units() const override { return n_; }

  Bytes execute(std::int64_t lo, std::int64_t hi, std::uint64_t task_seed,
                Tick) const override {
    Rng rng(task_seed);
    std::int64_t inside = 0;
    for (std::int64_t i = lo; i < hi; ++i) {
      const double x = rng.uniform01();
      const double y = rng.uniform01();
      if (x * x + y * y <= 1.0) ++inside;
    }
    Bytes out;
    append_i64(out, inside);
    return out;
  }

  Bytes merge(std::span<const StoredResult> results) const override {
    std::int64_t inside = 0;
    for (const auto& r : results) inside += read_i64(r.payload, 0);
    Bytes out;
    append_f64(out, 4.0 * static_cast<double>(inside) / static_cast<double>(n_));
    return out;
  }

  bool verify(const Bytes& answer) const override {
    const double est = read_f64(answer, 0);
    return std::abs(est - std::numbers::pi) <= 6.0 / std::sqrt(static_cast<double>(n_));
  }

 private:
  std::int64_t n_;
};

// Reduction whose per-task contribution is seeded from the arrival
// timestamp: nondeterministic input feeding a deterministic reduction.
// The Figure-2 class that redundant masters cannot support.
class RandomReduceApp final : public Application {
 public:
  RandomReduceApp(std::int64_t n_units) : n_(n_units) {}

  std::string name() const override { return "random_reduce"; }
  StabilityClass stability() const override { return StabilityClass::NonDetInDetOut; }
  std::int64_t total_units() const override { return n_; }

  Bytes execute(std::int64_t lo, std::int64_t hi, std::uint64_t task_seed,
                Tick now) const override {
    std::uint64_t s = task_seed ^ static_cast<std::uint64_t>(now);
    std::int64_t sum = 0;
    for (std::int64_t i = lo; i < hi; ++i)
      sum += static_cast<std::int64_t>(splitmix64(s) >> 40);
    Bytes out;
    append_i64(out, sum);
    return out;
  }

  Bytes merge(std::span<const StoredResult> results) const override {
    std::int64_t sum = 0;
    for (const auto& r : results) sum += read_i64(r.payload, 0);
    Bytes out;
    append_i64(out, sum);
    return out;
  }

  bool verify(const Bytes&) const override { return true; }

 private:
  std::int64_t n_;
};

}  // namespace

std::unique_ptr<Application> make_application(const std::string& name,
                                              std::uint64_t run_seed, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("N must be positive");
  if (name == "matmul") return std::make_unique<MatmulApp>(run_seed, n);
  if (name == "parallel_search") return std::make_unique<ParallelSearchApp>(run_seed, n);
  if (name == "monte_carlo_pi") return std::make_unique<MonteCarloPiApp>(n);
  if (name == "random_reduce") return std::make_unique<RandomReduceApp>(n);
  throw std::invalid_argument("unknown application: " + name);
}

std::vector<AppInfo> builtin_applications() {
  return {
      {"matmul", StabilityClass::DetInDetOut},
      {"parallel_search", StabilityClass::DetInNonDetOut},
      {"monte_carlo_pi", StabilityClass::NonDetInNonDetOut},
      {"random_reduce", StabilityClass::NonDetInDetOut},
  };
}

}  // namespace smc
