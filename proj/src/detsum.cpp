#include "mdpb/detsum.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>

namespace mdpb {

namespace {
constexpr std::int64_t kBlock = 4096;
}

void parallel_for(std::int64_t n, int threads,
                  const std::function<void(std::int64_t)>& body) {
  if (n <= 0) return;
  if (threads < 1) throw std::invalid_argument("parallel_for: threads < 1");
  if (threads == 1 || n < 2 * kBlock) {
    for (std::int64_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::int64_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      for (std::int64_t blk = t; blk < nblocks; blk += threads) {
        std::int64_t lo = blk * kBlock;
        std::int64_t hi = std::min(n, lo + kBlock);
        for (std::int64_t i = lo; i < hi; ++i) body(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

void accumulate_terms(std::int64_t n, int dim, int threads,
                      const std::function<void(std::int64_t, std::span<double>)>& term,
                      std::span<double> result) {
  if (dim <= 0 || static_cast<int>(result.size()) != dim) {
    throw std::invalid_argument("accumulate_terms: bad dimension");
  }
  if (threads < 1) throw std::invalid_argument("accumulate_terms: threads < 1");
  std::int64_t nblocks = std::max<std::int64_t>(1, (n + kBlock - 1) / kBlock);

  // Per-block compensated partial sums, combined in block order below.
  std::vector<double> partial(static_cast<std::size_t>(nblocks) * dim, 0.0);

  auto run_block = [&](std::int64_t blk, std::span<double> scratch,
                       std::vector<CompensatedSum>& acc) {
    std::fill(acc.begin(), acc.end(), CompensatedSum{});
    std::int64_t lo = blk * kBlock;
    std::int64_t hi = std::min(n, lo + kBlock);
    for (std::int64_t i = lo; i < hi; ++i) {
      term(i, scratch);
      for (int k = 0; k < dim; ++k) acc[static_cast<std::size_t>(k)].add(scratch[static_cast<std::size_t>(k)]);
    }
    for (int k = 0; k < dim; ++k) {
      partial[static_cast<std::size_t>(blk) * dim + k] = acc[static_cast<std::size_t>(k)].value();
    }
  };

  if (threads == 1 || n < 2 * kBlock) {
    std::vector<double> scratch(static_cast<std::size_t>(dim));
    std::vector<CompensatedSum> acc(static_cast<std::size_t>(dim));
    for (std::int64_t blk = 0; blk < nblocks; ++blk) run_block(blk, scratch, acc);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t]() {
        std::vector<double> scratch(static_cast<std::size_t>(dim));
        std::vector<CompensatedSum> acc(static_cast<std::size_t>(dim));
        for (std::int64_t blk = t; blk < nblocks; blk += threads) run_block(blk, scratch, acc);
      });
    }
    for (auto& th : pool) th.join();
  }

  for (int k = 0; k < dim; ++k) {
    CompensatedSum total;
    for (std::int64_t blk = 0; blk < nblocks; ++blk) {
      total.add(partial[static_cast<std::size_t>(blk) * dim + k]);
    }
    result[static_cast<std::size_t>(k)] = total.value();
  }
}

MeanStdErr mean_and_std_err(std::span<const double> values) {
  MeanStdErr out;
  std::int64_t n = static_cast<std::int64_t>(values.size());
  if (n == 0) return out;
  CompensatedSum s;
  for (double v : values) s.add(v);
  out.mean = s.value() / static_cast<double>(n);
  if (n == 1) return out;
  CompensatedSum ss;
  for (double v : values) {
    double d = v - out.mean;
    ss.add(d * d);
  }
  double var = ss.value() / static_cast<double>(n - 1);
  if (var < 0.0) var = 0.0;
  out.std_err = std::sqrt(var / static_cast<double>(n));
  return out;
}

}  // namespace mdpb
