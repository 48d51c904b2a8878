#pragma once

// Exact computation of the Vinogradov count J_{s,n}(N) by independent
// algorithms:
//
//   count_naive  — direct enumeration of all 2s-tuples in {1..N}^{2s},
//                  checking the n power-sum equations;
//   count_mitm   — meet-in-the-middle: build the representation histogram
//                  r(v) = #{s-tuples with power-sum vector v} and return
//                  sum_v r(v)^2 (ordered nondecreasing enumeration with
//                  multinomial counts, so N^s tuples cost ~C(N+s-1,s) work);
//
// plus the real-separated inequality count J_{s,n}(S_X) for point sets with
// one point per unit window, and log-log growth fitting against N.
//
// Power sums are exact throughout. Machine words are used only when the
// proven bound s*N^i fits (checked in arbitrary precision first); otherwise
// keys fall back to fixed-width byte strings of unbounded size.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vinlab/core.hpp"

namespace vinlab {

struct CountBudget {
  double max_naive_tuples = 1e9;   // guard for N^(2s) enumeration
  double max_tuples = 1e10;        // guard for N^s / C(N+s-1,s) enumeration
  std::uint64_t max_bytes = 2'000'000'000;  // in-memory histogram budget
  int workers = 1;                 // deterministic partitioned enumeration
};

// Fixed-width encoding of power-sum keys. Widths are derived from the exact
// bounds s*N^i, so the encoding is lossless for every admissible tuple.
struct KeyCodec {
  int n;
  int s;
  long N;
  std::vector<int> width_bytes;    // per coordinate
  int record_bytes = 0;            // sum of widths

  static KeyCodec make(const Instance& inst);
  // Big-endian concatenation; lexicographic byte order == numeric key order.
  void encode(const std::vector<BigInt>& v, std::uint8_t* out) const;
  std::vector<BigInt> decode(const std::uint8_t* in) const;
};

struct RepresentationHistogram {
  Instance inst;
  std::map<PowerSumKey, BigInt> entries;

  BigInt total_mass() const;
  BigInt sum_of_squares() const;
};

struct SeparatedPointSet {
  std::vector<double> points;  // i-1 < X_i <= i, 1-based windows

  explicit SeparatedPointSet(std::vector<double> pts);
  long N() const { return static_cast<long>(points.size()); }
};

enum class MitmStrategy { SortMerge, HashTable };

BigInt count_naive(const Instance& inst, const CountBudget& budget = {});

// Naive count over the shifted range {c+1, ..., c+N}; J is invariant in c.
BigInt count_naive_shifted(const Instance& inst, long long shift,
                           const CountBudget& budget = {});

RepresentationHistogram representation_histogram(const Instance& inst,
                                                 const CountBudget& budget = {});

BigInt count_mitm(const Instance& inst, const CountBudget& budget = {},
                  MitmStrategy strategy = MitmStrategy::SortMerge);

BigInt count_real(const SeparatedPointSet& points, int s, int n,
                  const CountBudget& budget = {});

struct GrowthFit {
  double slope = 0;
  double intercept = 0;
  std::vector<long> N_values;
  std::vector<BigInt> counts;
  std::vector<double> residuals;  // log J - fitted, per point
};

GrowthFit growth_fit(int n, int s, const std::vector<long>& N_list,
                     const CountBudget& budget = {});

// ---------------------------------------------------------------------------
// Histogram spill files: little-endian fixed-width records of
// (key bytes, multiplicity), sorted ascending by key, with a header carrying
// n, s, N and the per-coordinate widths. Used when a chunked enumeration
// exceeds the in-memory budget, and exposed for tooling.
//
// Layout (all integers little-endian):
//   magic   8 bytes  "VINOHIST"
//   version u32      1
//   n       u32
//   s       u32
//   N       u64
//   coords  u32 * n  width in bytes of each key coordinate
//   count   u64      number of records
//   records count * (sum(widths) key bytes, coordinates little-endian
//                    in order i=1..n, followed by u64 multiplicity)
// ---------------------------------------------------------------------------

void write_histogram_spill(const std::filesystem::path& path, const Instance& inst,
                           const RepresentationHistogram& hist);
RepresentationHistogram read_histogram_spill(const std::filesystem::path& path);

// Streaming variant used by the chunked meet-in-the-middle path: calls
// `sink(key_bytes, multiplicity)` in ascending key order after merging the
// sorted spill runs produced by per-chunk enumeration.
BigInt count_mitm_spilled(const Instance& inst, const std::filesystem::path& tmp_dir,
                          std::uint64_t chunk_bytes, const CountBudget& budget = {});

}  // namespace vinlab
