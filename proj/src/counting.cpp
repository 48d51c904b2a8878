#include "vinlab/counting.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <queue>
#include <thread>
#include <unordered_map>

namespace vinlab {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

BigInt big_from_u128(u128 v) {
  BigInt hi = static_cast<u64>(v >> 64);
  return (hi << 64) | BigInt(static_cast<u64>(v));
}

BigInt multiset_count(long N, int s) {
  // C(N+s-1, s)
  BigInt r = 1;
  for (int i = 1; i <= s; ++i) r = r * (N + s - i) / i;
  return r;
}

u64 multinomial(const std::vector<int>& tuple) {
  // s! / prod(run!), runs of equal values in the nondecreasing tuple
  const int s = static_cast<int>(tuple.size());
  u64 result = 1;
  for (int i = 2; i <= s; ++i) result *= i;
  int i = 0;
  while (i < s) {
    int j = i;
    while (j < s && tuple[j] == tuple[i]) ++j;
    for (int k = 2; k <= j - i; ++k) result /= k;
    i = j;
  }
  return result;
}

// --------------------------------------------------------------------------
// Nondecreasing s-tuple enumeration with incremental power sums. SumT is
// uint64_t when the proven coordinate bound fits, BigInt otherwise.
// --------------------------------------------------------------------------

template <typename SumT, typename Emit>
void enumerate_multisets(int n, int s, long N, long x1_lo, long x1_hi,
                         const std::vector<std::vector<SumT>>& pw, Emit&& emit) {
  std::vector<int> tuple(s);
  std::vector<std::vector<SumT>> partial(s + 1, std::vector<SumT>(n, SumT(0)));

  // depth-first odometer; partial[d] holds power sums of tuple[0..d)
  std::function<void(int, long)> rec = [&](int depth, long lo) {
    if (depth == s) {
      emit(partial[s], multinomial(tuple));
      return;
    }
    const long hi = (depth == 0) ? x1_hi : N;
    for (long x = lo; x <= hi; ++x) {
      tuple[depth] = static_cast<int>(x);
      for (int i = 0; i < n; ++i) partial[depth + 1][i] = partial[depth][i] + pw[i][x];
      rec(depth + 1, x);
    }
  };
  rec(0, x1_lo);
}

template <typename SumT>
std::vector<std::vector<SumT>> power_tables(int n, long N) {
  std::vector<std::vector<SumT>> pw(n, std::vector<SumT>(N + 1, SumT(0)));
  for (long x = 1; x <= N; ++x) {
    SumT p = SumT(1);
    for (int i = 0; i < n; ++i) {
      p = p * SumT(x);
      pw[i][x] = p;
    }
  }
  return pw;
}

bool fits_u64(const Instance& inst) {
  // every key coordinate is bounded by s*N^i <= s*N^n
  BigInt bound = BigInt(inst.s) * pow_big(BigInt(inst.N), inst.n);
  return bound < (BigInt(1) << 62);
}

// --------------------------------------------------------------------------
// Packed key paths. Keys pack coordinate-wise into u64/u128 when the widths
// allow; otherwise into big-endian byte strings (lexicographic == numeric).
// --------------------------------------------------------------------------

struct PackShifts {
  std::vector<int> bits;  // per coordinate
  int total = 0;
  static PackShifts make(const KeyCodec& codec) {
    PackShifts p;
    for (int w : codec.width_bytes) {
      p.bits.push_back(8 * w);
      p.total += 8 * w;
    }
    return p;
  }
};

template <typename KeyInt>
KeyInt pack_key(const std::vector<u64>& v, const PackShifts& sh) {
  KeyInt k = 0;
  for (size_t i = 0; i < v.size(); ++i) k = (k << sh.bits[i]) | KeyInt(v[i]);
  return k;
}

// sorted-run reduction: sum over distinct keys of (sum of multiplicities)^2
template <typename Entry>
BigInt sum_squares_sorted(std::vector<Entry>& entries) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.first < b.first; });
  BigInt total = 0;
  size_t i = 0;
  while (i < entries.size()) {
    u128 run = 0;
    size_t j = i;
    while (j < entries.size() && entries[j].first == entries[i].first) run += entries[j++].second;
    BigInt r = big_from_u128(run);
    total += r * r;
    i = j;
  }
  return total;
}

template <typename KeyInt>
BigInt mitm_packed(const Instance& inst, const CountBudget& budget, MitmStrategy strategy,
                   const PackShifts& sh) {
  const auto pw = power_tables<u64>(inst.n, inst.N);
  std::vector<u64> key(inst.n);

  auto to_words = [&](const std::vector<u64>& partial) -> const std::vector<u64>& {
    return partial;
  };

  if (strategy == MitmStrategy::HashTable) {
    std::unordered_map<KeyInt, u64> hist;
    enumerate_multisets<u64>(inst.n, inst.s, inst.N, 1, inst.N, pw,
                             [&](const std::vector<u64>& v, u64 mult) {
                               hist[pack_key<KeyInt>(to_words(v), sh)] += mult;
                             });
    BigInt total = 0;
    for (const auto& [k, r] : hist) total += BigInt(r) * BigInt(r);
    return total;
  }

  // Sort-merge path, optionally partitioned by the leading tuple coordinate.
  const int workers = std::max(1, budget.workers);
  std::vector<std::vector<std::pair<KeyInt, u64>>> parts(workers);
  auto run_block = [&](int w, long lo, long hi) {
    auto& out = parts[w];
    enumerate_multisets<u64>(inst.n, inst.s, inst.N, lo, hi, pw,
                             [&](const std::vector<u64>& v, u64 mult) {
                               out.emplace_back(pack_key<KeyInt>(to_words(v), sh), mult);
                             });
  };
  if (workers == 1) {
    run_block(0, 1, inst.N);
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) {
      long lo = 1 + (inst.N * w) / workers;
      long hi = (inst.N * (w + 1)) / workers;
      threads.emplace_back(run_block, w, lo, hi);
    }
    for (auto& t : threads) t.join();
  }
  std::vector<std::pair<KeyInt, u64>> entries;
  size_t total_n = 0;
  for (auto& p : parts) total_n += p.size();
  entries.reserve(total_n);
  for (auto& p : parts) {
    entries.insert(entries.end(), p.begin(), p.end());
    p.clear();
    p.shrink_to_fit();
  }
  return sum_squares_sorted(entries);
}

struct ByteKeyEntry {
  std::string first;  // big-endian fixed-width key
  u64 second;
};

BigInt mitm_bytes(const Instance& inst, const CountBudget& budget, MitmStrategy strategy) {
  const auto codec = KeyCodec::make(inst);
  const auto pw = power_tables<BigInt>(inst.n, inst.N);
  std::vector<std::uint8_t> buf(codec.record_bytes);

  auto encode_str = [&](const std::vector<BigInt>& v) {
    codec.encode(v, buf.data());
    return std::string(reinterpret_cast<const char*>(buf.data()), buf.size());
  };

  if (strategy == MitmStrategy::HashTable) {
    std::unordered_map<std::string, u64> hist;
    enumerate_multisets<BigInt>(inst.n, inst.s, inst.N, 1, inst.N, pw,
                                [&](const std::vector<BigInt>& v, u64 mult) {
                                  hist[encode_str(v)] += mult;
                                });
    BigInt total = 0;
    for (const auto& [k, r] : hist) total += BigInt(r) * BigInt(r);
    return total;
  }
  std::vector<std::pair<std::string, u64>> entries;
  enumerate_multisets<BigInt>(inst.n, inst.s, inst.N, 1, inst.N, pw,
                              [&](const std::vector<BigInt>& v, u64 mult) {
                                entries.emplace_back(encode_str(v), mult);
                              });
  return sum_squares_sorted(entries);
}

void check_enum_budget(const Instance& inst, const CountBudget& budget) {
  BigInt tuples = pow_big(BigInt(inst.N), inst.s);
  if (tuples > BigInt(static_cast<long long>(budget.max_tuples)))
    throw BudgetExceeded("count: N^s exceeds max_tuples");
}

}  // namespace

// ---------------------------------------------------------------------------
// KeyCodec
// ---------------------------------------------------------------------------

KeyCodec KeyCodec::make(const Instance& inst) {
  KeyCodec c{inst.n, inst.s, inst.N, {}, 0};
  for (int i = 1; i <= inst.n; ++i) {
    BigInt bound = BigInt(inst.s) * pow_big(BigInt(inst.N), i);
    int bits = static_cast<int>(boost::multiprecision::msb(bound)) + 1;
    int bytes = (bits + 7) / 8;
    c.width_bytes.push_back(bytes);
    c.record_bytes += bytes;
  }
  return c;
}

void KeyCodec::encode(const std::vector<BigInt>& v, std::uint8_t* out) const {
  for (int i = 0; i < n; ++i) {
    BigInt x = v[i];
    const int w = width_bytes[i];
    for (int b = w - 1; b >= 0; --b) {
      out[b] = static_cast<std::uint8_t>(x & 0xff);
      x >>= 8;
    }
    if (x != 0) throw ValidationError("KeyCodec: value exceeds width");
    out += w;
  }
}

std::vector<BigInt> KeyCodec::decode(const std::uint8_t* in) const {
  std::vector<BigInt> v(n);
  for (int i = 0; i < n; ++i) {
    BigInt x = 0;
    for (int b = 0; b < width_bytes[i]; ++b) x = (x << 8) | BigInt(in[b]);
    v[i] = x;
    in += width_bytes[i];
  }
  return v;
}

// ---------------------------------------------------------------------------
// RepresentationHistogram
// ---------------------------------------------------------------------------

BigInt RepresentationHistogram::total_mass() const {
  BigInt m = 0;
  for (const auto& [k, r] : entries) m += r;
  return m;
}

BigInt RepresentationHistogram::sum_of_squares() const {
  BigInt m = 0;
  for (const auto& [k, r] : entries) m += r * r;
  return m;
}

SeparatedPointSet::SeparatedPointSet(std::vector<double> pts) : points(std::move(pts)) {
  for (size_t i = 0; i < points.size(); ++i) {
    double lo = static_cast<double>(i), hi = static_cast<double>(i + 1);
    if (!(points[i] > lo && points[i] <= hi))
      throw ValidationError("SeparatedPointSet: X_i must satisfy i-1 < X_i <= i");
  }
}

// ---------------------------------------------------------------------------
// count_naive
// ---------------------------------------------------------------------------

namespace {

template <typename SumT>
BigInt naive_count_impl(const Instance& inst, long long shift) {
  const int n = inst.n, s = inst.s;
  const long N = inst.N;
  std::vector<std::vector<SumT>> pw(n, std::vector<SumT>(N + 1));
  for (long x = 1; x <= N; ++x) {
    SumT p = SumT(1);
    SumT base = SumT(static_cast<long long>(x) + shift);
    for (int i = 0; i < n; ++i) {
      p = p * base;
      pw[i][x] = p;
    }
  }
  // enumerate left s-tuples into a sorted key list; J = sum over key of r^2,
  // but computed the slow honest way: enumerate *all* ordered tuples on both
  // sides and compare. With incremental sums this is exactly N^(2s) leaf checks.
  BigInt total = 0;
  std::vector<SumT> left(n), acc((s + 1) * n);
  std::function<void(int)> rec_right;
  std::function<void(int)> rec_left = [&](int depth) {
    if (depth == s) {
      for (int i = 0; i < n; ++i) left[i] = acc[s * n + i];
      // now enumerate right tuples
      std::vector<SumT> racc((s + 1) * n);
      std::function<void(int)> rr = [&](int d) {
        if (d == s) {
          for (int i = 0; i < n; ++i)
            if (racc[s * n + i] != left[i]) return;
          total += 1;
          return;
        }
        for (long x = 1; x <= N; ++x) {
          for (int i = 0; i < n; ++i) racc[(d + 1) * n + i] = racc[d * n + i] + pw[i][x];
          rr(d + 1);
        }
      };
      rr(0);
      return;
    }
    for (long x = 1; x <= N; ++x) {
      for (int i = 0; i < n; ++i) acc[(depth + 1) * n + i] = acc[depth * n + i] + pw[i][x];
      rec_left(depth + 1);
    }
  };
  rec_left(0);
  return total;
}

}  // namespace

BigInt count_naive_shifted(const Instance& inst, long long shift, const CountBudget& budget) {
  BigInt tuples = pow_big(BigInt(inst.N), 2 * inst.s);
  if (tuples > BigInt(static_cast<long long>(budget.max_naive_tuples)))
    throw BudgetExceeded("count_naive: N^(2s) exceeds max_naive_tuples");
  BigInt bound = BigInt(inst.s) *
                 pow_big(BigInt(std::max(std::abs(shift + 1), std::abs(shift + inst.N))), inst.n);
  if (bound < (BigInt(1) << 62)) return naive_count_impl<long long>(inst, shift);
  return naive_count_impl<BigInt>(inst, shift);
}

BigInt count_naive(const Instance& inst, const CountBudget& budget) {
  return count_naive_shifted(inst, 0, budget);
}

// ---------------------------------------------------------------------------
// representation_histogram / count_mitm
// ---------------------------------------------------------------------------

RepresentationHistogram representation_histogram(const Instance& inst,
                                                 const CountBudget& budget) {
  check_enum_budget(inst, budget);
  const auto codec = KeyCodec::make(inst);
  BigInt est = multiset_count(inst.N, inst.s) * (codec.record_bytes + 8);
  if (est > BigInt(budget.max_bytes))
    throw BudgetExceeded("representation_histogram: estimated size exceeds max_bytes");

  RepresentationHistogram hist{inst, {}};
  const auto pw = power_tables<BigInt>(inst.n, inst.N);
  enumerate_multisets<BigInt>(inst.n, inst.s, inst.N, 1, inst.N, pw,
                              [&](const std::vector<BigInt>& v, u64 mult) {
                                hist.entries[PowerSumKey{v}] += mult;
                              });
  return hist;
}

BigInt count_mitm(const Instance& inst, const CountBudget& budget, MitmStrategy strategy) {
  check_enum_budget(inst, budget);
  const auto codec = KeyCodec::make(inst);
  BigInt est = multiset_count(inst.N, inst.s) * (codec.record_bytes + 16);
  if (est > BigInt(budget.max_bytes))
    throw BudgetExceeded("count_mitm: estimated size exceeds max_bytes (use spill path)");

  const auto sh = PackShifts::make(codec);
  if (fits_u64(inst) && sh.total <= 64)
    return mitm_packed<u64>(inst, budget, strategy, sh);
  if (fits_u64(inst) && sh.total <= 128)
    return mitm_packed<u128>(inst, budget, strategy, sh);
  return mitm_bytes(inst, budget, strategy);
}

// ---------------------------------------------------------------------------
// Spill files
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'V', 'I', 'N', 'O', 'H', 'I', 'S', 'T'};

template <typename T>
void put_le(std::ostream& os, T value, int bytes) {
  for (int b = 0; b < bytes; ++b) {
    os.put(static_cast<char>(value & 0xff));
    value >>= 8;
  }
}

u64 get_le(std::istream& is, int bytes) {
  u64 v = 0;
  for (int b = 0; b < bytes; ++b) {
    int c = is.get();
    if (c == EOF) throw ValidationError("spill: truncated file");
    v |= static_cast<u64>(static_cast<unsigned char>(c)) << (8 * b);
  }
  return v;
}

void put_le_big(std::ostream& os, BigInt value, int bytes) {
  for (int b = 0; b < bytes; ++b) {
    os.put(static_cast<char>(static_cast<unsigned>(value & 0xff)));
    value >>= 8;
  }
  if (value != 0) throw ValidationError("spill: value exceeds coordinate width");
}

BigInt get_le_big(std::istream& is, int bytes) {
  BigInt v = 0;
  for (int b = 0; b < bytes; ++b) {
    int c = is.get();
    if (c == EOF) throw ValidationError("spill: truncated file");
    v |= BigInt(static_cast<unsigned char>(c)) << (8 * b);
  }
  return v;
}

void write_spill_header(std::ostream& os, const Instance& inst, const KeyCodec& codec,
                        u64 count) {
  os.write(kMagic, 8);
  put_le<u64>(os, 1, 4);
  put_le<u64>(os, inst.n, 4);
  put_le<u64>(os, inst.s, 4);
  put_le<u64>(os, inst.N, 8);
  for (int w : codec.width_bytes) put_le<u64>(os, w, 4);
  put_le<u64>(os, count, 8);
}

struct SpillHeader {
  Instance inst;
  KeyCodec codec;
  u64 count;
};

SpillHeader read_spill_header(std::istream& is) {
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0)
    throw ValidationError("spill: bad magic");
  if (get_le(is, 4) != 1) throw ValidationError("spill: unsupported version");
  int n = static_cast<int>(get_le(is, 4));
  int s = static_cast<int>(get_le(is, 4));
  long N = static_cast<long>(get_le(is, 8));
  Instance inst(n, s, N);
  KeyCodec codec = KeyCodec::make(inst);
  for (int i = 0; i < n; ++i)
    if (get_le(is, 4) != static_cast<u64>(codec.width_bytes[i]))
      throw ValidationError("spill: width mismatch");
  u64 count = get_le(is, 8);
  return SpillHeader{inst, codec, count};
}

}  // namespace

void write_histogram_spill(const std::filesystem::path& path, const Instance& inst,
                           const RepresentationHistogram& hist) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("spill: cannot open " + path.string());
  const auto codec = KeyCodec::make(inst);
  write_spill_header(os, inst, codec, hist.entries.size());
  for (const auto& [key, mult] : hist.entries) {  // std::map iterates in key order
    for (int i = 0; i < inst.n; ++i) put_le_big(os, key.v[i], codec.width_bytes[i]);
    if (mult > BigInt(std::numeric_limits<u64>::max()))
      throw ValidationError("spill: multiplicity exceeds u64");
    put_le<u64>(os, mult.convert_to<u64>(), 8);
  }
  if (!os) throw ValidationError("spill: write failed");
}

RepresentationHistogram read_histogram_spill(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("spill: cannot open " + path.string());
  auto hdr = read_spill_header(is);
  RepresentationHistogram hist{hdr.inst, {}};
  for (u64 r = 0; r < hdr.count; ++r) {
    PowerSumKey key;
    key.v.resize(hdr.inst.n);
    for (int i = 0; i < hdr.inst.n; ++i) key.v[i] = get_le_big(is, hdr.codec.width_bytes[i]);
    u64 mult = get_le(is, 8);
    hist.entries[key] += mult;
  }
  return hist;
}

BigInt count_mitm_spilled(const Instance& inst, const std::filesystem::path& tmp_dir,
                          std::uint64_t chunk_bytes, const CountBudget& budget) {
  check_enum_budget(inst, budget);
  const auto codec = KeyCodec::make(inst);
  const auto pw = power_tables<BigInt>(inst.n, inst.N);
  std::filesystem::create_directories(tmp_dir);

  // split the leading coordinate so each chunk's worst case fits chunk_bytes
  const u64 rec = codec.record_bytes + 8;
  BigInt per_lead = multiset_count(inst.N, inst.s - 1);  // loose upper bound per x1
  long block = 1;
  if (per_lead * rec < BigInt(chunk_bytes)) {
    BigInt b = BigInt(chunk_bytes) / (per_lead * rec);
    block = std::max<long>(1, std::min<BigInt>(b, BigInt(inst.N)).convert_to<long>());
  }

  std::vector<std::filesystem::path> runs;
  std::vector<std::uint8_t> buf(codec.record_bytes);
  for (long lo = 1; lo <= inst.N; lo += block) {
    long hi = std::min<long>(inst.N, lo + block - 1);
    std::vector<std::pair<std::string, u64>> entries;
    enumerate_multisets<BigInt>(inst.n, inst.s, inst.N, lo, hi, pw,
                                [&](const std::vector<BigInt>& v, u64 mult) {
                                  codec.encode(v, buf.data());
                                  entries.emplace_back(
                                      std::string(reinterpret_cast<char*>(buf.data()), buf.size()),
                                      mult);
                                });
    std::sort(entries.begin(), entries.end());
    // combine duplicates within the run
    auto path = tmp_dir / ("run-" + std::to_string(runs.size()) + ".vinohist");
    std::ofstream os(path, std::ios::binary);
    u64 distinct = 0;
    {
      size_t i = 0;
      while (i < entries.size()) {
        size_t j = i;
        while (j < entries.size() && entries[j].first == entries[i].first) ++j;
        ++distinct;
        i = j;
      }
    }
    write_spill_header(os, inst, codec, distinct);
    size_t i = 0;
    while (i < entries.size()) {
      u64 mult = 0;
      size_t j = i;
      while (j < entries.size() && entries[j].first == entries[i].first) mult += entries[j++].second;
      os.write(entries[i].first.data(), codec.record_bytes);
      put_le<u64>(os, mult, 8);
      i = j;
    }
    runs.push_back(path);
  }

  // k-way merge of the sorted runs
  struct Cursor {
    std::ifstream is;
    u64 remaining = 0;
    std::string key;
    u64 mult = 0;
  };
  std::vector<std::unique_ptr<Cursor>> cursors;
  for (const auto& p : runs) {
    auto c = std::make_unique<Cursor>();
    c->is.open(p, std::ios::binary);
    auto hdr = read_spill_header(c->is);
    c->remaining = hdr.count;
    cursors.push_back(std::move(c));
  }
  auto advance = [&](Cursor& c) {
    if (c.remaining == 0) return false;
    c.key.resize(codec.record_bytes);
    c.is.read(c.key.data(), codec.record_bytes);
    c.mult = get_le(c.is, 8);
    --c.remaining;
    return true;
  };
  using HeapItem = std::pair<std::string, size_t>;
  std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>> heap;
  for (size_t i = 0; i < cursors.size(); ++i)
    if (advance(*cursors[i])) heap.emplace(cursors[i]->key, i);

  BigInt total = 0, mass = 0;
  std::string current;
  u128 run = 0;
  auto flush = [&]() {
    if (!current.empty() || run != 0) {
      BigInt r = big_from_u128(run);
      total += r * r;
      mass += r;
    }
  };
  while (!heap.empty()) {
    auto [key, idx] = heap.top();
    heap.pop();
    if (key != current) {
      flush();
      current = key;
      run = 0;
    }
    run += cursors[idx]->mult;
    if (advance(*cursors[idx])) heap.emplace(cursors[idx]->key, idx);
  }
  flush();
  for (const auto& p : runs) std::filesystem::remove(p);

  if (mass != pow_big(BigInt(inst.N), inst.s))
    throw NonIntegerResult("count_mitm_spilled: merged mass != N^s (merge bug)");
  return total;
}

// ---------------------------------------------------------------------------
// count_real — bucketed join with exact rational filtering
// ---------------------------------------------------------------------------

BigInt count_real(const SeparatedPointSet& points, int s, int n, const CountBudget& budget) {
  const long N = points.N();
  if (n < 1 || s < 1) throw ValidationError("count_real: need n,s >= 1");
  BigInt tuples = pow_big(BigInt(N), s);
  if (tuples > BigInt(static_cast<long long>(budget.max_tuples)))
    throw BudgetExceeded("count_real: N^s exceeds max_tuples");

  // exact rational powers of each point
  std::vector<std::vector<Rational>> pow_pt(N, std::vector<Rational>(n));
  for (long j = 0; j < N; ++j) {
    Rational x = rational_from_double(points.points[j]);
    Rational p = 1;
    for (int i = 0; i < n; ++i) {
      p *= x;
      pow_pt[j][i] = p;
    }
  }

  // tolerance tau_i = N^(i-n), bucket granularity tau_i / 2
  std::vector<Rational> tau(n), gran(n);
  for (int i = 1; i <= n; ++i) {
    tau[i - 1] = pow_rat(Rational(N), i - n);
    gran[i - 1] = tau[i - 1] / 2;
  }

  // enumerate ordered s-tuples; key = exact power-sum vector
  struct TupleKey {
    std::vector<Rational> v;
  };
  std::vector<TupleKey> keys;
  keys.reserve(static_cast<size_t>(std::pow(static_cast<double>(N), s)));
  std::vector<long> idx(s, 0);
  for (;;) {
    TupleKey k;
    k.v.assign(n, Rational(0));
    for (int d = 0; d < s; ++d)
      for (int i = 0; i < n; ++i) k.v[i] += pow_pt[idx[d]][i];
    keys.push_back(std::move(k));
    int d = s - 1;
    while (d >= 0 && ++idx[d] == N) idx[d--] = 0;
    if (d < 0) break;
  }

  // bucket map: exact floor(v_i / gran_i) per coordinate
  std::map<std::vector<BigInt>, std::vector<std::uint32_t>> buckets;
  std::vector<std::vector<BigInt>> bucket_of(keys.size());
  for (size_t t = 0; t < keys.size(); ++t) {
    std::vector<BigInt> b(n);
    for (int i = 0; i < n; ++i) b[i] = floor_ratio(keys[t].v[i] / gran[i]);
    buckets[b].push_back(static_cast<std::uint32_t>(t));
    bucket_of[t] = std::move(b);
  }

  // With granularity tau/2, keys within tau can land up to two buckets apart,
  // so the neighbor scan spans offsets {-2..2} per coordinate. Candidates are
  // then filtered exactly, so the widened scan only affects cost.
  std::vector<int> off(n, -2);
  BigInt total = 0;
  for (size_t t = 0; t < keys.size(); ++t) {
    std::fill(off.begin(), off.end(), -2);
    for (;;) {
      std::vector<BigInt> b(n);
      for (int i = 0; i < n; ++i) b[i] = bucket_of[t][i] + off[i];
      auto it = buckets.find(b);
      if (it != buckets.end()) {
        for (std::uint32_t u : it->second) {
          bool ok = true;
          for (int i = 0; i < n && ok; ++i) {
            Rational d = keys[t].v[i] - keys[u].v[i];
            if (d < 0) d = -d;
            ok = d <= tau[i];
          }
          if (ok) total += 1;
        }
      }
      int d = n - 1;
      while (d >= 0 && ++off[d] == 3) off[d--] = -2;
      if (d < 0) break;
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// growth_fit
// ---------------------------------------------------------------------------

GrowthFit growth_fit(int n, int s, const std::vector<long>& N_list, const CountBudget& budget) {
  if (N_list.size() < 3) throw ValidationError("growth_fit: need at least 3 values of N");
  for (size_t i = 1; i < N_list.size(); ++i)
    if (N_list[i] <= N_list[i - 1]) throw ValidationError("growth_fit: N_list must be increasing");

  GrowthFit fit;
  fit.N_values = N_list;
  Eigen::MatrixXd A(N_list.size(), 2);
  Eigen::VectorXd y(N_list.size());
  for (size_t i = 0; i < N_list.size(); ++i) {
    BigInt J = count_mitm(Instance(n, s, N_list[i]), budget);
    fit.counts.push_back(J);
    A(i, 0) = std::log(static_cast<double>(N_list[i]));
    A(i, 1) = 1.0;
    y(i) = std::log(J.convert_to<double>());
  }
  Eigen::Vector2d coef = A.colPivHouseholderQr().solve(y);
  fit.slope = coef(0);
  fit.intercept = coef(1);
  for (size_t i = 0; i < N_list.size(); ++i)
    fit.residuals.push_back(y(i) - (coef(0) * A(i, 0) + coef(1)));
  return fit;
}

}  // namespace vinlab
