#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "icmup/codecs/encoded.hpp"
#include "icmup/error.hpp"
#include "icmup/pattern_store.hpp"
#include "icmup/symbol.hpp"

namespace icmup {

struct Run {
  Sequence unit;
  std::size_t count = 1;

  friend bool operator==(const Run&, const Run&) = default;
};

/// Canonical when no two adjacent runs share a unit and every count is >= 1.
struct RunLengthStream {
  std::vector<Run> runs;

  friend bool operator==(const RunLengthStream&, const RunLengthStream&) = default;
};

/// Length of the Elias gamma code for `n` >= 1: 2*floor(log2 n) + 1.
inline std::size_t count_bits(std::size_t n) {
  std::size_t floor_log = 0;
  while ((n >> (floor_log + 1)) != 0) ++floor_log;
  return 2 * floor_log + 1;
}

inline double run_bits(const Run& run, const CostModel& cost) {
  return cost.sequence_cost(run.unit) + static_cast<double>(count_bits(run.count));
}

inline double run_stream_bits(const RunLengthStream& rs, const CostModel& cost) {
  double bits = 0.0;
  for (const auto& r : rs.runs) bits += run_bits(r, cost);
  return bits;
}

/// A unit is primitive when it is not a repetition of a shorter unit
/// (`a b` is, `1 1` is not).
template <typename Range>
bool is_primitive_unit(const Range& unit) {
  const std::size_t n = std::size(unit);
  for (std::size_t d = 1; d < n; ++d) {
    if (n % d != 0) continue;
    bool periodic = true;
    for (std::size_t i = d; i < n && periodic; ++i) periodic = unit[i] == unit[i - d];
    if (periodic) return false;
  }
  return true;
}

inline bool is_canonical(const RunLengthStream& rs) {
  for (std::size_t i = 0; i < rs.runs.size(); ++i) {
    if (rs.runs[i].count < 1 || rs.runs[i].unit.empty()) return false;
    if (i > 0 && rs.runs[i].unit == rs.runs[i - 1].unit) return false;
  }
  return true;
}

/// Greedy left-to-right run detection. At each position every primitive unit
/// of length 1..max_unit_len is tried, and the one whose run saves the most
/// bits is taken (ties to the longer unit). Where no unit saves anything one
/// symbol is emitted as a run of 1. Adjacent runs of the same unit are merged
/// at the end, so the output is canonical.
inline Encoded<RunLengthStream> rle_encode(std::span<const std::string> seq, std::size_t max_unit_len,
                                           const CostModel& cost) {
  if (seq.empty()) throw invalid_argument("rle_encode: empty sequence");
  if (max_unit_len < 1) throw invalid_argument("rle_encode: max_unit_len must be at least 1");

  Encoded<RunLengthStream> out;
  out.original_bits = cost.sequence_cost(seq);

  std::vector<Run> raw;
  for (std::size_t i = 0; i < seq.size();) {
    std::size_t best_len = 0, best_count = 0;
    double best_saving = 0.0;
    for (std::size_t len = 1; len <= max_unit_len && i + len <= seq.size(); ++len) {
      auto unit = seq.subspan(i, len);
      if (!is_primitive_unit(unit)) continue;
      std::size_t count = 1;
      while (i + (count + 1) * len <= seq.size()) {
        bool same = true;
        for (std::size_t k = 0; k < len && same; ++k) same = seq[i + count * len + k] == unit[k];
        if (!same) break;
        ++count;
      }
      if (count < 2) continue;
      const double unit_bits = cost.sequence_cost(unit);
      const double saving =
          static_cast<double>(count) * unit_bits - (unit_bits + static_cast<double>(count_bits(count)));
      if (saving > best_saving || (saving == best_saving && best_len != 0 && len > best_len)) {
        best_saving = saving;
        best_len = len;
        best_count = count;
      }
    }
    if (best_len == 0 || !(best_saving > 0.0)) {
      raw.push_back(Run{Sequence{seq[i]}, 1});
      ++i;
    } else {
      raw.push_back(Run{Sequence(seq.begin() + static_cast<std::ptrdiff_t>(i),
                                 seq.begin() + static_cast<std::ptrdiff_t>(i + best_len)),
                        best_count});
      i += best_len * best_count;
    }
  }

  for (auto& r : raw) {
    if (!out.payload.runs.empty() && out.payload.runs.back().unit == r.unit)
      out.payload.runs.back().count += r.count;
    else
      out.payload.runs.push_back(std::move(r));
  }
  out.encoded_bits = run_stream_bits(out.payload, cost);
  return out;
}

/// Uniform pricing over the symbols of `seq` itself.
inline Encoded<RunLengthStream> rle_encode(std::span<const std::string> seq, std::size_t max_unit_len) {
  std::set<std::string> alphabet(seq.begin(), seq.end());
  return rle_encode(seq, max_unit_len, CostModel::uniform_over(alphabet));
}

inline Sequence rle_decode(const RunLengthStream& rs) {
  Sequence out;
  for (const auto& r : rs.runs) {
    if (r.count < 1) throw invalid_argument("run count must be at least 1");
    if (r.unit.empty()) throw invalid_argument("run unit must not be empty");
    for (std::size_t k = 0; k < r.count; ++k) out.insert(out.end(), r.unit.begin(), r.unit.end());
  }
  return out;
}

/// Rewrites a unary number (n copies of one symbol) as n in `base` (2..36).
inline std::string unary_to_base(std::span<const std::string> seq, unsigned base) {
  if (base < 2 || base > 36) throw invalid_argument("base must be in 2..36");
  for (const auto& s : seq)
    if (s != seq.front()) throw invalid_argument("unary number mixes symbols '" + seq.front() + "' and '" + s + "'");
  std::size_t n = seq.size();
  if (n == 0) return "0";
  static constexpr char digits[] = "0123456789abcdefghijklmnopqrstuvwxyz";
  std::string out;
  while (n > 0) {
    out.insert(out.begin(), digits[n % base]);
    n /= base;
  }
  return out;
}

}  // namespace icmup
