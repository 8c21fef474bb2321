#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace schurlr {

/// Machine parameters of the latency/bandwidth/compute model.
struct CostParams {
  double ts = 1e-6;   ///< startup latency, seconds per message
  double tw = 1e-9;   ///< transfer time, seconds per word
  double tc = 1e-10;  ///< compute time, seconds per flop
  int p = 1;          ///< rank count

  void validate() const;
};

/// Counters filled by the simulated fabric. Counters only grow inside a
/// traced region; `reset()` zeroes them between regions.
struct CommTrace {
  std::int64_t p2p_messages = 0;
  std::int64_t p2p_words = 0;
  std::int64_t allreduce_count = 0;
  std::int64_t allreduce_words = 0;
  std::int64_t gather_count = 0;
  std::int64_t gather_words = 0;
  std::int64_t flops = 0;  ///< critical-path flops (max over ranks per kernel)

  void reset() { *this = CommTrace{}; }
  CommTrace& operator+=(const CommTrace& o);
  friend CommTrace operator-(CommTrace a, const CommTrace& b);
  friend CommTrace operator+(CommTrace a, const CommTrace& b) { return a += b; }
  friend bool operator==(const CommTrace&, const CommTrace&) = default;
};

/// Modeled seconds, itemized by operation class.
struct CostReport {
  double p2p = 0;
  double allreduce = 0;
  double gather = 0;
  double compute = 0;
  double total() const { return p2p + allreduce + gather + compute; }
};

/// ceil(log2(p)); 0 for p = 1.
int log2_ceil(int p);

/// p2p message of m words: ts + m tw. Allreduce of m words: log p (ts + m tw).
/// Gather/scatter of m words per destination: log p ts + m (p - 1) tw.
/// Each flop: tc.
CostReport model_cost(const CommTrace& trace, const CostParams& params);

/// One row per counter plus one per cost item: `name,value`.
void write_cost_csv(std::ostream& out, const CommTrace& trace, const CostParams& params);
/// Aligned human-readable table of the same content.
void write_cost_table(std::ostream& out, const CommTrace& trace, const CostParams& params);

}  // namespace schurlr
