#pragma once

#include <algorithm>
#include <cstddef>
#include <queue>
#include <utility>
#include <vector>

namespace nctorus {

/// Summary of a thresholded spectrum: how many values fall below tol_rel * max, plus the gap.
struct KernelSummary {
  std::size_t count = 0;
  double threshold = 0.0;
  double largest = 0.0;
  double smallest_kept = 0.0;  ///< smallest value >= threshold (0 if none)
  double largest_cut = 0.0;    ///< largest value < threshold (0 if none)
  bool overflow = false;       ///< more small values than the accumulator retains
  bool inconclusive = false;   ///< no clear gap around the threshold
};

/// A retained value must exceed the threshold by this factor, and a discarded one must sit
/// this far below it, for a count to be called conclusive.
inline constexpr double kGapFactor = 100.0;

/// Streams nonnegative spectral values (eigenvalues or singular values) and keeps only the
/// smallest `capacity` of them, so very large block-diagonal operators can be counted in
/// bounded memory. The threshold is relative to the global maximum seen.
class SpectrumAccumulator {
 public:
  explicit SpectrumAccumulator(std::size_t capacity = 4096) : capacity_(capacity) {}

  void add(double value, std::size_t multiplicity = 1) {
    if (multiplicity == 0) return;
    if (value > largest_) largest_ = value;
    total_ += multiplicity;
    heap_.emplace(value, multiplicity);
    kept_ += multiplicity;
    while (!heap_.empty() && kept_ - heap_.top().second >= capacity_) {
      kept_ -= heap_.top().second;
      dropped_any_ = true;
      dropped_min_ = std::min(dropped_min_, heap_.top().first);
      heap_.pop();
    }
  }

  template <class Range>
  void add_all(const Range& values) {
    for (double v : values) add(v);
  }

  /// Folds another accumulator in; the result does not depend on how values were split.
  void merge(const SpectrumAccumulator& other) {
    auto copy = other.heap_;
    while (!copy.empty()) {
      add(copy.top().first, copy.top().second);
      copy.pop();
    }
    total_ += other.total_ - other.kept_;
    largest_ = std::max(largest_, other.largest_);
    if (other.dropped_any_) {
      dropped_any_ = true;
      dropped_min_ = std::min(dropped_min_, other.dropped_min_);
    }
  }

  std::size_t total() const { return total_; }
  double largest() const { return largest_; }

  KernelSummary summarize(double tol_rel) const {
    KernelSummary s;
    s.largest = largest_;
    s.threshold = tol_rel * largest_;
    auto copy = heap_;
    std::vector<std::pair<double, std::size_t>> vals;
    while (!copy.empty()) {
      vals.push_back(copy.top());
      copy.pop();
    }
    bool have_kept = false;
    for (const auto& [v, m] : vals) {
      if (v < s.threshold || v <= 0.0) {
        s.count += m;
        s.largest_cut = std::max(s.largest_cut, v);
      } else if (!have_kept || v < s.smallest_kept) {
        s.smallest_kept = v;
        have_kept = true;
      }
    }
    if (dropped_any_ && (!have_kept || dropped_min_ < s.smallest_kept)) {
      s.smallest_kept = dropped_min_;
      have_kept = true;
    }
    // Every retained value below threshold with the buffer full means we cannot see past the kernel.
    s.overflow = dropped_any_ && dropped_min_ < s.threshold;
    const bool kept_too_close = have_kept && s.smallest_kept < kGapFactor * s.threshold;
    const bool cut_too_close = s.count > 0 && s.largest_cut > s.threshold / kGapFactor;
    s.inconclusive = s.overflow || kept_too_close || cut_too_close;
    return s;
  }

 private:
  using Entry = std::pair<double, std::size_t>;
  std::size_t capacity_;
  std::size_t total_ = 0;
  std::size_t kept_ = 0;
  double largest_ = 0.0;
  bool dropped_any_ = false;
  double dropped_min_ = 1e300;
  std::priority_queue<Entry> heap_;  // max-heap: top is the largest retained value
};

}  // namespace nctorus
