#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <mutex>
#include <utility>
#include <vector>

namespace gammalab {

// Append-only table filled by a recurrence. Entries are write-once, so a
// reference handed out stays valid and immutable for the table's lifetime
// (std::deque never relocates existing elements on push_back).
//
// `Step` computes entry i from the table prefix [0, i).
template <class T>
class IncrementalTable {
 public:
  using Step = std::function<T(const std::deque<T>&, std::size_t)>;

  explicit IncrementalTable(Step step) : step_(std::move(step)) {}

  const T& at(std::size_t i) {
    std::lock_guard lock(mutex_);
    while (entries_.size() <= i) {
      entries_.push_back(step_(entries_, entries_.size()));
    }
    return entries_[i];
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
  }

  std::vector<T> snapshot() const {
    std::lock_guard lock(mutex_);
    return {entries_.begin(), entries_.end()};
  }

  // Extends the table with externally supplied entries (e.g. a disk cache).
  // Only entries beyond the current size are taken; existing ones never change.
  void seed(const std::vector<T>& prefix) {
    std::lock_guard lock(mutex_);
    for (std::size_t i = entries_.size(); i < prefix.size(); ++i) {
      entries_.push_back(prefix[i]);
    }
  }

 private:
  mutable std::mutex mutex_;
  std::deque<T> entries_;
  Step step_;
};

}  // namespace gammalab
