#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace conscript::sim {

// Simulated integer-seconds clock owning a (time, sequence)-ordered event
// queue. Sequence numbers break ties in scheduling order, so identical
// seeds replay identical event orders; time never moves backwards.
class SimClock {
 public:
  struct Event {
    uint64_t time = 0;
    size_t sequence = 0;
    size_t profile_index = 0;
    size_t server_index = 0;
  };

  void schedule(uint64_t time, size_t profile_index, size_t server_index) {
    if (drained_) throw std::logic_error("cannot schedule after draining began");
    queue_.push_back(Event{time, queue_.size(), profile_index, server_index});
  }

  bool empty() {
    drain();
    return next_ >= queue_.size();
  }

  Event pop() {
    drain();
    if (next_ >= queue_.size()) throw std::logic_error("event queue exhausted");
    const Event& e = queue_[next_++];
    if (e.time < now_) throw std::logic_error("clock would move backwards");
    now_ = e.time;
    return e;
  }

  uint64_t now() const { return now_; }

  // Jump forward (e.g. to the end of the round). Never moves back.
  void advance_to(uint64_t time) { now_ = std::max(now_, time); }

 private:
  void drain() {
    if (drained_) return;
    drained_ = true;
    std::stable_sort(queue_.begin(), queue_.end(), [](const Event& a, const Event& b) {
      return a.time != b.time ? a.time < b.time : a.sequence < b.sequence;
    });
  }

  std::vector<Event> queue_;
  bool drained_ = false;
  size_t next_ = 0;
  uint64_t now_ = 0;
};

}  // namespace conscript::sim
