#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <stdexcept>
#include <vector>

#include "phcsim/distributions.hpp"

namespace phcsim {

// Pending events ordered by (timestamp, insertion sequence); simultaneous
// events dispatch in insertion order. The clock never moves backward.
template <class Payload>
class EventCalendar {
 public:
  void schedule(double at, Payload payload) {
    if (at < now_)
      throw std::logic_error("EventCalendar: schedule before current clock");
    heap_.push(Entry{at, seq_++, std::move(payload)});
  }

  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  double now() const { return now_; }
  double next_time() const { return heap_.top().t; }

  std::pair<double, Payload> pop() {
    Entry e = heap_.top();
    heap_.pop();
    now_ = e.t;
    return {e.t, std::move(e.payload)};
  }

  void reset() {
    heap_ = {};
    now_ = 0;
    seq_ = 0;
  }

 private:
  struct Entry {
    double t;
    std::uint64_t seq;
    Payload payload;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.t != b.t) return a.t > b.t;
      return a.seq > b.seq;
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
  double now_ = 0;
  std::uint64_t seq_ = 0;
};

// Tally plus time-weighted accumulator.
struct StatAccumulator {
  std::uint64_t count = 0;
  double sum = 0;
  double sum_sq = 0;
  double tw_integral = 0;
  double tw_last_time = 0;
  double tw_last_value = 0;

  void add(double x) {
    ++count;
    sum += x;
    sum_sq += x * x;
  }
  double mean() const { return count ? sum / static_cast<double>(count) : 0.0; }
  double variance() const {
    if (count < 2) return 0.0;
    double m = mean();
    double v = (sum_sq - static_cast<double>(count) * m * m) /
               static_cast<double>(count - 1);
    return v > 0 ? v : 0.0;
  }

  // Integrates the previous value up to t, then holds the new one.
  void tw_update(double t, double value) {
    tw_integral += tw_last_value * (t - tw_last_time);
    tw_last_time = t;
    tw_last_value = value;
  }
  double tw_mean(double t0, double t1) const {
    return t1 > t0 ? tw_integral / (t1 - t0) : 0.0;
  }

  void reset() { *this = StatAccumulator{}; }
};

enum class SubsystemId { Ncd = 0, Doc = 1, Lab = 2, Pharmacy = 3 };
inline constexpr int kNumSubsystems = 4;
inline constexpr const char* kSubsystemNames[kNumSubsystems] = {
    "ncd", "doc", "lab", "pharmacy"};

// Single-server FIFO station. Service times are drawn at service start.
// The waiting line is a vector with a head index so that state clones
// are single-allocation copies.
struct Subsystem {
  struct Waiting {
    int patient;
    double enqueue_time;
  };
  struct InService {
    int patient;
    double start_time;
    double duration;
  };
  struct Started {
    int patient;
    double wait;
    double completion_time;
  };
  struct CompletionResult {
    int completed;
    std::optional<Started> next;
  };

  SubsystemId id = SubsystemId::Doc;
  ServiceDistribution service = ServiceDistribution::uniform(0.0, 1.0);
  std::vector<Waiting> queue;
  std::size_t queue_head = 0;
  std::optional<InService> in_service;
  double busy_time = 0;
  StatAccumulator wait_stats;
  StatAccumulator queue_len;  // time-weighted

  // If the server is idle the patient starts service immediately and the
  // scheduled completion is returned; otherwise the patient queues.
  std::optional<Started> enter(int patient, double now, RngStream& rng) {
    if (!in_service) {
      double d = service.sample(rng);
      in_service = InService{patient, now, d};
      wait_stats.add(0.0);
      return Started{patient, 0.0, now + d};
    }
    queue.push_back(Waiting{patient, now});
    queue_len.tw_update(now, static_cast<double>(queue_length()));
    return std::nullopt;
  }

  CompletionResult complete(double now, RngStream& rng) {
    if (!in_service)
      throw std::logic_error("Subsystem: completion with idle server");
    CompletionResult res{in_service->patient, std::nullopt};
    busy_time += in_service->duration;
    in_service.reset();
    if (queue_head < queue.size()) {
      Waiting w = queue[queue_head++];
      if (queue_head == queue.size()) {
        queue.clear();
        queue_head = 0;
      }
      queue_len.tw_update(now, static_cast<double>(queue_length()));
      double wait = now - w.enqueue_time;
      wait_stats.add(wait);
      double d = service.sample(rng);
      in_service = InService{w.patient, now, d};
      res.next = Started{w.patient, wait, now + d};
    }
    return res;
  }

  int queue_length() const {
    return static_cast<int>(queue.size() - queue_head);
  }
  int present() const { return queue_length() + (in_service ? 1 : 0); }

  void reset_day() {
    queue.clear();
    queue_head = 0;
    in_service.reset();
    busy_time = 0;
    wait_stats.reset();
    queue_len.reset();
  }
};

}  // namespace phcsim
