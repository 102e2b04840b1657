#pragma once

#include <atomic>
#include <chrono>

namespace gridswitch {

// Time source used for limits, heartbeats and protocol timers. The simulated
// variant makes whole runs a deterministic function of the schedule.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual double now() const = 0;  // seconds since clock start
};

class WallClock final : public Clock {
 public:
  WallClock() : start_(std::chrono::steady_clock::now()) {}
  double now() const override {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

class SimulatedClock final : public Clock {
 public:
  double now() const override { return t_.load(std::memory_order_relaxed); }
  void advance(double dt) {
    t_.store(t_.load(std::memory_order_relaxed) + dt,
             std::memory_order_relaxed);
  }

 private:
  std::atomic<double> t_{0.0};
};

}  // namespace gridswitch
