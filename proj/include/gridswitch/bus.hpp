#pragma once

// In-process message bus with MPI-like tagged, asynchronous, per-pair
// ordered delivery. Incumbent mailboxes keep only the freshest value;
// worker solutions queue FIFO at the master. All sends are non-blocking.

#include <deque>
#include <mutex>
#include <optional>
#include <vector>

#include "gridswitch/network.hpp"

namespace gridswitch {

enum class MsgTag { Status, Solution, Incumbent };

struct Message {
  MsgTag tag = MsgTag::Status;
  int sender = 0;
  double timestamp = 0.0;
  OtspSolution payload;     // Solution / Incumbent
  double objective = 0.0;   // Solution / Incumbent
  bool terminated = false;  // Status
};

class MessageBus {
 public:
  explicit MessageBus(int num_workers)
      : incumbent_(static_cast<std::size_t>(num_workers)) {}

  int num_workers() const { return static_cast<int>(incumbent_.size()); }

  // worker j -> rank 0
  void send_solution(Message msg) {
    std::lock_guard<std::mutex> lock(mutex_);
    solutions_.push_back(std::move(msg));
    ++solutions_sent_;
  }

  std::vector<Message> drain_solutions() {
    std::lock_guard<std::mutex> lock(mutex_);
    std::vector<Message> out(solutions_.begin(), solutions_.end());
    solutions_.clear();
    return out;
  }

  // rank 0 -> all workers; latest value wins
  void broadcast_incumbent(const Message& msg) {
    std::lock_guard<std::mutex> lock(mutex_);
    for (auto& slot : incumbent_) slot = msg;
  }

  std::optional<Message> poll_incumbent(int worker) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto& slot = incumbent_.at(static_cast<std::size_t>(worker));
    std::optional<Message> out;
    out.swap(slot);
    return out;
  }

  void broadcast_status(bool terminated, double timestamp) {
    std::lock_guard<std::mutex> lock(mutex_);
    terminated_ = terminated;
    status_timestamp_ = timestamp;
  }

  bool poll_status() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return terminated_;
  }

  long solutions_sent() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return solutions_sent_;
  }

 private:
  mutable std::mutex mutex_;
  std::deque<Message> solutions_;
  std::vector<std::optional<Message>> incumbent_;
  bool terminated_ = false;
  double status_timestamp_ = 0.0;
  long solutions_sent_ = 0;
};

}  // namespace gridswitch
