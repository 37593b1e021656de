#pragma once

// Lockstep message-passing simulation of the agent network.
//
// One inner iteration is three phases separated by barriers:
//   Primal  every agent runs its x̄ step, then sends x̄[i] and μ̃_i^(j) to each neighbour j
//   Copies  every agent re-solves its copies w, then sends w_i^(j) to neighbour j
//   Dual    every agent updates its duals (no traffic)
// A Sync phase (copies only, no computation) precedes the first iteration.
// Messages are the only cross-agent channel and are delivered sorted by
// (sender, receiver, kind), so multi-threaded runs match single-threaded ones
// bit for bit.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fdirnet/agent.hpp"
#include "fdirnet/prox.hpp"

namespace fdirnet {

enum class PayloadKind { XBar, DualMu, CopyOfYou };

const char* to_string(PayloadKind k) noexcept;

struct Message {
  std::size_t sender = 0;
  std::size_t receiver = 0;
  long round = 0;
  PayloadKind kind = PayloadKind::XBar;
  Eigen::VectorXd payload;
};

enum class Phase { Sync = 0, Primal = 1, Copies = 2, Dual = 3 };

struct PhaseOutcome {
  std::vector<Message> delivered;
  std::vector<char> fast_path;             // Primal: threshold fired, per agent
  std::vector<ViolationNorms> violations;  // Dual: per agent
};

struct MessageRecord {
  long round = 0;
  int phase = 0;
  std::size_t sender = 0;
  std::size_t receiver = 0;
  PayloadKind kind = PayloadKind::XBar;
  std::size_t floats = 0;
  double payload_norm = 0.0;
};

// Worker-thread cap from FDIRNET_THREADS; unset means hardware concurrency,
// 0 means single-threaded.
std::size_t default_thread_count();

class Network {
 public:
  Network() = default;
  // Agent k must have id k. Throws InvalidArgument otherwise, or if the
  // neighbour relation is not symmetric.
  explicit Network(std::vector<AgentState> agents, std::size_t threads = 0);

  std::size_t size() const noexcept { return agents_.size(); }
  std::vector<AgentState>& agents() noexcept { return agents_; }
  const std::vector<AgentState>& agents() const noexcept { return agents_; }

  std::size_t threads() const noexcept { return threads_; }
  void set_threads(std::size_t threads) noexcept { threads_ = threads; }

  // Resets every agent's round counter to 0 (start of an inner solve).
  void reset_round();
  long round() const noexcept { return round_; }

  // Primal advances the round counter before running.
  PhaseOutcome run_phase(Phase phase, const ProxOptions& prox = {});

  // Returning true drops the message. Unset by default.
  std::function<bool(const Message&)> drop_filter;

  void set_logging(bool on) noexcept { logging_ = on; }
  const std::vector<MessageRecord>& log() const noexcept { return log_; }
  void clear_log() { log_.clear(); }

 private:
  void deliver(std::vector<Message>& outgoing, Phase phase, PhaseOutcome& out);

  std::vector<AgentState> agents_;
  std::size_t threads_ = 0;
  long round_ = 0;
  bool logging_ = false;
  std::vector<MessageRecord> log_;
};

// Runs fn(k) for k in [0, n) on up to `threads` workers; the exception of the
// lowest failing index is rethrown.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

struct AgentTraffic {
  std::size_t messages = 0;
  std::size_t floats = 0;
  std::size_t bytes() const noexcept { return floats * sizeof(double); }
};

// Messages and payload floats sent, keyed by (round, sender).
std::map<std::pair<long, std::size_t>, AgentTraffic> message_stats(
    const std::vector<MessageRecord>& log);

// CSV: round,phase,sender,receiver,kind,payload_norm
void write_message_csv(std::ostream& os, const std::vector<MessageRecord>& log);

}  // namespace fdirnet
