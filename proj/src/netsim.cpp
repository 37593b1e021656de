#include "fdirnet/netsim.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <ostream>
#include <string>
#include <thread>
#include <tuple>

#include "fdirnet/errors.hpp"

namespace fdirnet {

const char* to_string(PayloadKind k) noexcept {
  switch (k) {
    case PayloadKind::XBar: return "xbar";
    case PayloadKind::DualMu: return "dual_mu";
    case PayloadKind::CopyOfYou: return "copy";
  }
  return "unknown";
}

std::size_t default_thread_count() {
  if (const char* env = std::getenv("FDIRNET_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 0) return static_cast<std::size_t>(v);
  }
  return std::thread::hardware_concurrency();
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t k = 0; k < n; ++k) fn(k);
    return;
  }
  const std::size_t workers = std::min(threads, n);
  std::vector<std::exception_ptr> errors(n);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < n; k += workers) {
          try {
            fn(k);
          } catch (...) {
            errors[k] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

Network::Network(std::vector<AgentState> agents, std::size_t threads)
    : agents_(std::move(agents)), threads_(threads) {
  for (std::size_t k = 0; k < agents_.size(); ++k) {
    if (agents_[k].id() != k) {
      throw InvalidArgument("Network: agent at position " + std::to_string(k) + " has id " +
                            std::to_string(agents_[k].id()));
    }
  }
  for (const auto& a : agents_) {
    for (const auto& nb : a.neighbors()) {
      if (nb.agent >= agents_.size() || !agents_[nb.agent].is_neighbor(a.id())) {
        throw InvalidArgument("Network: neighbour relation between " + std::to_string(a.id()) +
                              " and " + std::to_string(nb.agent) + " is not symmetric");
      }
    }
  }
}

void Network::reset_round() {
  round_ = 0;
  for (auto& a : agents_) a.round = 0;
}

PhaseOutcome Network::run_phase(Phase phase, const ProxOptions& prox) {
  PhaseOutcome out;
  const std::size_t n = agents_.size();
  std::vector<std::vector<Message>> outbox(n);

  auto emit = [&](std::size_t k, PayloadKind kind) {
    const AgentState& a = agents_[k];
    for (const auto& nb : a.neighbors()) {
      Message m;
      m.sender = k;
      m.receiver = nb.agent;
      m.round = round_;
      m.kind = kind;
      switch (kind) {
        case PayloadKind::XBar: m.payload = a.x_bar; break;
        case PayloadKind::DualMu: m.payload = nb.mu; break;
        case PayloadKind::CopyOfYou: m.payload = nb.copy; break;
      }
      outbox[k].push_back(std::move(m));
    }
  };

  switch (phase) {
    case Phase::Sync:
      parallel_for(n, threads_, [&](std::size_t k) { emit(k, PayloadKind::CopyOfYou); });
      break;
    case Phase::Primal:
      ++round_;
      for (auto& a : agents_) a.round = round_;
      out.fast_path.assign(n, 0);
      parallel_for(n, threads_, [&](std::size_t k) {
        out.fast_path[k] = primal_update_x(agents_[k], prox) ? 1 : 0;
        emit(k, PayloadKind::XBar);
        emit(k, PayloadKind::DualMu);
      });
      break;
    case Phase::Copies:
      parallel_for(n, threads_, [&](std::size_t k) {
        primal_update_w(agents_[k]);
        emit(k, PayloadKind::CopyOfYou);
      });
      break;
    case Phase::Dual:
      out.violations.assign(n, {});
      parallel_for(n, threads_, [&](std::size_t k) { out.violations[k] = dual_update(agents_[k]); });
      break;
  }

  std::vector<Message> all;
  for (auto& box : outbox) {
    for (auto& m : box) all.push_back(std::move(m));
  }
  deliver(all, phase, out);
  return out;
}

void Network::deliver(std::vector<Message>& outgoing, Phase phase, PhaseOutcome& out) {
  std::stable_sort(outgoing.begin(), outgoing.end(), [](const Message& a, const Message& b) {
    return std::tie(a.sender, a.receiver, a.kind) < std::tie(b.sender, b.receiver, b.kind);
  });
  for (auto& m : outgoing) {
    if (m.sender >= agents_.size() || m.receiver >= agents_.size() ||
        !agents_[m.sender].is_neighbor(m.receiver)) {
      throw ProtocolViolation("message from " + std::to_string(m.sender) + " to non-neighbour " +
                              std::to_string(m.receiver));
    }
    if (m.round != round_) {
      throw ProtocolViolation("message stamped for round " + std::to_string(m.round) +
                              " delivered at round " + std::to_string(round_));
    }
    if (drop_filter && drop_filter(m)) continue;
    NeighborLink& link = agents_[m.receiver].neighbor(m.sender);
    Stamped* slot = nullptr;
    switch (m.kind) {
      case PayloadKind::XBar: slot = &link.x_bar; break;
      case PayloadKind::DualMu: slot = &link.mu_toward_me; break;
      case PayloadKind::CopyOfYou: slot = &link.copy_of_me; break;
    }
    slot->value = m.payload;
    slot->round = m.round;
    if (logging_) {
      log_.push_back({m.round, static_cast<int>(phase), m.sender, m.receiver, m.kind,
                      static_cast<std::size_t>(m.payload.size()), m.payload.norm()});
    }
    out.delivered.push_back(std::move(m));
  }
}

std::map<std::pair<long, std::size_t>, AgentTraffic> message_stats(
    const std::vector<MessageRecord>& log) {
  std::map<std::pair<long, std::size_t>, AgentTraffic> stats;
  for (const auto& r : log) {
    auto& t = stats[{r.round, r.sender}];
    ++t.messages;
    t.floats += r.floats;
  }
  return stats;
}

void write_message_csv(std::ostream& os, const std::vector<MessageRecord>& log) {
  os << "round,phase,sender,receiver,kind,payload_norm\n";
  const auto old = os.precision(17);
  for (const auto& r : log) {
    os << r.round << ',' << r.phase << ',' << r.sender << ',' << r.receiver << ','
       << to_string(r.kind) << ',' << r.payload_norm << '\n';
  }
  os.precision(old);
}

}  // namespace fdirnet
