#include "decot/simnet.hpp"

#include <algorithm>
#include <barrier>
#include <exception>
#include <string>
#include <thread>

#include "decot/errors.hpp"

namespace decot {

struct AgentExecutor::Pool {
  explicit Pool(int num_threads)
      : start(num_threads + 1), finish(num_threads + 1) {}

  std::barrier<> start;
  std::barrier<> finish;
  const std::function<void(int)>* task = nullptr;
  bool stopping = false;
  std::vector<std::exception_ptr> errors;
  std::vector<std::jthread> workers;
};

AgentExecutor::AgentExecutor(int num_agents, int num_threads)
    : num_agents_(num_agents),
      num_threads_(std::clamp(num_threads, 1, std::max(1, num_agents))) {
  if (num_threads_ <= 1) return;
  pool_ = std::make_unique<Pool>(num_threads_);
  pool_->errors.resize(static_cast<std::size_t>(num_agents_));
  for (int t = 0; t < num_threads_; ++t) {
    const int begin = num_agents_ * t / num_threads_;
    const int end = num_agents_ * (t + 1) / num_threads_;
    pool_->workers.emplace_back([this, begin, end] {
      Pool& pool = *pool_;
      while (true) {
        pool.start.arrive_and_wait();
        if (pool.stopping) break;
        for (int a = begin; a < end; ++a) {
          try {
            (*pool.task)(a);
          } catch (...) {
            pool.errors[static_cast<std::size_t>(a)] = std::current_exception();
          }
        }
        pool.finish.arrive_and_wait();
      }
    });
  }
}

AgentExecutor::~AgentExecutor() {
  if (!pool_) return;
  pool_->stopping = true;
  pool_->start.arrive_and_wait();
  pool_->workers.clear();
}

void AgentExecutor::for_each_agent(const std::function<void(int)>& fn) {
  if (!pool_) {
    for (int a = 0; a < num_agents_; ++a) fn(a);
    return;
  }
  pool_->task = &fn;
  pool_->start.arrive_and_wait();
  pool_->finish.arrive_and_wait();
  pool_->task = nullptr;
  for (auto& err : pool_->errors) {
    if (err) {
      std::exception_ptr first = err;
      for (auto& e : pool_->errors) e = nullptr;
      std::rethrow_exception(first);
    }
  }
}

Network::Network(const Graph& g, int num_threads)
    : graph_(g), executor_(g.num_agents(), num_threads) {}

std::vector<Inbox> Network::exchange(std::span<const Vector> outgoing) {
  const int n = graph_.num_agents();
  if (static_cast<int>(outgoing.size()) != n) {
    throw DimensionMismatch("exchange: expected one vector per agent (" +
                            std::to_string(n) + "), got " +
                            std::to_string(outgoing.size()));
  }
  const Eigen::Index len = n > 0 ? outgoing[0].size() : 0;
  for (const Vector& v : outgoing) {
    if (v.size() != len) {
      throw DimensionMismatch("exchange: all messages must have the same length");
    }
  }
  std::vector<Inbox> inboxes(static_cast<std::size_t>(n));
  std::int64_t messages = 0;
  for (int i = 0; i < n; ++i) {
    Inbox& box = inboxes[static_cast<std::size_t>(i)];
    for (int j : graph_.neighbors(i)) {
      box.push_back({j, outgoing[static_cast<std::size_t>(j)]});
      ++messages;
    }
  }
  ++rounds_;
  last_ = {rounds_, messages, messages * static_cast<std::int64_t>(len)};
  total_messages_ += last_.messages_sent;
  total_scalars_ += last_.scalars_transferred;
  return inboxes;
}

std::vector<RoundReport> run_rounds(Network& net, const RoundCallbacks& callbacks,
                                    int num_rounds) {
  std::vector<RoundReport> reports;
  const int n = net.graph().num_agents();
  std::vector<Vector> outgoing(static_cast<std::size_t>(n));
  for (int round = 0; round < num_rounds; ++round) {
    net.executor().for_each_agent([&](int a) {
      outgoing[static_cast<std::size_t>(a)] = callbacks.publish(a);
    });
    const std::vector<Inbox> inboxes = net.exchange(outgoing);
    if (callbacks.primal) {
      net.executor().for_each_agent([&](int a) {
        callbacks.primal(a, inboxes[static_cast<std::size_t>(a)]);
      });
    }
    if (callbacks.dual) {
      net.executor().for_each_agent([&](int a) {
        callbacks.dual(a, inboxes[static_cast<std::size_t>(a)]);
      });
    }
    RoundReport report = net.last_report();
    report.round = round + 1;
    reports.push_back(report);
    if (callbacks.end_of_round && !callbacks.end_of_round(report)) break;
  }
  return reports;
}

}  // namespace decot
