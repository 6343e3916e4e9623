#ifndef DECOT_SIMNET_HPP_
#define DECOT_SIMNET_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "decot/topology.hpp"
#include "decot/types.hpp"

namespace decot {

struct Message {
  int from = 0;
  Vector payload;
};

// Messages delivered to one agent in one round, ordered by sender.
using Inbox = std::vector<Message>;

struct RoundReport {
  int round = 0;
  std::int64_t messages_sent = 0;
  std::int64_t scalars_transferred = 0;
};

// Runs a callable once per agent, either inline or on a fixed pool of worker
// threads with a statically partitioned agent range. Each call returns only
// after every agent finished (a barrier). If any agent throws, the exception
// from the lowest agent index is rethrown.
class AgentExecutor {
 public:
  AgentExecutor(int num_agents, int num_threads);
  ~AgentExecutor();
  AgentExecutor(const AgentExecutor&) = delete;
  AgentExecutor& operator=(const AgentExecutor&) = delete;

  int num_threads() const { return num_threads_; }
  void for_each_agent(const std::function<void(int)>& fn);

 private:
  struct Pool;
  int num_agents_;
  int num_threads_;
  std::unique_ptr<Pool> pool_;
};

// Synchronous, lossless, in-memory network over a static graph.
class Network {
 public:
  explicit Network(const Graph& g, int num_threads = 1);

  const Graph& graph() const { return graph_; }
  AgentExecutor& executor() { return executor_; }

  // Delivers outgoing[j] to every neighbor of j. All vectors must share one
  // length; otherwise DimensionMismatch is thrown and nothing is delivered.
  std::vector<Inbox> exchange(std::span<const Vector> outgoing);

  // Report for the most recent exchange.
  const RoundReport& last_report() const { return last_; }
  std::int64_t total_messages() const { return total_messages_; }
  std::int64_t total_scalars() const { return total_scalars_; }
  int rounds() const { return rounds_; }

 private:
  Graph graph_;
  AgentExecutor executor_;
  RoundReport last_;
  std::int64_t total_messages_ = 0;
  std::int64_t total_scalars_ = 0;
  int rounds_ = 0;
};

// Per-round phase callbacks for run_rounds. `publish` produces the vector an
// agent broadcasts; `primal` and `dual` run per agent between barriers;
// `end_of_round` runs once on the driver thread and returns false to stop.
struct RoundCallbacks {
  std::function<Vector(int agent)> publish;
  std::function<void(int agent, const Inbox& inbox)> primal;
  std::function<void(int agent, const Inbox& inbox)> dual;
  std::function<bool(const RoundReport& report)> end_of_round;
};

// exchange -> primal -> dual, with a barrier between phases.
std::vector<RoundReport> run_rounds(Network& net, const RoundCallbacks& callbacks,
                                    int num_rounds);

}  // namespace decot

#endif  // DECOT_SIMNET_HPP_
