#pragma once

// Agent-based belief spread with delayed retraction on a connected network.
//
// Agents move only along Neutral -> False -> Retracted. Each round every agent
// (in a fresh random order) contacts one uniformly random neighbour; both
// sides of a contact may transmit whatever message they are still actively
// sharing. A message is shared for `share_window` rounds after it is acquired.

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace retraction::sim {

using Rng = std::mt19937_64;

enum class Belief : std::uint8_t { Neutral, False, Retracted };

// What an agent would transmit while its share clock is positive.
enum class Message : std::uint8_t { None, FalseClaim, Retraction };

struct Topology {
  enum class Kind { Complete, Ring, ErdosRenyi };

  Kind kind = Kind::Complete;
  int ring_k = 2;          // neighbours on each side of a ring lattice
  double edge_prob = 0.1;  // Erdos-Renyi G(n, p)

  static Topology complete() { return {}; }
  static Topology ring(int k) { return {Kind::Ring, k, 0.0}; }
  static Topology erdos_renyi(double p) { return {Kind::ErdosRenyi, 0, p}; }

  std::string describe() const;
};

// Accepts "complete", "ring:K" and "erdos-renyi:P" (alias "er:P").
Topology parse_topology(std::string_view text);

class Network {
 public:
  // Throws InvalidArgument unless the adjacency is simple and symmetric.
  explicit Network(std::vector<std::vector<int>> adjacency);

  int node_count() const { return static_cast<int>(adjacency_.size()); }
  std::size_t edge_count() const;
  std::span<const int> neighbors(int node) const { return adjacency_[node]; }
  bool is_connected() const;

 private:
  std::vector<std::vector<int>> adjacency_;
};

// Random topologies are redrawn until connected; after `max_retries` failed
// draws DisconnectedAfterRetries is thrown.
Network build_network(const Topology& topology, int n_agents, Rng& rng,
                      int max_retries = 100);

struct SimParams {
  int n_agents = 100;
  Topology topology = Topology::complete();
  int share_window = 200;
  int retraction_delay = 0;
  int max_steps = 1000;
  int n_replicates = 1;
  std::uint64_t rng_seed = 0;
  double transmission_prob = 1.0;
};

// Throws InvalidArgument / InvalidTopologyParam on bad parameters.
void validate(const SimParams& params);

struct BeliefCounts {
  int neutral = 0;
  int false_belief = 0;
  int retracted = 0;

  int total() const { return neutral + false_belief + retracted; }
  friend bool operator==(const BeliefCounts&, const BeliefCounts&) = default;
};

struct SimState {
  std::vector<Belief> beliefs;
  std::vector<Message> carried;
  std::vector<int> share_clock;
  int step = 0;
  int patient_zero = -1;
  bool retraction_seeded = false;

  static SimState all_neutral(int n_agents);

  int size() const { return static_cast<int>(beliefs.size()); }
  BeliefCounts counts() const;
  bool quiescent() const;

  friend bool operator==(const SimState&, const SimState&) = default;
};

struct StepConfig {
  int share_window = 200;
  double transmission_prob = 1.0;
};

void seed_false_claim(SimState& state, int agent, int share_window);

// Hands the retraction to patient zero (falling back to a random False agent
// if patient zero is somehow still Neutral). With no False agent available
// the message is still held by patient zero and spreads to False receivers.
void seed_retraction(SimState& state, int share_window, Rng& rng);

// One contact round; advances state.step by one.
void step(SimState& state, const Network& network, Rng& rng,
          const StepConfig& config);

using StepObserver = std::function<void(const SimState&)>;

// Builds the network, seeds a uniformly random patient zero, seeds the
// retraction at step == retraction_delay and runs to max_steps or quiescence.
// `observer` sees the initial state and the state after every transition.
BeliefCounts run(const SimParams& params, Rng& rng,
                 const StepObserver& observer = {});

// Seed for replicate `replicate` of delay-grid entry `delay_index`.
std::uint64_t replicate_seed(std::uint64_t base_seed, std::uint64_t delay_index,
                             std::uint64_t replicate);

struct DelaySummary {
  int delay = 0;
  double mean_neutral = 0, sd_neutral = 0;
  double mean_false = 0, sd_false = 0;
  double mean_retracted = 0, sd_retracted = 0;
};

struct SweepResult {
  int n_agents = 0;
  std::vector<int> delays;
  std::vector<std::vector<BeliefCounts>> replicates;  // [delay][replicate]
  std::vector<DelaySummary> summaries;
};

// Runs params.n_replicates simulations per delay. Output does not depend on
// `threads` (0 = hardware concurrency).
SweepResult sweep_delay(const SimParams& params, std::span<const int> delays,
                        unsigned threads = 1);

void write_replicates_csv(const SweepResult& result, const std::string& path);
void write_summary_csv(const SweepResult& result, const std::string& path);

}  // namespace retraction::sim
