#include "retraction/belief_sim.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <cmath>
#include <numeric>
#include <queue>
#include <thread>

#include "retraction/csv.hpp"
#include "retraction/error.hpp"

namespace retraction::sim {

std::string Topology::describe() const {
  switch (kind) {
    case Kind::Complete: return "complete";
    case Kind::Ring: return "ring:" + std::to_string(ring_k);
    case Kind::ErdosRenyi: return "erdos-renyi:" + format_double(edge_prob);
  }
  return "unknown";
}

Topology parse_topology(std::string_view text) {
  text = trim(text);
  if (text == "complete") return Topology::complete();
  const auto colon = text.find(':');
  const auto name = text.substr(0, colon);
  const auto arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  if (name == "ring") {
    auto k = parse_int(arg);
    if (!k) throw Error(ErrorCode::InvalidTopologyParam, "ring topology needs an integer k: ring:K");
    return Topology::ring(static_cast<int>(*k));
  }
  if (name == "erdos-renyi" || name == "er") {
    auto p = parse_double(arg);
    if (!p) throw Error(ErrorCode::InvalidTopologyParam, "erdos-renyi topology needs p: erdos-renyi:P");
    return Topology::erdos_renyi(*p);
  }
  throw Error(ErrorCode::InvalidTopologyParam, "unknown topology '" + std::string(text) + "'");
}

Network::Network(std::vector<std::vector<int>> adjacency) : adjacency_(std::move(adjacency)) {
  const int n = node_count();
  for (int v = 0; v < n; ++v) {
    auto nbrs = adjacency_[v];
    std::sort(nbrs.begin(), nbrs.end());
    if (std::adjacent_find(nbrs.begin(), nbrs.end()) != nbrs.end())
      throw Error(ErrorCode::InvalidArgument, "duplicate edge at node " + std::to_string(v));
    for (int u : nbrs) {
      if (u < 0 || u >= n) throw Error(ErrorCode::InvalidArgument, "neighbour index out of range");
      if (u == v) throw Error(ErrorCode::InvalidArgument, "self-loop at node " + std::to_string(v));
      const auto& back = adjacency_[u];
      if (std::find(back.begin(), back.end(), v) == back.end())
        throw Error(ErrorCode::InvalidArgument, "edge is not symmetric");
    }
  }
}

std::size_t Network::edge_count() const {
  std::size_t degree_sum = 0;
  for (const auto& nbrs : adjacency_) degree_sum += nbrs.size();
  return degree_sum / 2;
}

bool Network::is_connected() const {
  const int n = node_count();
  if (n == 0) return false;
  std::vector<char> seen(n, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop();
    for (int u : adjacency_[v]) {
      if (!seen[u]) {
        seen[u] = 1;
        ++reached;
        frontier.push(u);
      }
    }
  }
  return reached == n;
}

Network build_network(const Topology& topology, int n_agents, Rng& rng, int max_retries) {
  if (n_agents < 2) throw Error(ErrorCode::InvalidTopologyParam, "n_agents must be >= 2");
  std::vector<std::vector<int>> adj(n_agents);
  switch (topology.kind) {
    case Topology::Kind::Complete:
      for (int v = 0; v < n_agents; ++v)
        for (int u = 0; u < n_agents; ++u)
          if (u != v) adj[v].push_back(u);
      return Network(std::move(adj));

    case Topology::Kind::Ring: {
      const int k = topology.ring_k;
      if (k < 1 || k >= n_agents)
        throw Error(ErrorCode::InvalidTopologyParam, "ring requires 1 <= k < n_agents");
      // offsets wrap; for 2k >= n some offsets coincide, so dedupe per node
      for (int v = 0; v < n_agents; ++v) {
        for (int d = 1; d <= k; ++d) {
          for (int u : {(v + d) % n_agents, (v - d + n_agents) % n_agents}) {
            if (u != v && std::find(adj[v].begin(), adj[v].end(), u) == adj[v].end())
              adj[v].push_back(u);
          }
        }
      }
      return Network(std::move(adj));
    }

    case Topology::Kind::ErdosRenyi: {
      const double p = topology.edge_prob;
      if (!(p > 0.0 && p <= 1.0))
        throw Error(ErrorCode::InvalidTopologyParam, "erdos-renyi requires 0 < p <= 1");
      std::bernoulli_distribution coin(p);
      for (int attempt = 0; attempt < max_retries; ++attempt) {
        for (auto& nbrs : adj) nbrs.clear();
        for (int v = 0; v < n_agents; ++v)
          for (int u = v + 1; u < n_agents; ++u)
            if (coin(rng)) {
              adj[v].push_back(u);
              adj[u].push_back(v);
            }
        Network net(adj);
        if (net.is_connected()) return net;
      }
      throw Error(ErrorCode::DisconnectedAfterRetries,
                  "erdos-renyi graph not connected after " + std::to_string(max_retries) +
                      " draws (n=" + std::to_string(n_agents) + ", p=" + format_double(p) + ")");
    }
  }
  throw Error(ErrorCode::Internal, "unhandled topology");
}

void validate(const SimParams& params) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); };
  if (params.n_agents < 2) fail("n_agents must be >= 2");
  if (params.share_window < 1) fail("share_window must be positive");
  if (params.max_steps < 1) fail("max_steps must be positive");
  if (params.retraction_delay < 0) fail("retraction_delay must be non-negative");
  if (params.retraction_delay > params.max_steps) fail("retraction_delay must not exceed max_steps");
  if (params.n_replicates < 1) fail("n_replicates must be positive");
  if (!(params.transmission_prob > 0.0 && params.transmission_prob <= 1.0))
    fail("transmission_prob must be in (0, 1]");
  const auto& t = params.topology;
  if (t.kind == Topology::Kind::Ring && (t.ring_k < 1 || t.ring_k >= params.n_agents))
    throw Error(ErrorCode::InvalidTopologyParam, "ring requires 1 <= k < n_agents");
  if (t.kind == Topology::Kind::ErdosRenyi && !(t.edge_prob > 0.0 && t.edge_prob <= 1.0))
    throw Error(ErrorCode::InvalidTopologyParam, "erdos-renyi requires 0 < p <= 1");
}

SimState SimState::all_neutral(int n_agents) {
  SimState s;
  s.beliefs.assign(n_agents, Belief::Neutral);
  s.carried.assign(n_agents, Message::None);
  s.share_clock.assign(n_agents, 0);
  return s;
}

BeliefCounts SimState::counts() const {
  BeliefCounts c;
  for (auto b : beliefs) {
    switch (b) {
      case Belief::Neutral: ++c.neutral; break;
      case Belief::False: ++c.false_belief; break;
      case Belief::Retracted: ++c.retracted; break;
    }
  }
  return c;
}

bool SimState::quiescent() const {
  return std::none_of(share_clock.begin(), share_clock.end(), [](int c) { return c > 0; });
}

void seed_false_claim(SimState& state, int agent, int share_window) {
  if (agent < 0 || agent >= state.size())
    throw Error(ErrorCode::InvalidArgument, "seed agent out of range");
  state.beliefs[agent] = Belief::False;
  state.carried[agent] = Message::FalseClaim;
  state.share_clock[agent] = share_window;
  state.patient_zero = agent;
}

void seed_retraction(SimState& state, int share_window, Rng& rng) {
  int holder = state.patient_zero;
  if (holder < 0 || state.beliefs[holder] == Belief::Neutral) {
    std::vector<int> believers;
    for (int a = 0; a < state.size(); ++a)
      if (state.beliefs[a] == Belief::False) believers.push_back(a);
    if (!believers.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, believers.size() - 1);
      holder = believers[pick(rng)];
    }
  }
  if (holder < 0) {
    std::uniform_int_distribution<int> pick(0, state.size() - 1);
    holder = pick(rng);
  }
  if (state.beliefs[holder] == Belief::False) state.beliefs[holder] = Belief::Retracted;
  state.carried[holder] = Message::Retraction;
  state.share_clock[holder] = share_window;
  state.retraction_seeded = true;
}

namespace {

struct RoundContext {
  SimState& state;
  Rng& rng;
  const StepConfig& config;
  std::vector<char>& shared;
  std::vector<char>& converted;

  Message active(int agent) const {
    return state.share_clock[agent] > 0 ? state.carried[agent] : Message::None;
  }

  bool accepts() {
    if (config.transmission_prob >= 1.0) return true;
    return std::bernoulli_distribution(config.transmission_prob)(rng);
  }

  void transmit(Message message, int receiver) {
    auto& belief = state.beliefs[receiver];
    if (message == Message::FalseClaim && belief == Belief::Neutral) {
      if (!accepts()) return;
      belief = Belief::False;
      state.carried[receiver] = Message::FalseClaim;
    } else if (message == Message::Retraction && belief == Belief::False) {
      if (!accepts()) return;
      belief = Belief::Retracted;
      state.carried[receiver] = Message::Retraction;
    } else {
      return;
    }
    state.share_clock[receiver] = config.share_window;
    converted[receiver] = 1;
  }

  void contact(int a, int b) {
    const Message from_a = active(a);
    const Message from_b = active(b);
    if (from_a != Message::None) shared[a] = 1;
    if (from_b != Message::None) shared[b] = 1;
    if (from_a != Message::None) transmit(from_a, b);
    if (from_b != Message::None) transmit(from_b, a);
  }
};

}  // namespace

void step(SimState& state, const Network& network, Rng& rng, const StepConfig& config) {
  const int n = state.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<char> shared(n, 0), converted(n, 0);
  RoundContext round{state, rng, config, shared, converted};
  for (int agent : order) {
    auto nbrs = network.neighbors(agent);
    if (nbrs.empty()) continue;
    std::uniform_int_distribution<std::size_t> pick(0, nbrs.size() - 1);
    round.contact(agent, nbrs[pick(rng)]);
  }
  for (int a = 0; a < n; ++a)
    if (shared[a] && !converted[a] && state.share_clock[a] > 0) --state.share_clock[a];
  ++state.step;
}

BeliefCounts run(const SimParams& params, Rng& rng, const StepObserver& observer) {
  validate(params);
  const Network network = build_network(params.topology, params.n_agents, rng);
  const StepConfig config{params.share_window, params.transmission_prob};

  SimState state = SimState::all_neutral(params.n_agents);
  std::uniform_int_distribution<int> pick(0, params.n_agents - 1);
  seed_false_claim(state, pick(rng), params.share_window);
  if (observer) observer(state);

  while (true) {
    if (!state.retraction_seeded && state.step == params.retraction_delay) {
      seed_retraction(state, params.share_window, rng);
      if (observer) observer(state);
    }
    if (state.step >= params.max_steps) break;
    if (state.quiescent()) {
      if (state.retraction_seeded) break;
      // frozen until the retraction arrives
      state.step = params.retraction_delay;
      continue;
    }
    step(state, network, rng, config);
    if (observer) observer(state);
  }
  return state.counts();
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void summarize(const std::vector<BeliefCounts>& reps, int n_agents, DelaySummary& out) {
  // Integer moments keep constant columns at exactly zero spread.
  const long long n = static_cast<long long>(reps.size());
  auto stats = [&](auto field, double& mean, double& sd) {
    __int128 sum = 0, sum_sq = 0;
    for (const auto& r : reps) {
      const __int128 c = field(r);
      sum += c;
      sum_sq += c * c;
    }
    mean = static_cast<double>(sum) / static_cast<double>(n) / n_agents;
    if (n < 2) {
      sd = 0.0;
      return;
    }
    const __int128 centered = n * sum_sq - sum * sum;  // n^2 * biased variance
    sd = std::sqrt(static_cast<double>(centered) / static_cast<double>(n * (n - 1))) / n_agents;
  };
  stats([](const BeliefCounts& c) { return c.neutral; }, out.mean_neutral, out.sd_neutral);
  stats([](const BeliefCounts& c) { return c.false_belief; }, out.mean_false, out.sd_false);
  stats([](const BeliefCounts& c) { return c.retracted; }, out.mean_retracted, out.sd_retracted);
}

}  // namespace

std::uint64_t replicate_seed(std::uint64_t base_seed, std::uint64_t delay_index,
                             std::uint64_t replicate) {
  std::uint64_t h = splitmix64(base_seed);
  h = splitmix64(h ^ splitmix64(delay_index + 0x632BE59BD9B4E019ULL));
  h = splitmix64(h ^ splitmix64(replicate + 0x8CB92BA72F3D8DD7ULL));
  return h;
}

SweepResult sweep_delay(const SimParams& params, std::span<const int> delays, unsigned threads) {
  if (delays.empty()) throw Error(ErrorCode::InvalidArgument, "delay grid is empty");
  for (int d : delays) {
    SimParams p = params;
    p.retraction_delay = d;
    validate(p);
  }

  SweepResult result;
  result.n_agents = params.n_agents;
  result.delays.assign(delays.begin(), delays.end());
  const std::size_t reps = static_cast<std::size_t>(params.n_replicates);
  result.replicates.assign(delays.size(), std::vector<BeliefCounts>(reps));

  const std::size_t jobs = delays.size() * reps;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs));

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    while (!failed.load()) {
      const std::size_t job = next.fetch_add(1);
      if (job >= jobs) return;
      const std::size_t di = job / reps;
      const std::size_t ri = job % reps;
      try {
        SimParams p = params;
        p.retraction_delay = delays[di];
        Rng rng(replicate_seed(params.rng_seed, di, ri));
        result.replicates[di][ri] = run(p, rng);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed = true;
      }
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);

  result.summaries.resize(delays.size());
  for (std::size_t di = 0; di < delays.size(); ++di) {
    result.summaries[di].delay = delays[di];
    summarize(result.replicates[di], params.n_agents, result.summaries[di]);
  }
  return result;
}

void write_replicates_csv(const SweepResult& result, const std::string& path) {
  auto out = open_output(path);
  write_csv_row(out, {"delay", "replicate", "final_neutral", "final_false", "final_retracted"});
  for (std::size_t di = 0; di < result.delays.size(); ++di) {
    for (std::size_t ri = 0; ri < result.replicates[di].size(); ++ri) {
      const auto& c = result.replicates[di][ri];
      out << result.delays[di] << ',' << ri << ',' << c.neutral << ',' << c.false_belief << ','
          << c.retracted << '\n';
    }
  }
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path);
}

void write_summary_csv(const SweepResult& result, const std::string& path) {
  auto out = open_output(path);
  write_csv_row(out, {"delay", "mean_retracted", "sd_retracted", "mean_false", "sd_false",
                      "mean_neutral", "sd_neutral"});
  for (const auto& s : result.summaries) {
    write_csv_row(out, {std::to_string(s.delay), format_double(s.mean_retracted),
                        format_double(s.sd_retracted), format_double(s.mean_false),
                        format_double(s.sd_false), format_double(s.mean_neutral),
                        format_double(s.sd_neutral)});
  }
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path);
}

}  // namespace retraction::sim
