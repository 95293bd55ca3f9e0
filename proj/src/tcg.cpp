// Copyright 2026 The nocweave Authors
// SPDX-License-Identifier: Apache-2.0

#include "nocweave/tcg.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <string>

#include "nocweave/error.hpp"
#include "nocweave/random.hpp"

namespace nocweave {

const Task& Tcg::task(int id) const {
  for (const Task& t : tasks) {
    if (t.id == id) return t;
  }
  throw Error("unknown task " + std::to_string(id));
}

std::vector<int> Tcg::topological_order() const {
  std::map<int, int> indegree;
  std::map<int, std::vector<int>> succ;
  for (const Task& t : tasks) {
    if (!indegree.emplace(t.id, 0).second) throw Error("duplicate task id " + std::to_string(t.id));
  }
  for (const Message& m : messages) {
    if (!indegree.count(m.src) || !indegree.count(m.dst)) {
      throw Error("message references unknown task " + std::to_string(m.src) + "->" + std::to_string(m.dst));
    }
    ++indegree[m.dst];
    succ[m.src].push_back(m.dst);
  }
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (auto [id, deg] : indegree) {
    if (deg == 0) ready.push(id);
  }
  std::vector<int> order;
  while (!ready.empty()) {
    int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (int w : succ[v]) {
      if (--indegree[w] == 0) ready.push(w);
    }
  }
  if (order.size() != tasks.size()) throw Error("task communication graph contains a cycle");
  return order;
}

Rational RtParams::message_delay(std::int64_t bits) const {
  Rational delay(latency);
  if (alpha) delay += Rational(bits) / *alpha;
  return delay;
}

Rational TimingSpec::makespan() const {
  Rational result(0);
  for (const auto& [id, t] : end) result = std::max(result, t);
  return result;
}

TimingSpec compute_spec(const Tcg& tcg, const RtParams& params) {
  if (params.latency < 0) throw Error("latency parameter must be non-negative");
  if (params.alpha && *params.alpha <= 0) throw Error("alpha must be positive");
  std::map<int, std::vector<const Message*>> incoming;
  for (const Message& m : tcg.messages) incoming[m.dst].push_back(&m);

  TimingSpec spec;
  for (int id : tcg.topological_order()) {
    const Task& t = tcg.task(id);
    if (t.duration < 0) throw Error("negative duration for task " + std::to_string(id));
    auto it = incoming.find(id);
    if (it == incoming.end()) {
      if (!t.arrival) throw Error("source task " + std::to_string(id) + " has no arrival slot");
      spec.end[id] = Rational(*t.arrival + t.duration);
      continue;
    }
    Rational ready = spec.end.at(it->second.front()->src) + params.message_delay(it->second.front()->bits);
    for (const Message* m : it->second) {
      ready = std::max(ready, spec.end.at(m->src) + params.message_delay(m->bits));
    }
    spec.end[id] = ready + t.duration;
  }
  return spec;
}

LagReport compute_lags(const TimingSpec& spec, const std::map<int, Rational>& observed) {
  LagReport report;
  bool first = true;
  for (const auto& [id, end] : spec.end) {
    auto it = observed.find(id);
    if (it == observed.end()) throw Error("no observed completion for task " + std::to_string(id));
    Rational lag = it->second - end;
    report.sum_lag += lag;
    report.max_lag = first ? lag : std::max(report.max_lag, lag);
    first = false;
    report.lag.emplace(id, lag);
  }
  return report;
}

DriftResult detect_drift(std::span<const Rational> lags) {
  if (lags.size() < 3) throw Error("drift detection needs at least three instances");
  const auto n = static_cast<std::int64_t>(lags.size());
  Rational mean_x(n - 1, 2);
  Rational mean_y(0);
  for (const Rational& y : lags) mean_y += y;
  mean_y /= n;
  Rational cov(0);
  Rational var(0);
  for (std::int64_t i = 0; i < n; ++i) {
    Rational dx = Rational(i) - mean_x;
    cov += dx * (lags[i] - mean_y);
    var += dx * dx;
  }
  DriftResult result;
  result.slope = cov / var;
  const Rational threshold(1, 100);
  const Rational magnitude = result.slope < 0 ? Rational(-result.slope) : result.slope;
  if (magnitude > threshold) {
    result.kind = DriftKind::Drift;
  } else {
    bool constant = std::all_of(lags.begin(), lags.end(), [&](const Rational& y) { return y == lags[0]; });
    result.kind = constant ? DriftKind::None : DriftKind::Bounded;
  }
  return result;
}

int unrolled_stride(const Tcg& tcg) {
  int max_id = 0;
  for (const Task& t : tcg.tasks) max_id = std::max(max_id, t.id);
  return max_id + 1;
}

Tcg unroll(const Tcg& tcg, int iterations, std::int64_t app_period) {
  if (iterations < 1) throw Error("need at least one iteration");
  const int stride = unrolled_stride(tcg);
  Tcg out;
  out.app_period = app_period;
  for (int i = 0; i < iterations; ++i) {
    for (const Task& t : tcg.tasks) {
      Task copy = t;
      copy.id = i * stride + t.id;
      if (copy.arrival) *copy.arrival += i * app_period;
      if (copy.deadline) *copy.deadline += i * app_period;
      out.tasks.push_back(copy);
    }
    for (const Message& m : tcg.messages) {
      out.messages.push_back(Message{i * stride + m.src, i * stride + m.dst, m.bits});
    }
    for (auto [task, pe] : tcg.mapping) out.mapping[i * stride + task] = pe;
  }
  return out;
}

Tcg generate_synthetic_tcg(const SyntheticTcgOptions& options, std::uint64_t seed) {
  if (options.tasks < 2 || options.layers < 2 || options.pes < 1) {
    throw Error("synthetic task graph needs >= 2 tasks, >= 2 layers and a PE");
  }
  Rng rng(seed);
  Tcg tcg;
  std::vector<std::vector<int>> layers(options.layers);
  for (int id = 0; id < options.tasks; ++id) {
    // First task of every layer is fixed so that no layer is empty.
    int layer = id < options.layers ? id : static_cast<int>(rng.below(options.layers));
    layers[layer].push_back(id);
  }
  std::vector<int> layer_of(options.tasks);
  for (int l = 0; l < options.layers; ++l) {
    for (int id : layers[l]) layer_of[id] = l;
  }
  std::vector<int> order;
  for (const auto& l : layers) order.insert(order.end(), l.begin(), l.end());

  for (int id = 0; id < options.tasks; ++id) {
    Task t;
    t.id = id;
    t.duration = rng.between(1, options.max_duration);
    if (layer_of[id] == 0) t.arrival = rng.between(0, 3);
    tcg.tasks.push_back(t);
  }
  std::set<std::pair<int, int>> arcs;
  for (int l = 1; l < options.layers; ++l) {
    for (int id : layers[l]) {
      int parents = static_cast<int>(rng.between(1, 3));
      for (int p = 0; p < parents; ++p) {
        // Mostly from the previous layer, sometimes from any earlier one.
        int from_layer = rng.below(4) == 0 ? static_cast<int>(rng.below(l)) : l - 1;
        const auto& pool = layers[from_layer];
        int parent = pool[rng.below(pool.size())];
        if (!arcs.insert({parent, id}).second) continue;
        std::int64_t flits = rng.between(1, options.max_message_flits);
        tcg.messages.push_back(Message{parent, id, flits * options.flit_bits});
      }
    }
  }
  for (int id = 0; id < options.tasks; ++id) tcg.mapping[id] = static_cast<int>(rng.below(options.pes));

  // Serialize co-located tasks in layer order.
  std::map<int, std::vector<int>> by_pe;
  for (int id : order) by_pe[tcg.mapping[id]].push_back(id);
  auto reaches = [&](int from, int to) {
    std::vector<int> stack{from};
    std::set<int> seen{from};
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      if (v == to) return true;
      for (auto [a, b] : arcs) {
        if (a == v && seen.insert(b).second) stack.push_back(b);
      }
    }
    return false;
  };
  for (const auto& [pe, ids] : by_pe) {
    for (std::size_t i = 1; i < ids.size(); ++i) {
      if (!reaches(ids[i - 1], ids[i])) {
        arcs.insert({ids[i - 1], ids[i]});
        tcg.messages.push_back(Message{ids[i - 1], ids[i], options.flit_bits});
      }
    }
  }
  // A task that ended up with no inputs is a source.
  std::set<int> has_input;
  for (const Message& m : tcg.messages) has_input.insert(m.dst);
  for (Task& t : tcg.tasks) {
    if (!has_input.count(t.id) && !t.arrival) t.arrival = 0;
  }
  return tcg;
}

nlohmann::json to_json(const Tcg& tcg) {
  nlohmann::json tasks = nlohmann::json::array();
  for (const Task& t : tcg.tasks) {
    nlohmann::json jt{{"id", t.id}, {"duration", t.duration}};
    if (t.arrival) jt["arrival"] = *t.arrival;
    if (t.deadline) jt["deadline"] = *t.deadline;
    tasks.push_back(std::move(jt));
  }
  nlohmann::json messages = nlohmann::json::array();
  for (const Message& m : tcg.messages) messages.push_back({{"src", m.src}, {"dst", m.dst}, {"bits", m.bits}});
  nlohmann::json mapping = nlohmann::json::object();
  for (auto [task, pe] : tcg.mapping) mapping[std::to_string(task)] = pe;
  nlohmann::json j{{"tasks", tasks}, {"messages", messages}, {"mapping", mapping}};
  if (tcg.app_period) j["app_period"] = *tcg.app_period;
  return j;
}

Tcg tcg_from_json(const nlohmann::json& j) {
  Tcg tcg;
  for (const auto& jt : j.at("tasks")) {
    Task t;
    t.id = jt.at("id").get<int>();
    t.duration = jt.at("duration").get<std::int64_t>();
    if (jt.contains("arrival")) t.arrival = jt["arrival"].get<std::int64_t>();
    if (jt.contains("deadline")) t.deadline = jt["deadline"].get<std::int64_t>();
    tcg.tasks.push_back(t);
  }
  for (const auto& jm : j.at("messages")) {
    Message m{jm.at("src").get<int>(), jm.at("dst").get<int>(), jm.at("bits").get<std::int64_t>()};
    if (m.bits <= 0) throw Error("message length must be positive");
    tcg.messages.push_back(m);
  }
  for (const auto& [key, pe] : j.at("mapping").items()) tcg.mapping[std::stoi(key)] = pe.get<int>();
  if (j.contains("app_period")) tcg.app_period = j["app_period"].get<std::int64_t>();
  return tcg;
}

}  // namespace nocweave
