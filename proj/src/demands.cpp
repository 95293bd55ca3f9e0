// Copyright 2026 The nocweave Authors
// SPDX-License-Identifier: Apache-2.0

#include "nocweave/demands.hpp"

#include <algorithm>
#include <string>

#include "nocweave/error.hpp"
#include "nocweave/random.hpp"

namespace nocweave {

Rational peak_rate(std::span<const FlowInterval> intervals) {
  // (time, delta); at equal times ends sort before starts, so abutting
  // intervals never count as overlapping.
  std::vector<std::pair<Rational, Rational>> events;
  events.reserve(intervals.size() * 2);
  for (const FlowInterval& iv : intervals) {
    if (iv.length <= 0) continue;
    events.emplace_back(iv.start, iv.rate);
    events.emplace_back(iv.start + iv.length, -iv.rate);
  }
  std::sort(events.begin(), events.end());
  Rational level(0);
  Rational peak(0);
  for (const auto& [time, delta] : events) {
    level += delta;
    peak = std::max(peak, level);
  }
  return peak;
}

TcgReduction reduce_tcg(const Tcg& tcg, const RtParams& params, const TimingSpec& spec, int flit_bits, int phi) {
  if (!params.alpha) throw Error("TCG reduction is undefined for infinite alpha");
  if (flit_bits <= 0) throw Error("flit size must be positive");
  TcgReduction out;
  out.matrix.phi = phi;
  std::map<std::pair<int, int>, std::vector<FlowInterval>> by_pair;
  for (const Message& m : tcg.messages) {
    auto src = tcg.mapping.find(m.src);
    auto dst = tcg.mapping.find(m.dst);
    if (src == tcg.mapping.end()) throw Error("task " + std::to_string(m.src) + " is not mapped to a PE");
    if (dst == tcg.mapping.end()) throw Error("task " + std::to_string(m.dst) + " is not mapped to a PE");
    if (src->second == dst->second) continue;
    if (m.bits <= 0) throw Error("message lengths must be positive");
    FlowInterval iv;
    iv.src_pe = src->second;
    iv.dst_pe = dst->second;
    iv.start = spec.end.at(m.src);
    iv.length = params.message_delay(m.bits);
    // The message's flits spread over its delay bound.
    iv.rate = Rational((m.bits + flit_bits - 1) / flit_bits) / iv.length;
    by_pair[{iv.src_pe, iv.dst_pe}].push_back(iv);
    out.intervals.push_back(iv);
  }
  const Rational horizon = spec.makespan();
  for (const auto& [pair, list] : by_pair) {
    PairDemand d;
    d.max_rate = peak_rate(list);
    // Time average of the demand function over the spec makespan.
    Rational area(0);
    for (const FlowInterval& iv : list) area += iv.rate * iv.length;
    d.avg_rate = horizon > 0 ? Rational(area / horizon) : Rational(0);
    if (d.max_rate > 0) out.matrix.pairs.emplace(pair, d);
  }
  return out;
}

DemandMatrix gen_random_demands(int n_pes, std::uint64_t seed, int phi) {
  if (n_pes < 2) throw Error("random demands need at least two PEs");
  if (phi < 1) throw Error("period must be positive");
  Rng rng(seed);
  DemandMatrix dm;
  dm.phi = phi;
  for (int i = 0; i < n_pes; ++i) {
    for (int j = 0; j < n_pes; ++j) {
      if (i == j) continue;
      auto flits = static_cast<std::int64_t>(rng.below(6));
      if (flits == 0) continue;
      Rational rate(flits, phi);
      dm.pairs.emplace(std::pair(i, j), PairDemand{rate, rate});
    }
  }
  return dm;
}

Rational utilization_bound(const DemandMatrix& dm) {
  Rational sum_avg(0);
  Rational sum_max(0);
  for (const auto& [pair, d] : dm.pairs) {
    sum_avg += d.avg_rate;
    sum_max += d.max_rate;
  }
  if (sum_max == 0) throw Error("utilization bound undefined for an all-zero demand matrix");
  return sum_avg / sum_max;
}

nlohmann::json to_json(const DemandMatrix& dm) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [pair, d] : dm.pairs) {
    pairs.push_back({{"src_pe", pair.first},
                     {"dst_pe", pair.second},
                     {"max_rate", format_rational(d.max_rate)},
                     {"avg_rate", format_rational(d.avg_rate)}});
  }
  return {{"phi", dm.phi}, {"pairs", pairs}};
}

DemandMatrix demands_from_json(const nlohmann::json& j) {
  DemandMatrix dm;
  dm.phi = j.at("phi").get<int>();
  for (const auto& jp : j.at("pairs")) {
    int src = jp.at("src_pe").get<int>();
    int dst = jp.at("dst_pe").get<int>();
    if (src == dst) throw Error("demand on the diagonal");
    PairDemand d{parse_rational(jp.at("max_rate").get<std::string>()),
                 parse_rational(jp.at("avg_rate").get<std::string>())};
    if (d.max_rate < 0 || d.avg_rate < 0) throw Error("negative demand");
    if (d.max_rate > 0) dm.pairs.emplace(std::pair(src, dst), d);
  }
  return dm;
}

}  // namespace nocweave
