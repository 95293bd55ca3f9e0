// Copyright 2026 The nocweave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nocweave/rational.hpp"
#include "nocweave/tcg.hpp"

namespace nocweave {

struct PairDemand {
  Rational max_rate;  // flits per slot
  Rational avg_rate;  // flits per slot
};

/// Traffic requirements between ordered PE pairs. Only non-zero pairs are
/// stored; the diagonal is always empty.
struct DemandMatrix {
  int phi = 8;
  std::map<std::pair<int, int>, PairDemand> pairs;
};

/// Rate demanded by one TCG message while it is in flight:
/// [start, start + length) at `rate` flits per slot.
struct FlowInterval {
  int src_pe = 0;
  int dst_pe = 0;
  Rational start;
  Rational length;
  Rational rate;
};

struct TcgReduction {
  DemandMatrix matrix;
  std::vector<FlowInterval> intervals;
};

/// Peak of the summed rates of half-open intervals, by a sweep over the
/// interval endpoints.
Rational peak_rate(std::span<const FlowInterval> intervals);

/// Maps every inter-PE message to a flow interval and takes, per PE pair, the
/// peak of the overlapping rates. A message of b bits asks for ceil(b/k) flits
/// over [end(src), end(src) + L + b/alpha). Messages between tasks on the same PE need
/// no network bandwidth and are skipped.
TcgReduction reduce_tcg(const Tcg& tcg, const RtParams& params, const TimingSpec& spec, int flit_bits, int phi);

/// Steady traffic: every ordered pair asks for a uniform {0..5} flits per
/// period.
DemandMatrix gen_random_demands(int n_pes, std::uint64_t seed, int phi);

/// sum(avg) / sum(max) over all pairs.
Rational utilization_bound(const DemandMatrix& dm);

nlohmann::json to_json(const DemandMatrix& dm);
DemandMatrix demands_from_json(const nlohmann::json& j);

}  // namespace nocweave
