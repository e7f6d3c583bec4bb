#pragma once

#include <cstdint>
#include <vector>

#include "gossiplab/errors.hpp"
#include "gossiplab/matrix_lab.hpp"
#include "gossiplab/random.hpp"
#include "gossiplab/schedule.hpp"
#include "gossiplab/selection.hpp"

namespace gossiplab {

/// Ordered pair (first picks second). `nobody` is the relaxed-mode slot in
/// which the drawn node selects no partner.
struct NodePair {
  int first;
  int second;

  static constexpr NodePair nobody() { return {-1, -1}; }
  bool is_noop() const { return first < 0 || first == second; }
  friend bool operator==(const NodePair&, const NodePair&) = default;
};

inline NodePair sample_pair(const SelectionMatrix& a, RandomStream& rng) {
  const int n = a.size();
  const int i = rng.index(n);
  const double u = rng.uniform();
  double acc = 0.0;
  int last_positive = -1;
  for (int j = 0; j < n; ++j) {
    const double w = a(i, j);
    if (w <= 0.0) continue;
    acc += w;
    last_positive = j;
    if (u < acc) return {i, j};
  }
  // Rounding slack in a strict row belongs to its last positive entry.
  if (a.mode() == RowSumMode::strict && last_positive >= 0) return {i, last_positive};
  return NodePair::nobody();
}

/// forward: the picker receives its partner's value; backward: the partner
/// receives the picker's value.
struct CommunicationFlags {
  bool forward;
  bool backward;
};

inline CommunicationFlags sample_communication(CommunicationModel model, double p_plus, double p_minus,
                                               RandomStream& rng) {
  if (model == CommunicationModel::dependent) {
    if (p_plus != p_minus)
      throw ModelMismatchError("dependent communication requires P+ == P-; got " + std::to_string(p_plus) +
                               " and " + std::to_string(p_minus));
    const bool ok = rng.uniform() < p_plus;
    return {ok, ok};
  }
  const bool forward = rng.uniform() < p_plus;
  const bool backward = rng.uniform() < p_minus;
  return {forward, backward};
}

/// Slots k in [0, horizon] in which at least one direction succeeds.
inline std::vector<std::int64_t> success_times(const Schedule& plus, const Schedule& minus, CommunicationModel model,
                                               std::int64_t horizon, RandomStream& rng) {
  if (horizon < 0) throw std::invalid_argument("horizon must be nonnegative");
  std::vector<std::int64_t> times;
  for (std::int64_t k = 0; k <= horizon; ++k) {
    const auto flags = sample_communication(model, plus.value(k), minus.value(k), rng);
    if (flags.forward || flags.backward) times.push_back(k);
  }
  return times;
}

/// Per-trial streams: pair selection and link outcomes never share draws.
struct TrialStreams {
  RandomStream selection;
  RandomStream communication;

  TrialStreams(std::uint64_t master_seed, std::uint64_t trial)
      : selection(master_seed, trial, StreamPurpose::selection),
        communication(master_seed, trial, StreamPurpose::communication) {}
};

/// Draws one slot's realized update: a pair, then link outcomes.
inline UpdateMatrix sample_update(const SelectionMatrix& a, CommunicationModel model, double p_plus, double p_minus,
                                  TrialStreams& streams) {
  const NodePair pair = sample_pair(a, streams.selection);
  const auto flags = sample_communication(model, p_plus, p_minus, streams.communication);
  const int n = a.size();
  if (pair.is_noop()) return UpdateMatrix::identity(n);
  if (flags.forward && flags.backward) return UpdateMatrix::symmetric(pair.first, pair.second, n);
  if (flags.forward) return UpdateMatrix::asymmetric(pair.first, pair.second, n);
  if (flags.backward) return UpdateMatrix::asymmetric(pair.second, pair.first, n);
  return UpdateMatrix::identity(n);
}

}  // namespace gossiplab
