#pragma once

// Proximity metrics between enhanced target sequences and execution
// traces. The similarity kernel is a weighted longest-common-subsequence:
// each common element contributes the mean of its weights in the two
// sequences, and a trace mirrors the weights of the sequence it is
// compared against. The witness subsequence feeds the normalization
// denominator, which charges every uncovered sequence element its inverse
// weight.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dirfuzz/errors.hpp"
#include "dirfuzz/ets.hpp"

namespace dirfuzz {

struct WeightedSeq {
  std::vector<int> ids;
  std::vector<double> weights;

  size_t size() const { return ids.size(); }
};

inline WeightedSeq to_weighted_seq(const EnhancedTargetSequence& ets,
                                   const InstrumentationPlan& plan) {
  WeightedSeq s;
  for (const auto& e : ets.elements) {
    s.ids.push_back(plan.require_id(e.graph, e.node));
    s.weights.push_back(e.weight);
  }
  return s;
}

struct SimwResult {
  double value = 0.0;
  std::vector<size_t> witness;  // indices into s1, strictly increasing
};

// Maximum-weight common subsequence of s1 and s2 by dynamic programming.
// When s2 carries no weights its elements mirror the matched s1 weight.
// Among equal-value subsequences the witness is canonical: the backtrack
// prefers matching over skipping an s1 element over skipping an s2
// element.
inline SimwResult simw(const WeightedSeq& s1, const std::vector<int>& s2,
                       const std::vector<double>* s2_weights = nullptr) {
  const size_t n = s1.size(), m = s2.size();
  std::vector<std::vector<double>> dp(n + 1, std::vector<double>(m + 1, 0.0));
  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = 1; j <= m; ++j) {
      double best = std::max(dp[i - 1][j], dp[i][j - 1]);
      if (s1.ids[i - 1] == s2[j - 1]) {
        double w2 = s2_weights ? (*s2_weights)[j - 1] : s1.weights[i - 1];
        best = std::max(best, dp[i - 1][j - 1] + (s1.weights[i - 1] + w2) / 2.0);
      }
      dp[i][j] = best;
    }
  }

  SimwResult result;
  result.value = dp[n][m];
  size_t i = n, j = m;
  while (i > 0 && j > 0) {
    if (s1.ids[i - 1] == s2[j - 1]) {
      double w2 = s2_weights ? (*s2_weights)[j - 1] : s1.weights[i - 1];
      if (dp[i][j] == dp[i - 1][j - 1] + (s1.weights[i - 1] + w2) / 2.0) {
        result.witness.push_back(i - 1);
        --i;
        --j;
        continue;
      }
    }
    if (dp[i][j] == dp[i - 1][j])
      --i;
    else
      --j;
  }
  std::reverse(result.witness.begin(), result.witness.end());
  return result;
}

// W: the witness value plus the inverse weight of every s1 element left
// uncovered. Always >= SIMW, equal exactly when s1 is fully covered.
inline double w_denominator(const WeightedSeq& s1, const SimwResult& sim) {
  double w = sim.value;
  size_t wi = 0;
  for (size_t i = 0; i < s1.size(); ++i) {
    if (wi < sim.witness.size() && sim.witness[wi] == i) {
      ++wi;
      continue;
    }
    if (!(s1.weights[i] > 0.0))
      throw ValidationError("sequence weights must be positive");
    w += 1.0 / s1.weights[i];
  }
  return w;
}

inline double seqcovw(const WeightedSeq& ets, const std::vector<int>& trace) {
  if (ets.size() == 0) return 0.0;
  SimwResult sim = simw(ets, trace);
  return sim.value / w_denominator(ets, sim);
}

// Pairwise similarity count. The threshold is the geometric mean of the
// positive pairwise ratios; a sequence's priority is the number of other
// sequences at least that similar to it.
inline std::vector<int> priorityw_all(const std::vector<WeightedSeq>& seqs) {
  const size_t n = seqs.size();
  std::vector<std::vector<double>> ratio(n, std::vector<double>(n, 0.0));
  std::vector<std::vector<double>> wmat(n, std::vector<double>(n, 0.0));
  std::vector<std::vector<double>> simmat(n, std::vector<double>(n, 0.0));

  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      SimwResult sim = simw(seqs[i], seqs[j].ids, &seqs[j].weights);
      simmat[i][j] = sim.value;
      wmat[i][j] = w_denominator(seqs[i], sim);
    }
  }

  double log_sum = 0.0;
  size_t positive = 0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      double denom = std::max(wmat[i][j], wmat[j][i]);
      ratio[i][j] = denom > 0.0 ? simmat[i][j] / denom : 0.0;
      if (ratio[i][j] > 0.0) {
        log_sum += std::log(ratio[i][j]);
        ++positive;
      }
    }
  }
  double epsilon = positive ? std::exp(log_sum / static_cast<double>(positive)) : 1.0;

  std::vector<int> out(n, 0);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      if (i != j && ratio[i][j] >= epsilon) ++out[i];
  return out;
}

inline double update_gmaxcovw(double old_value, double seqcov) {
  return std::max(old_value, seqcov);
}

struct EtsTraceMetrics {
  int ets_id = 0;
  double simw = 0.0;
  double w = 0.0;
  double seqcovw = 0.0;
  int priorityw = 0;
  double gmaxcovw = 0.0;
};

struct MetricsReport {
  std::vector<EtsTraceMetrics> per_ets;
  int ots_id = -1;  // -1 when there are no sequences
  double cfw = 0.0;
};

inline constexpr double kGmaxThreshold = 0.5;  // beta

// OTS selection (highest SeqCovW, ties to the lowest id) and the
// compound factor. gMaxCovW joins the blend only once at least half the
// sequences have crossed the beta threshold.
inline void select_ots_and_cfw(MetricsReport& report) {
  const size_t n = report.per_ets.size();
  if (n == 0) {
    report.ots_id = -1;
    report.cfw = 0.0;
    return;
  }
  size_t best = 0;
  for (size_t i = 1; i < n; ++i)
    if (report.per_ets[i].seqcovw > report.per_ets[best].seqcovw) best = i;
  report.ots_id = report.per_ets[best].ets_id;

  size_t covered = 0;
  for (const auto& m : report.per_ets)
    if (m.gmaxcovw >= kGmaxThreshold) ++covered;

  const EtsTraceMetrics& ots = report.per_ets[best];
  double priority_share = static_cast<double>(ots.priorityw) / static_cast<double>(n);
  if (static_cast<double>(covered) < static_cast<double>(n) / 2.0)
    report.cfw = (ots.seqcovw + priority_share) / 2.0;
  else
    report.cfw = (ots.seqcovw + priority_share + (1.0 - ots.gmaxcovw)) / 3.0;
}

// Full per-trace evaluation against every sequence. `gmax` is the
// running per-sequence maximum and is updated in place.
inline MetricsReport evaluate_trace(const std::vector<WeightedSeq>& seqs,
                                    const std::vector<int>& ets_ids,
                                    const std::vector<int>& priorityw,
                                    const std::vector<int>& trace, std::vector<double>& gmax) {
  MetricsReport report;
  for (size_t i = 0; i < seqs.size(); ++i) {
    EtsTraceMetrics m;
    m.ets_id = ets_ids[i];
    SimwResult sim = simw(seqs[i], trace);
    m.simw = sim.value;
    m.w = w_denominator(seqs[i], sim);
    m.seqcovw = m.w > 0.0 ? m.simw / m.w : 0.0;
    m.priorityw = priorityw[i];
    gmax[i] = update_gmaxcovw(gmax[i], m.seqcovw);
    m.gmaxcovw = gmax[i];
    report.per_ets.push_back(m);
  }
  select_ots_and_cfw(report);
  return report;
}

}  // namespace dirfuzz
