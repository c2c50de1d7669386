// Copyright 2026 The mmvir Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mmvir/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mmvir/error.hpp"

namespace mmvir::seg {

std::string to_string(Method m) { return m == Method::kKts ? "kts" : "percentile"; }

Method method_from_string(const std::string& s) {
  if (s == "percentile") return Method::kPercentile;
  if (s == "kts") return Method::kKts;
  throw InputError("unknown segmentation method '" + s + "' (expected percentile or kts)");
}

void SegmentationConfig::validate() const {
  if (!(percentile_q > 0.0 && percentile_q < 100.0)) {
    throw InputError("percentile_q must lie in (0, 100)");
  }
  if (!(sub_max_s > 0.0)) throw InputError("sub_max_s must be > 0");
  if (!(min_clip_s > sub_max_s)) throw InputError("min_clip_s must be > sub_max_s");
  if (!(kts_penalty >= 0.0)) throw InputError("kts_penalty must be >= 0");
}

Json SegmentationConfig::to_json() const {
  Json j = {{"method", to_string(method)},
            {"percentile_q", percentile_q},
            {"min_clip_s", min_clip_s},
            {"sub_max_s", sub_max_s},
            {"kts_penalty", kts_penalty}};
  j["kts_max_changepoints"] =
      kts_max_changepoints ? Json(static_cast<std::int64_t>(*kts_max_changepoints)) : Json(nullptr);
  return j;
}

SegmentationConfig SegmentationConfig::from_json(const Json& j) {
  SegmentationConfig c;
  c.method = method_from_string(j.value("method", std::string("percentile")));
  c.percentile_q = j.value("percentile_q", c.percentile_q);
  c.min_clip_s = j.value("min_clip_s", c.min_clip_s);
  c.sub_max_s = j.value("sub_max_s", c.sub_max_s);
  c.kts_penalty = j.value("kts_penalty", c.kts_penalty);
  if (auto it = j.find("kts_max_changepoints"); it != j.end() && !it->is_null()) {
    c.kts_max_changepoints = it->get<std::size_t>();
  }
  return c;
}

SimilaritySignal consecutive_similarity(const FrameEmbeddingSeries& series) {
  const auto n = series.size();
  if (n < 2) throw InputError("consecutive_similarity needs at least 2 frames");
  SimilaritySignal sig;
  sig.values.reserve(n - 1);
  sig.timestamps.reserve(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto a = series.row(i);
    const auto b = series.row(i + 1);
    sig.values.push_back(std::inner_product(a.begin(), a.end(), b.begin(), 0.0));
    sig.timestamps.push_back(0.5 * (series.timestamps[i] + series.timestamps[i + 1]));
  }
  return sig;
}

double percentile_threshold(std::span<const double> values, double q) {
  if (values.empty()) throw InputError("percentile of an empty signal");
  if (!(q > 0.0 && q <= 100.0)) throw InputError("percentile q must lie in (0, 100]");
  const auto m = static_cast<double>(values.size());
  // Smallest rank r with r >= q*m/100; nudged so division rounding never
  // moves it across an integer.
  auto rank = static_cast<long long>(std::ceil(q * m / 100.0));
  while (rank > 1 && static_cast<double>(rank - 1) * 100.0 >= q * m) --rank;
  while (static_cast<double>(rank) * 100.0 < q * m) ++rank;
  rank = std::clamp<long long>(rank, 1, static_cast<long long>(values.size()));
  std::vector<double> v(values.begin(), values.end());
  auto nth = v.begin() + (rank - 1);
  std::nth_element(v.begin(), nth, v.end());
  return *nth;
}

std::vector<double> detect_turning_points(const SimilaritySignal& signal, double threshold,
                                          double min_clip_s, double duration_s) {
  std::vector<double> out = {0.0, duration_s};
  if (duration_s < 2.0 * min_clip_s) return out;
  const auto& v = signal.values;
  const auto m = v.size();
  std::vector<std::size_t> cand;
  for (std::size_t i = 0; i < m; ++i) {
    if (!(v[i] < threshold)) continue;
    const bool left_ok = i == 0 || v[i] <= v[i - 1];
    const bool right_ok = i + 1 == m || v[i] <= v[i + 1];
    if (left_ok && right_ok) cand.push_back(i);
  }
  std::stable_sort(cand.begin(), cand.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> accepted;
  for (auto i : cand) {
    const double t = signal.timestamps[i];
    if (!(t > 0.0 && t < duration_s)) continue;
    if (t < min_clip_s || duration_s - t < min_clip_s) continue;
    const bool clash = std::any_of(accepted.begin(), accepted.end(),
                                   [&](double a) { return std::abs(t - a) < min_clip_s; });
    if (!clash) accepted.push_back(t);
  }
  std::sort(accepted.begin(), accepted.end());
  out.clear();
  out.push_back(0.0);
  for (double t : accepted) out.push_back(t);
  out.push_back(duration_s);
  return out;
}

// --- KTS ------------------------------------------------------------------

namespace {

/// O(1) segment costs from prefix sums of the gram matrix.
class KernelCosts {
 public:
  KernelCosts(std::span<const double> rows, std::size_t n, std::size_t d) : n_(n), prefix_((n + 1) * (n + 1), 0.0), diag_(n + 1, 0.0) {
    if (rows.size() != n * d) throw InputError("kts: matrix size does not match n x d");
    std::vector<double> gram(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) s += rows[i * d + k] * rows[j * d + k];
        if (!std::isfinite(s)) throw InputError("kts: non-finite entry in the gram matrix");
        gram[i * n + j] = s;
        gram[j * n + i] = s;
      }
    }
    const auto w = n + 1;
    for (std::size_t i = 0; i < n; ++i) {
      double row_acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        row_acc += gram[i * n + j];
        prefix_[(i + 1) * w + (j + 1)] = prefix_[i * w + (j + 1)] + row_acc;
      }
      diag_[i + 1] = diag_[i] + gram[i * n + i];
    }
  }

  /// Cost of frames [a, b) (half-open).
  double operator()(std::size_t a, std::size_t b) const {
    const auto len = b - a;
    if (len <= 1) return 0.0;
    const auto w = n_ + 1;
    const double block = prefix_[b * w + b] - prefix_[a * w + b] - prefix_[b * w + a] + prefix_[a * w + a];
    const double c = (diag_[b] - diag_[a]) - block / static_cast<double>(len);
    return c > 0.0 ? c : 0.0;
  }

 private:
  std::size_t n_;
  std::vector<double> prefix_;
  std::vector<double> diag_;
};

struct DpTable {
  // best[m][j]: min cost of frames [0, j) split into m+1 segments.
  std::vector<std::vector<double>> best;
  std::vector<std::vector<std::uint32_t>> arg;
};

DpTable run_dp(const KernelCosts& cost, std::size_t n, std::size_t max_m) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  DpTable t;
  t.best.assign(max_m + 1, std::vector<double>(n + 1, kInf));
  t.arg.assign(max_m + 1, std::vector<std::uint32_t>(n + 1, 0));
  for (std::size_t j = 1; j <= n; ++j) t.best[0][j] = cost(0, j);
  for (std::size_t m = 1; m <= max_m; ++m) {
    const auto& prev = t.best[m - 1];
    auto& cur = t.best[m];
    auto& arg = t.arg[m];
    for (std::size_t j = m + 1; j <= n; ++j) {
      double bestv = kInf;
      std::uint32_t besti = 0;
      for (std::size_t i = m; i < j; ++i) {
        const double c = prev[i] + cost(i, j);
        if (c < bestv) {
          bestv = c;
          besti = static_cast<std::uint32_t>(i);
        }
      }
      cur[j] = bestv;
      arg[j] = besti;
    }
  }
  return t;
}

std::vector<std::size_t> backtrack(const DpTable& t, std::size_t n, std::size_t m) {
  std::vector<std::size_t> cps(m);
  std::size_t j = n;
  for (std::size_t k = m; k > 0; --k) {
    j = t.arg[k][j];
    cps[k - 1] = j;
  }
  return cps;
}

}  // namespace

KtsResult kts_changepoints(std::span<const double> rows, std::size_t n, std::size_t d,
                           double penalty, std::optional<std::size_t> max_changepoints,
                           std::optional<std::size_t> forced_m) {
  if (n < 2) throw InputError("kts needs at least 2 frames");
  const KernelCosts cost(rows, n, d);
  std::size_t max_m = std::min(max_changepoints.value_or(n - 1), n - 1);
  if (forced_m) {
    if (*forced_m > n - 1) throw InputError("kts: forced change-point count exceeds n - 1");
    max_m = *forced_m;
  }
  const auto table = run_dp(cost, n, max_m);
  std::size_t best_m = max_m;
  if (!forced_m) {
    double best_total = std::numeric_limits<double>::infinity();
    const auto nd = static_cast<double>(n);
    for (std::size_t m = 0; m <= max_m; ++m) {
      const auto md = static_cast<double>(m);
      const double pen = m == 0 ? 0.0 : penalty * md * (std::log(nd / md) + 1.0);
      const double total = table.best[m][n] + pen;
      if (total < best_total) {
        best_total = total;
        best_m = m;
      }
    }
  }
  return {backtrack(table, n, best_m), table.best[best_m][n]};
}

std::vector<double> kts_cost_by_m(std::span<const double> rows, std::size_t n, std::size_t d,
                                  std::size_t max_m) {
  const KernelCosts cost(rows, n, d);
  max_m = std::min(max_m, n - 1);
  const auto table = run_dp(cost, n, max_m);
  std::vector<double> out;
  for (std::size_t m = 0; m <= max_m; ++m) out.push_back(table.best[m][n]);
  return out;
}

std::vector<double> enforce_min_clip(std::vector<double> b, double min_clip_s) {
  while (b.size() > 2) {
    std::size_t worst = b.size();
    double worst_len = min_clip_s;
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
      const double len = b[i + 1] - b[i];
      if (len < worst_len) {
        worst_len = len;
        worst = i;
      }
    }
    if (worst == b.size()) break;
    const std::size_t segs = b.size() - 1;
    std::size_t drop;  // boundary index removed by the merge
    if (worst == 0) {
      drop = 1;
    } else if (worst == segs - 1) {
      drop = worst;
    } else {
      const double left = b[worst] - b[worst - 1];
      const double right = b[worst + 2] - b[worst + 1];
      drop = left <= right ? worst : worst + 1;
    }
    b.erase(b.begin() + static_cast<std::ptrdiff_t>(drop));
  }
  return b;
}

std::vector<double> kts_segment(const FrameEmbeddingSeries& series, const SegmentationConfig& cfg) {
  const auto n = series.size();
  if (n < 2) throw InputError("kts_segment needs at least 2 frames");
  const auto res = kts_changepoints(series.vectors, n, series.dim, cfg.kts_penalty,
                                    cfg.kts_max_changepoints);
  const double T = series.duration();
  std::vector<double> b = {0.0};
  for (auto cp : res.change_points) {
    b.push_back(0.5 * (series.timestamps[cp - 1] + series.timestamps[cp]));
  }
  b.push_back(T);
  if (T < 2.0 * cfg.min_clip_s) return {0.0, T};
  return enforce_min_clip(std::move(b), cfg.min_clip_s);
}

std::vector<double> segment(const FrameEmbeddingSeries& series, const SegmentationConfig& cfg) {
  if (cfg.method == Method::kKts) return kts_segment(series, cfg);
  const auto sig = consecutive_similarity(series);
  const double thr = percentile_threshold(sig, cfg.percentile_q);
  return detect_turning_points(sig, thr, cfg.min_clip_s, series.duration());
}

std::vector<TimeInterval> split_subsegments(const TimeInterval& clip, double sub_max_s) {
  const double D = clip.duration();
  if (!(D > 0.0)) throw InputError("split_subsegments: clip duration must be > 0");
  if (!(sub_max_s > 0.0)) throw InputError("split_subsegments: sub_max_s must be > 0");
  const auto k = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(D / sub_max_s)));
  std::vector<TimeInterval> out;
  out.reserve(k);
  double start = clip.start_s;
  for (std::size_t i = 1; i <= k; ++i) {
    const double end = i == k ? clip.end_s
                              : clip.start_s + D * static_cast<double>(i) / static_cast<double>(k);
    out.push_back({start, end});
    start = end;
  }
  return out;
}

// --- diagnostics ------------------------------------------------------------

Json SignalReport::to_json() const {
  Json pct = Json::object();
  for (const auto& [q, val] : percentiles) pct["p" + std::to_string(static_cast<int>(q))] = val;
  return {{"count", count},         {"min", min},           {"max", max},
          {"histogram", histogram}, {"percentiles", pct},   {"below_p2", below_p2}};
}

SignalReport signal_report(const SimilaritySignal& signal) {
  const auto& v = signal.values;
  if (v.empty()) throw InputError("signal_report of an empty signal");
  SignalReport r;
  r.count = v.size();
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  r.min = *lo;
  r.max = *hi;
  r.histogram.assign(kHistogramBins, 0);
  const double width = r.max - r.min;
  for (double x : v) {
    std::size_t bin = 0;
    if (width > 0.0) {
      bin = static_cast<std::size_t>((x - r.min) / width * static_cast<double>(kHistogramBins));
      bin = std::min(bin, kHistogramBins - 1);
    }
    ++r.histogram[bin];
  }
  for (double q : kReportPercentiles) r.percentiles.emplace_back(q, percentile_threshold(v, q));
  const double p2 = percentile_threshold(v, 2.0);
  r.below_p2 = static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [&](double x) { return x < p2; }));
  return r;
}

}  // namespace mmvir::seg
