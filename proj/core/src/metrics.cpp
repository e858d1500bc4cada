#include "tdet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "tdet/error.hpp"

namespace tdet {

using nlohmann::json;

std::vector<int> default_tolerances() {
  std::vector<int> t;
  for (int v = 5; v <= 60; v += 5) t.push_back(v);
  return t;
}

std::vector<int> parse_tolerances(const std::string& text) {
  const auto to_int = [&](const std::string& s) {
    std::size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != s.size()) throw Error(ErrorKind::parse, "bad tolerance '" + s + "'");
    return v;
  };
  std::vector<int> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw Error(ErrorKind::parse, "tolerance range must be lo:hi:step");
    const int lo = to_int(parts[0]), hi = to_int(parts[1]), step = to_int(parts[2]);
    if (step <= 0 || lo > hi) throw Error(ErrorKind::parse, "tolerance range must be ascending");
    for (int v = lo; v <= hi; v += step) out.push_back(v);
  } else {
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(to_int(p));
  }
  if (out.empty()) throw Error(ErrorKind::parse, "tolerance list is empty");
  for (int v : out) {
    if (v < 0) throw Error(ErrorKind::parse, "tolerances must be non-negative");
  }
  return out;
}

double ranked_average_precision(const std::vector<bool>& is_tp, std::size_t num_gt) {
  if (num_gt == 0 || is_tp.empty()) return 0.0;
  const std::size_t n = is_tp.size();
  std::vector<double> precision(n), recall(n);
  std::size_t tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (is_tp[i]) ++tp;
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
    recall[i] = static_cast<double>(tp) / static_cast<double>(num_gt);
  }
  for (std::size_t i = n - 1; i-- > 0;) precision[i] = std::max(precision[i], precision[i + 1]);
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ap += (recall[i] - prev_recall) * precision[i];
    prev_recall = recall[i];
  }
  return ap;
}

namespace {

struct Candidate {
  std::size_t key;   // match group
  int time_s;
  double confidence;
};

/// gts_by_key[k] holds ground-truth times of group k.
std::vector<bool> greedy_match(std::vector<Candidate> cands,
                               const std::vector<std::vector<int>>& gts_by_key, int tolerance_s) {
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(b.confidence, a.key, a.time_s) < std::tie(a.confidence, b.key, b.time_s);
  });
  std::vector<std::vector<bool>> used(gts_by_key.size());
  for (std::size_t k = 0; k < gts_by_key.size(); ++k) used[k].assign(gts_by_key[k].size(), false);
  std::vector<bool> hits;
  hits.reserve(cands.size());
  for (const auto& c : cands) {
    const auto& g = gts_by_key[c.key];
    int best = -1;
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (used[c.key][j]) continue;
      const int d = std::abs(g[j] - c.time_s);
      if (d > tolerance_s) continue;
      if (best < 0) {
        best = static_cast<int>(j);
        continue;
      }
      const int bd = std::abs(g[static_cast<std::size_t>(best)] - c.time_s);
      if (d < bd || (d == bd && g[j] < g[static_cast<std::size_t>(best)])) best = static_cast<int>(j);
    }
    if (best >= 0) used[c.key][static_cast<std::size_t>(best)] = true;
    hits.push_back(best >= 0);
  }
  return hits;
}

}  // namespace

std::optional<double> average_precision_at_tol(const std::vector<SpotPrediction>& preds,
                                               const std::vector<EventAnnotation>& gts,
                                               int class_index, int tolerance_s,
                                               MatchCounts* counts) {
  std::map<std::pair<std::string, int>, std::size_t> keys;
  const auto key_of = [&](const std::string& game, int half) {
    const auto [it, inserted] = keys.try_emplace({game, half}, keys.size());
    return it->second;
  };
  std::vector<std::vector<int>> by_key;
  std::size_t num_gt = 0;
  for (const auto& g : gts) {
    if (g.class_index != class_index) continue;
    const std::size_t k = key_of(g.game_id, g.half);
    if (by_key.size() <= k) by_key.resize(k + 1);
    by_key[k].push_back(g.time_s);
    ++num_gt;
  }
  std::vector<Candidate> cands;
  for (const auto& p : preds) {
    if (p.class_index != class_index) continue;
    const std::size_t k = key_of(p.game_id, p.half);
    if (by_key.size() <= k) by_key.resize(k + 1);
    cands.push_back({k, p.time_s, p.confidence});
  }
  // Candidate keys follow first appearance; re-key by (game, half) order so
  // confidence ties resolve the same way regardless of input order.
  std::vector<std::size_t> rank(keys.size());
  {
    std::size_t r = 0;
    for (const auto& [gh, k] : keys) rank[k] = r++;
  }
  std::vector<std::vector<int>> ranked(keys.size());
  for (std::size_t k = 0; k < by_key.size(); ++k) ranked[rank[k]] = std::move(by_key[k]);
  for (auto& c : cands) c.key = rank[c.key];

  if (num_gt == 0 && cands.empty()) return std::nullopt;
  const std::vector<bool> hits = greedy_match(std::move(cands), ranked, tolerance_s);
  const long tp = std::count(hits.begin(), hits.end(), true);
  if (counts) {
    counts->true_positives += tp;
    counts->false_positives += static_cast<long>(hits.size()) - tp;
    counts->missed += static_cast<long>(num_gt) - tp;
  }
  return num_gt == 0 ? 0.0 : ranked_average_precision(hits, num_gt);
}

EvalReport average_map(const std::vector<SpotPrediction>& preds,
                       const std::vector<EventAnnotation>& gts, const std::vector<int>& tolerances) {
  if (tolerances.empty()) throw Error(ErrorKind::domain, "tolerance list is empty");
  EvalReport r;
  r.tolerances = tolerances;
  r.counts.resize(tolerances.size());
  r.map_per_tolerance.assign(tolerances.size(), 0.0);
  for (std::size_t t = 0; t < tolerances.size(); ++t) {
    double sum = 0.0;
    int n = 0;
    for (int k = 0; k < kNumEventClasses; ++k) {
      const auto ap = average_precision_at_tol(preds, gts, k, tolerances[t], &r.counts[t]);
      if (!ap) continue;
      r.per_class_ap[k].push_back(*ap);
      sum += *ap;
      ++n;
    }
    r.map_per_tolerance[t] = n ? sum / n : 0.0;
  }
  r.average_map = std::accumulate(r.map_per_tolerance.begin(), r.map_per_tolerance.end(), 0.0) /
                  static_cast<double>(tolerances.size());
  return r;
}

namespace {

json counts_json(const std::vector<int>& tol, const std::vector<MatchCounts>& counts) {
  json arr = json::array();
  for (std::size_t t = 0; t < tol.size(); ++t) {
    arr.push_back({{"tolerance_s", tol[t]},
                   {"true_positives", counts[t].true_positives},
                   {"false_positives", counts[t].false_positives},
                   {"missed", counts[t].missed}});
  }
  return arr;
}

}  // namespace

std::string EvalReport::to_json(const ClassVocabulary& vocabulary) const {
  json per_class = json::object();
  for (const auto& [k, aps] : per_class_ap) {
    json entries = json::array();
    for (std::size_t t = 0; t < tolerances.size(); ++t) {
      entries.push_back({{"tolerance_s", tolerances[t]}, {"ap", aps[t]}});
    }
    per_class[vocabulary.name(k)] = entries;
  }
  json mt = json::array();
  for (std::size_t t = 0; t < tolerances.size(); ++t) {
    mt.push_back({{"tolerance_s", tolerances[t]}, {"map", map_per_tolerance[t]}});
  }
  const json j = {{"version", 1},
                  {"metric", "average_map"},
                  {"average_map", average_map},
                  {"tolerances", tolerances},
                  {"map_per_tolerance", mt},
                  {"per_class_ap", per_class},
                  {"counts", counts_json(tolerances, counts)}};
  return j.dump(2) + "\n";
}

std::string EvalReport::to_csv(const ClassVocabulary& vocabulary) const {
  std::ostringstream os;
  os.precision(10);
  os << "class";
  for (int t : tolerances) os << ",tol_" << t;
  os << "\n";
  for (const auto& [k, aps] : per_class_ap) {
    os << '"' << vocabulary.name(k) << '"';
    for (double ap : aps) os << ',' << ap;
    os << "\n";
  }
  os << "mAP";
  for (double m : map_per_tolerance) os << ',' << m;
  os << "\n";
  os << "average_map," << average_map << "\n";
  return os.str();
}

std::string GroundingEvalReport::to_json() const {
  json at = json::array();
  for (std::size_t t = 0; t < tolerances.size(); ++t) {
    at.push_back({{"tolerance_s", tolerances[t]}, {"ap", ap_per_tolerance[t]}});
  }
  const json j = {{"version", 1},
                  {"metric", "average_ap"},
                  {"average_ap", average_ap},
                  {"tolerances", tolerances},
                  {"ap_per_tolerance", at},
                  {"counts", counts_json(tolerances, counts)}};
  return j.dump(2) + "\n";
}

GroundingEvalReport replay_average_ap(const std::vector<std::vector<GroundingPrediction>>& preds,
                                      const std::vector<int>& gt_times,
                                      const std::vector<int>& tolerances) {
  if (tolerances.empty()) throw Error(ErrorKind::domain, "tolerance list is empty");
  if (preds.size() != gt_times.size()) {
    throw Error(ErrorKind::consistency, "need one prediction list per replay query");
  }
  std::vector<std::vector<int>> by_key(gt_times.size());
  for (std::size_t q = 0; q < gt_times.size(); ++q) by_key[q] = {gt_times[q]};
  std::vector<Candidate> cands;
  for (std::size_t q = 0; q < preds.size(); ++q) {
    for (const auto& p : preds[q]) cands.push_back({q, p.time_s, p.confidence});
  }
  GroundingEvalReport r;
  r.tolerances = tolerances;
  r.counts.resize(tolerances.size());
  for (std::size_t t = 0; t < tolerances.size(); ++t) {
    const std::vector<bool> hits = greedy_match(cands, by_key, tolerances[t]);
    const long tp = std::count(hits.begin(), hits.end(), true);
    r.counts[t] = {tp, static_cast<long>(hits.size()) - tp,
                   static_cast<long>(gt_times.size()) - tp};
    r.ap_per_tolerance.push_back(ranked_average_precision(hits, gt_times.size()));
  }
  r.average_ap = std::accumulate(r.ap_per_tolerance.begin(), r.ap_per_tolerance.end(), 0.0) /
                 static_cast<double>(tolerances.size());
  return r;
}

}  // namespace tdet
