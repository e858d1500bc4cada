#include "tdet/replay_stats.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tdet/error.hpp"

namespace tdet {

ReplayStats replay_stats(const std::vector<ReplayAnnotation>& replays,
                         const ReplayStatsOptions& options) {
  if (options.bucket_s < 1) throw Error(ErrorKind::domain, "bucket width must be >= 1");
  ReplayStats s;
  s.total = static_cast<long>(replays.size());
  std::map<int, long> buckets;
  std::map<std::string, long> labels;
  long in_range = 0;
  for (const auto& r : replays) {
    const int interval = r.interval_s();
    ++labels[r.event_label];
    if (interval < 0) {
      ++s.anomalous;
      continue;
    }
    ++buckets[interval / options.bucket_s];
    if (interval <= 120) ++in_range;
  }
  if (!buckets.empty()) {
    const int last = buckets.rbegin()->first;
    for (int b = 0; b <= last; ++b) {
      const auto it = buckets.find(b);
      s.interval_histogram.push_back(
          {b * options.bucket_s, (b + 1) * options.bucket_s, it == buckets.end() ? 0 : it->second});
    }
  }
  const long denom = options.exclude_anomalous ? s.total - s.anomalous : s.total;
  s.fraction_in_0_120 = denom > 0 ? static_cast<double>(in_range) / static_cast<double>(denom) : 0.0;
  s.class_counts.assign(labels.begin(), labels.end());
  std::stable_sort(s.class_counts.begin(), s.class_counts.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return s;
}

std::string ReplayStats::to_json() const {
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& b : interval_histogram) {
    hist.push_back({{"lo_s", b.lo_s}, {"hi_s", b.hi_s}, {"count", b.count}});
  }
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& [label, n] : class_counts) classes.push_back({{"label", label}, {"count", n}});
  const nlohmann::json j = {{"version", 1},
                            {"total", total},
                            {"anomalous", anomalous},
                            {"fraction_in_0_120", fraction_in_0_120},
                            {"interval_histogram", hist},
                            {"class_counts", classes}};
  return j.dump(2) + "\n";
}

std::string ReplayStats::to_svg() const {
  const int width = 640, height = 360, margin = 40;
  long peak = 1;
  for (const auto& b : interval_histogram) peak = std::max(peak, b.count);
  const std::size_t n = std::max<std::size_t>(1, interval_histogram.size());
  const double bar_w = static_cast<double>(width - 2 * margin) / static_cast<double>(n);
  const double plot_h = height - 2 * margin;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  char buf[256];
  for (std::size_t i = 0; i < interval_histogram.size(); ++i) {
    const auto& b = interval_histogram[i];
    const double h = plot_h * static_cast<double>(b.count) / static_cast<double>(peak);
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"steelblue\">"
                  "<title>%d-%d s: %ld</title></rect>\n",
                  margin + bar_w * static_cast<double>(i), height - margin - h, bar_w * 0.9, h,
                  b.lo_s, b.hi_s, b.count);
    os << buf;
  }
  os << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin
     << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
  if (!interval_histogram.empty()) {
    os << "<text x=\"" << margin << "\" y=\"" << height - margin / 3 << "\" font-size=\"12\">"
       << interval_histogram.front().lo_s << " s</text>\n";
    os << "<text x=\"" << width - margin << "\" y=\"" << height - margin / 3
       << "\" font-size=\"12\" text-anchor=\"end\">" << interval_histogram.back().hi_s
       << " s</text>\n";
  }
  os << "<text x=\"" << width / 2 << "\" y=\"" << margin / 2
     << "\" font-size=\"14\" text-anchor=\"middle\">replay end minus event time (n=" << total
     << ")</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace tdet
