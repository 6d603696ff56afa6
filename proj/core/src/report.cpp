#include "defectscope/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "defectscope/errors.hpp"

namespace dscope {

namespace {

std::string fmt(double v, int decimals) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string fmt_g(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Svg {
  std::ostringstream body;
  int width;
  int height;

  Svg(int w, int h) : width(w), height(h) {
    body << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
         << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    rect(0, 0, w, h, "#ffffff");
  }

  void rect(double x, double y, double w, double h, const std::string& fill) {
    body << "<rect x=\"" << fmt(x, 2) << "\" y=\"" << fmt(y, 2) << "\" width=\"" << fmt(w, 2)
         << "\" height=\"" << fmt(h, 2) << "\" fill=\"" << fill << "\"/>\n";
  }

  void line(double x1, double y1, double x2, double y2, const std::string& stroke) {
    body << "<line x1=\"" << fmt(x1, 2) << "\" y1=\"" << fmt(y1, 2) << "\" x2=\"" << fmt(x2, 2)
         << "\" y2=\"" << fmt(y2, 2) << "\" stroke=\"" << stroke << "\" stroke-width=\"1\"/>\n";
  }

  void text(double x, double y, int size, const std::string& anchor, const std::string& content) {
    body << "<text x=\"" << fmt(x, 2) << "\" y=\"" << fmt(y, 2) << "\" font-family=\"monospace\""
         << " font-size=\"" << size << "\" text-anchor=\"" << anchor << "\" fill=\"#222222\">"
         << content << "</text>\n";
  }

  std::string finish() {
    body << "</svg>\n";
    return body.str();
  }
};

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr double kAxisLeft = 60.0;
constexpr double kAxisRight = 770.0;
constexpr const char* kFailureFill = "#c0392b";
constexpr const char* kSuccessFill = "#27ae60";

void check_ranges(const std::vector<std::pair<double, double>>& ranges) {
  for (const auto& [lo, hi] : ranges) {
    if (lo > hi) {
      raise(Errc::invalid_range,
            "range lower bound " + fmt_g(lo) + " exceeds upper bound " + fmt_g(hi));
    }
  }
}

std::string route_text(const Route& route) {
  std::string out;
  if (route.conditions.empty()) {
    out = "(no conditions)";
  } else {
    for (std::size_t i = 0; i < route.conditions.size(); ++i) {
      const RouteCondition& c = route.conditions[i];
      if (i > 0) out += " and ";
      out += c.dc_name + (c.greater ? " &gt; " : " &lt;= ") + fmt_g(c.threshold);
    }
  }
  out += " -&gt; class " + std::to_string(route.leaf_class);
  return out;
}

}  // namespace

std::string render_dc_chart(const std::string& dc_name, double importance,
                            const std::vector<std::pair<double, double>>& failure_ranges,
                            const std::vector<std::pair<double, double>>& success_ranges,
                            std::pair<double, double> range) {
  if (range.first > range.second) {
    raise(Errc::invalid_range, "observed range is inverted for " + dc_name);
  }
  check_ranges(failure_ranges);
  check_ranges(success_ranges);

  const double lo = range.first;
  const double hi = range.second;
  const double span = hi - lo;
  const auto scale = [&](double v) {
    if (span <= 0.0) return kAxisLeft;
    return kAxisLeft + (v - lo) / span * (kAxisRight - kAxisLeft);
  };

  Svg svg(800, 300);
  svg.text(20, 32, 16, "start", xml_escape(dc_name) + " (importance " + fmt(importance, 3) + ")");

  // Legend.
  svg.rect(600, 18, 14, 14, kFailureFill);
  svg.text(620, 30, 12, "start", "failure range");
  svg.rect(700, 18, 14, 14, kSuccessFill);
  svg.text(720, 30, 12, "start", "success range");

  // Baseline band with failure ranges above and success ranges below.
  svg.rect(kAxisLeft, 120, kAxisRight - kAxisLeft, 60, "#e8e8e8");
  for (const auto& [a, b] : failure_ranges) {
    svg.rect(scale(a), 120, scale(b) - scale(a), 28, kFailureFill);
  }
  for (const auto& [a, b] : success_ranges) {
    svg.rect(scale(a), 152, scale(b) - scale(a), 28, kSuccessFill);
  }

  // Axis with 5 labeled ticks.
  svg.line(kAxisLeft, 200, kAxisRight, 200, "#333333");
  for (int i = 0; i < 5; ++i) {
    const double f = i / 4.0;
    const double x = kAxisLeft + f * (kAxisRight - kAxisLeft);
    svg.line(x, 200, x, 207, "#333333");
    svg.text(x, 224, 12, "middle", fmt_g(lo + f * span));
  }
  return svg.finish();
}

std::string render_summary_chart(const DCSummary& summary) {
  std::vector<const DCReport*> order;
  for (const DCReport& r : summary.per_dc) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(),
                   [](const DCReport* a, const DCReport* b) { return a->importance > b->importance; });

  const int rows = static_cast<int>(order.size());
  Svg svg(800, 70 + 24 * std::max(1, rows));
  svg.text(20, 32, 16, "start", "characteristic importance");

  double max_imp = 0.0;
  for (const DCReport* r : order) max_imp = std::max(max_imp, r->importance);
  for (int i = 0; i < rows; ++i) {
    const DCReport& r = *order[i];
    const double y = 52.0 + 24.0 * i;
    const double bar = max_imp > 0.0 ? r.importance / max_imp * 540.0 : 0.0;
    svg.text(180, y + 13, 12, "end", xml_escape(r.name));
    svg.rect(190, y, bar, 16, "#3465a4");
    svg.text(196 + bar, y + 13, 12, "start", fmt(r.importance, 3));
  }
  return svg.finish();
}

std::string render_routes_chart(const DCSummary& summary, const std::string& target_name) {
  const int rows = static_cast<int>(summary.route_to_1.size() + summary.route_to_0.size());
  Svg svg(1100, 90 + 24 * std::max(1, rows) + 24);
  svg.text(20, 32, 16, "start", "top decision routes (" + xml_escape(target_name) + ")");

  double y = 64.0;
  svg.text(20, y, 13, "start", "routes to class 1");
  y += 24.0;
  for (std::size_t i = 0; i < summary.route_to_1.size(); ++i) {
    const Route& r = summary.route_to_1[i];
    svg.text(40, y, 12, "start",
             "#" + std::to_string(i + 1) + " support=" + fmt_g(r.support) + " purity=" +
                 fmt(r.purity, 3) + ": " + route_text(r));
    y += 24.0;
  }
  svg.text(20, y, 13, "start", "routes to class 0");
  y += 24.0;
  for (std::size_t i = 0; i < summary.route_to_0.size(); ++i) {
    const Route& r = summary.route_to_0[i];
    svg.text(40, y, 12, "start",
             "#" + std::to_string(i + 1) + " support=" + fmt_g(r.support) + " purity=" +
                 fmt(r.purity, 3) + ": " + route_text(r));
    y += 24.0;
  }
  return svg.finish();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) raise(Errc::io_failure, "cannot create " + tmp.string());
    f << content;
    if (!f.good()) raise(Errc::io_failure, "write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) raise(Errc::io_failure, "rename failed: " + path.string() + " (" + ec.message() + ")");
}

std::filesystem::path write_recommendations(const DCSummary& summary,
                                            const std::string& target_name,
                                            const std::filesystem::path& out_dir) {
  if (summary.per_dc.empty()) raise(Errc::empty_summary, "summary has no characteristics");

  std::vector<const DCReport*> order;
  for (const DCReport& r : summary.per_dc) {
    if (r.importance > 0.0) order.push_back(&r);
  }
  std::stable_sort(order.begin(), order.end(),
                   [](const DCReport* a, const DCReport* b) { return a->importance > b->importance; });
  if (order.size() > 5) order.resize(5);

  std::string text;
  for (const DCReport* r : order) {
    text += "DC " + r->name + " (importance " + fmt(r->importance, 3) + "): ";
    if (!r->failure_ranges.empty()) {
      const auto& [lo, hi] = r->failure_ranges.front();
      text += "defects with " + r->name + " in [" + fmt_g(lo) + ", " + fmt_g(hi) +
              "] are frequently " + target_name +
              "; consider adding or augmenting training samples in this range.\n";
    } else {
      text += "no concentrated value range separates " + target_name +
              " defects; review samples across its full observed range.\n";
    }
  }

  const std::filesystem::path path = out_dir / "improvement_recommendations.txt";
  write_atomic(path, text);
  return path;
}

ReportBundle explain_forest(const DCSummary& summary,
                            const std::vector<std::string>& feature_list,
                            const std::string& target_name,
                            const std::filesystem::path& out_dir, bool route_plot) {
  if (summary.per_dc.empty()) raise(Errc::empty_summary, "summary has no characteristics");
  if (summary.per_dc.size() != feature_list.size()) {
    raise(Errc::length_mismatch, "summary does not cover the feature list");
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) raise(Errc::io_failure, "cannot create " + out_dir.string());

  ReportBundle bundle;
  bundle.dir = out_dir;
  auto emit = [&](const std::string& name, const std::string& content, const std::string& kind) {
    const std::filesystem::path path = out_dir / name;
    write_atomic(path, content);
    bundle.entries.push_back(
        ManifestEntry{name, std::filesystem::file_size(path), kind});
  };

  for (const DCReport& r : summary.per_dc) {
    emit("dc_" + r.name + ".svg",
         render_dc_chart(r.name, r.importance, r.failure_ranges, r.success_ranges,
                         {r.range_lo, r.range_hi}),
         "dc_chart");
  }
  emit("summary.svg", render_summary_chart(summary), "summary_chart");
  if (route_plot) {
    emit("routes.svg", render_routes_chart(summary, target_name), "route_chart");
  }
  const std::filesystem::path rec = write_recommendations(summary, target_name, out_dir);
  bundle.entries.push_back(ManifestEntry{rec.filename().string(),
                                         std::filesystem::file_size(rec), "recommendations"});
  return bundle;
}

}  // namespace dscope
