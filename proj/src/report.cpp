#include "cubepose/report.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "cubepose/errors.hpp"
#include "cubepose/metrics.hpp"
#include "cubepose/text.hpp"

namespace cubepose {

namespace {

double record_error(const AnnotationRecord& pred, const AnnotationRecord& gt,
                    bool symmetric, ChamferDirection dir) {
  const PointSet pred_pts = apply_pose(pred.pose, cube_points(pred.cube));
  const PointSet gt_pts = apply_pose(gt.pose, cube_points(gt.cube));
  if (!symmetric) return mean_pointwise_distance(pred_pts, gt_pts);
  return dir == ChamferDirection::PredToGt ? directed_chamfer(pred_pts, gt_pts)
                                           : directed_chamfer(gt_pts, pred_pts);
}

void finish_stats(ClassStats& s, double error_sum) {
  s.mean_error_mm = s.n_matched > 0 ? error_sum / s.n_matched
                                    : std::numeric_limits<double>::quiet_NaN();
  const int attempts = s.n_gt + s.n_extra;
  s.accuracy = attempts > 0 ? static_cast<double>(s.n_correct) / attempts : 0.0;
}

}  // namespace

EvalReport evaluate_records(const std::vector<AnnotationRecord>& gt,
                            const std::vector<AnnotationRecord>& pred,
                            const ExperimentConfig& cfg) {
  using Key = std::pair<std::string, std::string>;  // (image_id, class_id)
  std::map<Key, const AnnotationRecord*> gt_by_key;
  for (const AnnotationRecord& g : gt) {
    const Key key{g.image_id, g.class_id};
    if (!gt_by_key.emplace(key, &g).second)
      throw SchemaViolation("duplicate ground-truth join key (" + g.image_id +
                            ", " + g.class_id + ")");
  }

  std::map<Key, std::vector<const AnnotationRecord*>> preds_by_key;
  for (const AnnotationRecord& p : pred)
    preds_by_key[{p.image_id, p.class_id}].push_back(&p);

  EvalReport report;
  report.config = cfg;
  std::map<std::string, double> error_sum;
  double overall_error_sum = 0.0;

  for (const auto& [key, g] : gt_by_key) {
    ClassStats& s = report.per_class[key.second];
    s.n_gt += 1;
    const auto it = preds_by_key.find(key);
    if (it == preds_by_key.end() || it->second.empty()) {
      s.n_missed += 1;
      continue;
    }
    const bool symmetric =
        g->symmetric || cfg.symmetric_classes.count(key.second) > 0;
    double best = std::numeric_limits<double>::infinity();
    for (const AnnotationRecord* p : it->second)
      best = std::min(best, record_error(*p, *g, symmetric, cfg.direction_eval));
    s.n_matched += 1;
    s.n_extra += static_cast<int>(it->second.size()) - 1;
    error_sum[key.second] += best;
    overall_error_sum += best;
    const double d = diameter(cube_points(g->cube));
    if (best < cfg.k * d) s.n_correct += 1;
  }

  for (const auto& [key, plist] : preds_by_key) {
    ClassStats& s = report.per_class[key.second];
    s.n_pred += static_cast<int>(plist.size());
    if (gt_by_key.find(key) == gt_by_key.end())
      s.n_extra += static_cast<int>(plist.size());
  }

  for (auto& [class_id, s] : report.per_class) {
    finish_stats(s, error_sum.count(class_id) ? error_sum[class_id] : 0.0);
    report.overall.n_gt += s.n_gt;
    report.overall.n_pred += s.n_pred;
    report.overall.n_matched += s.n_matched;
    report.overall.n_missed += s.n_missed;
    report.overall.n_extra += s.n_extra;
    report.overall.n_correct += s.n_correct;
  }
  finish_stats(report.overall, overall_error_sum);
  return report;
}

std::string config_comment_block(const ExperimentConfig& cfg) {
  std::istringstream in(format_config(cfg));
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) out << "# " << line << '\n';
  return out.str();
}

namespace {

void append_stats_row(std::ostringstream& out, const std::string& label,
                      const ClassStats& s) {
  out << label << ',' << s.n_gt << ',' << s.n_pred << ',' << s.n_matched << ','
      << s.n_missed << ',' << s.n_extra << ',' << s.n_correct << ','
      << format_double(s.mean_error_mm) << ',' << format_double(s.accuracy)
      << '\n';
}

}  // namespace

std::string eval_report_csv(const EvalReport& report) {
  std::ostringstream out;
  out << config_comment_block(report.config);
  out << "class_id,n_gt,n_pred,n_matched,n_missed,n_extra,n_correct,"
         "mean_error_mm,accuracy\n";
  for (const auto& [class_id, s] : report.per_class)
    append_stats_row(out, class_id, s);
  append_stats_row(out, "ALL", report.overall);
  return out.str();
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr double kW = 800.0, kH = 500.0;
constexpr double kLeft = 70.0, kRight = 30.0, kTop = 50.0, kBottom = 60.0;

}  // namespace

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label,
                           const std::vector<ChartSeries>& series,
                           const ExperimentConfig& cfg) {
  double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  bool any = false;
  for (const ChartSeries& s : series)
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (!any) {
        xmin = xmax = x;
        ymin = ymax = y;
        any = true;
      } else {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;

  const double plot_w = kW - kLeft - kRight;
  const double plot_h = kH - kTop - kBottom;
  const auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * plot_w; };
  const auto py = [&](double y) { return kTop + plot_h - (y - ymin) / (ymax - ymin) * plot_h; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
      << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW << ' ' << kH
      << "\">\n";
  out << "<!--\n" << format_config(cfg) << "-->\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << kW << "\" height=\"" << kH
      << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << kW / 2 << "\" y=\"28\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"18\">"
      << xml_escape(title) << "</text>\n";

  // Axes.
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
      << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\""
      << kLeft + plot_w << "\" y2=\"" << kTop + plot_h
      << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kH - 18
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">"
      << xml_escape(x_label) << "</text>\n";
  out << "<text x=\"18\" y=\"" << kTop + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 18 "
      << kTop + plot_h / 2 << ")\">" << xml_escape(y_label) << "</text>\n";

  // Extremal tick labels.
  out << "<text x=\"" << kLeft << "\" y=\"" << kTop + plot_h + 16
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
      << format_double(xmin) << "</text>\n";
  out << "<text x=\"" << kLeft + plot_w << "\" y=\"" << kTop + plot_h + 16
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
      << format_double(xmax) << "</text>\n";
  out << "<text x=\"" << kLeft - 6 << "\" y=\"" << kTop + plot_h + 4
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << format_double(ymin) << "</text>\n";
  out << "<text x=\"" << kLeft - 6 << "\" y=\"" << kTop + 4
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << format_double(ymax) << "</text>\n";

  double legend_y = kTop + 8.0;
  for (const ChartSeries& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << xml_escape(s.color)
        << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (!first) out << ' ';
      out << format_double(px(x)) << ',' << format_double(py(y));
      first = false;
    }
    out << "\"/>\n";
    out << "<line x1=\"" << kLeft + plot_w - 150 << "\" y1=\"" << legend_y
        << "\" x2=\"" << kLeft + plot_w - 126 << "\" y2=\"" << legend_y
        << "\" stroke=\"" << xml_escape(s.color) << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kLeft + plot_w - 120 << "\" y=\"" << legend_y + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << xml_escape(s.label) << "</text>\n";
    legend_y += 18.0;
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace cubepose
