#pragma once

#include <map>
#include <string>
#include <vector>

#include "cubepose/config.hpp"
#include "cubepose/ingest.hpp"

namespace cubepose {

struct ClassStats {
  int n_gt = 0;       // ground-truth records
  int n_pred = 0;     // predictions carrying this class_id
  int n_matched = 0;  // ground truths with at least one prediction
  int n_missed = 0;   // ground truths with none
  int n_extra = 0;    // surplus predictions: ties beyond the best, plus unmatched
  int n_correct = 0;  // matched ground truths whose best error < k * diameter
  double mean_error_mm = 0.0;  // over matched ground truths; NaN when none
  double accuracy = 0.0;       // n_correct / (n_gt + n_extra); 0 when empty
};

struct EvalReport {
  std::map<std::string, ClassStats> per_class;  // ordered by class_id
  ClassStats overall;
  ExperimentConfig config;
};

// Joins predictions to ground truths on (image_id, class_id). Multiple
// predictions for one key keep the best error; the rest count as incorrect
// extras, as do predictions with no ground truth. Ground truths with no
// prediction count as missed (incorrect). A record is scored with ADD, or
// with the directed chamfer ADD-S (cfg.direction_eval) when its class is in
// cfg.symmetric_classes or the ground-truth record says symmetric.
// Throws SchemaViolation if two ground truths share a join key.
EvalReport evaluate_records(const std::vector<AnnotationRecord>& gt,
                            const std::vector<AnnotationRecord>& pred,
                            const ExperimentConfig& cfg);

// Every line of format_config(cfg) prefixed with "# ".
std::string config_comment_block(const ExperimentConfig& cfg);

// Config comment block, a header, one row per class, and a final ALL row.
std::string eval_report_csv(const EvalReport& report);

struct ChartSeries {
  std::string label;
  std::string color;                        // SVG color
  std::vector<std::pair<double, double>> points;  // (x, y); non-finite skipped
};

// Self-contained SVG line chart; no external assets. The config echo is
// embedded as an XML comment.
std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label,
                           const std::vector<ChartSeries>& series,
                           const ExperimentConfig& cfg);

}  // namespace cubepose
