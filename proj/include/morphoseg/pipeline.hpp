#pragma once

// End-to-end stages used by the morphoseg CLI. Every stage works on the full
// image; row bands are applied to label maps afterwards, never before
// segmentation or labeling.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "morphoseg/baseline_cc.hpp"
#include "morphoseg/groundtruth.hpp"
#include "morphoseg/raster_io.hpp"
#include "morphoseg/shape_eval.hpp"
#include "morphoseg/watershed.hpp"

namespace morphoseg {

/// Runs f(), prefixing any toolkit error with the stage name.
template <typename F>
auto in_stage(const char* stage, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const io_error& e) {
        throw io_error(std::string(stage) + ": " + e.what());
    } catch (const format_error& e) {
        throw format_error(std::string(stage) + ": " + e.what());
    } catch (const precondition_error& e) {
        throw precondition_error(std::string(stage) + ": " + e.what());
    }
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw io_error("write failed for '" + path + "'");
}

/// Filters and floods the EPM; writes `<prefix>_labels.slab`,
/// `<prefix>_lines.pgm` and `<prefix>_stats.txt`.
inline SegmentationResult run_watershed_pipeline(const std::string& epm_path,
                                                 const FilterParams& params,
                                                 const std::string& out_prefix,
                                                 Connectivity conn = Connectivity::four,
                                                 FilterOrder order = FilterOrder::area_then_dynamic) {
    const auto epm = in_stage("read", [&] { return read_graymap(epm_path); });
    auto result = in_stage("watershed", [&] { return segment(epm, params, conn, order); });
    in_stage("write", [&] {
        write_labelmap(result.labels, out_prefix + "_labels.slab");
        write_binary_graymap(result.line_mask, out_prefix + "_lines.pgm");
        write_text(out_prefix + "_stats.txt",
                   "regions " + std::to_string(result.region_count) + "\n");
    });
    return result;
}

/// Thresholds the EPM and labels its components; writes `<prefix>_labels.slab`.
inline LabelMap run_baseline(const std::string& epm_path, unsigned threshold,
                             const std::string& out_prefix,
                             Connectivity conn = Connectivity::four) {
    const auto epm = in_stage("read", [&] { return read_graymap(epm_path); });
    auto labels = in_stage("baseline", [&] {
        return label_components(threshold_epm(epm, threshold), conn);
    });
    in_stage("write", [&] { write_labelmap(labels, out_prefix + "_labels.slab"); });
    return labels;
}

/// Score maximized by calibration: area under the F1 curve, or F1 at one
/// IoU threshold.
struct Objective {
    enum class Kind { auc, f1_at } kind = Kind::auc;
    double threshold = 0.5;

    /// "auc" or "f1@T" with T in [0.5, 1] (0.5 meaning the 0.5+ limit).
    static Objective parse(const std::string& text) {
        if (text == "auc") return {};
        if (text.rfind("f1@", 0) == 0) {
            char* end = nullptr;
            const double t = std::strtod(text.c_str() + 3, &end);
            if (end && *end == '\0' && t >= 0.5 && t <= 1.0) return {Kind::f1_at, t};
        }
        throw precondition_error("objective: expected 'auc' or 'f1@T' with T in [0.5,1], got '" +
                                 text + "'");
    }

    double score(const MatchSet& ms) const {
        if (kind == Kind::auc) return area_under_f1(pr_f1_curve(ms));
        return point_at(ms, threshold).f1;
    }
};

template <typename Params>
struct CalibrationResult {
    Params best_params;
    double best_score;
    std::vector<std::pair<Params, double>> grid; // ascending params order
};

/// Evaluates `arm(params)` on every grid point against the reference, both
/// masked to `band`, and returns the best point. Ties go to the smallest
/// params. Grid points run on up to `threads` workers.
template <typename Params, typename Arm>
CalibrationResult<Params> calibrate_grid(std::vector<Params> grid, Arm&& arm, const LabelMap& gt,
                                         RowBand band, const Objective& objective = {},
                                         unsigned threads = 0) {
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    if (grid.empty()) throw precondition_error("calibrate: empty grid");
    if (band.start >= band.end || band.end > gt.height())
        throw precondition_error("calibrate: empty or out-of-range validation band");

    const LabelMap gt_band = mask_rows(gt, band.start, band.end);
    std::vector<double> scores(grid.size(), 0.0);

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(grid.size()));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < grid.size(); i = next++) {
            try {
                const LabelMap pred = arm(grid[i]);
                require_same_shape(gt, pred, "calibrate");
                scores[i] = objective.score(match_shapes(gt_band, mask_rows(pred, band.start, band.end)));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    CalibrationResult<Params> out{grid.front(), scores.front(), {}};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out.grid.emplace_back(grid[i], scores[i]);
        if (scores[i] > out.best_score) {
            out.best_score = scores[i];
            out.best_params = grid[i];
        }
    }
    return out;
}

inline std::vector<unsigned> default_h_grid() {
    std::vector<unsigned> v;
    for (unsigned h = 1; h <= 10; ++h) v.push_back(h);
    return v;
}

inline std::vector<unsigned> default_lambda_grid() {
    std::vector<unsigned> v;
    for (unsigned l = 50; l <= 500; l += 50) v.push_back(l);
    return v;
}

inline std::vector<unsigned> default_threshold_grid() {
    std::vector<unsigned> v;
    for (unsigned t = 1; t <= 30; ++t) v.push_back(t);
    return v;
}

inline CalibrationResult<FilterParams> calibrate_watershed(
    const GrayImage& epm, const LabelMap& gt, const std::vector<unsigned>& hs,
    const std::vector<unsigned>& lambdas, RowBand band, Connectivity conn = Connectivity::four,
    FilterOrder order = FilterOrder::area_then_dynamic, const Objective& objective = {},
    unsigned threads = 0) {
    require_same_shape(epm, gt, "calibrate");
    std::vector<FilterParams> grid;
    for (auto h : hs)
        for (auto l : lambdas) grid.push_back({h, l});
    return calibrate_grid(
        std::move(grid), [&](const FilterParams& p) { return segment(epm, p, conn, order).labels; },
        gt, band, objective, threads);
}

inline CalibrationResult<unsigned> calibrate_baseline(const GrayImage& epm, const LabelMap& gt,
                                                      const std::vector<unsigned>& thresholds,
                                                      RowBand band,
                                                      Connectivity conn = Connectivity::four,
                                                      const Objective& objective = {},
                                                      unsigned threads = 0) {
    require_same_shape(epm, gt, "calibrate");
    return calibrate_grid(
        std::vector<unsigned>(thresholds),
        [&](unsigned t) { return label_components(threshold_epm(epm, t), conn); }, gt, band,
        objective, threads);
}

/// IoU thresholds reported in the summary table.
inline constexpr double kSummaryThresholds[] = {0.50, 0.80, 0.90, 0.95};

struct EvaluationReport {
    MatchSet matches;
    std::vector<CurvePoint> curve;
    double auc;
    std::vector<CurvePoint> summary; // one row per kSummaryThresholds entry
};

inline EvaluationReport evaluate(const LabelMap& ref, const LabelMap& pred, RowBand band) {
    require_same_shape(ref, pred, "evaluate");
    auto ms = match_shapes(mask_rows(ref, band.start, band.end),
                           mask_rows(pred, band.start, band.end));
    auto curve = pr_f1_curve(ms);
    const double auc = area_under_f1(curve);
    std::vector<CurvePoint> summary;
    for (double t : kSummaryThresholds) summary.push_back(point_at(ms, t));
    return {std::move(ms), std::move(curve), auc, std::move(summary)};
}

inline std::string summary_csv(const EvaluationReport& report) {
    std::string out = "iou,precision,recall,f1,tp,fp,fn\n";
    char line[160];
    for (const auto& p : report.summary) {
        std::snprintf(line, sizeof line, "%.2f,%.6f,%.6f,%.6f,%zu,%zu,%zu\n", p.threshold,
                      p.precision, p.recall, p.f1, p.tp, p.fp, p.fn);
        out += line;
    }
    return out;
}

inline std::string summary_text(const EvaluationReport& report) {
    std::string out = " IoU  Precision  Recall  F-score      TP      FP      FN\n";
    char line[160];
    for (const auto& p : report.summary) {
        std::snprintf(line, sizeof line, "%4.2f  %9.2f  %6.2f  %7.2f  %6zu  %6zu  %6zu\n",
                      p.threshold, p.precision, p.recall, p.f1, p.tp, p.fp, p.fn);
        out += line;
    }
    std::snprintf(line, sizeof line, "area under F1: %.6f (reference shapes %zu, predicted %zu)\n",
                  report.auc, report.matches.ref_count, report.matches.pred_count);
    out += line;
    return out;
}

/// Writes the precision and recall maps of the band to
/// `<prefix>_precision.ppm` and `<prefix>_recall.ppm`.
inline void render_maps(const LabelMap& ref, const LabelMap& pred, RowBand band,
                        const std::string& out_prefix, Background background = Background::white) {
    require_same_shape(ref, pred, "render-maps");
    const auto r = mask_rows(ref, band.start, band.end);
    const auto p = mask_rows(pred, band.start, band.end);
    write_colormap(quality_map(r, p, QualityMode::precision, background),
                   out_prefix + "_precision.ppm");
    write_colormap(quality_map(r, p, QualityMode::recall, background), out_prefix + "_recall.ppm");
}

/// Evaluates two label map files on a band and writes the curve CSVs, the
/// summary table (CSV and text) and both quality maps.
inline EvaluationReport evaluate_files(const std::string& ref_path, const std::string& pred_path,
                                       std::optional<RowBand> band, const std::string& out_prefix,
                                       Background background = Background::white) {
    const auto ref = in_stage("read", [&] { return read_labelmap(ref_path); });
    const auto pred = in_stage("read", [&] { return read_labelmap(pred_path); });
    const RowBand rows = band.value_or(RowBand{0, ref.height()});
    auto report = in_stage("evaluate", [&] { return evaluate(ref, pred, rows); });
    in_stage("write", [&] {
        write_curve_csv(report.curve, out_prefix + "_curve.csv");
        write_curve_csv(sampled_curve(report.matches), out_prefix + "_curve_sampled.csv");
        write_text(out_prefix + "_summary.csv", summary_csv(report));
        write_text(out_prefix + "_summary.txt", summary_text(report));
        render_maps(ref, pred, rows, out_prefix, background);
    });
    return report;
}

} // namespace morphoseg
