#pragma once

// Instance-level scoring of a predicted partition against a reference one.
//
// Shapes are the nonzero label classes of a LabelMap. Because the shapes of a
// partition are disjoint, a pair (r, p) with IoU > 0.5 is the unique best
// partner of each other, so matching needs no assignment step.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "morphoseg/image.hpp"

namespace morphoseg {

struct Match {
    std::uint32_t ref_label;
    std::uint32_t pred_label;
    double iou; // in (0.5, 1]
    friend bool operator==(const Match&, const Match&) = default;
};

struct MatchSet {
    std::vector<Match> matches; // sorted by ref_label
    std::size_t ref_count = 0;
    std::size_t pred_count = 0;
};

struct Counts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    friend bool operator==(const Counts&, const Counts&) = default;
};

/// One step of the precision/recall/F1 curve. The metrics hold for every
/// IoU threshold in (previous point's threshold, threshold]; the first point
/// sits at 0.5 and stands for the limit T -> 0.5+.
struct CurvePoint {
    double threshold;
    double precision;
    double recall;
    double f1;
    std::size_t tp;
    std::size_t fp;
    std::size_t fn;
};

enum class QualityMode { precision, recall };
enum class Background { white, black };

/// Pixel areas of every shape of both maps and of every overlapping pair.
class OverlapTable {
public:
    OverlapTable(const LabelMap& ref, const LabelMap& pred) {
        require_same_shape(ref, pred, "overlap");
        std::uint64_t run_key = 0;
        std::uint64_t run_len = 0;
        auto flush = [&] {
            if (run_len) pairs_[run_key] += run_len;
            run_len = 0;
        };
        for (std::size_t i = 0; i < ref.size(); ++i) {
            const auto r = ref[i];
            const auto p = pred[i];
            if (r) ++ref_area_[r];
            if (p) ++pred_area_[p];
            if (r && p) {
                const auto key = pack(r, p);
                if (run_len && key != run_key) flush();
                run_key = key;
                ++run_len;
            } else {
                flush();
            }
        }
        flush();
    }

    const std::unordered_map<std::uint32_t, std::uint64_t>& ref_areas() const { return ref_area_; }
    const std::unordered_map<std::uint32_t, std::uint64_t>& pred_areas() const { return pred_area_; }

    /// Calls f(ref_label, pred_label, intersection, union) per overlapping pair.
    template <typename F>
    void for_each_pair(F&& f) const {
        for (const auto& [key, inter] : pairs_) {
            const auto r = static_cast<std::uint32_t>(key >> 32);
            const auto p = static_cast<std::uint32_t>(key & 0xFFFFFFFFu);
            const auto uni = ref_area_.at(r) + pred_area_.at(p) - inter;
            f(r, p, inter, uni);
        }
    }

private:
    static std::uint64_t pack(std::uint32_t r, std::uint32_t p) {
        return (std::uint64_t{r} << 32) | p;
    }

    std::unordered_map<std::uint32_t, std::uint64_t> ref_area_;
    std::unordered_map<std::uint32_t, std::uint64_t> pred_area_;
    std::unordered_map<std::uint64_t, std::uint64_t> pairs_;
};

/// Every (reference, prediction) pair whose IoU is strictly above 0.5.
inline MatchSet match_shapes(const LabelMap& ref, const LabelMap& pred) {
    const OverlapTable table(ref, pred);
    MatchSet out;
    out.ref_count = table.ref_areas().size();
    out.pred_count = table.pred_areas().size();
    table.for_each_pair([&](std::uint32_t r, std::uint32_t p, std::uint64_t inter, std::uint64_t uni) {
        if (2 * inter > uni)
            out.matches.push_back({r, p, static_cast<double>(inter) / static_cast<double>(uni)});
    });
    std::sort(out.matches.begin(), out.matches.end(),
              [](const Match& a, const Match& b) { return a.ref_label < b.ref_label; });
    return out;
}

namespace detail {

inline double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

inline Counts counts_with_tp(const MatchSet& ms, std::size_t tp) {
    return {tp, ms.pred_count - tp, ms.ref_count - tp};
}

inline CurvePoint make_point(double threshold, const Counts& c) {
    return {threshold,
            ratio(c.tp, c.tp + c.fp),
            ratio(c.tp, c.tp + c.fn),
            ratio(2 * c.tp, 2 * c.tp + c.fn + c.fp),
            c.tp,
            c.fp,
            c.fn};
}

} // namespace detail

/// TP/FP/FN when a match counts only if its IoU is at least `threshold`.
inline Counts counts_at(const MatchSet& ms, double threshold) {
    if (!(threshold > 0.5 && threshold <= 1.0))
        throw precondition_error("counts_at: threshold must lie in (0.5, 1]");
    const auto tp = static_cast<std::size_t>(std::count_if(
        ms.matches.begin(), ms.matches.end(), [&](const Match& m) { return m.iou >= threshold; }));
    return detail::counts_with_tp(ms, tp);
}

/// Counts in the limit T -> 0.5+, where every match is a true positive.
inline Counts counts_above_half(const MatchSet& ms) {
    return detail::counts_with_tp(ms, ms.matches.size());
}

inline double f1_score(const Counts& c) {
    return detail::ratio(2 * c.tp, 2 * c.tp + c.fn + c.fp);
}

/// Harmonic mean of precision and recall; 0 when both are 0.
inline double f1_from_precision_recall(double precision, double recall) {
    return precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
}

/// Exact step-function curve over IoU thresholds in (0.5, 1].
inline std::vector<CurvePoint> pr_f1_curve(const MatchSet& ms) {
    std::vector<double> ious;
    ious.reserve(ms.matches.size());
    for (const auto& m : ms.matches) ious.push_back(m.iou);
    std::sort(ious.begin(), ious.end());

    std::vector<CurvePoint> curve;
    curve.push_back(detail::make_point(0.5, counts_above_half(ms)));
    for (std::size_t i = 0; i < ious.size();) {
        const double t = ious[i];
        const std::size_t tp = ious.size() - i; // matches with iou >= t
        curve.push_back(detail::make_point(t, detail::counts_with_tp(ms, tp)));
        while (i < ious.size() && ious[i] == t) ++i;
    }
    if (curve.back().threshold < 1.0)
        curve.push_back(detail::make_point(1.0, detail::counts_with_tp(ms, 0)));
    return curve;
}

/// Integral of the F1 step function over (0.5, 1]; lies in [0, 0.5].
inline double area_under_f1(const std::vector<CurvePoint>& curve) {
    double area = 0.0;
    for (std::size_t i = 1; i < curve.size(); ++i)
        area += (curve[i].threshold - curve[i - 1].threshold) * curve[i].f1;
    return area;
}

/// Curve sampled every 0.01 from 0.50 (as the 0.5+ limit) to 1.00, for plotting.
inline std::vector<CurvePoint> sampled_curve(const MatchSet& ms) {
    std::vector<CurvePoint> out;
    out.push_back(detail::make_point(0.5, counts_above_half(ms)));
    for (int k = 51; k <= 100; ++k) {
        const double t = k / 100.0;
        out.push_back(detail::make_point(t, counts_at(ms, t)));
    }
    return out;
}

/// Curve metrics at a threshold, treating 0.5 as the 0.5+ limit.
inline CurvePoint point_at(const MatchSet& ms, double threshold) {
    if (threshold == 0.5) return detail::make_point(0.5, counts_above_half(ms));
    return detail::make_point(threshold, counts_at(ms, threshold));
}

/// Red (0) to yellow (0.5) to green (1).
inline Rgb iou_color(double best_iou) {
    const double b = std::clamp(best_iou, 0.0, 1.0);
    if (b <= 0.5) return {255, static_cast<std::uint8_t>(std::lround(510.0 * b)), 0};
    return {static_cast<std::uint8_t>(std::lround(510.0 * (1.0 - b))), 255, 0};
}

/// Best IoU of every shape of one map against the shapes of the other.
/// Shapes with no overlap get 0.
inline std::unordered_map<std::uint32_t, double> best_iou(const LabelMap& ref, const LabelMap& pred,
                                                          QualityMode mode) {
    const OverlapTable table(ref, pred);
    std::unordered_map<std::uint32_t, double> best;
    for (const auto& [label, area] : mode == QualityMode::precision ? table.pred_areas()
                                                                    : table.ref_areas())
        best[label] = 0.0;
    table.for_each_pair([&](std::uint32_t r, std::uint32_t p, std::uint64_t inter, std::uint64_t uni) {
        const double iou = static_cast<double>(inter) / static_cast<double>(uni);
        auto& slot = best[mode == QualityMode::precision ? p : r];
        slot = std::max(slot, iou);
    });
    return best;
}

/// Precision map (paints predicted shapes) or recall map (paints reference
/// shapes), each shape colored by its best IoU against the other map.
inline RgbImage quality_map(const LabelMap& ref, const LabelMap& pred, QualityMode mode,
                            Background background = Background::white) {
    const auto best = best_iou(ref, pred, mode);
    const LabelMap& subject = mode == QualityMode::precision ? pred : ref;
    const Rgb bg = background == Background::white ? Rgb{255, 255, 255} : Rgb{0, 0, 0};

    std::unordered_map<std::uint32_t, Rgb> colors;
    for (const auto& [label, b] : best) colors[label] = iou_color(b);
    RgbImage out(subject.width(), subject.height(), bg);
    for (std::size_t i = 0; i < subject.size(); ++i)
        if (subject[i]) out[i] = colors.at(subject[i]);
    return out;
}

/// Keeps rows [row_start, row_end), clearing the rest and renumbering the
/// surviving shapes densely. Shapes straddling the band are clipped.
inline LabelMap mask_rows(const LabelMap& labels, std::size_t row_start, std::size_t row_end) {
    if (!(row_start < row_end && row_end <= labels.height()))
        throw precondition_error("mask_rows: invalid row range [" + std::to_string(row_start) +
                                 ", " + std::to_string(row_end) + ") for height " +
                                 std::to_string(labels.height()));
    LabelMap out(labels.width(), labels.height(), 0u);
    const auto w = labels.width();
    std::copy(labels.begin() + static_cast<std::ptrdiff_t>(row_start * w),
              labels.begin() + static_cast<std::ptrdiff_t>(row_end * w),
              out.begin() + static_cast<std::ptrdiff_t>(row_start * w));
    return densify_labels(out);
}

struct ClassWeights {
    double alpha;
    double beta;
};

/// Re-balancing weights of the edge detector's cross-entropy loss:
/// alpha = lambda * |Y-| / N and beta = |Y+| / N with N = |Y+| + |Y-|.
inline ClassWeights class_balance_weights(std::uint64_t edge_count, std::uint64_t non_edge_count,
                                          double lambda_bce) {
    const auto total = edge_count + non_edge_count;
    if (total == 0) throw precondition_error("class_balance_weights: no pixels");
    const double n = static_cast<double>(total);
    return {lambda_bce * static_cast<double>(non_edge_count) / n,
            static_cast<double>(edge_count) / n};
}

inline std::string curve_csv(const std::vector<CurvePoint>& curve) {
    std::string out = "threshold,precision,recall,f1,tp,fp,fn\n";
    char line[160];
    for (const auto& p : curve) {
        std::snprintf(line, sizeof line, "%.6f,%.6f,%.6f,%.6f,%zu,%zu,%zu\n", p.threshold,
                      p.precision, p.recall, p.f1, p.tp, p.fp, p.fn);
        out += line;
    }
    return out;
}

inline void write_curve_csv(const std::vector<CurvePoint>& curve, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    out << curve_csv(curve);
    if (!out) throw io_error("write failed for '" + path + "'");
}

} // namespace morphoseg
