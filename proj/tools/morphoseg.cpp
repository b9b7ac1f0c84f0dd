// morphoseg: closed-shape extraction from edge probability maps and
// shape-detection evaluation.
//
// Exit codes: 0 success, 1 evaluation found no shapes, 2 I/O or argument error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "morphoseg/morphoseg.hpp"

namespace ms = morphoseg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNoShapes = 1;
constexpr int kExitError = 2;

ms::RowBand parse_rows(const std::string& text) {
    unsigned long start = 0, end = 0;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%lu:%lu%c", &start, &end, &tail) != 2 || start >= end)
        throw ms::precondition_error("--rows: expected START:END with START < END, got '" + text + "'");
    return {start, end};
}

ms::Connectivity to_conn(int conn) {
    return conn == 8 ? ms::Connectivity::eight : ms::Connectivity::four;
}

ms::FilterOrder to_order(const std::string& order) {
    return order == "dynamic-first" ? ms::FilterOrder::dynamic_then_area
                                    : ms::FilterOrder::area_then_dynamic;
}

ms::Background to_background(const std::string& bg) {
    return bg == "black" ? ms::Background::black : ms::Background::white;
}

struct Common {
    int conn = 4;
    std::string out = "out";
};

void add_conn(CLI::App* cmd, Common& c) {
    cmd->add_option("--conn", c.conn, "Pixel connectivity")->check(CLI::IsMember({4, 8}));
}

void add_out(CLI::App* cmd, Common& c) {
    cmd->add_option("--out", c.out, "Output prefix")->required();
}

std::string join_values(const std::vector<unsigned>& v) {
    std::string s;
    for (auto x : v) s += (s.empty() ? "" : ",") + std::to_string(x);
    return s;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"morphoseg: watershed segmentation of edge probability maps and shape evaluation"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);
    Common common;

    // filter
    std::string epm, order = "area-first";
    unsigned h = 0, lambda = 0;
    auto* filter = app.add_subcommand("filter", "Area closing and h-minima filtering of an EPM");
    filter->add_option("--epm", epm, "Input EPM (PGM P5)")->required();
    filter->add_option("--h", h, "Dynamic threshold");
    filter->add_option("--lambda", lambda, "Area threshold in pixels");
    filter->add_option("--order", order, "Filter order")
        ->check(CLI::IsMember({"area-first", "dynamic-first"}));
    add_conn(filter, common);
    add_out(filter, common);

    // watershed
    auto* watershed = app.add_subcommand("watershed", "Filter an EPM and flood it from its minima");
    watershed->add_option("--epm", epm, "Input EPM (PGM P5)")->required();
    watershed->add_option("--h", h, "Dynamic threshold");
    watershed->add_option("--lambda", lambda, "Area threshold in pixels");
    watershed->add_option("--order", order, "Filter order")
        ->check(CLI::IsMember({"area-first", "dynamic-first"}));
    add_conn(watershed, common);
    add_out(watershed, common);

    // baseline
    unsigned threshold = 9;
    auto* baseline = app.add_subcommand("baseline", "Threshold an EPM and label its components");
    baseline->add_option("--epm", epm, "Input EPM (PGM P5)")->required();
    baseline->add_option("--threshold", threshold, "Pixels strictly below this are shape interior")
        ->check(CLI::Range(0u, 255u));
    add_conn(baseline, common);
    add_out(baseline, common);

    // rasterize-gt
    std::string polylines;
    std::size_t width = 0, height = 0;
    auto* rasterize = app.add_subcommand("rasterize-gt", "Build reference edge and label maps from polylines");
    rasterize->add_option("--polylines", polylines, "Polyline text file")->required();
    rasterize->add_option("--width", width, "Image width")->required();
    rasterize->add_option("--height", height, "Image height")->required();
    add_out(rasterize, common);

    // calibrate
    std::string gt, arm = "watershed", rows, objective = "auc";
    std::vector<unsigned> hs, lambdas, thresholds;
    unsigned threads = 0;
    auto* calibrate = app.add_subcommand("calibrate", "Grid-search parameters on a validation band");
    calibrate->add_option("--epm", epm, "Input EPM (PGM P5)")->required();
    calibrate->add_option("--gt", gt, "Reference label map (SLAB)")->required();
    calibrate->add_option("--arm", arm, "Which method to calibrate")
        ->check(CLI::IsMember({"watershed", "baseline"}));
    calibrate->add_option("--rows", rows, "Validation band START:END")->required();
    calibrate->add_option("--h", hs, "Dynamic values (comma separated)")->delimiter(',');
    calibrate->add_option("--lambda", lambdas, "Area values (comma separated)")->delimiter(',');
    calibrate->add_option("--threshold", thresholds, "Threshold values (comma separated)")
        ->delimiter(',')
        ->check(CLI::Range(0u, 255u));
    calibrate->add_option("--objective", objective, "auc or f1@T");
    calibrate->add_option("--order", order, "Filter order")
        ->check(CLI::IsMember({"area-first", "dynamic-first"}));
    calibrate->add_option("--threads", threads, "Worker threads (0 = all cores)");
    add_conn(calibrate, common);
    add_out(calibrate, common);

    // evaluate / render-maps
    std::string ref, pred, background = "white";
    auto* evaluate = app.add_subcommand("evaluate", "Score predicted shapes against reference shapes");
    auto* render = app.add_subcommand("render-maps", "Write precision and recall maps");
    for (auto* cmd : {evaluate, render}) {
        cmd->add_option("--ref", ref, "Reference label map (SLAB)")->required();
        cmd->add_option("--pred", pred, "Predicted label map (SLAB)")->required();
        cmd->add_option("--rows", rows, "Row band START:END (default: all rows)");
        cmd->add_option("--background", background, "Color of unlabeled pixels")
            ->check(CLI::IsMember({"white", "black"}));
        add_out(cmd, common);
    }

    // tiles
    std::string image, train = "0:4000", val = "4000:5000", test = "5000:6500";
    std::size_t tile = 500;
    auto* tiles = app.add_subcommand("tiles", "List (and optionally export) dataset tiles");
    tiles->add_option("--width", width, "Image width (or use --image)");
    tiles->add_option("--height", height, "Image height (or use --image)");
    tiles->add_option("--image", image, "Graymap to cut into tiles");
    tiles->add_option("--train", train, "Training band START:END");
    tiles->add_option("--val", val, "Validation band START:END");
    tiles->add_option("--test", test, "Test band START:END");
    tiles->add_option("--tile", tile, "Tile size in pixels");
    tiles->add_option("--out", common.out, "Export directory (requires --image)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitError;
    }

    try {
        const auto conn = to_conn(common.conn);

        if (*filter) {
            const auto img = ms::read_graymap(epm);
            ms::write_graymap(ms::filter_epm(img, {h, lambda}, conn, to_order(order)),
                              common.out + "_filtered.pgm");
        } else if (*watershed) {
            const auto result =
                ms::run_watershed_pipeline(epm, {h, lambda}, common.out, conn, to_order(order));
            std::cout << "regions " << result.region_count << "\n";
        } else if (*baseline) {
            const auto labels = ms::run_baseline(epm, threshold, common.out, conn);
            std::cout << "shapes " << ms::count_labels(labels) << "\n";
        } else if (*rasterize) {
            const auto ps = ms::read_polylines(polylines, width, height);
            const auto edges = ms::make_edge_gt(ps);
            const auto labels = ms::make_label_gt(edges);
            ms::write_binary_graymap(edges, common.out + "_edges.pgm");
            ms::write_labelmap(labels, common.out + "_labels.slab");
            std::cout << "polylines " << ps.polylines.size() << "\nshapes "
                      << ms::count_labels(labels) << "\n";
        } else if (*calibrate) {
            const auto img = ms::read_graymap(epm);
            const auto ref_map = ms::read_labelmap(gt);
            const auto band = parse_rows(rows);
            const auto obj = ms::Objective::parse(objective);
            std::string csv;
            if (arm == "watershed") {
                const auto res = ms::calibrate_watershed(
                    img, ref_map, hs.empty() ? ms::default_h_grid() : hs,
                    lambdas.empty() ? ms::default_lambda_grid() : lambdas, band, conn,
                    to_order(order), obj, threads);
                csv = "h,lambda,score\n";
                for (const auto& [p, s] : res.grid)
                    csv += std::to_string(p.h) + "," + std::to_string(p.lambda_area) + "," +
                           std::to_string(s) + "\n";
                std::printf("best h %u lambda %u score %.6f\n", res.best_params.h,
                            res.best_params.lambda_area, res.best_score);
            } else {
                const auto grid = thresholds.empty() ? ms::default_threshold_grid() : thresholds;
                const auto res = ms::calibrate_baseline(img, ref_map, grid, band, conn, obj, threads);
                csv = "threshold,score\n";
                for (const auto& [t, s] : res.grid)
                    csv += std::to_string(t) + "," + std::to_string(s) + "\n";
                std::printf("best threshold %u score %.6f (grid %s)\n", res.best_params,
                            res.best_score, join_values(grid).c_str());
            }
            ms::write_text(common.out + "_grid.csv", csv);
        } else if (*evaluate) {
            std::optional<ms::RowBand> band;
            if (!rows.empty()) band = parse_rows(rows);
            const auto report =
                ms::evaluate_files(ref, pred, band, common.out, to_background(background));
            std::cout << ms::summary_text(report);
            if (report.matches.ref_count == 0 || report.matches.pred_count == 0) {
                std::cerr << "warning: no shapes in the evaluated band\n";
                return kExitNoShapes;
            }
        } else if (*render) {
            const auto ref_map = ms::read_labelmap(ref);
            const auto pred_map = ms::read_labelmap(pred);
            const auto band = rows.empty() ? ms::RowBand{0, ref_map.height()} : parse_rows(rows);
            ms::render_maps(ref_map, pred_map, band, common.out, to_background(background));
        } else if (*tiles) {
            std::optional<ms::GrayImage> img;
            if (!image.empty()) {
                img = ms::read_graymap(image);
                width = img->width();
                height = img->height();
            }
            if (width == 0 || height == 0)
                throw ms::precondition_error("tiles: give --width and --height, or --image");
            ms::SplitSpec spec{parse_rows(train), parse_rows(val), parse_rows(test), tile};
            const auto split = ms::split_rows(width, height, spec);
            std::size_t total = 0, full = 0;
            for (const auto* part : {&split.train, &split.validation, &split.test}) {
                const char* name = part == &split.train ? "train"
                                   : part == &split.validation ? "val"
                                                               : "test";
                std::printf("%-5s rows %zu:%zu tiles %zu (full %zu)\n", name, part->band.start,
                            part->band.end, part->tiles.size(), part->full_tiles);
                total += part->tiles.size();
                full += part->full_tiles;
                if (img && tiles->count("--out")) {
                    const std::filesystem::path dir = std::filesystem::path(common.out) / name;
                    std::filesystem::create_directories(dir);
                    for (const auto& t : part->tiles)
                        ms::write_graymap(ms::crop(*img, t), (dir / ms::tile_name(t)).string());
                }
            }
            std::printf("total tiles %zu (full %zu)\n", total, full);
        }
    } catch (const ms::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitOk;
}
