#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mvsc/codec.hpp"
#include "mvsc/frame.hpp"

namespace mvsc {

struct RDPoint {
    double kbps = 0.0;    // total over all views
    double psnr_y = 0.0;  // dB, finite
};

/// Exactly four points, ordered by increasing QP; bitrate strictly
/// decreasing along the ladder.
struct RDCurve {
    std::array<RDPoint, 4> points{};
};

// Bjontegaard delta-rate in percent: cubic log10(rate)-over-PSNR fits,
// integrated numerically over the common PSNR range. Negative means the test
// curve needs less rate than the anchor. Throws on empty overlap or a
// degenerate fit.
double bd_rate(const RDCurve& anchor, const RDCurve& test);

enum class SynthKind { CameraLike, ScreenLike };

// Deterministic synthetic multiview content. CAMERA_LIKE: smooth gradients
// plus low-passed noise, views sampled from a quarter-pel master at
// (view - center) * disparity, slow global translation, per-view sensor
// noise. SCREEN_LIKE: flat background, 32px-periodic glyph rows, rectangles,
// integer-only displacements, no noise.
std::vector<Sequence> synth_multiview(SynthKind kind, int n_views, int view_w, int view_h,
                                      int n_frames, int disparity_qpel, int noise_amp,
                                      uint64_t seed);

struct BenchMode {
    std::string name;
    CodecConfig config;
};

// Canonical mode set used by the paper-style comparisons.
BenchMode bench_mode_simulcast();
BenchMode bench_mode_scc();        // raster, full-pel IBC
BenchMode bench_mode_scc_qpel();   // raster, quarter-pel IBC
BenchMode bench_mode_ascc();       // tiles, quarter-pel, all tools
BenchMode bench_mode_ascc_fullpel();
BenchMode bench_mode_by_name(const std::string& name);

struct BenchSequence {
    std::string name;
    std::vector<Sequence> views;
};

struct RawCell {
    std::string sequence, mode, scenario;
    int qp = 0;
    double kbps = 0.0, psnr_y = 0.0, seconds = 0.0;
    std::string error;
};

struct BdCell {
    std::string sequence, scenario, anchor, test;
    double bd_rate_pct = 0.0, time_delta_pct = 0.0;
    std::string error;
};

struct BenchResult {
    std::vector<RawCell> raw;
    std::vector<BdCell> bd;
};

// Encodes every (sequence, mode, scenario, qp) cell, decodes and verifies
// the closed loop, and fills BD-rate rows for the given anchor/test pairs
// (default: simulcast vs everything else, plus scc vs scc-qpel when both are
// present). A failing cell records its error and the run continues.
BenchResult run_bench(const std::vector<BenchSequence>& sequences,
                      const std::vector<BenchMode>& modes, const std::vector<int>& qps,
                      const std::vector<GopKind>& scenarios,
                      const std::vector<std::pair<std::string, std::string>>* pairs = nullptr);

std::string emit_report_csv(const BenchResult& result);
std::string emit_report_json(const BenchResult& result);

// Two-column "kbps,psnr" dump of one curve, gnuplot-ready.
std::string emit_rd_points(const RDCurve& curve);
RDCurve parse_rd_csv(const std::string& text);

const char* scenario_name(GopKind g);

}  // namespace mvsc
