#include "mvsc/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <random>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace mvsc {

const char* scenario_name(GopKind g) { return g == GopKind::AllIntra ? "ai" : "ippp"; }

namespace {

void validate_curve(const RDCurve& c, const char* which) {
    for (const RDPoint& p : c.points) {
        if (!std::isfinite(p.psnr_y) || !std::isfinite(p.kbps) || p.kbps <= 0.0)
            throw std::invalid_argument(std::string("bd_rate: invalid ") + which + " curve point");
    }
    for (int i = 1; i < 4; ++i)
        if (c.points[i].kbps >= c.points[i - 1].kbps)
            throw std::invalid_argument(std::string("bd_rate: ") + which +
                                        " bitrate must strictly decrease along the QP ladder");
}

// Interpolating cubic through the 4 points, solved by Gaussian elimination
// with partial pivoting.
std::array<double, 4> fit_cubic(const std::array<double, 4>& x, const std::array<double, 4>& y) {
    double a[4][5];
    for (int i = 0; i < 4; ++i) {
        double xi = x[i];
        a[i][0] = 1.0;
        a[i][1] = xi;
        a[i][2] = xi * xi;
        a[i][3] = xi * xi * xi;
        a[i][4] = y[i];
    }
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-12)
            throw std::invalid_argument("bd_rate: degenerate fit (duplicate PSNR values)");
        for (int j = 0; j <= 4; ++j) std::swap(a[col][j], a[piv][j]);
        for (int r = 0; r < 4; ++r) {
            if (r == col) continue;
            double f = a[r][col] / a[col][col];
            for (int j = col; j <= 4; ++j) a[r][j] -= f * a[col][j];
        }
    }
    std::array<double, 4> coef{};
    for (int i = 0; i < 4; ++i) coef[i] = a[i][4] / a[i][i];
    return coef;
}

double poly_eval(const std::array<double, 4>& c, double x) {
    return c[0] + x * (c[1] + x * (c[2] + x * c[3]));
}

// Trapezoid integration over [lo, hi] with n uniform intervals.
double integrate(const std::array<double, 4>& c, double lo, double hi, int n) {
    double h = (hi - lo) / n;
    double s = 0.5 * (poly_eval(c, lo) + poly_eval(c, hi));
    for (int i = 1; i < n; ++i) s += poly_eval(c, lo + i * h);
    return s * h;
}

}  // namespace

double bd_rate(const RDCurve& anchor, const RDCurve& test) {
    validate_curve(anchor, "anchor");
    validate_curve(test, "test");

    std::array<double, 4> ax{}, ay{}, tx{}, ty{};
    for (int i = 0; i < 4; ++i) {
        ax[i] = anchor.points[i].psnr_y;
        ay[i] = std::log10(anchor.points[i].kbps);
        tx[i] = test.points[i].psnr_y;
        ty[i] = std::log10(test.points[i].kbps);
    }
    double lo = std::max(*std::min_element(ax.begin(), ax.end()),
                         *std::min_element(tx.begin(), tx.end()));
    double hi = std::min(*std::max_element(ax.begin(), ax.end()),
                         *std::max_element(tx.begin(), tx.end()));
    if (!(lo < hi)) throw std::invalid_argument("bd_rate: PSNR ranges do not overlap");

    auto ca = fit_cubic(ax, ay);
    auto ct = fit_cubic(tx, ty);
    double delta = (integrate(ct, lo, hi, 1000) - integrate(ca, lo, hi, 1000)) / (hi - lo);
    return (std::pow(10.0, delta) - 1.0) * 100.0;
}

namespace {

struct Rng {
    std::mt19937_64 eng;
    explicit Rng(uint64_t seed) : eng(seed) {}
    uint64_t u64() { return eng(); }
    int uniform(int lo, int hi) { return lo + int(u64() % uint64_t(hi - lo + 1)); }
    double unit() { return double(u64() >> 11) * (1.0 / 9007199254740992.0); }
};

uint64_t mix_seed(uint64_t seed, uint64_t a, uint64_t b) {
    uint64_t z = seed + 0x9E3779B97F4A7C15ull * (a + 1) + 0xBF58476D1CE4E5B9ull * (b + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

uint8_t clamp_u8d(double v) { return uint8_t(std::clamp(int(std::lround(v)), 0, 255)); }

struct Wave {
    double amp, px, py, phase;
};

Wave random_wave(Rng& r, double amp_lo, double amp_hi) {
    Wave w;
    w.amp = amp_lo + (amp_hi - amp_lo) * r.unit();
    double period = 24.0 + 40.0 * r.unit();
    double angle = 2.0 * M_PI * r.unit();
    w.px = std::cos(angle) / period;
    w.py = std::sin(angle) / period;
    w.phase = 2.0 * M_PI * r.unit();
    return w;
}

double wave_eval(const Wave& w, double x, double y) {
    return w.amp * std::cos(2.0 * M_PI * (w.px * x + w.py * y) + w.phase);
}

// Low-passed unit noise on a full-pel grid, sampled with linear
// interpolation in x (views shift horizontally only).
struct SmoothNoise {
    int w, h;
    std::vector<float> g;

    SmoothNoise(int width, int height, Rng& r) : w(width), h(height), g(size_t(w) * h) {
        for (float& v : g) v = float(2.0 * r.unit() - 1.0);
        blur();
        blur();
    }
    void blur() {
        std::vector<float> t(g.size());
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                float s = 0;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx)
                        s += g[size_t(std::clamp(y + dy, 0, h - 1)) * w +
                              size_t(std::clamp(x + dx, 0, w - 1))];
                t[size_t(y) * w + x] = s / 9.0f;
            }
        g.swap(t);
    }
    double at(double x, int y) const {
        x = std::clamp(x, 0.0, double(w - 1));
        int x0 = int(x);
        int x1 = std::min(x0 + 1, w - 1);
        double f = x - x0;
        return (1.0 - f) * g[size_t(y) * w + x0] + f * g[size_t(y) * w + x1];
    }
};

std::vector<Sequence> synth_camera(int n_views, int w, int h, int n_frames, int disparity_qpel,
                                   int noise_amp, uint64_t seed) {
    Rng r(mix_seed(seed, 1, 0));
    const int center = (n_views - 1) / 2;
    const int g_qpel = 2;  // slow global translation, half-pel per frame
    int max_shift = 0;
    for (int k = 0; k < n_views; ++k)
        max_shift = std::max(max_shift, std::abs((k - center) * disparity_qpel));
    max_shift += (n_frames - 1) * g_qpel;
    const int margin = max_shift / 4 + 2;

    // Luma master on the quarter-pel grid; all views sample every 4th value,
    // so fractional disparities are exact by construction.
    const int mw = w + 2 * margin;
    const int fine_w = 4 * mw;
    Wave w1 = random_wave(r, 18.0, 36.0);
    Wave w2 = random_wave(r, 10.0, 28.0);
    Rng rn(mix_seed(seed, 2, 0));
    SmoothNoise lp(mw + 2, h, rn);
    std::vector<uint8_t> fine(size_t(fine_w) * h);
    for (int y = 0; y < h; ++y)
        for (int X = 0; X < fine_w; ++X) {
            double u = X / 4.0;
            double v = 128.0 + wave_eval(w1, u, y) + wave_eval(w2, u, y) + 14.0 * lp.at(u, y);
            fine[size_t(y) * fine_w + X] = clamp_u8d(v);
        }

    // Chroma masters on the eighth-pel grid (half-resolution planes shift by
    // half the luma displacement).
    const int cw = w / 2, ch = h / 2;
    const int cmw = cw + 2 * margin;
    const int cfine_w = 8 * cmw;
    Wave wu = random_wave(r, 8.0, 16.0);
    Wave wv = random_wave(r, 8.0, 16.0);
    std::vector<uint8_t> fine_u(size_t(cfine_w) * ch), fine_v(size_t(cfine_w) * ch);
    for (int y = 0; y < ch; ++y)
        for (int X = 0; X < cfine_w; ++X) {
            double u = X / 8.0;
            fine_u[size_t(y) * cfine_w + X] = clamp_u8d(128.0 + wave_eval(wu, u, y));
            fine_v[size_t(y) * cfine_w + X] = clamp_u8d(128.0 + wave_eval(wv, u, y));
        }

    std::vector<Sequence> out;
    out.resize(size_t(n_views));
    for (int k = 0; k < n_views; ++k) {
        for (int t = 0; t < n_frames; ++t) {
            int s = (k - center) * disparity_qpel + t * g_qpel;
            Frame f(w, h);
            Rng rs(mix_seed(seed, 100 + uint64_t(k), uint64_t(t)));
            for (int y = 0; y < h; ++y) {
                uint8_t* row = f.y.row(y);
                const uint8_t* src = fine.data() + size_t(y) * fine_w;
                for (int x = 0; x < w; ++x) {
                    int val = src[4 * (x + margin) + s];
                    if (noise_amp > 0) val += rs.uniform(-noise_amp, noise_amp);
                    row[x] = uint8_t(std::clamp(val, 0, 255));
                }
            }
            for (int y = 0; y < ch; ++y) {
                uint8_t* ru = f.u.row(y);
                uint8_t* rv = f.v.row(y);
                const uint8_t* su = fine_u.data() + size_t(y) * cfine_w;
                const uint8_t* sv = fine_v.data() + size_t(y) * cfine_w;
                for (int x = 0; x < cw; ++x) {
                    ru[x] = su[8 * (x + margin) + s];
                    rv[x] = sv[8 * (x + margin) + s];
                }
            }
            out[size_t(k)].frames.push_back(std::move(f));
        }
    }
    return out;
}

struct ScreenScene {
    struct Rect {
        int x, y, w, h;
        uint8_t y_val, u_val, v_val;
    };
    std::vector<Rect> rects;
    Rect moving;
    int move_dx = 2;
};

void fill_rect(Plane& p, int x0, int y0, int rw, int rh, uint8_t val) {
    int x1 = std::min(x0 + rw, p.width), y1 = std::min(y0 + rh, p.height);
    for (int y = std::max(0, y0); y < y1; ++y)
        for (int x = std::max(0, x0); x < x1; ++x) p.set(x, y, val);
}

std::vector<Sequence> synth_screen(int n_views, int w, int h, int n_frames, int disparity_qpel,
                                   uint64_t seed) {
    const int center = (n_views - 1) / 2;
    const int d_px = (disparity_qpel + (disparity_qpel >= 0 ? 2 : -2)) / 4;  // nearest int
    int max_shift = 0;
    for (int k = 0; k < n_views; ++k)
        max_shift = std::max(max_shift, std::abs((k - center) * d_px));
    const int margin = (max_shift + 9) / 2 * 2;
    const int mw = w + 2 * margin, mh = h;

    Rng r(mix_seed(seed, 3, 0));
    ScreenScene scene;
    const uint8_t yv[4] = {64, 96, 144, 176};
    const uint8_t uv[4] = {96, 160, 112, 144};
    const uint8_t vv[4] = {144, 104, 168, 120};
    for (int i = 0; i < 3; ++i) {
        ScreenScene::Rect rc;
        rc.x = 32 * r.uniform(0, std::max(0, mw / 32 - 2));
        rc.y = 16 * r.uniform(0, std::max(0, mh / 16 - 2));
        rc.w = 32 * r.uniform(1, 2);
        rc.h = 16 * r.uniform(1, 2);
        int c = r.uniform(0, 3);
        rc.y_val = yv[c];
        rc.u_val = uv[c];
        rc.v_val = vv[c];
        scene.rects.push_back(rc);
    }
    scene.moving = {r.uniform(0, std::max(0, mw - 32)), 8 * r.uniform(0, std::max(0, mh / 8 - 3)),
                    24, 16, 180, 88, 152};

    // Glyph patterns per 32px cell row; identical across a row, so the
    // content is horizontally periodic with period 32.
    std::vector<uint16_t> row_pattern(size_t(std::max(1, mh / 32)));
    for (size_t i = 0; i < row_pattern.size(); ++i)
        row_pattern[i] = uint16_t(mix_seed(seed, 4, i) & 0xffff);

    std::vector<Sequence> out;
    out.resize(size_t(n_views));
    for (int t = 0; t < n_frames; ++t) {
        Plane my(mw, mh, 235), mu(mw / 2, mh / 2, 120), mv(mw / 2, mh / 2, 136);
        for (int cr = 0; cr < mh / 32; ++cr) {
            uint16_t bits = row_pattern[size_t(cr)];
            for (int cx = 0; cx < (mw + 31) / 32; ++cx)
                for (int b = 0; b < 16; ++b)
                    if (bits & (1u << b))
                        fill_rect(my, cx * 32 + 8 + (b % 4) * 4, cr * 32 + 8 + (b / 4) * 4, 4, 4, 16);
        }
        for (const auto& rc : scene.rects) {
            fill_rect(my, rc.x, rc.y, rc.w, rc.h, rc.y_val);
            fill_rect(mu, rc.x / 2, rc.y / 2, rc.w / 2, rc.h / 2, rc.u_val);
            fill_rect(mv, rc.x / 2, rc.y / 2, rc.w / 2, rc.h / 2, rc.v_val);
        }
        int mx = scene.moving.x + scene.move_dx * t;
        mx = std::clamp(mx, 0, mw - scene.moving.w);
        fill_rect(my, mx, scene.moving.y, scene.moving.w, scene.moving.h, scene.moving.y_val);
        fill_rect(mu, mx / 2, scene.moving.y / 2, scene.moving.w / 2, scene.moving.h / 2,
                  scene.moving.u_val);
        fill_rect(mv, mx / 2, scene.moving.y / 2, scene.moving.w / 2, scene.moving.h / 2,
                  scene.moving.v_val);

        for (int k = 0; k < n_views; ++k) {
            int s = (k - center) * d_px;
            Frame f(w, h);
            for (int y = 0; y < h; ++y)
                std::memcpy(f.y.row(y), my.row(y) + margin + s, size_t(w));
            for (int y = 0; y < h / 2; ++y) {
                std::memcpy(f.u.row(y), mu.row(y) + (margin + s) / 2, size_t(w / 2));
                std::memcpy(f.v.row(y), mv.row(y) + (margin + s) / 2, size_t(w / 2));
            }
            out[size_t(k)].frames.push_back(std::move(f));
        }
    }
    return out;
}

}  // namespace

std::vector<Sequence> synth_multiview(SynthKind kind, int n_views, int view_w, int view_h,
                                      int n_frames, int disparity_qpel, int noise_amp,
                                      uint64_t seed) {
    if (n_views < 1 || n_views > 8) throw std::invalid_argument("synth: views out of [1, 8]");
    if (view_w <= 0 || view_h <= 0 || view_w % 2 || view_h % 2)
        throw std::invalid_argument("synth: dimensions must be positive and even");
    if (n_frames < 1) throw std::invalid_argument("synth: need at least one frame");
    if (kind == SynthKind::CameraLike)
        return synth_camera(n_views, view_w, view_h, n_frames, disparity_qpel, noise_amp, seed);
    return synth_screen(n_views, view_w, view_h, n_frames, disparity_qpel, seed);
}

BenchMode bench_mode_simulcast() {
    BenchMode m{"simulcast", {}};
    m.config.mode = CodingMode::Simulcast;
    m.config.quarter_pel_ibc = false;
    m.config.enable_ibc = false;
    return m;
}

BenchMode bench_mode_scc() {
    BenchMode m{"scc", {}};
    m.config.mode = CodingMode::SccRaster;
    m.config.quarter_pel_ibc = false;
    return m;
}

BenchMode bench_mode_scc_qpel() {
    BenchMode m = bench_mode_scc();
    m.name = "scc-qpel";
    m.config.quarter_pel_ibc = true;
    return m;
}

BenchMode bench_mode_ascc() {
    BenchMode m{"ascc", {}};
    m.config.mode = CodingMode::AsccTiles;
    return m;
}

BenchMode bench_mode_ascc_fullpel() {
    BenchMode m = bench_mode_ascc();
    m.name = "ascc-fullpel";
    m.config.quarter_pel_ibc = false;
    return m;
}

BenchMode bench_mode_by_name(const std::string& name) {
    if (name == "simulcast") return bench_mode_simulcast();
    if (name == "scc") return bench_mode_scc();
    if (name == "scc-qpel") return bench_mode_scc_qpel();
    if (name == "ascc") return bench_mode_ascc();
    if (name == "ascc-fullpel") return bench_mode_ascc_fullpel();
    throw std::invalid_argument("unknown bench mode: " + name);
}

namespace {

struct CellKey {
    std::string seq, scen, mode;
    int qp;
};

double mean_luma_psnr(const std::vector<Sequence>& pristine, const std::vector<Sequence>& decoded,
                      bool* infinite) {
    double sum = 0;
    int count = 0;
    for (size_t v = 0; v < pristine.size(); ++v) {
        for (size_t f = 0; f < pristine[v].frames.size(); ++f) {
            PsnrValue p = psnr(pristine[v].frames[f].y, decoded[v].frames[f].y);
            if (p.infinite) {
                *infinite = true;
                return 0;
            }
            sum += p.db;
            ++count;
        }
    }
    *infinite = false;
    return sum / count;
}

}  // namespace

BenchResult run_bench(const std::vector<BenchSequence>& sequences,
                      const std::vector<BenchMode>& modes, const std::vector<int>& qps,
                      const std::vector<GopKind>& scenarios,
                      const std::vector<std::pair<std::string, std::string>>* pairs) {
    BenchResult result;
    for (const BenchSequence& seq : sequences) {
        for (GopKind scen : scenarios) {
            for (const BenchMode& mode : modes) {
                for (int qp : qps) {
                    RawCell cell;
                    cell.sequence = seq.name;
                    cell.mode = mode.name;
                    cell.scenario = scenario_name(scen);
                    cell.qp = qp;
                    try {
                        CodecConfig cfg = mode.config;
                        cfg.base_qp = qp;
                        cfg.gop = scen;
                        auto t0 = std::chrono::steady_clock::now();
                        EncodeResult enc = encode_sequence(seq.views, cfg);
                        cell.seconds =
                            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                                .count();
                        DecodeResult dec = decode_sequence(enc.bytes);
                        if (!dec.error.empty()) throw std::runtime_error("decode: " + dec.error);
                        for (size_t v = 0; v < seq.views.size(); ++v)
                            if (dec.views[v].frames != enc.recon_views[v].frames)
                                throw std::runtime_error("closed-loop mismatch, view " +
                                                         std::to_string(v));
                        double frames = double(seq.views[0].frames.size());
                        cell.kbps = double(enc.bytes.size()) * 8.0 * seq.views[0].fps / frames / 1000.0;
                        bool inf = false;
                        cell.psnr_y = mean_luma_psnr(seq.views, dec.views, &inf);
                        if (inf) throw std::runtime_error("infinite PSNR point");
                    } catch (const std::exception& e) {
                        cell.error = e.what();
                    }
                    result.raw.push_back(std::move(cell));
                }
            }
        }
    }
    std::sort(result.raw.begin(), result.raw.end(), [](const RawCell& a, const RawCell& b) {
        return std::tie(a.sequence, a.scenario, a.mode, a.qp) <
               std::tie(b.sequence, b.scenario, b.mode, b.qp);
    });

    // Anchor/test pairs: explicit list, or simulcast against the rest plus
    // the quarter-pel comparison when both raster modes are present.
    std::vector<std::pair<std::string, std::string>> pl;
    if (pairs) {
        pl = *pairs;
    } else {
        bool have_simulcast = false, have_scc = false, have_scc_q = false;
        for (const BenchMode& m : modes) {
            have_simulcast |= m.name == "simulcast";
            have_scc |= m.name == "scc";
            have_scc_q |= m.name == "scc-qpel";
        }
        if (have_simulcast)
            for (const BenchMode& m : modes)
                if (m.name != "simulcast") pl.emplace_back("simulcast", m.name);
        if (have_scc && have_scc_q) pl.emplace_back("scc", "scc-qpel");
    }

    auto find_curve = [&](const std::string& seq, const std::string& scen, const std::string& mode,
                          RDCurve* curve, double* total_sec) -> std::string {
        int idx = 0;
        *total_sec = 0;
        for (int qp : qps) {
            auto it = std::find_if(result.raw.begin(), result.raw.end(), [&](const RawCell& c) {
                return c.sequence == seq && c.scenario == scen && c.mode == mode && c.qp == qp;
            });
            if (it == result.raw.end()) return "missing cell qp " + std::to_string(qp);
            if (!it->error.empty()) return "cell qp " + std::to_string(qp) + ": " + it->error;
            if (idx >= 4) return "QP ladder must have 4 points";
            curve->points[size_t(idx++)] = {it->kbps, it->psnr_y};
            *total_sec += it->seconds;
        }
        if (idx != 4) return "QP ladder must have 4 points";
        return "";
    };

    if (int(qps.size()) == 4) {
        for (const BenchSequence& seq : sequences) {
            for (GopKind scen : scenarios) {
                for (const auto& [anchor, test] : pl) {
                    BdCell cell;
                    cell.sequence = seq.name;
                    cell.scenario = scenario_name(scen);
                    cell.anchor = anchor;
                    cell.test = test;
                    RDCurve ca, ct;
                    double sa = 0, st = 0;
                    std::string e1 = find_curve(seq.name, cell.scenario, anchor, &ca, &sa);
                    std::string e2 = find_curve(seq.name, cell.scenario, test, &ct, &st);
                    if (!e1.empty() || !e2.empty()) {
                        cell.error = !e1.empty() ? anchor + ": " + e1 : test + ": " + e2;
                    } else {
                        try {
                            cell.bd_rate_pct = bd_rate(ca, ct);
                            cell.time_delta_pct = sa > 0 ? (st - sa) / sa * 100.0 : 0.0;
                        } catch (const std::exception& e) {
                            cell.error = e.what();
                        }
                    }
                    result.bd.push_back(std::move(cell));
                }
            }
        }
        std::sort(result.bd.begin(), result.bd.end(), [](const BdCell& a, const BdCell& b) {
            return std::tie(a.sequence, a.scenario, a.anchor, a.test) <
                   std::tie(b.sequence, b.scenario, b.anchor, b.test);
        });
    }
    return result;
}

namespace {

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

}  // namespace

std::string emit_report_csv(const BenchResult& result) {
    std::ostringstream os;
    os << "sequence,mode,scenario,qp,kbps,psnr_y,seconds,error\n";
    for (const RawCell& c : result.raw) {
        os << c.sequence << ',' << c.mode << ',' << c.scenario << ',' << c.qp << ','
           << fmt("%.2f", c.kbps) << ',' << fmt("%.4f", c.psnr_y) << ','
           << fmt("%.3f", c.seconds) << ',' << c.error << '\n';
    }
    os << "\nsequence,scenario,anchor,test,bd_rate_pct,time_delta_pct,error\n";
    for (const BdCell& c : result.bd) {
        os << c.sequence << ',' << c.scenario << ',' << c.anchor << ',' << c.test << ','
           << fmt("%.2f", c.bd_rate_pct) << ',' << fmt("%.2f", c.time_delta_pct) << ',' << c.error
           << '\n';
    }
    return os.str();
}

std::string emit_report_json(const BenchResult& result) {
    nlohmann::json j;
    j["raw"] = nlohmann::json::array();
    for (const RawCell& c : result.raw) {
        nlohmann::json r;
        r["sequence"] = c.sequence;
        r["mode"] = c.mode;
        r["scenario"] = c.scenario;
        r["qp"] = c.qp;
        r["kbps"] = std::stod(fmt("%.2f", c.kbps));
        r["psnr_y"] = std::stod(fmt("%.4f", c.psnr_y));
        r["seconds"] = std::stod(fmt("%.3f", c.seconds));
        r["error"] = c.error;
        j["raw"].push_back(std::move(r));
    }
    j["bd"] = nlohmann::json::array();
    for (const BdCell& c : result.bd) {
        nlohmann::json r;
        r["sequence"] = c.sequence;
        r["scenario"] = c.scenario;
        r["anchor"] = c.anchor;
        r["test"] = c.test;
        r["bd_rate_pct"] = std::stod(fmt("%.2f", c.bd_rate_pct));
        r["time_delta_pct"] = std::stod(fmt("%.2f", c.time_delta_pct));
        r["error"] = c.error;
        j["bd"].push_back(std::move(r));
    }
    return j.dump(2) + "\n";
}

std::string emit_rd_points(const RDCurve& curve) {
    std::ostringstream os;
    for (const RDPoint& p : curve.points)
        os << fmt("%.2f", p.kbps) << ' ' << fmt("%.4f", p.psnr_y) << '\n';
    return os.str();
}

RDCurve parse_rd_csv(const std::string& text) {
    RDCurve c;
    std::istringstream is(text);
    std::string line;
    int n = 0;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        for (char& ch : line)
            if (ch == ',') ch = ' ';
        std::istringstream ls(line);
        double kbps, psnr_v;
        if (!(ls >> kbps >> psnr_v)) continue;
        if (n >= 4) throw std::invalid_argument("RD curve must have exactly 4 points");
        c.points[size_t(n++)] = {kbps, psnr_v};
    }
    if (n != 4) throw std::invalid_argument("RD curve must have exactly 4 points");
    return c;
}

}  // namespace mvsc
