#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mvsc/cliutil.hpp"
#include "mvsc/codec.hpp"
#include "mvsc/metrics.hpp"
#include "mvsc/packing.hpp"

using namespace mvsc;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<uint8_t> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void dump(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
}

std::vector<Sequence> load_views(const std::string& views_arg, int w, int h, int max_frames,
                                 double fps) {
    std::vector<Sequence> views;
    for (const std::string& path : split(views_arg, ',')) {
        Sequence s = read_yuv420_file(path, w, h, max_frames);
        s.fps = fps;
        views.push_back(std::move(s));
    }
    if (views.empty()) throw UsageError("--views must name at least one file");
    return views;
}

// Pads every frame to a multiple of 16 when needed, with a note on stderr.
void pad_views_16(std::vector<Sequence>* views, int* w, int* h) {
    int pw = (*w + 15) / 16 * 16, ph = (*h + 15) / 16 * 16;
    if (pw == *w && ph == *h) return;
    std::cerr << "note: padding views from " << *w << "x" << *h << " to " << pw << "x" << ph
              << " (16-aligned)\n";
    for (Sequence& s : *views)
        for (Frame& f : s.frames) f = pad_replicate(f, 16);
    *w = pw;
    *h = ph;
}

CodingMode mode_from_name(const std::string& name) {
    if (name == "simulcast") return CodingMode::Simulcast;
    if (name == "scc") return CodingMode::SccRaster;
    if (name == "ascc") return CodingMode::AsccTiles;
    throw UsageError("unknown mode " + name + " (simulcast|scc|ascc)");
}

GopKind gop_from_name(const std::string& name) {
    if (name == "ai") return GopKind::AllIntra;
    if (name == "ippp") return GopKind::Ippp;
    throw UsageError("unknown gop " + name + " (ai|ippp)");
}

void print_encode_summary(const EncodeResult& enc, size_t n_frames, double fps) {
    uint64_t bits = 8 * uint64_t(enc.bytes.size());
    double sec = 0, psnr_sum = 0;
    int finite = 0;
    for (const FrameStats& fs : enc.stats) {
        sec += fs.seconds;
        if (!fs.psnr_y_inf) {
            psnr_sum += fs.psnr_y;
            ++finite;
        }
    }
    double kbps = double(bits) * fps / double(n_frames) / 1000.0;
    std::printf("frames=%zu bits=%llu kbps=%.2f psnr_y=", n_frames,
                (unsigned long long)bits, kbps);
    if (finite)
        std::printf("%.4f", psnr_sum / finite);
    else
        std::printf("inf");
    std::printf(" sec=%.3f\n", sec);
}

int cmd_pack(const std::string& views_arg, const std::string& size, int max_frames,
             const std::string& out) {
    auto [w, h] = parse_size(size);
    auto views = load_views(views_arg, w, h, max_frames, 25.0);
    pad_views_16(&views, &w, &h);
    ViewOrder order = view_packing_order(int(views.size()));
    Sequence packed;
    for (size_t f = 0; f < views[0].frames.size(); ++f) {
        std::vector<Frame> at_f;
        for (const Sequence& s : views) {
            if (f >= s.frames.size()) throw std::runtime_error("views have unequal frame counts");
            at_f.push_back(s.frames[f]);
        }
        packed.frames.push_back(pack(at_f, order).first);
    }
    write_yuv420_file(packed, out);
    std::printf("packed %zu frame(s) %dx%d, order", packed.frames.size(),
                int(views.size()) * w, h);
    for (int v : order.permutation) std::printf(" %d", v);
    std::printf("\n");
    return 0;
}

int cmd_unpack(const std::string& in, const std::string& size, int n_views,
               const std::string& prefix) {
    auto [w, h] = parse_size(size);
    if (n_views < 1 || w % n_views) throw UsageError("packed width not divisible by the view count");
    Sequence packed = read_yuv420_file(in, w, h);
    ViewOrder order = view_packing_order(n_views);
    PackedLayout layout{n_views, w / n_views, h};
    std::vector<Sequence> views;
    views.resize(size_t(n_views));
    for (const Frame& f : packed.frames) {
        std::vector<Frame> u = unpack(f, layout, order);
        for (int v = 0; v < n_views; ++v)
            views[size_t(v)].frames.push_back(std::move(u[size_t(v)]));
    }
    for (int v = 0; v < n_views; ++v)
        write_yuv420_file(views[size_t(v)], prefix + std::to_string(v) + ".yuv");
    std::printf("unpacked %zu frame(s) into %d view(s) %dx%d\n", packed.frames.size(), n_views,
                w / n_views, h);
    return 0;
}

struct EncodeFlags {
    std::string views, size, mode = "ascc", dqp, gop = "ai", out;
    int qp = 32, intra_period = 8, frames = -1, search_h = -1, search_v = -1;
    double fps = 25.0, lambda_scale = 1.0;
    bool quarter_pel = false, no_quarter_pel = false;
    bool no_sao = false, no_deblock = false, no_border_ext = false, no_per_tile_filter = false;
    bool no_collocated_start = false;
};

int cmd_encode(const EncodeFlags& ef) {
    auto [w, h] = parse_size(ef.size);
    auto views = load_views(ef.views, w, h, ef.frames, ef.fps);
    pad_views_16(&views, &w, &h);

    CodecConfig cfg;
    cfg.mode = mode_from_name(ef.mode);
    cfg.base_qp = ef.qp;
    if (!ef.dqp.empty()) cfg.delta_qp = parse_int_list(ef.dqp);
    cfg.gop = gop_from_name(ef.gop);
    cfg.intra_period = ef.intra_period;
    cfg.search_range_h = ef.search_h;
    cfg.search_range_v = ef.search_v;
    cfg.lambda_scale = ef.lambda_scale;
    // quarter-pel defaults to on for ascc only; explicit flags override
    cfg.quarter_pel_ibc = cfg.mode == CodingMode::AsccTiles;
    if (ef.quarter_pel) cfg.quarter_pel_ibc = true;
    if (ef.no_quarter_pel) cfg.quarter_pel_ibc = false;
    cfg.sao = !ef.no_sao;
    cfg.deblock = !ef.no_deblock;
    cfg.border_extension = !ef.no_border_ext;
    cfg.per_tile_filtering = !ef.no_per_tile_filter;
    cfg.collocated_start = !ef.no_collocated_start;

    EncodeResult enc = encode_sequence(views, cfg);
    std::ofstream out(ef.out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + ef.out + " for writing");
    out.write(reinterpret_cast<const char*>(enc.bytes.data()), std::streamsize(enc.bytes.size()));
    print_encode_summary(enc, views[0].frames.size(), ef.fps);
    return 0;
}

int cmd_decode(const std::string& in, const std::string& prefix) {
    DecodeResult dec = decode_sequence(slurp(in));
    for (size_t v = 0; v < dec.views.size(); ++v)
        write_yuv420_file(dec.views[v], prefix + std::to_string(v) + ".yuv");
    std::printf("mode=%s views=%d size=%dx%d frames=%d\n",
                coding_mode_name(dec.header.coding_mode), dec.header.n_views,
                dec.header.view_width, dec.header.view_height, dec.header.frame_count);
    if (!dec.error.empty()) {
        std::cerr << "error: " << dec.error << " (decoded frames were written)\n";
        return 2;
    }
    return 0;
}

int cmd_psnr(const std::string& ref, const std::string& test, const std::string& size,
             int max_frames) {
    auto [w, h] = parse_size(size);
    Sequence a = read_yuv420_file(ref, w, h, max_frames);
    Sequence b = read_yuv420_file(test, w, h, max_frames);
    if (a.frames.size() != b.frames.size())
        throw std::runtime_error("sequences have different frame counts");
    if (a.frames.empty()) throw std::runtime_error("no frames to compare");

    auto print_val = [](PsnrValue v) {
        if (v.infinite)
            std::printf("inf");
        else
            std::printf("%.4f", v.db);
    };
    double sum = 0;
    int finite = 0;
    for (size_t f = 0; f < a.frames.size(); ++f) {
        PsnrValue y = psnr(a.frames[f].y, b.frames[f].y);
        PsnrValue u = psnr(a.frames[f].u, b.frames[f].u);
        PsnrValue v = psnr(a.frames[f].v, b.frames[f].v);
        std::printf("frame %zu: psnr_y=", f);
        print_val(y);
        std::printf(" psnr_u=");
        print_val(u);
        std::printf(" psnr_v=");
        print_val(v);
        std::printf("\n");
        if (!y.infinite) {
            sum += y.db;
            ++finite;
        }
    }
    std::printf("mean psnr_y=");
    if (finite == int(a.frames.size()))
        std::printf("%.4f\n", sum / finite);
    else
        std::printf("inf\n");
    return 0;
}

int cmd_bdrate(const std::string& anchor, const std::string& test) {
    std::ifstream fa(anchor), ft(test);
    if (!fa) throw std::runtime_error("cannot open " + anchor);
    if (!ft) throw std::runtime_error("cannot open " + test);
    std::stringstream sa, st;
    sa << fa.rdbuf();
    st << ft.rdbuf();
    double bd = bd_rate(parse_rd_csv(sa.str()), parse_rd_csv(st.str()));
    std::printf("%.2f\n", bd);
    return 0;
}

int cmd_synth(const std::string& kind, int n_views, const std::string& size, int frames,
              int disparity, int noise, uint64_t seed, double fps, const std::string& prefix) {
    auto [w, h] = parse_size(size);
    SynthKind k;
    if (kind == "camera")
        k = SynthKind::CameraLike;
    else if (kind == "screen")
        k = SynthKind::ScreenLike;
    else
        throw UsageError("unknown kind " + kind + " (camera|screen)");
    auto views = synth_multiview(k, n_views, w, h, frames, disparity, noise, seed);
    for (int v = 0; v < n_views; ++v) {
        views[size_t(v)].fps = fps;
        write_yuv420_file(views[size_t(v)], prefix + std::to_string(v) + ".yuv");
    }
    std::printf("wrote %d view(s), %d frame(s) %dx%d\n", n_views, frames, w, h);
    return 0;
}

struct BenchFlags {
    std::string kinds = "camera,screen", modes = "simulcast,scc,ascc";
    std::string scenarios = "ai,ippp", qps = "25,30,35,40";
    std::string size = "96x64";
    int views = 3, frames = 4, disparity = 9, noise = 2;
    uint64_t seed = 1;
    double fps = 25.0;
    std::vector<std::string> seqs;  // name:fileA,fileB,...:WxH[:frames]
    std::string csv_out, json_out, rd_dir;
};

int cmd_bench(const BenchFlags& bf) {
    std::vector<BenchSequence> sequences;
    for (const std::string& spec : bf.seqs) {
        auto parts = split(spec, ':');
        if (parts.size() < 3) throw UsageError("--seq must be name:files:WxH[:frames]");
        auto [w, h] = parse_size(parts[2]);
        int frames = parts.size() > 3 ? std::stoi(parts[3]) : -1;
        BenchSequence bs;
        bs.name = parts[0];
        bs.views = load_views(parts[1], w, h, frames, bf.fps);
        int pw = w, ph = h;
        pad_views_16(&bs.views, &pw, &ph);
        sequences.push_back(std::move(bs));
    }
    if (sequences.empty()) {
        auto [w, h] = parse_size(bf.size);
        for (const std::string& kind : split(bf.kinds, ',')) {
            if (kind == "camera") {
                auto v = synth_multiview(SynthKind::CameraLike, bf.views, w, h, bf.frames,
                                         bf.disparity, bf.noise, bf.seed);
                for (auto& s : v) s.fps = bf.fps;
                sequences.push_back({"camera", std::move(v)});
            } else if (kind == "screen") {
                auto v = synth_multiview(SynthKind::ScreenLike, bf.views, w, h, bf.frames,
                                         bf.disparity, 0, bf.seed);
                for (auto& s : v) s.fps = bf.fps;
                sequences.push_back({"screen", std::move(v)});
            } else {
                throw UsageError("unknown kind " + kind + " (camera|screen)");
            }
        }
    }

    std::vector<BenchMode> modes;
    for (const std::string& name : split(bf.modes, ','))
        modes.push_back(bench_mode_by_name(name));
    std::vector<GopKind> scenarios;
    for (const std::string& s : split(bf.scenarios, ',')) scenarios.push_back(gop_from_name(s));
    std::vector<int> qps = parse_int_list(bf.qps);

    BenchResult result = run_bench(sequences, modes, qps, scenarios);
    std::string csv = emit_report_csv(result);
    if (!bf.csv_out.empty())
        dump(bf.csv_out, csv);
    else
        std::fputs(csv.c_str(), stdout);
    if (!bf.json_out.empty()) dump(bf.json_out, emit_report_json(result));

    if (!bf.rd_dir.empty() && qps.size() == 4) {
        std::filesystem::create_directories(bf.rd_dir);
        for (const BenchSequence& seq : sequences) {
            for (GopKind scen : scenarios) {
                for (const BenchMode& m : modes) {
                    RDCurve c;
                    size_t idx = 0;
                    bool ok = true;
                    for (int qp : qps) {
                        auto it = std::find_if(result.raw.begin(), result.raw.end(),
                                               [&](const RawCell& r) {
                                                   return r.sequence == seq.name &&
                                                          r.mode == m.name &&
                                                          r.scenario == scenario_name(scen) &&
                                                          r.qp == qp && r.error.empty();
                                               });
                        if (it == result.raw.end()) {
                            ok = false;
                            break;
                        }
                        c.points[idx++] = {it->kbps, it->psnr_y};
                    }
                    if (ok)
                        dump(bf.rd_dir + "/" + seq.name + "_" + scenario_name(scen) + "_" +
                                 m.name + ".dat",
                             emit_rd_points(c));
                }
            }
        }
    }
    for (const RawCell& c : result.raw)
        if (!c.error.empty()) return 2;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mvsc: frame-compatible multiview codec and benchmark harness"};
    app.require_subcommand(1);

    auto* pack_cmd = app.add_subcommand("pack", "pack per-view YUV files side by side");
    std::string p_views, p_size, p_out;
    int p_frames = -1;
    pack_cmd->add_option("--views", p_views, "comma list of per-view YUV files, left to right")
        ->required();
    pack_cmd->add_option("--size", p_size, "view size WxH")->required();
    pack_cmd->add_option("--frames", p_frames, "frame limit");
    pack_cmd->add_option("--out", p_out, "output packed YUV file")->required();

    auto* unpack_cmd = app.add_subcommand("unpack", "split a packed YUV back into views");
    std::string u_in, u_size, u_prefix;
    int u_views = 0;
    unpack_cmd->add_option("--in", u_in, "packed YUV file")->required();
    unpack_cmd->add_option("--size", u_size, "packed size WxH")->required();
    unpack_cmd->add_option("--views", u_views, "number of views")->required();
    unpack_cmd->add_option("--out-prefix", u_prefix, "output file prefix")->required();

    auto* enc_cmd = app.add_subcommand("encode", "encode views into an MVSC stream");
    EncodeFlags ef;
    enc_cmd->add_option("--views", ef.views, "comma list of per-view YUV files, left to right")
        ->required();
    enc_cmd->add_option("--size", ef.size, "view size WxH")->required();
    enc_cmd->add_option("--mode", ef.mode, "coding mode: simulcast|scc|ascc");
    enc_cmd->add_option("--qp", ef.qp, "base QP [0,51]");
    enc_cmd->add_option("--dqp", ef.dqp, "per-tile delta QP list, e.g. 0,3,3 (ascc)");
    enc_cmd->add_option("--gop", ef.gop, "gop structure: ai|ippp");
    enc_cmd->add_option("--intra-period", ef.intra_period, "I-frame period for ippp");
    enc_cmd->add_option("--frames", ef.frames, "frame limit");
    enc_cmd->add_option("--fps", ef.fps, "frames per second (metadata)");
    enc_cmd->add_flag("--quarter-pel", ef.quarter_pel, "force quarter-pel IBC vectors on");
    enc_cmd->add_flag("--no-quarter-pel", ef.no_quarter_pel, "force full-pel IBC vectors");
    enc_cmd->add_flag("--no-sao", ef.no_sao, "disable SAO");
    enc_cmd->add_flag("--no-deblock", ef.no_deblock, "disable deblocking");
    enc_cmd->add_flag("--no-border-ext", ef.no_border_ext,
                      "disable reference tile border extension");
    enc_cmd->add_flag("--no-per-tile-filter", ef.no_per_tile_filter,
                      "filter per frame instead of per tile");
    enc_cmd->add_flag("--no-collocated-start", ef.no_collocated_start,
                      "IBC search starts at the current block instead of the collocated one");
    enc_cmd->add_option("--search-h", ef.search_h,
                    "horizontal search range (default: 64 for ascc, frame width for scc)");
    enc_cmd->add_option("--search-v", ef.search_v, "vertical search range (default 64)");
    enc_cmd->add_option("--lambda-scale", ef.lambda_scale, "RD lambda scale");
    enc_cmd->add_option("--out", ef.out, "output MVSC file")->required();

    auto* dec_cmd = app.add_subcommand("decode", "decode an MVSC stream to per-view YUV files");
    std::string d_in, d_prefix;
    dec_cmd->add_option("--in", d_in, "MVSC file")->required();
    dec_cmd->add_option("--out-prefix", d_prefix, "output file prefix (camera order)")->required();

    auto* psnr_cmd = app.add_subcommand("psnr", "luma/chroma PSNR between two YUV files");
    std::string q_ref, q_test, q_size;
    int q_frames = -1;
    psnr_cmd->add_option("--ref", q_ref, "reference YUV")->required();
    psnr_cmd->add_option("--test", q_test, "test YUV")->required();
    psnr_cmd->add_option("--size", q_size, "size WxH")->required();
    psnr_cmd->add_option("--frames", q_frames, "frame limit");

    auto* bd_cmd = app.add_subcommand("bdrate", "BD-rate between two 4-point RD curves");
    std::string b_anchor, b_test;
    bd_cmd->add_option("--anchor", b_anchor, "anchor curve CSV (kbps,psnr per line)")->required();
    bd_cmd->add_option("--test", b_test, "test curve CSV")->required();

    auto* syn_cmd = app.add_subcommand("synth", "generate synthetic multiview content");
    std::string s_kind = "camera", s_size, s_prefix;
    int s_views = 3, s_frames = 4, s_disparity = 9, s_noise = 2;
    uint64_t s_seed = 1;
    double s_fps = 25.0;
    syn_cmd->add_option("--kind", s_kind, "content kind: camera|screen");
    syn_cmd->add_option("--views", s_views, "number of views");
    syn_cmd->add_option("--size", s_size, "view size WxH")->required();
    syn_cmd->add_option("--frames", s_frames, "frame count");
    syn_cmd->add_option("--disparity", s_disparity, "inter-view disparity, quarter-pel units");
    syn_cmd->add_option("--noise", s_noise, "sensor noise amplitude (camera kind)");
    syn_cmd->add_option("--seed", s_seed, "generator seed");
    syn_cmd->add_option("--fps", s_fps, "frames per second (metadata)");
    syn_cmd->add_option("--out-prefix", s_prefix, "output file prefix")->required();

    auto* bench_cmd = app.add_subcommand("bench", "RD benchmark over the QP ladder");
    BenchFlags bf;
    bench_cmd->add_option("--seq", bf.seqs, "user sequence name:files:WxH[:frames] (repeatable)");
    bench_cmd->add_option("--kinds", bf.kinds, "synthetic kinds when no --seq: camera,screen");
    bench_cmd->add_option("--views", bf.views, "synthetic view count");
    bench_cmd->add_option("--size", bf.size, "synthetic view size WxH");
    bench_cmd->add_option("--frames", bf.frames, "synthetic frame count");
    bench_cmd->add_option("--disparity", bf.disparity, "synthetic disparity, quarter-pel units");
    bench_cmd->add_option("--noise", bf.noise, "synthetic camera noise amplitude");
    bench_cmd->add_option("--seed", bf.seed, "synthetic seed");
    bench_cmd->add_option("--fps", bf.fps, "frames per second for bitrate normalization");
    bench_cmd->add_option("--modes", bf.modes, "modes: simulcast,scc,scc-qpel,ascc,ascc-fullpel");
    bench_cmd->add_option("--scenarios", bf.scenarios, "scenarios: ai,ippp");
    bench_cmd->add_option("--qps", bf.qps, "QP ladder (4 values for BD rows)");
    bench_cmd->add_option("--csv", bf.csv_out, "write the CSV report here (default stdout)");
    bench_cmd->add_option("--json", bf.json_out, "also write a JSON report");
    bench_cmd->add_option("--rd-dir", bf.rd_dir,
                          "dump gnuplot-ready RD curves into this directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*pack_cmd) return cmd_pack(p_views, p_size, p_frames, p_out);
        if (*unpack_cmd) return cmd_unpack(u_in, u_size, u_views, u_prefix);
        if (*enc_cmd) return cmd_encode(ef);
        if (*dec_cmd) return cmd_decode(d_in, d_prefix);
        if (*psnr_cmd) return cmd_psnr(q_ref, q_test, q_size, q_frames);
        if (*bd_cmd) return cmd_bdrate(b_anchor, b_test);
        if (*syn_cmd)
            return cmd_synth(s_kind, s_views, s_size, s_frames, s_disparity, s_noise, s_seed,
                             s_fps, s_prefix);
        if (*bench_cmd) return cmd_bench(bf);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
