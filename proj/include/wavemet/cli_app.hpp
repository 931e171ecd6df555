#pragma once

// Command-line surface. Every subcommand writes its outputs plus a
// RunManifest (manifest.json) into a fresh output directory; re-running a
// manifest on the same tool version reproduces the outputs byte-exactly.
// Exit codes: 0 ok, 2 validation error, 3 numerical failure, 4 I/O error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "wavemet/balanced.hpp"
#include "wavemet/cmrr.hpp"
#include "wavemet/errors.hpp"
#include "wavemet/interleave.hpp"
#include "wavemet/io.hpp"
#include "wavemet/jitter.hpp"
#include "wavemet/metrics.hpp"
#include "wavemet/modulation.hpp"
#include "wavemet/noise.hpp"
#include "wavemet/prbs.hpp"
#include "wavemet/pulse.hpp"
#include "wavemet/transform.hpp"
#include "wavemet/version.hpp"
#include "wavemet/wavesplit.hpp"

namespace wavemet::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace detail {

inline std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot digest '" + path + "'");
    std::uint64_t h = 0xCBF29CE484222325ull;  // FNV-1a
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001B3ull;
        }
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

inline std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        if (cell.empty()) continue;
        out.push_back(std::stod(cell));
    }
    if (out.empty()) throw validation_error("empty numeric list '" + text + "'");
    return out;
}

}  // namespace detail

// Collects everything a run produces so the manifest can be written last.
class RunContext {
public:
    RunContext(std::string subcommand, std::vector<std::string> argv)
        : subcommand_(std::move(subcommand)), argv_(std::move(argv)) {}

    void set_out_dir(const std::string& dir, bool force) {
        out_dir_ = dir;
        if (fs::exists(dir)) {
            if (!force) throw io_error("output directory '" + dir + "' exists; pass --force to overwrite");
        } else if (!fs::create_directories(dir)) {
            throw io_error("cannot create output directory '" + dir + "'");
        }
    }
    bool has_out() const { return !out_dir_.empty(); }
    std::string path(const std::string& name) const {
        if (out_dir_.empty()) throw io_error("subcommand requires --out");
        return (fs::path(out_dir_) / name).string();
    }
    void note_input(const std::string& p) { inputs_.push_back(p); }
    void note_output(const std::string& p) { outputs_.push_back(p); }
    void set_seed(std::uint64_t s) { seed_ = s; has_seed_ = true; }
    void set_params(json p) { params_ = std::move(p); }

    void write_manifest() const {
        if (out_dir_.empty()) return;
        json m;
        m["tool"] = kToolName;
        m["version"] = kToolVersion;
        m["subcommand"] = subcommand_;
        m["args"] = argv_;
        m["parameters"] = params_;
        if (has_seed_) m["seed"] = seed_;
        json in = json::object(), out = json::object();
        for (const std::string& p : inputs_) in[p] = detail::file_digest(p);
        for (const std::string& p : outputs_) out[fs::path(p).filename().string()] = detail::file_digest(p);
        m["inputs"] = in;
        m["outputs"] = out;
        std::ofstream f((fs::path(out_dir_) / "manifest.json").string());
        if (!f) throw io_error("cannot write manifest");
        f << m.dump(2) << '\n';
    }

private:
    std::string subcommand_;
    std::vector<std::string> argv_;
    std::string out_dir_;
    std::vector<std::string> inputs_, outputs_;
    json params_ = json::object();
    std::uint64_t seed_ = 0;
    bool has_seed_ = false;
};

int run(const std::vector<std::string>& argv);  // forward, for replay

namespace cmd {

inline RealWaveform load_real(const std::string& path, RunContext& ctx) {
    ctx.note_input(path);
    ParsedWaveformFile f = parse_waveform_file(path);
    if (f.kind != FileKind::real)
        throw validation_error(path + ": expected a real waveform file");
    return f.real;
}

inline int prbs_main(RunContext& ctx, int degree, std::uint32_t state, std::size_t count) {
    PrbsSpec spec{degree, state};
    const std::vector<std::uint8_t> bits = prbs_generate(spec, count);
    ctx.set_params({{"degree", degree}, {"state", state}, {"count", count}});
    if (ctx.has_out()) {
        const std::string p = ctx.path("bits.txt");
        write_bits_file(p, bits);
        ctx.note_output(p);
        ctx.write_manifest();
    } else {
        for (std::size_t i = 0; i < bits.size(); ++i) std::cout << int(bits[i]);
        std::cout << '\n';
    }
    return 0;
}

struct SynthOpts {
    std::string preset = "modulated";
    std::string mod = "qpsk";
    int prbs_degree = 7;
    std::uint32_t prbs_state = 1;
    double rolloff = 0.35;
    int span = 16;
    std::string sps = "4";
    std::string fsym = "28000000000";
    std::int64_t reps = 0;
    double snr_db = kNoNoise;
    std::uint64_t seed = 0;
    bool have_seed = false;
    // balanced pair
    std::string fs = "100000000000";
    std::size_t n_samples = 4096;
    double bandwidth = 40e9;
    double gain = 1.0;
    double delay = 0.0;
    double ripple_amp = 0.0;
    double ripple_freq = 0.0;
};

inline int synth_main(RunContext& ctx, const SynthOpts& o) {
    if (o.preset == "modulated") {
        const ModulationId mod = ModulationId::from_name(o.mod);
        PrbsSpec spec{o.prbs_degree, o.prbs_state};
        const std::uint64_t period = spec.period();
        // whole periods only, padded to a bits-per-symbol multiple
        std::uint64_t nbits = period;
        while (nbits % mod.bits_per_symbol != 0) nbits += period;
        const std::vector<std::uint8_t> bits = prbs_generate(spec, nbits);
        const SymbolFrame frame = map_symbols(bits, mod);
        const Rational sps = parse_rational(o.sps);
        const Rational fsym = parse_rational(o.fsym);
        ComplexWaveform wf = pulse_shape(frame, o.rolloff, o.span, sps, fsym, o.reps);
        if (!(std::isinf(o.snr_db))) {
            if (!o.have_seed) throw validation_error("synth: --snr-db requires --seed");
            wf = add_awgn(wf, o.snr_db, o.seed);
        }
        ctx.set_params({{"preset", o.preset}, {"mod", o.mod}, {"prbs_degree", o.prbs_degree},
                        {"prbs_state", o.prbs_state}, {"rolloff", o.rolloff}, {"span", o.span},
                        {"sps", sps.str()}, {"fsym", fsym.str()}, {"reps", o.reps},
                        {"snr_db", std::isinf(o.snr_db) ? json() : json(o.snr_db)}});
        if (o.have_seed) ctx.set_seed(o.seed);
        const std::string wp = ctx.path("waveform.csv");
        write_complex_waveform(wp, wf, sps * fsym, o.mod);
        ctx.note_output(wp);
        const std::string bp = ctx.path("bits.txt");
        write_bits_file(bp, bits);
        ctx.note_output(bp);
    } else if (o.preset == "balanced-pair") {
        const Rational fsr = parse_rational(o.fs);
        const double dt = fsr.inverse().value();
        RealWaveform stimulus{std::vector<double>(o.n_samples, 0.0), dt, 0.0};
        stimulus.samples[0] = 1.0;
        const RealWaveform h = photodiode_response(o.bandwidth, dt, o.n_samples);
        MismatchSpec mm{o.gain, o.delay, o.ripple_amp, o.ripple_freq};
        const auto [vp, vn] = synth_balanced_pair(stimulus, h, mm);
        ctx.set_params({{"preset", o.preset}, {"fs", fsr.str()}, {"n", o.n_samples},
                        {"bandwidth_hz", o.bandwidth}, {"gain", o.gain}, {"delay_s", o.delay},
                        {"ripple_amp", o.ripple_amp}, {"ripple_freq", o.ripple_freq}});
        const std::string pp = ctx.path("vp.csv"), np = ctx.path("vn.csv");
        write_real_waveform(pp, vp, fsr);
        write_real_waveform(np, vn, fsr);
        ctx.note_output(pp);
        ctx.note_output(np);
    } else {
        throw validation_error("synth: unknown preset '" + o.preset + "'");
    }
    ctx.write_manifest();
    return 0;
}

inline int cmrr_main(RunContext& ctx, const std::string& vp_path, const std::string& vn_path,
                     double band_lo, double band_hi, double tau_window) {
    const RealWaveform vp = load_real(vp_path, ctx);
    const RealWaveform vn = load_real(vn_path, ctx);
    if (vp.size() != vn.size())
        throw validation_error("cmrr: input records differ in length (grid mismatch)");
    Band band = default_band(vp.dt);
    if (band_lo > 0.0) band.f_lo = band_lo;
    if (band_hi > 0.0) band.f_hi = band_hi;
    const CmrrReport rep = cmrr_report(vp, vn, band, tau_window);

    ctx.set_params({{"vp", vp_path}, {"vn", vn_path}, {"band_lo_hz", band.f_lo},
                    {"band_hi_hz", band.f_hi}, {"tau_window_s", tau_window}});
    const std::string tp = ctx.path("cmrr_trace.csv");
    {
        std::ofstream f(tp);
        f << "freq_hz,cmrr_db,rejection_db,floor_flag\n";
        for (std::size_t i = 0; i < rep.trace.freqs.size(); ++i)
            f << wavemet::detail::fmt_double(rep.trace.freqs[i]) << ','
              << wavemet::detail::fmt_double(rep.trace.cmrr_db[i]) << ','
              << wavemet::detail::fmt_double(rep.trace.rejection_db[i]) << ','
              << int(rep.trace.floor_mask[i]) << '\n';
        if (!f) throw io_error("write failed for '" + tp + "'");
    }
    ctx.note_output(tp);
    json summary = {{"alpha", rep.params.alpha},
                    {"tau_s", rep.params.tau},
                    {"residual", rep.params.residual},
                    {"boundary_warning", rep.params.boundary_warning},
                    {"min_rejection_db", rep.summary.min_rejection_db},
                    {"median_rejection_db", rep.summary.median_rejection_db},
                    {"alpha_dc", rep.summary.alpha_dc}};
    const std::string sp = ctx.path("summary.json");
    std::ofstream(sp) << summary.dump(2) << '\n';
    ctx.note_output(sp);
    ctx.write_manifest();
    std::cout << "alpha=" << rep.params.alpha << " tau_s=" << rep.params.tau
              << " min_rejection_db=" << rep.summary.min_rejection_db << '\n';
    return 0;
}

inline json plan_to_json(const InterleavePlan& plan) {
    json j = {{"p", plan.ratio.p},
              {"q", plan.ratio.q},
              {"pattern_len", plan.pattern_len},
              {"required_samples", plan.required_samples},
              {"covered_repetitions", plan.covered_repetitions},
              {"effective_rate_hz", plan.effective_rate.str()},
              {"out_dt_s", plan.out_dt.str()},
              {"degenerate", plan.degenerate}};
    if (plan.positions.size() <= 10000) j["positions"] = plan.positions;  // regenerable otherwise
    return j;
}

inline int interleave_main(RunContext& ctx, const std::string& fs, const std::string& fsym,
                           std::int64_t pattern_len, bool plan_only, const std::string& input,
                           const std::string& mode_name) {
    const Rational f_scope = parse_rational(fs);
    const Rational f_sym = parse_rational(fsym);
    const InterleavePlan plan = interleave_plan(f_scope, f_sym, pattern_len);
    std::cout << "p=" << plan.ratio.p << " q=" << plan.ratio.q
              << " required_samples=" << plan.required_samples
              << " effective_rate=" << plan.effective_rate.str()
              << " points_per_symbol=" << plan.ratio.p << "/" << plan.ratio.q;
    if (plan.degenerate) std::cout << " (degenerate: synchronous sampling)";
    std::cout << '\n';

    ctx.set_params({{"fs", f_scope.str()}, {"fsym", f_sym.str()}, {"pattern_len", pattern_len},
                    {"plan_only", plan_only}, {"mode", mode_name}});
    if (!ctx.has_out()) return 0;
    const std::string pp = ctx.path("plan.json");
    std::ofstream(pp) << plan_to_json(plan).dump(2) << '\n';
    ctx.note_output(pp);

    if (!plan_only) {
        if (input.empty()) throw validation_error("interleave: --input required unless --plan-only");
        ctx.note_input(input);
        const ReconstructMode mode =
            (mode_name == "average") ? ReconstructMode::average : ReconstructMode::strict;
        ParsedWaveformFile f = parse_waveform_file(input);
        const Rational out_fs = plan.effective_rate;
        const std::string rp = ctx.path("recon.csv");
        if (f.kind == FileKind::real) {
            write_real_waveform(rp, interleave_reconstruct(f.real.samples, plan, mode), out_fs);
        } else if (f.kind == FileKind::complex_) {
            write_complex_waveform(rp, interleave_reconstruct(f.complex_wf.samples, plan, mode),
                                   out_fs);
        } else {
            throw validation_error("interleave: input must be a time record");
        }
        ctx.note_output(rp);
    }
    ctx.write_manifest();
    return 0;
}

inline int jitter_main(RunContext& ctx, const std::vector<std::string>& signal_paths,
                       const std::vector<std::string>& ref_paths, double f_ref) {
    std::vector<RealWaveform> signals, refs;
    for (const std::string& p : signal_paths) signals.push_back(load_real(p, ctx));
    const std::vector<std::string>& rp = ref_paths.empty() ? signal_paths : ref_paths;
    if (ref_paths.empty()) {
        refs = signals;
    } else {
        for (const std::string& p : ref_paths) refs.push_back(load_real(p, ctx));
    }
    if (refs.size() != signals.size())
        throw validation_error("jitter-comp: reference record count must match signal count");
    const JitterEstimate est = iq_jitter_estimate(refs, f_ref);
    const RealWaveform comp = iq_jitter_compensate(signals, est);

    ctx.set_params({{"signals", signal_paths}, {"references", rp}, {"f_ref_hz", f_ref}});
    const std::string cp = ctx.path("compensated.csv");
    // dt is exact only if inputs were; write the rate back as a best-effort integer
    const Rational fs(static_cast<std::int64_t>(std::llround(1.0 / comp.dt)));
    write_real_waveform(cp, comp, fs);
    ctx.note_output(cp);
    json ej = {{"f_ref_hz", est.f_ref},
               {"ambiguity_range_s", est.ambiguity_range},
               {"per_record_dt_s", est.per_record_dt},
               {"near_boundary", est.near_boundary}};
    const std::string ep = ctx.path("estimates.json");
    std::ofstream(ep) << ej.dump(2) << '\n';
    ctx.note_output(ep);
    ctx.write_manifest();
    return 0;
}

inline SymbolFrame load_frame(const std::string& path, const std::string& mod_override,
                              RunContext& ctx) {
    ctx.note_input(path);
    ParsedWaveformFile f = parse_waveform_file(path);
    if (f.kind != FileKind::complex_)
        throw validation_error(path + ": expected a complex record of constellation points");
    SymbolFrame frame;
    frame.symbols = f.complex_wf.samples;
    const std::string mod = mod_override.empty() ? f.mod_name : mod_override;
    if (!mod.empty()) frame.mod = ModulationId::from_name(mod);
    return frame;
}

inline int evm_main(RunContext& ctx, const std::string& received_path,
                    const std::string& reference_path, const std::string& mode_name,
                    const std::string& norm_name, const std::string& mod_name) {
    const EvmMode mode =
        (mode_name == "decision-directed") ? EvmMode::decision_directed : EvmMode::data_aided;
    const EvmNormalization norm =
        (norm_name == "peak") ? EvmNormalization::peak : EvmNormalization::average;
    const SymbolFrame received = load_frame(received_path, mod_name, ctx);
    SymbolFrame reference;
    const SymbolFrame* ref_ptr = nullptr;
    if (!reference_path.empty()) {
        reference = load_frame(reference_path, mod_name, ctx);
        ref_ptr = &reference;
    }
    const EvmResult e = evm(received, ref_ptr, norm, mode);
    const SnrEstimate snr = snr_from_evm(e);
    json out = {{"evm_rms", e.evm_rms},
                {"evm_percent", e.evm_percent},
                {"mode", mode_name},
                {"normalization", norm_name},
                {"n_symbols", e.n_symbols},
                {"snr_linear", std::isinf(snr.snr_linear) ? json("inf") : json(snr.snr_linear)},
                {"snr_bias_warning", snr.bias_warning}};
    std::cout << out.dump(2) << '\n';
    ctx.set_params({{"received", received_path}, {"reference", reference_path},
                    {"mode", mode_name}, {"normalization", norm_name}});
    if (ctx.has_out()) {
        const std::string p = ctx.path("evm.json");
        std::ofstream(p) << out.dump(2) << '\n';
        ctx.note_output(p);
        ctx.write_manifest();
    }
    return 0;
}

inline int ber_predict_main(RunContext& ctx, double evm_rms, const std::string& mod_name) {
    EvmResult e;
    e.evm_rms = evm_rms;
    e.evm_percent = 100.0 * evm_rms;
    const BerEstimate b = ber_from_evm(e, ModulationId::from_name(mod_name));
    json out = {{"mod", mod_name}, {"evm_rms", evm_rms}, {"ber", b.ber}, {"source", "evm_predicted"}};
    std::cout << out.dump(2) << '\n';
    ctx.set_params({{"evm_rms", evm_rms}, {"mod", mod_name}});
    if (ctx.has_out()) {
        const std::string p = ctx.path("ber.json");
        std::ofstream(p) << out.dump(2) << '\n';
        ctx.note_output(p);
        ctx.write_manifest();
    }
    return 0;
}

inline int ber_count_main(RunContext& ctx, const std::string& decided_path,
                          const std::string& truth_path) {
    ctx.note_input(decided_path);
    ctx.note_input(truth_path);
    const BerEstimate b = count_bit_errors(read_bits_file(decided_path), read_bits_file(truth_path));
    json out = {{"ber", b.ber},        {"n_bits", b.n_bits},       {"n_errors", b.n_errors},
                {"wilson_lo", b.wilson_lo}, {"wilson_hi", b.wilson_hi}, {"source", "counted"}};
    std::cout << out.dump(2) << '\n';
    ctx.set_params({{"decided", decided_path}, {"truth", truth_path}});
    if (ctx.has_out()) {
        const std::string p = ctx.path("ber.json");
        std::ofstream(p) << out.dump(2) << '\n';
        ctx.note_output(p);
        ctx.write_manifest();
    }
    return 0;
}

struct SweepPoint {
    double snr_db, evm_rms, ber_counted, ber_from_evm, ci_lo, ci_hi;
};

// One Monte-Carlo point of the counted-vs-EVM-predicted BER comparison.
inline SweepPoint ber_sweep_point(const ModulationId& mod, double snr_db, std::size_t n_symbols,
                                  std::uint64_t campaign_seed, std::size_t index) {
    std::mt19937_64 bit_rng(derive_seed(campaign_seed, 2 * index));
    std::vector<std::uint8_t> bits(n_symbols * mod.bits_per_symbol);
    for (std::uint8_t& b : bits) b = static_cast<std::uint8_t>(bit_rng() & 1);
    const SymbolFrame clean = map_symbols(bits, mod);
    const SymbolFrame noisy = add_awgn(clean, snr_db, derive_seed(campaign_seed, 2 * index + 1));
    const EvmResult e = evm(noisy, &clean);
    const BerEstimate predicted = ber_from_evm(e, mod);
    const BerEstimate counted = count_bit_errors(decide_symbols(noisy).bits, bits);
    return SweepPoint{snr_db, e.evm_rms, counted.ber, predicted.ber,
                      counted.wilson_lo, counted.wilson_hi};
}

inline int ber_sweep_main(RunContext& ctx, const std::string& mod_name,
                          const std::string& snr_list, std::size_t n_symbols,
                          std::uint64_t seed) {
    const ModulationId mod = ModulationId::from_name(mod_name);
    const std::vector<double> snrs = detail::parse_double_list(snr_list);
    std::vector<SweepPoint> points;
    for (std::size_t i = 0; i < snrs.size(); ++i)
        points.push_back(ber_sweep_point(mod, snrs[i], n_symbols, seed, i));

    ctx.set_seed(seed);
    ctx.set_params({{"mod", mod_name}, {"snr_db", snr_list}, {"symbols", n_symbols}});
    const std::string p = ctx.path("sweep.csv");
    {
        std::ofstream f(p);
        f << "snr_db,evm_rms,ber_counted,ber_from_evm,ci_lo,ci_hi\n";
        for (const SweepPoint& pt : points)
            f << wavemet::detail::fmt_double(pt.snr_db) << ','
              << wavemet::detail::fmt_double(pt.evm_rms) << ','
              << wavemet::detail::fmt_double(pt.ber_counted) << ','
              << wavemet::detail::fmt_double(pt.ber_from_evm) << ','
              << wavemet::detail::fmt_double(pt.ci_lo) << ','
              << wavemet::detail::fmt_double(pt.ci_hi) << '\n';
        if (!f) throw io_error("write failed for '" + p + "'");
    }
    ctx.note_output(p);
    ctx.write_manifest();
    return 0;
}

inline int wavesplit_main(RunContext& ctx, const std::string& manifest_path,
                          double cond_threshold) {
    ctx.note_input(manifest_path);
    std::ifstream mf(manifest_path);
    if (!mf) throw io_error("cannot open '" + manifest_path + "'");
    json m;
    try {
        mf >> m;
    } catch (const json::exception& e) {
        throw validation_error(manifest_path + ": bad JSON: " + e.what());
    }
    LineMeasurement meas;
    meas.velocity = m.at("velocity").get<double>();
    meas.positions = m.at("positions").get<std::vector<double>>();
    const auto files = m.at("spectra").get<std::vector<std::string>>();
    const fs::path base = fs::path(manifest_path).parent_path();
    Rational df_exact(1);
    for (const std::string& f : files) {
        const std::string full = (base / f).string();
        ctx.note_input(full);
        ParsedWaveformFile pf = parse_waveform_file(full);
        if (pf.kind != FileKind::spectrum)
            throw validation_error(full + ": expected a spectrum file");
        if (meas.spectra.empty()) df_exact = pf.rate;
        meas.spectra.push_back(pf.spectrum);
    }
    const WaveSplitResult res = split_waves(meas, cond_threshold);

    ctx.set_params({{"manifest", manifest_path}, {"cond_threshold", cond_threshold}});
    const std::string fp = ctx.path("forward.csv"), gp = ctx.path("reverse.csv"),
                      cp = ctx.path("condition.csv");
    // NaN rows mark masked bins; write zeros there and rely on condition.csv
    Spectrum fwd = res.forward, rev = res.reverse;
    for (std::size_t k = 0; k < fwd.size(); ++k)
        if (res.singular_mask[k]) { fwd.bins[k] = cplx(0, 0); rev.bins[k] = cplx(0, 0); }
    write_spectrum(fp, fwd, df_exact);
    write_spectrum(gp, rev, df_exact);
    {
        std::ofstream f(cp);
        f << "freq_hz,condition,singular\n";
        for (std::size_t k = 0; k < res.condition.size(); ++k)
            f << wavemet::detail::fmt_double(res.forward.frequency(k)) << ','
              << wavemet::detail::fmt_double(res.condition[k]) << ','
              << int(res.singular_mask[k]) << '\n';
    }
    ctx.note_output(fp);
    ctx.note_output(gp);
    ctx.note_output(cp);
    ctx.write_manifest();
    return 0;
}

inline int replay_main(const std::string& manifest_path, const std::string& out_dir) {
    std::ifstream mf(manifest_path);
    if (!mf) throw io_error("cannot open '" + manifest_path + "'");
    json m;
    mf >> m;
    if (m.value("version", "") != kToolVersion)
        throw validation_error("replay: manifest was written by tool version '" +
                               m.value("version", "?") + "', this is " + kToolVersion);
    std::vector<std::string> args = m.at("args").get<std::vector<std::string>>();
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
        if (args[i] == "--out") args[i + 1] = out_dir;
    args.push_back("--force");
    return run(args);
}

}  // namespace cmd

inline int run_impl(const std::vector<std::string>& argv) {
    CLI::App app{"waveform-metrology toolkit"};
    app.require_subcommand(1);
    bool json_errors = false;
    int threads = 1;
    app.add_flag("--json-errors", json_errors, "machine-readable errors on stderr");
    app.add_option("--threads", threads, "library parallelism bound")->capture_default_str();

    std::string out_dir;
    bool force = false;
    auto add_common = [&](CLI::App* sub, bool out_required) {
        auto* o = sub->add_option("--out", out_dir, "output directory");
        if (out_required) o->required();
        sub->add_flag("--force", force, "overwrite an existing output directory");
    };

    // prbs
    auto* c_prbs = app.add_subcommand("prbs", "generate a PRBS bit stream");
    int degree = 7;
    std::uint32_t state = 1;
    std::size_t count = 127;
    c_prbs->add_option("--degree", degree)->check(CLI::IsMember({7, 9, 15, 23, 31}))->required();
    c_prbs->add_option("--state", state, "nonzero initial register state")->capture_default_str();
    c_prbs->add_option("--count", count)->required();
    add_common(c_prbs, false);

    // synth
    auto* c_synth = app.add_subcommand("synth", "synthesize test waveforms");
    cmd::SynthOpts so;
    c_synth->add_option("--preset", so.preset)->check(CLI::IsMember({"modulated", "balanced-pair"}));
    c_synth->add_option("--mod", so.mod);
    c_synth->add_option("--prbs-degree", so.prbs_degree);
    c_synth->add_option("--prbs-state", so.prbs_state);
    c_synth->add_option("--rolloff", so.rolloff);
    c_synth->add_option("--span", so.span);
    c_synth->add_option("--sps", so.sps, "samples per symbol, integer or num/den");
    c_synth->add_option("--fsym", so.fsym, "symbol rate in Hz, integer or num/den");
    c_synth->add_option("--reps", so.reps, "pattern repetitions (0 = minimal integer grid)");
    c_synth->add_option("--snr-db", so.snr_db, "add AWGN at this SNR (requires --seed)");
    auto* synth_seed = c_synth->add_option("--seed", so.seed);
    c_synth->add_option("--fs", so.fs, "balanced pair: sample rate");
    c_synth->add_option("--n", so.n_samples, "balanced pair: record length");
    c_synth->add_option("--bandwidth", so.bandwidth, "balanced pair: 3 dB bandwidth, Hz");
    c_synth->add_option("--gain", so.gain);
    c_synth->add_option("--delay", so.delay, "negative-arm delay, seconds");
    c_synth->add_option("--ripple-amp", so.ripple_amp);
    c_synth->add_option("--ripple-freq", so.ripple_freq);
    add_common(c_synth, true);

    // cmrr
    auto* c_cmrr = app.add_subcommand("cmrr", "balanced-photodetector CMRR analysis");
    std::string vp_path, vn_path;
    double band_lo = 0.0, band_hi = 0.0, tau_window = 1e-9;
    c_cmrr->add_option("--vp", vp_path)->required();
    c_cmrr->add_option("--vn", vn_path)->required();
    c_cmrr->add_option("--band-lo", band_lo, "Hz (default 0.05 f_Nyquist)");
    c_cmrr->add_option("--band-hi", band_hi, "Hz (default 0.8 f_Nyquist)");
    c_cmrr->add_option("--tau-window", tau_window, "seconds")->capture_default_str();
    add_common(c_cmrr, true);

    // interleave
    auto* c_il = app.add_subcommand("interleave", "equivalent-time interleave plan / reconstruction");
    std::string fs_str, fsym_str, il_input, il_mode = "strict";
    std::int64_t pattern_len = 0;
    bool plan_only = false;
    c_il->add_option("--fs", fs_str, "scope rate, Hz, integer or num/den")->required();
    c_il->add_option("--fsym", fsym_str, "symbol rate, Hz, integer or num/den")->required();
    c_il->add_option("--pattern-len", pattern_len)->required();
    c_il->add_flag("--plan-only", plan_only);
    c_il->add_option("--input", il_input, "acquired record to reconstruct");
    c_il->add_option("--mode", il_mode)->check(CLI::IsMember({"strict", "average"}));
    add_common(c_il, false);

    // jitter-comp
    auto* c_jc = app.add_subcommand("jitter-comp", "I/Q trigger-jitter compensation");
    std::vector<std::string> signal_paths, ref_paths;
    double f_ref = 0.0;
    c_jc->add_option("--signal", signal_paths)->required()->expected(-1);
    c_jc->add_option("--reference", ref_paths)->expected(-1);
    c_jc->add_option("--f-ref", f_ref, "reference frequency, Hz")->required();
    add_common(c_jc, true);

    // evm
    auto* c_evm = app.add_subcommand("evm", "error vector magnitude of a symbol frame");
    std::string rx_path, ref_path, evm_mode = "data-aided", evm_norm = "average", evm_mod;
    c_evm->add_option("--received", rx_path)->required();
    c_evm->add_option("--reference", ref_path);
    c_evm->add_option("--mode", evm_mode)->check(CLI::IsMember({"data-aided", "decision-directed"}));
    c_evm->add_option("--normalization", evm_norm)->check(CLI::IsMember({"average", "peak"}));
    c_evm->add_option("--mod", evm_mod);
    add_common(c_evm, false);

    // ber-predict
    auto* c_bp = app.add_subcommand("ber-predict", "analytic BER from an EVM value");
    double evm_rms = 0.0;
    std::string bp_mod;
    c_bp->add_option("--evm-rms", evm_rms)->required();
    c_bp->add_option("--mod", bp_mod)->required();
    add_common(c_bp, false);

    // ber-count
    auto* c_bc = app.add_subcommand("ber-count", "exact bit-error counting");
    std::string decided_path, truth_path;
    c_bc->add_option("--decided", decided_path)->required();
    c_bc->add_option("--truth", truth_path)->required();
    add_common(c_bc, false);

    // ber-sweep
    auto* c_bs = app.add_subcommand("ber-sweep", "counted vs EVM-predicted BER over SNR");
    std::string bs_mod, bs_snrs;
    std::size_t bs_symbols = 100000;
    std::uint64_t bs_seed = 0;
    c_bs->add_option("--mod", bs_mod)->required();
    c_bs->add_option("--snr-db", bs_snrs, "comma-separated list")->required();
    c_bs->add_option("--symbols", bs_symbols)->capture_default_str();
    c_bs->add_option("--seed", bs_seed)->required();
    add_common(c_bs, true);

    // wavesplit
    auto* c_ws = app.add_subcommand("wavesplit", "forward/reverse travelling-wave separation");
    std::string ws_manifest;
    double cond_threshold = 1e3;
    c_ws->add_option("--manifest", ws_manifest, "JSON: positions, velocity, spectra files")->required();
    c_ws->add_option("--cond-threshold", cond_threshold)->capture_default_str();
    add_common(c_ws, true);

    // replay
    auto* c_rp = app.add_subcommand("replay", "re-execute a run from its manifest");
    std::string rp_manifest, rp_out;
    c_rp->add_option("--manifest", rp_manifest)->required();
    c_rp->add_option("--out", rp_out)->required();

    std::vector<std::string> cli_args(argv.rbegin(), argv.rend());  // CLI11 wants reversed
    try {
        app.parse(cli_args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    auto emit_error = [&](const std::string& what, int code) {
        if (json_errors) {
            std::cerr << json{{"error", what}, {"code", code}}.dump() << '\n';
        } else {
            std::cerr << "error: " << what << '\n';
        }
        return code;
    };

    try {
        CLI::App* sub = app.get_subcommands().front();
        RunContext ctx(sub->get_name(), argv);
        if (!out_dir.empty() && sub != c_rp) ctx.set_out_dir(out_dir, force);
        if (sub == c_prbs) return cmd::prbs_main(ctx, degree, state, count);
        if (sub == c_synth) {
            so.have_seed = synth_seed->count() > 0;
            return cmd::synth_main(ctx, so);
        }
        if (sub == c_cmrr) return cmd::cmrr_main(ctx, vp_path, vn_path, band_lo, band_hi, tau_window);
        if (sub == c_il)
            return cmd::interleave_main(ctx, fs_str, fsym_str, pattern_len, plan_only, il_input, il_mode);
        if (sub == c_jc) return cmd::jitter_main(ctx, signal_paths, ref_paths, f_ref);
        if (sub == c_evm) return cmd::evm_main(ctx, rx_path, ref_path, evm_mode, evm_norm, evm_mod);
        if (sub == c_bp) return cmd::ber_predict_main(ctx, evm_rms, bp_mod);
        if (sub == c_bc) return cmd::ber_count_main(ctx, decided_path, truth_path);
        if (sub == c_bs) return cmd::ber_sweep_main(ctx, bs_mod, bs_snrs, bs_symbols, bs_seed);
        if (sub == c_ws) return cmd::wavesplit_main(ctx, ws_manifest, cond_threshold);
        if (sub == c_rp) return cmd::replay_main(rp_manifest, rp_out);
        return emit_error("unknown subcommand", 2);
    } catch (const validation_error& e) {
        return emit_error(e.what(), 2);
    } catch (const numerical_error& e) {
        return emit_error(e.what(), 3);
    } catch (const io_error& e) {
        return emit_error(e.what(), 4);
    } catch (const fs::filesystem_error& e) {
        return emit_error(e.what(), 4);
    } catch (const std::exception& e) {
        return emit_error(e.what(), 2);
    }
}

inline int run(const std::vector<std::string>& argv) { return run_impl(argv); }

}  // namespace wavemet::cli
