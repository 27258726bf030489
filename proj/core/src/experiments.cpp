#include "experiments.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "ddfmcw/analysis.hpp"
#include "ddfmcw/metrics.hpp"
#include "ddfmcw/pulses.hpp"
#include "ddfmcw/rng.hpp"

namespace ddfmcw::detail {

namespace fs = std::filesystem;

CsvMeta RunContext::meta(const std::string& quantity, const std::string& units) const {
  CsvMeta m;
  m.quantity = quantity;
  m.units = units;
  m.params_hash = params_hash;
  m.extra.emplace_back("kind", to_string(cfg.kind));
  m.extra.emplace_back("seed", std::to_string(cfg.seed));
  return m;
}

void RunContext::curve(const std::string& name, const std::string& quantity, const std::string& units,
                       const std::vector<CurvePoint>& rows, std::vector<std::pair<std::string, std::string>> extra) {
  CsvMeta m = meta(quantity, units);
  for (auto& e : extra) m.extra.push_back(std::move(e));
  const fs::path p = path(name + ".csv");
  write_curve_csv(p, m, rows);
  files.push_back(p);
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string kind_tag(PilotKind k) { return to_string(k); }

// ---- aggregation ----

struct Rows {
  std::vector<CurvePoint> v;
  const std::string& hash;

  void mean(double x, const std::string& metric, const std::vector<double>& values) {
    std::vector<double> finite;
    for (double d : values)
      if (std::isfinite(d)) finite.push_back(d);
    const MeanStderr ms = mean_stderr(finite);
    v.push_back({x, metric, finite.empty() ? std::numeric_limits<double>::quiet_NaN() : ms.mean, ms.stderr_,
                 static_cast<long>(finite.size()), hash});
  }
  // values are squared normalized errors; reported as their root mean
  void rms(double x, const std::string& metric, const std::vector<double>& values) {
    std::vector<double> finite;
    for (double d : values)
      if (std::isfinite(d)) finite.push_back(d);
    const MeanStderr ms = mean_stderr(finite);
    const double r = std::sqrt(ms.mean);
    v.push_back({x, metric, finite.empty() ? std::numeric_limits<double>::quiet_NaN() : r,
                 r > 0.0 ? ms.stderr_ / (2.0 * r) : 0.0, static_cast<long>(finite.size()), hash});
  }
  void value(double x, const std::string& metric, double val, long trials = 1) {
    v.push_back({x, metric, val, 0.0, trials, hash});
  }
};

// ---- Monte Carlo scenario ----

struct Scenario {
  ChannelRealization chan;
  CMat data;   // unit-energy constellation points, column 0 empty
  CVec noise;  // CN(0, 1) per time sample
};

Scenario draw_scenario(const ExperimentConfig& c, const Constellation& con, long trial) {
  const SystemParams& p = c.params;
  Rng rng = stream_rng(c.seed, hash_name(to_string(c.kind)), 0, static_cast<std::uint64_t>(trial));
  Scenario s;
  s.chan = sample_channel(rng, c.channel.P, c.channel.l_max_chan, c.channel.k_max);
  s.data = CMat::Zero(p.M, p.N);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(con.points.size()) - 1);
  for (int n = 1; n < p.N; ++n)
    for (int m = 0; m < p.M; ++m) s.data(m, n) = con.points[pick(rng)];
  s.noise.resize(p.frame_size());
  for (long i = 0; i < s.noise.size(); ++i) s.noise[i] = complex_normal(rng, 1.0);
  return s;
}

struct Link {
  const SystemParams& p;
  const PulseBank& pb;
  const Scenario& sc;
  EffectiveChannel G;

  Link(const SystemParams& p_, const PulseBank& pb_, const Scenario& sc_)
      : p(p_), pb(pb_), sc(sc_), G(build_effective_channel(sc_.chan.paths, p_, pb_)) {}

  DDFrame receive(const CMat& X, double sigma2) const {
    const CVec r = G.apply(oddm_modulate(DDFrame(X, FrameRole::composite))) + std::sqrt(sigma2) * sc.noise;
    DDFrame Y = oddm_demodulate(r, p.M, p.N);
    Y.role = FrameRole::received;
    return Y;
  }
};

double data_amplitude(const SystemParams& p, double E_s) {
  return p.N > 1 ? std::sqrt(E_s * p.N / (p.N - 1.0)) : 0.0;
}

struct PowerPoint {
  double E_s = 1.0;
  double E_c = 1.0;
  double sigma2 = 1.0;
};

PowerPoint esn0_point(double esn0_db, double rho_db) {
  return {1.0, db_to_linear(rho_db), db_to_linear(-esn0_db)};
}

PowerPoint rho_point(double rho_db, double snr_db) {
  const PowerAllocation pw = split_power(db_to_linear(rho_db), 1.0);
  return {pw.E_s, pw.E_c, db_to_linear(-snr_db)};
}

// ---- communication trials ----

struct CommOut {
  double ber_perfect = 0.0;
  std::vector<double> ber;
  std::vector<double> nmse;
  std::vector<double> nmse_pilot_only;
  std::vector<std::vector<PathEstimate>> est;
  std::optional<DDFrame> perfect_frame;
  std::vector<DDFrame> jcedd_frames;
};

CommOut comm_trial(const ExperimentConfig& c, const PulseBank& pb, const Constellation& con, long trial,
                   const PowerPoint& pp, bool perfect, bool pilot_only, bool keep_frames) {
  const SystemParams& p = c.params;
  const Scenario sc = draw_scenario(c, con, trial);
  const Link link(p, pb, sc);
  const double amp = data_amplitude(p, pp.E_s);
  const CMat Xd = amp * sc.data;
  const DDFrame truth(Xd, FrameRole::data);
  CommOut out;

  if (perfect) {
    const DetectorSetup setup = data_detector_setup(p, con, amp, CMat());
    const DDFrame Y = link.receive(Xd, pp.sigma2);
    const DetectionResult r = sic_mmse_detect(Y, link.G, pp.sigma2, setup, c.I_DET);
    const BitErrors be = count_bit_errors(r.detected, truth, setup);
    out.ber_perfect = static_cast<double>(be.errors) / static_cast<double>(be.bits);
    if (keep_frames) out.perfect_frame = r.detected;
  }
  for (PilotKind kind : c.pilots) {
    const Pilot pilot = make_pilot(p, kind, pp.E_c);
    const DDFrame Xc = pilot_frame(pilot, p.N);
    const DDFrame Y = link.receive(Xd + Xc.grid, pp.sigma2);
    const DetectorSetup setup = data_detector_setup(p, con, amp, Xc.grid);
    AtomDictionary atoms(pilot, p, pb);
    const JceddConfig jc{c.I_JCEDD, c.sensing};
    const DetectionResult r = jcedd(Y, atoms, pp.sigma2, setup, jc, pb);
    const BitErrors be = count_bit_errors(r.detected, truth, setup);
    out.ber.push_back(static_cast<double>(be.errors) / static_cast<double>(be.bits));
    out.nmse.push_back(nmse_vs_virtual_ddip(r.paths, sc.chan.paths, p, pb));
    out.est.push_back(r.paths);
    if (keep_frames) out.jcedd_frames.push_back(r.detected);
    if (pilot_only) {
      const DDFrame Yc = link.receive(Xc.grid, pp.sigma2);
      const SensingResult s = omp_grid_evolution(Yc, atoms, c.sensing);
      out.nmse_pilot_only.push_back(nmse_vs_virtual_ddip(s.paths, sc.chan.paths, p, pb));
    }
  }
  return out;
}

template <class Out, class Fn>
std::vector<std::vector<Out>> sweep_trials(const RunContext& ctx, Fn fn) {
  const long P = static_cast<long>(ctx.cfg.sweep.size());
  const long T = ctx.cfg.trials;
  std::vector<std::vector<Out>> res(P, std::vector<Out>(T));
  parallel_for(P * T, ctx.threads, [&](long i) { res[i / T][i % T] = fn(i / T, i % T); });
  return res;
}

void export_comm(RunContext& ctx, const std::vector<std::vector<CommOut>>& res, const Constellation& con,
                 const std::function<PowerPoint(double)>& power) {
  const ExperimentConfig& c = ctx.cfg;
  for (std::size_t pt = 0; pt < c.sweep.size(); ++pt) {
    const std::string tag = "x=" + fmt(c.sweep[pt]);
    if (c.export_estimates) {
      for (std::size_t k = 0; k < c.pilots.size(); ++k) {
        std::vector<EstimateRow> rows;
        for (long t = 0; t < c.trials; ++t) rows.push_back({t, res[pt][t].est[k]});
        const fs::path f = ctx.path("estimates_jcedd_" + kind_tag(c.pilots[k]) + "_" + tag + ".csv");
        write_estimates_csv(f, ctx.meta("path estimates", "bins"), rows);
        ctx.files.push_back(f);
      }
    }
    if (c.export_frames) {
      const double amp = data_amplitude(c.params, power(c.sweep[pt]).E_s);
      const CommOut& o = res[pt][0];
      if (o.perfect_frame) {
        const fs::path f = ctx.path("detected_perfect_csi_" + tag + ".csv");
        write_frame_csv(f, ctx.meta("detected frame, trial 0", "linear"), *o.perfect_frame,
                        data_detector_setup(c.params, con, amp, CMat()));
        ctx.files.push_back(f);
      }
      for (std::size_t k = 0; k < o.jcedd_frames.size(); ++k) {
        const Pilot pilot = make_pilot(c.params, c.pilots[k], power(c.sweep[pt]).E_c);
        const fs::path f = ctx.path("detected_jcedd_" + kind_tag(c.pilots[k]) + "_" + tag + ".csv");
        write_frame_csv(f, ctx.meta("detected frame, trial 0", "linear"), o.jcedd_frames[k],
                        data_detector_setup(c.params, con, amp, pilot_frame(pilot, c.params.N).grid));
        ctx.files.push_back(f);
      }
    }
  }
}

// ---- sensing trials ----

struct SenseOut {
  std::vector<double> das_l2, das_k2;
  std::vector<double> pilot_l2, pilot_k2;
  std::vector<double> crb_l2, crb_k2;
  std::vector<std::vector<PathEstimate>> est;
};

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

SenseOut sense_trial(const ExperimentConfig& c, const PulseBank& pb, const Constellation& con, long trial,
                     const PowerPoint& pp) {
  const SystemParams& p = c.params;
  const Scenario sc = draw_scenario(c, con, trial);
  const Link link(p, pb, sc);
  const double amp = data_amplitude(p, pp.E_s);
  const DDFrame Xd(amp * sc.data, FrameRole::data);
  const AxisScales scales{c.channel.l_max_chan, c.channel.k_max};
  SenseOut out;
  for (PilotKind kind : c.pilots) {
    const Pilot pilot = make_pilot(p, kind, pp.E_c);
    const DDFrame Xc = pilot_frame(pilot, p.N);
    AtomDictionary atoms(pilot, p, pb);

    const DDFrame Y = link.receive(Xd.grid + Xc.grid, pp.sigma2);
    const SensingResult d = das(Y, atoms, Xd, c.sensing, pb);
    const MatchedErrors e = matched_errors(d.paths, sc.chan.paths, scales);
    out.das_l2.push_back(mean_of(e.delay2));
    out.das_k2.push_back(mean_of(e.doppler2));
    out.est.push_back(d.paths);

    const DDFrame Yc = link.receive(Xc.grid, pp.sigma2);
    const SensingResult o = omp_grid_evolution(Yc, atoms, c.sensing);
    const MatchedErrors eo = matched_errors(o.paths, sc.chan.paths, scales);
    out.pilot_l2.push_back(mean_of(eo.delay2));
    out.pilot_k2.push_back(mean_of(eo.doppler2));

    const CrbResult b = crb(sc.chan.paths, Xc, pp.sigma2, p, pb);
    double sl = 0.0, sk = 0.0;
    for (int i = 0; i < static_cast<int>(sc.chan.paths.size()); ++i) {
      sl += b.delay(i);
      sk += b.doppler(i);
    }
    const double np = static_cast<double>(sc.chan.paths.size());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.crb_l2.push_back(b.singular ? nan : sl / np / (scales.l_span * scales.l_span));
    out.crb_k2.push_back(b.singular ? nan : sk / np / (scales.k_span * scales.k_span));
  }
  return out;
}

void emit_sensing(RunContext& ctx, const std::vector<std::vector<SenseOut>>& res, const std::string& axis_units) {
  const ExperimentConfig& c = ctx.cfg;
  Rows dl{{}, ctx.params_hash}, dk{{}, ctx.params_hash};
  long singular = 0;
  for (std::size_t pt = 0; pt < c.sweep.size(); ++pt) {
    const double x = c.sweep[pt];
    for (std::size_t k = 0; k < c.pilots.size(); ++k) {
      std::vector<double> a, b, pa, pb_, ca, cb;
      for (const auto& o : res[pt]) {
        a.push_back(o.das_l2[k]);
        b.push_back(o.das_k2[k]);
        pa.push_back(o.pilot_l2[k]);
        pb_.push_back(o.pilot_k2[k]);
        ca.push_back(o.crb_l2[k]);
        cb.push_back(o.crb_k2[k]);
        singular += std::isnan(o.crb_l2[k]) ? 1 : 0;
      }
      const std::string t = kind_tag(c.pilots[k]);
      dl.rms(x, "nrmse/das/" + t, a);
      dk.rms(x, "nrmse/das/" + t, b);
      dl.rms(x, "nrmse/pilot_only/" + t, pa);
      dk.rms(x, "nrmse/pilot_only/" + t, pb_);
      dl.rms(x, "crb/pilot_only/" + t, ca);
      dk.rms(x, "crb/pilot_only/" + t, cb);
    }
    if (c.export_estimates) {
      for (std::size_t k = 0; k < c.pilots.size(); ++k) {
        std::vector<EstimateRow> rows;
        for (long t = 0; t < c.trials; ++t) rows.push_back({t, res[pt][t].est[k]});
        const fs::path f = ctx.path("estimates_das_" + kind_tag(c.pilots[k]) + "_x=" + fmt(x) + ".csv");
        write_estimates_csv(f, ctx.meta("path estimates", "bins"), rows);
        ctx.files.push_back(f);
      }
    }
  }
  const std::vector<std::pair<std::string, std::string>> extra{
      {"x", axis_units}, {"normalizer", "delay / l_max_chan"}, {"association", "greedy nearest"}};
  ctx.curve("nrmse_delay", "delay NRMSE", "normalized by l_max_chan", dl.v, extra);
  auto extra_k = extra;
  extra_k[1] = {"normalizer", "doppler / k_max"};
  ctx.curve("nrmse_doppler", "Doppler NRMSE", "normalized by k_max", dk.v, extra_k);
  ctx.notes.emplace_back("crb_singular_trials", static_cast<double>(singular));
}

}  // namespace

// ---- experiments ----

void run_papr_ccdf(RunContext& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  const SystemParams& p = c.params;
  const PulseBank pb(p);
  const Constellation con = make_constellation(c.constellation);
  const long MN = p.frame_size();
  const double amp = data_amplitude(p, 1.0);
  const std::size_t R = c.sweep.size(), K = c.pilots.size();

  std::vector<Waveform> pilot_w;
  for (PilotKind k : c.pilots)
    pilot_w.push_back(synthesize_waveform(oddm_modulate(build_pilot_frame(p, k, 1.0)), p, pb, true));

  struct Out {
    std::vector<double> mixed;  // rho-major, then pilot kind
    double data = 0.0;
  };
  std::vector<Out> res(c.trials);
  parallel_for(c.trials, ctx.threads, [&](long t) {
    const Scenario sc = draw_scenario(c, con, t);
    const Waveform wd = synthesize_waveform(oddm_modulate(DDFrame(amp * sc.data, FrameRole::data)), p, pb, true);
    const auto [lo, hi] = wd.body(0, MN);
    Out o;
    o.data = papr_db(wd, 0, MN);
    std::vector<cplx> s(hi - lo);
    for (std::size_t r = 0; r < R; ++r) {
      const PowerAllocation pw = split_power(db_to_linear(c.sweep[r]), 1.0);
      const double se = std::sqrt(pw.E_s), sp = std::sqrt(pw.E_c);
      for (std::size_t k = 0; k < K; ++k) {
        for (long i = lo; i < hi; ++i) s[i - lo] = se * wd.samples[i] + sp * pilot_w[k].samples[i];
        o.mixed.push_back(papr_db(s));
      }
    }
    res[t] = std::move(o);
  });

  std::vector<double> grid;
  for (int i = 0; i <= 400; ++i) grid.push_back(0.05 * i);
  const double n = static_cast<double>(c.trials);
  Rows ccdf{{}, ctx.params_hash}, thr{{}, ctx.params_hash};
  auto add_empirical = [&](const std::string& metric, const std::vector<double>& v) {
    const auto e = empirical_ccdf(v, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
      ccdf.v.push_back({grid[i], metric, e[i], std::sqrt(e[i] * (1.0 - e[i]) / n), c.trials, ctx.params_hash});
  };
  auto add_analytic = [&](const std::string& metric, double rho) {
    for (double g : grid) ccdf.value(g, metric, ccdf_analytic(rho, MN, db_to_linear(g)), 0);
  };
  std::vector<double> data;
  for (const auto& o : res) data.push_back(o.data);
  add_empirical("ccdf/empirical/oddm_data", data);
  add_analytic("ccdf/analytic/oddm_data", 0.0);
  for (std::size_t r = 0; r < R; ++r) {
    const double rho_db = c.sweep[r];
    const std::string rt = "/rho_db=" + fmt(rho_db);
    add_analytic("ccdf/analytic" + rt, db_to_linear(rho_db));
    thr.value(rho_db, "threshold_db/tail=0.01/analytic", ccdf_analytic_threshold_db(db_to_linear(rho_db), MN, 1e-2), 0);
    for (std::size_t k = 0; k < K; ++k) {
      std::vector<double> v;
      for (const auto& o : res) v.push_back(o.mixed[r * K + k]);
      const std::string name = "oddm_" + kind_tag(c.pilots[k]);
      add_empirical("ccdf/empirical/" + name + rt, v);
      thr.value(rho_db, "threshold_db/tail=0.01/empirical/" + name, empirical_threshold_db(v, 1e-2), c.trials);
      thr.value(rho_db, "threshold_db/tail=0.001/empirical/" + name, empirical_threshold_db(v, 1e-3), c.trials);
    }
  }
  for (std::size_t k = 0; k < K; ++k) {
    const double v = papr_db(pilot_w[k], 0, MN);
    thr.value(0.0, "papr_db/pilot_only/" + kind_tag(c.pilots[k]), v);
    ctx.notes.emplace_back("pilot_only_papr_db/" + kind_tag(c.pilots[k]), v);
  }
  ctx.curve("ccdf", "PAPR CCDF", "probability vs gamma0 dB", ccdf.v);
  ctx.curve("papr_thresholds", "PAPR at fixed CCDF tail", "dB vs rho dB", thr.v);

  if (c.export_waveforms) {
    const Scenario sc = draw_scenario(c, con, 0);
    const PowerAllocation pw = split_power(db_to_linear(c.sweep[0]), 1.0);
    const Pilot pilot = make_pilot(p, c.pilots[0], pw.E_c);
    const CMat X = data_amplitude(p, pw.E_s) * sc.data + pilot_frame(pilot, p.N).grid;
    const Waveform w = synthesize_waveform(oddm_modulate(DDFrame(X, FrameRole::composite)), p, pb, true);
    const fs::path f = ctx.path("waveform_trial0.c64");
    write_waveform(f, w, p);
    ctx.files.push_back(f);
    fs::path side = f;
    side += ".json";
    ctx.files.push_back(side);
  }
}

void run_psd(RunContext& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  const SystemParams& p = c.params;
  const PulseBank pb(p);
  const Constellation con = make_constellation(c.constellation);
  const PowerAllocation pw = split_power(db_to_linear(c.sweep[0]), 1.0);
  const Pilot pilot = make_pilot(p, PilotKind::dd_srn_fmcw, pw.E_c);
  const CMat Xc = pilot_frame(pilot, p.N).grid;
  const double amp = data_amplitude(p, pw.E_s);
  const double duration = static_cast<double>(p.frame_size());
  const Waveform probe = synthesize_waveform(oddm_modulate(DDFrame(Xc, FrameRole::pilot)), pb, p.O, {});
  const int nfft = good_fft_size(static_cast<int>(2 * probe.samples.size()));

  std::vector<std::vector<double>> spectra(c.trials);
  std::vector<double> freqs;
  parallel_for(c.trials, ctx.threads, [&](long t) {
    const Scenario sc = draw_scenario(c, con, t);
    const Waveform w = synthesize_waveform(oddm_modulate(DDFrame(amp * sc.data + Xc, FrameRole::composite)), pb, p.O, {});
    spectra[t] = periodogram(w, duration, nfft).psd;
  });
  const Spectrum sp_f = periodogram(probe, duration, nfft);
  freqs = sp_f.f;

  const Pilot unit_pilot = make_pilot(p, PilotKind::dd_srn_fmcw, 1.0);
  const Waveform srn = synthesize_waveform(oddm_modulate(pilot_frame(unit_pilot, p.N)), pb, p.O, {});
  const Spectrum s_srn = periodogram(srn, duration, nfft);
  const int O_lin = std::max(32, p.O);
  const Waveform lin = linear_fmcw_waveform(p.M, p.N, O_lin, 1.0);
  const Spectrum s_lin = periodogram(lin, duration, good_fft_size(static_cast<int>(2 * lin.samples.size())));

  Spectrum s_mix;
  s_mix.f = freqs;
  s_mix.psd.assign(freqs.size(), 0.0);
  Rows rows{{}, ctx.params_hash};
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    std::vector<double> v;
    for (const auto& s : spectra) v.push_back(s[i]);
    const MeanStderr ms = mean_stderr(v);
    s_mix.psd[i] = ms.mean;
    if (std::abs(freqs[i]) > 1.0) continue;
    rows.v.push_back({freqs[i], "psd/periodogram/oddm_fmcw", ms.mean, ms.stderr_, c.trials, ctx.params_hash});
    const PsdValue a = psd_analytic(freqs[i], p, pw, pilot.sequence);
    rows.value(freqs[i], "psd/analytic/total", a.total, 0);
    rows.value(freqs[i], "psd/analytic/pilot", a.pilot, 0);
    rows.value(freqs[i], "psd/analytic/data", a.data, 0);
    rows.value(freqs[i], "psd/periodogram/srn_fmcw", s_srn.psd[i]);
  }
  for (std::size_t i = 0; i < s_lin.f.size(); ++i)
    if (std::abs(s_lin.f[i]) <= 1.0) rows.value(s_lin.f[i], "psd/periodogram/linear_fmcw", s_lin.psd[i]);
  ctx.curve("psd", "power spectral density", "power per unit of M/T vs f in M/T", rows.v);

  double integral = 0.0;
  const double df = 1e-4;
  for (double f = -0.5 * (1.0 + p.beta); f <= 0.5 * (1.0 + p.beta); f += df)
    integral += psd_analytic(f, p, pw, pilot.sequence).total * df;

  const double width = 1.0 / p.M;
  Rows oobe{{}, ctx.params_hash};
  const double o_srn = oobe_db(s_srn, 0.75, width, p.beta);
  const double o_lin = oobe_db(s_lin, 0.75, width, p.beta);
  const double o_mix = oobe_db(s_mix, 0.75, width, p.beta);
  oobe.value(0.75, "oobe_db/srn_fmcw", o_srn);
  oobe.value(0.75, "oobe_db/linear_fmcw", o_lin);
  oobe.value(0.75, "oobe_db/oddm_fmcw", o_mix, c.trials);
  ctx.curve("oobe", "out-of-band emission relative to in-band mean", "dB vs f in M/T", oobe.v);
  ctx.notes.emplace_back("analytic_psd_integral", integral);
  ctx.notes.emplace_back("expected_power", pw.total());
  ctx.notes.emplace_back("oobe_margin_db", o_lin - o_srn);
}

void run_ambiguity(RunContext& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  const SystemParams& p = c.params;
  const PulseBank pb(p);
  const int M = p.M, N = p.N, O = p.O;
  const long len = (static_cast<long>(M) * N + 2L * pb.a_span()) * O + 1;
  int nfft = 4 * M * N * O;
  while (nfft < len) nfft *= 2;
  const double nu_max = 0.5 / M;
  const long s_half = static_cast<long>(M) * O / 2;

  struct Signal {
    std::string name;
    Waveform tx, ref;
  };
  std::vector<Signal> sig;
  for (PilotKind k : c.pilots) {
    const TimeSampleVector s = oddm_modulate(build_pilot_frame(p, k, 1.0));
    sig.push_back({kind_tag(k), synthesize_waveform(s, pb, O, {M, M}), synthesize_waveform(s, pb, O, {})});
  }
  sig.push_back({"linear_fmcw", linear_fmcw_waveform(M, N, O, 1.0, {M, M}), linear_fmcw_waveform(M, N, O, 1.0)});

  std::vector<AmbiguitySurface> surf(sig.size());
  parallel_for(static_cast<long>(sig.size()), ctx.threads, [&](long i) {
    surf[i] = ambiguity_numeric(sig[i].tx, sig[i].ref, -s_half, s_half, 1, nfft, nu_max);
  });

  Rows cuts{{}, ctx.params_hash}, side{{}, ctx.params_hash};
  for (std::size_t i = 0; i < sig.size(); ++i) {
    const AmbiguitySurface& a = surf[i];
    Eigen::Index r0 = 0, c0 = 0;
    for (std::size_t k = 0; k < a.tau.size(); ++k)
      if (std::abs(a.tau[k]) < std::abs(a.tau[r0])) r0 = static_cast<Eigen::Index>(k);
    for (std::size_t k = 0; k < a.nu.size(); ++k)
      if (std::abs(a.nu[k]) < std::abs(a.nu[c0])) c0 = static_cast<Eigen::Index>(k);
    const cplx peak = a.values(r0, c0);
    std::vector<std::vector<std::string>> cells;
    for (std::size_t r = 0; r < a.tau.size(); ++r) {
      for (std::size_t q = 0; q < a.nu.size(); ++q) {
        const cplx v = a.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(q)) / peak;
        cells.push_back({format_double(a.tau[r]), format_double(a.nu[q]), format_double(v.real()),
                         format_double(v.imag()), format_double(std::max(-200.0, 20.0 * std::log10(std::abs(v) + 1e-300)))});
      }
    }
    const fs::path f = ctx.path("ambiguity_" + sig[i].name + ".csv");
    write_table_csv(f, ctx.meta("ambiguity function normalized to A(0,0)", "tau in T/M, nu in M/T, dB"),
                    {"tau", "nu", "re", "im", "db"}, cells);
    ctx.files.push_back(f);
    for (std::size_t r = 0; r < a.tau.size(); ++r)
      cuts.value(a.tau[r], "zero_doppler_cut/" + sig[i].name, (a.values(static_cast<Eigen::Index>(r), c0) / peak).real());
    for (std::size_t q = 0; q < a.nu.size(); ++q)
      cuts.value(a.nu[q], "zero_delay_cut_abs/" + sig[i].name, std::abs(a.values(r0, static_cast<Eigen::Index>(q)) / peak));
    const double sl = off_axis_sidelobe_db(a, 0.5 * M, nu_max, 2.0, 2.0 / (static_cast<double>(M) * N));
    side.value(0.0, "off_axis_sidelobe_db/" + sig[i].name, sl);
    ctx.notes.emplace_back("off_axis_sidelobe_db/" + sig[i].name, sl);
  }
  for (std::size_t r = 0; r < surf[0].tau.size(); ++r) cuts.value(surf[0].tau[r], "g", pb.g(surf[0].tau[r]));
  for (std::size_t q = 0; q < surf[0].nu.size(); ++q)
    cuts.value(surf[0].nu[q], "abs_phi", std::abs(dirichlet(-surf[0].nu[q] * M * N, N)));
  ctx.curve("ambiguity_cuts", "ambiguity cuts normalized to A(0,0)", "tau in T/M or nu in M/T", cuts.v);
  ctx.curve("ambiguity_sidelobes", "max off-axis sidelobe", "dB", side.v,
            {{"region", "|tau|<=T/2, |nu|<=1/(2T), excluding |tau|<2 delay bins or |nu|<2 Doppler bins"}});

  for (std::size_t i = 0; i < c.pilots.size(); ++i) {
    const Pilot pilot = make_pilot(p, c.pilots[i], 1.0);
    const AmbiguitySurface& a = surf[i];
    double dev = 0.0;
    const double peak = std::abs(ambiguity_dd_approx(0.0, 0.0, p, pilot, pb));
    for (std::size_t r = 0; r < a.tau.size(); r += 4)
      for (std::size_t q = 0; q < a.nu.size(); q += 4)
        dev = std::max(dev, std::abs(a.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(q)) -
                                     ambiguity_dd_approx(a.tau[r], a.nu[q], p, pilot, pb)) / peak);
    ctx.notes.emplace_back("separable_approx_max_dev/" + kind_tag(c.pilots[i]), dev);
  }
}

void run_chirp_compression(RunContext& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  const int O = c.params.O;
  const ChirpCompression cc = chirp_compression_curves(c.params.M, O);
  Rows rows{{}, ctx.params_hash};
  for (std::size_t i = 0; i < cc.tau.size(); ++i) {
    rows.value(cc.tau[i], "practical", cc.practical[i]);
    rows.value(cc.tau[i], "ideal", cc.ideal[i]);
  }
  ctx.curve("chirp_compression", "delay ambiguity of a linear chirp over M", "linear vs tau in T/M", rows.v);
  const double guard = 1.5;
  ctx.notes.emplace_back("max_sidelobe_db/practical", 20.0 * std::log10(max_sidelobe(cc.tau, cc.practical, guard)));
  ctx.notes.emplace_back("max_sidelobe_db/ideal", 20.0 * std::log10(max_sidelobe(cc.tau, cc.ideal, guard)));
}

void run_ber_vs_esn0(RunContext& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  const PulseBank pb(c.params);
  const Constellation con = make_constellation(c.constellation);
  const auto res = sweep_trials<CommOut>(ctx, [&](long pt, long t) {
    return comm_trial(c, pb, con, t, esn0_point(c.sweep[pt], c.rho_db), true, false, c.export_frames && t == 0);
  });
  Rows ber{{}, ctx.params_hash};
  for (std::size_t pt = 0; pt < c.sweep.size(); ++pt) {
    std::vector<double> v;
    for (const auto& o : res[pt]) v.push_back(o.ber_perfect);
    ber.mean(c.sweep[pt], "ber/perfect_csi", v);
    for (std::size_t k = 0; k < c.pilots.size(); ++k) {
      v.clear();
      for (const auto& o : res[pt]) v.push_back(o.ber[k]);
      ber.mean(c.sweep[pt], "ber/jcedd/" + kind_tag(c.pilots[k]), v);
    }
  }
  ctx.curve("ber", "uncoded bit error rate", "BER vs Es/N0 dB", ber.v, {{"rho_db", fmt(c.rho_db)}});
  export_comm(ctx, res, con, [&](double x) { return esn0_point(x, c.rho_db); });
}

void run_nmse_vs_esn0(RunContext& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  const PulseBank pb(c.params);
  const Constellation con = make_constellation(c.constellation);
  const auto res = sweep_trials<CommOut>(ctx, [&](long pt, long t) {
    return comm_trial(c, pb, con, t, esn0_point(c.sweep[pt], c.rho_db), false, true, false);
  });
  Rows nmse{{}, ctx.params_hash};
  for (std::size_t pt = 0; pt < c.sweep.size(); ++pt) {
    for (std::size_t k = 0; k < c.pilots.size(); ++k) {
      std::vector<double> a, b;
      for (const auto& o : res[pt]) {
        a.push_back(o.nmse[k]);
        b.push_back(o.nmse_pilot_only[k]);
      }
      nmse.mean(c.sweep[pt], "nmse/jcedd/" + kind_tag(c.pilots[k]), a);
      nmse.mean(c.sweep[pt], "nmse/pilot_only/" + kind_tag(c.pilots[k]), b);
    }
  }
  ctx.curve("nmse", "channel NMSE against a virtual unit-energy DDIP response", "linear vs Es/N0 dB", nmse.v,
            {{"rho_db", fmt(c.rho_db)}});
  export_comm(ctx, res, con, [&](double x) { return esn0_point(x, c.rho_db); });
}

void run_nrmse_vs_esn0(RunContext& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  const PulseBank pb(c.params);
  const Constellation con = make_constellation(c.constellation);
  const auto res = sweep_trials<SenseOut>(
      ctx, [&](long pt, long t) { return sense_trial(c, pb, con, t, esn0_point(c.sweep[pt], c.rho_db)); });
  emit_sensing(ctx, res, "Es/N0 dB");
}

void run_ber_vs_rho(RunContext& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  const PulseBank pb(c.params);
  const Constellation con = make_constellation(c.constellation);
  const auto res = sweep_trials<CommOut>(ctx, [&](long pt, long t) {
    return comm_trial(c, pb, con, t, rho_point(c.sweep[pt], c.snr_db), true, false, c.export_frames && t == 0);
  });
  Rows ber{{}, ctx.params_hash};
  for (std::size_t pt = 0; pt < c.sweep.size(); ++pt) {
    std::vector<double> v;
    for (const auto& o : res[pt]) v.push_back(o.ber_perfect);
    ber.mean(c.sweep[pt], "ber/perfect_csi", v);
    for (std::size_t k = 0; k < c.pilots.size(); ++k) {
      v.clear();
      for (const auto& o : res[pt]) v.push_back(o.ber[k]);
      ber.mean(c.sweep[pt], "ber/jcedd/" + kind_tag(c.pilots[k]), v);
    }
  }
  ctx.curve("ber", "uncoded bit error rate", "BER vs rho dB", ber.v, {{"snr_db", fmt(c.snr_db)}});
  export_comm(ctx, res, con, [&](double x) { return rho_point(x, c.snr_db); });
}

void run_nrmse_vs_rho(RunContext& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  const PulseBank pb(c.params);
  const Constellation con = make_constellation(c.constellation);
  const auto res = sweep_trials<SenseOut>(
      ctx, [&](long pt, long t) { return sense_trial(c, pb, con, t, rho_point(c.sweep[pt], c.snr_db)); });
  emit_sensing(ctx, res, "rho dB");
}

void run_crb(RunContext& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  const SystemParams& p = c.params;
  const PulseBank pb(p);
  const Constellation con = make_constellation(c.constellation);
  const double ls = c.channel.l_max_chan, ks = c.channel.k_max;

  struct Out {
    std::vector<double> l_data, k_data, l_pilot, k_pilot;
  };
  const auto res = sweep_trials<Out>(ctx, [&](long pt, long t) {
    const Scenario sc = draw_scenario(c, con, t);
    const PowerPoint pp = esn0_point(c.sweep[pt], c.rho_db);
    Out o;
    for (PilotKind k : c.pilots) {
      const DDFrame Xc = build_pilot_frame(p, k, pp.E_c);
      const CrbResult a = crb(sc.chan.paths, Xc, pp.sigma2, p, pb);
      const CrbResult b = crb(sc.chan.paths, Xc, pp.E_c * pp.sigma2, p, pb);
      const NrmseBound na = crb_nrmse(a, ls, ks), nb = crb_nrmse(b, ls, ks);
      const double nan = std::numeric_limits<double>::quiet_NaN();
      o.l_data.push_back(a.singular ? nan : na.delay * na.delay);
      o.k_data.push_back(a.singular ? nan : na.doppler * na.doppler);
      o.l_pilot.push_back(b.singular ? nan : nb.delay * nb.delay);
      o.k_pilot.push_back(b.singular ? nan : nb.doppler * nb.doppler);
    }
    return o;
  });
  Rows dl{{}, ctx.params_hash}, dk{{}, ctx.params_hash};
  for (std::size_t pt = 0; pt < c.sweep.size(); ++pt) {
    for (std::size_t k = 0; k < c.pilots.size(); ++k) {
      std::vector<double> a, b, e, f;
      for (const auto& o : res[pt]) {
        a.push_back(o.l_data[k]);
        b.push_back(o.k_data[k]);
        e.push_back(o.l_pilot[k]);
        f.push_back(o.k_pilot[k]);
      }
      const std::string t = kind_tag(c.pilots[k]);
      dl.rms(c.sweep[pt], "crb_nrmse/" + t + "/snr=Es", a);
      dk.rms(c.sweep[pt], "crb_nrmse/" + t + "/snr=Es", b);
      dl.rms(c.sweep[pt], "crb_nrmse/" + t + "/snr=Ec", e);
      dk.rms(c.sweep[pt], "crb_nrmse/" + t + "/snr=Ec", f);
    }
  }
  const std::vector<std::pair<std::string, std::string>> extra{
      {"x", "SNR dB; snr=Es uses sigma^2 = Es/SNR, snr=Ec uses sigma^2 = Ec/SNR"}, {"rho_db", fmt(c.rho_db)}};
  ctx.curve("crb_delay", "delay CRB in NRMSE form", "normalized by l_max_chan", dl.v, extra);
  ctx.curve("crb_doppler", "Doppler CRB in NRMSE form", "normalized by k_max", dk.v, extra);
}

}  // namespace ddfmcw::detail
