#include "rb/flicker.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "rb/clifford.hpp"
#include "rb/engine.hpp"
#include "rb/estimate.hpp"
#include "rb/ptm.hpp"
#include "rb/stats.hpp"

namespace rb {

namespace {

using Cplx = std::complex<double>;

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

double flicker_f_min(long n_steps, double dt) {
    return 1.0 / (10.0 * static_cast<double>(n_steps) * dt);
}

double flicker_f_max(double dt) { return 1.0 / (2.0 * dt); }

namespace {

RtnSignal sample_signal(double rate, double duration, Rng& rng) {
    RtnSignal s;
    s.rate = rate;
    s.initial_state = rng.uniform01() < 0.5 ? 1 : -1;
    double t = rng.exponential(rate);
    while (t < duration) {
        s.switch_times.push_back(t);
        t += rng.exponential(rate);
    }
    return s;
}

// Accumulate the midpoint-sampled track of one signal into `track` via
// switch deltas: O(events + n_steps) instead of O(signals * n_steps).
void add_signal_track(const RtnSignal& s, double dt, long n_steps,
                      std::vector<double>& delta, double& base) {
    base += s.initial_state;
    int state = s.initial_state;
    for (double e : s.switch_times) {
        // first midpoint (i + 0.5) dt at or after the event
        const long idx = static_cast<long>(std::ceil(e / dt - 0.5));
        const int next = -state;
        if (idx < n_steps && idx >= 0) delta[idx] += next - state;
        state = next;
    }
}

}  // namespace

FlickerProcess sample_flicker(double a_prime, double dt, long n_steps,
                              int n_signals, Rng& rng) {
    if (n_steps < 1) throw std::invalid_argument("sample_flicker: n_steps < 1");
    FlickerProcess p;
    p.a_prime = a_prime;
    p.dt = dt;
    p.n_steps = n_steps;
    p.f_min = flicker_f_min(n_steps, dt);
    p.f_max = flicker_f_max(dt);
    const double duration = n_steps * dt;
    const double log_ratio = std::log(p.f_max / p.f_min);

    std::vector<double> delta(n_steps, 0.0);
    double base = 0.0;
    p.signals.reserve(n_signals);
    for (int k = 0; k < n_signals; ++k) {
        const double rate = p.f_min * std::exp(log_ratio * rng.uniform01());
        p.signals.push_back(sample_signal(rate, duration, rng));
        add_signal_track(p.signals.back(), dt, n_steps, delta, base);
    }
    p.xi.resize(n_steps);
    double level = base;
    for (long i = 0; i < n_steps; ++i) {
        level += delta[i];
        p.xi[i] = a_prime * level;
    }
    return p;
}

std::vector<double> sample_rtn_track(double rate, double dt, long n_steps,
                                     Rng& rng) {
    RtnSignal s = sample_signal(rate, n_steps * dt, rng);
    std::vector<double> delta(n_steps, 0.0);
    double base = 0.0;
    add_signal_track(s, dt, n_steps, delta, base);
    std::vector<double> track(n_steps);
    double level = base;
    for (long i = 0; i < n_steps; ++i) {
        level += delta[i];
        track[i] = level;
    }
    return track;
}

namespace {

void fft_inplace(std::vector<Cplx>& a) {
    const size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = -kTwoPi / static_cast<double>(len);
        const Cplx w_len(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            Cplx w(1.0, 0.0);
            for (size_t j = 0; j < len / 2; ++j) {
                const Cplx u = a[i + j];
                const Cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= w_len;
            }
        }
    }
}

}  // namespace

PsdEstimate average_periodogram(const std::vector<std::vector<double>>& tracks,
                                double dt) {
    if (tracks.empty())
        throw std::invalid_argument("average_periodogram: no tracks");
    size_t n = 1;
    while (2 * n <= tracks.front().size()) n *= 2;

    PsdEstimate out;
    out.power.assign(n / 2, 0.0);
    std::vector<Cplx> buf(n);
    for (const auto& track : tracks) {
        if (track.size() < n)
            throw std::invalid_argument("average_periodogram: short track");
        for (size_t i = 0; i < n; ++i) buf[i] = track[i];
        fft_inplace(buf);
        for (size_t k = 1; k <= n / 2; ++k)
            out.power[k - 1] += std::norm(buf[k]) * dt / static_cast<double>(n);
    }
    for (double& p : out.power) p /= static_cast<double>(tracks.size());
    out.freq.resize(n / 2);
    for (size_t k = 1; k <= n / 2; ++k)
        out.freq[k - 1] = static_cast<double>(k) / (static_cast<double>(n) * dt);
    return out;
}

// --- Ramsey ----------------------------------------------------------------

namespace {

// Least-squares decay time for sigma = exp(-(t/T)^p), golden-section on the
// sigma-space RMS.
double fit_decay_time(const std::vector<double>& t,
                      const std::vector<double>& sigma, double p,
                      double* rms_out) {
    double num = 0.0, den = 0.0;  // regression of -ln sigma on t^p
    for (size_t i = 1; i < t.size(); ++i) {
        if (sigma[i] < 0.05 || sigma[i] >= 1.0) continue;
        const double x = std::pow(t[i], p);
        num += x * (-std::log(sigma[i]));
        den += x * x;
    }
    double t0 = num > 0.0 ? std::pow(den / num, 1.0 / p) / 1.0 : t.back();
    t0 = std::clamp(t0, t[1], 100.0 * t.back());

    auto rms = [&](double tau) {
        double acc = 0.0;
        for (size_t i = 0; i < t.size(); ++i) {
            const double model = std::exp(-std::pow(t[i] / tau, p));
            acc += (sigma[i] - model) * (sigma[i] - model);
        }
        return std::sqrt(acc / static_cast<double>(t.size()));
    };
    double lo = t0 / 3.0, hi = t0 * 3.0;
    const double gr = 0.6180339887498949;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = rms(x1), f2 = rms(x2);
    for (int it = 0; it < 120; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = rms(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = rms(x2);
        }
    }
    const double best = 0.5 * (lo + hi);
    if (rms_out) *rms_out = rms(best);
    return best;
}

}  // namespace

RamseyResult ramsey(const RamseyConfig& cfg, int threads) {
    if (cfg.ensemble < 1) throw std::invalid_argument("ramsey: empty ensemble");
    const long n = cfg.n_steps;

    // Fixed-size blocks keep the reduction order independent of the thread
    // count.
    constexpr int kBlock = 16;
    const int n_blocks = (cfg.ensemble + kBlock - 1) / kBlock;
    std::vector<std::vector<Cplx>> partial(
        n_blocks, std::vector<Cplx>(n + 1, Cplx(0, 0)));

    auto run_block = [&](int b) {
        const int lo = b * kBlock;
        const int hi = std::min(cfg.ensemble, lo + kBlock);
        auto& acc = partial[b];
        for (int e = lo; e < hi; ++e) {
            Rng rng(child_seed(cfg.seed, static_cast<std::uint64_t>(e), 0x52));
            const FlickerProcess p =
                sample_flicker(cfg.a_prime, cfg.dt, n, cfg.n_signals, rng);
            double theta = 0.0;
            acc[0] += Cplx(1.0, 0.0);
            for (long i = 0; i < n; ++i) {
                theta += kTwoPi * p.xi[i] * cfg.dt;
                acc[i + 1] += std::exp(Cplx(0.0, -2.0 * theta));
            }
        }
    };
    if (threads <= 1) {
        for (int b = 0; b < n_blocks; ++b) run_block(b);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&]() {
                for (int b = next.fetch_add(1); b < n_blocks;
                     b = next.fetch_add(1))
                    run_block(b);
            });
        for (auto& th : pool) th.join();
    }

    RamseyResult res;
    res.time.resize(n + 1);
    res.coherence.resize(n + 1);
    for (long i = 0; i <= n; ++i) {
        Cplx total(0, 0);
        for (int b = 0; b < n_blocks; ++b) total += partial[b][i];
        res.time[i] = static_cast<double>(i) * cfg.dt;
        res.coherence[i] = std::abs(total) / cfg.ensemble;
    }

    const double inv_e = std::exp(-1.0);
    res.crossed = false;
    res.t2_crossing = res.time.back();
    for (long i = 1; i <= n; ++i) {
        if (res.coherence[i] <= inv_e) {
            const double s0 = res.coherence[i - 1], s1 = res.coherence[i];
            const double frac = (s0 - inv_e) / std::max(s0 - s1, 1e-300);
            res.t2_crossing = res.time[i - 1] + frac * cfg.dt;
            res.crossed = true;
            break;
        }
    }
    res.t2_gaussian =
        fit_decay_time(res.time, res.coherence, 2.0, &res.gaussian_rms);
    res.t2_exponential =
        fit_decay_time(res.time, res.coherence, 1.0, &res.exponential_rms);

    const long gate_idx = std::lround(cfg.gate_time / cfg.dt);
    const double sigma_tg =
        gate_idx <= n ? res.coherence[gate_idx] : res.coherence.back();
    res.gate_fidelity = (2.0 + sigma_tg) / 3.0;
    return res;
}

// --- pulsed RB ---------------------------------------------------------------

namespace {

enum class Slot : std::uint8_t { idle, xp, xm, yp, ym };

void append_clifford_slots(std::vector<Slot>& out, int clifford) {
    const auto& el = CliffordGroup::instance().element(clifford);
    for (Generator g : el.generators) {
        switch (g) {
            case Generator::Id: out.push_back(Slot::idle); break;
            case Generator::XHalf: out.push_back(Slot::xp); break;
            case Generator::XHalfMinus: out.push_back(Slot::xm); break;
            case Generator::YHalf: out.push_back(Slot::yp); break;
            case Generator::YHalfMinus: out.push_back(Slot::ym); break;
            case Generator::XPi:
                out.push_back(Slot::xp);
                out.push_back(Slot::xp);
                break;
            case Generator::YPi:
                out.push_back(Slot::yp);
                out.push_back(Slot::yp);
                break;
        }
    }
}

// Normalized Gaussian pulse weights: n midpoint samples over one gate time,
// sigma = t_g/4, discrete sum exactly one.
std::vector<double> pulse_weights(int n) {
    std::vector<double> w(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = (i + 0.5) / n - 0.5;  // in units of t_g
        w[i] = std::exp(-u * u / (2.0 * 0.25 * 0.25));
        total += w[i];
    }
    for (double& x : w) x /= total;
    return w;
}

// exp(-i (hx X + hy Y + hz Z)) applied in place.
inline void apply_step(Cplx& s0, Cplx& s1, double hx, double hy, double hz) {
    const double n2 = hx * hx + hy * hy + hz * hz;
    if (n2 == 0.0) return;
    const double nrm = std::sqrt(n2);
    const double c = std::cos(nrm);
    const double k = std::sin(nrm) / nrm;
    const Cplx u00(c, -k * hz), u11(c, k * hz);
    const Cplx u01(-k * hy, -k * hx), u10(k * hy, -k * hx);
    const Cplx a = s0, b = s1;
    s0 = u00 * a + u01 * b;
    s1 = u10 * a + u11 * b;
}

struct ExperimentLayout {
    std::vector<Slot> slots;          // whole concatenated timeline
    std::vector<size_t> segment_end;  // slot count after each segment
};

ExperimentLayout build_layout(const std::vector<int>& m_grid, bool identity,
                              Rng& rng) {
    const auto& g = CliffordGroup::instance();
    ExperimentLayout lay;
    const int m_max = m_grid.back();
    std::vector<int> cliffs(m_max, 0);
    std::vector<int> inverses(m_grid.size(), 0);
    if (!identity) {
        int acc = -1;
        size_t gi = 0;
        for (int j = 0; j < m_max; ++j) {
            cliffs[j] = static_cast<int>(rng.uniform_int(24));
            acc = j == 0 ? cliffs[0] : g.product(cliffs[j], acc);
            while (gi < m_grid.size() && m_grid[gi] == j + 1)
                inverses[gi++] = g.inverse(acc);
        }
    }
    for (size_t s = 0; s < m_grid.size(); ++s) {
        for (int j = 0; j < m_grid[s]; ++j)
            append_clifford_slots(lay.slots, identity ? 0 : cliffs[j]);
        append_clifford_slots(lay.slots, identity ? 0 : inverses[s]);
        lay.segment_end.push_back(lay.slots.size());
    }
    return lay;
}

}  // namespace

DecaySeries run_flicker_rb(const FlickerRbConfig& cfg_in, int threads) {
    FlickerRbConfig cfg = cfg_in;
    if (cfg.m_grid.empty()) cfg.m_grid = default_m_grid(4096);
    if (cfg.k < 1) throw std::invalid_argument("run_flicker_rb: K < 1");
    if (cfg.pulse_points < 2)
        throw std::invalid_argument("run_flicker_rb: too few pulse samples");
    const auto weights = pulse_weights(cfg.pulse_points);
    const size_t n_m = cfg.m_grid.size();

    std::vector<double> survival(static_cast<size_t>(cfg.k) * n_m);

    auto run_experiment = [&](int e) {
        Rng rng(child_seed(cfg.seed, static_cast<std::uint64_t>(e), 0xF1));
        const ExperimentLayout lay =
            build_layout(cfg.m_grid, cfg.identity_gates, rng);
        const long n_steps =
            static_cast<long>(lay.slots.size()) * cfg.pulse_points;
        const FlickerProcess noise =
            sample_flicker(cfg.a_prime, cfg.dt, n_steps, cfg.n_signals, rng);

        const double amp = 1.0 / std::sqrt(2.0);
        long step = 0;
        size_t seg = 0;
        Cplx s0, s1;
        auto reset = [&]() {
            if (cfg.identity_gates) {
                s0 = amp;
                s1 = amp;
            } else {
                s0 = 1.0;
                s1 = 0.0;
            }
        };
        reset();
        for (size_t slot = 0; slot < lay.slots.size(); ++slot) {
            const Slot sl = lay.slots[slot];
            double sign = 0.0;
            bool is_x = true;
            switch (sl) {
                case Slot::idle: sign = 0.0; break;
                case Slot::xp: sign = 1.0; break;
                case Slot::xm: sign = -1.0; break;
                case Slot::yp: sign = 1.0; is_x = false; break;
                case Slot::ym: sign = -1.0; is_x = false; break;
            }
            for (int i = 0; i < cfg.pulse_points; ++i, ++step) {
                const double theta =
                    sl == Slot::idle ? 0.0 : sign * M_PI_2 * weights[i];
                const double hz = kTwoPi * noise.xi[step] * cfg.dt;
                apply_step(s0, s1, is_x ? 0.5 * theta : 0.0,
                           is_x ? 0.0 : 0.5 * theta, hz);
            }
            if (seg < lay.segment_end.size() &&
                slot + 1 == lay.segment_end[seg]) {
                const double f = cfg.identity_gates
                                     ? std::norm(amp * (s0 + s1))
                                     : std::norm(s0);
                survival[static_cast<size_t>(e) * n_m + seg] = f;
                ++seg;
                reset();
            }
        }
    };

    if (threads <= 1 || cfg.k < 2 * threads) {
        for (int e = 0; e < cfg.k; ++e) run_experiment(e);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&]() {
                for (int e = next.fetch_add(1); e < cfg.k;
                     e = next.fetch_add(1))
                    run_experiment(e);
            });
        for (auto& th : pool) th.join();
    }

    DecaySeries series;
    series.k = cfg.k;
    std::vector<double> column(cfg.k);
    for (size_t s = 0; s < n_m; ++s) {
        for (int e = 0; e < cfg.k; ++e)
            column[e] = survival[static_cast<size_t>(e) * n_m + s];
        const auto stats = mean_and_stderr(column);
        series.m.push_back(cfg.m_grid[s]);
        series.f_mean.push_back(stats.mean);
        series.f_stderr.push_back(stats.stderr_);
    }

    nlohmann::json meta;
    meta["protocol"] = "flicker-rb";
    meta["a_prime"] = cfg.a_prime;
    meta["k"] = cfg.k;
    meta["m_grid"] = cfg.m_grid;
    meta["identity_gates"] = cfg.identity_gates;
    meta["pulse_points"] = cfg.pulse_points;
    meta["n_signals"] = cfg.n_signals;
    meta["seed"] = cfg.seed;
    series.meta = meta.dump();
    return series;
}

double correlated_depolarizing_alpha(double phi) {
    return (1.0 + 2.0 * std::cos(2.0 * kTwoPi * phi)) / 3.0;
}

double calibrate_flicker_amplitude(double target_r, int m_max,
                                   std::uint64_t seed) {
    if (target_r <= 0.0 || target_r >= 0.3)
        throw std::invalid_argument("calibrate_flicker_amplitude: bad target");
    // Representative experiment size fixes the cutoffs.
    Rng layout_rng(child_seed(seed, 0, 0xCA));
    const ExperimentLayout lay =
        build_layout(default_m_grid(m_max), false, layout_rng);
    const long n_steps = static_cast<long>(lay.slots.size()) * 20;
    const double f_min = flicker_f_min(n_steps, 1.0);
    const double f_max = flicker_f_max(1.0);

    // Duration distribution of the Clifford gates in pulse slots.
    int duration_count[5] = {0, 0, 0, 0, 0};
    for (const auto& el : CliffordGroup::instance().elements()) {
        int slots = 0;
        for (Generator g : el.generators)
            slots += (g == Generator::XPi || g == Generator::YPi) ? 2 : 1;
        ++duration_count[slots];
    }

    // Pilot variance of the accumulated phase over windows of 1..4 gate
    // times, at unit amplitude and the experiment's own cutoffs.
    const double t_g = 20.0;
    const long pilot_steps = 1 << 14;
    const int pilot_reps = 64;
    double sum_w[5] = {0, 0, 0, 0, 0};
    double sum_w2[5] = {0, 0, 0, 0, 0};
    long count_w[5] = {0, 0, 0, 0, 0};
    for (int rep = 0; rep < pilot_reps; ++rep) {
        // Pilot tracks at unit amplitude with rates drawn against the real
        // experiment's cutoffs, over a shorter duration.
        Rng rng(child_seed(seed, rep + 1, 0xCB));
        const double log_ratio = std::log(f_max / f_min);
        std::vector<double> delta(pilot_steps, 0.0);
        double base = 0.0;
        for (int k = 0; k < 50; ++k) {
            const double rate = f_min * std::exp(log_ratio * rng.uniform01());
            RtnSignal s = sample_signal(rate, pilot_steps, rng);
            add_signal_track(s, 1.0, pilot_steps, delta, base);
        }
        std::vector<double> xi(pilot_steps);
        double level = base;
        for (long i = 0; i < pilot_steps; ++i) {
            level += delta[i];
            xi[i] = level;
        }
        // disjoint windows of L gate times
        for (int l = 1; l <= 4; ++l) {
            const long w = static_cast<long>(l * t_g);
            for (long start = 0; start + w <= pilot_steps; start += w) {
                double phi = 0.0;
                for (long i = start; i < start + w; ++i) phi += xi[i];
                sum_w[l] += phi;
                sum_w2[l] += phi * phi;
                ++count_w[l];
            }
        }
    }
    double var_l[5] = {0, 0, 0, 0, 0};
    for (int l = 1; l <= 4; ++l) {
        const double mean = sum_w[l] / count_w[l];
        var_l[l] = sum_w2[l] / count_w[l] - mean * mean;
    }

    // Quasi-static twirled error: r(A') averaged over the gate durations.
    auto mean_r = [&](double a) {
        double acc = 0.0;
        for (int l = 1; l <= 4; ++l) {
            const double v = a * a * var_l[l];
            const double alpha =
                (1.0 + 2.0 * std::exp(-8.0 * M_PI * M_PI * v)) / 3.0;
            acc += duration_count[l] * 0.5 * (1.0 - alpha);
        }
        return acc / 24.0;
    };
    double hi = 1e-6;
    while (mean_r(hi) < target_r) {
        hi *= 2.0;
        if (hi > 1.0)
            throw std::logic_error("calibrate_flicker_amplitude: no bracket");
    }
    double lo = 0.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (mean_r(mid) < target_r ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double calibrate_flicker_amplitude_rb(double target_r,
                                      const std::vector<int>& m_grid,
                                      std::uint64_t seed, int threads,
                                      int pilot_k) {
    const double a0 =
        calibrate_flicker_amplitude(target_r, m_grid.back(), seed);
    FlickerRbConfig pilot;
    pilot.a_prime = a0;
    pilot.k = pilot_k;
    pilot.m_grid = m_grid;
    pilot.seed = child_seed(seed, 0, 0xCD);
    const DecaySeries s = run_flicker_rb(pilot, threads);
    const FitResult f = fit(s, ModelKind::exponential);
    const double r0 = f.r_hat();
    if (!(r0 > 0.0)) return a0;
    // weak noise: fitted r scales as A'^2
    return a0 * std::sqrt(target_r / r0);
}

double calibrate_flicker_amplitude_ramsey(double target_gate_error,
                                          long n_steps, std::uint64_t seed,
                                          int threads) {
    if (target_gate_error <= 0.0 || target_gate_error >= 0.3)
        throw std::invalid_argument("calibrate ramsey: bad target");
    // sigma(t_g; A') = |E exp(-i 4 pi A' phi)| with phi the unit-amplitude
    // phase accumulated over one gate time. Sampling phi once at the target
    // experiment's own cutoffs lets the amplitude be solved by bisection on
    // the empirical characteristic function.
    const double sigma_target = 1.0 - 3.0 * target_gate_error;
    const long t_g = 20;
    const double f_min = flicker_f_min(n_steps, 1.0);
    const double f_max = flicker_f_max(1.0);
    const double log_ratio = std::log(f_max / f_min);

    const int samples = 30000;
    std::vector<double> phi(samples);
    auto fill = [&](int lo, int hi) {
        for (int s = lo; s < hi; ++s) {
            Rng rng(child_seed(seed, static_cast<std::uint64_t>(s), 0xCE));
            double acc = 0.0;
            for (int k = 0; k < 50; ++k) {
                const double rate =
                    f_min * std::exp(log_ratio * rng.uniform01());
                const RtnSignal sig =
                    sample_signal(rate, static_cast<double>(t_g), rng);
                // midpoint-sampled sum over the window
                int state = sig.initial_state;
                size_t e = 0;
                for (long i = 0; i < t_g; ++i) {
                    const double mid = i + 0.5;
                    while (e < sig.switch_times.size() &&
                           sig.switch_times[e] <= mid) {
                        state = -state;
                        ++e;
                    }
                    acc += state;
                }
            }
            phi[s] = acc;
        }
    };
    if (threads <= 1) {
        fill(0, samples);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (samples + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const int lo = t * chunk, hi = std::min(samples, lo + chunk);
            if (lo < hi) pool.emplace_back(fill, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    auto sigma_at = [&](double a) {
        Cplx acc(0, 0);
        for (double p : phi) acc += std::exp(Cplx(0.0, -2.0 * kTwoPi * a * p));
        return std::abs(acc) / samples;
    };
    double hi = 1e-6;
    while (sigma_at(hi) > sigma_target) {
        hi *= 2.0;
        if (hi > 1.0)
            throw std::logic_error("calibrate ramsey: no bracket");
    }
    double lo = 0.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (sigma_at(mid) > sigma_target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace rb
