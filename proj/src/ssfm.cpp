#include "fiberplan/ssfm.hpp"

#include <cmath>
#include <complex>

#include <unsupported/Eigen/FFT>

#include "fiberplan/kernel.hpp"
#include "fiberplan/rng.hpp"
#include "fiberplan/units.hpp"

namespace fiberplan {

using cd = std::complex<double>;

namespace {

// RNG stream bases
constexpr std::uint64_t kSymbolStream = 1ULL << 20;
constexpr std::uint64_t kAseStream = 2ULL << 20;
constexpr std::uint64_t kRxStream = 3ULL << 20;

bool is_pow2(long n) { return n > 0 && (n & (n - 1)) == 0; }

std::size_t bin_of(double freq, double df, std::size_t N) {
  const long k = std::lround(freq / df);
  const long n = static_cast<long>(N);
  return static_cast<std::size_t>(((k % n) + n) % n);
}

double bin_frequency(std::size_t j, std::size_t N, double df) {
  return (j < N / 2 ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(N)) * df;
}

// Adds circular white noise of per-sample variance `var` to a spectrum
// held as fwd-FFT bins (bin variance N * var).
void add_white_noise(Eigen::Ref<Eigen::VectorXcd> spectrum, double var, const CounterRng& rng) {
  const auto N = spectrum.size();
  const double sd = std::sqrt(static_cast<double>(N) * var);
  for (Eigen::Index j = 0; j < N; ++j) spectrum(j) += sd * rng.complex_normal(static_cast<std::uint64_t>(j));
}

cd draw_symbol(const std::string& fmt, const CounterRng& rng, std::uint64_t j) {
  if (fmt == "gaussian") return rng.complex_normal(j);
  const std::uint64_t b = rng.bits(j);
  auto pam = [](std::uint64_t bits, int levels) {
    const int idx = static_cast<int>(bits % static_cast<std::uint64_t>(levels));
    return 2.0 * idx - (levels - 1);
  };
  if (fmt == "bpsk") return {(b & 1) ? 1.0 : -1.0, 0.0};
  if (fmt == "qpsk") return cd((b & 1) ? 1.0 : -1.0, (b & 2) ? 1.0 : -1.0) / std::sqrt(2.0);
  if (fmt == "16qam") return cd(pam(b, 4), pam(b >> 8, 4)) / std::sqrt(10.0);
  if (fmt == "64qam") return cd(pam(b, 8), pam(b >> 8, 8)) / std::sqrt(42.0);
  throw ConfigError("ssfm: no symbol generator for modulation '" + fmt + "'");
}

}  // namespace

void PulseShape::check() const {
  if (rolloff < 0.0 || rolloff > 1.0) throw ConfigError("pulse rolloff must lie in [0, 1]");
  if (rolloff != 0.0) throw ConfigError("only the sinc pulse (rolloff 0) is synthesized");
}

void SsfmOptions::check(const SystemConfig& cfg) const {
  pulse.check();
  if (n_symbols < 1024) throw ConfigError("ssfm: at least 1024 symbols are needed for a stable variance");
  if (!is_pow2(n_symbols) || !is_pow2(samples_per_symbol))
    throw ConfigError("ssfm: symbol count and samples per symbol must be powers of two");
  if (steps_per_span < 10) throw ConfigError("ssfm: fewer than 10 steps per span");
  if (2 * guard_symbols >= n_symbols / 2) throw ConfigError("ssfm: guard leaves too few symbols");
  const auto& ch = cfg.channels;
  const double fs = samples_per_symbol * ch.symbol_rate;
  const double edge = std::abs(ch.offset(0)) + 0.5 * ch.bandwidth;
  if (2.0 * edge > fs) throw ConfigError("ssfm: WDM grid exceeds the simulation bandwidth");
  const double df = fs / (static_cast<double>(n_symbols) * samples_per_symbol);
  if (std::abs(ch.spacing / df - std::round(ch.spacing / df)) > 1e-6 || std::abs(ch.bandwidth - ch.symbol_rate) > 1e-6 * ch.symbol_rate)
    throw ConfigError("ssfm: channel grid must sit on FFT bins with bandwidth equal to the symbol rate");
  for (const auto& r : carrier_routes(cfg))
    if (r.active && (r.first_span != 0 || r.last_span + 1 != cfg.num_spans()))
      throw ConfigError("ssfm: every carrier must run over the whole link");
}

TxSymbols generate_symbols(const SystemConfig& cfg, const SsfmOptions& opt) {
  TxSymbols tx;
  tx.carriers.resize(cfg.num_carriers());
  for (std::size_t l = 0; l < cfg.num_carriers(); ++l) {
    Eigen::MatrixXcd s(opt.n_symbols, 2);
    for (int pol = 0; pol < 2; ++pol) {
      const CounterRng rng(opt.seed, kSymbolStream + 2 * l + static_cast<std::uint64_t>(pol));
      for (int j = 0; j < opt.n_symbols; ++j) s(j, pol) = draw_symbol(cfg.modulation, rng, static_cast<std::uint64_t>(j));
    }
    tx.carriers[l] = s;
  }
  return tx;
}

FieldFrame synthesize(const SystemConfig& cfg, const TxSymbols& tx, const Eigen::VectorXd& powers,
                      const SsfmOptions& opt) {
  opt.check(cfg);
  const auto routes = carrier_routes(cfg);
  const std::size_t D = cfg.num_modes(), ns = static_cast<std::size_t>(opt.n_symbols);
  const std::size_t N = ns * static_cast<std::size_t>(opt.samples_per_symbol);
  const double fs = opt.samples_per_symbol * cfg.channels.symbol_rate;
  const double df = fs / static_cast<double>(N);
  Eigen::FFT<double> fft;
  Eigen::MatrixXcd spec = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(2 * D));
  for (std::size_t ch = 0; ch < cfg.num_channels(); ++ch)
    for (std::size_t p = 0; p < D; ++p) {
      const std::size_t l = cfg.carrier(ch, p);
      if (!routes[l].active) continue;
      const double amp = opt.samples_per_symbol * std::sqrt(0.5 * powers(static_cast<Eigen::Index>(l)));
      const std::size_t base = bin_of(cfg.channels.offset(static_cast<int>(ch)), df, N);
      for (int pol = 0; pol < 2; ++pol) {
        Eigen::VectorXcd sym = tx.carriers[l].col(pol), S;
        fft.fwd(S, sym);
        for (std::size_t k = 0; k < ns; ++k) {
          const long kk = k < ns / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(ns);
          const std::size_t j = (base + static_cast<std::size_t>(kk + static_cast<long>(N))) % N;
          spec(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(2 * p + pol)) += amp * S(static_cast<Eigen::Index>(k));
        }
      }
    }
  FieldFrame out;
  out.sample_rate = fs;
  out.center_frequency = cfg.channels.center_frequency;
  out.samples.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(2 * D));
  for (Eigen::Index t = 0; t < spec.cols(); ++t) {
    Eigen::VectorXcd col = spec.col(t), x;
    fft.inv(x, col);
    out.samples.col(t) = x;
  }
  return out;
}

std::vector<double> log_step_positions(double length, double a, int K) {
  std::vector<double> z(static_cast<std::size_t>(K) + 1);
  const double span_loss = 1.0 - std::exp(-a * length);
  for (int k = 0; k <= K; ++k)
    z[static_cast<std::size_t>(k)] = a > 0.0 ? -std::log(1.0 - (double(k) / K) * span_loss) / a : length * k / K;
  z.back() = length;
  return z;
}

FieldFrame propagate(const FieldFrame& in, const SystemConfig& cfg, const Eigen::VectorXd& gains,
                     const SsfmOptions& opt) {
  opt.check(cfg);
  if (static_cast<std::size_t>(gains.size()) != cfg.num_spans()) throw ConfigError("dimension error: gains vs spans");
  const std::size_t D = cfg.num_modes();
  const auto N = in.samples.rows();
  const auto T = in.samples.cols();
  const double fs = in.sample_rate, df = fs / static_cast<double>(N);
  const double hv = constants::planck * cfg.channels.center_frequency;
  Eigen::FFT<double> fft;

  Eigen::MatrixXcd F(N, T);
  for (Eigen::Index t = 0; t < T; ++t) {
    Eigen::VectorXcd x = in.samples.col(t), X;
    fft.fwd(X, x);
    F.col(t) = X;
  }
  if (opt.ase) {
    const double nf = cfg.link.spans.front().amplifier.noise_figure;
    const double var = nf * (cfg.link.booster_gain - 1.0) * hv / 2.0 * fs;
    for (Eigen::Index t = 0; t < T; ++t)
      add_white_noise(F.col(t), var, CounterRng(opt.seed, kAseStream + static_cast<std::uint64_t>(t)));
  }

  Eigen::VectorXd omega(N);
  for (Eigen::Index j = 0; j < N; ++j)
    omega(j) = constants::two_pi * bin_frequency(static_cast<std::size_t>(j), static_cast<std::size_t>(N), df);

  Eigen::VectorXcd buf(N), tmp(N);
  for (std::size_t s = 0; s < cfg.num_spans(); ++s) {
    const FiberSpec& fib = cfg.fiber(s);
    if (fib.num_modes() != D) throw ConfigError("ssfm: all spans must carry the same mode set");
    const double L = cfg.link.spans[s].length;
    // reference attenuation for the step rule: the lowest-loss mode
    double a_ref = fib.modes.front().attenuation;
    for (const auto& m : fib.modes) a_ref = std::min(a_ref, m.attenuation);
    const auto z = log_step_positions(L, a_ref, opt.steps_per_span);

    // beta(omega) per mode, beta0 dropped (a constant phase per mode)
    std::vector<Eigen::VectorXd> beta(D);
    for (std::size_t p = 0; p < D; ++p) {
      ModeSpec m = fib.modes[p];
      m.beta0 = 0.0;
      beta[p].resize(N);
      for (Eigen::Index j = 0; j < N; ++j) beta[p](j) = beta_profile(m, omega(j) / constants::two_pi);
    }
    Eigen::MatrixXd w(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(D));
    for (std::size_t p = 0; p < D; ++p)
      for (std::size_t q = 0; q < D; ++q)
        w(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) =
            opt.gamma_scale * fib.gamma * fib.coupling_sym(p, q) * (p == q ? 8.0 / 9.0 : 4.0 / 3.0);

    auto linear = [&](double h) {
      if (h <= 0.0) return;
      for (std::size_t p = 0; p < D; ++p) {
        const double loss = std::exp(-0.5 * fib.modes[p].attenuation * h);
        for (Eigen::Index j = 0; j < N; ++j) {
          const cd hj = loss * std::polar(1.0, -beta[p](j) * h);
          F(j, static_cast<Eigen::Index>(2 * p)) *= hj;
          F(j, static_cast<Eigen::Index>(2 * p + 1)) *= hj;
        }
      }
    };

    Eigen::MatrixXcd A(N, T);
    Eigen::VectorXd I(static_cast<Eigen::Index>(D));
    Eigen::VectorXd phi(static_cast<Eigen::Index>(D));
    double pending = 0.0;
    for (int k = 0; k < opt.steps_per_span; ++k) {
      const double h = z[static_cast<std::size_t>(k) + 1] - z[static_cast<std::size_t>(k)];
      linear(pending + 0.5 * h);
      if (opt.gamma_scale != 0.0) {
        for (Eigen::Index t = 0; t < T; ++t) {
          buf = F.col(t);
          fft.inv(tmp, buf);
          A.col(t) = tmp;
        }
        for (Eigen::Index j = 0; j < N; ++j) {
          for (std::size_t p = 0; p < D; ++p)
            I(static_cast<Eigen::Index>(p)) = std::norm(A(j, static_cast<Eigen::Index>(2 * p))) +
                                              std::norm(A(j, static_cast<Eigen::Index>(2 * p + 1)));
          phi.noalias() = w * I;
          for (std::size_t p = 0; p < D; ++p) {
            const cd r = std::polar(1.0, -phi(static_cast<Eigen::Index>(p)) * h);
            A(j, static_cast<Eigen::Index>(2 * p)) *= r;
            A(j, static_cast<Eigen::Index>(2 * p + 1)) *= r;
          }
        }
        for (Eigen::Index t = 0; t < T; ++t) {
          buf = A.col(t);
          fft.fwd(tmp, buf);
          F.col(t) = tmp;
        }
      }
      pending = 0.5 * h;
    }
    linear(pending);

    const double G = gains(static_cast<Eigen::Index>(s));
    F *= std::sqrt(G);
    if (opt.ase) {
      const double var = cfg.link.spans[s].amplifier.noise_figure * (G - 1.0) * hv / 2.0 * fs;
      for (Eigen::Index t = 0; t < T; ++t)
        add_white_noise(F.col(t), var,
                        CounterRng(opt.seed, kAseStream + (s + 1) * 256 + static_cast<std::uint64_t>(t)));
    }
  }

  FieldFrame out;
  out.sample_rate = fs;
  out.center_frequency = in.center_frequency;
  out.samples.resize(N, T);
  for (Eigen::Index t = 0; t < T; ++t) {
    buf = F.col(t);
    fft.inv(tmp, buf);
    out.samples.col(t) = tmp;
  }
  return out;
}

std::vector<CarrierMeasurement> receive_and_measure(const FieldFrame& rx, const SystemConfig& cfg,
                                                    const TxSymbols& tx, const SsfmOptions& opt) {
  opt.check(cfg);
  const auto routes = carrier_routes(cfg);
  const std::size_t D = cfg.num_modes(), ns = static_cast<std::size_t>(opt.n_symbols);
  const auto N = rx.samples.rows();
  const double fs = rx.sample_rate, df = fs / static_cast<double>(N);
  Eigen::FFT<double> fft;

  // accumulated dispersion per mode over the whole link
  std::vector<double> len_by_span(cfg.num_spans());
  for (std::size_t s = 0; s < cfg.num_spans(); ++s) len_by_span[s] = cfg.link.spans[s].length;

  std::vector<CarrierMeasurement> out(cfg.num_carriers());
  for (std::size_t p = 0; p < D; ++p) {
    for (int pol = 0; pol < 2; ++pol) {
      const auto t = static_cast<Eigen::Index>(2 * p + static_cast<std::size_t>(pol));
      Eigen::VectorXcd x = rx.samples.col(t), X;
      fft.fwd(X, x);
      if (opt.receiver_noise) {
        const double var = cfg.receiver_noise / (2.0 * cfg.channels.bandwidth) * fs;
        add_white_noise(X, var, CounterRng(opt.seed, kRxStream + static_cast<std::uint64_t>(t)));
      }
      for (Eigen::Index j = 0; j < N; ++j) {
        const double f = bin_frequency(static_cast<std::size_t>(j), static_cast<std::size_t>(N), df);
        double phase = 0.0;
        for (std::size_t s = 0; s < cfg.num_spans(); ++s) {
          ModeSpec m = cfg.fiber(s).modes[p];
          m.beta0 = 0.0;
          phase += beta_profile(m, f) * len_by_span[s];
        }
        X(j) *= std::polar(1.0, phase);
      }
      for (std::size_t ch = 0; ch < cfg.num_channels(); ++ch) {
        const std::size_t l = cfg.carrier(ch, p);
        if (!routes[l].active) continue;
        const std::size_t base = bin_of(cfg.channels.offset(static_cast<int>(ch)), df, static_cast<std::size_t>(N));
        Eigen::VectorXcd S(static_cast<Eigen::Index>(ns)), y;
        for (std::size_t k = 0; k < ns; ++k) {
          const long kk = k < ns / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(ns);
          S(static_cast<Eigen::Index>(k)) = X(static_cast<Eigen::Index>((base + static_cast<std::size_t>(kk + N)) % static_cast<std::size_t>(N)));
        }
        fft.inv(y, S);
        const auto ref = tx.carriers[l].col(pol);
        const auto g = static_cast<Eigen::Index>(opt.guard_symbols);
        const auto len = static_cast<Eigen::Index>(ns) - 2 * g;
        const Eigen::VectorXcd zr = ref.segment(g, len);
        const Eigen::VectorXcd zy = y.segment(g, len);
        const cd c = zr.dot(zy) / zr.squaredNorm();  // dot conjugates the first argument
        const double sig = std::norm(c) * zr.squaredNorm();
        const double err = (zy - c * zr).squaredNorm();
        auto& m = out[l];
        m.active = true;
        // accumulate signal in snr, error in nli_power; finalized below
        m.snr += sig;
        m.nli_power += err;
      }
    }
  }
  for (auto& m : out) {
    if (!m.active) continue;
    const double sig = m.snr, err = m.nli_power;
    m.snr = err > 0.0 ? sig / err : std::numeric_limits<double>::infinity();
    m.snr_db = linear_to_db(m.snr);
    m.nli_power = 0.0;
  }
  return out;
}

std::vector<CarrierMeasurement> run_ssfm(const SystemConfig& cfg, const Eigen::VectorXd& powers,
                                         const Eigen::VectorXd& gains, const SsfmOptions& opt) {
  const TxSymbols tx = generate_symbols(cfg, opt);
  const FieldFrame launch = synthesize(cfg, tx, powers, opt);
  auto noisy = receive_and_measure(propagate(launch, cfg, gains, opt), cfg, tx, opt);
  SsfmOptions quiet = opt;
  quiet.ase = false;
  quiet.receiver_noise = false;
  const auto clean = receive_and_measure(propagate(launch, cfg, gains, quiet), cfg, tx, quiet);
  double net = 1.0;
  for (std::size_t s = 0; s < cfg.num_spans(); ++s) net *= gains(static_cast<Eigen::Index>(s)) * span_transmittance(cfg, s);
  for (std::size_t l = 0; l < noisy.size(); ++l) {
    if (!noisy[l].active) continue;
    noisy[l].nli_power = powers(static_cast<Eigen::Index>(l)) * net / clean[l].snr;
  }
  return noisy;
}

}  // namespace fiberplan
