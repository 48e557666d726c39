#include "foliage/acoustics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "foliage/errors.hpp"

namespace foliage {

void validate(const AcousticConfig& cfg) {
    if (!(cfg.f_lo > 0.0) || !(cfg.f_hi > cfg.f_lo)) {
        throw ValidationError("acoustic: band must satisfy 0 < f_lo < f_hi");
    }
    if (!(cfg.sample_rate > 0.0) || !(cfg.f_hi < cfg.sample_rate / 2.0)) {
        throw ValidationError("acoustic: band upper edge must lie below the Nyquist frequency");
    }
    if (cfg.n < 2 || (cfg.n & (cfg.n - 1)) != 0) {
        throw ValidationError("acoustic: signal length must be a power of two");
    }
    if (!(cfg.speed_of_sound > 0.0)) throw ValidationError("acoustic: speed of sound must be > 0");
    if (!(cfg.amplitude >= 0.0)) throw ValidationError("acoustic: amplitude must be >= 0");
}

SonarBeampatternParams SonarBeampatternParams::from_beamwidth(double beamwidth_rad, double amplitude) {
    if (!(beamwidth_rad > 0.0)) throw ValidationError("sonar beampattern: beamwidth must be > 0");
    SonarBeampatternParams p;
    // exp(-a (BW/2)^2) = 1/2 at the half-beamwidth angle
    p.a = 4.0 * std::numbers::ln2 / (beamwidth_rad * beamwidth_rad);
    p.b = 0.0;
    p.c = p.a;
    p.x0 = 0.0;
    p.y0 = 0.0;
    p.amplitude = amplitude;
    return p;
}

void validate(const SonarBeampatternParams& p) {
    if (!(p.a > 0.0) || !(p.c > 0.0) || !(p.a * p.c - p.b * p.b > 0.0)) {
        throw ValidationError("sonar beampattern: quadratic form must be positive-definite");
    }
    if (!(p.amplitude >= 0.0)) throw ValidationError("sonar beampattern: amplitude must be >= 0");
}

double sonar_beampattern(const SonarBeampatternParams& p, double az, double el) {
    const double u = az - p.x0;
    const double w = el - p.y0;
    return p.amplitude * std::exp(-(p.a * u * u + 2.0 * p.b * u * w + p.c * w * w));
}

void validate(const LeafBeampatternParams& p) {
    if (p.gain_table.empty()) {
        if (!(p.amplitude > 0.0) || !(p.width > 0.0)) {
            throw ValidationError("leaf beampattern: amplitude and width must be > 0");
        }
        return;
    }
    double prev = -1.0;
    for (const auto& row : p.gain_table) {
        if (!(row[0] >= 0.0) || row[0] <= prev) {
            throw ValidationError("leaf beampattern: table ka values must be >= 0 and strictly increasing");
        }
        if (!(row[1] > 0.0) || !(row[2] > 0.0)) {
            throw ValidationError("leaf beampattern: table gains must be > 0");
        }
        prev = row[0];
    }
}

namespace {

/// Piecewise-linear A(ka), B(ka) lookup, clamped at the table ends.
std::pair<double, double> leaf_gain_factors(const LeafBeampatternParams& p, double ka) {
    if (p.gain_table.empty()) return {p.amplitude, p.width};
    const auto& tab = p.gain_table;
    if (ka <= tab.front()[0]) return {tab.front()[1], tab.front()[2]};
    if (ka >= tab.back()[0]) return {tab.back()[1], tab.back()[2]};
    std::size_t hi = 1;
    while (tab[hi][0] < ka) ++hi;
    const double span = tab[hi][0] - tab[hi - 1][0];
    const double t = (ka - tab[hi - 1][0]) / span;
    return {tab[hi - 1][1] + t * (tab[hi][1] - tab[hi - 1][1]),
            tab[hi - 1][2] + t * (tab[hi][2] - tab[hi - 1][2])};
}

} // namespace

double leaf_beampattern(double beta, double facet_radius, double frequency,
                        const LeafBeampatternParams& p, double speed_of_sound) {
    if (!(facet_radius > 0.0)) throw ValidationError("leaf beampattern: facet radius must be > 0");
    if (!(frequency > 0.0)) throw ValidationError("leaf beampattern: frequency must be > 0");
    if (!(speed_of_sound > 0.0)) throw ValidationError("leaf beampattern: speed of sound must be > 0");
    const double ka = 2.0 * std::numbers::pi * facet_radius * frequency / speed_of_sound;
    const auto [amp, width] = leaf_gain_factors(p, ka);
    const double arg = width * ka * beta;
    if (arg >= std::numbers::pi / 2.0) return 0.0; // past the first null the facet stops contributing
    return std::max(0.0, amp * ka * std::cos(arg));
}

double facet_amplitude(const FacetObservation& obs, double frequency, const AcousticConfig& cfg,
                       const SonarBeampatternParams& sonar, const LeafBeampatternParams& leaf) {
    if (!(obs.r > 0.0)) throw ValidationError("facet amplitude: range must be > 0");
    const double gain = sonar_beampattern(sonar, obs.az, obs.el) *
                        leaf_beampattern(obs.beta, obs.radius, frequency, leaf, cfg.speed_of_sound);
    const double wavelength = cfg.speed_of_sound / frequency;
    return gain * (wavelength / (2.0 * std::numbers::pi * obs.r * obs.r));
}

double facet_phase(const FacetObservation& obs, double frequency, const AcousticConfig& cfg) {
    return -2.0 * std::numbers::pi * frequency * (2.0 * obs.r / cfg.speed_of_sound);
}

Spectrum assemble_spectrum(const std::vector<FacetObservation>& facets, const AcousticConfig& cfg,
                           const SonarBeampatternParams& sonar, const LeafBeampatternParams& leaf) {
    validate(cfg);
    validate(sonar);
    validate(leaf);

    Spectrum spectrum;
    spectrum.bins.assign(cfg.n, {0.0, 0.0});

    const double bin_hz = cfg.sample_rate / static_cast<double>(cfg.n);
    const std::size_t k_lo = static_cast<std::size_t>(std::ceil(cfg.f_lo / bin_hz));
    const std::size_t k_hi = static_cast<std::size_t>(std::floor(cfg.f_hi / bin_hz));

    for (std::size_t k = k_lo; k <= k_hi; ++k) {
        const double f_k = static_cast<double>(k) * bin_hz;
        std::complex<double> sum{0.0, 0.0};
        for (const auto& obs : facets) {
            const double amp = facet_amplitude(obs, f_k, cfg, sonar, leaf);
            const double phase = facet_phase(obs, f_k, cfg);
            sum += std::complex<double>{amp * std::cos(phase), amp * std::sin(phase)};
        }
        spectrum.bins[k] = sum;
        spectrum.bins[cfg.n - k] = std::conj(sum);
    }
    return spectrum;
}

ImpulseResponse synthesize_impulse(const Spectrum& spectrum, const AcousticConfig& cfg) {
    validate(cfg);
    if (spectrum.bins.size() != cfg.n) {
        throw ValidationError("impulse synthesis: spectrum length does not match the configured signal length");
    }
    const std::size_t n = cfg.n;
    if (spectrum.bins[0].imag() != 0.0 || spectrum.bins[n / 2].imag() != 0.0) {
        throw ValidationError("impulse synthesis: spectrum is not conjugate-symmetric");
    }
    for (std::size_t k = 1; k < n / 2; ++k) {
        if (spectrum.bins[n - k] != std::conj(spectrum.bins[k])) {
            throw ValidationError("impulse synthesis: spectrum is not conjugate-symmetric");
        }
    }

    std::vector<std::complex<double>> out(n);
    detail::ifft_unnormalized(spectrum.bins.data(), out.data(), n);

    ImpulseResponse impulse;
    impulse.sample_rate = cfg.sample_rate;
    impulse.samples.resize(n);
    const double scale = 1.0 / static_cast<double>(n);
    double peak = 0.0;
    double max_imag = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double re = out[j].real() * scale;
        impulse.samples[j] = re;
        peak = std::max(peak, std::abs(re));
        max_imag = std::max(max_imag, std::abs(out[j].imag() * scale));
    }
    if (max_imag > 1e-9 * peak) {
        throw ValidationError("impulse synthesis: transform produced a non-real signal");
    }
    return impulse;
}

} // namespace foliage
