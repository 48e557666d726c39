#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

#include "foliage/scene.hpp"

namespace foliage {

struct AcousticConfig {
    double f_lo = 60000.0;          ///< band lower edge, Hz
    double f_hi = 80000.0;          ///< band upper edge, Hz
    double speed_of_sound = 343.0;  ///< m/s
    double sample_rate = 400000.0;  ///< Hz
    std::size_t n = 16384;          ///< signal length, power of two
    double amplitude = 1.0;         ///< emitter peak gain
};

void validate(const AcousticConfig& cfg);

/// Gaussian main lobe over (azimuth, elevation).
struct SonarBeampatternParams {
    double a = 1.0; ///< rad^-2
    double b = 0.0;
    double c = 1.0;
    double x0 = 0.0; ///< lobe center azimuth, rad
    double y0 = 0.0; ///< lobe center elevation, rad
    double amplitude = 1.0;

    /// Axis-aligned lobe whose gain is half the peak at beamwidth/2 off axis.
    static SonarBeampatternParams from_beamwidth(double beamwidth_rad, double amplitude);
};

void validate(const SonarBeampatternParams& p); ///< quadratic form must be positive-definite

double sonar_beampattern(const SonarBeampatternParams& p, double az, double el);

/// Facet reflection lobe A(ka) * ka * cos(B(ka) * ka * beta), clamped to zero
/// past the first null. ka = 2*pi*radius*frequency/v. The amplitude and width
/// factors default to constants; a table of (ka, A, B) rows switches them to
/// piecewise-linear functions of ka (clamped at the ends).
struct LeafBeampatternParams {
    double amplitude = 1.0;
    double width = 1.0;
    std::vector<std::array<double, 3>> gain_table; ///< rows (ka, A, B), ka strictly increasing
};

void validate(const LeafBeampatternParams& p);

double leaf_beampattern(double beta, double facet_radius, double frequency,
                        const LeafBeampatternParams& p, double speed_of_sound);

/// Echo amplitude of one facet at one frequency: emitter gain x facet gain x
/// wavelength / (2 pi r^2).
double facet_amplitude(const FacetObservation& obs, double frequency, const AcousticConfig& cfg,
                       const SonarBeampatternParams& sonar, const LeafBeampatternParams& leaf);

/// Round-trip delay phase -2 pi f (2r / v).
double facet_phase(const FacetObservation& obs, double frequency, const AcousticConfig& cfg);

struct Spectrum {
    std::vector<std::complex<double>> bins; ///< length n, Hermitian-symmetric
};

/// Sums per-facet contributions on every FFT grid frequency inside the band
/// and mirrors them so the time signal is real. Bins outside the band and its
/// mirror stay exactly zero.
Spectrum assemble_spectrum(const std::vector<FacetObservation>& facets, const AcousticConfig& cfg,
                           const SonarBeampatternParams& sonar, const LeafBeampatternParams& leaf);

struct ImpulseResponse {
    std::vector<double> samples;
    double sample_rate = 0.0;
};

/// Inverse FFT of a Hermitian spectrum. Rejects non-Hermitian input; the
/// transform's residual imaginary part must stay below 1e-9 of the peak.
ImpulseResponse synthesize_impulse(const Spectrum& spectrum, const AcousticConfig& cfg);

} // namespace foliage
