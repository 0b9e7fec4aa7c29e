#pragma once

// Sparse spectra over the signed band and the operations connecting them to
// time-domain samples: pointwise evaluation, equispaced sample vectors, the
// aliasing projection (the identity dft(samples(m)) == alias_project(m) is
// what every recovery pipeline stands on), additive sample noise at an exact
// signal-to-noise ratio, structured support generators, and the spectrum
// file format used by the command line tools.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sft/numtheory.hpp"
#include "sft/rng.hpp"

namespace sft {

using cplx = std::complex<double>;

/// Finitely supported Fourier coefficients c_omega over the band
/// (-ceil(N/2), floor(N/2)]. Ordered storage keeps every iteration
/// deterministic. Zero coefficients are never stored.
struct SparseSpectrum {
    i64 N = 0;
    std::map<i64, cplx> entries;

    SparseSpectrum() = default;
    explicit SparseSpectrum(i64 bandwidth) : N(bandwidth) {
        if (bandwidth < 1) throw std::invalid_argument("SparseSpectrum: bandwidth must be >= 1");
    }

    void set(i64 omega, cplx value) {
        if (!in_band(omega, N)) throw std::invalid_argument("SparseSpectrum::set: frequency out of band");
        if (value == cplx{0.0, 0.0}) entries.erase(omega);
        else entries[omega] = value;
    }

    void add(i64 omega, cplx value) { set(omega, at(omega) + value); }

    cplx at(i64 omega) const {
        auto it = entries.find(omega);
        return it == entries.end() ? cplx{0.0, 0.0} : it->second;
    }

    std::size_t size() const { return entries.size(); }

    double l2_norm() const {
        double acc = 0.0;
        for (const auto& [w, c] : entries) acc += std::norm(c);
        return std::sqrt(acc);
    }
};

/// f(x) = sum_omega c_omega e^{i omega x}.
inline cplx evaluate(const SparseSpectrum& spectrum, double x) {
    cplx acc{0.0, 0.0};
    for (const auto& [w, c] : spectrum.entries) {
        const double a = static_cast<double>(w) * x;
        acc += c * cplx{std::cos(a), std::sin(a)};
    }
    return acc;
}

/// Equispaced samples f(2*pi*j/m), j = 0..m-1. Phases are reduced with exact
/// integer arithmetic (omega*j mod m), so the vector is exactly periodic in j.
/// Cost O(|S| * m); this is the direct-evaluation sampler the synthesized
/// acquisition paths are validated against.
inline std::vector<cplx> sample_vector(const SparseSpectrum& spectrum, i64 m) {
    if (m < 1) throw std::invalid_argument("sample_vector: m must be >= 1");
    std::vector<cplx> out(static_cast<std::size_t>(m), cplx{0.0, 0.0});
    for (const auto& [w, c] : spectrum.entries) {
        const i64 step = mod_floor(w, m);
        i64 phase = 0;
        for (i64 j = 0; j < m; ++j) {
            const double a = detail::two_pi * static_cast<double>(phase) / static_cast<double>(m);
            out[static_cast<std::size_t>(j)] += c * cplx{std::cos(a), std::sin(a)};
            phase += step;
            if (phase >= m) phase -= m;
        }
    }
    return out;
}

/// Aliased projection onto m bins: bin k holds sum of c_omega over all
/// omega = k (mod m). Equals dft(sample_vector(m)) exactly in exact
/// arithmetic; that identity is enforced to 1e-10 by the test suite.
inline std::vector<cplx> alias_project(const SparseSpectrum& spectrum, i64 m) {
    if (m < 1) throw std::invalid_argument("alias_project: m must be >= 1");
    std::vector<cplx> out(static_cast<std::size_t>(m), cplx{0.0, 0.0});
    for (const auto& [w, c] : spectrum.entries) out[static_cast<std::size_t>(mod_floor(w, m))] += c;
    return out;
}

/// Additive i.i.d. circularly symmetric complex Gaussian noise, rescaled so
/// that 20*log10(||samples|| / ||noise||) equals snr_db exactly.
/// snr_db = +infinity returns the input unchanged. All-zero inputs cannot
/// carry a finite SNR and are returned unchanged as well.
inline std::vector<cplx> add_noise(std::vector<cplx> samples, double snr_db, Rng& rng) {
    if (std::isinf(snr_db) && snr_db > 0) return samples;
    double signal_sq = 0.0;
    for (const auto& z : samples) signal_sq += std::norm(z);
    if (signal_sq == 0.0) return samples;
    std::vector<cplx> noise(samples.size());
    double noise_sq = 0.0;
    for (auto& z : noise) {
        z = rng.complex_gaussian();
        noise_sq += std::norm(z);
    }
    if (noise_sq == 0.0) return samples;
    const double target = std::sqrt(signal_sq) * std::pow(10.0, -snr_db / 20.0);
    const double scale = target / std::sqrt(noise_sq);
    for (std::size_t j = 0; j < samples.size(); ++j) samples[j] += noise[j] * scale;
    return samples;
}

/// Indices of the s largest-magnitude entries. Ties resolve toward smaller
/// frequency, which makes the selected set the lexicographically first best
/// s-term support.
inline std::vector<i64> best_s_term_support(const SparseSpectrum& spectrum, std::size_t s) {
    std::vector<std::pair<i64, double>> mags;
    mags.reserve(spectrum.size());
    for (const auto& [w, c] : spectrum.entries) mags.emplace_back(w, std::abs(c));
    std::sort(mags.begin(), mags.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (mags.size() > s) mags.resize(s);
    std::vector<i64> out;
    out.reserve(mags.size());
    for (const auto& [w, mag] : mags) out.push_back(w);
    std::sort(out.begin(), out.end());
    return out;
}

/// Residual after removing the best s-term approximation.
inline SparseSpectrum best_s_term_residual(const SparseSpectrum& spectrum, std::size_t s) {
    SparseSpectrum out = spectrum;
    for (i64 w : best_s_term_support(spectrum, s)) out.entries.erase(w);
    return out;
}

/// A structured support: n generator polynomials with their bandwidth.
struct StructuredSupport {
    i64 N = 0;
    std::vector<GeneratorPolynomial> generators;

    /// Union of all generated frequencies, deduplicated, ascending.
    std::vector<i64> frequencies() const {
        std::set<i64> s;
        for (const auto& g : generators)
            for (i64 w : g.values()) s.insert(w);
        return {s.begin(), s.end()};
    }
};

struct GeneratedSignal {
    StructuredSupport support;
    SparseSpectrum spectrum;
};

namespace detail {

/// Unit-magnitude uniform-phase coefficients on the union support. Frequencies
/// generated more than once keep their first coefficient (first-wins dedupe).
inline SparseSpectrum coefficients_on(const StructuredSupport& support, Rng& rng) {
    SparseSpectrum spec(support.N);
    for (const auto& g : support.generators)
        for (i64 w : g.values())
            if (spec.entries.find(w) == spec.entries.end()) spec.set(w, rng.unit_phase());
    return spec;
}

}  // namespace detail

/// n blocks of B consecutive frequencies with uniformly random starts. The
/// first frequency of each block is drawn from [band_min, band_max - B + 1],
/// so a block may begin at the very bottom of the band.
inline GeneratedSignal generate_block_support(Rng& rng, i64 N, int n, i64 B) {
    if (N < 2 || n < 1 || B < 1 || B > N) throw std::invalid_argument("generate_block_support: bad parameters");
    const i64 lo = band_min(N);
    const i64 hi = band_max(N) - B + 1;
    if (hi < lo) throw std::invalid_argument("generate_block_support: B exceeds the band");
    GeneratedSignal out;
    out.support.N = N;
    for (int j = 0; j < n; ++j) {
        const i64 first = rng.uniform_int(lo, hi);
        out.support.generators.push_back(GeneratorPolynomial{{first - 1, 1}, B});
    }
    out.spectrum = detail::coefficients_on(out.support, rng);
    return out;
}

/// n non-constant integer polynomials of degree <= d evaluated at 1..B.
/// Coefficients are drawn uniformly from ranges sized so the generated values
/// usually stay in band, then rejection keeps only valid generators.
inline GeneratedSignal generate_poly_support(Rng& rng, i64 N, int n, int d, i64 B) {
    if (N < 2 || n < 1 || d < 1 || B < 1 || B > N) throw std::invalid_argument("generate_poly_support: bad parameters");
    GeneratedSignal out;
    out.support.N = N;
    for (int j = 0; j < n; ++j) {
        GeneratorPolynomial poly;
        poly.eval_count = B;
        for (int attempt = 0; attempt < 10000; ++attempt) {
            poly.coeffs.assign(static_cast<std::size_t>(d) + 1, 0);
            // Budget each term |a_k| * B^k with an equal share of half the band.
            i64 pw = 1;
            for (int k = 0; k <= d; ++k) {
                i64 range = N / (2 * (d + 1) * pw);
                if (range < 1) range = 1;
                poly.coeffs[static_cast<std::size_t>(k)] = rng.uniform_int(-range, range);
                if (pw <= N) pw *= B;
            }
            if (poly.valid_for(N)) break;
            poly.coeffs.clear();
        }
        if (poly.coeffs.empty()) throw std::runtime_error("generate_poly_support: rejection budget exhausted");
        out.support.generators.push_back(poly);
    }
    out.spectrum = detail::coefficients_on(out.support, rng);
    return out;
}

namespace detail {

/// Shortest decimal representation that round-trips the double exactly.
inline std::string double_text(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc{}) throw std::runtime_error("double_text: formatting failed");
    return std::string(buf, res.ptr);
}

}  // namespace detail

/// Spectrum file format: a "#N=<bandwidth>" header line, then one
/// "omega<TAB>re<TAB>im" line per coefficient, frequencies ascending.
/// Values are written with shortest round-trip formatting, so
/// load(save(spectrum)) reproduces the spectrum bit for bit.
inline void save_spectrum(std::ostream& os, const SparseSpectrum& spectrum) {
    os << "#N=" << spectrum.N << "\n";
    for (const auto& [w, c] : spectrum.entries)
        os << w << '\t' << detail::double_text(c.real()) << '\t' << detail::double_text(c.imag()) << "\n";
}

inline SparseSpectrum load_spectrum(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("load_spectrum: empty input");
    if (line.rfind("#N=", 0) != 0) throw std::runtime_error("load_spectrum: missing #N= header");
    SparseSpectrum spec(std::stoll(line.substr(3)));
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        i64 omega = 0;
        double re = 0.0, im = 0.0;
        if (!(row >> omega >> re >> im))
            throw std::runtime_error("load_spectrum: malformed line " + std::to_string(line_no));
        spec.set(omega, cplx{re, im});
    }
    return spec;
}

}  // namespace sft
