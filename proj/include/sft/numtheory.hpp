#pragma once

// Integer plumbing for sparse recovery over the signed frequency band
// (-ceil(N/2), floor(N/2)]: primality, Bezout coefficients, Chinese
// remaindering, residue hashing of structured supports, and the prime
// sampling schemes the recovery pipelines are built on.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sft {

using i64 = std::int64_t;

namespace detail {
inline constexpr double two_pi = 6.283185307179586476925286766559;
}  // namespace detail

/// Mathematical (floor) modulus: result in [0, m) for m > 0, any sign of a.
inline i64 mod_floor(i64 a, i64 m) {
    const i64 r = a % m;
    return r < 0 ? r + m : r;
}

/// Deterministic primality by trial division up to sqrt(x).
inline bool is_prime(i64 x) {
    if (x < 2) return false;
    if (x < 4) return true;
    if (x % 2 == 0) return false;
    for (i64 d = 3; d * d <= x; d += 2)
        if (x % d == 0) return false;
    return true;
}

/// Smallest prime strictly greater than x.
inline i64 next_prime(i64 x) {
    i64 p = x < 1 ? 2 : x + 1;
    while (!is_prime(p)) ++p;
    return p;
}

/// All primes <= limit, ascending (sieve of Eratosthenes). Empty for limit < 2.
inline std::vector<i64> primes_up_to(i64 limit) {
    std::vector<i64> out;
    if (limit < 2) return out;
    std::vector<bool> composite(static_cast<std::size_t>(limit) + 1, false);
    for (i64 p = 2; p <= limit; ++p) {
        if (composite[static_cast<std::size_t>(p)]) continue;
        out.push_back(p);
        for (i64 q = p * p; q <= limit; q += p) composite[static_cast<std::size_t>(q)] = true;
    }
    return out;
}

struct Egcd {
    i64 g;  // gcd, always > 0
    i64 v;  // g = v*a + w*b
    i64 w;
};

/// Extended Euclid. Throws if both arguments are zero.
inline Egcd extended_gcd(i64 a, i64 b) {
    if (a == 0 && b == 0) throw std::invalid_argument("extended_gcd: gcd(0,0) undefined");
    i64 old_r = a, r = b;
    i64 old_s = 1, s = 0;
    i64 old_t = 0, t = 1;
    while (r != 0) {
        const i64 q = old_r / r;
        i64 tmp = old_r - q * r; old_r = r; r = tmp;
        tmp = old_s - q * s; old_s = s; s = tmp;
        tmp = old_t - q * t; old_t = t; t = tmp;
    }
    if (old_r < 0) { old_r = -old_r; old_s = -old_s; old_t = -old_t; }
    return {old_r, old_s, old_t};
}

inline i64 gcd_i64(i64 a, i64 b) {
    while (b != 0) { const i64 t = a % b; a = b; b = t; }
    return a < 0 ? -a : a;
}

/// Modular inverse of a mod m; requires gcd(a, m) == 1.
inline i64 mod_inverse(i64 a, i64 m) {
    const Egcd e = extended_gcd(mod_floor(a, m), m);
    if (e.g != 1) throw std::invalid_argument("mod_inverse: arguments not coprime");
    return mod_floor(e.v, m);
}

/// Unique x in [0, prod(moduli)) with x = r_i (mod m_i) for every pair.
/// Moduli must be pairwise coprime; throws otherwise.
inline i64 crt_reconstruct(std::span<const std::pair<i64, i64>> residue_pairs) {
    if (residue_pairs.empty()) throw std::invalid_argument("crt_reconstruct: empty input");
    for (std::size_t i = 0; i < residue_pairs.size(); ++i) {
        if (residue_pairs[i].second < 1)
            throw std::invalid_argument("crt_reconstruct: modulus must be positive");
        for (std::size_t j = i + 1; j < residue_pairs.size(); ++j)
            if (gcd_i64(residue_pairs[i].second, residue_pairs[j].second) != 1)
                throw std::invalid_argument("crt_reconstruct: moduli not pairwise coprime");
    }
    i64 x = mod_floor(residue_pairs[0].first, residue_pairs[0].second);
    i64 modulus = residue_pairs[0].second;
    for (std::size_t i = 1; i < residue_pairs.size(); ++i) {
        const i64 mi = residue_pairs[i].second;
        const i64 ri = mod_floor(residue_pairs[i].first, mi);
        const i64 inv = mod_inverse(modulus % mi, mi);
        const i64 delta = mod_floor((ri - x) % mi, mi);
        x += modulus * mod_floor(delta * inv % mi, mi);
        modulus *= mi;
    }
    return x;
}

/// Lowest frequency of the band (-ceil(N/2), floor(N/2)].
inline i64 band_min(i64 N) { return -((N + 1) / 2) + 1; }
/// Highest frequency of the band.
inline i64 band_max(i64 N) { return N / 2; }

inline bool in_band(i64 omega, i64 N) { return omega >= band_min(N) && omega <= band_max(N); }

/// Map a residue x in [0, P), P >= N, to the band frequency it represents,
/// or nothing when x corresponds to no in-band frequency.
inline std::optional<i64> to_signed_band(i64 x, i64 P, i64 N) {
    if (P < N) throw std::invalid_argument("to_signed_band: P must be >= N");
    if (x < 0 || x >= P) throw std::invalid_argument("to_signed_band: x out of [0, P)");
    if (x <= band_max(N)) return x;
    if (x - P >= band_min(N)) return x - P;
    return std::nullopt;
}

/// Integer polynomial P(x) = a_0 + a_1 x + ... + a_d x^d together with its
/// evaluation range {1, ..., eval_count}; one structured support generator.
struct GeneratorPolynomial {
    std::vector<i64> coeffs;  // a_0 ... a_d
    i64 eval_count = 0;       // B

    i64 operator()(i64 x) const {
        i64 acc = 0;
        for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * x + coeffs[k];
        return acc;
    }

    /// Highest index with a nonzero coefficient; 0 for the constant polynomial.
    int degree() const {
        for (std::size_t k = coeffs.size(); k-- > 1;)
            if (coeffs[k] != 0) return static_cast<int>(k);
        return 0;
    }

    bool non_constant() const { return degree() >= 1; }

    /// All generated frequencies P(1), ..., P(B) (with multiplicity).
    std::vector<i64> values() const {
        std::vector<i64> out;
        out.reserve(static_cast<std::size_t>(eval_count));
        for (i64 x = 1; x <= eval_count; ++x) out.push_back((*this)(x));
        return out;
    }

    /// Generators must be non-constant with all generated values inside the band.
    bool valid_for(i64 N) const {
        if (eval_count < 1 || !non_constant()) return false;
        for (i64 x = 1; x <= eval_count; ++x)
            if (!in_band((*this)(x), N)) return false;
        return true;
    }
};

/// A modulus p > eval_count hashes the generated set well when the values land
/// in more than one residue class mod p.
inline bool hashes_well(const GeneratorPolynomial& poly, i64 p) {
    if (p <= poly.eval_count) throw std::invalid_argument("hashes_well: requires p > B");
    const i64 first = mod_floor(poly(1), p);
    for (i64 x = 2; x <= poly.eval_count; ++x)
        if (mod_floor(poly(x), p) != first) return true;
    return false;
}

/// Coefficient characterization of well-hashing for prime p > B > d: some
/// non-constant coefficient is not divisible by p.
inline bool hashes_well_by_coeffs(const GeneratorPolynomial& poly, i64 p) {
    if (p <= poly.eval_count) throw std::invalid_argument("hashes_well_by_coeffs: requires p > B");
    for (std::size_t k = 1; k < poly.coeffs.size(); ++k)
        if (mod_floor(poly.coeffs[k], p) != 0) return true;
    return false;
}

/// Largest number of generated frequencies (counted per generator, i.e. with
/// multiplicity across sets) sharing one residue class mod p.
inline i64 max_residue_multiplicity(std::span<const GeneratorPolynomial> polys, i64 p) {
    std::vector<i64> hits;
    for (const auto& poly : polys) {
        std::vector<i64> seen;  // distinct frequencies of this generator's set
        for (i64 x = 1; x <= poly.eval_count; ++x) {
            const i64 w = poly(x);
            if (std::find(seen.begin(), seen.end(), w) == seen.end()) seen.push_back(w);
        }
        for (i64 w : seen) hits.push_back(mod_floor(w, p));
    }
    if (hits.empty()) return 0;
    std::sort(hits.begin(), hits.end());
    i64 best = 0, run = 0;
    for (std::size_t i = 0; i < hits.size(); ++i) {
        run = (i > 0 && hits[i] == hits[i - 1]) ? run + 1 : 1;
        best = std::max(best, run);
    }
    return best;
}

enum class SchemeMode { general, single_prime, block };

/// The three coprime prime families driving acquisition and reconstruction:
///  - crt_primes (t_1 < ... < t_L): small primes completing CRT coverage;
///  - vote_primes (s_1 < ... < s_K): per-column majority-vote moduli;
///  - hash_moduli (u_1 < ... < u_M): residue classes splitting the spectrum
///    into columns (a single power of two in block mode).
struct PrimeScheme {
    SchemeMode mode = SchemeMode::general;
    i64 N = 0;
    int n = 0, d = 0;
    i64 B = 0;
    int k_mult = 0;
    std::vector<i64> crt_primes;   // t
    std::vector<i64> vote_primes;  // s
    std::vector<i64> hash_moduli;  // u

    std::size_t L() const { return crt_primes.size(); }
    std::size_t K() const { return vote_primes.size(); }
    std::size_t M() const { return hash_moduli.size(); }

    i64 crt_product() const {
        i64 p = 1;
        for (i64 t : crt_primes) p *= t;
        return p;
    }

    /// Sampling cost: sum of all distinct sample-grid lengths s_k * t_l * u_m
    /// (t_0 = 1 included). Lengths are distinct by unique factorization.
    i64 total_samples() const {
        i64 st = 0;
        for (i64 s : vote_primes) {
            st += s;
            for (i64 t : crt_primes) st += s * t;
        }
        i64 total = 0;
        for (i64 u : hash_moduli) total += st * u;
        return total;
    }

    /// Per-column sparsity bound the pipelines solve against.
    int column_sparsity() const { return mode == SchemeMode::block ? n : n * d; }

    void validate() const;
};

namespace detail {

/// Largest e >= 0 with base^e <= num/den, integer-exact.
inline int floor_log_ratio(i64 base, i64 num, i64 den) {
    if (base < 2 || den <= 0 || num <= 0) throw std::invalid_argument("floor_log_ratio: bad arguments");
    int e = 0;
    i64 acc = den;
    while (acc <= num / base) { acc *= base; ++e; }
    return e;
}

/// Smallest primes (ascending, skipping `exclude`) whose product first
/// reaches num/den: prod_{l<L} < num/den <= prod_L. Empty when num/den <= 1.
inline std::vector<i64> crt_prime_list(i64 num, i64 den, i64 first, i64 exclude) {
    std::vector<i64> t;
    i64 prod = 1;
    i64 p = first;
    if (!is_prime(p)) p = next_prime(p - 1);
    while (prod * den < num) {  // prod < num/den
        while (exclude % p == 0) p = next_prime(p);
        t.push_back(p);
        prod *= p;
        p = next_prime(p);
    }
    return t;
}

inline std::vector<i64> consecutive_primes(i64 above, std::size_t count, i64 exclude) {
    std::vector<i64> out;
    i64 p = above;
    while (out.size() < count) {
        p = next_prime(p);
        if (exclude % p == 0) continue;
        out.push_back(p);
    }
    return out;
}

}  // namespace detail

inline void PrimeScheme::validate() const {
    auto fail = [](const std::string& msg) { throw std::runtime_error("PrimeScheme: " + msg); };
    if (N < 2 || vote_primes.empty() || hash_moduli.empty()) fail("incomplete scheme");
    auto ascending = [](const std::vector<i64>& v) {
        for (std::size_t i = 1; i < v.size(); ++i)
            if (v[i - 1] >= v[i]) return false;
        return true;
    };
    if (!ascending(crt_primes) || !ascending(vote_primes) || !ascending(hash_moduli))
        fail("families must be strictly ascending");
    std::vector<i64> all;
    all.insert(all.end(), crt_primes.begin(), crt_primes.end());
    all.insert(all.end(), vote_primes.begin(), vote_primes.end());
    all.insert(all.end(), hash_moduli.begin(), hash_moduli.end());
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j)
            if (gcd_i64(all[i], all[j]) != 1) fail("families not pairwise coprime");
    if (!crt_primes.empty() && crt_primes.back() >= vote_primes.front())
        fail("crt primes must stay below s_1");
    // Reconstruction coverage: s_k * u_m * prod(t) >= N for every k, m.
    const i64 tp = crt_product();
    if (vote_primes.front() * hash_moduli.front() * tp < N) fail("CRT coverage below bandwidth");
}

/// Scheme for polynomially structured supports (n generators, degree <= d,
/// evaluated at 1..B): hashing moduli sit above the vote primes so that all
/// three families are freely coprime.
inline PrimeScheme build_scheme_general(i64 N, int n, int d, i64 B, int k_mult = 8) {
    if (N < 2 || n < 1 || d < 1 || B < 1 || B >= N || k_mult < 1)
        throw std::invalid_argument("build_scheme_general: bad parameters");
    PrimeScheme sch;
    sch.mode = SchemeMode::general;
    sch.N = N; sch.n = n; sch.d = d; sch.B = B; sch.k_mult = k_mult;
    const i64 dn = static_cast<i64>(d) * n;
    sch.crt_primes = detail::crt_prime_list(N, B * dn, 2, 1);
    const i64 tL = sch.crt_primes.empty() ? 0 : sch.crt_primes.back();
    const i64 s1 = next_prime(std::max<i64>(dn, tL));
    const std::size_t K = static_cast<std::size_t>(k_mult) * static_cast<std::size_t>(dn) *
                              static_cast<std::size_t>(detail::floor_log_ratio(s1, N, B)) + 1;
    sch.vote_primes = detail::consecutive_primes(s1 - 1, K, 1);
    const i64 u1 = next_prime(std::max<i64>(B, sch.vote_primes.back()));
    const std::size_t M = 2 * static_cast<std::size_t>(n + 1) *
                              static_cast<std::size_t>(detail::floor_log_ratio(u1, N, 1)) + 1;
    sch.hash_moduli = detail::consecutive_primes(u1 - 1, M, 1);
    sch.validate();
    return sch;
}

/// Scheme for block supports (n blocks of B consecutive frequencies): the
/// hashing modulus is the single power of two u = 2^(floor(log2 B) + 1).
inline PrimeScheme build_scheme_block(i64 N, int n, i64 B, int k_mult = 2) {
    if (N < 2 || n < 1 || B < 1 || B >= N || k_mult < 1)
        throw std::invalid_argument("build_scheme_block: bad parameters");
    PrimeScheme sch;
    sch.mode = SchemeMode::block;
    sch.N = N; sch.n = n; sch.d = 1; sch.B = B; sch.k_mult = k_mult;
    i64 u = 1;
    while (u <= B) u *= 2;  // 2^(floor(log2 B)+1)
    sch.hash_moduli = {u};
    sch.crt_primes = detail::crt_prime_list(N, u * n, 3, u);
    const i64 tL = sch.crt_primes.empty() ? 0 : sch.crt_primes.back();
    const i64 s1 = next_prime(std::max<i64>(n, tL));
    const std::size_t K = static_cast<std::size_t>(k_mult) * static_cast<std::size_t>(n) *
                              static_cast<std::size_t>(detail::floor_log_ratio(s1, N, u)) + 1;
    sch.vote_primes = detail::consecutive_primes(s1 - 1, K, u);
    sch.validate();
    return sch;
}

/// Scheme for a caller-chosen single hashing modulus u > B (u need not be
/// prime, only coprime to the other families; the prime streams skip any
/// factor of u, which realizes the shift-past-collision rule).
inline PrimeScheme build_scheme_single_prime(i64 N, int n, int d, i64 B, i64 u, int k_mult = 8) {
    if (N < 2 || n < 1 || d < 1 || B < 1 || B >= N || k_mult < 1 || u <= B)
        throw std::invalid_argument("build_scheme_single_prime: bad parameters");
    PrimeScheme sch;
    sch.mode = SchemeMode::single_prime;
    sch.N = N; sch.n = n; sch.d = d; sch.B = B; sch.k_mult = k_mult;
    sch.hash_moduli = {u};
    const i64 dn = static_cast<i64>(d) * n;
    sch.crt_primes = detail::crt_prime_list(N, u * dn, 2, u);
    const i64 tL = sch.crt_primes.empty() ? 0 : sch.crt_primes.back();
    const i64 s1 = next_prime(std::max<i64>(dn, tL));
    const std::size_t K = static_cast<std::size_t>(k_mult) * static_cast<std::size_t>(dn) *
                              static_cast<std::size_t>(detail::floor_log_ratio(s1, N, u)) + 1;
    sch.vote_primes = detail::consecutive_primes(s1 - 1, K, u);
    sch.validate();
    return sch;
}

/// How many hashing moduli hash every generator's set well. Exceeds M/2 for
/// schemes built by the constructors above.
inline int count_well_hashing(std::span<const GeneratorPolynomial> polys, const PrimeScheme& scheme) {
    int count = 0;
    for (i64 u : scheme.hash_moduli) {
        bool all_well = true;
        for (const auto& poly : polys)
            if (!hashes_well(poly, u)) { all_well = false; break; }
        if (all_well) ++count;
    }
    return count;
}

/// True when a single modulus u hashes every generator well, certified through
/// coefficients: every generator has some non-constant coefficient not
/// divisible by u.
inline bool single_prime_suffices(std::span<const GeneratorPolynomial> polys, i64 u) {
    for (const auto& poly : polys) {
        bool ok = false;
        for (std::size_t k = 1; k < poly.coeffs.size(); ++k)
            if (mod_floor(poly.coeffs[k], u) != 0) { ok = true; break; }
        if (!ok) return false;
    }
    return true;
}

}  // namespace sft
