#pragma once

// Per-column sparse recovery. A "column" is one residue class nu modulo one
// hash modulus u, together with its residue-restricted short transforms
//
//   V[k][0](j) = sum of coefficients over { omega = nu (mod u), omega = j (mod s_k) }
//   V[k][l](j) = sum of coefficients over { omega = nu (mod u), omega = j (mod s_k * t_l) }
//
// for every vote prime s_k and reconstruction prime t_l. Each energetic bin of
// V[k][0] determines the residue of a candidate frequency modulo s_k * u; the
// remaining residues modulo each t_l are found by a best-match line search
// against the level-0 value; Chinese remaindering then pins the frequency in
// a range covering the whole band. A frequency is accepted only when a strict
// majority of the vote primes reproduce it, which is what makes the
// deterministic pipelines robust to collisions.

#include <algorithm>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "sft/numtheory.hpp"

namespace sft {

using cplx = std::complex<double>;

/// How accepted frequencies get their coefficient estimates.
///  - all_pairs: median over every (vote prime, level) transform value.
///  - last_level: median over the longest transforms only (one per vote
///    prime); the block pipeline uses this cheaper variant.
enum class EstimationMode { all_pairs, last_level };

/// One recovered frequency with its coefficient estimate and vote count.
struct Candidate {
    i64 freq = 0;
    cplx coeff{0.0, 0.0};
    int votes = 0;
};

/// Read-only view of one column's data. vecs is indexed [k * (L + 1) + l]
/// with l = 0 the length-s_k vector and l >= 1 the length-s_k*t_l vectors.
struct ColumnView {
    i64 N = 0;   // band size
    i64 u = 0;   // hash modulus
    i64 nu = 0;  // residue class mod u
    std::span<const i64> s;  // vote primes, ascending
    std::span<const i64> t;  // reconstruction primes, ascending
    const std::vector<std::vector<cplx>>* vecs = nullptr;

    const std::vector<cplx>& vec(std::size_t k, std::size_t l) const {
        return (*vecs)[k * (t.size() + 1) + l];
    }
};

namespace detail {

/// Componentwise lower median: real and imaginary parts are sorted
/// independently and each takes the element at index floor((len-1)/2).
inline cplx component_median(std::vector<double>& re, std::vector<double>& im) {
    if (re.empty()) throw std::invalid_argument("component_median: empty input");
    const std::size_t mid = (re.size() - 1) / 2;
    std::nth_element(re.begin(), re.begin() + static_cast<std::ptrdiff_t>(mid), re.end());
    std::nth_element(im.begin(), im.begin() + static_cast<std::ptrdiff_t>(mid), im.end());
    return {re[mid], im[mid]};
}

/// Bin indices of the `keep` largest-magnitude entries, magnitude descending,
/// ties toward the smaller index.
inline std::vector<std::size_t> energetic_bins(const std::vector<cplx>& v, std::size_t keep) {
    std::vector<std::size_t> idx(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) idx[j] = j;
    const std::size_t take = std::min(keep, v.size());
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take), idx.end(),
                      [&](std::size_t a, std::size_t b) {
                          const double ma = std::norm(v[a]);
                          const double mb = std::norm(v[b]);
                          if (ma != mb) return ma > mb;
                          return a < b;
                      });
    idx.resize(take);
    return idx;
}

}  // namespace detail

/// Recover up to `keep` candidate frequencies from one column.
///  - sparsity: the per-column sparsity bound the scheme was built for.
///  - keep: how many energetic bins per vote prime are examined and how many
///    candidates are returned (callers pass 2 * sparsity).
/// Returned candidates carry a strict majority of votes and are ordered by
/// coefficient magnitude descending, ties toward smaller frequency.
inline std::vector<Candidate> solve_column(const ColumnView& view, std::size_t sparsity,
                                           std::size_t keep, EstimationMode mode) {
    if (view.vecs == nullptr || view.s.empty()) throw std::invalid_argument("solve_column: empty view");
    if (keep < sparsity) throw std::invalid_argument("solve_column: keep must be >= sparsity");
    const std::size_t K = view.s.size();
    const std::size_t L = view.t.size();

    i64 t_product = 1;
    for (i64 tl : view.t) t_product *= tl;

    std::map<i64, int> votes;
    std::vector<std::pair<i64, i64>> pairs;
    for (std::size_t k = 0; k < K; ++k) {
        const i64 sk = view.s[k];
        const std::vector<cplx>& v0 = view.vec(k, 0);
        if (v0.size() != static_cast<std::size_t>(sk))
            throw std::invalid_argument("solve_column: level-0 vector has wrong length");
        // w inverts u modulo s_k, so a0 below is the unique residue modulo
        // s_k * u that is h mod s_k and nu mod u.
        const i64 w = mod_inverse(view.u, sk);
        const i64 sku = sk * view.u;
        for (std::size_t h : detail::energetic_bins(v0, keep)) {
            const i64 a0 = mod_floor((static_cast<i64>(h) - view.nu) * w, sk) * view.u + view.nu;
            const cplx ref = v0[h];
            pairs.clear();
            pairs.emplace_back(a0, sku);
            for (std::size_t l = 0; l < L; ++l) {
                const i64 tl = view.t[l];
                const std::vector<cplx>& vl = view.vec(k, l + 1);
                if (vl.size() != static_cast<std::size_t>(sk * tl))
                    throw std::invalid_argument("solve_column: level vector has wrong length");
                // The t_l candidates consistent with a0 modulo s_k * u sit at
                // bins (a0 + b * s_k * u) mod (s_k * t_l); pick the one whose
                // value best matches the level-0 value, ties toward smaller b.
                i64 best_b = 0;
                double best_dist = std::norm(ref - vl[static_cast<std::size_t>(mod_floor(a0, sk * tl))]);
                for (i64 b = 1; b < tl; ++b) {
                    const i64 bin = mod_floor(a0 + b * sku, sk * tl);
                    const double dist = std::norm(ref - vl[static_cast<std::size_t>(bin)]);
                    if (dist < best_dist) {
                        best_dist = dist;
                        best_b = b;
                    }
                }
                pairs.emplace_back(mod_floor(a0 + best_b * sku, tl), tl);
            }
            const i64 unsigned_freq = crt_reconstruct(pairs);
            const auto banded = to_signed_band(unsigned_freq, sku * t_product, view.N);
            if (banded) ++votes[*banded];
        }
    }

    std::vector<Candidate> out;
    std::vector<double> re, im;
    re.reserve(K * (L + 1));
    im.reserve(K * (L + 1));
    for (const auto& [freq, count] : votes) {
        if (2 * count <= static_cast<i64>(K)) continue;
        re.clear();
        im.clear();
        auto push_estimate = [&](std::size_t k, std::size_t l) {
            const i64 len = l == 0 ? view.s[k] : view.s[k] * view.t[l - 1];
            const cplx e = view.vec(k, l)[static_cast<std::size_t>(mod_floor(freq, len))];
            re.push_back(e.real());
            im.push_back(e.imag());
        };
        for (std::size_t k = 0; k < K; ++k) {
            if (mode == EstimationMode::all_pairs)
                for (std::size_t l = 0; l <= L; ++l) push_estimate(k, l);
            else
                push_estimate(k, L);  // longest transform; level 0 when L == 0
        }
        out.push_back(Candidate{freq, detail::component_median(re, im), count});
    }

    std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
        const double ma = std::norm(a.coeff);
        const double mb = std::norm(b.coeff);
        if (ma != mb) return ma > mb;
        return a.freq < b.freq;
    });
    if (out.size() > keep) out.resize(keep);
    return out;
}

}  // namespace sft
