#ifndef LABELCUT_VERIFIER_HPP
#define LABELCUT_VERIFIER_HPP

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <thread>
#include <utility>
#include <vector>

#include "labelcut/core.hpp"
#include "labelcut/errors.hpp"

namespace labelcut {

/// Margins above -kMarginTol count as satisfying the lattice inequality.
inline constexpr double kMarginTol = 1e-9;

/// Largest k for which the 4^k pair sweep is attempted.
inline constexpr std::size_t kMaxExhaustiveK = 13;

// ---------------------------------------------------------------------------
// Pair structure
// ---------------------------------------------------------------------------

/// Coordinate-pattern counts of a vector pair: k1 = #(0,0), k2 = #(0,1),
/// k3 = #(1,0), k4 = #(1,1). They always sum to the common length.
struct KappaProfile {
    std::size_t k1 = 0, k2 = 0, k3 = 0, k4 = 0;

    bool operator==(const KappaProfile&) const = default;
};

enum class ProofCase {
    JoinZero,        // rho(a|b) == 0 strictly (forces rho(a&b) == 0)
    MeetOne,         // rho(a&b) == 1 strictly (forces rho(a|b) == 1)
    JoinOneMeetZero, // rho(a|b) == 1 and rho(a&b) == 0, both strict
    JoinZeroMeetOne, // unreachable with strict majorities; kept for completeness
    TieInvolved,     // join or meet has no strict majority
};

inline const char* to_string(ProofCase c) {
    switch (c) {
        case ProofCase::JoinZero: return "JoinZero";
        case ProofCase::MeetOne: return "MeetOne";
        case ProofCase::JoinOneMeetZero: return "JoinOneMeetZero";
        case ProofCase::JoinZeroMeetOne: return "JoinZeroMeetOne";
        default: return "TieInvolved";
    }
}

/// Componentwise or / and of two equal-length vectors.
inline std::pair<LabelVector, LabelVector> join_meet(const LabelVector& a, const LabelVector& b) {
    return {lattice_or(a, b), lattice_and(a, b)};
}

inline KappaProfile kappa_profile(const LabelVector& a, const LabelVector& b) {
    if (a.size() != b.size())
        throw LengthMismatch("kappa_profile needs equal-length vectors");
    KappaProfile p;
    p.k4 = lattice_and(a, b).count_ones();
    p.k3 = a.count_ones() - p.k4;
    p.k2 = b.count_ones() - p.k4;
    p.k1 = a.size() - p.k2 - p.k3 - p.k4;
    return p;
}

/// [d(a) + d(b)] - [d(a|b) + d(a&b)]; nonnegative within kMarginTol whenever
/// the penalty passed concave validation.
inline double submodular_margin(const ConcaveSpec& spec, const LabelVector& a, const LabelVector& b) {
    auto [join, meet] = join_meet(a, b);
    double da = disagreement(spec, a);
    double db = disagreement(spec, b);
    double dj = disagreement(spec, join);
    double dm = disagreement(spec, meet);
    return (da + db) - (dj + dm);
}

/// Which of the proof's four cases a pair falls into, plus its kappa counts.
inline std::pair<ProofCase, KappaProfile> classify_case(const LabelVector& a, const LabelVector& b) {
    KappaProfile p = kappa_profile(a, b);
    auto [join, meet] = join_meet(a, b);
    Majority mj = dominant_label(join).majority;
    Majority mm = dominant_label(meet).majority;
    ProofCase c;
    if (mj == Majority::Tie || mm == Majority::Tie)
        c = ProofCase::TieInvolved;
    else if (mj == Majority::Zero && mm == Majority::One)
        c = ProofCase::JoinZeroMeetOne;
    else if (mj == Majority::Zero)
        c = ProofCase::JoinZero;
    else if (mm == Majority::One)
        c = ProofCase::MeetOne;
    else
        c = ProofCase::JoinOneMeetZero;
    return {c, p};
}

// ---------------------------------------------------------------------------
// Verification sweeps
// ---------------------------------------------------------------------------

struct Violation {
    LabelVector a;
    LabelVector b;
    double margin;
};

struct VerifyReport {
    std::uint64_t pairs_checked = 0;
    std::vector<Violation> violations; ///< first entries in scan order, up to the cap
    std::uint64_t violations_total = 0;
    bool truncated = false;
    double min_margin = std::numeric_limits<double>::infinity();
    std::chrono::duration<double, std::milli> elapsed{0};
};

struct VerifyOptions {
    unsigned threads = 0;                       ///< 0 = hardware concurrency
    std::uint64_t max_violations = 1u << 20;    ///< stored, not counted, cap
};

/// Everything except the timing field, bit-exact (margins compared as bits).
inline bool findings_equal(const VerifyReport& x, const VerifyReport& y) {
    auto bits = [](double v) { return std::bit_cast<std::uint64_t>(v); };
    if (x.pairs_checked != y.pairs_checked || x.violations_total != y.violations_total ||
        x.truncated != y.truncated || bits(x.min_margin) != bits(y.min_margin) ||
        x.violations.size() != y.violations.size())
        return false;
    for (std::size_t i = 0; i < x.violations.size(); ++i) {
        const auto& u = x.violations[i];
        const auto& v = y.violations[i];
        if (!(u.a == v.a) || !(u.b == v.b) || bits(u.margin) != bits(v.margin)) return false;
    }
    return true;
}

namespace detail {

/// d-values indexed by the raw k-bit vector index (bit k-1-i = coordinate i;
/// deviation is index-order agnostic, so any fixed order works here).
inline std::vector<double> d_by_index(const std::vector<double>& samples, std::size_t k) {
    std::vector<double> d(std::size_t{1} << k);
    for (std::size_t idx = 0; idx < d.size(); ++idx) {
        std::size_t ones = static_cast<std::size_t>(std::popcount(idx));
        d[idx] = samples[std::min(ones, k - ones)];
    }
    return d;
}

struct ChunkFindings {
    std::uint64_t total = 0;
    double min_margin = std::numeric_limits<double>::infinity();
    std::vector<std::pair<std::uint32_t, std::uint32_t>> stored; // (a, b) indices
    std::vector<double> stored_margins;
};

/// Lexicographic scan of a in [a_begin, a_end) against all b.
inline ChunkFindings scan_pairs(const std::vector<double>& d, std::uint32_t a_begin, std::uint32_t a_end,
                                std::uint64_t cap) {
    ChunkFindings out;
    const std::uint32_t n = static_cast<std::uint32_t>(d.size());
    for (std::uint32_t a = a_begin; a < a_end; ++a) {
        const double da = d[a];
        for (std::uint32_t b = 0; b < n; ++b) {
            double margin = (da + d[b]) - (d[a | b] + d[a & b]);
            if (margin < out.min_margin) out.min_margin = margin;
            if (margin < -kMarginTol) {
                ++out.total;
                if (out.stored.size() < cap) {
                    out.stored.emplace_back(a, b);
                    out.stored_margins.push_back(margin);
                }
            }
        }
    }
    return out;
}

inline VerifyReport merge_chunks(std::vector<ChunkFindings>& chunks, std::size_t k, std::uint64_t pairs,
                                 std::uint64_t cap) {
    VerifyReport report;
    report.pairs_checked = pairs;
    for (auto& c : chunks) {
        report.violations_total += c.total;
        if (c.min_margin < report.min_margin) report.min_margin = c.min_margin;
        for (std::size_t i = 0; i < c.stored.size() && report.violations.size() < cap; ++i)
            report.violations.push_back({LabelVector::from_index(c.stored[i].first, k),
                                         LabelVector::from_index(c.stored[i].second, k),
                                         c.stored_margins[i]});
    }
    report.truncated = report.violations.size() < report.violations_total;
    return report;
}

} // namespace detail

/// Check every ordered pair (a, b) in {0,1}^k x {0,1}^k against the lattice
/// inequality. The scan order is lexicographic over (a, b) read as 2k-bit
/// integers; with internal parallelism the report is identical to the
/// sequential scan.
inline VerifyReport verify_exhaustive(const ConcaveSpec& spec, std::size_t k, VerifyOptions opts = {}) {
    if (k < 1 || k > kMaxExhaustiveK)
        throw RangeError("exhaustive verification supports 1 <= k <= " + std::to_string(kMaxExhaustiveK));
    if (spec.max_t() < k / 2)
        throw RangeError("spec sampled to T = " + std::to_string(spec.max_t()) +
                         " cannot cover deviations at k = " + std::to_string(k));
    auto t0 = std::chrono::steady_clock::now();

    const std::vector<double> d = detail::d_by_index(spec.samples, k);
    const std::uint32_t n = static_cast<std::uint32_t>(d.size());
    const std::uint64_t pairs = std::uint64_t{n} * n;

    unsigned workers = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, n));

    std::vector<detail::ChunkFindings> chunks(workers);
    if (workers == 1) {
        chunks[0] = detail::scan_pairs(d, 0, n, opts.max_violations);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            std::uint32_t lo = static_cast<std::uint32_t>(std::uint64_t{n} * w / workers);
            std::uint32_t hi = static_cast<std::uint32_t>(std::uint64_t{n} * (w + 1) / workers);
            pool.emplace_back([&, w, lo, hi] { chunks[w] = detail::scan_pairs(d, lo, hi, opts.max_violations); });
        }
        for (auto& t : pool) t.join();
    }

    VerifyReport report = detail::merge_chunks(chunks, k, pairs, opts.max_violations);
    report.elapsed = std::chrono::steady_clock::now() - t0;
    return report;
}

/// Check n_pairs pairs drawn from a seeded pseudorandom stream. Deterministic
/// given (k, n_pairs, seed); works for any k >= 1.
inline VerifyReport verify_sampled(const ConcaveSpec& spec, std::size_t k, std::uint64_t n_pairs,
                                   std::uint64_t seed, std::uint64_t max_violations = 1u << 20) {
    if (k < 1) throw RangeError("k must be >= 1");
    if (n_pairs < 1) throw RangeError("n_pairs must be >= 1");
    if (spec.max_t() < k / 2)
        throw RangeError("spec sampled to T = " + std::to_string(spec.max_t()) +
                         " cannot cover deviations at k = " + std::to_string(k));
    auto t0 = std::chrono::steady_clock::now();

    const std::size_t n_limbs = (k + 63) / 64;
    const std::uint64_t top_mask = (k % 64 == 0) ? ~std::uint64_t{0} : (std::uint64_t{1} << (k % 64)) - 1;
    std::mt19937_64 rng(seed);
    auto draw = [&](std::vector<std::uint64_t>& limbs) {
        for (std::size_t j = 0; j < n_limbs; ++j) limbs[j] = rng();
        limbs[n_limbs - 1] &= top_mask;
    };
    auto dev_of = [&](const std::vector<std::uint64_t>& limbs) {
        std::size_t ones = 0;
        for (std::uint64_t w : limbs) ones += static_cast<std::size_t>(std::popcount(w));
        return std::min(ones, k - ones);
    };

    VerifyReport report;
    report.pairs_checked = n_pairs;
    std::vector<std::uint64_t> a(n_limbs), b(n_limbs), j(n_limbs), m(n_limbs);
    for (std::uint64_t it = 0; it < n_pairs; ++it) {
        draw(a);
        draw(b);
        for (std::size_t q = 0; q < n_limbs; ++q) {
            j[q] = a[q] | b[q];
            m[q] = a[q] & b[q];
        }
        double margin = (spec.samples[dev_of(a)] + spec.samples[dev_of(b)]) -
                        (spec.samples[dev_of(j)] + spec.samples[dev_of(m)]);
        if (margin < report.min_margin) report.min_margin = margin;
        if (margin < -kMarginTol) {
            ++report.violations_total;
            if (report.violations.size() < max_violations)
                report.violations.push_back(
                    {LabelVector::from_limbs(a, k), LabelVector::from_limbs(b, k), margin});
        }
    }
    report.truncated = report.violations.size() < report.violations_total;
    report.elapsed = std::chrono::steady_clock::now() - t0;
    return report;
}

/// Hunt for a pair violating the lattice inequality under a raw (possibly
/// non-concave) sample table. Exhaustive lexicographic scan for small k,
/// seeded sampling beyond that; first hit wins.
inline std::optional<Violation> find_counterexample(const std::vector<double>& g_samples, std::size_t k,
                                                    std::uint64_t budget) {
    if (k < 2) throw RangeError("counterexample search needs k >= 2");
    ConcaveSpec raw = make_unvalidated_table(g_samples);
    if (raw.max_t() < k / 2)
        throw RangeError("sample table too short for k = " + std::to_string(k));

    if (k <= kMaxExhaustiveK) {
        const std::vector<double> d = detail::d_by_index(raw.samples, k);
        const std::uint32_t n = static_cast<std::uint32_t>(d.size());
        std::uint64_t scanned = 0;
        for (std::uint32_t a = 0; a < n; ++a)
            for (std::uint32_t b = 0; b < n; ++b) {
                if (scanned++ >= budget) return std::nullopt;
                double margin = (d[a] + d[b]) - (d[a | b] + d[a & b]);
                if (margin < -kMarginTol)
                    return Violation{LabelVector::from_index(a, k), LabelVector::from_index(b, k), margin};
            }
        return std::nullopt;
    }

    VerifyReport r = verify_sampled(raw, k, budget, /*seed=*/0, /*max_violations=*/1);
    if (r.violations.empty()) return std::nullopt;
    return r.violations.front();
}

} // namespace labelcut

#endif
