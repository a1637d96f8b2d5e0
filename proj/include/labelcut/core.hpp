#ifndef LABELCUT_CORE_HPP
#define LABELCUT_CORE_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "labelcut/errors.hpp"

namespace labelcut {

/// Energy values are plain doubles; finiteness is enforced where they enter.
using Cost = double;

/// Absolute tolerance for monotonicity/concavity checks on penalty samples.
inline constexpr double kValidationTol = 1e-12;

// ---------------------------------------------------------------------------
// LabelVector
// ---------------------------------------------------------------------------

/// A fixed-length vector of binary labels, immutable after construction.
///
/// Coordinate i is the label of node/position i. Stored packed, 64 coordinates
/// per limb, coordinate i in bit (i % 64) of limb (i / 64).
class LabelVector {
public:
    /// All-zero vector of length k (k >= 1).
    explicit LabelVector(std::size_t k) : size_(checked_size(k)), limbs_((k + 63) / 64, 0) {}

    LabelVector(std::initializer_list<int> bits) : LabelVector(std::span<const int>(bits.begin(), bits.size())) {}

    explicit LabelVector(std::span<const int> bits) : LabelVector(bits.size()) {
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (bits[i] != 0 && bits[i] != 1)
                throw ParameterError("label values must be 0 or 1");
            if (bits[i]) limbs_[i / 64] |= std::uint64_t{1} << (i % 64);
        }
    }

    /// Parse a bit string such as "0011"; leftmost character is coordinate 0.
    static LabelVector from_string(const std::string& s) {
        LabelVector x(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '1')
                x.limbs_[i / 64] |= std::uint64_t{1} << (i % 64);
            else if (s[i] != '0')
                throw ParameterError("bit string may contain only '0' and '1'");
        }
        return x;
    }

    /// Decode a k-bit integer, k <= 64. Bit (k-1-i) of `value` becomes
    /// coordinate i, so increasing values enumerate bit strings in
    /// lexicographic order and from_index(3, 6) == "000011".
    static LabelVector from_index(std::uint64_t value, std::size_t k) {
        if (k < 1 || k > 64) throw RangeError("from_index supports 1 <= k <= 64");
        if (k < 64 && (value >> k) != 0) throw RangeError("index has more than k bits");
        LabelVector x(k);
        for (std::size_t i = 0; i < k; ++i)
            if ((value >> (k - 1 - i)) & 1u) x.limbs_[i / 64] |= std::uint64_t{1} << (i % 64);
        return x;
    }

    std::size_t size() const { return size_; }

    bool bit(std::size_t i) const { return (limbs_[i / 64] >> (i % 64)) & 1u; }

    std::size_t count_ones() const {
        std::size_t n = 0;
        for (std::uint64_t w : limbs_) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }

    std::size_t count_zeros() const { return size_ - count_ones(); }

    /// Vector with every bit flipped.
    LabelVector complemented() const {
        LabelVector r(size_);
        for (std::size_t j = 0; j < limbs_.size(); ++j) r.limbs_[j] = ~limbs_[j];
        r.mask_top();
        return r;
    }

    std::string to_string() const {
        std::string s(size_, '0');
        for (std::size_t i = 0; i < size_; ++i)
            if (bit(i)) s[i] = '1';
        return s;
    }

    bool operator==(const LabelVector& o) const { return size_ == o.size_ && limbs_ == o.limbs_; }

    /// Lexicographic order on the coordinate sequence (shorter first on ties).
    bool operator<(const LabelVector& o) const {
        std::size_t n = std::min(size_, o.size_);
        for (std::size_t i = 0; i < n; ++i) {
            if (bit(i) != o.bit(i)) return !bit(i);
        }
        return size_ < o.size_;
    }

    std::span<const std::uint64_t> limbs() const { return limbs_; }

    friend LabelVector lattice_or(const LabelVector& a, const LabelVector& b) {
        check_same_size(a, b);
        LabelVector r(a.size_);
        for (std::size_t j = 0; j < a.limbs_.size(); ++j) r.limbs_[j] = a.limbs_[j] | b.limbs_[j];
        return r;
    }

    friend LabelVector lattice_and(const LabelVector& a, const LabelVector& b) {
        check_same_size(a, b);
        LabelVector r(a.size_);
        for (std::size_t j = 0; j < a.limbs_.size(); ++j) r.limbs_[j] = a.limbs_[j] & b.limbs_[j];
        return r;
    }

    static void check_same_size(const LabelVector& a, const LabelVector& b) {
        if (a.size_ != b.size_)
            throw LengthMismatch("label vectors have lengths " + std::to_string(a.size_) + " and " +
                                 std::to_string(b.size_));
    }

    /// Internal raw builder used by deterministic samplers.
    static LabelVector from_limbs(std::vector<std::uint64_t> limbs, std::size_t k) {
        LabelVector x(k);
        x.limbs_ = std::move(limbs);
        x.limbs_.resize((k + 63) / 64, 0);
        x.mask_top();
        return x;
    }

private:
    static std::size_t checked_size(std::size_t k) {
        if (k < 1) throw ParameterError("label vector length must be >= 1");
        return k;
    }

    void mask_top() {
        if (size_ % 64 != 0) limbs_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
    }

    std::size_t size_;
    std::vector<std::uint64_t> limbs_;
};

// ---------------------------------------------------------------------------
// Dominant label
// ---------------------------------------------------------------------------

enum class Majority { Zero, One, Tie };

inline const char* to_string(Majority m) {
    switch (m) {
        case Majority::Zero: return "Zero";
        case Majority::One: return "One";
        default: return "Tie";
    }
}

/// Dominant label together with the two label counts.
struct DominantLabel {
    Majority majority;
    std::size_t n0;
    std::size_t n1;
};

/// The label held by the strict majority of coordinates; Tie when n0 == n1.
inline DominantLabel dominant_label(const LabelVector& x) {
    std::size_t n1 = x.count_ones();
    std::size_t n0 = x.size() - n1;
    Majority m = n1 > n0 ? Majority::One : (n0 > n1 ? Majority::Zero : Majority::Tie);
    return {m, n0, n1};
}

/// Number of coordinates disagreeing with the dominant label: min(n0, n1).
/// Well-defined on ties, always in [0, k/2].
inline std::size_t deviation(const LabelVector& x) {
    std::size_t n1 = x.count_ones();
    return std::min(n1, x.size() - n1);
}

// ---------------------------------------------------------------------------
// Concave penalty families and their sampled form
// ---------------------------------------------------------------------------

struct SqrtFamily {};
struct Log1pFamily {};
struct PowerFamily {
    double p; // exponent in (0, 1]
};
struct TruncLinFamily {
    double slope; // >= 0
    double cap;   // >= 1
};
struct TableFamily {
    std::vector<double> values;
};

using FamilySpec = std::variant<SqrtFamily, Log1pFamily, PowerFamily, TruncLinFamily, TableFamily>;

/// A penalty function g sampled at integer deviations 0..T, scaled by a
/// nonnegative weight. `validated` records whether the samples passed the
/// nondecreasing-concave checks; the minimization path requires it, the
/// counterexample-hunting paths do not.
struct ConcaveSpec {
    std::vector<double> samples; // g(0), ..., g(T), weight already applied
    FamilySpec family;
    double weight = 1.0;
    bool validated = false;

    std::size_t max_t() const { return samples.size() - 1; }
};

namespace detail {

inline std::vector<double> family_samples(const FamilySpec& family, std::size_t t_max, double weight) {
    std::vector<double> s(t_max + 1);
    if (const auto* tab = std::get_if<TableFamily>(&family)) {
        if (tab->values.size() != t_max + 1)
            throw ParameterError("table length must equal T + 1");
        for (std::size_t t = 0; t <= t_max; ++t) s[t] = weight * tab->values[t];
        return s;
    }
    for (std::size_t t = 0; t <= t_max; ++t) {
        double v = 0.0;
        if (std::holds_alternative<SqrtFamily>(family)) {
            v = std::sqrt(static_cast<double>(t));
        } else if (std::holds_alternative<Log1pFamily>(family)) {
            v = std::log1p(static_cast<double>(t));
        } else if (const auto* pw = std::get_if<PowerFamily>(&family)) {
            v = std::pow(static_cast<double>(t), pw->p);
        } else if (const auto* tl = std::get_if<TruncLinFamily>(&family)) {
            v = tl->slope * std::min(static_cast<double>(t), tl->cap);
        }
        s[t] = weight * v;
    }
    return s;
}

inline void check_family_parameters(const FamilySpec& family) {
    if (const auto* pw = std::get_if<PowerFamily>(&family)) {
        if (!(pw->p > 0.0) || !(pw->p <= 1.0)) throw ParameterError("power exponent must lie in (0, 1]");
    } else if (const auto* tl = std::get_if<TruncLinFamily>(&family)) {
        if (!(tl->slope >= 0.0)) throw ParameterError("trunclin slope must be >= 0");
        if (!(tl->cap >= 1.0)) throw ParameterError("trunclin cap must be >= 1");
    }
}

/// Monotonicity + concavity + finiteness of a sample table, within tolerance.
inline void validate_samples(const std::vector<double>& s) {
    for (std::size_t i = 0; i < s.size(); ++i)
        if (!std::isfinite(s[i]))
            throw ValidationError(i, ValidationError::Kind::NonFinite,
                                  "sample " + std::to_string(i) + " is not finite");
    for (std::size_t i = 0; i + 1 < s.size(); ++i)
        if (s[i + 1] - s[i] < -kValidationTol)
            throw ValidationError(i + 1, ValidationError::Kind::Monotonicity,
                                  "samples decrease at index " + std::to_string(i + 1));
    for (std::size_t i = 1; i + 1 < s.size(); ++i)
        if (s[i + 1] - 2.0 * s[i] + s[i - 1] > kValidationTol)
            throw ValidationError(i + 1, ValidationError::Kind::Concavity,
                                  "positive second difference at index " + std::to_string(i + 1));
}

} // namespace detail

/// Build and validate a penalty spec sampled at integers 0..T.
/// Throws ParameterError for out-of-range family parameters and
/// ValidationError when the samples are not nondecreasing-concave.
inline ConcaveSpec make_concave_spec(const FamilySpec& family, std::size_t t_max, double weight = 1.0) {
    if (t_max < 1) throw ParameterError("T must be >= 1");
    if (!(weight >= 0.0) || !std::isfinite(weight)) throw ParameterError("weight must be a finite nonnegative real");
    detail::check_family_parameters(family);
    ConcaveSpec spec{detail::family_samples(family, t_max, weight), family, weight, false};
    detail::validate_samples(spec.samples);
    spec.validated = true;
    return spec;
}

/// Wrap a raw sample table without the concavity checks. Only finiteness is
/// enforced; the result is rejected by the minimization path.
inline ConcaveSpec make_unvalidated_table(std::vector<double> values, double weight = 1.0) {
    if (values.size() < 2) throw ParameterError("table needs at least two samples");
    if (!(weight >= 0.0) || !std::isfinite(weight)) throw ParameterError("weight must be a finite nonnegative real");
    TableFamily fam{values};
    ConcaveSpec spec{detail::family_samples(fam, values.size() - 1, weight), std::move(fam), weight, false};
    for (std::size_t i = 0; i < spec.samples.size(); ++i)
        if (!std::isfinite(spec.samples[i]))
            throw ValidationError(i, ValidationError::Kind::NonFinite,
                                  "sample " + std::to_string(i) + " is not finite");
    return spec;
}

/// g(t) for integer t in [0, T].
inline Cost eval_g(const ConcaveSpec& spec, std::size_t t) {
    if (t >= spec.samples.size())
        throw RangeError("t = " + std::to_string(t) + " exceeds the sampled range T = " +
                         std::to_string(spec.max_t()));
    return spec.samples[t];
}

/// The disagreement potential d(x) = g(k - n_rho) = g(min(n0, n1)).
inline Cost disagreement(const ConcaveSpec& spec, const LabelVector& x) {
    if (spec.max_t() < x.size() / 2)
        throw RangeError("spec sampled to T = " + std::to_string(spec.max_t()) +
                         " cannot cover deviations of a length-" + std::to_string(x.size()) + " vector");
    return spec.samples[deviation(x)];
}

} // namespace labelcut

#endif
