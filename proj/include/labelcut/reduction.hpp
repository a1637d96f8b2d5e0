#ifndef LABELCUT_REDUCTION_HPP
#define LABELCUT_REDUCTION_HPP

#include <cstdint>
#include <vector>

#include "labelcut/core.hpp"
#include "labelcut/errors.hpp"

namespace labelcut {

/// Pieces with smaller weights are dropped from decompositions.
inline constexpr double kLambdaDropTol = 1e-12;

/// One truncated-linear piece lambda * min(t, cap).
struct Piece {
    std::size_t cap;  // in [1, T_eff]
    double lambda;    // >= 0
};

/// g(t) = constant + sum over pieces of lambda * min(t, cap), exactly at the
/// integer points 0..T_eff. Pieces are listed by increasing cap.
struct Decomposition {
    double constant = 0.0;
    std::vector<Piece> pieces;

    double reconstruct(std::size_t t) const {
        double v = constant;
        for (const Piece& p : pieces) v += p.lambda * static_cast<double>(std::min(t, p.cap));
        return v;
    }
};

/// Split a validated spec into nonnegative truncated-linear pieces via second
/// differences: lambda_Q = delta_Q - delta_{Q+1} for Q < T_eff and
/// lambda_T_eff = delta_T_eff, where delta_i = g(i) - g(i-1). Concavity makes
/// every lambda nonnegative; values in [-1e-12, 0] are clamped to zero.
inline Decomposition decompose_truncated(const ConcaveSpec& spec, std::size_t t_eff) {
    if (!spec.validated)
        throw ValidationError(0, ValidationError::Kind::Concavity,
                              "decomposition requires a validated concave spec");
    if (t_eff < 1 || t_eff > spec.max_t())
        throw RangeError("T_eff = " + std::to_string(t_eff) + " outside the penalty's sampled range");

    const std::vector<double>& g = spec.samples;
    Decomposition dec;
    dec.constant = g[0];
    for (std::size_t q = 1; q <= t_eff; ++q) {
        double delta_q = g[q] - g[q - 1];
        double lambda = (q < t_eff) ? delta_q - (g[q + 1] - g[q]) : delta_q;
        if (lambda < 0.0) lambda = 0.0; // validation bounds the negative excursion by 1e-12
        if (lambda >= kLambdaDropTol) dec.pieces.push_back({q, lambda});
    }
    return dec;
}

// ---------------------------------------------------------------------------
// Gadget compilation
// ---------------------------------------------------------------------------

struct UnaryTerm {
    int var;
    double cost0;
    double cost1;
};

/// theta(u, v) given by its four corner values.
struct PairwiseTerm {
    int u, v;
    double e00, e01, e10, e11;

    bool submodular() const { return e00 + e11 <= e01 + e10; }
};

/// A pairwise-submodular energy over one hyperedge's members plus two
/// auxiliary binary variables, whose minimum over the auxiliaries equals
/// lambda * min(n0(x), n1(x), Q).
///
/// aux1 indicates "more than Q ones": its terms cost lambda per one-labelled
/// member while aux1 = 0 and a flat lambda * Q while aux1 = 1. aux0 plays the
/// mirrored role for the zero side but is encoded with inverted polarity
/// (aux0 = 1 pays per zero-labelled member, aux0 = 0 pays the flat cap), which
/// keeps every emitted pairwise term submodular.
struct GadgetFragment {
    std::vector<int> members;
    int aux0;
    int aux1;
    double lambda;
    std::size_t cap;
    std::vector<UnaryTerm> unary;
    std::vector<PairwiseTerm> pairwise;
    double constant;
};

/// Compile one piece over a hyperedge. Auxiliary ids are first_aux_id (aux0)
/// and first_aux_id + 1 (aux1); member ids are free-form and only label the
/// emitted terms. Requires Q <= floor(k/2), where the cap identity
/// min(n0, n1, Q) = min(n1, Q) + min(n0, Q) - Q holds.
inline GadgetFragment build_gadget(const Piece& piece, const std::vector<int>& members, int first_aux_id) {
    const std::size_t k = members.size();
    if (k < 2) throw ParameterError("gadget needs at least two members");
    if (piece.lambda < 0.0) throw ParameterError("piece weight must be nonnegative");
    if (piece.cap < 1 || piece.cap > k / 2)
        throw CapTooLarge("cap Q = " + std::to_string(piece.cap) + " exceeds floor(k/2) = " +
                          std::to_string(k / 2));

    const double lam = piece.lambda;
    const double lam_cap = lam * static_cast<double>(piece.cap);
    GadgetFragment frag{members, first_aux_id, first_aux_id + 1, lam, piece.cap, {}, {}, -lam_cap};
    frag.unary.push_back({frag.aux0, lam_cap, 0.0});
    frag.unary.push_back({frag.aux1, 0.0, lam_cap});
    frag.pairwise.reserve(2 * k);
    for (int m : members) {
        frag.pairwise.push_back({m, frag.aux0, 0.0, lam, 0.0, 0.0}); // pays when x_m = 0, aux0 = 1
        frag.pairwise.push_back({m, frag.aux1, 0.0, 0.0, lam, 0.0}); // pays when x_m = 1, aux1 = 0
    }
    return frag;
}

namespace detail {

inline double fragment_energy(const GadgetFragment& frag, const LabelVector& x, bool aux0, bool aux1) {
    auto value_of = [&](int var) -> bool {
        if (var == frag.aux0) return aux0;
        if (var == frag.aux1) return aux1;
        for (std::size_t i = 0; i < frag.members.size(); ++i)
            if (frag.members[i] == var) return x.bit(i);
        throw RangeError("fragment references an unknown variable id");
    };
    double e = frag.constant;
    for (const UnaryTerm& u : frag.unary) e += value_of(u.var) ? u.cost1 : u.cost0;
    for (const PairwiseTerm& p : frag.pairwise) {
        bool bu = value_of(p.u), bv = value_of(p.v);
        e += bu ? (bv ? p.e11 : p.e10) : (bv ? p.e01 : p.e00);
    }
    return e;
}

} // namespace detail

/// Evaluate the fragment at x for all four auxiliary settings and return the
/// minimum. By construction this equals lambda * min(n0, n1, Q).
inline Cost gadget_min_over_aux(const GadgetFragment& frag, const LabelVector& x) {
    if (x.size() != frag.members.size())
        throw LengthMismatch("label vector length does not match the member count");
    double best = detail::fragment_energy(frag, x, false, false);
    for (int s = 1; s < 4; ++s)
        best = std::min(best, detail::fragment_energy(frag, x, s & 1, s & 2));
    return best;
}

} // namespace labelcut

#endif
