#ifndef LABELCUT_SOLVER_HPP
#define LABELCUT_SOLVER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "labelcut/core.hpp"
#include "labelcut/errors.hpp"
#include "labelcut/maxflow.hpp"
#include "labelcut/reduction.hpp"

namespace labelcut {

/// Real costs are rounded to multiples of 1/kCapacityScale before max-flow.
/// At 2^32 each rounded term is off by at most 2^-33, so even energies built
/// from thousands of terms stay well inside the 1e-6 agreement tolerance.
inline constexpr std::int64_t kCapacityScale = std::int64_t{1} << 32;

/// Per-capacity and total-capacity guards for the scaled integer graph.
inline constexpr std::int64_t kMaxScaledCap = std::int64_t{1} << 52;
inline constexpr std::int64_t kMaxTotalCap = std::int64_t{1} << 62;

/// Brute force enumerates at most 2^kMaxBruteForceNodes assignments.
inline constexpr std::size_t kMaxBruteForceNodes = 20;

/// Two solver routes must agree on the minimum energy within this tolerance.
inline constexpr double kEnergyTol = 1e-6;

// ---------------------------------------------------------------------------
// Instances
// ---------------------------------------------------------------------------

struct Hyperedge {
    std::vector<int> members; // >= 2 distinct node ids
    ConcaveSpec spec;
};

/// A hypergraph energy: per-node (cost-if-0, cost-if-1) pairs plus one
/// disagreement potential per hyperedge.
struct Instance {
    std::size_t nodes = 0;
    std::vector<std::pair<double, double>> unary;
    std::vector<Hyperedge> hyperedges;
};

/// Structural checks; throws SemanticError naming the offending hyperedge.
inline void validate_instance(const Instance& inst) {
    if (inst.nodes < 1) throw SemanticError("instance needs at least one node");
    if (inst.unary.size() != inst.nodes)
        throw SemanticError("unary list length " + std::to_string(inst.unary.size()) +
                            " does not match node count " + std::to_string(inst.nodes));
    for (const auto& [c0, c1] : inst.unary)
        if (!std::isfinite(c0) || !std::isfinite(c1)) throw SemanticError("unary costs must be finite");
    for (std::size_t e = 0; e < inst.hyperedges.size(); ++e) {
        const Hyperedge& edge = inst.hyperedges[e];
        const std::size_t k = edge.members.size();
        if (k < 2) throw SemanticError("hyperedge needs at least two members", static_cast<long>(e));
        std::vector<int> sorted = edge.members;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < k; ++i) {
            if (sorted[i] < 0 || static_cast<std::size_t>(sorted[i]) >= inst.nodes)
                throw SemanticError("member id out of range", static_cast<long>(e));
            if (i > 0 && sorted[i] == sorted[i - 1])
                throw SemanticError("duplicate member id " + std::to_string(sorted[i]),
                                    static_cast<long>(e));
        }
        if (edge.spec.max_t() < k / 2)
            throw SemanticError("penalty spec sampled to T = " + std::to_string(edge.spec.max_t()) +
                                " is too short for a hyperedge of size " + std::to_string(k),
                                static_cast<long>(e));
    }
}

/// Total energy of one assignment: unaries plus each hyperedge's penalty at
/// the deviation of its restriction of x.
inline Cost instance_energy(const Instance& inst, const LabelVector& x) {
    if (x.size() != inst.nodes)
        throw LengthMismatch("assignment length " + std::to_string(x.size()) +
                             " does not match node count " + std::to_string(inst.nodes));
    double total = 0.0;
    for (std::size_t i = 0; i < inst.nodes; ++i)
        total += x.bit(i) ? inst.unary[i].second : inst.unary[i].first;
    for (const Hyperedge& edge : inst.hyperedges) {
        std::size_t ones = 0;
        for (int m : edge.members) ones += x.bit(static_cast<std::size_t>(m));
        total += edge.spec.samples[std::min(ones, edge.members.size() - ones)];
    }
    return total;
}

// ---------------------------------------------------------------------------
// Solutions
// ---------------------------------------------------------------------------

enum class SolveMethod { Brute, Cut };

struct SolveStats {
    std::int64_t flow = 0;                  ///< scaled max-flow value (cut method)
    std::uint64_t phases = 0;               ///< BFS phases of the flow solver
    std::uint64_t assignments_scanned = 0;  ///< brute-force enumeration count
};

struct Solution {
    LabelVector assignment;
    Cost energy;
    SolveMethod method;
    SolveStats stats;
};

/// Exact minimum by enumerating all 2^n assignments, n <= 20. Ties break
/// toward the smallest assignment read as an n-bit integer with node 0 as the
/// most significant bit.
inline Solution minimize_bruteforce(const Instance& inst) {
    validate_instance(inst);
    const std::size_t n = inst.nodes;
    if (n > kMaxBruteForceNodes)
        throw TooLarge("brute force handles at most " + std::to_string(kMaxBruteForceNodes) + " nodes");

    // Per-edge membership masks in assignment-index bit order (node 0 = MSB).
    std::vector<std::uint32_t> masks;
    masks.reserve(inst.hyperedges.size());
    for (const Hyperedge& edge : inst.hyperedges) {
        std::uint32_t m = 0;
        for (int v : edge.members) m |= std::uint32_t{1} << (n - 1 - static_cast<std::size_t>(v));
        masks.push_back(m);
    }

    double best = std::numeric_limits<double>::infinity();
    std::uint32_t best_idx = 0;
    const std::uint32_t count = std::uint32_t{1} << n;
    for (std::uint32_t idx = 0; idx < count; ++idx) {
        double e = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            e += ((idx >> (n - 1 - i)) & 1u) ? inst.unary[i].second : inst.unary[i].first;
        for (std::size_t j = 0; j < masks.size(); ++j) {
            std::size_t ones = static_cast<std::size_t>(std::popcount(idx & masks[j]));
            std::size_t k = inst.hyperedges[j].members.size();
            e += inst.hyperedges[j].spec.samples[std::min(ones, k - ones)];
        }
        if (e < best) {
            best = e;
            best_idx = idx;
        }
    }
    Solution sol{LabelVector::from_index(best_idx, n), best, SolveMethod::Brute, {}};
    sol.stats.assignments_scanned = count;
    return sol;
}

// ---------------------------------------------------------------------------
// Cut-graph assembly
// ---------------------------------------------------------------------------

/// A pairwise-submodular energy in arc/capacity form. Arc conventions:
/// label 1 puts a variable on the source side, so snk_cap[v] is paid when v
/// takes label 1, src_cap[v] when it takes label 0, and an arc u -> v is paid
/// when u takes 1 and v takes 0. Energies decode as offset + cut / scale.
struct CutGraph {
    struct Arc {
        int from, to;
        std::int64_t cap;
    };

    std::size_t num_original = 0;
    std::size_t num_vars = 0;
    std::vector<Arc> arcs;
    std::vector<std::int64_t> src_cap;
    std::vector<std::int64_t> snk_cap;
    double offset = 0.0;
};

namespace detail {

class CutGraphBuilder {
public:
    explicit CutGraphBuilder(std::size_t num_original)
        : num_original_(num_original), c0_(num_original, 0.0), c1_(num_original, 0.0) {}

    int add_aux() {
        c0_.push_back(0.0);
        c1_.push_back(0.0);
        return static_cast<int>(c0_.size()) - 1;
    }

    void add_constant(double c) { offset_ += c; }

    void add_unary(int v, double cost0, double cost1) {
        c0_[static_cast<std::size_t>(v)] += cost0;
        c1_[static_cast<std::size_t>(v)] += cost1;
    }

    /// theta = e00 + (e10-e00) x_u + (e11-e10) x_v + beta (1-x_u) x_v with
    /// beta = e01 + e10 - e00 - e11 >= 0 by submodularity; the beta part
    /// becomes the arc v -> u.
    void add_pairwise(const PairwiseTerm& t) {
        add_constant(t.e00);
        add_unary(t.u, 0.0, t.e10 - t.e00);
        add_unary(t.v, 0.0, t.e11 - t.e10);
        double beta = (t.e01 + t.e10) - (t.e00 + t.e11);
        if (beta < 0.0)
            throw ParameterError("pairwise term is not submodular");
        if (beta > 0.0) arcs_.push_back({t.v, t.u, beta});
    }

    CutGraph finish() {
        CutGraph g;
        g.num_original = num_original_;
        g.num_vars = c0_.size();
        g.src_cap.assign(g.num_vars, 0);
        g.snk_cap.assign(g.num_vars, 0);
        for (std::size_t v = 0; v < g.num_vars; ++v) {
            offset_ += std::min(c0_[v], c1_[v]);
            std::int64_t net = scale(c1_[v] - c0_[v]);
            if (net > 0)
                g.snk_cap[v] = net;
            else
                g.src_cap[v] = -net;
            track_total(std::abs(net));
        }
        g.arcs.reserve(arcs_.size());
        for (const RealArc& a : arcs_) {
            std::int64_t cap = scale(a.cap);
            track_total(cap);
            if (cap > 0) g.arcs.push_back({a.from, a.to, cap});
        }
        g.offset = offset_;
        return g;
    }

private:
    struct RealArc {
        int from, to;
        double cap;
    };

    static std::int64_t scale(double v) {
        double scaled = v * static_cast<double>(kCapacityScale);
        if (!(std::abs(scaled) < static_cast<double>(kMaxScaledCap)))
            throw OverflowError("scaled capacity " + std::to_string(v) + " exceeds the integer range");
        return std::llround(scaled);
    }

    void track_total(std::int64_t cap) {
        total_ += cap;
        if (total_ > kMaxTotalCap) throw OverflowError("total scaled capacity exceeds the integer range");
    }

    std::size_t num_original_;
    std::vector<double> c0_, c1_;
    std::vector<RealArc> arcs_;
    double offset_ = 0.0;
    std::int64_t total_ = 0;
};

} // namespace detail

/// Compile an instance into a pairwise-submodular cut graph: unaries become
/// terminal capacities; each hyperedge is decomposed into truncated-linear
/// pieces whose gadgets contribute two auxiliary variables each. Auxiliary
/// ids are assigned in hyperedge order, then piece order by increasing cap.
inline CutGraph assemble_energy(const Instance& inst) {
    validate_instance(inst);
    detail::CutGraphBuilder builder(inst.nodes);
    for (std::size_t i = 0; i < inst.nodes; ++i)
        builder.add_unary(static_cast<int>(i), inst.unary[i].first, inst.unary[i].second);
    for (const Hyperedge& edge : inst.hyperedges) {
        const std::size_t k = edge.members.size();
        Decomposition dec = decompose_truncated(edge.spec, k / 2);
        builder.add_constant(dec.constant);
        for (const Piece& piece : dec.pieces) {
            int aux0 = builder.add_aux();
            builder.add_aux(); // aux1 = aux0 + 1
            GadgetFragment frag = build_gadget(piece, edge.members, aux0);
            builder.add_constant(frag.constant);
            for (const UnaryTerm& u : frag.unary) builder.add_unary(u.var, u.cost0, u.cost1);
            for (const PairwiseTerm& p : frag.pairwise) builder.add_pairwise(p);
        }
    }
    return builder.finish();
}

struct MaxFlowResult {
    std::int64_t flow = 0;
    std::vector<bool> source_side; ///< per variable; source side decodes as label 1
    std::uint64_t phases = 0;
};

/// Maximum s-t flow over the scaled graph; the minimal source side of the
/// residual graph defines the minimizing assignment.
inline MaxFlowResult max_flow(const CutGraph& graph) {
    const int n = static_cast<int>(graph.num_vars);
    const int s = n, t = n + 1;
    FlowNetwork net(n + 2);
    for (int v = 0; v < n; ++v) {
        if (graph.src_cap[v] > 0) net.add_edge(s, v, graph.src_cap[v]);
        if (graph.snk_cap[v] > 0) net.add_edge(v, t, graph.snk_cap[v]);
    }
    for (const CutGraph::Arc& a : graph.arcs) net.add_edge(a.from, a.to, a.cap);

    MaxFlowResult result;
    result.flow = net.max_flow(s, t);
    result.phases = net.phases();
    std::vector<bool> reach = net.source_side(s);
    result.source_side.assign(reach.begin(), reach.begin() + n);
    return result;
}

/// Scaled cut energy of a full assignment over original + auxiliary
/// variables, decoded back to real units.
inline Cost cut_graph_energy(const CutGraph& graph, const std::vector<bool>& assignment) {
    if (assignment.size() != graph.num_vars)
        throw LengthMismatch("assignment does not cover all cut-graph variables");
    std::int64_t total = 0;
    for (std::size_t v = 0; v < graph.num_vars; ++v)
        total += assignment[v] ? graph.snk_cap[v] : graph.src_cap[v];
    for (const CutGraph::Arc& a : graph.arcs)
        if (assignment[static_cast<std::size_t>(a.from)] && !assignment[static_cast<std::size_t>(a.to)])
            total += a.cap;
    return graph.offset + static_cast<double>(total) / static_cast<double>(kCapacityScale);
}

/// Cut energy of an assignment of the original variables, minimizing over the
/// auxiliaries. Auxiliaries are independent given x (no aux-aux arcs), so
/// each one picks its cheaper side locally.
inline Cost cut_graph_energy_min_aux(const CutGraph& graph, const LabelVector& x) {
    if (x.size() != graph.num_original)
        throw LengthMismatch("assignment does not cover the original variables");
    auto is_aux = [&](int v) { return static_cast<std::size_t>(v) >= graph.num_original; };
    std::int64_t total = 0;
    for (std::size_t v = 0; v < graph.num_original; ++v)
        total += x.bit(v) ? graph.snk_cap[v] : graph.src_cap[v];

    std::vector<std::int64_t> cost0(graph.num_vars - graph.num_original, 0);
    std::vector<std::int64_t> cost1(graph.num_vars - graph.num_original, 0);
    for (std::size_t a = 0; a < cost0.size(); ++a) {
        cost0[a] = graph.src_cap[graph.num_original + a];
        cost1[a] = graph.snk_cap[graph.num_original + a];
    }
    for (const CutGraph::Arc& arc : graph.arcs) {
        bool from_aux = is_aux(arc.from), to_aux = is_aux(arc.to);
        if (from_aux && to_aux) throw SemanticError("unexpected arc between auxiliary variables");
        if (!from_aux && !to_aux) {
            if (x.bit(static_cast<std::size_t>(arc.from)) && !x.bit(static_cast<std::size_t>(arc.to)))
                total += arc.cap;
        } else if (from_aux) {
            // cut iff aux = 1 and target takes 0
            if (!x.bit(static_cast<std::size_t>(arc.to)))
                cost1[static_cast<std::size_t>(arc.from) - graph.num_original] += arc.cap;
        } else {
            // cut iff source takes 1 and aux = 0
            if (x.bit(static_cast<std::size_t>(arc.from)))
                cost0[static_cast<std::size_t>(arc.to) - graph.num_original] += arc.cap;
        }
    }
    for (std::size_t a = 0; a < cost0.size(); ++a) total += std::min(cost0[a], cost1[a]);
    return graph.offset + static_cast<double>(total) / static_cast<double>(kCapacityScale);
}

/// Exact minimization by reduction to minimum s-t cut. The reported energy is
/// the instance energy recomputed at the decoded assignment.
inline Solution minimize_cut(const Instance& inst) {
    CutGraph graph = assemble_energy(inst);
    MaxFlowResult flow = max_flow(graph);
    LabelVector x = [&] {
        std::vector<int> bits(inst.nodes, 0);
        for (std::size_t v = 0; v < inst.nodes; ++v) bits[v] = flow.source_side[v] ? 1 : 0;
        return LabelVector(std::span<const int>(bits));
    }();
    Solution sol{x, instance_energy(inst, x), SolveMethod::Cut, {}};
    sol.stats.flow = flow.flow;
    sol.stats.phases = flow.phases;
    return sol;
}

} // namespace labelcut

#endif
