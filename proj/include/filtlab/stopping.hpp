#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "filtlab/operators.hpp"

namespace filtlab {

/**
 * A map atom -> level in {0..L} or kNever.  Adaptedness ({tau <= i} a union
 * of P_i blocks for every i) is a property checked by is_stopping_time, not
 * enforced by the type.
 */
struct StoppingTime {
    static constexpr int kNever = std::numeric_limits<int>::max();
    std::vector<int> value;

    int operator[](int a) const { return value[a]; }
};

/// First level where the adapted family exceeds lambda, per atom.
inline StoppingTime hitting_time(const FilteredSpace& sp, const AdaptedFamily& fam, double lambda) {
    check_adapted(sp, fam);
    StoppingTime tau;
    tau.value.assign(sp.atom_count(), StoppingTime::kNever);
    for (int a = 0; a < sp.atom_count(); ++a)
        for (int i = 0; i <= sp.levels(); ++i)
            if (fam.level[i][sp.block_of(a, i)] > lambda) {
                tau.value[a] = i;
                break;
            }
    return tau;
}

struct StoppingCheck {
    bool ok = true;
    int level = -1; // first offending coordinates when !ok
    int block = -1;
};

/// Verifies {tau <= i} is a union of P_i blocks for every level i.
inline StoppingCheck is_stopping_time(const FilteredSpace& sp, const StoppingTime& tau) {
    if (static_cast<int>(tau.value.size()) != sp.atom_count())
        throw ValidationError("stopping time must assign a value to every atom");
    for (int i = 0; i <= sp.levels(); ++i)
        for (int b = 0; b < sp.block_count(i); ++b) {
            const auto& atoms = sp.block_atoms(i, b);
            const bool first = tau.value[atoms[0]] <= i;
            for (int a : atoms)
                if ((tau.value[a] <= i) != first) return {false, i, b};
        }
    return {};
}

/**
 * Number of stopping times, by the recursion
 *   t(block at finest level) = 2            (stop here or never)
 *   t(block at level i)      = 1 + prod over children t(child)
 * multiplied over the level-0 blocks.  Returned as double since the count
 * grows doubly exponentially.
 */
inline double count_stopping_times(const FilteredSpace& sp) {
    const int L = sp.levels();
    std::vector<std::vector<double>> t(L + 1);
    t[L].assign(sp.block_count(L), 2.0);
    for (int i = L - 1; i >= 0; --i) {
        t[i].assign(sp.block_count(i), 1.0);
        for (int c = 0; c < sp.block_count(i + 1); ++c)
            t[i][sp.parent_block(i + 1, c)] *= t[i + 1][c];
        for (int b = 0; b < sp.block_count(i); ++b) t[i][b] += 1.0;
    }
    double total = 1.0;
    for (int b = 0; b < sp.block_count(0); ++b) total *= t[0][b];
    return total;
}

namespace detail {
inline void enumerate_block(const FilteredSpace& sp, int level, int block, std::vector<int>& tau,
                            std::vector<StoppingTime>& out, const std::vector<const StoppingTime*>& prefix);

// Enumerate all adapted assignments on one block of P_level: either the whole
// block stops at `level`, or the choice devolves independently onto its
// children (or "never" at the finest level).
inline void assignments_for_block(const FilteredSpace& sp, int level, int block,
                                  std::vector<std::vector<int>>& out) {
    const auto& atoms = sp.block_atoms(level, block);
    {
        std::vector<int> stopHere(sp.atom_count(), -2); // -2 = untouched
        for (int a : atoms) stopHere[a] = level;
        out.push_back(std::move(stopHere));
    }
    if (level == sp.levels()) {
        std::vector<int> never(sp.atom_count(), -2);
        for (int a : atoms) never[a] = StoppingTime::kNever;
        out.push_back(std::move(never));
        return;
    }
    // children of this block at level+1
    std::vector<int> children;
    for (int c = 0; c < sp.block_count(level + 1); ++c)
        if (sp.parent_block(level + 1, c) == block) children.push_back(c);
    std::vector<std::vector<std::vector<int>>> perChild(children.size());
    for (std::size_t k = 0; k < children.size(); ++k)
        assignments_for_block(sp, level + 1, children[k], perChild[k]);
    // cartesian product over children
    std::vector<std::size_t> idx(children.size(), 0);
    while (true) {
        std::vector<int> merged(sp.atom_count(), -2);
        for (std::size_t k = 0; k < children.size(); ++k)
            for (int a = 0; a < sp.atom_count(); ++a)
                if (perChild[k][idx[k]][a] != -2) merged[a] = perChild[k][idx[k]][a];
        out.push_back(std::move(merged));
        std::size_t k = 0;
        while (k < idx.size()) {
            if (++idx[k] < perChild[k].size()) break;
            idx[k] = 0;
            ++k;
        }
        if (k == idx.size()) break;
    }
}
} // namespace detail

/**
 * Every stopping time of the space, including tau == never everywhere.
 * Throws CapacityError when the count exceeds `cap`.
 */
inline std::vector<StoppingTime> enumerate_stopping_times(const FilteredSpace& sp, std::int64_t cap = 100000) {
    const double count = count_stopping_times(sp);
    if (count > static_cast<double>(cap))
        throw CapacityError("space admits about " + std::to_string(count) +
                            " stopping times, beyond the cap of " + std::to_string(cap));
    std::vector<std::vector<std::vector<int>>> perRoot(sp.block_count(0));
    for (int b = 0; b < sp.block_count(0); ++b)
        detail::assignments_for_block(sp, 0, b, perRoot[b]);
    std::vector<StoppingTime> out;
    std::vector<std::size_t> idx(perRoot.size(), 0);
    while (true) {
        StoppingTime tau;
        tau.value.assign(sp.atom_count(), StoppingTime::kNever);
        for (std::size_t k = 0; k < perRoot.size(); ++k)
            for (int a = 0; a < sp.atom_count(); ++a)
                if (perRoot[k][idx[k]][a] != -2) tau.value[a] = perRoot[k][idx[k]][a];
        out.push_back(std::move(tau));
        std::size_t k = 0;
        while (k < idx.size()) {
            if (++idx[k] < perRoot[k].size()) break;
            idx[k] = 0;
            ++k;
        }
        if (k == idx.size()) break;
    }
    return out;
}

/**
 * Level sets G_i = {tau = i} of the hitting time of lambda, each returned as
 * a union of P_i blocks (refinement makes that possible).
 */
inline std::vector<MeasurableSet> level_decomposition(const FilteredSpace& sp, const AdaptedFamily& fam,
                                                      double lambda) {
    StoppingTime tau = hitting_time(sp, fam, lambda);
    std::vector<MeasurableSet> out(sp.levels() + 1);
    for (int i = 0; i <= sp.levels(); ++i) {
        out[i].level = i;
        for (int b = 0; b < sp.block_count(i); ++b)
            if (tau.value[sp.block_atoms(i, b)[0]] == i) out[i].blocks.push_back(b);
    }
    return out;
}

/// One piece E_j^i of the dyadic decomposition below: atoms with
/// 2^j < M f <= 2^{j+1} whose first crossing of 2^j happened at level i.
struct SawyerCell {
    int j = 0;
    int level = 0;
    std::vector<int> atoms;
};

struct SawyerDecomposition {
    int jMin = 0;
    int jMax = 0;
    std::vector<SawyerCell> cells;
};

/**
 * Dyadic stopping decomposition of the maximal function M f = sup alpha_i E_i f
 * for f >= 0: tau_j = first level with alpha_i E_i f > 2^j, F_j its level set
 * band, cells E_j^i = F_j intersect {tau_j = i}.  The j-window spans
 * floor(log2 of the smallest positive value of Mf) - 1 up to ceil(log2 max),
 * which is enough for the cells to partition {Mf > 0}.
 */
inline SawyerDecomposition sawyer_decomposition(const FilteredSpace& sp, const AdaptedFamily& alpha,
                                                const AtomFunction& f) {
    check_adapted(sp, alpha);
    check_atoms_match(sp, f.size(), "function");
    for (int a = 0; a < sp.atom_count(); ++a)
        if (f[a] < 0.0) throw ValidationError("sawyer_decomposition needs f >= 0");
    AtomFunction m = gen_max(sp, alpha, f);
    double minPos = kInf, maxVal = 0.0;
    for (int a = 0; a < sp.atom_count(); ++a) {
        if (m[a] > 0.0) minPos = std::min(minPos, m[a]);
        maxVal = std::max(maxVal, m[a]);
    }
    SawyerDecomposition out;
    if (!(maxVal > 0.0)) return out; // Mf identically zero: nothing to decompose
    out.jMin = static_cast<int>(std::floor(std::log2(minPos))) - 1;
    out.jMax = static_cast<int>(std::ceil(std::log2(maxVal)));

    // tau_j per atom, reusing the per-level values alpha_i E_i f
    std::vector<AtomFunction> lev(sp.levels() + 1, AtomFunction(sp.atom_count()));
    for (int i = 0; i <= sp.levels(); ++i) {
        AtomFunction ei = cond_exp(sp, i, f);
        for (int a = 0; a < sp.atom_count(); ++a)
            lev[i][a] = alpha.level[i][sp.block_of(a, i)] * ei[a];
    }
    auto tau_at = [&](int a, double threshold) {
        for (int i = 0; i <= sp.levels(); ++i)
            if (lev[i][a] > threshold) return i;
        return StoppingTime::kNever;
    };
    for (int j = out.jMin; j <= out.jMax; ++j) {
        const double lo = std::exp2(static_cast<double>(j));
        const double hi = std::exp2(static_cast<double>(j + 1));
        std::vector<std::vector<int>> byLevel(sp.levels() + 1);
        for (int a = 0; a < sp.atom_count(); ++a) {
            if (!(m[a] > lo && m[a] <= hi)) continue; // F_j band
            const int i = tau_at(a, lo);
            byLevel[i].push_back(a);
        }
        for (int i = 0; i <= sp.levels(); ++i)
            if (!byLevel[i].empty()) out.cells.push_back({j, i, std::move(byLevel[i])});
    }
    return out;
}

/**
 * One node of a principal-set tree: the set P (a union of blocks of
 * P_{kappa1}), its dyadic band kappa2 (2^{kappa2-1} < E_{kappa1}[1_P sigma]
 * <= 2^{kappa2} on P), and the atoms of E(P) = P minus all children.
 */
struct PrincipalNode {
    int kappa1 = 0;
    int kappa2 = 0;
    std::vector<int> blockIds;
    std::vector<int> atoms;
    std::vector<int> stoppedAtoms; // E(P)
    std::vector<PrincipalNode> children;
};

namespace detail {

inline void build_principal(const FilteredSpace& sp, const std::vector<double>& sigma,
                            PrincipalNode& node) {
    const int L = sp.levels();
    const int i0 = node.kappa1;
    std::vector<char> inP(sp.atom_count(), 0);
    for (int a : node.atoms) inP[a] = 1;
    const double threshold = std::exp2(static_cast<double>(node.kappa2 + 1));

    // tau_P per atom of P: first level j >= kappa1 with E_j[1_P sigma] > 2^{kappa2+1}.
    // E_j[1_P sigma] on an atom of P equals the plain block average of sigma
    // for j >= kappa1 because blocks of P_j inside P stay inside P.
    std::vector<int> tau(sp.atom_count(), StoppingTime::kNever);
    std::vector<std::vector<int>> stoppedBlocks(L + 1); // blocks of P_j fully stopped at j
    for (int j = i0; j <= L; ++j) {
        for (int b = 0; b < sp.block_count(j); ++b) {
            const auto& atoms = sp.block_atoms(j, b);
            if (!inP[atoms[0]]) continue;
            if (tau[atoms[0]] != StoppingTime::kNever) continue; // already stopped earlier
            double s = 0.0;
            for (int a : atoms) s += sigma[a] * sp.mass(a);
            if (s / sp.block_mass(j, b) > threshold) {
                for (int a : atoms) tau[a] = j;
                stoppedBlocks[j].push_back(b);
            }
        }
    }
    // children: per stop level j, group the stopped blocks by dyadic band of
    // their sigma-average; each nonempty (j, band) pair is one child.
    for (int j = i0 + 1; j <= L; ++j) {
        if (stoppedBlocks[j].empty()) continue;
        std::map<int, std::vector<int>> bands; // l -> block ids
        for (int b : stoppedBlocks[j]) {
            double s = 0.0;
            for (int a : sp.block_atoms(j, b)) s += sigma[a] * sp.mass(a);
            const double avg = s / sp.block_mass(j, b);
            // unique l with 2^{l-1} < avg <= 2^l
            int l = static_cast<int>(std::ceil(std::log2(avg)));
            if (std::exp2(static_cast<double>(l - 1)) >= avg) --l;
            while (avg > std::exp2(static_cast<double>(l))) ++l;
            bands[l].push_back(b);
        }
        for (auto& [l, blocks] : bands) {
            PrincipalNode child;
            child.kappa1 = j;
            child.kappa2 = l;
            child.blockIds = blocks;
            for (int b : blocks)
                for (int a : sp.block_atoms(j, b)) child.atoms.push_back(a);
            std::sort(child.atoms.begin(), child.atoms.end());
            node.children.push_back(std::move(child));
        }
    }
    for (int a : node.atoms)
        if (tau[a] == StoppingTime::kNever) node.stoppedAtoms.push_back(a);
    for (auto& child : node.children) build_principal(sp, sigma, child);
}

} // namespace detail

/**
 * Principal-set tree rooted at a single block of P_level.  The root band
 * kappa2 is the unique k with 2^{k-1} < sigma(P)/mu(P) <= 2^k; children stop
 * where the sigma-average first exceeds 2^{kappa2+1} and are grouped by the
 * dyadic band of their average (one child per (level, band) pair).
 */
inline PrincipalNode principal_sets(const FilteredSpace& sp, const WeightVector& sigma,
                                    const MeasurableSet& root, int level) {
    check_weight(sp, sigma);
    check_set(sp, root);
    if (root.level != level)
        throw ValidationError("principal_sets: root set level disagrees with the level argument");
    if (root.blocks.size() != 1)
        throw ValidationError("principal_sets: root must be a single block");
    const int b = root.blocks[0];
    double smass = 0.0;
    for (int a : sp.block_atoms(level, b)) smass += sigma.v[a] * sp.mass(a);
    if (!(smass > 0.0))
        throw DegenerateWeightError("principal_sets: root block has zero sigma-mass");
    const double avg = smass / sp.block_mass(level, b);
    int k = static_cast<int>(std::ceil(std::log2(avg)));
    if (std::exp2(static_cast<double>(k - 1)) >= avg) --k;
    while (avg > std::exp2(static_cast<double>(k))) ++k;

    PrincipalNode rootNode;
    rootNode.kappa1 = level;
    rootNode.kappa2 = k;
    rootNode.blockIds = {b};
    rootNode.atoms = sp.block_atoms(level, b);
    detail::build_principal(sp, sigma.v, rootNode);
    return rootNode;
}

inline nlohmann::json principal_node_to_json(const PrincipalNode& n) {
    nlohmann::json children = nlohmann::json::array();
    for (const auto& c : n.children) children.push_back(principal_node_to_json(c));
    return nlohmann::json{{"kappa1", n.kappa1},
                          {"kappa2", n.kappa2},
                          {"blockIds", n.blockIds},
                          {"stoppedAtoms", n.stoppedAtoms},
                          {"children", children}};
}

} // namespace filtlab
