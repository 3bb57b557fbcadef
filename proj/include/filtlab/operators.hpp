#pragma once

#include <cmath>

#include "filtlab/functions.hpp"
#include "filtlab/numeric.hpp"
#include "filtlab/space.hpp"

namespace filtlab {

/// Conditional expectation at one level: the mu-average of f over each block.
inline AtomFunction cond_exp(const FilteredSpace& sp, int level, const AtomFunction& f) {
    check_level(sp, level);
    check_atoms_match(sp, f.size(), "function");
    AtomFunction out(sp.atom_count());
    for (int b = 0; b < sp.block_count(level); ++b) {
        double s = 0.0;
        for (int a : sp.block_atoms(level, b)) s += f[a] * sp.mass(a);
        const double avg = s / sp.block_mass(level, b);
        for (int a : sp.block_atoms(level, b)) out[a] = avg;
    }
    return out;
}

/**
 * Weighted conditional expectation E_i(g w) / E_i(w).  Every block must carry
 * positive w-mass; a block of zero w-mass makes the quotient meaningless and
 * raises DegenerateWeightError naming the block.
 */
inline AtomFunction cond_exp_weighted(const FilteredSpace& sp, int level, const AtomFunction& g,
                                      const WeightVector& w) {
    check_level(sp, level);
    check_atoms_match(sp, g.size(), "function");
    check_weight(sp, w);
    AtomFunction out(sp.atom_count());
    for (int b = 0; b < sp.block_count(level); ++b) {
        double num = 0.0, den = 0.0;
        for (int a : sp.block_atoms(level, b)) {
            num += g[a] * w.v[a] * sp.mass(a);
            den += w.v[a] * sp.mass(a);
        }
        if (!(den > 0.0))
            throw DegenerateWeightError("weighted conditional expectation: block " + std::to_string(b) +
                                        " at level " + std::to_string(level) + " has zero weight mass");
        const double avg = num / den;
        for (int a : sp.block_atoms(level, b)) out[a] = avg;
    }
    return out;
}

/// Maximal function sup_i |E_i f|.
inline AtomFunction doob_max(const FilteredSpace& sp, const AtomFunction& f) {
    check_atoms_match(sp, f.size(), "function");
    AtomFunction out(sp.atom_count(), 0.0);
    for (int i = 0; i <= sp.levels(); ++i) {
        AtomFunction ei = cond_exp(sp, i, f);
        for (int a = 0; a < sp.atom_count(); ++a)
            out[a] = std::max(out[a], std::abs(ei[a]));
    }
    return out;
}

/// Generalized maximal operator sup_i alpha_i |E_i f|.
inline AtomFunction gen_max(const FilteredSpace& sp, const AdaptedFamily& alpha, const AtomFunction& f) {
    check_adapted(sp, alpha);
    check_atoms_match(sp, f.size(), "function");
    AtomFunction out(sp.atom_count(), 0.0);
    for (int i = 0; i <= sp.levels(); ++i) {
        AtomFunction ei = cond_exp(sp, i, f);
        for (int a = 0; a < sp.atom_count(); ++a)
            out[a] = std::max(out[a], alpha.level[i][sp.block_of(a, i)] * std::abs(ei[a]));
    }
    return out;
}

/// Positive linear operator T f = sum_i alpha_i E_i f.
inline AtomFunction pos_op(const FilteredSpace& sp, const AdaptedFamily& alpha, const AtomFunction& f) {
    check_adapted(sp, alpha);
    check_atoms_match(sp, f.size(), "function");
    AtomFunction out(sp.atom_count(), 0.0);
    for (int i = 0; i <= sp.levels(); ++i) {
        AtomFunction ei = cond_exp(sp, i, f);
        for (int a = 0; a < sp.atom_count(); ++a)
            out[a] += alpha.level[i][sp.block_of(a, i)] * ei[a];
    }
    return out;
}

/**
 * Tail sums abar_i = sum_{j >= i} alpha_j.  Because alpha_j for j > i is
 * finer than P_i, abar_i is generally not P_i-measurable, so the result is
 * stored atom-indexed per level rather than as an adapted family.
 */
inline LevelFamily tail_sums(const FilteredSpace& sp, const AdaptedFamily& alpha) {
    check_adapted(sp, alpha);
    const int L = sp.levels();
    LevelFamily out(L + 1, AtomFunction(sp.atom_count()));
    for (int a = 0; a < sp.atom_count(); ++a) {
        double acc = 0.0;
        for (int i = L; i >= 0; --i) {
            acc += alpha.level[i][sp.block_of(a, i)];
            out[i][a] = acc;
        }
    }
    return out;
}

/**
 * Discrete Wolff-type potential
 *   W(a) = sum_i alpha_i(a) * abar_i(a)^{p'-1} * (E_i w)(a)^{p'-1}.
 * Zero bases with the positive exponent p'-1 contribute zero.
 */
inline AtomFunction wolff_potential(const FilteredSpace& sp, const AdaptedFamily& alpha,
                                    const WeightVector& w, double p) {
    check_adapted(sp, alpha);
    check_weight(sp, w);
    const double t = conjugate_exponent(p) - 1.0; // = 1/(p-1) > 0
    LevelFamily abar = tail_sums(sp, alpha);
    AtomFunction out(sp.atom_count(), 0.0);
    AtomFunction wf(w.v);
    for (int i = 0; i <= sp.levels(); ++i) {
        AtomFunction ew = cond_exp(sp, i, wf);
        for (int a = 0; a < sp.atom_count(); ++a) {
            const double al = alpha.level[i][sp.block_of(a, i)];
            if (al == 0.0) continue;
            out[a] += al * std::pow(abar[i][a], t) * std::pow(ew[a], t);
        }
    }
    return out;
}

/// ||f||_{L^p(w dmu)} = (sum |f|^p w mu)^{1/p}; quasi-norm for 0 < p < 1.
inline double lp_norm(const FilteredSpace& sp, const AtomFunction& f, double p,
                      const WeightVector* w = nullptr) {
    if (!(p > 0.0) || !std::isfinite(p)) throw ParameterError("lp_norm: p must be positive and finite");
    check_atoms_match(sp, f.size(), "function");
    if (w) check_weight(sp, *w);
    double s = 0.0;
    for (int a = 0; a < sp.atom_count(); ++a)
        s += std::pow(std::abs(f[a]), p) * sp.mass(a) * (w ? w->v[a] : 1.0);
    return std::pow(s, 1.0 / p);
}

/// sigma = w^{1-p'}, the dual weight of w at exponent p.  Needs w > 0.
inline WeightVector dual_weight(const FilteredSpace& sp, const WeightVector& w, double p) {
    require_strictly_positive(sp, w, "dual_weight");
    const double e = 1.0 - conjugate_exponent(p);
    WeightVector sigma;
    sigma.v.resize(w.v.size());
    for (std::size_t a = 0; a < w.v.size(); ++a) sigma.v[a] = std::pow(w.v[a], e);
    return sigma;
}

} // namespace filtlab
