#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "filtlab/operators.hpp"
#include "filtlab/stopping.hpp"

namespace filtlab {

/**
 * Result of a sup-type constant computation.  The witness is the first
 * maximizing coordinate in (level, block) scan order; for atom-indexed
 * constants (condition15_ratio, cor43_test_constant) witnessBlock carries the
 * atom id instead.  witnessLevel/witnessBlock are -1 when the scan never
 * recorded a positive candidate (e.g. everything skipped by a zero
 * convention).
 */
struct ConstantReport {
    double value = 0.0;
    bool infinite = false;
    int witnessLevel = -1;
    int witnessBlock = -1;
};

inline nlohmann::json constant_report_to_json(const ConstantReport& r) {
    nlohmann::json j;
    if (r.infinite)
        j["value"] = "inf";
    else
        j["value"] = r.value;
    j["witnessLevel"] = r.witnessLevel;
    j["witnessBlock"] = r.witnessBlock;
    return j;
}

namespace detail {

/// Keeps the first maximizer in scan order (level ascending, then id).
struct MaxTracker {
    ConstantReport rep;

    void update(int level, int id, double value) {
        if (rep.infinite) return;
        if (std::isinf(value)) {
            rep.infinite = true;
            rep.value = value;
            rep.witnessLevel = level;
            rep.witnessBlock = id;
            return;
        }
        if (value > rep.value || rep.witnessLevel < 0) {
            rep.value = value;
            rep.witnessLevel = level;
            rep.witnessBlock = id;
        }
    }
};

/// Per-block mu-average of an atom function at one level.
inline std::vector<double> block_avg(const FilteredSpace& sp, int level, const std::vector<double>& f) {
    std::vector<double> out(sp.block_count(level));
    for (int b = 0; b < sp.block_count(level); ++b) {
        double s = 0.0;
        for (int a : sp.block_atoms(level, b)) s += f[a] * sp.mass(a);
        out[b] = s / sp.block_mass(level, b);
    }
    return out;
}

inline void check_exhaustive_cap(const FilteredSpace& sp, int maxBlocks) {
    for (int i = 0; i <= sp.levels(); ++i)
        if (sp.block_count(i) > maxBlocks)
            throw CapacityError("exhaustive set enumeration needs <= " + std::to_string(maxBlocks) +
                                " blocks per level; level " + std::to_string(i) + " has " +
                                std::to_string(sp.block_count(i)));
}

} // namespace detail

/// Options for the test-set constants.  By default single blocks are tested
/// (sufficient: numerators are additive over disjoint blocks and the
/// denominators are superadditive for the exponent ranges accepted here).
/// The exhaustive mode enumerates every union of blocks per level for
/// cross-validation on small spaces.
struct SetTestOptions {
    bool exhaustiveSets = false;
    int maxBlocksPerLevel = 12;
};

/**
 * Muckenhoupt constant [w]_{A_p} = sup over levels and blocks of
 * (E_i w)(E_i sigma)^{p-1} with sigma = w^{1-p'}.
 */
inline ConstantReport ap_constant(const FilteredSpace& sp, const WeightVector& w, double p) {
    require_strictly_positive(sp, w, "ap_constant");
    const WeightVector sigma = dual_weight(sp, w, p);
    detail::MaxTracker best;
    for (int i = 0; i <= sp.levels(); ++i) {
        const auto ew = detail::block_avg(sp, i, w.v);
        const auto es = detail::block_avg(sp, i, sigma.v);
        for (int b = 0; b < sp.block_count(i); ++b)
            best.update(i, b, ew[b] * std::pow(es[b], p - 1.0));
    }
    return best.rep;
}

/// Hruscev-style A_infty constant: sup (E_i w) exp(-E_i log w).
inline ConstantReport ainfty_constant(const FilteredSpace& sp, const WeightVector& w) {
    require_strictly_positive(sp, w, "ainfty_constant");
    std::vector<double> logw(w.v.size());
    for (std::size_t a = 0; a < w.v.size(); ++a) logw[a] = std::log(w.v[a]);
    detail::MaxTracker best;
    for (int i = 0; i <= sp.levels(); ++i) {
        const auto ew = detail::block_avg(sp, i, w.v);
        const auto el = detail::block_avg(sp, i, logw);
        for (int b = 0; b < sp.block_count(i); ++b)
            best.update(i, b, ew[b] * std::exp(-el[b]));
    }
    return best.rep;
}

/**
 * How far the tail sums are from being measurable at their own level:
 * sup over (level, atom) of max(E_i abar_i / abar_i, abar_i / E_i abar_i).
 *
 * 0/0 counts as 1 (the neutral value); a one-sided zero makes the family
 * unusable for the equivalence and reports +inf.  witnessBlock is the atom.
 */
inline ConstantReport condition15_ratio(const FilteredSpace& sp, const AdaptedFamily& alpha) {
    check_adapted(sp, alpha);
    LevelFamily abar = tail_sums(sp, alpha);
    detail::MaxTracker best;
    for (int i = 0; i <= sp.levels(); ++i) {
        AtomFunction e = cond_exp(sp, i, abar[i]);
        for (int a = 0; a < sp.atom_count(); ++a) {
            const double x = abar[i][a], y = e[a];
            double ratio;
            if (x == 0.0 && y == 0.0)
                ratio = 1.0;
            else if (x == 0.0 || y == 0.0)
                ratio = kInf;
            else
                ratio = std::max(x / y, y / x);
            best.update(i, a, ratio);
        }
    }
    return best.rep;
}

namespace detail {

// Shared scan for the two Sawyer-type constants.  numerator^power is additive
// over the atoms of a candidate set; the denominator is denomMass(set)^dexp.
// Zero conventions: denominator mass 0 with zero numerator -> skipped,
// with positive numerator -> +inf.
template <typename NumAtom>
inline void sawyer_scan(const FilteredSpace& sp, int level, NumAtom&& numAtom,
                        const std::vector<double>& denomAtomMass, double numRootExp, double denomExp,
                        const SetTestOptions& opt, MaxTracker& best) {
    const int B = sp.block_count(level);
    std::vector<double> num(B, 0.0), den(B, 0.0);
    for (int b = 0; b < B; ++b) {
        for (int a : sp.block_atoms(level, b)) {
            num[b] += numAtom(a);
            den[b] += denomAtomMass[a];
        }
    }
    auto ratio = [&](double n, double d) -> double {
        if (!(d > 0.0)) return n > 0.0 ? kInf : -1.0; // -1 marks "skip"
        return std::pow(n, numRootExp) / std::pow(d, denomExp);
    };
    if (!opt.exhaustiveSets) {
        for (int b = 0; b < B; ++b) {
            const double r = ratio(num[b], den[b]);
            if (r >= 0.0) best.update(level, b, r);
        }
        return;
    }
    check_exhaustive_cap(sp, opt.maxBlocksPerLevel);
    for (unsigned mask = 1; mask < (1u << B); ++mask) {
        double n = 0.0, d = 0.0;
        for (int b = 0; b < B; ++b)
            if (mask & (1u << b)) {
                n += num[b];
                d += den[b];
            }
        const double r = ratio(n, d);
        // witness id = lowest block of the union; kept deterministic
        if (r >= 0.0) best.update(level, static_cast<int>(mask & ~(mask - 1)) > 0 ? __builtin_ctz(mask) : 0, r);
    }
}

} // namespace detail

/**
 * Sawyer test constant for the trace inequality: sup over (i, E) of
 *   ( int_E (sum_{j>=i} alpha_j E_j w)^{p'} dmu )^{1/p'}  /  w(E)^{1/q'}.
 */
inline ConstantReport sawyer_trace_constant(const FilteredSpace& sp, const AdaptedFamily& alpha,
                                            const WeightVector& w, double p, double q,
                                            const SetTestOptions& opt = {}) {
    check_adapted(sp, alpha);
    check_weight(sp, w);
    const double pp = conjugate_exponent(p);
    const double qq = conjugate_exponent(q);
    if (p > q + 1e-15) throw ParameterError("sawyer_trace_constant needs p <= q");
    AtomFunction wf(w.v);
    std::vector<double> wAtomMass(sp.atom_count());
    for (int a = 0; a < sp.atom_count(); ++a) wAtomMass[a] = w.v[a] * sp.mass(a);

    detail::MaxTracker best;
    // suffix accumulation of sum_{j>=i} alpha_j E_j w, computed fine-to-coarse
    AtomFunction acc(sp.atom_count(), 0.0);
    std::vector<AtomFunction> tails(sp.levels() + 1, AtomFunction(0));
    for (int i = sp.levels(); i >= 0; --i) {
        AtomFunction ew = cond_exp(sp, i, wf);
        for (int a = 0; a < sp.atom_count(); ++a)
            acc[a] += alpha.level[i][sp.block_of(a, i)] * ew[a];
        tails[i] = acc;
    }
    for (int i = 0; i <= sp.levels(); ++i) {
        auto numAtom = [&](int a) { return std::pow(tails[i][a], pp) * sp.mass(a); };
        detail::sawyer_scan(sp, i, numAtom, wAtomMass, 1.0 / pp, 1.0 / qq, opt, best);
    }
    return best.rep;
}

/**
 * Sawyer test constant for the maximal operator: sup over (i, E) of
 *   ( int_E (sup_{j>=i} alpha_j E_j sigma)^q u dmu )^{1/q}  /  sigma(E)^{1/p}.
 */
inline ConstantReport sawyer_max_constant(const FilteredSpace& sp, const AdaptedFamily& alpha,
                                          const WeightVector& u, const WeightVector& sigma, double p,
                                          double q, const SetTestOptions& opt = {}) {
    check_adapted(sp, alpha);
    check_weight(sp, u);
    check_weight(sp, sigma);
    if (!(p > 1.0)) throw ParameterError("sawyer_max_constant needs p > 1");
    if (!(q > 0.0)) throw ParameterError("sawyer_max_constant needs q > 0");
    AtomFunction sf(sigma.v);
    std::vector<double> sigmaAtomMass(sp.atom_count());
    for (int a = 0; a < sp.atom_count(); ++a) sigmaAtomMass[a] = sigma.v[a] * sp.mass(a);

    detail::MaxTracker best;
    AtomFunction sup(sp.atom_count(), 0.0);
    std::vector<AtomFunction> sups(sp.levels() + 1, AtomFunction(0));
    for (int i = sp.levels(); i >= 0; --i) {
        AtomFunction es = cond_exp(sp, i, sf);
        for (int a = 0; a < sp.atom_count(); ++a)
            sup[a] = std::max(sup[a], alpha.level[i][sp.block_of(a, i)] * es[a]);
        sups[i] = sup;
    }
    for (int i = 0; i <= sp.levels(); ++i) {
        auto numAtom = [&](int a) { return std::pow(sups[i][a], q) * u.v[a] * sp.mass(a); };
        detail::sawyer_scan(sp, i, numAtom, sigmaAtomMass, 1.0 / q, 1.0 / p, opt, best);
    }
    return best.rep;
}

/**
 * theta-Carleson constant in block-test form:
 *   sup over (i, E in P_i) of  sum_{j>=i} nu_j(E)  /  mu(E)^theta.
 * nu_j(E) sums nu_j over the blocks of P_j contained in E.
 */
inline ConstantReport carleson_constant(const FilteredSpace& sp, const CarlesonFamily& nu, double theta,
                                        const SetTestOptions& opt = {}) {
    check_carleson(sp, nu);
    if (!(theta >= 1.0)) throw ParameterError("carleson_constant needs theta >= 1");
    const int L = sp.levels();
    // S[i][b] = sum_{j>=i} nu_j over blocks below block b of P_i
    std::vector<std::vector<double>> S(L + 1);
    S[L] = nu.level[L];
    for (int i = L - 1; i >= 0; --i) {
        S[i] = nu.level[i];
        for (int c = 0; c < sp.block_count(i + 1); ++c)
            S[i][sp.parent_block(i + 1, c)] += S[i + 1][c];
    }
    detail::MaxTracker best;
    for (int i = 0; i <= L; ++i) {
        if (!opt.exhaustiveSets) {
            for (int b = 0; b < sp.block_count(i); ++b)
                best.update(i, b, S[i][b] / std::pow(sp.block_mass(i, b), theta));
        } else {
            detail::check_exhaustive_cap(sp, opt.maxBlocksPerLevel);
            const int B = sp.block_count(i);
            for (unsigned mask = 1; mask < (1u << B); ++mask) {
                double n = 0.0, m = 0.0;
                for (int b = 0; b < B; ++b)
                    if (mask & (1u << b)) {
                        n += S[i][b];
                        m += sp.block_mass(i, b);
                    }
                best.update(i, __builtin_ctz(mask), n / std::pow(m, theta));
            }
        }
    }
    return best.rep;
}

/**
 * theta-Carleson constant in stopping-time form:
 *   sup over stopping times tau with mu(tau < inf) > 0 of
 *   sum_i nu_i({tau <= i}) / mu({tau < inf})^theta.
 * Enumerates every stopping time; guarded by `cap` (capacity error beyond).
 * Witness coordinates do not apply here and stay at -1.
 */
inline ConstantReport carleson_constant_stopping(const FilteredSpace& sp, const CarlesonFamily& nu,
                                                 double theta, std::int64_t cap = 100000) {
    check_carleson(sp, nu);
    if (!(theta >= 1.0)) throw ParameterError("carleson_constant_stopping needs theta >= 1");
    ConstantReport rep;
    for (const StoppingTime& tau : enumerate_stopping_times(sp, cap)) {
        double stoppedMass = 0.0;
        for (int a = 0; a < sp.atom_count(); ++a)
            if (tau.value[a] != StoppingTime::kNever) stoppedMass += sp.mass(a);
        if (!(stoppedMass > 0.0)) continue;
        double num = 0.0;
        for (int i = 0; i <= sp.levels(); ++i)
            for (int b = 0; b < sp.block_count(i); ++b)
                if (tau.value[sp.block_atoms(i, b)[0]] <= i) num += nu.level[i][b];
        rep.value = std::max(rep.value, num / std::pow(stoppedMass, theta));
    }
    return rep;
}

/**
 * ||sum_i w_i / E_i w||_{L^{theta'}(w dmu)} -- the norm form of the Carleson
 * condition for families of level weights w_i.
 */
inline double carleson_qlp_constant(const FilteredSpace& sp, const AdaptedFamily& wfam,
                                    const WeightVector& w, double theta) {
    check_adapted(sp, wfam);
    require_strictly_positive(sp, w, "carleson_qlp_constant");
    const double tt = conjugate_exponent(theta);
    AtomFunction wf(w.v);
    AtomFunction sum(sp.atom_count(), 0.0);
    for (int i = 0; i <= sp.levels(); ++i) {
        AtomFunction ew = cond_exp(sp, i, wf);
        for (int a = 0; a < sp.atom_count(); ++a)
            sum[a] += wfam.level[i][sp.block_of(a, i)] / ew[a];
    }
    return lp_norm(sp, sum, tt, &w);
}

/**
 * Pointwise test constant
 *   sup over (i, atom) of ( E_i[(sup_{j>=i} alpha_j E_j sigma)^p u] / E_i sigma )^{1/p}.
 * 0/0 contributes 0; a positive numerator over a zero denominator is +inf.
 * witnessBlock is the atom id.
 */
inline ConstantReport cor43_test_constant(const FilteredSpace& sp, const AdaptedFamily& alpha,
                                          const WeightVector& u, const WeightVector& sigma, double p) {
    check_adapted(sp, alpha);
    check_weight(sp, u);
    check_weight(sp, sigma);
    if (!(p > 0.0)) throw ParameterError("cor43_test_constant needs p > 0");
    AtomFunction sf(sigma.v);
    detail::MaxTracker best;
    AtomFunction sup(sp.atom_count(), 0.0);
    std::vector<AtomFunction> sups(sp.levels() + 1, AtomFunction(0));
    for (int i = sp.levels(); i >= 0; --i) {
        AtomFunction es = cond_exp(sp, i, sf);
        for (int a = 0; a < sp.atom_count(); ++a)
            sup[a] = std::max(sup[a], alpha.level[i][sp.block_of(a, i)] * es[a]);
        sups[i] = sup;
    }
    for (int i = 0; i <= sp.levels(); ++i) {
        AtomFunction h(sp.atom_count());
        for (int a = 0; a < sp.atom_count(); ++a)
            h[a] = std::pow(sups[i][a], p) * u.v[a];
        AtomFunction num = cond_exp(sp, i, h);
        AtomFunction den = cond_exp(sp, i, sf);
        for (int a = 0; a < sp.atom_count(); ++a) {
            double r;
            if (den[a] > 0.0)
                r = std::pow(num[a] / den[a], 1.0 / p);
            else
                r = num[a] > 0.0 ? kInf : 0.0;
            best.update(i, a, r);
        }
    }
    return best.rep;
}

} // namespace filtlab
