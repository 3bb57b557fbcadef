#pragma once

#include <cmath>
#include <vector>

#include "filtlab/functions.hpp"
#include "filtlab/rng.hpp"
#include "filtlab/space.hpp"

namespace filtlab {

// ---------------------------------------------------------------------------
// Random instance generators.  Everything is driven by an explicit Rng so a
// (master seed, trial index) pair reproduces the instance exactly.
// ---------------------------------------------------------------------------

struct RandomSpaceOptions {
    int maxAtoms = 24;
    int levels = -1;   // exact level count L when >= 0, otherwise uniform 0..maxLevels
    int maxLevels = 5;
    double splitProb = 0.55; // chance that an atom boundary starts a new finest block
    double groupProb = 0.5;  // chance that a finer block starts a new coarser block
    double massSigma = 0.4;  // log-normal spread of the atom masses
};

/**
 * Random filtered space: atoms laid out on a line, the finest partition cut at
 * random boundaries, coarser partitions obtained by grouping adjacent finer
 * blocks.  Level 0 may have several blocks (a forest, not necessarily a single
 * root).  Masses are i.i.d. log-normal.
 */
inline FilteredSpace random_space(Rng& rng, const RandomSpaceOptions& opt = {}) {
    const int n = rng.uniform_int(1, opt.maxAtoms);
    const int L = opt.levels >= 0 ? opt.levels : rng.uniform_int(0, opt.maxLevels);

    std::vector<std::vector<int>> parts(L + 1, std::vector<int>(n, 0));
    for (int a = 1; a < n; ++a)
        parts[L][a] = parts[L][a - 1] + (rng.uniform() < opt.splitProb ? 1 : 0);
    for (int i = L - 1; i >= 0; --i) {
        const int fine = parts[i + 1][n - 1] + 1;
        std::vector<int> group(fine, 0);
        for (int b = 1; b < fine; ++b)
            group[b] = group[b - 1] + (rng.uniform() < opt.groupProb ? 1 : 0);
        for (int a = 0; a < n; ++a) parts[i][a] = group[parts[i + 1][a]];
    }
    std::vector<double> masses(n);
    for (int a = 0; a < n; ++a) masses[a] = rng.lognormal(opt.massSigma);
    return FilteredSpace(std::move(masses), std::move(parts));
}

/// Dyadic space of the given depth with i.i.d. log-normal atom masses.
inline FilteredSpace random_mass_dyadic(Rng& rng, int depth, double massSigma = 0.4) {
    FilteredSpace unit = build_dyadic(depth);
    std::vector<double> masses(unit.atom_count());
    for (std::size_t a = 0; a < masses.size(); ++a) masses[a] = rng.lognormal(massSigma);
    return FilteredSpace(std::move(masses), unit.partitions());
}

// ---- weights --------------------------------------------------------------

inline WeightVector weight_constant(const FilteredSpace& sp, double c) {
    return WeightVector{std::vector<double>(sp.atom_count(), c)};
}

inline WeightVector weight_lognormal(Rng& rng, const FilteredSpace& sp, double sigma) {
    std::vector<double> v(sp.atom_count());
    for (double& x : v) x = rng.lognormal(sigma);
    return WeightVector{std::move(v)};
}

/// Log-normal weight with some atoms zeroed out (for operators that accept
/// degenerate weights).
inline WeightVector weight_lognormal_with_zeros(Rng& rng, const FilteredSpace& sp, double sigma,
                                                double zeroProb) {
    WeightVector w = weight_lognormal(rng, sp, sigma);
    for (double& x : w.v)
        if (rng.uniform() < zeroProb) x = 0.0;
    return w;
}

/// One huge atom on a flat background; drives the A_p constant up.
inline WeightVector weight_spike(Rng& rng, const FilteredSpace& sp, double base = 1.0,
                                 double spikeLo = 10.0, double spikeHi = 1000.0) {
    std::vector<double> v(sp.atom_count(), base);
    v[rng.uniform_int(0, sp.atom_count() - 1)] = rng.uniform(spikeLo, spikeHi);
    return WeightVector{std::move(v)};
}

/**
 * Power weight on the dyadic space of the given depth: atom k carries the
 * exact average of x^delta over [k/N, (k+1)/N], N = 2^depth.  Requires
 * delta > -1 (integrable singularity at the origin); delta = 0 gives the
 * constant weight exactly.
 */
inline WeightVector weight_power_dyadic(int depth, double delta) {
    if (!(delta > -1.0)) throw ParameterError("weight_power_dyadic needs delta > -1");
    const int n = 1 << depth;
    const double N = static_cast<double>(n);
    std::vector<double> v(n);
    for (int k = 0; k < n; ++k) {
        const double hi = std::pow((k + 1) / N, delta + 1.0);
        const double lo = std::pow(k / N, delta + 1.0);
        v[k] = (hi - lo) * N / (delta + 1.0);
    }
    return WeightVector{std::move(v)};
}

// ---- multiplier families ---------------------------------------------------

/// alpha_i = value at one level, zero elsewhere.  Tail sums are constant per
/// level, so the tail-measurability ratio is exactly 1.
inline AdaptedFamily alpha_single_level(const FilteredSpace& sp, int level, double value) {
    check_level(sp, level);
    AdaptedFamily fam = constant_family(sp, 0.0);
    for (double& x : fam.level[level]) x = value;
    return fam;
}

/// alpha_i = scale * ratio^i, constant on each level; tail ratio exactly 1.
inline AdaptedFamily alpha_geometric(const FilteredSpace& sp, double ratio, double scale = 1.0) {
    AdaptedFamily fam = constant_family(sp, 0.0);
    double v = scale;
    for (int i = 0; i <= sp.levels(); ++i) {
        for (double& x : fam.level[i]) x = v;
        v *= ratio;
    }
    return fam;
}

/// Geometric decay with a bounded per-block jitter; keeps the tail ratio
/// finite while breaking level-constancy.
inline AdaptedFamily alpha_jittered_geometric(Rng& rng, const FilteredSpace& sp, double ratio,
                                              double jitter = 0.5, double scale = 1.0) {
    AdaptedFamily fam = constant_family(sp, 0.0);
    double v = scale;
    for (int i = 0; i <= sp.levels(); ++i) {
        for (double& x : fam.level[i]) x = v * rng.uniform(1.0 / (1.0 + jitter), 1.0 + jitter);
        v *= ratio;
    }
    return fam;
}

/// Each (level, block) entry nonzero with probability fillProb, log-normal value.
inline AdaptedFamily alpha_random_sparse(Rng& rng, const FilteredSpace& sp, double fillProb = 0.4,
                                         double sigma = 1.0) {
    AdaptedFamily fam = constant_family(sp, 0.0);
    for (auto& lvl : fam.level)
        for (double& x : lvl)
            if (rng.uniform() < fillProb) x = rng.lognormal(sigma);
    return fam;
}

/// Dense positive family, log-normal per (level, block).
inline AdaptedFamily adapted_lognormal(Rng& rng, const FilteredSpace& sp, double sigma = 1.0) {
    AdaptedFamily fam = constant_family(sp, 0.0);
    for (auto& lvl : fam.level)
        for (double& x : lvl) x = rng.lognormal(sigma);
    return fam;
}

// ---- Carleson families and functions ---------------------------------------

inline CarlesonFamily carleson_random(Rng& rng, const FilteredSpace& sp, double fillProb = 0.5,
                                      double sigma = 1.0) {
    AdaptedFamily fam = alpha_random_sparse(rng, sp, fillProb, sigma);
    return CarlesonFamily{std::move(fam.level)};
}

inline AtomFunction function_lognormal(Rng& rng, const FilteredSpace& sp, double sigma = 1.0) {
    AtomFunction f(sp.atom_count());
    for (int a = 0; a < sp.atom_count(); ++a) f[a] = rng.lognormal(sigma);
    return f;
}

inline AtomFunction function_signed(Rng& rng, const FilteredSpace& sp, double scale = 1.0) {
    AtomFunction f(sp.atom_count());
    for (int a = 0; a < sp.atom_count(); ++a) f[a] = scale * rng.normal();
    return f;
}

/// Nonnegative random sequence with a sprinkling of exact zeros.
inline std::vector<double> sequence_random(Rng& rng, int maxLen, double zeroProb = 0.2,
                                           double sigma = 1.0) {
    const int len = rng.uniform_int(0, maxLen);
    std::vector<double> a(len);
    for (double& x : a) x = rng.uniform() < zeroProb ? 0.0 : rng.lognormal(sigma);
    return a;
}

} // namespace filtlab
