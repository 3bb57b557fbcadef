#pragma once

#include <vector>

#include "json.hpp"

#include "filtlab/space.hpp"

namespace filtlab {

/**
 * A family (f_i) with f_i measurable with respect to P_i: one finite,
 * nonnegative value per block of each level.  Used for the coefficient
 * sequences alpha, for adapted test families, and for the per-level weights
 * of the Carleson-type suites.
 */
struct AdaptedFamily {
    std::vector<std::vector<double>> level; // [i][block]

    double at(int i, int block) const { return level[i][block]; }
};

/// Nonnegative mass per (level, block): a measure nu_i on each P_i.
struct CarlesonFamily {
    std::vector<std::vector<double>> level; // [i][block]

    double at(int i, int block) const { return level[i][block]; }
};

/// One atom-indexed function per level, for quantities (like the tail sums
/// of alpha) that are not measurable at their own level.
using LevelFamily = std::vector<AtomFunction>;

inline void check_family_shape(const FilteredSpace& sp, const std::vector<std::vector<double>>& level,
                               const char* what) {
    if (static_cast<int>(level.size()) != sp.levels() + 1)
        throw ValidationError(std::string(what) + " must provide one entry per level (expected " +
                              std::to_string(sp.levels() + 1) + ", got " + std::to_string(level.size()) + ")");
    for (int i = 0; i <= sp.levels(); ++i) {
        if (static_cast<int>(level[i].size()) != sp.block_count(i))
            throw ValidationError(std::string(what) + " at level " + std::to_string(i) + " has " +
                                  std::to_string(level[i].size()) + " values for " +
                                  std::to_string(sp.block_count(i)) + " blocks");
        for (std::size_t b = 0; b < level[i].size(); ++b)
            if (level[i][b] < 0.0 || !std::isfinite(level[i][b]))
                throw ValidationError(std::string(what) + " value at level " + std::to_string(i) +
                                      ", block " + std::to_string(b) + " must be finite and >= 0");
    }
}

inline void check_adapted(const FilteredSpace& sp, const AdaptedFamily& fam) {
    check_family_shape(sp, fam.level, "adapted family");
}

inline void check_carleson(const FilteredSpace& sp, const CarlesonFamily& nu) {
    check_family_shape(sp, nu.level, "carleson family");
}

/// Constant family, value c on every block of every level.
inline AdaptedFamily constant_family(const FilteredSpace& sp, double c) {
    AdaptedFamily fam;
    fam.level.resize(sp.levels() + 1);
    for (int i = 0; i <= sp.levels(); ++i)
        fam.level[i].assign(sp.block_count(i), c);
    return fam;
}

/// f_i spread onto atoms: out[a] = f_i(block of a at the level).
inline AtomFunction atom_values(const FilteredSpace& sp, const AdaptedFamily& fam, int i) {
    check_level(sp, i);
    AtomFunction out(sp.atom_count());
    for (int a = 0; a < sp.atom_count(); ++a)
        out[a] = fam.level[i][sp.block_of(a, i)];
    return out;
}

/// Pointwise sup over levels of an adapted family, as an atom function.
inline AtomFunction family_sup(const FilteredSpace& sp, const AdaptedFamily& fam) {
    AtomFunction out(sp.atom_count());
    for (int a = 0; a < sp.atom_count(); ++a) {
        double best = fam.level[0][sp.block_of(a, 0)];
        for (int i = 1; i <= sp.levels(); ++i)
            best = std::max(best, fam.level[i][sp.block_of(a, i)]);
        out[a] = best;
    }
    return out;
}

// ---- JSON ----------------------------------------------------------------
// {"levels":[{"blockValues":[...]},...]} coarse to fine.  An empty
// blockValues array stands for "all zeros at this level" and is materialized
// on load.

namespace detail {
inline std::vector<std::vector<double>> family_levels_from_json(const nlohmann::json& j,
                                                                const FilteredSpace& sp,
                                                                const char* what) {
    if (!j.is_object() || !j.contains("levels"))
        throw ValidationError(std::string(what) + " JSON must contain \"levels\"");
    const auto& levels = j.at("levels");
    std::vector<std::vector<double>> out;
    out.reserve(levels.size());
    for (const auto& entry : levels) {
        if (!entry.is_object() || !entry.contains("blockValues"))
            throw ValidationError(std::string(what) + " JSON levels need \"blockValues\"");
        out.push_back(entry.at("blockValues").get<std::vector<double>>());
    }
    for (int i = 0; i < static_cast<int>(out.size()) && i <= sp.levels(); ++i)
        if (out[i].empty()) out[i].assign(sp.block_count(i), 0.0);
    return out;
}

inline nlohmann::json family_levels_to_json(const std::vector<std::vector<double>>& level) {
    nlohmann::json levels = nlohmann::json::array();
    for (const auto& row : level)
        levels.push_back(nlohmann::json{{"blockValues", row}});
    return nlohmann::json{{"levels", levels}};
}
} // namespace detail

inline nlohmann::json adapted_family_to_json(const AdaptedFamily& fam) {
    return detail::family_levels_to_json(fam.level);
}

inline AdaptedFamily adapted_family_from_json(const nlohmann::json& j, const FilteredSpace& sp) {
    AdaptedFamily fam{detail::family_levels_from_json(j, sp, "adapted family")};
    check_adapted(sp, fam);
    return fam;
}

inline nlohmann::json carleson_family_to_json(const CarlesonFamily& nu) {
    return detail::family_levels_to_json(nu.level);
}

inline CarlesonFamily carleson_family_from_json(const nlohmann::json& j, const FilteredSpace& sp) {
    CarlesonFamily nu{detail::family_levels_from_json(j, sp, "carleson family")};
    check_carleson(sp, nu);
    return nu;
}

} // namespace filtlab
