#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "filtlab/errors.hpp"
#include "filtlab/numeric.hpp"

namespace filtlab {

/**
 * A finite filtered measure space: atoms with positive masses together with a
 * chain of partitions P_0 ⊂ P_1 ⊂ ... ⊂ P_L, each refining the previous one.
 * Level 0 is the coarsest.  Blocks are numbered 0..B_i-1 within each level and
 * every block is nonempty.
 *
 * The class is immutable after construction; all derived indexing (atom lists
 * per block, block masses, parent blocks) is precomputed.
 */
class FilteredSpace {
  public:
    FilteredSpace(std::vector<double> masses, std::vector<std::vector<int>> partitions)
        : mass_(std::move(masses)), partition_(std::move(partitions)) {
        validate_and_index();
    }

    int atom_count() const { return static_cast<int>(mass_.size()); }
    /// Finest level index L; the space has L+1 levels 0..L.
    int levels() const { return static_cast<int>(partition_.size()) - 1; }

    double mass(int atom) const { return mass_[atom]; }
    double total_mass() const { return totalMass_; }

    int block_of(int atom, int level) const { return partition_[level][atom]; }
    int block_count(int level) const { return static_cast<int>(blockAtoms_[level].size()); }
    const std::vector<int>& block_atoms(int level, int block) const { return blockAtoms_[level][block]; }
    double block_mass(int level, int block) const { return blockMass_[level][block]; }

    /// Block of P_{level-1} containing the given block of P_level.
    int parent_block(int level, int block) const { return parent_[level][block]; }

    const std::vector<double>& masses() const { return mass_; }
    const std::vector<std::vector<int>>& partitions() const { return partition_; }

  private:
    void validate_and_index() {
        const int n = atom_count();
        if (n == 0) throw ValidationError("space must contain at least one atom");
        if (partition_.empty()) throw ValidationError("space must contain at least one level");
        totalMass_ = 0.0;
        for (int a = 0; a < n; ++a) {
            if (!(mass_[a] > 0.0) || !std::isfinite(mass_[a]))
                throw ValidationError("atom " + std::to_string(a) + " has non-positive mass");
            totalMass_ += mass_[a];
        }
        const int L = levels();
        blockAtoms_.resize(L + 1);
        blockMass_.resize(L + 1);
        parent_.resize(L + 1);
        for (int i = 0; i <= L; ++i) {
            if (static_cast<int>(partition_[i].size()) != n)
                throw ValidationError("partition at level " + std::to_string(i) + " must map every atom");
            int maxId = -1;
            for (int a = 0; a < n; ++a) {
                const int b = partition_[i][a];
                if (b < 0)
                    throw ValidationError("negative block id at level " + std::to_string(i) +
                                          ", atom " + std::to_string(a));
                maxId = std::max(maxId, b);
            }
            blockAtoms_[i].assign(maxId + 1, {});
            blockMass_[i].assign(maxId + 1, 0.0);
            for (int a = 0; a < n; ++a) {
                blockAtoms_[i][partition_[i][a]].push_back(a);
                blockMass_[i][partition_[i][a]] += mass_[a];
            }
            for (int b = 0; b <= maxId; ++b)
                if (blockAtoms_[i][b].empty())
                    throw ValidationError("empty block " + std::to_string(b) + " at level " + std::to_string(i));
            // refinement: atoms sharing a block at level i must share one at level i-1
            parent_[i].assign(maxId + 1, 0);
            for (int b = 0; b <= maxId; ++b) {
                const auto& atoms = blockAtoms_[i][b];
                if (i == 0) {
                    parent_[i][b] = -1;
                    continue;
                }
                const int p = partition_[i - 1][atoms[0]];
                for (int a : atoms)
                    if (partition_[i - 1][a] != p)
                        throw ValidationError("refinement violation at level " + std::to_string(i) +
                                              ": block " + std::to_string(b) +
                                              " straddles two blocks of the previous level");
                parent_[i][b] = p;
            }
        }
    }

    std::vector<double> mass_;
    std::vector<std::vector<int>> partition_; // [level][atom] -> block id
    double totalMass_ = 0.0;
    std::vector<std::vector<std::vector<int>>> blockAtoms_;
    std::vector<std::vector<double>> blockMass_;
    std::vector<std::vector<int>> parent_;
};

/// Union of blocks of one partition level.  Block ids are kept sorted.
struct MeasurableSet {
    int level = 0;
    std::vector<int> blocks;
};

/// Nonnegative weight per atom.
struct WeightVector {
    std::vector<double> v;

    double operator[](int a) const { return v[a]; }
    int size() const { return static_cast<int>(v.size()); }
};

/// Real-valued function per atom.
struct AtomFunction {
    std::vector<double> v;

    AtomFunction() = default;
    explicit AtomFunction(int n, double fill = 0.0) : v(n, fill) {}
    explicit AtomFunction(std::vector<double> values) : v(std::move(values)) {}

    double& operator[](int a) { return v[a]; }
    double operator[](int a) const { return v[a]; }
    int size() const { return static_cast<int>(v.size()); }
};

inline void check_atoms_match(const FilteredSpace& sp, int n, const char* what) {
    if (n != sp.atom_count())
        throw ValidationError(std::string(what) + " has " + std::to_string(n) +
                              " entries for a space with " + std::to_string(sp.atom_count()) + " atoms");
}

inline void check_weight(const FilteredSpace& sp, const WeightVector& w) {
    check_atoms_match(sp, w.size(), "weight");
    for (int a = 0; a < w.size(); ++a)
        if (w.v[a] < 0.0 || !std::isfinite(w.v[a]))
            throw ValidationError("weight at atom " + std::to_string(a) + " must be finite and >= 0");
}

inline bool strictly_positive(const WeightVector& w) {
    for (double x : w.v)
        if (!(x > 0.0)) return false;
    return true;
}

inline void require_strictly_positive(const FilteredSpace& sp, const WeightVector& w, const char* where) {
    check_weight(sp, w);
    if (!strictly_positive(w))
        throw DegenerateWeightError(std::string(where) + " requires a strictly positive weight");
}

/// Dyadic model space: 2^depth atoms of mass 2^-depth, levels 0..depth, each
/// block splitting in two.  depth 0 is the single-atom space.
inline FilteredSpace build_dyadic(int depth, int maxDepth = 20) {
    if (depth < 0) throw ValidationError("depth must be >= 0");
    if (depth > maxDepth)
        throw CapacityError("depth " + std::to_string(depth) + " exceeds cap " + std::to_string(maxDepth));
    const int n = 1 << depth;
    std::vector<double> masses(n, 1.0 / static_cast<double>(n));
    std::vector<std::vector<int>> parts(depth + 1, std::vector<int>(n));
    for (int i = 0; i <= depth; ++i)
        for (int a = 0; a < n; ++a)
            parts[i][a] = a >> (depth - i);
    return FilteredSpace(std::move(masses), std::move(parts));
}

/// General builder; validates positivity, refinement and block numbering.
inline FilteredSpace build_from_partitions(std::vector<double> masses,
                                           std::vector<std::vector<int>> partitions) {
    return FilteredSpace(std::move(masses), std::move(partitions));
}

inline void check_level(const FilteredSpace& sp, int level) {
    if (level < 0 || level > sp.levels())
        throw ValidationError("level " + std::to_string(level) + " out of range 0.." +
                              std::to_string(sp.levels()));
}

inline void check_set(const FilteredSpace& sp, const MeasurableSet& e) {
    check_level(sp, e.level);
    for (int b : e.blocks)
        if (b < 0 || b >= sp.block_count(e.level))
            throw ValidationError("unknown block id " + std::to_string(b) + " at level " +
                                  std::to_string(e.level));
}

/// mu(E), or the w-weighted measure when a weight is supplied.
inline double measure(const FilteredSpace& sp, const MeasurableSet& e, const WeightVector* w = nullptr) {
    check_set(sp, e);
    if (w) check_weight(sp, *w);
    double total = 0.0;
    for (int b : e.blocks)
        for (int a : sp.block_atoms(e.level, b))
            total += sp.mass(a) * (w ? w->v[a] : 1.0);
    return total;
}

// ---- JSON ----------------------------------------------------------------
// Space files look like {"masses":[...],"partitions":[[blockId per atom],...]}
// with partitions ordered coarse to fine.

inline nlohmann::json space_to_json(const FilteredSpace& sp) {
    return nlohmann::json{{"masses", sp.masses()}, {"partitions", sp.partitions()}};
}

inline FilteredSpace space_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("masses") || !j.contains("partitions"))
        throw ValidationError("space JSON must contain \"masses\" and \"partitions\"");
    std::vector<double> masses = j.at("masses").get<std::vector<double>>();
    std::vector<std::vector<int>> parts = j.at("partitions").get<std::vector<std::vector<int>>>();
    return FilteredSpace(std::move(masses), std::move(parts));
}

inline nlohmann::json atom_function_to_json(const AtomFunction& f) {
    return nlohmann::json{{"values", f.v}};
}

inline AtomFunction atom_function_from_json(const nlohmann::json& j, const FilteredSpace& sp) {
    if (!j.is_object() || !j.contains("values"))
        throw ValidationError("atom function JSON must contain \"values\"");
    AtomFunction f(j.at("values").get<std::vector<double>>());
    check_atoms_match(sp, f.size(), "atom function");
    return f;
}

inline nlohmann::json weight_to_json(const WeightVector& w) {
    return nlohmann::json{{"values", w.v}};
}

inline WeightVector weight_from_json(const nlohmann::json& j, const FilteredSpace& sp) {
    AtomFunction f = atom_function_from_json(j, sp);
    WeightVector w{std::move(f.v)};
    check_weight(sp, w);
    return w;
}

} // namespace filtlab
