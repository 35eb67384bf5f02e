#ifndef KTG_RELATIONS_HPP
#define KTG_RELATIONS_HPP

#include "ktg/combo.hpp"

#include <memory>
#include <mutex>
#include <optional>
#include <vector>

namespace ktg {

struct RelatorSet {
    SkeletonPtr skeleton;
    int degree = 0;
    std::vector<Combo> relators;
};

// The hop form of the four-term relation: for every configuration of n-1
// chords plus one dangling endpoint, and every full chord with endpoints
// v and w, the alternating sum over planting the dangling chord's free end
// just before/after v and just before/after w vanishes. Expanding the
// commutator [t_ij + t_ik, t_jk] = 0 with the (-1)^down endpoint signs of
// the tangle convention reduces exactly to this ordinal rule, for every
// edge orientation pattern.
RelatorSet gen_4t(const SkeletonPtr& s, int n, std::size_t cap = 1000000);

// Vertex invariance: the 3-term signed sum over planting a chord endpoint at
// the innermost site on each edge-end at a vertex; +1 incoming, -1 outgoing.
RelatorSet gen_vi(const SkeletonPtr& s, int n, std::size_t cap = 1000000);

// Framing independence (isolated chord = 0); off by default everywhere.
RelatorSet gen_1t(const SkeletonPtr& s, int n, std::size_t cap = 1000000);

struct QuotientFlags {
    bool use_1t = false;
    std::size_t cap = 1000000;

    std::string tag() const { return use_1t ? "1t" : "plain"; }
};

struct SparseRow {
    int pivot = -1;                          // leading column
    std::vector<std::pair<int, Rat>> coeffs; // sorted by column, pivot first with value 1
};

class QuotientSpace {
public:
    const SkeletonPtr& skeleton() const { return skel_; }
    int degree() const { return degree_; }
    const std::vector<ChordShape>& basis() const { return basis_; }
    const std::vector<SparseRow>& rref() const { return rows_; }
    int dim() const { return static_cast<int>(basis_.size() - rows_.size()); }

    // Reduction modulo the relator span; linear and idempotent.
    Combo normal_form(const Combo& c) const;
    bool is_zero(const Combo& c) const { return normal_form(c).is_zero(); }

    int basis_index(const ChordShape& shape) const;

    std::string serialize() const;
    static QuotientSpace deserialize(const std::string& text, const QuotientFlags& flags);

    friend QuotientSpace build_quotient_uncached(const SkeletonPtr& s, int n, const QuotientFlags& flags);

private:
    SkeletonPtr skel_;
    int degree_ = 0;
    QuotientFlags flags_;
    std::vector<ChordShape> basis_; // sorted; enumeration order
    std::vector<SparseRow> rows_;   // sorted by pivot column
};

using QuotientPtr = std::shared_ptr<const QuotientSpace>;

QuotientSpace build_quotient_uncached(const SkeletonPtr& s, int n, const QuotientFlags& flags = {});

// Memoized front end; also persists to the directory named by KTG_CACHE_DIR
// (default ./.ktg-cache). Cache writes are atomic (write temp, rename).
QuotientPtr build_quotient(const SkeletonPtr& s, int n, const QuotientFlags& flags = {});

// Convenience: reduce a combo in its skeleton's quotient at its own degree.
Combo normal_form(const Combo& c, const QuotientFlags& flags = {});
bool quotient_zero(const Combo& c, const QuotientFlags& flags = {});

std::string cache_dir();

// Exact fraction-free elimination over big integers; exposed for the tests'
// dense-oracle comparisons.
struct IntRow {
    std::vector<std::pair<int, Int>> coeffs; // sorted by column
};
std::vector<SparseRow> echelonize(std::vector<IntRow> rows);

} // namespace ktg

#endif
