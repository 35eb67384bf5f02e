#ifndef KTG_DIAGRAM_HPP
#define KTG_DIAGRAM_HPP

#include "ktg/skeleton.hpp"

#include <compare>
#include <cstdint>
#include <vector>

namespace ktg {

// A chord endpoint: 1-based ordinal along the edge, counted from the edge's
// source in orientation direction. Closed edges count from their basepoint.
struct Site {
    int edge = 0;
    int pos = 0;

    auto operator<=>(const Site&) const = default;
};

struct Chord {
    Site a, b; // normalized: a < b

    auto operator<=>(const Chord&) const = default;
};

inline Chord make_chord(Site x, Site y) { return x < y ? Chord{x, y} : Chord{y, x}; }

// Sorted chord list; the canonical in-memory form of a diagram.
using ChordShape = std::vector<Chord>;

ChordShape normalize_shape(ChordShape chords);

// Full ChordDiagram value: a shape bound to its skeleton.
struct ChordDiagram {
    SkeletonPtr skeleton;
    ChordShape chords;

    int degree() const { return static_cast<int>(chords.size()); }
};

// Validates the shape invariants against the skeleton (distinct sites,
// contiguous 1..m ordinals per edge) and returns the canonical form.
ChordDiagram canonicalize(const ChordDiagram& d);

// Byte-comparable canonical key; chord-order independent, skeleton-scoped.
std::string canonical_key(const ChordDiagram& d);
std::string shape_key(const ChordShape& shape);

void validate_shape(const Skeleton& s, const ChordShape& shape);

// Per-edge endpoint count.
int endpoints_on(const ChordShape& shape, int edge);

// Complete duplicate-free list of all degree-n diagrams on s, sorted by
// canonical shape. Throws if the count would exceed `cap`.
std::vector<ChordShape> enumerate_shapes(const Skeleton& s, int n, std::size_t cap = 1000000);

std::vector<ChordDiagram> enumerate_diagrams(const SkeletonPtr& s, int n, std::size_t cap = 1000000);

// --- shape editing helpers (used by relator generation and the maps) -------

// All ordinals >= pos on the edge shift up by one; the freed slot is returned.
ChordShape shape_with_slot(const ChordShape& shape, Site slot);
// Remove the endpoint at `site` (which must exist), shifting later ordinals
// down. Returns the partner site of the removed endpoint's chord and the
// remaining shape with that chord's other endpoint still in place is not
// meaningful, so this works on raw site lists instead — see relator code.

// Site-level rewrite helper: apply fn to every site of the shape.
template <typename Fn> ChordShape map_sites(const ChordShape& shape, Fn&& fn) {
    ChordShape out;
    out.reserve(shape.size());
    for (const auto& c : shape) out.push_back(make_chord(fn(c.a), fn(c.b)));
    return normalize_shape(std::move(out));
}

// Textual form "(e1,2)-(e3,1); ..." used by the series file format.
std::string shape_text(const ChordShape& shape);
ChordShape parse_shape_text(const std::string& text);

// Maps constituent-zone sites into a spliced skeleton. Offsets depend on how
// many endpoints each zone carries, so a mapper is built per diagram (tuple)
// from a count function over provenance keys.
class SiteMapper {
public:
    template <typename CountFn> SiteMapper(const BuildOut& out, CountFn&& count) {
        for (std::size_t ci = 0; ci < out.chains.size(); ++ci) {
            int cum = 0;
            for (const ProvKey& key : out.chains[ci]) {
                offsets_[key] = cum;
                cum += count(key);
            }
        }
        zones_ = &out.zones;
    }

    Site map(const ProvKey& key, int pos) const {
        auto z = zones_->find(key);
        require(z != zones_->end(), "site transport: unknown provenance");
        auto o = offsets_.find(key);
        return Site{z->second.edge, o->second + pos};
    }

private:
    std::map<ProvKey, int> offsets_;
    const std::map<ProvKey, ZoneRef>* zones_ = nullptr;
};

} // namespace ktg

#endif
