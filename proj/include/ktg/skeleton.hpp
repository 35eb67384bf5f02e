#ifndef KTG_SKELETON_HPP
#define KTG_SKELETON_HPP

#include "ktg/base.hpp"

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ktg {

// Trivalent-graph / tangle skeletons. Labeled: edge ids, vertex ids and
// boundary order are structure, no isomorphism quotient is applied.

enum class EndKind { Vertex, Boundary, Closed };

struct EndRef {
    EndKind kind = EndKind::Closed;
    int id = 0; // vertex id or boundary point id

    bool operator==(const EndRef& o) const { return kind == o.kind && id == o.id; }
};

inline EndRef vertex_end(int v) { return {EndKind::Vertex, v}; }
inline EndRef boundary_end(int b) { return {EndKind::Boundary, b}; }
inline EndRef closed_end() { return {EndKind::Closed, 0}; }

struct EdgeRec {
    int id = 0;
    EndRef src, dst;
};

struct EdgeEnd {
    int edge = 0;
    bool at_src = true;

    bool operator==(const EdgeEnd& o) const { return edge == o.edge && at_src == o.at_src; }
    bool operator<(const EdgeEnd& o) const {
        return edge != o.edge ? edge < o.edge : at_src < o.at_src;
    }
};

struct VertexRec {
    int id = 0;
    // The three incident edge-ends in recorded (cyclic) order. The convention
    // used by the builders is counterclockwise in the blackboard plane; the
    // order only feeds unzip/connsum band-tracing, never the relations.
    std::array<EdgeEnd, 3> ends{};
};

class Skeleton {
public:
    Skeleton() = default;
    // Validates all invariants (trivalence, unique ids, dangling ends, closed
    // edge consistency). Boundary lists give bottom/top point ids in order.
    Skeleton(std::vector<EdgeRec> edges, std::vector<VertexRec> vertices,
             std::vector<int> bottom, std::vector<int> top);

    const std::vector<EdgeRec>& edges() const { return edges_; }
    const std::vector<VertexRec>& vertices() const { return vertices_; }
    const std::vector<int>& bottom() const { return bottom_; }
    const std::vector<int>& top() const { return top_; }

    const EdgeRec& edge(int id) const;
    const VertexRec& vertex(int id) const;
    bool has_edge(int id) const;

    // The unique edge-end incident to a boundary point.
    EdgeEnd boundary_edge_end(int bpoint) const;
    EndRef end_of(EdgeEnd e) const;

    // True if the strand at this boundary point is oriented away from it
    // (i.e. the point is the edge's source).
    bool boundary_outgoing(int bpoint) const;

    bool is_bottom(int bpoint) const;

    std::size_t edge_count() const { return edges_.size(); }

    // Canonical text encoding; equal iff skeletons are equal as labeled data.
    const std::string& encode() const { return encoding_; }
    bool operator==(const Skeleton& o) const { return encoding_ == o.encoding_; }

    std::string describe() const; // short human-oriented summary

    static Skeleton parse(const std::string& text);

private:
    std::vector<EdgeRec> edges_;      // sorted by id
    std::vector<VertexRec> vertices_; // sorted by id
    std::vector<int> bottom_, top_;
    std::map<int, int> edge_index_, vertex_index_;
    std::string encoding_;

    void validate_and_index();
};

using SkeletonPtr = std::shared_ptr<const Skeleton>;

SkeletonPtr share(Skeleton s);

// --- stock skeletons -------------------------------------------------------

Skeleton make_circle();
// k vertical strands; orients[i] true = upward (bottom->top).
Skeleton make_strands(const std::vector<bool>& orients);
Skeleton make_strands_up(int k);
// two vertices joined by three parallel edges e1,e2,e3 (all v1->v2)
Skeleton make_theta();
// two loops joined by a bridge
Skeleton make_dumbbell();
// oriented K4 admitting unzip of edge e1
Skeleton make_tetrahedron();

std::optional<Skeleton> stock_skeleton(const std::string& name);

// --- splice machinery ------------------------------------------------------
//
// Surgeries and tangle composition all reduce to re-welding edge ends; the
// builder follows weld chains, fuses constituent edges into composite edges
// and reports where every constituent landed.

struct ProvKey {
    int factor = 0; // which input skeleton
    int edge = 0;   // old edge id
    int copy = 0;   // 0 normally; 1/2 for unzip daughters

    bool operator<(const ProvKey& o) const {
        if (factor != o.factor) return factor < o.factor;
        if (edge != o.edge) return edge < o.edge;
        return copy < o.copy;
    }
    bool operator==(const ProvKey& o) const {
        return factor == o.factor && edge == o.edge && copy == o.copy;
    }
};

struct ZoneRef {
    int edge = 0; // new edge id
    int zone = 0; // index of the constituent inside the chain
};

struct BuildOut {
    Skeleton skel;
    std::map<ProvKey, ZoneRef> zones;
    std::vector<std::vector<ProvKey>> chains; // chains[new edge id - 1]
    std::vector<char> chain_closed;
    std::map<std::pair<int, int>, int> vertex_ids; // (factor, old vid) -> new vid; factor -1 = fresh
    std::map<std::pair<int, int>, int> bpoint_ids; // (factor, old bid) -> new bid
};

class SkeletonBuilder {
public:
    struct Endpoint {
        enum Kind { Vert, Bound, Close, Link } kind = Close;
        int a = 0, b = 0; // Vert/Bound: (factor,id); Link: a = link token
    };

    static Endpoint at_vertex(int factor, int vid) { return {Endpoint::Vert, factor, vid}; }
    static Endpoint at_bpoint(int factor, int bid) { return {Endpoint::Bound, factor, bid}; }
    static Endpoint closed() { return {Endpoint::Close, 0, 0}; }
    static Endpoint link(int token) { return {Endpoint::Link, token, 0}; }

    // Every link token must be used exactly once as a dst and once as a src.
    void add_edge(ProvKey prov, Endpoint src, Endpoint dst);
    // Ends listed in recorded order; refer to proto edges by provenance + side.
    void add_vertex(int factor, int vid, const std::array<std::pair<ProvKey, bool>, 3>& ends);
    void set_boundary(std::vector<std::pair<int, int>> bottom,
                      std::vector<std::pair<int, int>> top); // (factor, old bpoint id)

    BuildOut build() const;

private:
    struct ProtoEdge {
        ProvKey prov;
        Endpoint src, dst;
    };
    struct ProtoVertex {
        int factor, vid;
        std::array<std::pair<ProvKey, bool>, 3> ends;
    };
    std::vector<ProtoEdge> edges_;
    std::vector<ProtoVertex> vertices_;
    std::vector<std::pair<int, int>> bottom_, top_;
};

// --- surgeries -------------------------------------------------------------

struct SurgeryOut {
    BuildOut out;
    // unzip only: the daughters' provenance keys (copy 1 = the one welded to
    // the cyclic-next edge at the source vertex)
    ProvKey daughter1, daughter2;
};

Skeleton switch_edge(const Skeleton& s, int e);

bool delete_legal(const Skeleton& s, int e, std::string* why = nullptr);
SurgeryOut delete_edge(const Skeleton& s, int e);

// Internal unzip (vertex at both ends) and leaf unzip (one end on the
// boundary); legality follows the orientation-matching rules.
bool unzip_legal(const Skeleton& s, int e, std::string* why = nullptr);
SurgeryOut unzip_edge(const Skeleton& s, int e);

// Connected sum along e of s1 and f of s2: splits both edges, adds a bridge
// oriented from s1 to s2. Factor 0 = s1, factor 1 = s2 in the output tables;
// the bridge has provenance {factor:-1, edge:1}, the split halves keep their
// edge id with copy 1 (source half) / copy 2 (target half).
SurgeryOut connsum_skeletons(const Skeleton& s1, int e, const Skeleton& s2, int f);

// switch_e applied twice must be the identity; exposed for tests.
std::string skeleton_key(const Skeleton& s);

} // namespace ktg

#endif
