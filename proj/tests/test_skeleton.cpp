#include <doctest.h>

#include "ktg/diagram.hpp"
#include "ktg/skeleton.hpp"

#include <algorithm>
#include <set>

using namespace ktg;

namespace {

// Small deterministic RNG for hand-rolled property tests.
struct Rng {
    std::uint64_t s;
    explicit Rng(std::uint64_t seed) : s(seed) {}
    std::uint64_t next() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return s;
    }
    std::size_t below(std::size_t n) { return n ? next() % n : 0; }
};

// Independent diagram enumerator: grows diagrams one chord at a time by
// inserting both endpoints at arbitrary slots, then dedupes. Slower and
// structurally different from the composition+matching enumerator.
void grow(const Skeleton& s, const ChordShape& cur, int left, std::set<std::string>& seen,
          std::vector<ChordShape>& out) {
    if (left == 0) {
        if (seen.insert(shape_key(cur)).second) out.push_back(normalize_shape(cur));
        return;
    }
    std::vector<int> eids;
    for (auto& e : s.edges()) eids.push_back(e.id);
    for (int e1 : eids) {
        int m1 = endpoints_on(cur, e1);
        for (int p1 = 1; p1 <= m1 + 1; ++p1) {
            ChordShape with1 = shape_with_slot(cur, {e1, p1});
            for (int e2 : eids) {
                // the pending first endpoint occupies a slot on its edge too
                int m2 = endpoints_on(with1, e2) + (e2 == e1 ? 1 : 0);
                for (int p2 = 1; p2 <= m2 + 1; ++p2) {
                    ChordShape with2 = shape_with_slot(with1, {e2, p2});
                    Site s1{e1, p1};
                    if (e2 == e1 && p2 <= p1) s1.pos += 1;
                    with2.push_back(make_chord(s1, {e2, p2}));
                    grow(s, normalize_shape(with2), left - 1, seen, out);
                }
            }
        }
    }
}

std::vector<ChordShape> oracle_enumerate(const Skeleton& s, int n) {
    std::set<std::string> seen;
    std::vector<ChordShape> out;
    grow(s, {}, n, seen, out);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

TEST_CASE("validate_skeleton basics") {
    CHECK(make_circle().vertices().empty());
    CHECK(make_theta().edges().size() == 3);
    CHECK(make_theta().vertices().size() == 2);

    // a vertex with 2 incident edge-ends must be rejected
    CHECK_THROWS_WITH_AS(Skeleton::parse("vertex v1\n"
                                         "bpoint b1 bottom 1\n"
                                         "bpoint b2 top 1\n"
                                         "edge e1 b1 v1\n"
                                         "edge e2 v1 b2\n"),
                         doctest::Contains("non-trivalent"), Error);

    CHECK_THROWS_AS(Skeleton::parse("edge e1 v9 closed\n"), Error);
    CHECK_THROWS_AS(Skeleton::parse("edge e1 closed closed\nedge e1 closed closed\n"), Error);
}

TEST_CASE("skeleton text round trip") {
    for (const char* name : {"circle", "theta", "dumbbell", "tetrahedron", "strands3"}) {
        Skeleton s = *stock_skeleton(name);
        Skeleton back = Skeleton::parse(s.encode());
        CHECK(back == s);
    }
    // the bare spec format (no end-order suffix) parses too
    Skeleton t = Skeleton::parse("vertex v1\nvertex v2\n"
                                 "edge e1 v1 v2\nedge e2 v1 v2\nedge e3 v2 v1\n");
    CHECK(t.edges().size() == 3);
}

TEST_CASE("enumerate_diagrams counts on the circle are (2n-1)!!") {
    Skeleton c = make_circle();
    CHECK(enumerate_shapes(c, 0).size() == 1);
    CHECK(enumerate_shapes(c, 1).size() == 1);
    CHECK(enumerate_shapes(c, 2).size() == 3);
    CHECK(enumerate_shapes(c, 3).size() == 15);
}

TEST_CASE("enumerate_diagrams agrees with the insertion oracle") {
    for (const char* name : {"circle", "theta", "strands2"}) {
        Skeleton s = *stock_skeleton(name);
        for (int n = 0; n <= 2; ++n) {
            auto fast = enumerate_shapes(s, n);
            auto slow = oracle_enumerate(s, n);
            CHECK(fast == slow);
        }
    }
    // two upward strands, one chord: both-on-1, both-on-2, one-on-each
    CHECK(enumerate_shapes(make_strands_up(2), 1).size() == 3);
    CHECK(enumerate_shapes(make_theta(), 0).size() == 1);
}

TEST_CASE("enumeration cap triggers") {
    CHECK_THROWS_WITH_AS(enumerate_shapes(make_tetrahedron(), 3, 100),
                         doctest::Contains("cap"), Error);
}

TEST_CASE("canonicalize: idempotent, order independent, patterns distinct") {
    auto strand = share(make_strands_up(1));
    // the 3 degree-2 one-strand patterns have 3 distinct keys
    ChordShape disjoint = {make_chord({1, 1}, {1, 2}), make_chord({1, 3}, {1, 4})};
    ChordShape crossing = {make_chord({1, 1}, {1, 3}), make_chord({1, 2}, {1, 4})};
    ChordShape nested = {make_chord({1, 1}, {1, 4}), make_chord({1, 2}, {1, 3})};
    std::set<std::string> keys;
    for (auto& sh : {disjoint, crossing, nested}) keys.insert(canonical_key({strand, sh}));
    CHECK(keys.size() == 3);
    CHECK(enumerate_shapes(*strand, 2).size() == 3);

    // shuffle invariance on random diagrams of the theta skeleton
    Rng rng(12345);
    auto theta = share(make_theta());
    auto all = enumerate_shapes(*theta, 2);
    for (int trial = 0; trial < 50; ++trial) {
        ChordShape sh = all[rng.below(all.size())];
        ChordShape shuffled = sh;
        for (std::size_t i = shuffled.size(); i > 1; --i)
            std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
        for (auto& c : shuffled)
            if (rng.next() & 1) std::swap(c.a, c.b); // endpoint order too
        ChordDiagram d1 = canonicalize({theta, sh});
        ChordDiagram d2 = canonicalize({theta, shuffled});
        CHECK(canonical_key(d1) == canonical_key(d2));
        CHECK(canonicalize(d1).chords == d1.chords);
    }

    // empty diagram on a circle
    auto circ = share(make_circle());
    CHECK(canonical_key({circ, {}}) == canonical_key({circ, {}}));
}

TEST_CASE("switch twice is the identity") {
    for (const char* name : {"theta", "dumbbell", "tetrahedron", "strands2"}) {
        Skeleton s = *stock_skeleton(name);
        for (const auto& e : s.edges()) {
            Skeleton twice = switch_edge(switch_edge(s, e.id), e.id);
            CHECK(twice == s);
        }
    }
}

TEST_CASE("delete: theta minus a side arc is a circle") {
    Skeleton theta = make_theta();
    std::string why;
    CHECK(delete_legal(theta, 1, &why));
    CHECK_FALSE(delete_legal(theta, 2, &why)); // both neighbours incoming at v1
    auto out = delete_edge(theta, 1).out;
    CHECK(out.skel.edges().size() == 1);
    CHECK(out.skel.vertices().empty());
    CHECK(out.skel.edge(1).src.kind == EndKind::Closed);

    CHECK_FALSE(delete_legal(make_dumbbell(), 1, &why)); // loop
    CHECK(delete_legal(make_dumbbell(), 2, &why));
    auto dd = delete_edge(make_dumbbell(), 2).out;
    CHECK(dd.skel.edges().size() == 2);
    CHECK(dd.skel.vertices().empty());
}

TEST_CASE("unzip: theta middle edge gives two circles (band tracing)") {
    Skeleton theta = make_theta();
    std::string why;
    CHECK(unzip_legal(theta, 2, &why));
    CHECK_FALSE(unzip_legal(theta, 1, &why));
    auto so = unzip_edge(theta, 2);
    CHECK(so.out.skel.edges().size() == 2);
    CHECK(so.out.skel.vertices().empty());
    for (const auto& e : so.out.skel.edges()) CHECK(e.src.kind == EndKind::Closed);
    // hand-traced: daughter 1 rides with e1, daughter 2 with e3
    CHECK(so.out.zones.count({0, 2, 1}));
    CHECK(so.out.zones.count({0, 2, 2}));
    int c1 = so.out.zones.at({0, 2, 1}).edge;
    CHECK(so.out.zones.at({0, 1, 0}).edge == c1);
    CHECK(so.out.zones.at({0, 3, 0}).edge != c1);
}

TEST_CASE("unzip: tetrahedron edge collapses to a theta-shaped graph") {
    Skeleton k4 = make_tetrahedron();
    std::string why;
    REQUIRE(unzip_legal(k4, 1, &why));
    auto so = unzip_edge(k4, 1);
    CHECK(so.out.skel.vertices().size() == 2);
    CHECK(so.out.skel.edges().size() == 3);
}

TEST_CASE("connsum of two circles is a dumbbell") {
    Skeleton c1 = make_circle(), c2 = make_circle();
    auto so = connsum_skeletons(c1, 1, c2, 1);
    const Skeleton& d = so.out.skel;
    CHECK(d.edges().size() == 3);
    CHECK(d.vertices().size() == 2);
    int loops = 0;
    for (const auto& e : d.edges())
        if (e.src.kind == EndKind::Vertex && e.dst.kind == EndKind::Vertex && e.src.id == e.dst.id) ++loops;
    CHECK(loops == 2);
}

TEST_CASE("connsum of two open edges splits both") {
    Skeleton a = make_strands_up(1), b2 = make_strands_up(1);
    auto so = connsum_skeletons(a, 1, b2, 1);
    const Skeleton& s = so.out.skel;
    CHECK(s.edges().size() == 5);
    CHECK(s.vertices().size() == 2);
    CHECK(s.bottom().size() == 2);
    CHECK(s.top().size() == 2);
}
