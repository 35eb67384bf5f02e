#include "ktg/diagram.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace ktg {

ChordShape normalize_shape(ChordShape chords) {
    for (auto& c : chords)
        if (c.b < c.a) std::swap(c.a, c.b);
    std::sort(chords.begin(), chords.end());
    return chords;
}

void validate_shape(const Skeleton& s, const ChordShape& shape) {
    std::map<int, std::set<int>> per_edge;
    for (const auto& c : shape) {
        for (const Site& x : {c.a, c.b}) {
            require(s.has_edge(x.edge), "chord on unknown edge e" + std::to_string(x.edge));
            require(x.pos >= 1, "chord ordinal must be positive");
            require(per_edge[x.edge].insert(x.pos).second, "duplicate chord site");
        }
    }
    for (auto& [e, set] : per_edge)
        require(*set.rbegin() == static_cast<int>(set.size()),
                "ordinals on edge e" + std::to_string(e) + " are not contiguous 1..m");
}

ChordDiagram canonicalize(const ChordDiagram& d) {
    require(d.skeleton != nullptr, "diagram without skeleton");
    ChordDiagram out;
    out.skeleton = d.skeleton;
    out.chords = normalize_shape(d.chords);
    validate_shape(*d.skeleton, out.chords);
    return out;
}

std::string shape_key(const ChordShape& shape) {
    ChordShape n = normalize_shape(shape);
    std::ostringstream os;
    for (const auto& c : n)
        os << c.a.edge << ',' << c.a.pos << '-' << c.b.edge << ',' << c.b.pos << ';';
    return os.str();
}

std::string canonical_key(const ChordDiagram& d) {
    return skeleton_key(*d.skeleton) + ":" + shape_key(d.chords);
}

int endpoints_on(const ChordShape& shape, int edge) {
    int k = 0;
    for (const auto& c : shape) k += (c.a.edge == edge) + (c.b.edge == edge);
    return k;
}

std::vector<ChordShape> enumerate_shapes(const Skeleton& s, int n, std::size_t cap) {
    require(n >= 0, "degree must be nonnegative");
    std::vector<int> edge_ids;
    for (const auto& e : s.edges()) edge_ids.push_back(e.id);
    const int E = static_cast<int>(edge_ids.size());
    const int total = 2 * n;

    if (n == 0) return {ChordShape{}};
    require(E > 0, "cannot place chords on an empty skeleton");

    // Count first so the cap check is cheap: compositions(total into E parts)
    // times (2n-1)!!.
    auto binom = [](long a, long b) {
        if (b < 0 || b > a) return 0.0;
        double r = 1;
        for (long i = 0; i < b; ++i) r = r * double(a - i) / double(i + 1);
        return r;
    };
    double dfact = 1;
    for (int i = 2 * n - 1; i > 1; i -= 2) dfact *= i;
    double est = binom(total + E - 1, E - 1) * dfact;
    require(est <= static_cast<double>(cap),
            "enumeration cap exceeded (" + std::to_string(static_cast<long long>(est)) + " diagrams)");

    // sites in edge-major order for a given composition
    std::vector<ChordShape> out;
    std::vector<int> comp(E, 0);
    std::vector<Site> sites;

    // all perfect matchings of `sites`, pairing the first free site each time
    std::vector<ChordShape> matchings;
    std::vector<char> taken;
    ChordShape current;
    auto rec_match = [&](auto&& self) -> void {
        std::size_t first = 0;
        while (first < sites.size() && taken[first]) ++first;
        if (first == sites.size()) {
            matchings.push_back(normalize_shape(current));
            return;
        }
        taken[first] = 1;
        for (std::size_t j = first + 1; j < sites.size(); ++j) {
            if (taken[j]) continue;
            taken[j] = 1;
            current.push_back(make_chord(sites[first], sites[j]));
            self(self);
            current.pop_back();
            taken[j] = 0;
        }
        taken[first] = 0;
    };

    auto rec_comp = [&](auto&& self, int idx, int left) -> void {
        if (idx == E - 1) {
            comp[idx] = left;
            sites.clear();
            for (int i = 0; i < E; ++i)
                for (int p = 1; p <= comp[i]; ++p) sites.push_back({edge_ids[i], p});
            matchings.clear();
            taken.assign(sites.size(), 0);
            current.clear();
            rec_match(rec_match);
            for (auto& m : matchings) out.push_back(std::move(m));
            return;
        }
        for (int c = 0; c <= left; ++c) {
            comp[idx] = c;
            self(self, idx + 1, left - c);
        }
    };
    rec_comp(rec_comp, 0, total);

    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<ChordDiagram> enumerate_diagrams(const SkeletonPtr& s, int n, std::size_t cap) {
    std::vector<ChordDiagram> out;
    for (auto& shape : enumerate_shapes(*s, n, cap)) out.push_back({s, std::move(shape)});
    return out;
}

ChordShape shape_with_slot(const ChordShape& shape, Site slot) {
    return map_sites(shape, [&](Site x) {
        if (x.edge == slot.edge && x.pos >= slot.pos) return Site{x.edge, x.pos + 1};
        return x;
    });
}

std::string shape_text(const ChordShape& shape) {
    if (shape.empty()) return "(empty)";
    std::ostringstream os;
    bool first = true;
    for (const auto& c : shape) {
        if (!first) os << "; ";
        first = false;
        os << "(e" << c.a.edge << "," << c.a.pos << ")-(e" << c.b.edge << "," << c.b.pos << ")";
    }
    return os.str();
}

ChordShape parse_shape_text(const std::string& text) {
    ChordShape out;
    std::string t = text;
    if (t == "(empty)" || t.empty()) return out;
    std::istringstream in(t);
    std::string item;
    while (std::getline(in, item, ';')) {
        // strip spaces
        std::string u;
        for (char c : item)
            if (!isspace(static_cast<unsigned char>(c))) u.push_back(c);
        if (u.empty()) continue;
        int e1, p1, e2, p2;
        if (sscanf(u.c_str(), "(e%d,%d)-(e%d,%d)", &e1, &p1, &e2, &p2) != 4)
            fail("bad chord item: " + item);
        out.push_back(make_chord({e1, p1}, {e2, p2}));
    }
    return normalize_shape(std::move(out));
}

} // namespace ktg
