#include "ktg/series.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

namespace ktg {

Series::Series(SkeletonPtr skel, int truncation) : skel_(std::move(skel)), n_(truncation) {
    require(n_ >= 0, "negative truncation");
    for (int d = 0; d <= n_; ++d) comps_.emplace_back(skel_, d);
}

Series Series::unit(SkeletonPtr skel, int truncation, const Rat& head) {
    Series s(std::move(skel), truncation);
    s.comps_[0].add_term({}, head);
    return s;
}

const Combo& Series::at(int d) const {
    require(d >= 0 && d <= n_, "degree out of range");
    return comps_[d];
}

Combo& Series::at(int d) {
    require(d >= 0 && d <= n_, "degree out of range");
    return comps_[d];
}

Series& Series::operator+=(const Series& o) {
    require(skel_ && o.skel_ && *skel_ == *o.skel_, "series addition: skeleton mismatch");
    require(n_ == o.n_, "series addition: truncation mismatch");
    for (int d = 0; d <= n_; ++d) comps_[d] += o.comps_[d];
    return *this;
}

Series& Series::operator-=(const Series& o) {
    require(skel_ && o.skel_ && *skel_ == *o.skel_, "series subtraction: skeleton mismatch");
    require(n_ == o.n_, "series subtraction: truncation mismatch");
    for (int d = 0; d <= n_; ++d) comps_[d] -= o.comps_[d];
    return *this;
}

Series& Series::operator*=(const Rat& c) {
    for (auto& comp : comps_) comp *= c;
    return *this;
}

bool Series::is_zero() const {
    for (const auto& c : comps_)
        if (!c.is_zero()) return false;
    return true;
}

bool Series::operator==(const Series& o) const {
    if (n_ != o.n_) return false;
    for (int d = 0; d <= n_; ++d)
        if (!(comps_[d] == o.comps_[d])) return false;
    return true;
}

std::string Series::text() const {
    std::ostringstream os;
    for (int d = 0; d <= n_; ++d) {
        if (comps_[d].is_zero() && d > 0) continue;
        os << "deg " << d << ": " << comps_[d].text() << "\n";
    }
    return os.str();
}

// --- composition ------------------------------------------------------------

namespace {

struct GlueOut {
    BuildOut out;
    SkeletonPtr skel;
};

GlueOut glue_skeletons(const Skeleton& sL, const Skeleton& sU) {
    require(sL.top().size() == sU.bottom().size(), "composition boundary mismatch (count)");
    SkeletonBuilder b;
    std::map<std::pair<int, std::pair<int, bool>>, int> relink;
    int tok = 1;
    for (std::size_t i = 0; i < sL.top().size(); ++i) {
        EdgeEnd eL = sL.boundary_edge_end(sL.top()[i]);
        EdgeEnd eU = sU.boundary_edge_end(sU.bottom()[i]);
        if (!eL.at_src && eU.at_src) {
            relink[{0, {eL.edge, false}}] = tok;
            relink[{1, {eU.edge, true}}] = tok;
        } else if (eL.at_src && !eU.at_src) {
            relink[{1, {eU.edge, false}}] = tok;
            relink[{0, {eL.edge, true}}] = tok;
        } else {
            fail("composition boundary mismatch (orientation) at position " + std::to_string(i + 1));
        }
        ++tok;
    }
    auto add_factor = [&](const Skeleton& s, int f) {
        auto endpoint_of = [&](const EdgeRec& e, bool at_src) -> SkeletonBuilder::Endpoint {
            auto it = relink.find({f, {e.id, at_src}});
            if (it != relink.end()) return SkeletonBuilder::link(it->second);
            const EndRef& r = at_src ? e.src : e.dst;
            switch (r.kind) {
            case EndKind::Closed: return SkeletonBuilder::closed();
            case EndKind::Boundary: return SkeletonBuilder::at_bpoint(f, r.id);
            case EndKind::Vertex: return SkeletonBuilder::at_vertex(f, r.id);
            }
            return SkeletonBuilder::closed();
        };
        for (const auto& e : s.edges()) b.add_edge({f, e.id, 0}, endpoint_of(e, true), endpoint_of(e, false));
        for (const auto& v : s.vertices()) {
            std::array<std::pair<ProvKey, bool>, 3> ends;
            for (int i = 0; i < 3; ++i) ends[i] = {{f, v.ends[i].edge, 0}, v.ends[i].at_src};
            b.add_vertex(f, v.id, ends);
        }
    };
    add_factor(sL, 0);
    add_factor(sU, 1);
    std::vector<std::pair<int, int>> bot, top;
    for (int x : sL.bottom()) bot.push_back({0, x});
    for (int x : sU.top()) top.push_back({1, x});
    b.set_boundary(std::move(bot), std::move(top));
    GlueOut g;
    g.out = b.build();
    g.skel = share(g.out.skel);
    return g;
}

ChordShape transport_pair(const BuildOut& out, const ChordShape& shL, const ChordShape& shU) {
    const ChordShape* shapes[2] = {&shL, &shU};
    SiteMapper m(out, [&](const ProvKey& key) { return endpoints_on(*shapes[key.factor], key.edge); });
    ChordShape merged;
    for (int f = 0; f < 2; ++f)
        for (const Chord& c : *shapes[f])
            merged.push_back(make_chord(m.map({f, c.a.edge, 0}, c.a.pos), m.map({f, c.b.edge, 0}, c.b.pos)));
    return normalize_shape(std::move(merged));
}

} // namespace

Series mul_compose(const Series& lower, const Series& upper) {
    require(lower.truncation() == upper.truncation(), "composition truncation mismatch");
    const int N = lower.truncation();
    GlueOut g = glue_skeletons(*lower.skeleton(), *upper.skeleton());
    Series res(g.skel, N);
    for (int dl = 0; dl <= N; ++dl) {
        if (lower.at(dl).is_zero()) continue;
        for (int du = 0; du + dl <= N; ++du) {
            if (upper.at(du).is_zero()) continue;
            for (const auto& [shL, cL] : lower.at(dl).terms())
                for (const auto& [shU, cU] : upper.at(du).terms())
                    res.at(dl + du).add_term(transport_pair(g.out, shL, shU), cL * cU);
        }
    }
    return res;
}

Series tensor(const Series& a, const Series& b) {
    require(a.truncation() == b.truncation(), "tensor truncation mismatch");
    const int N = a.truncation();
    const Skeleton& s1 = *a.skeleton();
    const Skeleton& s2 = *b.skeleton();
    SkeletonBuilder bld;
    auto add_factor = [&](const Skeleton& s, int f) {
        auto endpoint_of = [&](const EndRef& r) -> SkeletonBuilder::Endpoint {
            switch (r.kind) {
            case EndKind::Closed: return SkeletonBuilder::closed();
            case EndKind::Boundary: return SkeletonBuilder::at_bpoint(f, r.id);
            case EndKind::Vertex: return SkeletonBuilder::at_vertex(f, r.id);
            }
            return SkeletonBuilder::closed();
        };
        for (const auto& e : s.edges()) bld.add_edge({f, e.id, 0}, endpoint_of(e.src), endpoint_of(e.dst));
        for (const auto& v : s.vertices()) {
            std::array<std::pair<ProvKey, bool>, 3> ends;
            for (int i = 0; i < 3; ++i) ends[i] = {{f, v.ends[i].edge, 0}, v.ends[i].at_src};
            bld.add_vertex(f, v.id, ends);
        }
    };
    add_factor(s1, 0);
    add_factor(s2, 1);
    std::vector<std::pair<int, int>> bot, top;
    for (int x : s1.bottom()) bot.push_back({0, x});
    for (int x : s2.bottom()) bot.push_back({1, x});
    for (int x : s1.top()) top.push_back({0, x});
    for (int x : s2.top()) top.push_back({1, x});
    bld.set_boundary(std::move(bot), std::move(top));
    BuildOut out = bld.build();
    SkeletonPtr skel = share(out.skel);

    Series res(skel, N);
    for (int da = 0; da <= N; ++da) {
        if (a.at(da).is_zero()) continue;
        for (int db = 0; db + da <= N; ++db) {
            if (b.at(db).is_zero()) continue;
            for (const auto& [shA, cA] : a.at(da).terms())
                for (const auto& [shB, cB] : b.at(db).terms()) {
                    const ChordShape* shapes[2] = {&shA, &shB};
                    SiteMapper m(out,
                                 [&](const ProvKey& key) { return endpoints_on(*shapes[key.factor], key.edge); });
                    ChordShape merged;
                    for (int f = 0; f < 2; ++f)
                        for (const Chord& c : *shapes[f])
                            merged.push_back(
                                make_chord(m.map({f, c.a.edge, 0}, c.a.pos), m.map({f, c.b.edge, 0}, c.b.pos)));
                    res.at(da + db).add_term(normalize_shape(std::move(merged)), cA * cB);
                }
        }
    }
    return res;
}

// --- power series -----------------------------------------------------------

bool is_strand_skeleton(const Skeleton& s) {
    if (!s.vertices().empty()) return false;
    std::size_t k = s.edges().size();
    if (s.bottom().size() != k || s.top().size() != k) return false;
    for (std::size_t i = 0; i < k; ++i) {
        if (!s.has_edge(static_cast<int>(i) + 1)) return false;
        const EdgeRec& e = s.edge(static_cast<int>(i) + 1);
        EndRef b = boundary_end(s.bottom()[i]), t = boundary_end(s.top()[i]);
        bool up = e.src == b && e.dst == t;
        bool down = e.src == t && e.dst == b;
        if (!up && !down) return false;
    }
    return true;
}

bool self_composable(const Skeleton& s) { return is_strand_skeleton(s); }

std::vector<bool> strand_orients(const Skeleton& s) {
    require(is_strand_skeleton(s), "not a strand skeleton");
    std::vector<bool> out;
    for (std::size_t i = 0; i < s.edges().size(); ++i)
        out.push_back(s.edge(static_cast<int>(i) + 1).src.kind == EndKind::Boundary &&
                      s.edge(static_cast<int>(i) + 1).src.id == s.bottom()[i]);
    return out;
}

int strand_count(const Skeleton& s) {
    require(is_strand_skeleton(s), "not a strand skeleton");
    return static_cast<int>(s.edges().size());
}

Series exp_series(const Series& x) {
    require(self_composable(*x.skeleton()), "exp needs a self-composable skeleton");
    require(x.at(0).is_zero(), "exp needs a vanishing degree-0 part");
    const int N = x.truncation();
    Series acc = Series::unit(x.skeleton(), N);
    Series term = Series::unit(x.skeleton(), N);
    for (int k = 1; k <= N; ++k) {
        term = mul_compose(term, x);
        term *= frac(1, k);
        acc += term;
    }
    return acc;
}

Series log_series(const Series& s) {
    require(self_composable(*s.skeleton()), "log needs a self-composable skeleton");
    require(s.at(0).coeff({}) == 1, "log needs a unit degree-0 part");
    const int N = s.truncation();
    Series y = s;
    y.at(0).add_term({}, Rat(-1));
    Series acc(s.skeleton(), N);
    Series term = Series::unit(s.skeleton(), N);
    for (int k = 1; k <= N; ++k) {
        term = mul_compose(term, y);
        Series contrib = term;
        contrib *= frac(k % 2 == 1 ? 1 : -1, k);
        acc += contrib;
    }
    return acc;
}

Series invert(const Series& s) {
    require(self_composable(*s.skeleton()), "invert needs a self-composable skeleton");
    Rat head = s.at(0).coeff({});
    require(head != 0, "invert needs an invertible degree-0 part");
    const int N = s.truncation();
    Series y = s;
    y *= Rat(1) / head;
    y.at(0).add_term({}, Rat(-1)); // y = s/head - 1
    Series acc = Series::unit(s.skeleton(), N);
    Series term = Series::unit(s.skeleton(), N);
    for (int k = 1; k <= N; ++k) {
        term = mul_compose(term, y);
        Series contrib = term;
        contrib *= Rat(k % 2 == 1 ? -1 : 1);
        acc += contrib;
    }
    acc *= Rat(1) / head;
    return acc;
}

Series pow_rat(const Series& s, const Rat& q) { return exp_series(q * log_series(s)); }

// --- strand operators --------------------------------------------------------

Combo t_gen(const SkeletonPtr& strands, int i, int j) {
    auto orients = strand_orients(*strands);
    int k = static_cast<int>(orients.size());
    require(1 <= i && i < j && j <= k, "t_gen: strand index out of range");
    int sign = (orients[i - 1] ? 1 : -1) * (orients[j - 1] ? 1 : -1);
    return Combo::single(strands, {make_chord({i, 1}, {j, 1})}, Rat(sign));
}

Series t_gen_series(const SkeletonPtr& strands, int i, int j, int truncation) {
    Series s(strands, truncation);
    require(truncation >= 1, "t_gen_series needs truncation >= 1");
    s.at(1) = t_gen(strands, i, j);
    return s;
}

Combo cable(const Combo& c, const std::vector<int>& sizes) {
    const Skeleton& s = *c.skeleton();
    auto orients = strand_orients(s);
    int k = static_cast<int>(orients.size());
    require(static_cast<int>(sizes.size()) == k, "cable: one size per strand");
    std::vector<int> start(k + 1, 0);
    std::vector<bool> new_orients;
    for (int i = 0; i < k; ++i) {
        require(sizes[i] >= 0, "cable: negative size");
        start[i] = static_cast<int>(new_orients.size()) + 1;
        for (int c2 = 0; c2 < sizes[i]; ++c2) new_orients.push_back(orients[i]);
    }
    SkeletonPtr target = share(make_strands(new_orients));
    Combo out(target, c.degree());

    for (const auto& [shape, coeff] : c.terms()) {
        // endpoints indexed (chord, side), listed per strand in ordinal order
        struct Ep {
            int chord, side, strand, pos;
        };
        std::vector<Ep> eps;
        for (std::size_t ci = 0; ci < shape.size(); ++ci) {
            eps.push_back({static_cast<int>(ci), 0, shape[ci].a.edge, shape[ci].a.pos});
            eps.push_back({static_cast<int>(ci), 1, shape[ci].b.edge, shape[ci].b.pos});
        }
        bool dead = false;
        for (const Ep& e : eps)
            if (sizes[e.strand - 1] == 0) dead = true;
        if (dead) continue;

        std::vector<int> choice(eps.size(), 0);
        while (true) {
            // place endpoints: per target strand, original ordinal order
            std::vector<std::vector<int>> buckets(new_orients.size() + 1);
            std::vector<Ep> sorted = eps;
            std::sort(sorted.begin(), sorted.end(), [](const Ep& a, const Ep& b) {
                return std::make_pair(a.strand, a.pos) < std::make_pair(b.strand, b.pos);
            });
            std::map<std::pair<int, int>, Site> placed; // (chord, side) -> new site
            std::vector<int> counters(new_orients.size() + 1, 0);
            for (const Ep& e : sorted) {
                std::size_t idx = 0;
                while (idx < eps.size() && !(eps[idx].chord == e.chord && eps[idx].side == e.side)) ++idx;
                int tstrand = start[e.strand - 1] + choice[idx];
                placed[{e.chord, e.side}] = Site{tstrand, ++counters[tstrand]};
            }
            ChordShape ns;
            for (std::size_t ci = 0; ci < shape.size(); ++ci)
                ns.push_back(make_chord(placed.at({static_cast<int>(ci), 0}), placed.at({static_cast<int>(ci), 1})));
            out.add_term(normalize_shape(std::move(ns)), coeff);

            // next assignment vector
            std::size_t p = 0;
            while (p < choice.size()) {
                if (++choice[p] < sizes[eps[p].strand - 1]) break;
                choice[p] = 0;
                ++p;
            }
            if (p == choice.size()) break;
        }
    }
    return out;
}

Series cable(const Series& s, const std::vector<int>& sizes) {
    std::vector<bool> new_orients;
    auto orients = strand_orients(*s.skeleton());
    for (std::size_t i = 0; i < orients.size(); ++i)
        for (int c = 0; c < sizes[i]; ++c) new_orients.push_back(orients[i]);
    Series out(share(make_strands(new_orients)), s.truncation());
    for (int d = 0; d <= s.truncation(); ++d)
        if (!s.at(d).is_zero()) out.at(d) = cable(s.at(d), sizes);
    return out;
}

Series double_strand(const Series& s, int i) {
    std::vector<int> sizes(strand_count(*s.skeleton()), 1);
    require(i >= 1 && i <= static_cast<int>(sizes.size()), "double: strand out of range");
    sizes[i - 1] = 2;
    return cable(s, sizes);
}

Series delete_strand(const Series& s, int i) {
    std::vector<int> sizes(strand_count(*s.skeleton()), 1);
    require(i >= 1 && i <= static_cast<int>(sizes.size()), "delete: strand out of range");
    sizes[i - 1] = 0;
    return cable(s, sizes);
}

Series permute_strands(const Series& s, const std::vector<int>& perm) {
    auto orients = strand_orients(*s.skeleton());
    int k = static_cast<int>(orients.size());
    require(static_cast<int>(perm.size()) == k, "permute: arity mismatch");
    std::vector<int> inv(k + 1, 0);
    std::vector<bool> new_orients(k);
    for (int t = 0; t < k; ++t) {
        int src = perm[t];
        require(src >= 1 && src <= k && inv[src] == 0, "permute: not a permutation");
        inv[src] = t + 1;
        new_orients[t] = orients[src - 1];
    }
    Series out(share(make_strands(new_orients)), s.truncation());
    for (int d = 0; d <= s.truncation(); ++d)
        for (const auto& [shape, coeff] : s.at(d).terms())
            out.at(d).add_term(map_sites(shape, [&](Site x) { return Site{inv[x.edge], x.pos}; }), coeff);
    return out;
}

Series mirror_series(const Series& s) {
    auto orients = strand_orients(*s.skeleton());
    int k = static_cast<int>(orients.size());
    std::vector<bool> new_orients(orients.rbegin(), orients.rend());
    Series out(share(make_strands(new_orients)), s.truncation());
    for (int d = 0; d <= s.truncation(); ++d) {
        Rat sign(d % 2 == 0 ? 1 : -1);
        for (const auto& [shape, coeff] : s.at(d).terms())
            out.at(d).add_term(map_sites(shape, [&](Site x) { return Site{k + 1 - x.edge, x.pos}; }),
                               sign * coeff);
    }
    return out;
}

Series series_normal_form(const Series& s, const QuotientFlags& flags) {
    Series out(s.skeleton(), s.truncation());
    for (int d = 0; d <= s.truncation(); ++d) out.at(d) = normal_form(s.at(d), flags);
    return out;
}

bool series_zero_in_quotient(const Series& s, const QuotientFlags& flags) {
    for (int d = 0; d <= s.truncation(); ++d)
        if (!quotient_zero(s.at(d), flags)) return false;
    return true;
}

// --- text format -------------------------------------------------------------

std::string serialize_series(const Series& s, const std::string& skeleton_ref) {
    std::ostringstream os;
    os << "series skeleton=" << skeleton_ref << " N=" << s.truncation() << "\n";
    for (int d = 0; d <= s.truncation(); ++d)
        for (const auto& [shape, coeff] : s.at(d).terms())
            os << "deg " << d << " " << format_rat(coeff) << " : " << shape_text(shape) << "\n";
    return os.str();
}

Series parse_series(const std::string& text, const SkeletonPtr& skel_override) {
    std::istringstream in(text);
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), "empty series text");
    std::istringstream hd(line);
    std::string kw, skref, nref;
    hd >> kw >> skref >> nref;
    require(kw == "series" && skref.rfind("skeleton=", 0) == 0 && nref.rfind("N=", 0) == 0,
            "bad series header: " + line);
    int N = std::stoi(nref.substr(2));
    SkeletonPtr skel = skel_override;
    if (!skel) {
        std::string ref = skref.substr(9);
        auto stock = stock_skeleton(ref);
        if (stock) {
            skel = share(*stock);
        } else {
            std::ifstream f(ref);
            require(f.good(), "cannot open skeleton file: " + ref);
            std::stringstream ss;
            ss << f.rdbuf();
            skel = share(Skeleton::parse(ss.str()));
        }
    }
    Series s(skel, N);
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string dkw, coeff;
        int d;
        ls >> dkw >> d >> coeff;
        require(dkw == "deg", "bad series line: " + line);
        std::string colon;
        ls >> colon;
        require(colon == ":", "bad series line: " + line);
        std::string rest;
        std::getline(ls, rest);
        ChordShape shape = parse_shape_text(rest);
        require(static_cast<int>(shape.size()) == d, "series line degree mismatch: " + line);
        validate_shape(*skel, shape);
        s.at(d).add_term(shape, parse_rat(coeff));
    }
    return s;
}

} // namespace ktg
