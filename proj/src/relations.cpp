#include "ktg/relations.hpp"

#include <algorithm>
#include <cstdio>
#include <unistd.h>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace ktg {

namespace {

Site shifted(Site x, Site slot) {
    if (x.edge == slot.edge && x.pos >= slot.pos) return {x.edge, x.pos + 1};
    return x;
}

// Configurations of degree n-1 plus one dangling endpoint ("the partner"),
// enumerated as (base shape, partner site).
template <typename Fn> void for_dangling(const Skeleton& s, int n, std::size_t cap, Fn&& fn) {
    if (n < 1) return;
    auto bases = enumerate_shapes(s, n - 1, cap);
    for (const auto& base : bases) {
        for (const auto& er : s.edges()) {
            int m = endpoints_on(base, er.id);
            for (int q = 1; q <= m + 1; ++q) {
                Site partner{er.id, q};
                ChordShape placed = shape_with_slot(base, partner);
                fn(placed, partner);
            }
        }
    }
}

Combo hop_relator(const SkeletonPtr& skel, const ChordShape& placed, Site partner, const Chord& beta) {
    Combo rel(skel, static_cast<int>(placed.size()) + 1);
    for (const Site x : {beta.a, beta.b}) {
        for (int side = 0; side < 2; ++side) {
            Site slot{x.edge, x.pos + side}; // side 0: just before x, 1: just after
            ChordShape terms = shape_with_slot(placed, slot);
            Site p2 = shifted(partner, slot);
            terms.push_back(make_chord(p2, slot));
            rel.add_term(normalize_shape(std::move(terms)), Rat(side == 0 ? 1 : -1));
        }
    }
    return rel;
}

void normalize_relator(Combo& rel) {
    if (rel.is_zero()) return;
    // scale so the lexicographically first nonzero coefficient is +1
    const Rat& lead = rel.terms().begin()->second;
    rel *= Rat(1) / lead;
}

std::vector<Combo> dedupe(std::vector<Combo> rels) {
    std::map<std::string, Combo> seen;
    for (auto& r : rels) {
        if (r.is_zero()) continue;
        normalize_relator(r);
        std::ostringstream key;
        for (const auto& [sh, c] : r.terms()) key << format_rat(c) << '|' << shape_key(sh) << '|';
        seen.emplace(key.str(), std::move(r));
    }
    std::vector<Combo> out;
    for (auto& [k, r] : seen) out.push_back(std::move(r));
    return out;
}

} // namespace

RelatorSet gen_4t(const SkeletonPtr& s, int n, std::size_t cap) {
    RelatorSet out{s, n, {}};
    if (n < 2) return out;
    std::vector<Combo> rels;
    for_dangling(*s, n, cap, [&](const ChordShape& placed, Site partner) {
        for (const Chord& beta : placed) rels.push_back(hop_relator(s, placed, partner, beta));
    });
    out.relators = dedupe(std::move(rels));
    return out;
}

RelatorSet gen_vi(const SkeletonPtr& s, int n, std::size_t cap) {
    RelatorSet out{s, n, {}};
    if (n < 1 || s->vertices().empty()) return out;
    std::vector<Combo> rels;
    for_dangling(*s, n, cap, [&](const ChordShape& placed, Site partner) {
        for (const VertexRec& v : s->vertices()) {
            Combo rel(s, static_cast<int>(placed.size()) + 1);
            for (const EdgeEnd& en : v.ends) {
                int m = endpoints_on(placed, en.edge);
                Site slot = en.at_src ? Site{en.edge, 1} : Site{en.edge, m + 1};
                ChordShape terms = shape_with_slot(placed, slot);
                Site p2 = shifted(partner, slot);
                terms.push_back(make_chord(p2, slot));
                // incoming (+1), outgoing (-1)
                rel.add_term(normalize_shape(std::move(terms)), Rat(en.at_src ? -1 : 1));
            }
            rels.push_back(std::move(rel));
        }
    });
    out.relators = dedupe(std::move(rels));
    return out;
}

RelatorSet gen_1t(const SkeletonPtr& s, int n, std::size_t cap) {
    RelatorSet out{s, n, {}};
    if (n < 1) return out;
    for (const auto& shape : enumerate_shapes(*s, n, cap)) {
        bool isolated = false;
        for (const Chord& c : shape) {
            if (c.a.edge != c.b.edge) continue;
            const EdgeRec& er = s->edge(c.a.edge);
            int m = endpoints_on(shape, c.a.edge);
            if (c.b.pos == c.a.pos + 1) isolated = true;
            if (er.src.kind == EndKind::Closed && c.a.pos == 1 && c.b.pos == m) isolated = true;
            if (isolated) break;
        }
        if (isolated) out.relators.push_back(Combo::single(s, shape));
    }
    return out;
}

// --- exact elimination ------------------------------------------------------

namespace {

void reduce_content(IntRow& r) {
    if (r.coeffs.empty()) return;
    Int g = 0;
    for (auto& [c, v] : r.coeffs) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
        if (g == 1) break;
    }
    bool neg = r.coeffs.front().second < 0;
    if (neg) g = -g;
    if (g != 1 && g != 0)
        for (auto& [c, v] : r.coeffs) v /= g;
}

// r -= (r[pivot]/p[pivot]) * p, fraction-free: r <- (pl*r - rl*p)/content
void eliminate(IntRow& r, const IntRow& p) {
    const Int& pl = p.coeffs.front().second;
    Int rl = 0;
    for (auto& [c, v] : r.coeffs)
        if (c == p.coeffs.front().first) {
            rl = v;
            break;
        }
    if (rl == 0) return;
    std::vector<std::pair<int, Int>> out;
    out.reserve(r.coeffs.size() + p.coeffs.size());
    auto it = r.coeffs.cbegin();
    auto jt = p.coeffs.cbegin();
    while (it != r.coeffs.end() || jt != p.coeffs.end()) {
        if (jt == p.coeffs.cend() || (it != r.coeffs.cend() && it->first < jt->first)) {
            out.emplace_back(it->first, pl * it->second);
            ++it;
        } else if (it == r.coeffs.cend() || jt->first < it->first) {
            out.emplace_back(jt->first, -rl * jt->second);
            ++jt;
        } else {
            Int v = pl * it->second - rl * jt->second;
            if (v != 0) out.emplace_back(it->first, std::move(v));
            ++it;
            ++jt;
        }
    }
    r.coeffs = std::move(out);
    reduce_content(r);
}

} // namespace

std::vector<SparseRow> echelonize(std::vector<IntRow> rows) {
    for (auto& r : rows) reduce_content(r);
    std::sort(rows.begin(), rows.end(), [](const IntRow& a, const IntRow& b) {
        return a.coeffs < b.coeffs; // deterministic processing order
    });

    std::map<int, IntRow> pivots; // leading column -> row
    for (auto& r : rows) {
        while (!r.coeffs.empty()) {
            auto it = pivots.find(r.coeffs.front().first);
            if (it == pivots.end()) break;
            eliminate(r, it->second);
        }
        if (!r.coeffs.empty()) {
            int lead = r.coeffs.front().first;
            pivots.emplace(lead, std::move(r));
        }
    }

    // Back-substitution, bottom pivot up, then rational normalization.
    std::vector<int> cols;
    for (auto& [c, row] : pivots) cols.push_back(c);
    for (auto ci = cols.rbegin(); ci != cols.rend(); ++ci) {
        IntRow& row = pivots.at(*ci);
        bool changed = true;
        while (changed) {
            changed = false;
            for (auto& [c, v] : row.coeffs) {
                if (c == *ci) continue;
                auto it = pivots.find(c);
                if (it != pivots.end()) {
                    eliminate(row, it->second);
                    changed = true;
                    break;
                }
            }
        }
    }

    std::vector<SparseRow> out;
    for (auto& [c, row] : pivots) {
        SparseRow sr;
        sr.pivot = c;
        Rat lead(row.coeffs.front().second);
        for (auto& [col, v] : row.coeffs) {
            Rat q(v);
            q /= lead;
            sr.coeffs.emplace_back(col, q);
        }
        out.push_back(std::move(sr));
    }
    return out;
}

// --- quotient spaces --------------------------------------------------------

QuotientSpace build_quotient_uncached(const SkeletonPtr& s, int n, const QuotientFlags& flags) {
    QuotientSpace q;
    q.skel_ = s;
    q.degree_ = n;
    q.flags_ = flags;
    q.basis_ = enumerate_shapes(*s, n, flags.cap);

    std::map<ChordShape, int> index;
    for (std::size_t i = 0; i < q.basis_.size(); ++i) index.emplace(q.basis_[i], static_cast<int>(i));

    std::vector<IntRow> rows;
    auto push = [&](const RelatorSet& rs) {
        for (const Combo& rel : rs.relators) {
            // clear denominators
            Int den = 1;
            for (const auto& [sh, c] : rel.terms()) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den_mpz_t());
            IntRow row;
            for (const auto& [sh, c] : rel.terms()) {
                Rat v = c * Rat(den);
                row.coeffs.emplace_back(index.at(sh), Int(v.get_num()));
            }
            std::sort(row.coeffs.begin(), row.coeffs.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            rows.push_back(std::move(row));
        }
    };
    push(gen_4t(s, n, flags.cap));
    push(gen_vi(s, n, flags.cap));
    if (flags.use_1t) push(gen_1t(s, n, flags.cap));

    q.rows_ = echelonize(std::move(rows));
    return q;
}

int QuotientSpace::basis_index(const ChordShape& shape) const {
    auto it = std::lower_bound(basis_.begin(), basis_.end(), shape);
    require(it != basis_.end() && *it == shape, "shape outside quotient basis");
    return static_cast<int>(it - basis_.begin());
}

Combo QuotientSpace::normal_form(const Combo& c) const {
    if (c.is_zero()) return Combo(skel_, degree_);
    require(c.degree() == degree_, "normal_form: degree mismatch");
    require(c.skeleton() && *c.skeleton() == *skel_, "normal_form: skeleton mismatch");

    std::map<int, Rat> vec;
    for (const auto& [sh, coeff] : c.terms()) vec[basis_index(sh)] = coeff;
    for (const SparseRow& row : rows_) {
        auto it = vec.find(row.pivot);
        if (it == vec.end() || it->second == 0) continue;
        Rat f = it->second;
        for (const auto& [col, v] : row.coeffs) {
            auto jt = vec.emplace(col, Rat(0)).first;
            jt->second -= f * v;
            if (jt->second == 0) vec.erase(jt);
        }
    }
    Combo out(skel_, degree_);
    for (auto& [i, v] : vec) out.add_term(basis_[i], v);
    return out;
}

std::string QuotientSpace::serialize() const {
    std::ostringstream os;
    os << "ktg-quotient v1\n";
    os << "degree " << degree_ << "\n";
    os << "flags " << flags_.tag() << "\n";
    os << "basis " << basis_.size() << "\n";
    std::istringstream enc(skel_->encode());
    std::string line;
    while (std::getline(enc, line)) os << "s " << line << "\n";
    for (const SparseRow& r : rows_) {
        os << "row " << r.pivot << " " << r.coeffs.size();
        for (const auto& [c, v] : r.coeffs) os << " " << c << " " << format_rat(v);
        os << "\n";
    }
    return os.str();
}

QuotientSpace QuotientSpace::deserialize(const std::string& text, const QuotientFlags& flags) {
    std::istringstream in(text);
    std::string line;
    require(std::getline(in, line) && line == "ktg-quotient v1", "bad quotient cache header");
    QuotientSpace q;
    q.flags_ = flags;
    std::size_t basis_count = 0;
    std::string skel_text;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string kw;
        ls >> kw;
        if (kw == "degree")
            ls >> q.degree_;
        else if (kw == "flags") {
            std::string tag;
            ls >> tag;
            require(tag == flags.tag(), "quotient cache flag mismatch");
        } else if (kw == "basis")
            ls >> basis_count;
        else if (kw == "s")
            skel_text += line.substr(2) + "\n";
        else if (kw == "row") {
            SparseRow r;
            std::size_t k;
            ls >> r.pivot >> k;
            for (std::size_t i = 0; i < k; ++i) {
                int col;
                std::string v;
                ls >> col >> v;
                r.coeffs.emplace_back(col, parse_rat(v));
            }
            q.rows_.push_back(std::move(r));
        }
    }
    q.skel_ = share(Skeleton::parse(skel_text));
    q.basis_ = enumerate_shapes(*q.skel_, q.degree_, flags.cap);
    require(q.basis_.size() == basis_count, "quotient cache basis mismatch");
    return q;
}

std::string cache_dir() {
    const char* env = std::getenv("KTG_CACHE_DIR");
    return env && *env ? std::string(env) : std::string("./.ktg-cache");
}

namespace {

std::mutex reg_mutex;
std::map<std::string, QuotientPtr> registry;

std::string quotient_key(const Skeleton& s, int n, const QuotientFlags& flags) {
    return hex64(fnv1a(s.encode() + "|deg=" + std::to_string(n) + "|" + flags.tag() + "|v1"));
}

} // namespace

QuotientPtr build_quotient(const SkeletonPtr& s, int n, const QuotientFlags& flags) {
    std::string key = quotient_key(*s, n, flags);
    {
        std::lock_guard<std::mutex> lock(reg_mutex);
        auto it = registry.find(key);
        if (it != registry.end()) return it->second;
    }

    namespace fs = std::filesystem;
    fs::path dir = cache_dir();
    fs::path file = dir / (key + ".qsp");
    if (fs::exists(file)) {
        std::ifstream in(file);
        std::stringstream ss;
        ss << in.rdbuf();
        try {
            auto q = std::make_shared<QuotientSpace>(QuotientSpace::deserialize(ss.str(), flags));
            if (*q->skeleton() == *s && q->degree() == n) {
                std::lock_guard<std::mutex> lock(reg_mutex);
                registry.emplace(key, q);
                return q;
            }
        } catch (const Error&) {
            // stale or corrupt cache entry: fall through and rebuild
        }
    }

    auto q = std::make_shared<QuotientSpace>(build_quotient_uncached(s, n, flags));
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!ec) {
        fs::path tmp = dir / (key + ".tmp." + std::to_string(::getpid()));
        std::ofstream out(tmp);
        out << q->serialize();
        out.close();
        fs::rename(tmp, file, ec); // atomic publish
        if (ec) fs::remove(tmp, ec);
    }
    std::lock_guard<std::mutex> lock(reg_mutex);
    registry.emplace(key, q);
    return q;
}

Combo normal_form(const Combo& c, const QuotientFlags& flags) {
    if (c.is_zero()) return c;
    return build_quotient(c.skeleton(), c.degree(), flags)->normal_form(c);
}

bool quotient_zero(const Combo& c, const QuotientFlags& flags) { return normal_form(c, flags).is_zero(); }

} // namespace ktg
