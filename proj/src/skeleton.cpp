#include "ktg/skeleton.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace ktg {

namespace {

std::string end_text(const EndRef& e) {
    switch (e.kind) {
    case EndKind::Vertex: return "v" + std::to_string(e.id);
    case EndKind::Boundary: return "b" + std::to_string(e.id);
    case EndKind::Closed: return "closed";
    }
    return "?";
}

int parse_id(const std::string& tok, char prefix, const char* what) {
    if (tok.size() < 2 || tok[0] != prefix) fail(std::string("bad ") + what + " id: " + tok);
    for (std::size_t i = 1; i < tok.size(); ++i)
        if (!isdigit(static_cast<unsigned char>(tok[i]))) fail(std::string("bad ") + what + " id: " + tok);
    return std::stoi(tok.substr(1));
}

} // namespace

Skeleton::Skeleton(std::vector<EdgeRec> edges, std::vector<VertexRec> vertices,
                   std::vector<int> bottom, std::vector<int> top)
    : edges_(std::move(edges)), vertices_(std::move(vertices)), bottom_(std::move(bottom)),
      top_(std::move(top)) {
    validate_and_index();
}

void Skeleton::validate_and_index() {
    std::sort(edges_.begin(), edges_.end(), [](const EdgeRec& a, const EdgeRec& b) { return a.id < b.id; });
    std::sort(vertices_.begin(), vertices_.end(),
              [](const VertexRec& a, const VertexRec& b) { return a.id < b.id; });

    edge_index_.clear();
    vertex_index_.clear();
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        if (!edge_index_.emplace(edges_[i].id, static_cast<int>(i)).second)
            fail("duplicate edge id e" + std::to_string(edges_[i].id));
    }
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        if (!vertex_index_.emplace(vertices_[i].id, static_cast<int>(i)).second)
            fail("duplicate vertex id v" + std::to_string(vertices_[i].id));
    }

    // A closed end can only pair with a closed end on the same edge.
    for (const auto& e : edges_) {
        if ((e.src.kind == EndKind::Closed) != (e.dst.kind == EndKind::Closed))
            fail("edge e" + std::to_string(e.id) + " mixes a closed end with an attached end");
    }

    // Trivalence: collect the incident ends each vertex must own.
    std::map<int, std::set<std::pair<int, bool>>> needed;
    for (const auto& e : edges_) {
        if (e.src.kind == EndKind::Vertex) needed[e.src.id].insert({e.id, true});
        if (e.dst.kind == EndKind::Vertex) needed[e.dst.id].insert({e.id, false});
    }
    for (auto& [vid, ends] : needed) {
        if (!vertex_index_.count(vid)) fail("edge references unknown vertex v" + std::to_string(vid));
        if (ends.size() != 3) fail("non-trivalent: vertex v" + std::to_string(vid) + " has " +
                                   std::to_string(ends.size()) + " incident edge-ends");
    }
    for (const auto& v : vertices_) {
        auto it = needed.find(v.id);
        if (it == needed.end()) fail("non-trivalent: vertex v" + std::to_string(v.id) + " has 0 incident edge-ends");
        std::set<std::pair<int, bool>> got;
        for (const auto& en : v.ends) {
            if (!edge_index_.count(en.edge)) fail("vertex end references unknown edge");
            got.insert({en.edge, en.at_src});
        }
        if (got != it->second) fail("vertex v" + std::to_string(v.id) + " end list does not match incidences");
    }

    // Boundary points: exactly one incident end each, listed exactly once.
    std::map<int, int> bseen;
    for (const auto& e : edges_) {
        if (e.src.kind == EndKind::Boundary) bseen[e.src.id]++;
        if (e.dst.kind == EndKind::Boundary) bseen[e.dst.id]++;
    }
    std::set<int> listed;
    for (int b : bottom_)
        if (!listed.insert(b).second) fail("boundary point listed twice");
    for (int b : top_)
        if (!listed.insert(b).second) fail("boundary point listed twice");
    for (auto& [bid, cnt] : bseen) {
        if (cnt != 1) fail("dangling/overused boundary point b" + std::to_string(bid));
        if (!listed.count(bid)) fail("boundary point b" + std::to_string(bid) + " missing from boundary lists");
    }
    for (int b : listed)
        if (!bseen.count(b)) fail("boundary list names unused point b" + std::to_string(b));

    std::ostringstream os;
    for (const auto& v : vertices_) {
        os << "vertex v" << v.id << " (";
        for (int i = 0; i < 3; ++i)
            os << (i ? "," : "") << "e" << v.ends[i].edge << (v.ends[i].at_src ? "s" : "d");
        os << ")\n";
    }
    for (std::size_t i = 0; i < bottom_.size(); ++i)
        os << "bpoint b" << bottom_[i] << " bottom " << (i + 1) << "\n";
    for (std::size_t i = 0; i < top_.size(); ++i)
        os << "bpoint b" << top_[i] << " top " << (i + 1) << "\n";
    for (const auto& e : edges_)
        os << "edge e" << e.id << " " << end_text(e.src) << " " << end_text(e.dst) << "\n";
    encoding_ = os.str();
}

const EdgeRec& Skeleton::edge(int id) const {
    auto it = edge_index_.find(id);
    if (it == edge_index_.end()) fail("unknown edge e" + std::to_string(id));
    return edges_[it->second];
}

bool Skeleton::has_edge(int id) const { return edge_index_.count(id) != 0; }

const VertexRec& Skeleton::vertex(int id) const {
    auto it = vertex_index_.find(id);
    if (it == vertex_index_.end()) fail("unknown vertex v" + std::to_string(id));
    return vertices_[it->second];
}

EdgeEnd Skeleton::boundary_edge_end(int bpoint) const {
    for (const auto& e : edges_) {
        if (e.src.kind == EndKind::Boundary && e.src.id == bpoint) return {e.id, true};
        if (e.dst.kind == EndKind::Boundary && e.dst.id == bpoint) return {e.id, false};
    }
    fail("unknown boundary point b" + std::to_string(bpoint));
}

EndRef Skeleton::end_of(EdgeEnd en) const {
    const EdgeRec& e = edge(en.edge);
    return en.at_src ? e.src : e.dst;
}

bool Skeleton::boundary_outgoing(int bpoint) const { return boundary_edge_end(bpoint).at_src; }

bool Skeleton::is_bottom(int bpoint) const {
    for (int b : bottom_)
        if (b == bpoint) return true;
    for (int b : top_)
        if (b == bpoint) return false;
    fail("unknown boundary point b" + std::to_string(bpoint));
}

std::string Skeleton::describe() const {
    std::ostringstream os;
    os << "edges=" << edges_.size() << " vertices=" << vertices_.size() << " bottom=" << bottom_.size()
       << " top=" << top_.size();
    return os.str();
}

Skeleton Skeleton::parse(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<EdgeRec> edges;
    std::vector<int> bottom_ids, top_ids;
    std::vector<std::pair<int, int>> bottom_raw, top_raw; // (order index, id)
    struct VSpec {
        int id;
        bool ordered = false;
        std::vector<EdgeEnd> ends;
    };
    std::map<int, VSpec> vspecs;
    std::vector<int> vorder;

    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;
        if (kw == "vertex") {
            std::string tok, rest;
            require(static_cast<bool>(ls >> tok), "vertex line: missing id");
            int vid = parse_id(tok, 'v', "vertex");
            if (vspecs.count(vid)) fail("duplicate vertex id v" + std::to_string(vid));
            VSpec vs;
            vs.id = vid;
            if (ls >> rest) {
                // explicit end order: (e1s,e2d,e3s)
                require(rest.size() >= 2 && rest.front() == '(' && rest.back() == ')',
                        "bad vertex end-order suffix: " + rest);
                std::string inner = rest.substr(1, rest.size() - 2);
                std::istringstream es(inner);
                std::string item;
                while (std::getline(es, item, ',')) {
                    require(item.size() >= 3 && item[0] == 'e', "bad vertex end item: " + item);
                    char side = item.back();
                    require(side == 's' || side == 'd', "bad vertex end side: " + item);
                    int eid = std::stoi(item.substr(1, item.size() - 2));
                    vs.ends.push_back({eid, side == 's'});
                }
                require(vs.ends.size() == 3, "vertex needs exactly 3 ends");
                vs.ordered = true;
            }
            vorder.push_back(vid);
            vspecs.emplace(vid, vs);
        } else if (kw == "bpoint") {
            std::string tok, pos;
            int idx;
            require(static_cast<bool>(ls >> tok >> pos >> idx), "bpoint line: expected 'bpoint b<k> bottom|top <i>'");
            int bid = parse_id(tok, 'b', "bpoint");
            if (pos == "bottom")
                bottom_raw.push_back({idx, bid});
            else if (pos == "top")
                top_raw.push_back({idx, bid});
            else
                fail("bpoint position must be bottom or top");
        } else if (kw == "edge") {
            std::string tok, s, d;
            require(static_cast<bool>(ls >> tok >> s >> d), "edge line: expected 'edge e<k> <src> <dst>'");
            EdgeRec e;
            e.id = parse_id(tok, 'e', "edge");
            auto mk = [](const std::string& t) -> EndRef {
                if (t == "closed") return closed_end();
                if (t[0] == 'v') return vertex_end(parse_id(t, 'v', "vertex"));
                if (t[0] == 'b') return boundary_end(parse_id(t, 'b', "bpoint"));
                fail("bad edge endpoint: " + t);
            };
            e.src = mk(s);
            e.dst = mk(d);
            edges.push_back(e);
        } else {
            fail("unknown skeleton line: " + line);
        }
    }

    // Vertices without an explicit order record ends in edge-scan order.
    for (const auto& e : edges) {
        if (e.src.kind == EndKind::Vertex) {
            auto it = vspecs.find(e.src.id);
            require(it != vspecs.end(), "edge references undeclared vertex");
            if (!it->second.ordered) it->second.ends.push_back({e.id, true});
        }
        if (e.dst.kind == EndKind::Vertex) {
            auto it = vspecs.find(e.dst.id);
            require(it != vspecs.end(), "edge references undeclared vertex");
            if (!it->second.ordered) it->second.ends.push_back({e.id, false});
        }
    }
    std::vector<VertexRec> vertices;
    for (int vid : vorder) {
        const VSpec& vs = vspecs.at(vid);
        if (vs.ends.size() != 3)
            fail("non-trivalent: vertex v" + std::to_string(vid) + " has " + std::to_string(vs.ends.size()) +
                 " incident edge-ends");
        VertexRec v;
        v.id = vid;
        std::copy_n(vs.ends.begin(), 3, v.ends.begin());
        vertices.push_back(v);
    }
    auto by_index = [](std::vector<std::pair<int, int>>& raw, std::vector<int>& out) {
        std::sort(raw.begin(), raw.end());
        for (auto& [i, b] : raw) out.push_back(b);
    };
    by_index(bottom_raw, bottom_ids);
    by_index(top_raw, top_ids);
    return Skeleton(std::move(edges), std::move(vertices), std::move(bottom_ids), std::move(top_ids));
}

SkeletonPtr share(Skeleton s) { return std::make_shared<const Skeleton>(std::move(s)); }

std::string skeleton_key(const Skeleton& s) { return hex64(fnv1a(s.encode())); }

// --- stock skeletons -------------------------------------------------------

Skeleton make_circle() { return Skeleton({{1, closed_end(), closed_end()}}, {}, {}, {}); }

Skeleton make_strands(const std::vector<bool>& orients) {
    std::vector<EdgeRec> edges;
    std::vector<int> bottom, top;
    int k = static_cast<int>(orients.size());
    for (int i = 1; i <= k; ++i) {
        bottom.push_back(i);
        top.push_back(k + i);
        if (orients[i - 1])
            edges.push_back({i, boundary_end(i), boundary_end(k + i)});
        else
            edges.push_back({i, boundary_end(k + i), boundary_end(i)});
    }
    return Skeleton(std::move(edges), {}, std::move(bottom), std::move(top));
}

Skeleton make_strands_up(int k) { return make_strands(std::vector<bool>(k, true)); }

Skeleton make_theta() {
    // v1 bottom, v2 top; e1 left arc v2->v1, e2 middle v1->v2, e3 right arc
    // v2->v1. Unzip of e2 and delete of e1/e3 are legal.
    std::vector<EdgeRec> edges = {{1, vertex_end(2), vertex_end(1)},
                                  {2, vertex_end(1), vertex_end(2)},
                                  {3, vertex_end(2), vertex_end(1)}};
    VertexRec v1{1, {EdgeEnd{2, true}, EdgeEnd{1, false}, EdgeEnd{3, false}}};
    VertexRec v2{2, {EdgeEnd{2, false}, EdgeEnd{3, true}, EdgeEnd{1, true}}};
    return Skeleton(std::move(edges), {v1, v2}, {}, {});
}

Skeleton make_dumbbell() {
    std::vector<EdgeRec> edges = {{1, vertex_end(1), vertex_end(1)},
                                  {2, vertex_end(1), vertex_end(2)},
                                  {3, vertex_end(2), vertex_end(2)}};
    VertexRec v1{1, {EdgeEnd{1, false}, EdgeEnd{1, true}, EdgeEnd{2, true}}};
    VertexRec v2{2, {EdgeEnd{2, false}, EdgeEnd{3, true}, EdgeEnd{3, false}}};
    return Skeleton(std::move(edges), {v1, v2}, {}, {});
}

Skeleton make_tetrahedron() {
    // K4 on v1..v4 oriented so that unzipping e1 is legal.
    std::vector<EdgeRec> edges = {
        {1, vertex_end(1), vertex_end(2)}, // the unzippable edge
        {2, vertex_end(3), vertex_end(1)}, {3, vertex_end(4), vertex_end(1)},
        {4, vertex_end(2), vertex_end(3)}, {5, vertex_end(2), vertex_end(4)},
        {6, vertex_end(3), vertex_end(4)},
    };
    VertexRec v1{1, {EdgeEnd{1, true}, EdgeEnd{2, false}, EdgeEnd{3, false}}};
    VertexRec v2{2, {EdgeEnd{1, false}, EdgeEnd{4, true}, EdgeEnd{5, true}}};
    VertexRec v3{3, {EdgeEnd{2, true}, EdgeEnd{4, false}, EdgeEnd{6, true}}};
    VertexRec v4{4, {EdgeEnd{3, true}, EdgeEnd{5, false}, EdgeEnd{6, false}}};
    return Skeleton(std::move(edges), {v1, v2, v3, v4}, {}, {});
}

std::optional<Skeleton> stock_skeleton(const std::string& name) {
    if (name == "circle") return make_circle();
    if (name == "theta") return make_theta();
    if (name == "dumbbell") return make_dumbbell();
    if (name == "tetrahedron") return make_tetrahedron();
    if (name.rfind("strands", 0) == 0 && name.size() > 7) {
        int k = std::stoi(name.substr(7));
        if (k >= 1 && k <= 16) return make_strands_up(k);
    }
    return std::nullopt;
}

// --- splice machinery ------------------------------------------------------

void SkeletonBuilder::add_edge(ProvKey prov, Endpoint src, Endpoint dst) {
    edges_.push_back({prov, src, dst});
}

void SkeletonBuilder::add_vertex(int factor, int vid,
                                 const std::array<std::pair<ProvKey, bool>, 3>& ends) {
    vertices_.push_back({factor, vid, ends});
}

void SkeletonBuilder::set_boundary(std::vector<std::pair<int, int>> bottom,
                                   std::vector<std::pair<int, int>> top) {
    bottom_ = std::move(bottom);
    top_ = std::move(top);
}

BuildOut SkeletonBuilder::build() const {
    const std::size_t n = edges_.size();
    std::map<ProvKey, int> index;
    for (std::size_t i = 0; i < n; ++i)
        if (!index.emplace(edges_[i].prov, static_cast<int>(i)).second) fail("splice: duplicate provenance");

    // link token -> (edge feeding into it, edge flowing out of it)
    std::map<int, std::pair<int, int>> links; // token -> {dst user, src user}
    for (std::size_t i = 0; i < n; ++i) {
        const auto& e = edges_[i];
        if (e.dst.kind == Endpoint::Link) {
            auto& l = links[e.dst.a];
            if (l.first) fail("splice: link used twice as dst");
            l.first = static_cast<int>(i) + 1;
        }
        if (e.src.kind == Endpoint::Link) {
            auto& l = links[e.src.a];
            if (l.second) fail("splice: link used twice as src");
            l.second = static_cast<int>(i) + 1;
        }
    }
    for (auto& [tok, l] : links)
        if (!l.first || !l.second) fail("splice: dangling link token " + std::to_string(tok));

    // Walk chains. Open chains start at a non-link src.
    std::vector<char> used(n, 0);
    std::vector<std::vector<int>> chains;
    std::vector<char> closed_flags;
    std::vector<int> starts;
    for (std::size_t i = 0; i < n; ++i)
        if (edges_[i].src.kind != Endpoint::Link) starts.push_back(static_cast<int>(i));
    std::sort(starts.begin(), starts.end(),
              [&](int a, int b) { return edges_[a].prov < edges_[b].prov; });
    for (int s : starts) {
        std::vector<int> chain;
        int cur = s;
        while (true) {
            require(!used[cur], "splice: edge visited twice (bad weld graph)");
            used[cur] = 1;
            chain.push_back(cur);
            const auto& dst = edges_[cur].dst;
            if (dst.kind != Endpoint::Link) break;
            cur = links.at(dst.a).second - 1;
        }
        chains.push_back(std::move(chain));
        closed_flags.push_back(0);
    }
    // Remaining edges sit in cycles; cut each at its least provenance.
    std::vector<int> rest;
    for (std::size_t i = 0; i < n; ++i)
        if (!used[i]) rest.push_back(static_cast<int>(i));
    std::sort(rest.begin(), rest.end(), [&](int a, int b) { return edges_[a].prov < edges_[b].prov; });
    for (int s : rest) {
        if (used[s]) continue;
        if (edges_[s].src.kind == Endpoint::Close) {
            // already a closed circle on its own
            require(edges_[s].dst.kind == Endpoint::Close, "splice: closed end mixed with attached end");
            used[s] = 1;
            chains.push_back({s});
            closed_flags.push_back(1);
            continue;
        }
        std::vector<int> chain;
        int cur = s;
        do {
            used[cur] = 1;
            chain.push_back(cur);
            cur = links.at(edges_[cur].dst.a).second - 1;
        } while (cur != s);
        chains.push_back(std::move(chain));
        closed_flags.push_back(1);
    }

    // Deterministic edge ids: sort chains by least constituent provenance, so
    // self-composition of a strand skeleton reproduces its own labels.
    auto chain_key = [&](int ci) {
        ProvKey best = edges_[chains[ci][0]].prov;
        for (int idx : chains[ci])
            if (edges_[idx].prov < best) best = edges_[idx].prov;
        return best;
    };
    std::vector<int> order(chains.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return chain_key(a) < chain_key(b); });

    BuildOut out;
    out.chains.resize(chains.size());
    out.chain_closed.resize(chains.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        int ci = order[k];
        int new_id = static_cast<int>(k) + 1;
        out.chain_closed[k] = closed_flags[ci];
        for (std::size_t z = 0; z < chains[ci].size(); ++z) {
            const ProvKey& p = edges_[chains[ci][z]].prov;
            out.chains[k].push_back(p);
            out.zones[p] = {new_id, static_cast<int>(z)};
        }
    }

    // Vertices: surviving ones keep relative (factor, id) order.
    std::vector<std::size_t> vorder(vertices_.size());
    for (std::size_t i = 0; i < vorder.size(); ++i) vorder[i] = i;
    std::sort(vorder.begin(), vorder.end(), [&](std::size_t a, std::size_t b) {
        return std::make_pair(vertices_[a].factor, vertices_[a].vid) <
               std::make_pair(vertices_[b].factor, vertices_[b].vid);
    });
    for (std::size_t i = 0; i < vorder.size(); ++i) {
        const auto& v = vertices_[vorder[i]];
        if (!out.vertex_ids.emplace(std::make_pair(v.factor, v.vid), static_cast<int>(i) + 1).second)
            fail("splice: duplicate vertex token");
    }

    // Boundary points: bottom first, then top, ids sequential.
    int next_b = 1;
    std::vector<int> bot_ids, top_ids;
    for (const auto& key : bottom_) {
        out.bpoint_ids[key] = next_b;
        bot_ids.push_back(next_b++);
    }
    for (const auto& key : top_) {
        out.bpoint_ids[key] = next_b;
        top_ids.push_back(next_b++);
    }

    auto resolve = [&](const Endpoint& ep) -> EndRef {
        switch (ep.kind) {
        case Endpoint::Close: return closed_end();
        case Endpoint::Vert: {
            auto it = out.vertex_ids.find({ep.a, ep.b});
            if (it == out.vertex_ids.end()) fail("splice: edge endpoint names undeclared vertex");
            return vertex_end(it->second);
        }
        case Endpoint::Bound: {
            auto it = out.bpoint_ids.find({ep.a, ep.b});
            if (it == out.bpoint_ids.end()) fail("splice: edge endpoint names unlisted boundary point");
            return boundary_end(it->second);
        }
        case Endpoint::Link: fail("splice: unresolved link");
        }
        return closed_end();
    };

    std::vector<EdgeRec> new_edges;
    for (std::size_t k = 0; k < order.size(); ++k) {
        int ci = order[k];
        EdgeRec e;
        e.id = static_cast<int>(k) + 1;
        if (closed_flags[ci]) {
            e.src = e.dst = closed_end();
        } else {
            e.src = resolve(edges_[chains[ci].front()].src);
            e.dst = resolve(edges_[chains[ci].back()].dst);
        }
        new_edges.push_back(e);
    }

    std::vector<VertexRec> new_vertices;
    for (std::size_t i = 0; i < vorder.size(); ++i) {
        const auto& v = vertices_[vorder[i]];
        VertexRec nv;
        nv.id = static_cast<int>(i) + 1;
        for (int j = 0; j < 3; ++j) {
            const auto& [prov, at_src] = v.ends[j];
            auto it = out.zones.find(prov);
            if (it == out.zones.end()) fail("splice: vertex end names unknown edge");
            const ZoneRef& z = it->second;
            if (at_src) {
                require(z.zone == 0, "splice: vertex attached mid-chain");
                nv.ends[j] = {z.edge, true};
            } else {
                require(z.zone + 1 == static_cast<int>(out.chains[z.edge - 1].size()),
                        "splice: vertex attached mid-chain");
                nv.ends[j] = {z.edge, false};
            }
        }
        new_vertices.push_back(nv);
    }

    out.skel = Skeleton(std::move(new_edges), std::move(new_vertices), std::move(bot_ids),
                        std::move(top_ids));
    return out;
}

// --- surgeries -------------------------------------------------------------

Skeleton switch_edge(const Skeleton& s, int e) {
    const EdgeRec& er = s.edge(e);
    std::vector<EdgeRec> edges = s.edges();
    for (auto& x : edges)
        if (x.id == e) std::swap(x.src, x.dst);
    std::vector<VertexRec> vertices = s.vertices();
    for (auto& v : vertices)
        for (auto& en : v.ends)
            if (en.edge == e) en.at_src = !en.at_src;
    (void)er;
    return Skeleton(std::move(edges), std::move(vertices), s.bottom(), s.top());
}

namespace {

// The two ends at vertex v other than `skip`, in cyclic order after it.
std::array<EdgeEnd, 2> other_ends(const VertexRec& v, EdgeEnd skip) {
    for (int i = 0; i < 3; ++i) {
        if (v.ends[i] == skip) return {v.ends[(i + 1) % 3], v.ends[(i + 2) % 3]};
    }
    fail("edge end not incident to vertex");
}

bool incoming(EdgeEnd en) { return !en.at_src; }

void copy_untouched(SkeletonBuilder& b, const Skeleton& s, const std::set<int>& removed_edges,
                    const std::set<int>& removed_vertices, const std::map<std::pair<int, bool>, int>& relinked) {
    auto endpoint_of = [&](const EdgeRec& e, bool at_src) -> SkeletonBuilder::Endpoint {
        auto it = relinked.find({e.id, at_src});
        if (it != relinked.end()) return SkeletonBuilder::link(it->second);
        const EndRef& r = at_src ? e.src : e.dst;
        switch (r.kind) {
        case EndKind::Closed: return SkeletonBuilder::closed();
        case EndKind::Boundary: return SkeletonBuilder::at_bpoint(0, r.id);
        case EndKind::Vertex:
            require(!removed_vertices.count(r.id), "surgery leaves a dangling end at a removed vertex");
            return SkeletonBuilder::at_vertex(0, r.id);
        }
        return SkeletonBuilder::closed();
    };
    for (const auto& e : s.edges()) {
        if (removed_edges.count(e.id)) continue;
        b.add_edge({0, e.id, 0}, endpoint_of(e, true), endpoint_of(e, false));
    }
    for (const auto& v : s.vertices()) {
        if (removed_vertices.count(v.id)) continue;
        std::array<std::pair<ProvKey, bool>, 3> ends;
        for (int i = 0; i < 3; ++i) ends[i] = {{0, v.ends[i].edge, 0}, v.ends[i].at_src};
        b.add_vertex(0, v.id, ends);
    }
    std::vector<std::pair<int, int>> bot, top;
    for (int x : s.bottom()) bot.push_back({0, x});
    for (int x : s.top()) top.push_back({0, x});
    b.set_boundary(std::move(bot), std::move(top));
}

} // namespace

bool delete_legal(const Skeleton& s, int e, std::string* why) {
    auto no = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    const EdgeRec& er = s.edge(e);
    if (er.src.kind != EndKind::Vertex || er.dst.kind != EndKind::Vertex)
        return no("edge not deletable: endpoint is boundary/closed");
    if (er.src.id == er.dst.id) return no("edge not deletable: loop");
    for (int vid : {er.src.id, er.dst.id}) {
        const VertexRec& v = s.vertex(vid);
        EdgeEnd mine{e, vid == er.src.id};
        auto rest = other_ends(v, mine);
        if (incoming(rest[0]) == incoming(rest[1]))
            return no("incompatible orientations for delete at v" + std::to_string(vid));
    }
    return true;
}

SurgeryOut delete_edge(const Skeleton& s, int e) {
    std::string why;
    require(delete_legal(s, e, &why), why);
    const EdgeRec& er = s.edge(e);
    std::map<std::pair<int, bool>, int> relinked;
    int tok = 1;
    for (int vid : {er.src.id, er.dst.id}) {
        const VertexRec& v = s.vertex(vid);
        auto rest = other_ends(v, EdgeEnd{e, vid == er.src.id});
        EdgeEnd in = incoming(rest[0]) ? rest[0] : rest[1];
        EdgeEnd out = incoming(rest[0]) ? rest[1] : rest[0];
        relinked[{in.edge, in.at_src}] = tok;
        relinked[{out.edge, out.at_src}] = tok;
        ++tok;
    }
    SkeletonBuilder b;
    copy_untouched(b, s, {e}, {er.src.id, er.dst.id}, relinked);
    SurgeryOut so;
    so.out = b.build();
    return so;
}

bool unzip_legal(const Skeleton& s, int e, std::string* why) {
    auto no = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    const EdgeRec& er = s.edge(e);
    if (er.src.kind == EndKind::Closed) return no("cannot unzip a closed circle");
    if (er.src.kind == EndKind::Vertex && er.dst.kind == EndKind::Vertex && er.src.id == er.dst.id)
        return no("cannot unzip a loop");
    if (er.src.kind == EndKind::Boundary && er.dst.kind == EndKind::Boundary)
        return no("cannot unzip a bare strand");
    if (er.src.kind == EndKind::Vertex) {
        auto rest = other_ends(s.vertex(er.src.id), EdgeEnd{e, true});
        if (!(incoming(rest[0]) && incoming(rest[1])))
            return no("incompatible orientations for unzip at v" + std::to_string(er.src.id));
    }
    if (er.dst.kind == EndKind::Vertex) {
        auto rest = other_ends(s.vertex(er.dst.id), EdgeEnd{e, false});
        if (!(!incoming(rest[0]) && !incoming(rest[1])))
            return no("incompatible orientations for unzip at v" + std::to_string(er.dst.id));
    }
    return true;
}

SurgeryOut unzip_edge(const Skeleton& s, int e) {
    std::string why;
    require(unzip_legal(s, e, &why), why);
    const EdgeRec& er = s.edge(e);
    SkeletonBuilder b;
    std::map<std::pair<int, bool>, int> relinked;
    std::set<int> removed_vertices;
    ProvKey d1{0, e, 1}, d2{0, e, 2};
    SkeletonBuilder::Endpoint d1src, d1dst, d2src, d2dst;
    int tok = 1;

    if (er.src.kind == EndKind::Vertex) {
        removed_vertices.insert(er.src.id);
        auto rest = other_ends(s.vertex(er.src.id), EdgeEnd{e, true});
        // cyclic-next end feeds the first daughter
        relinked[{rest[0].edge, rest[0].at_src}] = tok;
        d1src = SkeletonBuilder::link(tok++);
        relinked[{rest[1].edge, rest[1].at_src}] = tok;
        d2src = SkeletonBuilder::link(tok++);
    } else {
        // leaf unzip from the bottom boundary: two fresh points in order
        d1src = SkeletonBuilder::at_bpoint(-1, 1);
        d2src = SkeletonBuilder::at_bpoint(-1, 2);
    }
    if (er.dst.kind == EndKind::Vertex) {
        removed_vertices.insert(er.dst.id);
        auto rest = other_ends(s.vertex(er.dst.id), EdgeEnd{e, false});
        // cyclic-next end continues the second daughter
        relinked[{rest[0].edge, rest[0].at_src}] = tok;
        d2dst = SkeletonBuilder::link(tok++);
        relinked[{rest[1].edge, rest[1].at_src}] = tok;
        d1dst = SkeletonBuilder::link(tok++);
    } else {
        d1dst = SkeletonBuilder::at_bpoint(-1, 1);
        d2dst = SkeletonBuilder::at_bpoint(-1, 2);
    }

    copy_untouched(b, s, {e}, removed_vertices, relinked);
    b.add_edge(d1, d1src, d1dst);
    b.add_edge(d2, d2src, d2dst);

    // extend the boundary lists with the fresh points if this is a leaf unzip
    if (er.src.kind == EndKind::Boundary || er.dst.kind == EndKind::Boundary) {
        bool at_bottom =
            er.src.kind == EndKind::Boundary ? s.is_bottom(er.src.id) : s.is_bottom(er.dst.id);
        int old_b = er.src.kind == EndKind::Boundary ? er.src.id : er.dst.id;
        std::vector<std::pair<int, int>> bot, top;
        for (int x : s.bottom()) {
            if (x == old_b && at_bottom) {
                bot.push_back({-1, 1});
                bot.push_back({-1, 2});
            } else
                bot.push_back({0, x});
        }
        for (int x : s.top()) {
            if (x == old_b && !at_bottom) {
                top.push_back({-1, 1});
                top.push_back({-1, 2});
            } else
                top.push_back({0, x});
        }
        b.set_boundary(std::move(bot), std::move(top));
    }

    SurgeryOut so;
    so.out = b.build();
    so.daughter1 = d1;
    so.daughter2 = d2;
    return so;
}

SurgeryOut connsum_skeletons(const Skeleton& s1, int e, const Skeleton& s2, int f) {
    SkeletonBuilder b;
    ProvKey bridge{-1, 1, 0};

    auto split = [&](const Skeleton& s, int factor, int eid, int vtok) {
        const EdgeRec& er = s.edge(eid);
        ProvKey half1{factor, eid, 1}, half2{factor, eid, 2};
        auto outer = [&](const EndRef& r, bool at_src) -> SkeletonBuilder::Endpoint {
            switch (r.kind) {
            case EndKind::Closed: {
                // splitting a closed circle yields a loop at the new vertex
                return at_src ? SkeletonBuilder::at_vertex(-1, vtok) : SkeletonBuilder::at_vertex(-1, vtok);
            }
            case EndKind::Boundary: return SkeletonBuilder::at_bpoint(factor, r.id);
            case EndKind::Vertex: return SkeletonBuilder::at_vertex(factor, r.id);
            }
            return SkeletonBuilder::closed();
        };
        if (er.src.kind == EndKind::Closed) {
            // single half: a loop from the new vertex to itself
            b.add_edge(half1, SkeletonBuilder::at_vertex(-1, vtok), SkeletonBuilder::at_vertex(-1, vtok));
            return std::make_pair(half1, half1);
        }
        b.add_edge(half1, outer(er.src, true), SkeletonBuilder::at_vertex(-1, vtok));
        b.add_edge(half2, SkeletonBuilder::at_vertex(-1, vtok), outer(er.dst, false));
        return std::make_pair(half1, half2);
    };

    auto copy_factor = [&](const Skeleton& s, int factor, int skip_edge) {
        auto endpoint_of = [&](const EndRef& r) -> SkeletonBuilder::Endpoint {
            switch (r.kind) {
            case EndKind::Closed: return SkeletonBuilder::closed();
            case EndKind::Boundary: return SkeletonBuilder::at_bpoint(factor, r.id);
            case EndKind::Vertex: return SkeletonBuilder::at_vertex(factor, r.id);
            }
            return SkeletonBuilder::closed();
        };
        for (const auto& x : s.edges()) {
            if (x.id == skip_edge) continue;
            b.add_edge({factor, x.id, 0}, endpoint_of(x.src), endpoint_of(x.dst));
        }
        for (const auto& v : s.vertices()) {
            std::array<std::pair<ProvKey, bool>, 3> ends;
            for (int i = 0; i < 3; ++i) {
                ProvKey p{factor, v.ends[i].edge, 0};
                if (v.ends[i].edge == skip_edge) p.copy = v.ends[i].at_src ? 1 : 2;
                ends[i] = {p, v.ends[i].at_src};
            }
            b.add_vertex(factor, v.id, ends);
        }
    };

    copy_factor(s1, 0, e);
    copy_factor(s2, 1, f);
    auto [e1, e2] = split(s1, 0, e, 1);
    auto [f1, f2] = split(s2, 1, f, 2);
    b.add_edge(bridge, SkeletonBuilder::at_vertex(-1, 1), SkeletonBuilder::at_vertex(-1, 2));

    // new-vertex cyclic orders: (incoming half, bridge, outgoing half) on the
    // s1 side, (incoming half, outgoing half, bridge) on the s2 side — the
    // "attach to the right side" convention.
    b.add_vertex(-1, 1, {std::make_pair(e1, false), std::make_pair(bridge, true), std::make_pair(e2, true)});
    b.add_vertex(-1, 2, {std::make_pair(f1, false), std::make_pair(f2, true), std::make_pair(bridge, false)});

    std::vector<std::pair<int, int>> bot, top;
    for (int x : s1.bottom()) bot.push_back({0, x});
    for (int x : s2.bottom()) bot.push_back({1, x});
    for (int x : s1.top()) top.push_back({0, x});
    for (int x : s2.top()) top.push_back({1, x});
    b.set_boundary(std::move(bot), std::move(top));

    SurgeryOut so;
    so.out = b.build();
    return so;
}

} // namespace ktg
