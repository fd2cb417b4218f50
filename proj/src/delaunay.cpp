#include "delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <unordered_map>
#include <unordered_set>

#include "hemi/errors.hpp"

namespace hemi::detail {

namespace {

constexpr double kSuperTag = -2.0;
constexpr double kInteriorTag = -1.0;

double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

// > 0 when d is inside the circumcircle of the counter-clockwise triangle abc
double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const double adx = a[0] - d[0], ady = a[1] - d[1];
    const double bdx = b[0] - d[0], bdy = b[1] - d[1];
    const double cdx = c[0] - d[0], cdy = c[1] - d[1];
    const double ad = adx * adx + ady * ady;
    const double bd = bdx * bdx + bdy * bdy;
    const double cd = cdx * cdx + cdy * cdy;
    return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

std::uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

struct Tri {
    std::array<int, 3> v{};
    std::array<int, 3> nb{-1, -1, -1};  // nb[i] is across the edge opposite v[i]
    bool alive = true;
    bool inside = false;
};

struct Segment {
    int a = -1;  // domain on the left of a -> b
    int b = -1;
    bool alive = true;
};

class Refiner {
public:
    explicit Refiner(const RefinementInput& in) : in_(in) {
        const double sin_a = std::sin(in.min_angle_degrees * std::numbers::pi / 180.0);
        ratio_bound_ = 1.0 / (2.0 * sin_a);
    }

    RefinementOutput run() {
        build_super_triangle();
        std::vector<int> boundary_vertices;
        for (double T : in_.boundary_parameters) {
            int v = add_point(in_.curve->point(T), T);
            insert_vertex(v, last_tri_, false);
            boundary_vertices.push_back(v);
        }
        const std::size_t nb = boundary_vertices.size();
        for (std::size_t i = 0; i < nb; ++i) add_segment(boundary_vertices[i], boundary_vertices[(i + 1) % nb]);
        recover_segments();
        classify();
        refine_triangles();
        return extract();
    }

private:
    // ---------------------------------------------------------------- storage
    int add_point(const Vec2& p, double tag) {
        if (pts_.size() >= in_.max_vertices) throw SolverError("mesh: vertex budget exhausted");
        pts_.push_back(p);
        tag_.push_back(tag);
        vtri_.push_back(-1);
        return static_cast<int>(pts_.size()) - 1;
    }

    void add_segment(int a, int b) {
        segs_.push_back({a, b, true});
        seg_index_[edge_key(a, b)] = static_cast<int>(segs_.size()) - 1;
    }

    bool is_segment(int a, int b) const {
        auto it = seg_index_.find(edge_key(a, b));
        return it != seg_index_.end() && segs_[it->second].alive;
    }

    void build_super_triangle() {
        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        for (double T : in_.boundary_parameters) {
            const Vec2 p = in_.curve->point(T);
            xmin = std::min(xmin, p[0]);
            xmax = std::max(xmax, p[0]);
            ymin = std::min(ymin, p[1]);
            ymax = std::max(ymax, p[1]);
        }
        const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
        const double r = std::max(xmax - xmin, ymax - ymin) * 20.0 + 1.0;
        scale2_ = (xmax - xmin) * (xmax - xmin) + (ymax - ymin) * (ymax - ymin);
        const int a = add_point({cx - 2.0 * r, cy - r}, kSuperTag);
        const int b = add_point({cx + 2.0 * r, cy - r}, kSuperTag);
        const int c = add_point({cx, cy + 2.0 * r}, kSuperTag);
        Tri t;
        t.v = {a, b, c};
        tris_.push_back(t);
        vtri_[a] = vtri_[b] = vtri_[c] = 0;
        last_tri_ = 0;
    }

    const Vec2& P(int v) const { return pts_[v]; }

    // -------------------------------------------------------------- location
    int locate(const Vec2& p, int start) const {
        const double tol = 1e-14 * scale2_;
        int t = (start >= 0 && tris_[start].alive) ? start : last_alive();
        const std::size_t limit = 4 * tris_.size() + 100;
        for (std::size_t step = 0; step < limit; ++step) {
            const Tri& tri = tris_[t];
            int next = -1;
            for (int i = 0; i < 3; ++i) {
                const int a = tri.v[(i + 1) % 3], b = tri.v[(i + 2) % 3];
                if (orient(P(a), P(b), p) < -tol) {
                    next = tri.nb[i];
                    break;
                }
            }
            if (next < 0) {
                bool outside = false;
                for (int i = 0; i < 3; ++i)
                    if (orient(P(tri.v[(i + 1) % 3]), P(tri.v[(i + 2) % 3]), p) < -tol) outside = true;
                if (outside) throw SolverError("mesh: point outside the enclosing triangle");
                return t;
            }
            t = next;
        }
        // the walk cycled; scan everything
        int best = -1;
        double best_margin = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < tris_.size(); ++i) {
            if (!tris_[i].alive) continue;
            const Tri& tri = tris_[i];
            const double m = std::min({orient(P(tri.v[0]), P(tri.v[1]), p), orient(P(tri.v[1]), P(tri.v[2]), p),
                                       orient(P(tri.v[2]), P(tri.v[0]), p)});
            if (m > best_margin) {
                best_margin = m;
                best = static_cast<int>(i);
            }
        }
        if (best >= 0 && best_margin >= -tol) return best;
        throw SolverError("mesh: point location failed at (" + std::to_string(p[0]) + ", " + std::to_string(p[1]) + ")");
    }

    int last_alive() const {
        for (std::size_t i = tris_.size(); i-- > 0;)
            if (tris_[i].alive) return static_cast<int>(i);
        throw SolverError("mesh: empty triangulation");
    }

    // ------------------------------------------------------------- insertion
    /// Bowyer-Watson insertion of an existing vertex. When `blocked` is set the
    /// cavity never crosses a live segment. Returns the new triangles.
    std::vector<int> insert_vertex(int v, int hint, bool blocked) {
        const Vec2 p = P(v);
        const int t0 = locate(p, hint);
        const double eps = 1e-13 * scale2_;

        std::vector<int> cavity{t0};
        std::unordered_set<int> in_cavity{t0};
        for (std::size_t k = 0; k < cavity.size(); ++k) {
            const Tri& tri = tris_[cavity[k]];
            for (int i = 0; i < 3; ++i) {
                const int n = tri.nb[i];
                if (n < 0 || in_cavity.count(n)) continue;
                const int a = tri.v[(i + 1) % 3], b = tri.v[(i + 2) % 3];
                if (blocked && is_segment(a, b)) continue;
                const Tri& nt = tris_[n];
                bool take = incircle(P(nt.v[0]), P(nt.v[1]), P(nt.v[2]), p) > 0.0;
                // p on the shared edge of the containing triangle
                if (!take && cavity[k] == t0 && std::abs(orient(P(a), P(b), p)) <= eps) take = true;
                if (take) {
                    cavity.push_back(n);
                    in_cavity.insert(n);
                }
            }
        }

        // keep the cavity star-shaped with respect to p
        struct BEdge {
            int a, b, outer, owner;
        };
        std::vector<BEdge> edges;
        for (bool changed = true; changed;) {
            changed = false;
            edges.clear();
            for (int t : cavity) {
                const Tri& tri = tris_[t];
                for (int i = 0; i < 3; ++i) {
                    const int n = tri.nb[i];
                    if (n >= 0 && in_cavity.count(n)) continue;
                    edges.push_back({tri.v[(i + 1) % 3], tri.v[(i + 2) % 3], n, t});
                }
            }
            for (const auto& e : edges) {
                if (orient(P(e.a), P(e.b), p) > eps) continue;
                if (e.owner == t0) continue;  // p sits on this edge; nothing better available
                in_cavity.erase(e.owner);
                cavity.erase(std::find(cavity.begin(), cavity.end(), e.owner));
                changed = true;
                break;
            }
        }

        for (int t : cavity) tris_[t].alive = false;
        std::vector<int> created;
        std::unordered_map<int, int> by_first, by_second;
        for (const auto& e : edges) {
            Tri nt;
            nt.v = {e.a, e.b, v};
            nt.nb[2] = e.outer;
            if (e.outer >= 0) {
                nt.inside = is_segment(e.a, e.b) ? !tris_[e.outer].inside : tris_[e.outer].inside;
            } else {
                nt.inside = false;
            }
            const int idx = static_cast<int>(tris_.size());
            tris_.push_back(nt);
            if (e.outer >= 0) {
                Tri& o = tris_[e.outer];
                for (int i = 0; i < 3; ++i) {
                    const int a = o.v[(i + 1) % 3], b = o.v[(i + 2) % 3];
                    if ((a == e.b && b == e.a) || (a == e.a && b == e.b)) o.nb[i] = idx;
                }
            }
            by_first[e.a] = idx;
            by_second[e.b] = idx;
            created.push_back(idx);
        }
        for (int idx : created) {
            Tri& t = tris_[idx];
            const int a = t.v[0], b = t.v[1];
            auto f = by_first.find(b);
            auto s = by_second.find(a);
            if (f == by_first.end() || s == by_second.end()) throw SolverError("mesh: cavity is not a closed polygon");
            t.nb[0] = f->second;  // edge b-p
            t.nb[1] = s->second;  // edge p-a
            for (int k = 0; k < 3; ++k) vtri_[t.v[k]] = idx;
        }
        last_tri_ = created.empty() ? last_tri_ : created.front();
#ifdef HEMI_DEBUG_DELAUNAY
        validate();
#endif
        return created;
    }

#ifdef HEMI_DEBUG_DELAUNAY
    void validate() const {
        int hull = 0;
        for (const auto& t : tris_)
            if (t.alive)
                for (int n : t.nb) hull += n < 0;
        if (hull != 3) throw SolverError("dbg: hull edges " + std::to_string(hull));
        for (std::size_t t = 0; t < tris_.size(); ++t) {
            const Tri& tri = tris_[t];
            if (!tri.alive) continue;
            if (orient(P(tri.v[0]), P(tri.v[1]), P(tri.v[2])) <= 0.0) throw SolverError("dbg: orientation " + std::to_string(t));
            for (int i = 0; i < 3; ++i) {
                const int n = tri.nb[i];
                if (n < 0) continue;
                if (!tris_[n].alive) throw SolverError("dbg: dead neighbour");
                const int a = tri.v[(i + 1) % 3], b = tri.v[(i + 2) % 3];
                bool ok = false;
                for (int j = 0; j < 3; ++j)
                    if (tris_[n].nb[j] == static_cast<int>(t) && tris_[n].v[(j + 1) % 3] == b && tris_[n].v[(j + 2) % 3] == a) ok = true;
                if (!ok) throw SolverError("dbg: asymmetric adjacency");
            }
        }
    }
#endif

    // --------------------------------------------------------------- queries
    /// Triangle and local index i such that tri.v[i] == a and tri.v[(i+1)%3] == b.
    std::pair<int, int> directed_edge(int a, int b) const {
        int start = vtri_[a];
        if (start < 0) return {-1, -1};
        // rotate around a in both directions
        for (int dir = 0; dir < 2; ++dir) {
            int t = start;
            for (std::size_t guard = 0; guard < 4096 && t >= 0; ++guard) {
                const Tri& tri = tris_[t];
                int i = 0;
                while (tri.v[i] != a) ++i;
                if (tri.v[(i + 1) % 3] == b) return {t, i};
                // dir 0: cross edge (a, v[i+1]); dir 1: cross edge (v[i+2], a)
                t = dir == 0 ? tri.nb[(i + 2) % 3] : tri.nb[(i + 1) % 3];
                if (t == start) break;
            }
        }
        return {-1, -1};
    }

    bool edge_exists(int a, int b) const {
        return directed_edge(a, b).first >= 0 || directed_edge(b, a).first >= 0;
    }

    bool encroached(const Segment& s) const {
        if (!edge_exists(s.a, s.b)) return true;
        for (auto [t, i] : {directed_edge(s.a, s.b), directed_edge(s.b, s.a)}) {
            if (t < 0) continue;
            const int c = tris_[t].v[(i + 2) % 3];
            if (tag_[c] == kSuperTag) continue;
            if (in_diametral_circle(s, P(c))) return true;
        }
        return false;
    }

    bool in_diametral_circle(const Segment& s, const Vec2& c) const {
        const Vec2& a = P(s.a);
        const Vec2& b = P(s.b);
        return (c[0] - a[0]) * (c[0] - b[0]) + (c[1] - a[1]) * (c[1] - b[1]) < 0.0;
    }

    /// Splits a segment at its curve-parameter midpoint; returns new triangles.
    std::vector<int> split_segment(int si, bool blocked) {
        const Segment s = segs_[si];
        segs_[si].alive = false;
        const double T = in_.curve->parameter_midpoint(tag_[s.a], tag_[s.b]);
        const int v = add_point(in_.curve->point(T), T);
        auto created = insert_vertex(v, vtri_[s.a], blocked);
        add_segment(s.a, v);
        add_segment(v, s.b);
        return created;
    }

    void recover_segments() {
        for (int pass = 0; pass < 1000; ++pass) {
            bool any = false;
            for (std::size_t si = 0; si < segs_.size(); ++si) {
                if (!segs_[si].alive) continue;
                if (encroached(segs_[si])) {
                    split_segment(static_cast<int>(si), false);
                    any = true;
                }
            }
            if (!any) return;
        }
        throw SolverError("mesh: boundary recovery did not terminate");
    }

    void classify() {
        for (auto& t : tris_) t.inside = false;
        std::vector<char> seen(tris_.size(), 0);
        std::vector<int> stack;
        for (const auto& s : segs_) {
            if (!s.alive) continue;
            const auto [t, i] = directed_edge(s.a, s.b);
            if (t < 0) throw SolverError("mesh: boundary segment missing after recovery");
            if (!seen[t]) {
                seen[t] = 1;
                stack.push_back(t);
            }
        }
        while (!stack.empty()) {
            const int t = stack.back();
            stack.pop_back();
            tris_[t].inside = true;
            for (int i = 0; i < 3; ++i) {
                const int n = tris_[t].nb[i];
                if (n < 0 || seen[n]) continue;
                if (is_segment(tris_[t].v[(i + 1) % 3], tris_[t].v[(i + 2) % 3])) continue;
                seen[n] = 1;
                stack.push_back(n);
            }
        }
    }

    // ------------------------------------------------------------ refinement
    bool is_bad(const Tri& t) const {
        const Vec2 &a = P(t.v[0]), &b = P(t.v[1]), &c = P(t.v[2]);
        const double la = std::hypot(b[0] - c[0], b[1] - c[1]);
        const double lb = std::hypot(a[0] - c[0], a[1] - c[1]);
        const double lc = std::hypot(a[0] - b[0], a[1] - b[1]);
        const double lmax = std::max({la, lb, lc});
        if (lmax > in_.max_edge) return true;
        const double lmin = std::min({la, lb, lc});
        const double area2 = orient(a, b, c);
        const double R = la * lb * lc / (2.0 * area2);
        return R / lmin > ratio_bound_;
    }

    Vec2 circumcenter(const Tri& t) const {
        const Vec2 &a = P(t.v[0]), &b = P(t.v[1]), &c = P(t.v[2]);
        const double bx = b[0] - a[0], by = b[1] - a[1];
        const double cx = c[0] - a[0], cy = c[1] - a[1];
        const double d = 2.0 * (bx * cy - by * cx);
        const double b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
        return {a[0] + (cy * b2 - by * c2) / d, a[1] + (bx * c2 - cx * b2) / d};
    }

    void push_bad(std::deque<int>& queue, const std::vector<int>& created) const {
        for (int t : created)
            if (tris_[t].alive && tris_[t].inside && is_bad(tris_[t])) queue.push_back(t);
    }

    void refine_triangles() {
        std::deque<int> queue;
        for (std::size_t t = 0; t < tris_.size(); ++t)
            if (tris_[t].alive && tris_[t].inside && is_bad(tris_[t])) queue.push_back(static_cast<int>(t));

        while (!queue.empty()) {
            const int t = queue.front();
            queue.pop_front();
            if (!tris_[t].alive || !tris_[t].inside || !is_bad(tris_[t])) continue;
            const Vec2 c = circumcenter(tris_[t]);

            std::vector<int> hit;
            for (std::size_t si = 0; si < segs_.size(); ++si)
                if (segs_[si].alive && in_diametral_circle(segs_[si], c)) hit.push_back(static_cast<int>(si));

            if (hit.empty()) {
                const int where = locate(c, t);
                if (!tris_[where].inside) {
                    // numerically outside without strict encroachment: split the nearest segment
                    hit.push_back(nearest_segment(c));
                } else {
                    const int v = add_point(c, kInteriorTag);
                    push_bad(queue, insert_vertex(v, where, true));
                    continue;
                }
            }
            for (int si : hit) {
                if (!segs_[si].alive) continue;
                push_bad(queue, split_segment(si, true));
            }
            // a split point may encroach its neighbours
            push_bad(queue, restore_encroached());
            queue.push_back(t);
        }
    }

    std::vector<int> restore_encroached() {
        std::vector<int> created;
        for (bool any = true; any;) {
            any = false;
            for (std::size_t si = 0; si < segs_.size(); ++si) {
                if (!segs_[si].alive || !encroached(segs_[si])) continue;
                auto c = split_segment(static_cast<int>(si), true);
                created.insert(created.end(), c.begin(), c.end());
                any = true;
            }
        }
        return created;
    }

    int nearest_segment(const Vec2& c) const {
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t si = 0; si < segs_.size(); ++si) {
            if (!segs_[si].alive) continue;
            const Vec2& a = P(segs_[si].a);
            const Vec2& b = P(segs_[si].b);
            const double d = std::hypot(0.5 * (a[0] + b[0]) - c[0], 0.5 * (a[1] + b[1]) - c[1]);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(si);
            }
        }
        return best;
    }

    RefinementOutput extract() const {
        RefinementOutput out;
        std::vector<int> remap(pts_.size(), -1);
        auto map_vertex = [&](int v) {
            if (remap[v] < 0) {
                remap[v] = static_cast<int>(out.vertices.size());
                out.vertices.push_back(pts_[v]);
                out.boundary_parameter.push_back(tag_[v] >= 0.0 ? tag_[v] : -1.0);
            }
            return remap[v];
        };
        // keep vertex numbering in insertion order
        std::vector<char> used(pts_.size(), 0);
        for (const auto& t : tris_)
            if (t.alive && t.inside)
                for (int v : t.v) used[v] = 1;
        for (std::size_t v = 0; v < pts_.size(); ++v)
            if (used[v]) map_vertex(static_cast<int>(v));
        for (const auto& t : tris_) {
            if (!t.alive || !t.inside) continue;
            for (int v : t.v)
                if (tag_[v] == kSuperTag) throw SolverError("mesh: domain triangle touches the enclosing triangle");
            out.triangles.push_back({remap[t.v[0]], remap[t.v[1]], remap[t.v[2]]});
        }
        // boundary edges in curve order
        std::vector<const Segment*> live;
        for (const auto& s : segs_)
            if (s.alive) live.push_back(&s);
        std::sort(live.begin(), live.end(), [&](const Segment* x, const Segment* y) { return tag_[x->a] < tag_[y->a]; });
        for (const Segment* s : live) out.boundary_edges.push_back({remap[s->a], remap[s->b]});
        return out;
    }

    const RefinementInput& in_;
    double ratio_bound_ = 1.0;
    double scale2_ = 1.0;
    std::vector<Vec2> pts_;
    std::vector<double> tag_;
    std::vector<int> vtri_;
    std::vector<Tri> tris_;
    std::vector<Segment> segs_;
    std::unordered_map<std::uint64_t, int> seg_index_;
    int last_tri_ = 0;
};

}  // namespace

RefinementOutput refine_delaunay(const RefinementInput& input) {
    if (input.curve == nullptr) throw InputError("refine_delaunay: no boundary curve");
    if (input.boundary_parameters.size() < 3) throw InputError("refine_delaunay: need at least 3 boundary vertices");
    if (!(input.max_edge > 0.0)) throw InputError("refine_delaunay: max edge must be positive");
    Refiner r(input);
    return r.run();
}

}  // namespace hemi::detail
