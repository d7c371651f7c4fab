#include "strbill/scene.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "strbill/dynamics.hpp"

namespace strbill {

namespace {

constexpr double angle_snap = 1e-12;
// Fixed irrational-looking direction for even-odd ray casts.
const Vec2 parity_dir = normalized(Vec2{0.8191520442889918, 0.5858939213});

double scale_tol(double diam) { return 1e-9 * (1.0 + diam); }

std::string fmt_point(const Vec2& p) {
    std::ostringstream os;
    os.precision(9);
    os << '(' << p.x << ", " << p.y << ')';
    return os.str();
}

// Flattened chain in traversal order; consecutive duplicates removed.
std::vector<Vec2> chain_polyline(const BoundaryChain& chain, double max_angle = pi / 32) {
    std::vector<Vec2> pts;
    for (const auto& ce : chain.elements) {
        auto f = flatten(ce.geom, max_angle);
        if (ce.reversed) std::reverse(f.begin(), f.end());
        for (const auto& p : f)
            if (pts.empty() || dist(pts.back(), p) > 1e-12 * (1.0 + norm(p))) pts.push_back(p);
    }
    while (pts.size() > 1 && dist(pts.back(), pts.front()) <= 1e-12 * (1.0 + norm(pts.front()))) pts.pop_back();
    return pts;
}

double polygon_area(const std::vector<Vec2>& poly) {
    double a = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) a += cross(poly[i], poly[(i + 1) % poly.size()]);
    return 0.5 * a;
}

bool inside_polygon(const std::vector<Vec2>& poly, const Vec2& p) {
    bool in = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (x > p.x) in = !in;
        }
    }
    return in;
}

void reverse_chain(BoundaryChain& chain) {
    std::reverse(chain.elements.begin(), chain.elements.end());
    for (auto& ce : chain.elements) {
        if (auto* s = std::get_if<LineSegment>(&ce.geom)) std::swap(s->a, s->b);
        else ce.reversed = !ce.reversed;
    }
}

void make_ccw(BoundaryChain& chain) {
    if (chain_area(chain) < 0.0) reverse_chain(chain);
}

void push_segment(std::vector<ChainElement>& out, const Vec2& a, const Vec2& b) {
    if (!(a == b)) out.push_back({LineSegment{a, b}, false});
}

// Circular arc from `from` to `to` about c in the given sense.
ChainElement circle_arc(const Vec2& c, const Vec2& from, const Vec2& to, bool ccw) {
    const double r = dist(from, c);
    const double r2 = dist(to, c);
    if (!(r > 0.0) || std::fabs(r - r2) > scale_tol(r))
        throw std::invalid_argument("arc step endpoints are not equidistant from the center");
    const double a0 = angle_of(from - c), a1 = angle_of(to - c);
    if (ccw) {
        double span = wrap_from(a1 - a0, 0.0);
        if (span == 0.0) span = two_pi;
        return {EllipticArc{c, c, 2.0 * r, a0, a0 + span}, false};
    }
    double span = wrap_from(a0 - a1, 0.0);
    if (span == 0.0) span = two_pi;
    return {EllipticArc{c, c, 2.0 * r, a1, a1 + span}, true};
}

void append_path(std::vector<ChainElement>& out, Vec2 cur, const std::vector<PathStep>& steps, const Vec2& end) {
    for (const auto& st : steps) {
        if (!is_finite(st.to) || (st.kind == PathStep::Kind::arc && !is_finite(st.center)))
            throw std::invalid_argument("path step has non-finite coordinates");
        if (st.kind == PathStep::Kind::line) push_segment(out, cur, st.to);
        else out.push_back(circle_arc(st.center, cur, st.to, st.ccw));
        cur = st.to;
    }
    push_segment(out, cur, end);
}

struct Anchor {
    std::size_t index{0};
    double theta{0.0};
};

// Vertex of H at p and the orientation of line_dir lying in its turning
// interval. When both orientations fit (segment endpoints), prefer_low picks
// the lower end of the interval.
Anchor resolve_anchor(const ConvexBody& body, const AnchorLine& line, bool prefer_low, const char* which) {
    if (!is_finite(line.point) || !is_finite(line.direction) || !(norm(line.direction) > 0.0))
        throw std::invalid_argument(std::string("anchor ") + which + ": invalid point or direction");
    if (body.kind == BodyKind::point) throw std::invalid_argument("anchors need a body with positive extent");
    std::size_t best = 0;
    double dbest = 1e300;
    for (std::size_t i = 0; i < body.size(); ++i) {
        const double d = dist(body.vertices[i], line.point);
        if (d < dbest) {
            dbest = d;
            best = i;
        }
    }
    if (dbest > body.eps) {
        if (distance_to_boundary(body, line.point) <= body.eps)
            throw std::invalid_argument(std::string("anchor ") + which + " must be a vertex of H");
        throw std::invalid_argument(std::string("anchor ") + which + " is not on the boundary of H");
    }
    const AngleInterval iv = vertex_turning(body, best);
    const double base = angle_of(line.direction);
    std::vector<double> fits;
    for (double cand : {base, base + pi}) {
        const double th = wrap_from(cand, iv.lo - angle_snap);
        if (th <= iv.hi + angle_snap) fits.push_back(std::clamp(th, iv.lo, iv.hi));
    }
    if (fits.empty()) throw std::invalid_argument(std::string("line through anchor ") + which + " is not a supporting line");
    std::sort(fits.begin(), fits.end());
    return {best, prefer_low ? fits.front() : fits.back()};
}

double lambda_max_resolved(const ConvexBody& body, const Anchor& a, const Anchor& b) {
    const Vec2 A = body.vertices[a.index], B = body.vertices[b.index];
    const Vec2 ua = unit(a.theta), ub = unit(b.theta);
    const double den = cross(ua, ub);
    if (std::fabs(den) < 1e-14) return INFINITY;
    // Solve s_a ua + s_b ub = B - A.
    const Vec2 w = B - A;
    const double s_a = cross(w, ub) / den;
    const double s_b = cross(ua, w) / den;
    if (s_a > 0.0 && s_b > 0.0) return std::min(s_a, s_b);
    return INFINITY;
}

// Region bounded by the mouths, the essential curve and the essential arc of H.
std::vector<Vec2> essential_region(const HiddenRegion& h) {
    std::vector<Vec2> poly{h.B};
    for (const auto& sa : h.essential) {
        auto pts = flatten(sa.arc, pi / 64);
        for (const auto& p : pts)
            if (!(poly.back() == p)) poly.push_back(p);
    }
    poly.push_back(h.A);
    const auto n = static_cast<std::ptrdiff_t>(h.body.size());
    for (std::ptrdiff_t k = static_cast<std::ptrdiff_t>(h.a) - 1; k > static_cast<std::ptrdiff_t>(h.a) - static_cast<std::ptrdiff_t>(h.m); --k)
        poly.push_back(h.body.vertex(((k % n) + n) % n));
    return poly;
}

// Rejects paths that enter the essential region.
void check_outside_region(const std::vector<ChainElement>& path, const HiddenRegion& h, const char* what) {
    const auto region = essential_region(h);
    const double tol = 1e-7 * (1.0 + h.body.diameter + h.lam);
    for (const auto& ce : path) {
        const auto pts = flatten(ce.geom, pi / 64);
        for (std::size_t i = 1; i < pts.size(); ++i) {
            for (int k = 0; k < 16; ++k) {
                const Vec2 p = pts[i - 1] + (pts[i] - pts[i - 1]) * ((k + 0.5) / 16.0);
                if (dist(p, h.A_prime) < tol || dist(p, h.B_prime) < tol || dist(p, h.A) < tol || dist(p, h.B) < tol)
                    continue;
                if (inside_polygon(region, p))
                    throw std::invalid_argument(std::string(what) + " enters the essential region of " + h.name + " near " +
                                                fmt_point(p));
            }
        }
    }
}

std::vector<ChainElement> essential_elements(const HiddenRegion& h) {
    std::vector<ChainElement> out;
    for (const auto& sa : h.essential) out.push_back({sa.arc, false});
    return out;
}

std::vector<Vec2> clip_half_plane(const std::vector<Vec2>& poly, const Vec2& o, const Vec2& d, double tol) {
    std::vector<Vec2> out;
    const auto side = [&](const Vec2& p) { return cross(d, p - o); };
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % poly.size()];
        const double sp = side(p), sq = side(q);
        const bool ip = sp >= -tol, iq = sq >= -tol;
        if (ip) out.push_back(p);
        if (ip != iq) {
            const double t = sp / (sp - sq);
            out.push_back(p + (q - p) * t);
        }
    }
    return out;
}

// Outward offset of the cap arc by t, clipped to the H side of both mouth lines.
std::vector<Vec2> offset_sliver(const std::vector<Vec2>& arc_pts, const HiddenRegion& h, double t) {
    std::vector<Vec2> nrm;
    for (std::size_t k = 1; k < arc_pts.size(); ++k) {
        const Vec2 d = normalized(arc_pts[k] - arc_pts[k - 1]);
        nrm.push_back({d.y, -d.x});
    }
    std::vector<Vec2> outer;
    outer.push_back(arc_pts.front() + nrm.front() * t);
    for (std::size_t k = 1; k + 1 < arc_pts.size(); ++k) {
        const Vec2 n1 = nrm[k - 1], n2 = nrm[k];
        const double c = 1.0 + dot(n1, n2);
        if (c < 0.1) {
            outer.push_back(arc_pts[k] + n1 * t);
            outer.push_back(arc_pts[k] + n2 * t);
        } else {
            outer.push_back(arc_pts[k] + (n1 + n2) * (t / c));
        }
    }
    outer.push_back(arc_pts.back() + nrm.back() * t);
    std::vector<Vec2> poly = arc_pts;
    for (auto it = outer.rbegin(); it != outer.rend(); ++it) poly.push_back(*it);
    const double tol = h.body.eps;
    poly = clip_half_plane(poly, h.A, unit(h.theta_a), tol);
    poly = clip_half_plane(poly, h.B, unit(h.theta_b), tol);
    std::vector<Vec2> clean;
    for (const auto& p : poly)
        if (clean.empty() || dist(clean.back(), p) > tol) clean.push_back(p);
    while (clean.size() > 1 && dist(clean.back(), clean.front()) <= tol) clean.pop_back();
    return clean;
}

BoundaryChain build_cap(const HiddenRegion& h, const ClosureSpec& spec, const std::string& name) {
    BoundaryChain chain;
    chain.name = name;
    chain.role = ChainRole::cap;
    const ConvexBody& body = h.body;
    const auto n = static_cast<std::ptrdiff_t>(body.size());
    const auto ia = static_cast<std::ptrdiff_t>(h.a);
    const std::ptrdiff_t k1_edges = n - static_cast<std::ptrdiff_t>(h.m);
    std::vector<Vec2> arc_pts;
    for (std::ptrdiff_t k = 0; k <= k1_edges; ++k) arc_pts.push_back(body.vertex(ia + k));

    if (!spec.steps.empty()) {
        for (std::size_t k = 1; k < arc_pts.size(); ++k) push_segment(chain.elements, arc_pts[k - 1], arc_pts[k]);
        append_path(chain.elements, h.B, spec.steps, h.A);
        check_outside_region(std::vector<ChainElement>(chain.elements.begin() + k1_edges, chain.elements.end()), h,
                             "cap path");
    } else {
        if (!(spec.cap_thickness > 0.0)) throw std::invalid_argument("cap thickness must be positive");
        // The clipped end walls lie on the mouth lines; thin the sliver until
        // each wall leaves at least a quarter of its mouth open.
        std::vector<Vec2> clean;
        for (double t = spec.cap_thickness * body.diameter;; t *= 0.5) {
            if (!(t > 1e3 * body.eps))
                throw std::invalid_argument("cap too thin for the mouth geometry; give an explicit cap path");
            clean = offset_sliver(arc_pts, h, t);
            double wall_a = 0.0, wall_b = 0.0;
            for (const auto& p : clean) {
                if (std::fabs(cross(unit(h.theta_a), p - h.A)) <= 1e3 * body.eps)
                    wall_a = std::max(wall_a, dot(p - h.A, unit(h.theta_a)));
                if (std::fabs(cross(unit(h.theta_b), p - h.B)) <= 1e3 * body.eps)
                    wall_b = std::max(wall_b, -dot(p - h.B, unit(h.theta_b)));
            }
            if (clean.size() >= 3 && wall_a <= 0.75 * h.lam && wall_b <= 0.75 * h.lam) break;
        }
        for (std::size_t k = 0; k < clean.size(); ++k) push_segment(chain.elements, clean[k], clean[(k + 1) % clean.size()]);
    }
    make_ccw(chain);
    return chain;
}

BoundaryChain build_obstacle(const HiddenRegion& h, const ClosureSpec& spec, const std::string& name) {
    BoundaryChain chain;
    chain.name = name;
    chain.role = ChainRole::obstacle;
    chain.elements = essential_elements(h);
    std::vector<ChainElement> path;
    if (!spec.steps.empty()) {
        append_path(path, h.A_prime, spec.steps, h.B_prime);
    } else {
        if (!(spec.margin > 0.0)) throw std::invalid_argument("closure margin must be positive");
        const Vec2 c = h.body.centroid();
        double rmax = 0.0;
        for (const auto& sa : h.essential)
            for (const auto& p : flatten(sa.arc, pi / 64)) rmax = std::max(rmax, dist(p, c));
        const double R = rmax + spec.margin * (h.body.diameter + h.lam);
        const auto reach = [&](const Vec2& from, const Vec2& u) {
            const Vec2 w = from - c;
            const double bq = dot(w, u);
            const double s = -bq + std::sqrt(std::fmax(bq * bq - norm2(w) + R * R, 0.0));
            return from + u * s;
        };
        Vec2 qa = reach(h.A_prime, unit(h.theta_a));
        Vec2 qb = reach(h.B_prime, -unit(h.theta_b));
        Vec2 ra = qa, rb = qb;
        if (std::isfinite(h.lambda_max)) {
            // Mouth lines meet beyond the mouths: stop before they do, then leave radially.
            const double step = 0.5 * (h.lambda_max - h.lam);
            if (step < dist(qa, h.A_prime)) {
                qa = h.A_prime + unit(h.theta_a) * step;
                ra = reach(qa, normalized(qa - c));
            }
            if (step < dist(qb, h.B_prime)) {
                qb = h.B_prime - unit(h.theta_b) * step;
                rb = reach(qb, normalized(qb - c));
            }
        }
        const auto& mid_arc = h.essential[h.essential.size() / 2].arc;
        const Vec2 mid = mid_arc.point(0.5 * (mid_arc.s0 + mid_arc.s1));
        const double fa = angle_of(ra - c), fb = angle_of(rb - c), fm = angle_of(mid - c);
        const bool ccw = wrap_from(fm - fa, 0.0) < wrap_from(fb - fa, 0.0);
        push_segment(path, h.A_prime, qa);
        push_segment(path, qa, ra);
        path.push_back(circle_arc(c, ra, rb, ccw));
        push_segment(path, rb, qb);
        push_segment(path, qb, h.B_prime);
    }
    check_outside_region(path, h, "closure");
    chain.elements.insert(chain.elements.end(), path.begin(), path.end());
    make_ccw(chain);
    return chain;
}

bool bodies_overlap(const ConvexBody& a, const ConvexBody& b) {
    for (const auto& v : a.vertices)
        if (contains(b, v) != Containment::outside) return true;
    for (const auto& v : b.vertices)
        if (contains(a, v) != Containment::outside) return true;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (segment_crosses_body(b, a.vertex(static_cast<std::ptrdiff_t>(i)), a.vertex(static_cast<std::ptrdiff_t>(i) + 1)))
            return true;
    return false;
}

void set_bounds(Scene& scene) {
    Box box;
    for (const auto& ch : scene.chains)
        for (const auto& ce : ch.elements) {
            const Box b = element_bounds(ce.geom);
            box.add(b.lo);
            box.add(b.hi);
        }
    for (const auto& body : scene.bodies)
        for (const auto& v : body.vertices) box.add(v);
    if (box.empty()) {
        scene.center = {0.0, 0.0};
        scene.diameter = 0.0;
        scene.bounding_radius = 0.0;
        return;
    }
    scene.center = box.center();
    scene.diameter = norm(box.hi - box.lo);
    scene.bounding_radius = 0.5 * scene.diameter * (1.0 + 1e-9) + 1e-12;
}

// Point just outside the middle of the essential arc of H, in the free gap.
Vec2 essential_probe(const HiddenRegion& h) {
    const ConvexBody& body = h.body;
    const double t0 = body.cum_len[h.b];
    const double L_ess = arc_ccw(body, t0, body.cum_len[h.a]);
    const double t = std::fmod(t0 + 0.5 * L_ess, body.L);
    const Vec2 p = point_at(body, t);
    const AngleInterval iv = turning_angle(body, t);
    const Vec2 d = unit(0.5 * (iv.lo + iv.hi));
    const Vec2 out{d.y, -d.x};
    return p + out * (1e-6 * (1.0 + body.diameter));
}

void require_valid(const Scene& scene, const char* what) {
    const ValidationReport rep = validate_scene(scene);
    if (!rep.ok()) throw std::invalid_argument(std::string(what) + ": " + rep.violations.front());
}

}  // namespace

const char* to_string(SceneKind k) {
    switch (k) {
        case SceneKind::closed_table: return "closed_table";
        case SceneKind::open_obstacles: return "open_obstacles";
        case SceneKind::room: return "room";
    }
    return "?";
}

const char* to_string(ChainRole r) {
    switch (r) {
        case ChainRole::table_wall: return "table_wall";
        case ChainRole::room_wall: return "room_wall";
        case ChainRole::obstacle: return "obstacle";
        case ChainRole::cap: return "cap";
    }
    return "?";
}

std::size_t Scene::element_count() const {
    std::size_t n = 0;
    for (const auto& c : chains) n += c.elements.size();
    return n;
}

void finalize_scene(Scene& scene) {
    set_bounds(scene);
    scene.index = build_index(scene);
}

double chain_area(const BoundaryChain& chain) { return polygon_area(chain_polyline(chain)); }

bool inside_chain(const BoundaryChain& chain, const Vec2& p) {
    int count = 0;
    double t[2];
    for (const auto& ce : chain.elements) count += ray_hits(ce.geom, p, parity_dir, 0.0, t);
    return (count & 1) != 0;
}

bool in_forbidden(const Scene& scene, const Vec2& p) {
    for (const auto& ch : scene.chains) {
        const bool in = inside_chain(ch, p);
        if (ch.role == ChainRole::table_wall || ch.role == ChainRole::room_wall) {
            if (!in) return true;
        } else if (in) {
            return true;
        }
    }
    return false;
}

Scene mushroom_table(const ConvexBody& body, double lam, const std::string& name) {
    if (!(lam > 0.0) || !std::isfinite(lam)) throw std::invalid_argument("mushroom_table: lambda must be positive");
    Scene scene;
    scene.kind = SceneKind::closed_table;
    scene.lam = lam;
    scene.table = level_curve(body, lam);
    BoundaryChain wall;
    wall.name = "wall";
    wall.role = ChainRole::table_wall;
    for (const auto& a : scene.table->arcs) wall.elements.push_back({a, false});
    scene.chains.push_back(std::move(wall));
    scene.bodies.push_back(body);
    scene.body_names.push_back(name);
    finalize_scene(scene);
    return scene;
}

double lambda_max(const ConvexBody& body, const AnchorLine& A, const AnchorLine& B) {
    const Anchor a = resolve_anchor(body, A, true, "A");
    const Anchor b = resolve_anchor(body, B, false, "B");
    if (a.index == b.index) throw std::invalid_argument("anchors A and B coincide");
    return lambda_max_resolved(body, a, b);
}

HiddenRegion resolve_hidden(const ConvexBody& body, const AnchorLine& A, const AnchorLine& B, double lam) {
    if (!(lam > 0.0) || !std::isfinite(lam)) throw std::invalid_argument("lambda must be positive");
    const Anchor a = resolve_anchor(body, A, true, "A");
    const Anchor b = resolve_anchor(body, B, false, "B");
    if (a.index == b.index) throw std::invalid_argument("anchors A and B coincide");
    HiddenRegion h;
    h.body = body;
    h.a = a.index;
    h.b = b.index;
    h.m = (a.index + body.size() - b.index) % body.size();
    h.theta_a = a.theta;
    h.theta_b = b.theta;
    h.A = body.vertices[a.index];
    h.B = body.vertices[b.index];
    h.lam = lam;
    h.lambda_max = lambda_max_resolved(body, a, b);
    if (!(lam < h.lambda_max)) {
        std::ostringstream os;
        os.precision(9);
        os << "lambda " << lam << " must be below lambda_max " << h.lambda_max;
        throw std::invalid_argument(os.str());
    }
    h.A_prime = h.A + unit(h.theta_a) * lam;
    h.B_prime = h.B - unit(h.theta_b) * lam;
    h.essential = essential_sweep(body, lam, h.b, h.m, h.theta_a, h.theta_b);
    return h;
}

Scene livshits_obstacle(const ConvexBody& body, const AnchorLine& A, const AnchorLine& B, double lam,
                        const ClosureSpec& cap, const ClosureSpec& closure, const std::string& name) {
    HiddenRegion h = resolve_hidden(body, A, B, lam);
    h.name = name;
    Scene scene;
    scene.kind = SceneKind::open_obstacles;
    scene.lam = lam;
    scene.chains.push_back(build_cap(h, cap, "K1"));
    scene.chains.push_back(build_obstacle(h, closure, "K_lambda"));
    scene.bodies.push_back(body);
    scene.body_names.push_back(name);
    scene.hidden.push_back(std::move(h));
    finalize_scene(scene);
    require_valid(scene, "livshits_obstacle");
    return scene;
}

Scene penrose_room(const PenroseCap& cap1, const PenroseCap& cap2, double lam, const CorridorSpec& corridor) {
    if (bodies_overlap(cap1.body, cap2.body)) throw std::invalid_argument("penrose_room: bodies overlap");
    HiddenRegion h1 = resolve_hidden(cap1.body, cap1.A, cap1.B, lam);
    HiddenRegion h2 = resolve_hidden(cap2.body, cap2.A, cap2.B, lam);
    h1.name = cap1.name.empty() ? "H1" : cap1.name;
    h2.name = cap2.name.empty() ? "H2" : cap2.name;

    BoundaryChain room;
    room.name = "room";
    room.role = ChainRole::room_wall;
    std::vector<ChainElement> c1, c2;
    append_path(c1, h1.A_prime, corridor.first.steps, h2.B_prime);
    append_path(c2, h2.A_prime, corridor.second.steps, h1.B_prime);
    for (const auto* h : {&h1, &h2}) {
        check_outside_region(c1, *h, "corridor");
        check_outside_region(c2, *h, "corridor");
    }
    room.elements = essential_elements(h1);
    room.elements.insert(room.elements.end(), c1.begin(), c1.end());
    const auto e2 = essential_elements(h2);
    room.elements.insert(room.elements.end(), e2.begin(), e2.end());
    room.elements.insert(room.elements.end(), c2.begin(), c2.end());
    if (chain_area(room) <= 0.0) throw std::invalid_argument("penrose_room: corridor does not enclose a room");

    Scene scene;
    scene.kind = SceneKind::room;
    scene.lam = lam;
    scene.chains.push_back(std::move(room));
    scene.chains.push_back(build_cap(h1, cap1.cap, h1.name + ".K1"));
    scene.chains.push_back(build_cap(h2, cap2.cap, h2.name + ".K1"));
    scene.bodies = {cap1.body, cap2.body};
    scene.body_names = {h1.name, h2.name};
    scene.hidden.push_back(std::move(h1));
    scene.hidden.push_back(std::move(h2));
    finalize_scene(scene);
    const ValidationReport rep = validate_scene(scene);
    if (!rep.ok()) {
        for (const auto& v : rep.violations)
            if (v.find("intersect") != std::string::npos && v.find("K1") != std::string::npos)
                throw std::invalid_argument("penrose_room: corridor crosses a cap (" + v + ")");
        throw std::invalid_argument("penrose_room: " + rep.violations.front());
    }
    return scene;
}

double modified_potential(const HiddenRegion& h, const Vec2& p) {
    const ConvexBody& body = h.body;
    const TangentFrame f = supporting_rays(body, p);
    const auto n = static_cast<std::ptrdiff_t>(body.size());
    const double L = body.L;
    const double tb = body.cum_len[h.b];
    const double L_ess = arc_ccw(body, tb, body.cum_len[h.a]);
    const double tol = body.eps;
    const auto wrap = [&](std::ptrdiff_t k) { return static_cast<std::size_t>(((k % n) + n) % n); };
    const auto collinear = [&](std::size_t edge) {
        return std::fabs(cross(body.edge_dir[edge], p - body.vertices[edge])) <= tol;
    };
    // A tangent edge through p admits either of its vertices as tangent point.
    std::vector<std::size_t> plus{f.i_plus}, minus{f.i_minus};
    if (collinear(f.i_plus)) plus.push_back(wrap(static_cast<std::ptrdiff_t>(f.i_plus) + 1));
    const std::size_t before = wrap(static_cast<std::ptrdiff_t>(f.i_minus) - 1);
    if (collinear(before)) minus.push_back(before);

    double best = INFINITY;
    for (std::size_t ip : plus) {
        for (std::size_t im : minus) {
            // Visible run from T_plus anticlockwise to T_minus, as offsets from B.
            double op = arc_ccw(body, tb, body.cum_len[ip]);
            const double run = ip == im ? 0.0 : arc_ccw(body, body.cum_len[ip], body.cum_len[im]);
            double om = op + run;
            Vec2 Tp = body.vertices[ip], Tm = body.vertices[im];
            if (om <= L_ess + tol) {
                // Run inside the essential arc: no clamping.
            } else if (op >= L_ess - tol && om <= L + tol) {
                // Run lies on the cap side: both ends clamp to the nearer mouth.
                op = om = 0.0;
                Tp = Tm = dist(p, h.B) <= dist(p, h.A) ? h.B : h.A;
            } else if (op < L_ess - tol) {
                // Run leaves the essential arc through A.
                om = L_ess;
                Tm = h.A;
            } else {
                // Run starts on the cap side and re-enters through B.
                op = 0.0;
                Tp = h.B;
                om -= L;
                if (om > L_ess + tol) {
                    om = L_ess;
                    Tm = h.A;
                }
                om = std::max(om, 0.0);
            }
            best = std::min(best, dist(p, Tp) + dist(p, Tm) + L_ess - (om - op));
        }
    }
    return best;
}

ValidationReport validate_scene(const Scene& scene) {
    ValidationReport rep;
    const double tol = scale_tol(scene.diameter);

    struct Seg {
        Vec2 a, b;
        std::size_t chain;
        double c0, c1;  // cumulative length along the chain
    };
    std::vector<Seg> segs;
    std::vector<double> totals;

    std::size_t walls = 0;
    for (std::size_t ci = 0; ci < scene.chains.size(); ++ci) {
        const BoundaryChain& ch = scene.chains[ci];
        if (ch.role == ChainRole::table_wall || ch.role == ChainRole::room_wall) ++walls;
        if (ch.elements.empty()) {
            rep.violations.push_back("chain '" + ch.name + "' is empty");
            totals.push_back(0.0);
            continue;
        }
        for (std::size_t k = 0; k < ch.elements.size(); ++k) {
            const Vec2 e = ch.elements[k].end();
            const Vec2 s = ch.elements[(k + 1) % ch.elements.size()].start();
            const double gap = dist(e, s);
            if (!(gap <= tol)) {
                std::ostringstream os;
                os.precision(3);
                os << "chain '" << ch.name << "' not closed after element " << k << " (gap " << gap << ")";
                rep.violations.push_back(os.str());
            }
        }
        const auto poly = chain_polyline(ch);
        const double area = polygon_area(poly);
        if (!(area > 0.0)) rep.violations.push_back("chain '" + ch.name + "' is not anticlockwise");
        if (ch.role == ChainRole::table_wall) {
            double total = 0.0;
            bool convex = true;
            for (std::size_t k = 0; k < poly.size(); ++k) {
                const Vec2 d0 = poly[(k + poly.size() - 1) % poly.size()], d1 = poly[k], d2 = poly[(k + 1) % poly.size()];
                const double turn = std::atan2(cross(d1 - d0, d2 - d1), dot(d1 - d0, d2 - d1));
                if (turn < -1e-9) convex = false;
                total += turn;
            }
            if (!convex || std::fabs(total - two_pi) > 1e-6) rep.violations.push_back("table wall '" + ch.name + "' is not convex");
        }
        double c = 0.0;
        const std::size_t np = poly.size();
        for (std::size_t k = 0; k < np; ++k) {
            const Vec2 a = poly[k], b = poly[(k + 1) % np];
            const double len = dist(a, b);
            segs.push_back({a, b, ci, c, c + len});
            c += len;
        }
        totals.push_back(c);
    }
    if (scene.kind == SceneKind::closed_table && (walls != 1 || scene.chains.size() != 1))
        rep.violations.push_back("closed table needs exactly one wall chain");
    if (scene.kind == SceneKind::room && walls != 1) rep.violations.push_back("room needs exactly one wall chain");
    if (scene.kind == SceneKind::open_obstacles && walls != 0) rep.violations.push_back("open scene has wall chains");

    // Sweep and prune on x.
    std::vector<std::size_t> order(segs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    const auto xmin = [&](std::size_t i) { return std::min(segs[i].a.x, segs[i].b.x); };
    const auto xmax = [&](std::size_t i) { return std::max(segs[i].a.x, segs[i].b.x); };
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return xmin(i) < xmin(j); });
    std::vector<std::pair<std::size_t, std::size_t>> bad_pairs;
    std::vector<bool> self_reported(scene.chains.size(), false);
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
        const Seg& s = segs[order[oi]];
        const double hi = xmax(order[oi]) + tol;
        const double ylo = std::min(s.a.y, s.b.y) - tol, yhi = std::max(s.a.y, s.b.y) + tol;
        for (std::size_t oj = oi + 1; oj < order.size() && xmin(order[oj]) <= hi; ++oj) {
            const Seg& t = segs[order[oj]];
            if (std::max(t.a.y, t.b.y) < ylo || std::min(t.a.y, t.b.y) > yhi) continue;
            if (s.chain == t.chain) {
                const Seg& u = s.c0 <= t.c0 ? s : t;
                const Seg& w = s.c0 <= t.c0 ? t : s;
                const double gap = std::min(w.c0 - u.c1, totals[s.chain] - w.c1 + u.c0);
                if (gap <= 10.0 * tol) continue;
            }
            if (segment_segment_distance(s.a, s.b, t.a, t.b) <= tol) {
                const std::pair<std::size_t, std::size_t> key{std::min(s.chain, t.chain), std::max(s.chain, t.chain)};
                if (std::find(bad_pairs.begin(), bad_pairs.end(), key) == bad_pairs.end()) bad_pairs.push_back(key);
            }
        }
    }
    std::sort(bad_pairs.begin(), bad_pairs.end());
    for (const auto& [i, j] : bad_pairs) {
        if (i == j) rep.violations.push_back("chain '" + scene.chains[i].name + "' intersects itself");
        else rep.violations.push_back("chains intersect: '" + scene.chains[i].name + "' and '" + scene.chains[j].name + "'");
    }

    // Declared bodies must sit inside the domain.
    for (std::size_t bi = 0; bi < scene.bodies.size(); ++bi) {
        const ConvexBody& body = scene.bodies[bi];
        const std::string nm = bi < scene.body_names.size() ? scene.body_names[bi] : "H";
        for (const auto& ch : scene.chains) {
            if (ch.role != ChainRole::table_wall && ch.role != ChainRole::room_wall) continue;
            for (const auto& v : body.vertices)
                if (!inside_chain(ch, v)) {
                    rep.violations.push_back("body '" + nm + "' is not inside wall '" + ch.name + "'");
                    break;
                }
        }
    }
    for (const auto& h : scene.hidden) {
        const Vec2 probe = essential_probe(h);
        if (in_forbidden(scene, probe)) rep.violations.push_back("hidden body '" + h.name + "' is not inside the scene region");
    }
    return rep;
}

}  // namespace strbill
