#include "strbill/dynamics.hpp"

#if defined(__SSE2__)
#include <immintrin.h>
#endif

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace strbill {

namespace {

constexpr double range_slack = 1e-12;
constexpr double inf = std::numeric_limits<double>::infinity();

using Prim = SceneIndex::Prim;

Prim make_prim(const Element& e, std::size_t chain, std::size_t element) {
    Prim p;
    p.chain = static_cast<std::uint32_t>(chain);
    p.element = static_cast<std::uint32_t>(element);
    if (const auto* s = std::get_if<LineSegment>(&e)) {
        p.kind = 0;
        p.a = s->a;
        p.d = s->b - s->a;
        p.p0 = s->a;
        p.p1 = s->b;
    } else {
        const auto& arc = std::get<EllipticArc>(e);
        p.kind = 1;
        p.a = arc.center();
        p.d = arc.axis();
        p.sa = arc.semi_major();
        p.sb = arc.semi_minor();
        if (!(p.sb > 0.0)) throw std::invalid_argument("degenerate elliptic arc");
        p.inv_a = 1.0 / p.sa;
        p.inv_b = 1.0 / p.sb;
        p.e0 = unit(arc.s0);
        p.e1 = unit(arc.s1);
        p.span = arc.span();
        p.p0 = arc.start();
        p.p1 = arc.end();
    }
    return p;
}

double tangent_mismatch(const Vec2& a, const Vec2& b) { return std::atan2(std::fabs(cross(a, b)), dot(a, b)); }

// Binary tree built by binned surface-area splits, later collapsed to four-wide nodes.
struct Builder {
    struct BNode {
        Box box;
        std::uint32_t left{0}, right{0};
        std::uint32_t first{0}, count{0};  // count > 0 for leaves
    };
    std::vector<Prim> prims;
    std::vector<Box> boxes;
    std::vector<BNode> bnodes;

    static double half_area(const Box& b) {
        const Vec2 e = b.extent();
        return e.x + e.y;
    }

    std::uint32_t build(std::size_t lo, std::size_t hi) {
        const auto id = static_cast<std::uint32_t>(bnodes.size());
        bnodes.emplace_back();
        Box box, cbox;
        for (std::size_t i = lo; i < hi; ++i) {
            box.add(boxes[i]);
            cbox.add(boxes[i].center());
        }
        bnodes[id].box = box;
        const std::size_t n = hi - lo;
        if (n <= 2) return leaf(id, lo, hi);
        const Vec2 ext = cbox.extent();
        const bool by_x = ext.x >= ext.y;
        const double c0 = by_x ? cbox.lo.x : cbox.lo.y;
        const double span = by_x ? ext.x : ext.y;
        const auto key = [&](std::size_t i) { return by_x ? boxes[i].center().x : boxes[i].center().y; };
        std::size_t mid = lo + n / 2;
        bool partitioned = false;
        if (span > 0.0) {
            constexpr int bins = 16;
            std::array<Box, bins> bb;
            std::array<std::size_t, bins> bc{};
            const auto bin_of = [&](std::size_t i) {
                return std::min(bins - 1, static_cast<int>((key(i) - c0) / span * bins));
            };
            for (std::size_t i = lo; i < hi; ++i) {
                const int k = bin_of(i);
                bb[k].add(boxes[i]);
                ++bc[k];
            }
            double best = half_area(box) * static_cast<double>(n);
            int split = -1;
            for (int s = 1; s < bins; ++s) {
                Box l, r;
                std::size_t nl = 0, nr = 0;
                for (int k = 0; k < s; ++k)
                    if (bc[k]) {
                        l.add(bb[k]);
                        nl += bc[k];
                    }
                for (int k = s; k < bins; ++k)
                    if (bc[k]) {
                        r.add(bb[k]);
                        nr += bc[k];
                    }
                if (nl == 0 || nr == 0) continue;
                const double cost = half_area(box) + half_area(l) * static_cast<double>(nl) +
                                    half_area(r) * static_cast<double>(nr);
                if (cost < best) {
                    best = cost;
                    split = s;
                }
            }
            if (split < 0 && n <= 4) return leaf(id, lo, hi);
            if (split >= 0) {
                std::size_t j = lo;
                for (std::size_t i = lo; i < hi; ++i)
                    if (bin_of(i) < split) {
                        std::swap(prims[i], prims[j]);
                        std::swap(boxes[i], boxes[j]);
                        ++j;
                    }
                mid = j;
                partitioned = true;
            }
        }
        if (!partitioned) {
            std::vector<std::size_t> idx(n);
            for (std::size_t i = 0; i < n; ++i) idx[i] = lo + i;
            std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(mid - lo), idx.end(),
                             [&](std::size_t a, std::size_t b) { return key(a) < key(b) || (key(a) == key(b) && a < b); });
            std::vector<Prim> tp;
            std::vector<Box> tb;
            for (std::size_t i : idx) {
                tp.push_back(prims[i]);
                tb.push_back(boxes[i]);
            }
            std::copy(tp.begin(), tp.end(), prims.begin() + static_cast<std::ptrdiff_t>(lo));
            std::copy(tb.begin(), tb.end(), boxes.begin() + static_cast<std::ptrdiff_t>(lo));
        }
        const std::uint32_t l = build(lo, mid);
        const std::uint32_t r = build(mid, hi);
        bnodes[id].left = l;
        bnodes[id].right = r;
        return id;
    }

    std::uint32_t leaf(std::uint32_t id, std::size_t lo, std::size_t hi) {
        bnodes[id].first = static_cast<std::uint32_t>(lo);
        bnodes[id].count = static_cast<std::uint32_t>(hi - lo);
        return id;
    }

    // Emits the four-wide node for binary inner node b and returns its index.
    std::uint32_t collapse(std::uint32_t b, std::vector<SceneIndex::Node>& out, float pad) {
        std::vector<std::uint32_t> kids{bnodes[b].left, bnodes[b].right};
        // Open the largest inner child until four slots are used.
        while (kids.size() < 4) {
            int pick = -1;
            double area = -1.0;
            for (std::size_t k = 0; k < kids.size(); ++k) {
                const BNode& c = bnodes[kids[k]];
                if (c.count == 0 && half_area(c.box) > area) {
                    area = half_area(c.box);
                    pick = static_cast<int>(k);
                }
            }
            if (pick < 0) break;
            const BNode c = bnodes[kids[static_cast<std::size_t>(pick)]];
            kids[static_cast<std::size_t>(pick)] = c.left;
            kids.push_back(c.right);
        }
        const auto id = static_cast<std::uint32_t>(out.size());
        out.emplace_back();
        for (std::size_t k = 0; k < 4; ++k) {
            SceneIndex::Node& n = out[id];
            if (k >= kids.size()) {
                n.lox[k] = n.loy[k] = 1.0f;
                n.hix[k] = n.hiy[k] = -1.0f;
                n.child[k] = 0;
                n.count[k] = 1;
                continue;
            }
            const BNode& c = bnodes[kids[k]];
            n.lox[k] = std::nextafter(static_cast<float>(c.box.lo.x), -INFINITY) - pad;
            n.loy[k] = std::nextafter(static_cast<float>(c.box.lo.y), -INFINITY) - pad;
            n.hix[k] = std::nextafter(static_cast<float>(c.box.hi.x), INFINITY) + pad;
            n.hiy[k] = std::nextafter(static_cast<float>(c.box.hi.y), INFINITY) + pad;
            if (c.count > 0) {
                n.child[k] = c.first;
                n.count[k] = c.count;
            } else {
                const std::uint32_t sub = collapse(kids[k], out, pad);
                out[id].child[k] = sub;
                out[id].count[k] = 0;
            }
        }
        return id;
    }
};

// Reciprocal direction with zero components replaced by a huge finite value.
inline Vec2 safe_inverse(const Vec2& d) {
    constexpr double big = 1e30;
    return {d.x != 0.0 ? 1.0 / d.x : std::copysign(big, d.x), d.y != 0.0 ? 1.0 / d.y : std::copysign(big, d.y)};
}

inline bool in_arc_range(const Prim& p, const Vec2& c) {
    if (p.span >= two_pi - 1e-15) return true;
    const double c0 = cross(p.e0, c), c1 = cross(c, p.e1);
    if (p.span <= pi) return c0 >= -range_slack && c1 >= -range_slack;
    return !(c0 < -range_slack && c1 < -range_slack);
}

struct Candidate {
    double t{inf};
    std::uint32_t prim{0};
};

inline void test_prim(const Prim& p, std::uint32_t k, const Vec2& o, const Vec2& d, double t_min, Candidate& best) {
    if (p.kind == 0) {
        const double den = cross(d, p.d);
        if (den == 0.0) return;
        const Vec2 r = p.a - o;
        const double t = cross(r, p.d) / den;
        if (!(t > t_min && t < best.t)) return;
        const double q = cross(r, d) / den;
        if (q < -range_slack || q > 1.0 + range_slack) return;
        best = {t, k};
        return;
    }
    const Vec2 v = perp(p.d);
    const Vec2 r = o - p.a;
    const Vec2 oc{dot(r, p.d) * p.inv_a, dot(r, v) * p.inv_b};
    const Vec2 dc{dot(d, p.d) * p.inv_a, dot(d, v) * p.inv_b};
    const double qa = norm2(dc), qb = dot(oc, dc), qc = norm2(oc) - 1.0;
    const double disc = qb * qb - qa * qc;
    if (disc < 0.0) return;
    // Product form of the roots avoids cancellation.
    const double sq = std::sqrt(disc);
    const double qq = qb >= 0.0 ? -(qb + sq) : -(qb - sq);
    double t1 = qq / qa;
    double t2 = qq != 0.0 ? qc / qq : t1;
    if (t1 > t2) std::swap(t1, t2);
    for (double t : {t1, t2}) {
        if (!(t > t_min)) continue;
        if (!(t < best.t)) return;
        if (in_arc_range(p, oc + dc * t)) {
            best = {t, k};
            return;
        }
    }
}

Candidate query(const SceneIndex& idx, const Vec2& o, const Vec2& d) {
    Candidate best;
    if (idx.root_leaf) {
        for (std::uint32_t k = 0; k < idx.prims.size(); ++k) test_prim(idx.prims[k], k, o, d, idx.eps_step, best);
        return best;
    }
    if (idx.nodes.empty()) return best;
    const Vec2 inv = safe_inverse(d);
    const float ox = static_cast<float>(o.x), oy = static_cast<float>(o.y);
    const float ix = static_cast<float>(inv.x), iy = static_cast<float>(inv.y);
#if defined(__SSE2__)
    const __m128 vox = _mm_set1_ps(ox), voy = _mm_set1_ps(oy), vix = _mm_set1_ps(ix), viy = _mm_set1_ps(iy);
#endif
    // Stack entries: node or leaf reference plus entry distance.
    struct Entry {
        std::uint32_t child, count;
        float t;
    };
    std::array<Entry, 128> stack;
    std::size_t sp = 0;
    stack[sp++] = {0, 0, 0.0f};
    while (sp > 0) {
        const Entry e = stack[--sp];
        if (static_cast<double>(e.t) > best.t) continue;
        if (e.count > 0) {
            for (std::uint32_t k = e.child; k < e.child + e.count; ++k) test_prim(idx.prims[k], k, o, d, idx.eps_step, best);
            continue;
        }
        const SceneIndex::Node& n = idx.nodes[e.child];
        const float t_max = best.t < 1e30 ? static_cast<float>(best.t) : 1e30f;
        alignas(16) float tn[4];
        int mask = 0;
#if defined(__SSE2__)
        const __m128 x0 = _mm_mul_ps(_mm_sub_ps(_mm_load_ps(n.lox), vox), vix);
        const __m128 x1 = _mm_mul_ps(_mm_sub_ps(_mm_load_ps(n.hix), vox), vix);
        const __m128 y0 = _mm_mul_ps(_mm_sub_ps(_mm_load_ps(n.loy), voy), viy);
        const __m128 y1 = _mm_mul_ps(_mm_sub_ps(_mm_load_ps(n.hiy), voy), viy);
        const __m128 a = _mm_max_ps(_mm_min_ps(x0, x1), _mm_min_ps(y0, y1));
        const __m128 b = _mm_min_ps(_mm_max_ps(x0, x1), _mm_max_ps(y0, y1));
        __m128 ok = _mm_and_ps(_mm_cmpge_ps(b, a), _mm_cmpge_ps(b, _mm_setzero_ps()));
        ok = _mm_and_ps(ok, _mm_cmple_ps(a, _mm_set1_ps(t_max)));
        ok = _mm_and_ps(ok, _mm_cmple_ps(_mm_load_ps(n.lox), _mm_load_ps(n.hix)));
        _mm_store_ps(tn, a);
        mask = _mm_movemask_ps(ok);
#else
        for (int k = 0; k < 4; ++k) {
            const float x0 = (n.lox[k] - ox) * ix, x1 = (n.hix[k] - ox) * ix;
            const float y0 = (n.loy[k] - oy) * iy, y1 = (n.hiy[k] - oy) * iy;
            const float a = std::max(std::min(x0, x1), std::min(y0, y1));
            const float b = std::min(std::max(x0, x1), std::max(y0, y1));
            tn[k] = a;
            if (b >= a && b >= 0.0f && a <= t_max && n.lox[k] <= n.hix[k]) mask |= 1 << k;
        }
#endif
        // Push far to near so the nearest child is searched first.
        int order[4], m = 0;
        for (int k = 0; k < 4; ++k)
            if (mask & (1 << k)) {
                int p = m++;
                while (p > 0 && tn[order[p - 1]] < tn[k]) {
                    order[p] = order[p - 1];
                    --p;
                }
                order[p] = k;
            }
        for (int r = 0; r < m; ++r) {
            const int k = order[r];
            stack[sp++] = {n.child[k], n.count[k], tn[k]};
        }
    }
    return best;
}

const SceneIndex& require_index(const Scene& scene) {
    if (!scene.index) throw std::logic_error("scene has no index; call finalize_scene");
    return *scene.index;
}

HitRecord make_hit(const SceneIndex& idx, const Candidate& c, const Vec2& o, const Vec2& d) {
    const Prim& p = idx.prims[c.prim];
    HitRecord h;
    h.t = c.t;
    h.point = o + d * c.t;
    h.chain = p.chain;
    h.element = p.element;
    Vec2 nrm;
    if (p.kind == 0) {
        h.param = std::clamp(dot(h.point - p.a, p.d) / norm2(p.d), 0.0, 1.0);
        nrm = normalized(perp(p.d));
    } else {
        const Vec2 v = perp(p.d);
        const Vec2 r = h.point - p.a;
        const Vec2 cc{dot(r, p.d) * p.inv_a, dot(r, v) * p.inv_b};
        h.param = wrap_from(std::atan2(cc.y, cc.x), std::atan2(p.e0.y, p.e0.x) - 1e-12);
        nrm = normalized(p.d * (cc.x * p.inv_a) + v * (cc.y * p.inv_b));
    }
    if (dot(nrm, d) > 0.0) nrm = -nrm;
    h.normal = nrm;
    h.cos_incidence = dot(d, nrm);
    h.tangency = std::fabs(h.cos_incidence) < eps_tan;
    h.corner = (p.corner0 && dist(h.point, p.p0) <= idx.snap) || (p.corner1 && dist(h.point, p.p1) <= idx.snap);
    return h;
}

void check_state(const PhasePoint& s) {
    if (!is_finite(s.q) || !is_finite(s.v)) throw std::invalid_argument("state has non-finite coordinates");
    if (std::fabs(norm(s.v) - 1.0) > 1e-9) throw std::invalid_argument("state direction must be a unit vector");
}

// Distance along d from o to the bounding circle.
double to_circle(const SceneIndex& idx, const Vec2& o, const Vec2& d) {
    const Vec2 w = o - idx.center;
    const double b = dot(w, d);
    const double c = norm2(w) - idx.radius * idx.radius;
    const double disc = b * b - c;
    if (disc <= 0.0) return 0.0;
    return std::fmax(-b + std::sqrt(disc), 0.0);
}

template <class OnHit, class OnFlight>
TraceSummary run_trace(const Scene& scene, PhasePoint s, std::size_t max_reflections, OnHit&& on_hit,
                       OnFlight&& on_flight, PhasePoint* exit) {
    check_state(s);
    const SceneIndex& idx = require_index(scene);
    TraceSummary out;
    for (;;) {
        const Candidate c = query(idx, s.q, s.v);
        if (c.t == inf) {
            const double r = to_circle(idx, s.q, s.v);
            out.length += r;
            on_flight(s.q, s.v, inf);
            out.termination = Termination::escaped;
            if (exit) *exit = {s.q + s.v * r, s.v};
            return out;
        }
        HitRecord h = make_hit(idx, c, s.q, s.v);
        on_flight(s.q, s.v, h.t);
        out.length += h.t;
        if (h.tangency || h.corner) {
            out.termination = h.corner ? Termination::corner : Termination::singular;
            on_hit(h, s.v);
            if (exit) *exit = {h.point, s.v};
            return out;
        }
        const Vec2 v_out = reflect(s.v, h.normal);
        on_hit(h, v_out);
        ++out.reflections;
        s = {h.point, v_out};
        if (out.reflections >= max_reflections) {
            out.termination = Termination::max_reflections;
            if (exit) *exit = s;
            return out;
        }
    }
}

}  // namespace

const char* to_string(Termination t) {
    switch (t) {
        case Termination::max_reflections: return "max_reflections";
        case Termination::escaped: return "escaped";
        case Termination::singular: return "singular";
        case Termination::corner: return "corner";
    }
    return "?";
}

std::size_t Trajectory::reflections() const {
    const bool last_stopped = termination == Termination::singular || termination == Termination::corner;
    return events.size() - (last_stopped && !events.empty() ? 1 : 0);
}

std::shared_ptr<const SceneIndex> build_index(const Scene& scene) {
    auto idx = std::make_shared<SceneIndex>();
    Builder b;
    for (std::size_t ci = 0; ci < scene.chains.size(); ++ci) {
        const auto& els = scene.chains[ci].elements;
        for (std::size_t k = 0; k < els.size(); ++k) {
            Prim p = make_prim(els[k].geom, ci, k);
            const ChainElement& prev = els[(k + els.size() - 1) % els.size()];
            const ChainElement& next = els[(k + 1) % els.size()];
            const bool c_start = tangent_mismatch(prev.end_tangent(), els[k].start_tangent()) > eps_ang;
            const bool c_end = tangent_mismatch(els[k].end_tangent(), next.start_tangent()) > eps_ang;
            p.corner0 = els[k].reversed ? c_end : c_start;
            p.corner1 = els[k].reversed ? c_start : c_end;
            b.prims.push_back(p);
            b.boxes.push_back(element_bounds(els[k].geom));
        }
    }
    if (b.prims.size() <= 4) {
        idx->root_leaf = true;
    } else {
        const std::uint32_t root = b.build(0, b.prims.size());
        if (b.bnodes[root].count > 0) {
            idx->root_leaf = true;
        } else {
            // Float boxes get a pad well above float rounding at the scene scale.
            Box all = b.bnodes[root].box;
            const Vec2 ext = all.extent();
            const double scale = std::max({std::fabs(all.lo.x), std::fabs(all.lo.y), std::fabs(all.hi.x),
                                           std::fabs(all.hi.y), ext.x, ext.y});
            b.collapse(root, idx->nodes, static_cast<float>(1e-5 * scale));
        }
    }
    idx->prims = std::move(b.prims);
    idx->eps_step = 1e-9 * scene.diameter;
    idx->snap = 1e-9 * (1.0 + scene.diameter);
    idx->open = scene.kind == SceneKind::open_obstacles;
    idx->center = scene.center;
    idx->radius = scene.bounding_radius;
    return idx;
}

Vec2 reflect(const Vec2& v, const Vec2& nu) { return normalized(v - nu * (2.0 * dot(v, nu))); }

std::optional<HitRecord> first_hit(const Scene& scene, const PhasePoint& state) {
    check_state(state);
    const SceneIndex& idx = require_index(scene);
    const Candidate c = query(idx, state.q, state.v);
    if (c.t == inf) return std::nullopt;
    return make_hit(idx, c, state.q, state.v);
}

Trajectory trace(const Scene& scene, const PhasePoint& state, std::size_t max_reflections) {
    Trajectory tr;
    tr.start = state;
    tr.exit = state;
    if (max_reflections == 0) {
        check_state(state);
        return tr;
    }
    const TraceSummary s = run_trace(
        scene, state, max_reflections, [&](const HitRecord& h, const Vec2& v) { tr.events.push_back({h, v}); },
        [](const Vec2&, const Vec2&, double) {}, &tr.exit);
    tr.termination = s.termination;
    tr.length = s.length;
    return tr;
}

TraceSummary trace_summary(const Scene& scene, const PhasePoint& state, std::size_t max_reflections,
                           const FlightVisitor* visitor) {
    if (max_reflections == 0) {
        check_state(state);
        return {};
    }
    const auto noop_hit = [](const HitRecord&, const Vec2&) {};
    if (visitor) {
        return run_trace(scene, state, max_reflections, noop_hit,
                         [&](const Vec2& q, const Vec2& v, double len) { (*visitor)(q, v, len); }, nullptr);
    }
    return run_trace(scene, state, max_reflections, noop_hit, [](const Vec2&, const Vec2&, double) {}, nullptr);
}

std::vector<bool> flight_crossings(const Trajectory& traj, const ConvexBody& body) {
    std::vector<bool> out;
    Vec2 from = traj.start.q;
    for (const auto& e : traj.events) {
        out.push_back(segment_crosses_body(body, from, e.hit.point));
        from = e.hit.point;
    }
    if (traj.termination == Termination::escaped) out.push_back(segment_crosses_body(body, from, traj.exit.q));
    return out;
}

}  // namespace strbill
