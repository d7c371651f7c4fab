#include "strbill/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "strbill/dynamics.hpp"
#include "strbill/parallel.hpp"

namespace strbill {

void CheckRecord::observe(double deviation) {
    ++samples;
    if (deviation > max_violation || std::isnan(deviation)) max_violation = deviation;
    if (!(deviation <= tolerance)) ++violations;
    pass = violations == 0;
}

bool VerifyReport::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.pass; });
}

CheckRecord& VerifyReport::add(const std::string& name, double tolerance) {
    checks.push_back({name, 0, 0, 0.0, tolerance, false});
    return checks.back();
}

const CheckRecord* VerifyReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

std::string to_text(const VerifyReport& r) {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "suite %s (%s) seed %llu: %s in %.2f s\n", r.suite.c_str(), r.subject.c_str(),
                  static_cast<unsigned long long>(r.seed), r.pass() ? "PASS" : "FAIL", r.wall_time);
    out += buf;
    for (const auto& c : r.checks) {
        std::snprintf(buf, sizeof buf, "  %s %-22s samples %-8zu violations %-6zu max %.3e tol %.1e\n",
                      c.pass ? "pass" : "FAIL", c.name.c_str(), c.samples, c.violations, c.max_violation, c.tolerance);
        out += buf;
    }
    for (const auto& [k, v] : r.values) {
        std::snprintf(buf, sizeof buf, "  value %-20s %.12g\n", k.c_str(), v);
        out += buf;
    }
    return out;
}

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string describe(const ConvexBody& body) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s with %zu vertices", to_string(body.kind), body.size());
    return buf;
}

// Distance from p to the nearest extension ray of an edge of H.
double ray_clearance(const ConvexBody& b, const Vec2& p) {
    double best = INFINITY;
    if (b.kind == BodyKind::point) return best;
    for (std::size_t i = 0; i < b.size(); ++i) {
        const Vec2 v0 = b.vertices[i];
        const Vec2 v1 = b.vertex(static_cast<std::ptrdiff_t>(i) + 1);
        const Vec2 d = b.edge_dir[i];
        const double s1 = std::max(0.0, dot(p - v1, d)), s0 = std::max(0.0, dot(p - v0, -d));
        best = std::min({best, dist(p, v1 + d * s1), dist(p, v0 - d * s0)});
    }
    return best;
}

double menger(const Vec2& a, const Vec2& b, const Vec2& c) {
    return 2.0 * std::fabs(cross(b - a, c - a)) / (dist(a, b) * dist(b, c) * dist(a, c));
}

// Golden-section search for a maximum of f on [a, b]; returns {x, f(x)}.
template <class F>
std::pair<double, double> maximize(F&& f, double a, double b) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 80 && b - a > 1e-15 * (1.0 + std::fabs(a)); ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        }
    }
    return f1 > f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

// Indices of the k largest local maxima of a cyclic sample sequence.
std::vector<std::size_t> top_peaks(const std::vector<double>& v, std::size_t k) {
    const std::size_t n = v.size();
    std::vector<std::size_t> peaks;
    for (std::size_t i = 0; i < n; ++i)
        if (v[i] >= v[(i + n - 1) % n] && v[i] >= v[(i + 1) % n]) peaks.push_back(i);
    std::sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b] || (v[a] == v[b] && a < b); });
    if (peaks.size() > k) peaks.resize(k);
    return peaks;
}

// Outcome of one traced split sample.
struct SplitSample {
    bool omega1{false};
    bool violated{false};
    bool left{false};
    bool stopped{false};
    double worst{0.0};
    std::size_t flights{0};
};

Vec2 random_direction(SplitMix64& rng) { return unit(two_pi * rng.uniform()); }

// Line through H: two uniform boundary points when they span a chord, else a
// uniform direction through the first one.
std::pair<Vec2, Vec2> chord_through(const ConvexBody& body, SplitMix64& rng) {
    const Vec2 p1 = point_at(body, rng.uniform() * body.L);
    const Vec2 p2 = point_at(body, rng.uniform() * body.L);
    if (body.kind == BodyKind::polygon && dist(p1, p2) > body.eps) {
        const Vec2 d = normalized(p2 - p1);
        if (line_depth(body, p1, d) > body.eps) return {p1, d};
    }
    return {p1, random_direction(rng)};
}

SplitSample split_sample(const Scene& scene, std::size_t i, bool omega1, std::size_t N, std::uint64_t seed) {
    const ConvexBody& body = scene.bodies.front();
    SplitMix64 rng = substream(seed, i);
    PhasePoint start;
    bool found = false;
    for (int attempt = 0; attempt < 100000 && !found; ++attempt) {
        if (omega1) {
            const auto [p, d] = chord_through(body, rng);
            const auto fwd = first_hit(scene, {p, d});
            const auto back = first_hit(scene, {p, -d});
            if (!fwd || !back) continue;
            const double w = rng.uniform();
            start = {p + d * (-back->t + w * (fwd->t + back->t)), d};
            found = w > 0.0;
        } else {
            const double R = scene.bounding_radius;
            const Vec2 q{scene.center.x + R * (2.0 * rng.uniform() - 1.0), scene.center.y + R * (2.0 * rng.uniform() - 1.0)};
            const Vec2 v = random_direction(rng);
            if (in_forbidden(scene, q) || contains(body, q) != Containment::outside) continue;
            if (line_depth(body, q, v) >= 0.0) continue;
            start = {q, v};
            found = true;
        }
    }
    if (!found) throw std::runtime_error("verify_split: state sampler failed");

    SplitSample s;
    s.omega1 = omega1;
    const Trajectory tr = trace(scene, start, N);
    const auto check = [&](const Vec2& p, const Vec2& v) {
        const double depth = line_depth(body, p, v);
        const double dev = omega1 ? std::max(0.0, -depth) : std::max(0.0, depth);
        s.worst = std::max(s.worst, dev);
        if (dev > split_margin) s.violated = true;
        ++s.flights;
    };
    check(start.q, start.v);
    const std::size_t refl = tr.reflections();
    for (std::size_t k = 0; k < refl; ++k) check(tr.events[k].hit.point, tr.events[k].v_out);
    s.left = tr.termination == Termination::escaped;
    s.stopped = tr.termination == Termination::singular || tr.termination == Termination::corner;
    return s;
}

void recompute_offsets(TableBoundary& t) {
    t.offsets.assign(1, 0.0);
    for (const auto& a : t.arcs) t.offsets.push_back(t.offsets.back() + arc_length(a, a.s0, a.s1));
    t.total_len = t.offsets.back();
}

}  // namespace

VerifyReport verify_split(const Scene& scene, std::size_t n, std::size_t N, std::uint64_t seed, unsigned threads) {
    if (scene.kind != SceneKind::closed_table || !scene.table || scene.bodies.size() != 1)
        throw std::invalid_argument("verify_split needs a mushroom table");
    if (n < 2) throw std::invalid_argument("verify_split needs at least two samples");
    const auto t0 = clock_type::now();
    VerifyReport r;
    r.suite = "split";
    r.subject = describe(scene.bodies.front());
    r.seed = seed;

    const std::size_t n1 = n / 2;
    std::vector<SplitSample> samples(n);
    parallel_for(n, threads, 16, [&](std::size_t i, unsigned) { samples[i] = split_sample(scene, i, i < n1, N, seed); });

    r.add("omega1_crosses_H", split_margin);
    r.add("omega2_misses_H", split_margin);
    std::size_t left = 0, stopped = 0, flights = 0;
    for (const auto& s : samples) {
        (s.omega1 ? r.checks[0] : r.checks[1]).observe(s.worst);
        left += s.left;
        stopped += s.stopped;
        flights += s.flights;
    }
    CheckRecord& stay = r.add("stays_in_table", 0.0);
    stay.samples = n;
    stay.violations = left;
    stay.max_violation = static_cast<double>(left);
    stay.pass = left == 0;
    r.add("stopped_rate", 1e-3).observe(static_cast<double>(stopped) / static_cast<double>(n));
    r.checks.back().samples = n;
    r.values.push_back({"flights", static_cast<double>(flights)});
    r.values.push_back({"stopped", static_cast<double>(stopped)});
    r.wall_time = seconds_since(t0);
    return r;
}

VerifyReport verify_geometry(const TableBoundary& table, std::size_t n, std::uint64_t seed) {
    if (table.arcs.empty()) throw std::invalid_argument("verify_geometry: empty table");
    const auto t0 = clock_type::now();
    VerifyReport r;
    r.suite = "geometry";
    r.subject = describe(table.body);
    r.seed = seed;
    const ConvexBody& body = table.body;
    const std::size_t na = table.arcs.size();
    const double scale = 1.0 + body.diameter + table.lam;
    SplitMix64 rng = substream(seed, 0);

    const double md = min_distance(table);
    r.add("min_distance", body.eps).observe(std::max(0.0, table.lam - md));
    r.values.push_back({"min_distance", md});

    // Every arc midpoint plus n uniform boundary points.
    {
        CheckRecord& c = r.add("level_set", 1e-9 * table.level());
        for (const auto& a : table.arcs) c.observe(std::fabs(potential(body, a.point(a.s0 + 0.5 * a.span())).phi - table.level()));
        for (std::size_t k = 0; k < n; ++k)
            c.observe(std::fabs(potential(body, boundary_eval(table, rng.uniform() * table.total_len).point).phi -
                                table.level()));
    }
    {
        r.add("closed_chain", 1e-9 * scale);
        r.add("c1_junctions", 1e-9);
        for (std::size_t k = 0; k < na; ++k) {
            const auto& a = table.arcs[k];
            const auto& b = table.arcs[(k + 1) % na];
            r.checks[r.checks.size() - 2].observe(dist(a.end(), b.start()));
            r.checks.back().observe(std::fabs(std::remainder(angle_of(a.tangent(a.s1)) - angle_of(b.tangent(b.s0)), two_pi)));
        }
        r.values.push_back({"junctions", static_cast<double>(na)});
    }
    {
        CheckRecord& mono = r.add("turning_increasing", 0.0);
        double total = 0.0;
        for (const auto& a : table.arcs) {
            double prev = angle_of(a.tangent(a.s0));
            for (int q = 1; q <= 32; ++q) {
                const double cur = angle_of(a.tangent(a.s0 + a.span() * q / 32));
                const double d = std::remainder(cur - prev, two_pi);
                mono.observe(d > 0.0 ? 0.0 : std::max(-d, 1e-300));
                total += d;
                prev = cur;
            }
        }
        r.add("total_turning", 1e-6).observe(std::fabs(total - two_pi));
        r.values.push_back({"total_turning", total});
    }
    {
        // Menger curvature of three nearby points, away from junctions.
        CheckRecord& c = r.add("curvature", 1e-4);
        std::size_t tries = 0;
        while (c.samples < n && tries++ < 100 * n) {
            const double tau = rng.uniform() * table.total_len;
            const auto m = boundary_eval(table, tau);
            const double len = table.offsets[m.arc + 1] - table.offsets[m.arc];
            const double h = std::min(1e-3 * scale, 0.1 * len);
            const double local = tau - table.offsets[m.arc];
            if (local < 2.0 * h || len - local < 2.0 * h) continue;
            const double km = menger(boundary_eval(table, tau - h).point, m.point, boundary_eval(table, tau + h).point);
            c.observe(std::fabs(km - m.curvature) / m.curvature);
        }
    }
    {
        CheckRecord& c = r.add("potential_gradient", 1e-5);
        const double e = 1e-6 * scale;
        for (std::size_t k = 0; k < n; ++k) {
            const Vec2 p = boundary_eval(table, rng.uniform() * table.total_len).point;
            const auto ev = potential(body, p);
            const Vec2 fd{(potential(body, p + Vec2{e, 0}).phi - potential(body, p - Vec2{e, 0}).phi) / (2 * e),
                          (potential(body, p + Vec2{0, e}).phi - potential(body, p - Vec2{0, e}).phi) / (2 * e)};
            c.observe(dist(fd, ev.grad));
        }
    }
    r.wall_time = seconds_since(t0);
    return r;
}

VerifyReport verify_inverse_maps(const ConvexBody& body, std::size_t n, std::uint64_t seed) {
    const auto t0 = clock_type::now();
    VerifyReport r;
    r.suite = "inverse";
    r.subject = describe(body);
    r.seed = seed;
    const double scale = 1.0 + body.diameter;
    SplitMix64 rng = substream(seed, 0);

    r.add("grad_u_plus", 1e-5);
    r.add("grad_u_minus", 1e-5);
    r.add("round_trip", body.eps);
    const Box b = body.bounds();
    const double pad = 2.0 * scale;
    const double clearance = 1e-3 * scale;
    const double e = 1e-6 * scale;
    std::size_t tries = 0, accepted = 0;
    while (accepted < n && tries++ < 1000 * n) {
        const Vec2 p{b.lo.x - pad + rng.uniform() * (b.hi.x - b.lo.x + 2 * pad),
                     b.lo.y - pad + rng.uniform() * (b.hi.y - b.lo.y + 2 * pad)};
        if (contains(body, p) != Containment::outside || distance_to_body(body, p) < clearance ||
            ray_clearance(body, p) < clearance)
            continue;
        ++accepted;
        const auto f = supporting_rays(body, p);
        const auto up = [&](const Vec2& q) { return supporting_rays(body, q).u_plus; };
        const auto um = [&](const Vec2& q) { return supporting_rays(body, q).u_minus; };
        const Vec2 dx{e, 0}, dy{0, e};
        const Vec2 g_plus{(up(p + dx) - up(p - dx)) / (2 * e), (up(p + dy) - up(p - dy)) / (2 * e)};
        const Vec2 g_minus{(um(p + dx) - um(p - dx)) / (2 * e), (um(p + dy) - um(p - dy)) / (2 * e)};
        r.checks[0].observe(dist(g_plus, unit(f.theta_plus)));
        r.checks[1].observe(dist(g_minus, unit(f.theta_minus)));
        r.checks[2].observe(std::max(dist(rope_point(body, f.u_plus, f.theta_plus), p),
                                     dist(rope_point(body, f.u_minus, f.theta_minus), p)));
    }

    CheckRecord& hd = r.add("h_differential", 1e-5);
    tries = 0;
    while (hd.samples < n && tries++ < 1000 * n) {
        const double theta = body.theta0() + two_pi * rng.uniform();
        const ParamInterval tt = body.kind == BodyKind::point ? ParamInterval{} : param_of_angle(body, theta);
        if (!tt.singleton()) continue;
        bool near_edge = false;
        for (double ea : body.edge_angle) near_edge |= std::fabs(std::remainder(ea - theta, two_pi)) < 1e-4;
        if (near_edge) continue;
        const double off = (0.1 + 3.0 * rng.uniform()) * scale;
        const double u = tt.lo + (rng.uniform() < 0.5 ? -off : off);
        const auto h = h_differential(body, u, theta);
        const Vec2 du = (rope_point(body, u + e, theta) - rope_point(body, u - e, theta)) / (2 * e);
        const Vec2 dth = (rope_point(body, u, theta + 1e-6) - rope_point(body, u, theta - 1e-6)) / 2e-6;
        hd.observe(std::max(dist(du, h.M_lo.col0()), dist(dth, h.M_lo.col1())));
    }
    r.wall_time = seconds_since(t0);
    return r;
}

double hausdorff_to_body(const TableBoundary& table) {
    constexpr std::size_t samples = 2048;
    const ConvexBody& body = table.body;
    const double T = table.total_len;
    const double dtau = T / samples;
    const auto k_point = [&](double tau) { return boundary_eval(table, tau).point; };

    // Table to H: distance to H is exact; refine the largest sampled values.
    std::vector<Vec2> kp(samples);
    std::vector<double> fk(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        kp[i] = k_point(dtau * static_cast<double>(i));
        fk[i] = distance_to_boundary(body, kp[i]);
    }
    const auto fk_at = [&](double tau) { return distance_to_boundary(body, k_point(tau)); };
    double best = *std::max_element(fk.begin(), fk.end());
    for (std::size_t i : top_peaks(fk, 4)) {
        const double c = dtau * static_cast<double>(i);
        best = std::max(best, maximize(fk_at, c - dtau, c + dtau).second);
    }

    // H to table: nearest table sample, then a local minimization along the table.
    const auto nearest = [&](const Vec2& h) {
        std::size_t j = 0;
        double dj = INFINITY;
        for (std::size_t i = 0; i < samples; ++i) {
            const double d = dist(h, kp[i]);
            if (d < dj) {
                dj = d;
                j = i;
            }
        }
        const double c = dtau * static_cast<double>(j);
        return std::min(dj, -maximize([&](double tau) { return -dist(h, k_point(tau)); }, c - dtau, c + dtau).second);
    };
    if (body.kind == BodyKind::point) return std::max(best, nearest(body.vertices[0]));
    const double dt = body.L / samples;
    std::vector<double> gh(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        const Vec2 h = point_at(body, dt * static_cast<double>(i));
        double dj = INFINITY;
        for (const auto& q : kp) dj = std::min(dj, dist(h, q));
        gh[i] = dj;
    }
    const auto gh_at = [&](double t) { return nearest(point_at(body, std::fmod(t + body.L, body.L))); };
    for (std::size_t i : top_peaks(gh, 4)) {
        const double c = dt * static_cast<double>(i);
        best = std::max({best, gh_at(c), maximize(gh_at, c - dt, c + dt).second});
    }
    return best;
}

VerifyReport verify_limit(const ConvexBody& body, const std::vector<double>& lambdas, double bound) {
    if (lambdas.empty()) throw std::invalid_argument("verify_limit needs at least one lambda");
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
        if (!(lambdas[k] > 0.0) || !std::isfinite(lambdas[k]))
            throw std::invalid_argument("verify_limit: lambdas must be positive");
        if (k > 0 && !(lambdas[k] < lambdas[k - 1]))
            throw std::invalid_argument("verify_limit: lambdas must be strictly decreasing");
    }
    const auto t0 = clock_type::now();
    VerifyReport r;
    r.suite = "limit";
    r.subject = describe(body);
    const double last = lambdas.back();
    if (!(bound > 0.0)) bound = 2.0 * std::sqrt(last * 0.5 * body.L + last * last) + last;

    std::vector<double> d;
    for (double lam : lambdas) {
        d.push_back(hausdorff_to_body(level_curve(body, lam)));
        char key[64];
        std::snprintf(key, sizeof key, "d_H(lambda=%g)", lam);
        r.values.push_back({key, d.back()});
    }
    CheckRecord& dec = r.add("strictly_decreasing", 0.0);
    for (std::size_t k = 1; k < d.size(); ++k) dec.observe(d[k] < d[k - 1] ? 0.0 : std::max(d[k] - d[k - 1], 1e-300));
    r.add("final_bound", bound).observe(d.back());
    r.wall_time = seconds_since(t0);
    return r;
}

TableBoundary inflate_arc(const TableBoundary& table, std::size_t k, double delta) {
    if (k >= table.arcs.size()) throw std::invalid_argument("inflate_arc: arc index out of range");
    TableBoundary t = table;
    t.arcs[k].two_a += delta;
    recompute_offsets(t);
    return t;
}

Scene inflate_arc(const Scene& mushroom, std::size_t k, double delta) {
    if (!mushroom.table) throw std::invalid_argument("inflate_arc needs a mushroom table");
    Scene s = mushroom;
    s.table = inflate_arc(*mushroom.table, k, delta);
    s.chains.at(0).elements.at(k).geom = s.table->arcs[k];
    finalize_scene(s);
    return s;
}

}  // namespace strbill
