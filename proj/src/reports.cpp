#include "strbill/reports.hpp"

#include <cstdio>

#include "json.hpp"

namespace strbill {

using ojson = nlohmann::ordered_json;

namespace {

ojson vec(const Vec2& p) { return ojson::array({p.x, p.y}); }

ojson grid_json(const GridSpec& g) {
    ojson j;
    j["origin"] = vec(g.origin);
    j["cell"] = vec(g.cell);
    j["nx"] = g.nx;
    j["ny"] = g.ny;
    return j;
}

ojson report_json(const VerifyReport& r) {
    ojson j;
    j["suite"] = r.suite;
    j["subject"] = r.subject;
    j["seed"] = r.seed;
    j["pass"] = r.pass();
    ojson checks = ojson::array();
    for (const auto& c : r.checks) {
        ojson cj;
        cj["name"] = c.name;
        cj["pass"] = c.pass;
        cj["samples"] = c.samples;
        cj["violations"] = c.violations;
        cj["max_violation"] = c.max_violation;
        cj["tolerance"] = c.tolerance;
        checks.push_back(cj);
    }
    j["checks"] = checks;
    ojson values = ojson::object();
    for (const auto& [k, v] : r.values) values[k] = v;
    j["values"] = values;
    return j;
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

std::string hex(std::uint64_t x) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
    return buf;
}

}  // namespace

std::uint64_t counts_digest(const std::vector<std::uint32_t>& counts) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint32_t c : counts)
        for (int b = 0; b < 4; ++b) {
            h ^= (c >> (8 * b)) & 0xffu;
            h *= 0x100000001b3ULL;
        }
    return h;
}

std::string to_json(const VerifyReport& r) { return dump(report_json(r)); }

std::string to_json(const std::vector<VerifyReport>& reports) {
    ojson j;
    bool pass = true;
    ojson arr = ojson::array();
    for (const auto& r : reports) {
        pass = pass && r.pass();
        arr.push_back(report_json(r));
    }
    j["pass"] = pass;
    j["reports"] = arr;
    return dump(j);
}

std::string to_json(const Trajectory& t) {
    ojson j;
    j["start"] = {{"q", vec(t.start.q)}, {"v", vec(t.start.v)}};
    ojson events = ojson::array();
    for (const auto& e : t.events) {
        ojson ej;
        ej["point"] = vec(e.hit.point);
        ej["chain"] = e.hit.chain;
        ej["element"] = e.hit.element;
        ej["v_out"] = vec(e.v_out);
        events.push_back(ej);
    }
    j["events"] = events;
    j["reflections"] = t.reflections();
    j["termination"] = to_string(t.termination);
    j["exit"] = {{"q", vec(t.exit.q)}, {"v", vec(t.exit.v)}};
    j["length"] = t.length;
    return dump(j);
}

namespace {

ojson point_json(const PointClass& c) {
    ojson j;
    j["q"] = vec(c.q);
    j["label"] = to_string(c.label);
    j["n_samples"] = c.n_samples;
    j["trapped"] = c.trapped;
    j["stopped"] = c.stopped;
    j["trapped_fraction"] = c.trapped_fraction;
    j["seed"] = c.seed;
    j["cutoff"] = c.cutoff;
    return j;
}

}  // namespace

std::string to_json(const PointClass& c) { return dump(point_json(c)); }

std::string to_json(const RegionScan& s) {
    ojson j;
    j["grid"] = grid_json(s.grid);
    j["n_dirs"] = s.n_dirs;
    j["cutoff"] = s.cutoff;
    j["seed"] = s.seed;
    j["counts"] = {{"free", s.count(PointLabel::free)},
                   {"mixed", s.count(PointLabel::mixed)},
                   {"hidden", s.count(PointLabel::hidden)}};
    j["samples"] = s.samples;
    j["stopped"] = s.stopped;
    j["stopped_rate"] = s.stopped_rate();
    ojson cells = ojson::array();
    for (std::size_t k = 0; k < s.cells.size(); ++k) {
        if (!s.cells[k]) continue;
        cells.push_back(ojson::array({k % s.grid.nx, k / s.grid.nx, to_string(s.cells[k]->label), s.cells[k]->trapped}));
    }
    j["cells"] = cells;
    return dump(j);
}

std::string to_json(const IlluminationMap& m) {
    ojson j;
    j["grid"] = grid_json(m.grid);
    j["candle"] = vec(m.candle);
    j["n_rays"] = m.n_rays;
    j["cutoff"] = m.cutoff;
    j["seed"] = m.seed;
    j["visited"] = m.visited();
    j["stopped"] = m.stopped;
    j["counts_fnv1a"] = hex(counts_digest(m.counts));
    bool some_dark = false;
    ojson hidden = ojson::array();
    for (const auto& d : m.hidden) {
        some_dark = some_dark || d.all_dark();
        std::uint64_t hits = 0;
        for (auto h : d.hits) hits += h;
        ojson dj;
        dj["name"] = d.name;
        dj["cells"] = d.cells.size();
        dj["dark"] = d.dark.size();
        dj["hits"] = hits;
        dj["all_dark"] = d.all_dark();
        hidden.push_back(dj);
    }
    j["hidden"] = hidden;
    j["some_cap_dark"] = some_dark;
    return dump(j);
}

std::string to_text(const Trajectory& t) {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "start (%.9g, %.9g) dir (%.9g, %.9g)\n", t.start.q.x, t.start.q.y, t.start.v.x,
                  t.start.v.y);
    out += buf;
    for (std::size_t k = 0; k < t.events.size(); ++k) {
        const auto& e = t.events[k];
        std::snprintf(buf, sizeof buf, "%6zu  (%.9g, %.9g) chain %zu element %zu\n", k + 1, e.hit.point.x, e.hit.point.y,
                      e.hit.chain, e.hit.element);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "%s after %zu reflections, length %.9g, exit (%.9g, %.9g)\n",
                  to_string(t.termination), t.reflections(), t.length, t.exit.q.x, t.exit.q.y);
    out += buf;
    return out;
}

std::string to_text(const PointClass& c) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "(%.9g, %.9g): %s, %zu of %zu directions trapped, %zu stopped\n", c.q.x, c.q.y,
                  to_string(c.label), c.trapped, c.n_samples, c.stopped);
    return buf;
}

std::string to_text(const RegionScan& s) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "grid %zux%zu, %zu directions, cutoff %zu: free %zu, mixed %zu, hidden %zu, stopped rate %.3e\n",
                  s.grid.nx, s.grid.ny, s.n_dirs, s.cutoff, s.count(PointLabel::free), s.count(PointLabel::mixed),
                  s.count(PointLabel::hidden), s.stopped_rate());
    return buf;
}

std::string to_text(const IlluminationMap& m) {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "candle (%.9g, %.9g), %zu rays, cutoff %zu: %zu of %zu cells visited, %zu stopped\n",
                  m.candle.x, m.candle.y, m.n_rays, m.cutoff, m.visited(), m.counts.size(), m.stopped);
    out += buf;
    for (const auto& d : m.hidden) {
        std::snprintf(buf, sizeof buf, "  %s: %zu of %zu cells dark%s\n", d.name.c_str(), d.dark.size(), d.cells.size(),
                      d.all_dark() ? " (entirely dark)" : "");
        out += buf;
    }
    return out;
}

}  // namespace strbill
