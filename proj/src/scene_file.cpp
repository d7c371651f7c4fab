#include "strbill/scene_file.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <regex>
#include <set>

#include "json.hpp"
#include "strbill/dynamics.hpp"

namespace strbill {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

SceneFileError::SceneFileError(std::size_t line, std::string field, const std::string& message)
    : std::invalid_argument((line ? "line " + std::to_string(line) + ": " : std::string()) +
                            (field.empty() ? std::string() : field + ": ") + message),
      line_(line),
      field_(std::move(field)) {}

const char* to_string(BodyShape s) {
    switch (s) {
        case BodyShape::polygon: return "polygon";
        case BodyShape::point: return "point";
        case BodyShape::segment: return "segment";
        case BodyShape::regular_ngon: return "regular_ngon";
    }
    return "?";
}

const char* to_string(ConstructionType t) {
    switch (t) {
        case ConstructionType::mushroom: return "mushroom";
        case ConstructionType::livshits: return "livshits";
        case ConstructionType::penrose: return "penrose";
    }
    return "?";
}

ConvexBody BodySpec::build() const {
    switch (shape) {
        case BodyShape::polygon:
            if (vertices.empty()) throw std::invalid_argument("polygon body needs at least one vertex");
            return make_body(vertices);
        case BodyShape::point: return make_body({center});
        case BodyShape::segment: {
            if (!(length > 0.0)) throw std::invalid_argument("segment length must be positive");
            const Vec2 h = unit(angle) * (0.5 * length);
            return make_body({center - h, center + h});
        }
        case BodyShape::regular_ngon: {
            if (n < 3) throw std::invalid_argument("regular_ngon needs n >= 3");
            if (!(radius > 0.0)) throw std::invalid_argument("regular_ngon radius must be positive");
            std::vector<Vec2> pts(n);
            for (std::size_t k = 0; k < n; ++k)
                pts[k] = center + unit(angle + two_pi * static_cast<double>(k) / static_cast<double>(n)) * radius;
            return make_body(pts);
        }
    }
    throw std::invalid_argument("unknown body shape");
}

namespace {

// ---------------------------------------------------------------------------
// Source lines of every value, keyed by dotted path. The text has already
// been accepted by the JSON parser, so the scan only tracks structure.

using LineMap = std::map<std::string, std::size_t>;

struct LineScanner {
    const std::string& s;
    std::size_t i{0};
    std::size_t line{1};
    LineMap& out;

    void ws() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) {
            if (s[i] == '\n') ++line;
            ++i;
        }
    }
    std::string str() {
        std::string r;
        ++i;  // opening quote
        while (i < s.size() && s[i] != '"') {
            if (s[i] == '\\' && i + 1 < s.size()) ++i;
            r += s[i++];
        }
        ++i;
        return r;
    }
    void value(const std::string& path) {
        ws();
        if (i >= s.size()) return;
        out.emplace(path, line);
        const char c = s[i];
        if (c == '{') {
            ++i;
            for (;;) {
                ws();
                if (i >= s.size() || s[i] == '}') break;
                if (s[i] == ',') {
                    ++i;
                    continue;
                }
                const std::size_t key_line = line;
                const std::string key = str();
                const std::string sub = path.empty() ? key : path + "." + key;
                ws();
                ++i;  // colon
                value(sub);
                out[sub] = key_line;
            }
            ++i;
        } else if (c == '[') {
            ++i;
            std::size_t k = 0;
            for (;;) {
                ws();
                if (i >= s.size() || s[i] == ']') break;
                if (s[i] == ',') {
                    ++i;
                    continue;
                }
                value(path + "[" + std::to_string(k++) + "]");
            }
            ++i;
        } else if (c == '"') {
            str();
        } else {
            while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != ',' && s[i] != '}' &&
                   s[i] != ']')
                ++i;
        }
    }
};

// Field lookup falls back to the nearest enclosing value.
std::size_t line_of(const LineMap* lines, std::string field) {
    if (!lines) return 0;
    for (;;) {
        if (auto it = lines->find(field); it != lines->end()) return it->second;
        const std::size_t cut = field.find_last_of(".[");
        if (cut == std::string::npos || cut == 0) break;
        field.resize(cut);
    }
    auto it = lines->find("");
    return it == lines->end() ? 0 : it->second;
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t k) { return path + "[" + std::to_string(k) + "]"; }

struct Reader {
    const LineMap* lines;

    [[noreturn]] void fail(const std::string& field, const std::string& msg) const {
        throw SceneFileError(line_of(lines, field), field, msg);
    }

    double number(const json& v, const std::string& f) const {
        if (!v.is_number()) fail(f, "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) fail(f, "must be finite");
        return x;
    }
    double positive(const json& v, const std::string& f) const {
        const double x = number(v, f);
        if (!(x > 0.0)) fail(f, "must be positive");
        return x;
    }
    std::uint64_t count(const json& v, const std::string& f) const {
        if (!v.is_number_integer()) fail(f, "expected a non-negative integer");
        if (!v.is_number_unsigned()) fail(f, "must be non-negative");
        return v.get<std::uint64_t>();
    }
    std::size_t positive_count(const json& v, const std::string& f) const {
        const std::uint64_t n = count(v, f);
        if (n == 0) fail(f, "must be at least 1");
        return static_cast<std::size_t>(n);
    }
    bool boolean(const json& v, const std::string& f) const {
        if (!v.is_boolean()) fail(f, "expected true or false");
        return v.get<bool>();
    }
    std::string string(const json& v, const std::string& f) const {
        if (!v.is_string()) fail(f, "expected a string");
        return v.get<std::string>();
    }
    std::string color(const json& v, const std::string& f) const {
        static const std::regex re("#[0-9a-fA-F]{3}|#[0-9a-fA-F]{6}|[a-z]+|none");
        const std::string c = string(v, f);
        if (!std::regex_match(c, re)) fail(f, "expected #rgb, #rrggbb or a color name");
        return c;
    }
    Vec2 vec2(const json& v, const std::string& f) const {
        if (!v.is_array() || v.size() != 2) fail(f, "expected [x, y]");
        return {number(v[0], index(f, 0)), number(v[1], index(f, 1))};
    }
    const json& array(const json& v, const std::string& f) const {
        if (!v.is_array()) fail(f, "expected an array");
        return v;
    }
};

// One JSON object with strict key checking.
class Obj {
public:
    Obj(const Reader& r, const json& j, std::string path) : r_(r), j_(j), path_(std::move(path)) {
        if (!j.is_object()) r.fail(path_, "expected an object");
    }

    const std::string& path() const { return path_; }
    std::string field(const std::string& key) const { return join(path_, key); }
    bool has(const std::string& key) const { return j_.contains(key); }

    const json* opt(const std::string& key) {
        used_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }
    const json& req(const std::string& key) {
        const json* v = opt(key);
        if (!v) r_.fail(field(key), "required field is missing");
        return *v;
    }
    // Rejects every key not read so far.
    void finish(const std::string& context = "") const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key()))
                r_.fail(field(it.key()), context.empty() ? "unknown field" : "unknown field for " + context);
    }

private:
    const Reader& r_;
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

BodySpec read_body(const Reader& r, const json& j, const std::string& path, const std::string& default_name) {
    Obj o(r, j, path);
    BodySpec b;
    b.name = default_name;
    if (const json* v = o.opt("name")) {
        b.name = r.string(*v, o.field("name"));
        if (b.name.empty()) r.fail(o.field("name"), "must not be empty");
    }
    const std::string shape = r.string(o.req("shape"), o.field("shape"));
    if (shape == "polygon") {
        b.shape = BodyShape::polygon;
        const json& vs = r.array(o.req("vertices"), o.field("vertices"));
        if (vs.empty()) r.fail(o.field("vertices"), "needs at least one vertex");
        for (std::size_t k = 0; k < vs.size(); ++k) b.vertices.push_back(r.vec2(vs[k], index(o.field("vertices"), k)));
    } else if (shape == "point") {
        b.shape = BodyShape::point;
        if (const json* v = o.opt("center")) b.center = r.vec2(*v, o.field("center"));
    } else if (shape == "segment") {
        b.shape = BodyShape::segment;
        b.length = r.positive(o.req("length"), o.field("length"));
        if (const json* v = o.opt("center")) b.center = r.vec2(*v, o.field("center"));
        if (const json* v = o.opt("angle")) b.angle = r.number(*v, o.field("angle"));
    } else if (shape == "regular_ngon") {
        b.shape = BodyShape::regular_ngon;
        b.n = static_cast<std::size_t>(r.count(o.req("n"), o.field("n")));
        if (b.n < 3) r.fail(o.field("n"), "must be at least 3");
        b.radius = r.positive(o.req("radius"), o.field("radius"));
        if (const json* v = o.opt("center")) b.center = r.vec2(*v, o.field("center"));
        if (const json* v = o.opt("angle")) b.angle = r.number(*v, o.field("angle"));
    } else {
        r.fail(o.field("shape"), "expected polygon, point, segment or regular_ngon, got '" + shape + "'");
    }
    o.finish("shape " + shape);
    return b;
}

AnchorLine read_anchor(const Reader& r, const json& j, const std::string& path) {
    Obj o(r, j, path);
    AnchorLine a;
    a.point = r.vec2(o.req("point"), o.field("point"));
    a.direction = r.vec2(o.req("direction"), o.field("direction"));
    if (norm2(a.direction) == 0.0) r.fail(o.field("direction"), "must be nonzero");
    o.finish();
    return a;
}

ClosureSpec read_closure(const Reader& r, const json& j, const std::string& path) {
    Obj o(r, j, path);
    ClosureSpec c;
    if (const json* v = o.opt("steps")) {
        const std::string f = o.field("steps");
        r.array(*v, f);
        for (std::size_t k = 0; k < v->size(); ++k) {
            Obj s(r, (*v)[k], index(f, k));
            PathStep step;
            const std::string kind = r.string(s.req("kind"), s.field("kind"));
            step.to = r.vec2(s.req("to"), s.field("to"));
            if (kind == "line") {
                step.kind = PathStep::Kind::line;
            } else if (kind == "arc") {
                step.kind = PathStep::Kind::arc;
                step.center = r.vec2(s.req("center"), s.field("center"));
                if (const json* ccw = s.opt("ccw")) step.ccw = r.boolean(*ccw, s.field("ccw"));
            } else {
                r.fail(s.field("kind"), "expected line or arc, got '" + kind + "'");
            }
            s.finish("step kind " + kind);
            c.steps.push_back(step);
        }
    }
    if (const json* v = o.opt("cap_thickness")) c.cap_thickness = r.positive(*v, o.field("cap_thickness"));
    if (const json* v = o.opt("margin")) c.margin = r.positive(*v, o.field("margin"));
    o.finish();
    return c;
}

ConstructionSpec read_construction(const Reader& r, const json& j, const std::string& path) {
    Obj o(r, j, path);
    ConstructionSpec c;
    const std::string type = r.string(o.req("type"), o.field("type"));
    c.lambda = r.number(o.req("lambda"), o.field("lambda"));
    if (!(c.lambda > 0.0)) r.fail(o.field("lambda"), "must be positive");
    if (type == "mushroom" || type == "livshits") {
        c.type = type == "mushroom" ? ConstructionType::mushroom : ConstructionType::livshits;
        if (const json* v = o.opt("body")) c.body = r.string(*v, o.field("body"));
        if (c.type == ConstructionType::livshits) {
            c.A = read_anchor(r, o.req("A"), o.field("A"));
            c.B = read_anchor(r, o.req("B"), o.field("B"));
            if (const json* v = o.opt("cap")) c.cap = read_closure(r, *v, o.field("cap"));
            if (const json* v = o.opt("closure")) c.closure = read_closure(r, *v, o.field("closure"));
        }
    } else if (type == "penrose") {
        c.type = ConstructionType::penrose;
        const std::string f = o.field("caps");
        const json& caps = r.array(o.req("caps"), f);
        if (caps.size() != 2) r.fail(f, "a Penrose room needs exactly two caps");
        for (std::size_t k = 0; k < 2; ++k) {
            Obj co(r, caps[k], index(f, k));
            CapSpec cap;
            cap.body = r.string(co.req("body"), co.field("body"));
            cap.A = read_anchor(r, co.req("A"), co.field("A"));
            cap.B = read_anchor(r, co.req("B"), co.field("B"));
            if (const json* v = co.opt("cap")) cap.cap = read_closure(r, *v, co.field("cap"));
            co.finish();
            c.caps.push_back(cap);
        }
        if (const json* v = o.opt("corridor")) {
            Obj co(r, *v, o.field("corridor"));
            if (const json* w = co.opt("first")) c.corridor.first = read_closure(r, *w, co.field("first"));
            if (const json* w = co.opt("second")) c.corridor.second = read_closure(r, *w, co.field("second"));
            co.finish();
        }
    } else {
        r.fail(o.field("type"), "expected mushroom, livshits or penrose, got '" + type + "'");
    }
    o.finish("construction type " + type);
    return c;
}

SimulationSpec read_simulation(const Reader& r, const json& j, const std::string& path) {
    Obj o(r, j, path);
    SimulationSpec s;
    if (const json* v = o.opt("reflections")) s.reflections = static_cast<std::size_t>(r.count(*v, o.field("reflections")));
    if (const json* v = o.opt("n_dirs")) s.n_dirs = r.positive_count(*v, o.field("n_dirs"));
    if (const json* v = o.opt("n_rays")) s.n_rays = r.positive_count(*v, o.field("n_rays"));
    if (const json* v = o.opt("samples")) s.samples = r.positive_count(*v, o.field("samples"));
    if (const json* v = o.opt("grid")) {
        const std::string f = o.field("grid");
        if (!v->is_array() || v->size() != 2) r.fail(f, "expected [nx, ny]");
        s.grid_x = r.positive_count((*v)[0], index(f, 0));
        s.grid_y = r.positive_count((*v)[1], index(f, 1));
    }
    if (const json* v = o.opt("rho"); v && !v->is_null()) s.rho = r.positive(*v, o.field("rho"));
    if (const json* v = o.opt("seed")) s.seed = r.count(*v, o.field("seed"));
    o.finish();
    return s;
}

RenderSpec read_render(const Reader& r, const json& j, const std::string& path) {
    Obj o(r, j, path);
    RenderSpec s;
    if (const json* v = o.opt("width")) s.width = r.positive(*v, o.field("width"));
    if (const json* v = o.opt("height")) s.height = r.positive(*v, o.field("height"));
    if (const json* v = o.opt("margin")) {
        s.margin = r.number(*v, o.field("margin"));
        if (s.margin < 0.0 || 2.0 * s.margin >= std::min(s.width, s.height))
            r.fail(o.field("margin"), "must be non-negative and leave room for the drawing");
    }
    if (const json* v = o.opt("layers")) {
        Obj l(r, *v, o.field("layers"));
        const std::pair<const char*, bool*> keys[] = {{"bodies", &s.show_bodies},
                                                      {"walls", &s.show_walls},
                                                      {"trajectories", &s.show_trajectories},
                                                      {"heatmap", &s.show_heatmap},
                                                      {"dark", &s.show_dark}};
        for (const auto& [k, dst] : keys)
            if (const json* w = l.opt(k)) *dst = r.boolean(*w, l.field(k));
        l.finish();
    }
    if (const json* v = o.opt("colors")) {
        Obj c(r, *v, o.field("colors"));
        const std::pair<const char*, std::string*> keys[] = {
            {"body", &s.body_color},   {"wall", &s.wall_color},   {"cap", &s.cap_color},
            {"trajectory", &s.trajectory_color}, {"heat_low", &s.heat_low}, {"heat_high", &s.heat_high},
            {"free", &s.free_color},   {"mixed", &s.mixed_color}, {"hidden", &s.hidden_color},
            {"dark", &s.dark_color}};
        for (const auto& [k, dst] : keys)
            if (const json* w = c.opt(k)) *dst = r.color(*w, c.field(k));
        c.finish();
    }
    if (const json* v = o.opt("stroke")) {
        Obj c(r, *v, o.field("stroke"));
        const std::pair<const char*, double*> keys[] = {
            {"wall", &s.wall_width}, {"trajectory", &s.trajectory_width}, {"dark", &s.dark_width}};
        for (const auto& [k, dst] : keys)
            if (const json* w = c.opt(k)) *dst = r.positive(*w, c.field(k));
        c.finish();
    }
    o.finish();
    return s;
}

SceneFile read_file(const Reader& r, const json& root) {
    Obj o(r, root, "");
    SceneFile f;
    if (o.has("body") && o.has("bodies")) r.fail("body", "give either body or bodies, not both");
    if (const json* v = o.opt("body")) {
        f.bodies.push_back(read_body(r, *v, "body", "H"));
    } else {
        const json& bs = r.array(o.req("bodies"), "bodies");
        if (bs.empty()) r.fail("bodies", "needs at least one body");
        for (std::size_t k = 0; k < bs.size(); ++k)
            f.bodies.push_back(read_body(r, bs[k], index("bodies", k), bs.size() == 1 ? "H" : "H" + std::to_string(k + 1)));
    }
    std::set<std::string> names;
    for (std::size_t k = 0; k < f.bodies.size(); ++k)
        if (!names.insert(f.bodies[k].name).second)
            r.fail(index("bodies", k) + ".name", "duplicate body name '" + f.bodies[k].name + "'");
    f.construction = read_construction(r, o.req("construction"), "construction");
    if (const json* v = o.opt("simulation")) f.simulation = read_simulation(r, *v, "simulation");
    if (const json* v = o.opt("render")) f.render = read_render(r, *v, "render");
    o.finish();
    return f;
}

// ---------------------------------------------------------------------------
// Semantic build

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

struct Builder {
    const SceneFile& f;
    Reader r;
    std::map<std::string, std::size_t> by_name;
    std::vector<ConvexBody> bodies;

    Builder(const SceneFile& file, const LineMap* lines) : f(file), r{lines} {
        for (std::size_t k = 0; k < f.bodies.size(); ++k) {
            by_name[f.bodies[k].name] = k;
            try {
                bodies.push_back(f.bodies[k].build());
            } catch (const std::invalid_argument& e) {
                r.fail(index("bodies", k), e.what());
            }
        }
        if (bodies.empty()) r.fail("bodies", "needs at least one body");
    }

    std::size_t body_index(const std::string& name, const std::string& field) const {
        if (name.empty()) {
            if (bodies.size() != 1) r.fail(field, "required when the file has several bodies");
            return 0;
        }
        auto it = by_name.find(name);
        if (it == by_name.end()) r.fail(field, "unknown body '" + name + "'");
        return it->second;
    }

    void check_lambda(const ConvexBody& body, const AnchorLine& A, const AnchorLine& B, const std::string& anchors,
                      const std::string& who) const {
        double lmax = 0.0;
        try {
            lmax = lambda_max(body, A, B);
        } catch (const std::invalid_argument& e) {
            r.fail(anchors, e.what());
        }
        if (!(f.construction.lambda < lmax))
            r.fail("construction.lambda", "must be below lambda_max = " + fmt(lmax) + who);
    }

    Scene build() const {
        const ConstructionSpec& c = f.construction;
        if (!(c.lambda > 0.0) || !std::isfinite(c.lambda)) r.fail("construction.lambda", "must be positive");
        Scene scene;
        try {
            switch (c.type) {
                case ConstructionType::mushroom: {
                    const std::size_t b = body_index(c.body, "construction.body");
                    scene = mushroom_table(bodies[b], c.lambda, f.bodies[b].name);
                    break;
                }
                case ConstructionType::livshits: {
                    const std::size_t b = body_index(c.body, "construction.body");
                    check_lambda(bodies[b], c.A, c.B, "construction.A", "");
                    scene = livshits_obstacle(bodies[b], c.A, c.B, c.lambda, c.cap, c.closure, f.bodies[b].name);
                    break;
                }
                case ConstructionType::penrose: {
                    if (c.caps.size() != 2) r.fail("construction.caps", "a Penrose room needs exactly two caps");
                    if (body_index(c.caps[0].body, "construction.caps[0].body") ==
                        body_index(c.caps[1].body, "construction.caps[1].body"))
                        r.fail("construction.caps[1].body", "caps need distinct bodies");
                    PenroseCap caps[2];
                    for (std::size_t k = 0; k < 2; ++k) {
                        const std::string f0 = index("construction.caps", k);
                        const std::size_t b = body_index(c.caps[k].body, f0 + ".body");
                        check_lambda(bodies[b], c.caps[k].A, c.caps[k].B, f0 + ".A",
                                     " (cap '" + f.bodies[b].name + "')");
                        caps[k] = {f.bodies[b].name, bodies[b], c.caps[k].A, c.caps[k].B, c.caps[k].cap};
                    }
                    scene = penrose_room(caps[0], caps[1], c.lambda, c.corridor);
                    break;
                }
            }
        } catch (const SceneFileError&) {
            throw;
        } catch (const std::invalid_argument& e) {
            r.fail("construction", e.what());
        }
        if (f.simulation.rho) {
            if (*f.simulation.rho < scene.bounding_radius)
                r.fail("simulation.rho", "must be at least the bounding radius " + fmt(scene.bounding_radius));
            scene.bounding_radius = *f.simulation.rho;
            scene.index = build_index(scene);
        }
        const ValidationReport v = validate_scene(scene);
        if (!v.ok()) r.fail("construction", "built scene fails validation: " + v.violations.front());
        return scene;
    }
};

ojson vec(const Vec2& p) { return ojson::array({p.x, p.y}); }

ojson write_closure(const ClosureSpec& c) {
    ojson steps = ojson::array();
    for (const auto& s : c.steps) {
        ojson j;
        j["kind"] = s.kind == PathStep::Kind::line ? "line" : "arc";
        j["to"] = vec(s.to);
        if (s.kind == PathStep::Kind::arc) {
            j["center"] = vec(s.center);
            j["ccw"] = s.ccw;
        }
        steps.push_back(j);
    }
    ojson j;
    j["steps"] = steps;
    j["cap_thickness"] = c.cap_thickness;
    j["margin"] = c.margin;
    return j;
}

ojson write_anchor(const AnchorLine& a) {
    ojson j;
    j["point"] = vec(a.point);
    j["direction"] = vec(a.direction);
    return j;
}

}  // namespace


LoadedScene load_scene(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        const std::size_t end = std::min<std::size_t>(e.byte ? e.byte - 1 : 0, text.size());
        for (std::size_t k = 0; k < end; ++k)
            if (text[k] == '\n') ++line;
        std::string msg = e.what();
        if (auto p = msg.find("parse error"); p != std::string::npos) msg = msg.substr(p);
        throw SceneFileError(line, "", "syntax error: " + msg);
    }
    LineMap lines;
    LineScanner{text, 0, 1, lines}.value("");
    const Reader r{&lines};
    LoadedScene out;
    out.file = read_file(r, root);
    out.scene = Builder(out.file, &lines).build();
    return out;
}

SceneFile parse_scene(const std::string& text) { return load_scene(text).file; }

Scene build_scene(const SceneFile& file) { return Builder(file, nullptr).build(); }

std::string serialize_scene(const SceneFile& f) {
    ojson root;
    ojson bodies = ojson::array();
    for (const auto& b : f.bodies) {
        ojson j;
        j["name"] = b.name;
        j["shape"] = to_string(b.shape);
        switch (b.shape) {
            case BodyShape::polygon: {
                ojson vs = ojson::array();
                for (const auto& v : b.vertices) vs.push_back(vec(v));
                j["vertices"] = vs;
                break;
            }
            case BodyShape::point: j["center"] = vec(b.center); break;
            case BodyShape::segment:
                j["length"] = b.length;
                j["center"] = vec(b.center);
                j["angle"] = b.angle;
                break;
            case BodyShape::regular_ngon:
                j["n"] = b.n;
                j["radius"] = b.radius;
                j["center"] = vec(b.center);
                j["angle"] = b.angle;
                break;
        }
        bodies.push_back(j);
    }
    root["bodies"] = bodies;

    const ConstructionSpec& c = f.construction;
    ojson cj;
    cj["type"] = to_string(c.type);
    cj["lambda"] = c.lambda;
    if (c.type != ConstructionType::penrose) {
        cj["body"] = c.body;
        if (c.type == ConstructionType::livshits) {
            cj["A"] = write_anchor(c.A);
            cj["B"] = write_anchor(c.B);
            cj["cap"] = write_closure(c.cap);
            cj["closure"] = write_closure(c.closure);
        }
    } else {
        ojson caps = ojson::array();
        for (const auto& cap : c.caps) {
            ojson j;
            j["body"] = cap.body;
            j["A"] = write_anchor(cap.A);
            j["B"] = write_anchor(cap.B);
            j["cap"] = write_closure(cap.cap);
            caps.push_back(j);
        }
        cj["caps"] = caps;
        cj["corridor"]["first"] = write_closure(c.corridor.first);
        cj["corridor"]["second"] = write_closure(c.corridor.second);
    }
    root["construction"] = cj;

    const SimulationSpec& s = f.simulation;
    ojson sj;
    sj["reflections"] = s.reflections;
    sj["n_dirs"] = s.n_dirs;
    sj["n_rays"] = s.n_rays;
    sj["samples"] = s.samples;
    sj["grid"] = ojson::array({s.grid_x, s.grid_y});
    sj["rho"] = s.rho ? ojson(*s.rho) : ojson(nullptr);
    sj["seed"] = s.seed;
    root["simulation"] = sj;

    const RenderSpec& r = f.render;
    ojson rj;
    rj["width"] = r.width;
    rj["height"] = r.height;
    rj["margin"] = r.margin;
    rj["layers"]["bodies"] = r.show_bodies;
    rj["layers"]["walls"] = r.show_walls;
    rj["layers"]["trajectories"] = r.show_trajectories;
    rj["layers"]["heatmap"] = r.show_heatmap;
    rj["layers"]["dark"] = r.show_dark;
    rj["colors"]["body"] = r.body_color;
    rj["colors"]["wall"] = r.wall_color;
    rj["colors"]["cap"] = r.cap_color;
    rj["colors"]["trajectory"] = r.trajectory_color;
    rj["colors"]["heat_low"] = r.heat_low;
    rj["colors"]["heat_high"] = r.heat_high;
    rj["colors"]["free"] = r.free_color;
    rj["colors"]["mixed"] = r.mixed_color;
    rj["colors"]["hidden"] = r.hidden_color;
    rj["colors"]["dark"] = r.dark_color;
    rj["stroke"]["wall"] = r.wall_width;
    rj["stroke"]["trajectory"] = r.trajectory_width;
    rj["stroke"]["dark"] = r.dark_width;
    root["render"] = rj;
    return root.dump(2) + "\n";
}

}  // namespace strbill
