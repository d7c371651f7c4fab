#include "strbill/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "strbill/reports.hpp"
#include "strbill/scene_file.hpp"
#include "strbill/svg.hpp"

namespace strbill {

namespace {

struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

double parse_double(const std::string& s, const std::string& what) {
    const char* b = s.c_str();
    char* e = nullptr;
    const double x = std::strtod(b, &e);
    if (s.empty() || e != b + s.size() || !std::isfinite(x)) throw InputError(what + ": cannot read '" + s + "' as a number");
    return x;
}

std::vector<double> parse_list(const std::string& s, std::size_t n, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(parse_double(part, what));
    if (out.size() != n || (!s.empty() && s.back() == ','))
        throw InputError(what + ": expected " + std::to_string(n) + " comma-separated numbers, got '" + s + "'");
    return out;
}

Vec2 parse_vec(const std::string& s, const std::string& what) {
    const auto v = parse_list(s, 2, what);
    return {v[0], v[1]};
}

std::pair<std::size_t, std::size_t> parse_grid(const std::string& s) {
    const auto x = s.find('x');
    const auto num = [&](const std::string& t) {
        if (t.empty() || !std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; }))
            throw InputError("--grid: expected WxH, got '" + s + "'");
        const unsigned long long v = std::stoull(t);
        if (v == 0 || v > 100000) throw InputError("--grid: sizes must be between 1 and 100000");
        return static_cast<std::size_t>(v);
    };
    if (x == std::string::npos) throw InputError("--grid: expected WxH, got '" + s + "'");
    return {num(s.substr(0, x)), num(s.substr(x + 1))};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open scene file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Box chain_box(const Scene& s) {
    Box b;
    for (const auto& ch : s.chains)
        for (const auto& ce : ch.elements) b.add(element_bounds(ce.geom));
    return b;
}

Box body_box(const Scene& s) {
    Box b;
    if (!s.hidden.empty()) return s.hidden.front().body.bounds();
    for (const auto& body : s.bodies) b.add(body.bounds());
    return b;
}

struct Options {
    std::uint64_t seed{0};
    std::size_t cutoff{0};
    std::string out;
    std::string format;
    unsigned threads{0};
    CLI::Option* seed_opt{nullptr};
    CLI::Option* cutoff_opt{nullptr};
    CLI::Option* format_opt{nullptr};

    std::string scene_path;
    std::string from, dir, point, grid, box, candle, suite{"all"}, lambdas;
    std::size_t reflections{0}, dirs{0}, rays{0}, samples{0};
    double bound{0.0};
    CLI::Option *reflections_opt{nullptr}, *dirs_opt{nullptr}, *rays_opt{nullptr}, *samples_opt{nullptr};
};

struct Context {
    Options& o;
    LoadedScene loaded;
    std::uint64_t seed{0};
    std::size_t cutoff{0};
    std::string format;

    const Scene& scene() const { return loaded.scene; }
    const SceneFile& file() const { return loaded.file; }

    void require_format(std::initializer_list<const char*> allowed, const char* cmd) const {
        for (const char* a : allowed)
            if (format == a) return;
        throw InputError(std::string("--format ") + format + " is not available for " + cmd);
    }
};

std::string format_from(const Options& o, const char* fallback) {
    if (o.format_opt && o.format_opt->count()) return o.format;
    const auto ends = [&](const char* suf) {
        const std::string s = suf;
        return o.out.size() >= s.size() && o.out.compare(o.out.size() - s.size(), s.size(), s) == 0;
    };
    if (ends(".svg")) return "svg";
    if (ends(".json")) return "structured";
    if (ends(".txt")) return "text";
    return fallback;
}

// Document plus the summary printed when the document goes to a file.
struct Result {
    std::string document;
    std::string summary;
    int code{exit_ok};
};

std::string build_text(const Scene& s) {
    std::ostringstream os;
    os.precision(9);
    os << to_string(s.kind) << " scene, lambda " << s.lam << ", " << s.chains.size() << " chains, " << s.element_count()
       << " elements, bounding radius " << s.bounding_radius << "\n";
    for (const auto& ch : s.chains)
        os << "  chain " << ch.name << " (" << to_string(ch.role) << "): " << ch.elements.size() << " elements\n";
    for (const auto& h : s.hidden) os << "  hidden " << h.name << ": lambda_max " << h.lambda_max << "\n";
    os << "valid\n";
    return os.str();
}

std::string build_json(const Scene& s) {
    nlohmann::ordered_json j;
    j["kind"] = to_string(s.kind);
    j["lambda"] = s.lam;
    j["elements"] = s.element_count();
    j["bounding_radius"] = s.bounding_radius;
    auto chains = nlohmann::ordered_json::array();
    for (const auto& ch : s.chains)
        chains.push_back({{"name", ch.name}, {"role", to_string(ch.role)}, {"elements", ch.elements.size()}});
    j["chains"] = chains;
    auto hidden = nlohmann::ordered_json::array();
    for (const auto& h : s.hidden) hidden.push_back({{"name", h.name}, {"lambda_max", h.lambda_max}});
    j["hidden"] = hidden;
    j["valid"] = true;
    return j.dump(2) + "\n";
}

Result cmd_build(Context& c) {
    c.require_format({"svg", "text", "structured"}, "build");
    Result r;
    if (c.format == "svg") r.document = render_svg(c.scene(), {}, c.file().render);
    else if (c.format == "text") r.document = build_text(c.scene());
    else r.document = build_json(c.scene());
    r.summary = build_text(c.scene());
    return r;
}

Trajectory run_trace(Context& c) {
    const Vec2 q = parse_vec(c.o.from, "--from");
    const Vec2 d = parse_vec(c.o.dir, "--dir");
    if (norm2(d) == 0.0) throw InputError("--dir must be nonzero");
    const std::size_t n = c.o.reflections_opt->count() ? c.o.reflections : c.cutoff;
    return trace(c.scene(), {q, normalized(d)}, n);
}

Result cmd_trace(Context& c) {
    c.require_format({"svg", "text", "structured"}, "trace");
    const Trajectory t = run_trace(c);
    Result r;
    if (c.format == "svg") {
        Overlays ov;
        ov.trajectories.push_back(trajectory_polyline(t));
        r.document = render_svg(c.scene(), ov, c.file().render);
    } else {
        r.document = c.format == "text" ? to_text(t) : to_json(t);
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s after %zu reflections\n", to_string(t.termination), t.reflections());
    r.summary = buf;
    return r;
}

Result cmd_render(Context& c) {
    c.require_format({"svg"}, "render");
    Overlays ov;
    if (!c.o.from.empty() || !c.o.dir.empty()) {
        if (c.o.from.empty() || c.o.dir.empty()) throw InputError("render needs both --from and --dir for a trajectory");
        ov.trajectories.push_back(trajectory_polyline(run_trace(c)));
    }
    Result r;
    r.document = render_svg(c.scene(), ov, c.file().render);
    r.summary = "rendered " + std::to_string(c.scene().chains.size()) + " chains\n";
    return r;
}

Result cmd_classify(Context& c) {
    const std::size_t n_dirs = c.o.dirs_opt->count() ? c.o.dirs : c.file().simulation.n_dirs;
    if (n_dirs == 0) throw InputError("--dirs must be at least 1");
    Result r;
    if (!c.o.point.empty()) {
        c.require_format({"text", "structured"}, "classify --point");
        const PointClass pc = classify_point(c.scene(), parse_vec(c.o.point, "--point"), n_dirs, c.cutoff, c.seed);
        r.document = c.format == "text" ? to_text(pc) : to_json(pc);
        r.summary = to_text(pc);
        return r;
    }
    c.require_format({"svg", "text", "structured"}, "classify");
    auto [nx, ny] = c.o.grid.empty() ? std::pair{c.file().simulation.grid_x, c.file().simulation.grid_y} : parse_grid(c.o.grid);
    Box box;
    if (!c.o.box.empty()) {
        const auto v = parse_list(c.o.box, 4, "--box");
        box.add(Vec2{v[0], v[1]});
        box.add(Vec2{v[2], v[3]});
    } else {
        box = body_box(c.scene());
    }
    const RegionScan scan = scan_region(c.scene(), grid_over(box, nx, ny), n_dirs, c.cutoff, c.seed, c.o.threads);
    if (c.format == "svg") {
        Overlays ov;
        ov.scan = &scan;
        r.document = render_svg(c.scene(), ov, c.file().render);
    } else {
        r.document = c.format == "text" ? to_text(scan) : to_json(scan);
    }
    r.summary = to_text(scan);
    return r;
}

Result cmd_illuminate(Context& c) {
    c.require_format({"svg", "text", "structured"}, "illuminate");
    const std::size_t rays = c.o.rays_opt->count() ? c.o.rays : c.file().simulation.n_rays;
    if (rays == 0) throw InputError("--rays must be at least 1");
    auto [nx, ny] = c.o.grid.empty() ? std::pair{c.file().simulation.grid_x, c.file().simulation.grid_y} : parse_grid(c.o.grid);
    const GridSpec g = grid_over(chain_box(c.scene()), nx, ny);
    const IlluminationMap m = illuminate(c.scene(), parse_vec(c.o.candle, "--candle"), rays, c.cutoff, g, c.seed, c.o.threads);
    Result r;
    if (c.format == "svg") {
        Overlays ov;
        ov.illumination = &m;
        r.document = render_svg(c.scene(), ov, c.file().render);
    } else {
        r.document = c.format == "text" ? to_text(m) : to_json(m);
    }
    r.summary = to_text(m);
    return r;
}

Result cmd_verify(Context& c) {
    c.require_format({"text", "structured"}, "verify");
    const Scene& s = c.scene();
    const std::size_t n = c.o.samples_opt->count() ? c.o.samples : c.file().simulation.samples;
    if (n == 0) throw InputError("--samples must be at least 1");
    const std::string& suite = c.o.suite;
    const bool all = suite == "all";
    std::vector<double> lambdas;
    if (!c.o.lambdas.empty()) {
        std::stringstream ss(c.o.lambdas);
        std::string part;
        while (std::getline(ss, part, ',')) lambdas.push_back(parse_double(part, "--lambdas"));
    } else {
        lambdas = {s.lam, 0.1 * s.lam, 0.01 * s.lam};
    }

    std::vector<VerifyReport> reports;
    if (suite == "split" || all) {
        if (s.table) reports.push_back(verify_split(s, n, c.cutoff, c.seed, c.o.threads));
        else if (!all) throw InputError("the split suite needs a mushroom table");
    }
    if (suite == "geometry" || all) {
        if (s.table) reports.push_back(verify_geometry(*s.table, n, c.seed));
        else
            for (const auto& b : s.bodies) reports.push_back(verify_geometry(level_curve(b, s.lam), n, c.seed));
    }
    if (suite == "inverse" || all)
        for (const auto& b : s.bodies) reports.push_back(verify_inverse_maps(b, n, c.seed));
    if (suite == "limit" || all)
        for (const auto& b : s.bodies) reports.push_back(verify_limit(b, lambdas, c.o.bound));

    Result r;
    bool pass = true;
    for (const auto& rep : reports) {
        pass = pass && rep.pass();
        if (c.format == "text") r.document += to_text(rep);
    }
    if (c.format == "structured") r.document = to_json(reports);
    r.summary = std::string(pass ? "PASS" : "FAIL") + ": " + std::to_string(reports.size()) + " reports\n";
    if (c.format == "text") r.document += r.summary;
    r.code = pass ? exit_ok : exit_violation;
    return r;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"String-construction billiards: tables, obstacles, rooms and their verification", "string_billiards"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    o.seed_opt = app.add_option("--seed", o.seed, "Random seed (default: from the scene file)");
    o.cutoff_opt = app.add_option("--cutoff", o.cutoff, "Reflection cutoff N (default: from the scene file)");
    app.add_option("--out", o.out, "Write the document to this file");
    o.format_opt = app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"svg", "text", "structured"}));
    app.add_option("--threads", o.threads, "Worker threads (0 = all; capped by STRING_BILLIARDS_THREADS)");

    const auto scene_arg = [&](CLI::App* sub) { sub->add_option("scene", o.scene_path, "Scene file (JSON)")->required(); };

    CLI::App* build = app.add_subcommand("build", "Validate a scene file and draw it");
    scene_arg(build);

    CLI::App* tr = app.add_subcommand("trace", "Trace one trajectory");
    scene_arg(tr);
    tr->add_option("--from", o.from, "Start point x,y")->required();
    tr->add_option("--dir", o.dir, "Direction dx,dy")->required();
    o.reflections_opt = tr->add_option("--reflections", o.reflections, "Number of reflections (default: cutoff)");

    CLI::App* cl = app.add_subcommand("classify", "Label points hidden, free or mixed");
    scene_arg(cl);
    auto* pt = cl->add_option("--point", o.point, "Classify one point x,y");
    auto* gr = cl->add_option("--grid", o.grid, "Scan a WxH grid");
    pt->excludes(gr);
    o.dirs_opt = cl->add_option("--dirs", o.dirs, "Directions per point (default: from the scene file)");
    cl->add_option("--box", o.box, "Grid box x0,y0,x1,y1 (default: bounds of H)");

    CLI::App* il = app.add_subcommand("illuminate", "Light a room from one candle");
    scene_arg(il);
    il->add_option("--candle", o.candle, "Candle position x,y")->required();
    o.rays_opt = il->add_option("--rays", o.rays, "Number of rays (default: from the scene file)");
    il->add_option("--grid", o.grid, "Raster size WxH over the room (default: from the scene file)");

    CLI::App* ve = app.add_subcommand("verify", "Run verification suites");
    scene_arg(ve);
    ve->add_option("--suite", o.suite, "Suite to run")->check(CLI::IsMember({"split", "geometry", "inverse", "limit", "all"}));
    o.samples_opt = ve->add_option("--samples", o.samples, "Samples per suite (default: from the scene file)");
    ve->add_option("--lambdas", o.lambdas, "Decreasing lambdas for the limit suite, comma separated");
    ve->add_option("--bound", o.bound, "Bound on the last Hausdorff distance (default: from lambda and L)")
        ->check(CLI::PositiveNumber);

    CLI::App* re = app.add_subcommand("render", "Draw a scene, optionally with one trajectory");
    scene_arg(re);
    re->add_option("--from", o.from, "Trajectory start x,y");
    re->add_option("--dir", o.dir, "Trajectory direction dx,dy");
    re->add_option("--reflections", o.reflections, "Number of reflections (default: cutoff)");
    // trace and render both store --reflections in o.reflections.
    CLI::Option* render_reflections = re->get_option("--reflections");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return exit_input;
    }

    try {
        Context c{o, load_scene(read_file(o.scene_path)), 0, 0, {}};
        c.seed = o.seed_opt->count() ? o.seed : c.file().simulation.seed;
        c.cutoff = o.cutoff_opt->count() ? o.cutoff : c.file().simulation.reflections;
        Result r;
        if (build->parsed()) {
            c.format = format_from(o, "svg");
            r = cmd_build(c);
        } else if (tr->parsed()) {
            c.format = format_from(o, "text");
            r = cmd_trace(c);
        } else if (re->parsed()) {
            if (render_reflections->count()) o.reflections_opt = render_reflections;
            c.format = format_from(o, "svg");
            r = cmd_render(c);
        } else if (cl->parsed()) {
            c.format = format_from(o, "text");
            r = cmd_classify(c);
        } else if (il->parsed()) {
            c.format = format_from(o, "text");
            r = cmd_illuminate(c);
        } else {
            c.format = format_from(o, "text");
            r = cmd_verify(c);
        }
        if (o.out.empty()) {
            out << r.document;
        } else {
            std::ofstream f(o.out, std::ios::binary);
            if (!f || !(f << r.document) || !f.flush()) throw InputError("cannot write '" + o.out + "'");
            out << r.summary;
        }
        return r.code;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return exit_input;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_input;
    }
}

}  // namespace strbill
