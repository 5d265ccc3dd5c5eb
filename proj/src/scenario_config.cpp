#include "gradflow/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

namespace gradflow {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& ctx, const std::string& msg) {
    throw ConfigError(ctx + ": " + msg);
}

void require_object(const Json& j, const std::string& ctx,
                    const std::set<std::string>& allowed,
                    const std::set<std::string>& required) {
    if (!j.is_object()) fail(ctx, "expected an object");
    for (const auto& item : j.items()) {
        if (!allowed.count(item.key()))
            fail(ctx, "unknown key '" + item.key() + "'");
    }
    for (const auto& key : required) {
        if (!j.contains(key)) fail(ctx, "missing required key '" + key + "'");
    }
}

double get_number(const Json& j, const std::string& ctx) {
    if (!j.is_number()) fail(ctx, "expected a number");
    return j.get<double>();
}

int get_int(const Json& j, const std::string& ctx) {
    if (!j.is_number_integer()) fail(ctx, "expected an integer");
    return j.get<int>();
}

bool get_bool(const Json& j, const std::string& ctx) {
    if (!j.is_boolean()) fail(ctx, "expected a boolean");
    return j.get<bool>();
}

std::string get_string(const Json& j, const std::string& ctx) {
    if (!j.is_string()) fail(ctx, "expected a string");
    return j.get<std::string>();
}

Vec get_vector(const Json& j, const std::string& ctx) {
    if (!j.is_array() || j.empty()) fail(ctx, "expected a non-empty array of numbers");
    Vec v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = get_number(j[i], ctx);
    return v;
}

Vec get_vector_dim(const Json& j, const std::string& ctx, int dim) {
    Vec v = get_vector(j, ctx);
    if (v.size() != dim)
        fail(ctx, "expected " + std::to_string(dim) + " components, got " +
                 std::to_string(v.size()));
    return v;
}

ScalarField parse_disk(const Json& j, const std::string& ctx, bool interior) {
    require_object(j, ctx, {"center", "radius"}, {"center", "radius"});
    const Vec c = get_vector_dim(j["center"], ctx + ".center", 2);
    const double r = get_number(j["radius"], ctx + ".radius");
    if (!(r > 0.0)) fail(ctx, "radius must be positive");
    return interior ? disk_interior(c(0), c(1), r) : disk_exterior(c(0), c(1), r);
}

Workspace parse_workspace(const Json& j, const std::string& ctx) {
    require_object(j, ctx, {"boundary", "obstacles", "validity_grid"}, {"boundary", "obstacles"});
    Workspace ws;
    ws.boundary = parse_disk(j["boundary"], ctx + ".boundary", /*interior=*/true);
    if (!j["obstacles"].is_array()) fail(ctx + ".obstacles", "expected an array");
    int i = 0;
    for (const auto& obs : j["obstacles"]) {
        ws.obstacles.push_back(
            parse_disk(obs, ctx + ".obstacles[" + std::to_string(i) + "]", /*interior=*/false));
        ++i;
    }
    if (j.contains("validity_grid")) {
        const auto& g = j["validity_grid"];
        const std::string gctx = ctx + ".validity_grid";
        require_object(g, gctx, {"lo", "hi", "divisions"}, {"lo", "hi", "divisions"});
        GridSpec grid;
        grid.lo = get_vector(g["lo"], gctx + ".lo");
        grid.hi = get_vector_dim(g["hi"], gctx + ".hi", static_cast<int>(grid.lo.size()));
        for (const auto& d : g["divisions"]) grid.divisions.push_back(get_int(d, gctx + ".divisions"));
        if (static_cast<Eigen::Index>(grid.divisions.size()) != grid.lo.size())
            fail(gctx, "divisions length must match lo/hi");
        const auto report = check_workspace_valid(ws, grid);
        if (!report.valid) fail(ctx, "workspace is not valid: " + report.violation);
    }
    return ws;
}

struct TabulatedCurve {
    std::vector<double> times;
    std::vector<Vec> positions;
    std::vector<Vec> feedforwards;  ///< empty when the table has no control columns

    Vec interpolate(const std::vector<Vec>& rows, double t) const {
        if (t <= times.front()) return rows.front();
        if (t >= times.back()) return rows.back();
        const auto it = std::upper_bound(times.begin(), times.end(), t);
        const std::size_t hi = static_cast<std::size_t>(it - times.begin());
        const std::size_t lo = hi - 1;
        const double w = (t - times[lo]) / (times[hi] - times[lo]);
        return rows[lo] + w * (rows[hi] - rows[lo]);
    }
};

TabulatedCurve load_table(const std::filesystem::path& path, int state_dim, int control_dim,
                          bool with_feedforward) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open curve table '" + path.string() + "'");
    TabulatedCurve table;
    std::string line;
    bool header_skipped = false;
    const int expected = 1 + state_dim + (with_feedforward ? control_dim : 0);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (!header_skipped) {
            header_skipped = true;
            if (line.find_first_not_of("0123456789+-.eE, \t") != std::string::npos) continue;
        }
        std::istringstream row(line);
        std::vector<double> cells;
        std::string cell;
        while (std::getline(row, cell, ',')) cells.push_back(std::stod(cell));
        if (static_cast<int>(cells.size()) != expected)
            throw ConfigError("curve table '" + path.string() + "': expected " +
                              std::to_string(expected) + " columns, got " +
                              std::to_string(cells.size()));
        table.times.push_back(cells[0]);
        Vec pos(state_dim);
        for (int i = 0; i < state_dim; ++i) pos(i) = cells[1 + i];
        table.positions.push_back(pos);
        if (with_feedforward) {
            Vec ff(control_dim);
            for (int i = 0; i < control_dim; ++i) ff(i) = cells[1 + state_dim + i];
            table.feedforwards.push_back(ff);
        }
    }
    if (table.times.size() < 2) throw ConfigError("curve table '" + path.string() + "' too short");
    if (!std::is_sorted(table.times.begin(), table.times.end()))
        throw ConfigError("curve table '" + path.string() + "' times must increase");
    return table;
}

CurveSpec parse_curve(const Json& j, const std::string& ctx, int state_dim, int control_dim,
                      const std::filesystem::path& base_dir) {
    require_object(j, ctx, {"kind", "components", "path", "feedforward_columns"}, {"kind"});
    const std::string kind = get_string(j["kind"], ctx + ".kind");
    CurveSpec spec;

    if (kind == "expr") {
        if (!j.contains("components")) fail(ctx, "expr curve requires 'components'");
        const auto& comps = j["components"];
        if (!comps.is_array() || static_cast<int>(comps.size()) != state_dim)
            fail(ctx + ".components",
                 "expected " + std::to_string(state_dim) + " component expressions");
        struct Component {
            std::vector<double> poly;
            double abs_scale = 0.0;
            double abs_shift = 0.0;
        };
        std::vector<Component> parsed;
        int ci = 0;
        for (const auto& comp : comps) {
            const std::string cctx = ctx + ".components[" + std::to_string(ci++) + "]";
            require_object(comp, cctx, {"poly", "abs"}, {});
            Component c;
            if (comp.contains("poly")) {
                for (const auto& coef : comp["poly"]) c.poly.push_back(get_number(coef, cctx + ".poly"));
            }
            if (comp.contains("abs")) {
                require_object(comp["abs"], cctx + ".abs", {"scale", "shift"}, {"scale", "shift"});
                c.abs_scale = get_number(comp["abs"]["scale"], cctx + ".abs.scale");
                c.abs_shift = get_number(comp["abs"]["shift"], cctx + ".abs.shift");
            }
            parsed.push_back(std::move(c));
        }
        spec.position = [parsed, state_dim](double t) {
            Vec x(state_dim);
            for (int i = 0; i < state_dim; ++i) {
                const auto& c = parsed[static_cast<std::size_t>(i)];
                double v = 0.0, tp = 1.0;
                for (double coef : c.poly) {
                    v += coef * tp;
                    tp *= t;
                }
                if (c.abs_scale != 0.0) v += c.abs_scale * std::abs(t - c.abs_shift);
                x(i) = v;
            }
            return x;
        };
        spec.description = "expr";
        return spec;
    }

    if (kind == "tabulated") {
        if (!j.contains("path")) fail(ctx, "tabulated curve requires 'path'");
        const bool with_ff =
            j.contains("feedforward_columns") &&
            get_bool(j["feedforward_columns"], ctx + ".feedforward_columns");
        const auto path = base_dir / get_string(j["path"], ctx + ".path");
        auto table = std::make_shared<TabulatedCurve>(
            load_table(path, state_dim, control_dim, with_ff));
        spec.position = [table](double t) { return table->interpolate(table->positions, t); };
        if (with_ff)
            spec.feedforward = [table](double t) {
                return table->interpolate(table->feedforwards, t);
            };
        spec.description = "tabulated:" + path.filename().string();
        return spec;
    }

    fail(ctx, "unknown curve kind '" + kind + "' (expected expr or tabulated)");
}

CheckSpec parse_check(const Json& j, const std::string& ctx) {
    require_object(j, ctx,
                   {"kind", "report_only", "tol_abs", "tol_rel", "gamma_star", "rho", "residual",
                    "tol", "eps_list", "slope_min", "substeps"},
                   {"kind"});
    CheckSpec spec;
    spec.kind = get_string(j["kind"], ctx + ".kind");
    const std::set<std::string> known = {"exponential_envelope", "polynomial_envelope",
                                         "sampled_descent",      "tube_attraction",
                                         "obstacle_run",         "order_test"};
    if (!known.count(spec.kind)) fail(ctx, "unknown check kind '" + spec.kind + "'");
    if (j.contains("report_only")) spec.report_only = get_bool(j["report_only"], ctx);
    if (j.contains("tol_abs")) spec.tol_abs = get_number(j["tol_abs"], ctx);
    if (j.contains("tol_rel")) spec.tol_rel = get_number(j["tol_rel"], ctx);
    if (j.contains("gamma_star")) spec.gamma_star = get_number(j["gamma_star"], ctx);
    if (j.contains("rho")) spec.rho = get_number(j["rho"], ctx);
    if (j.contains("residual")) spec.residual = get_number(j["residual"], ctx);
    if (j.contains("tol")) spec.tol = get_number(j["tol"], ctx);
    if (j.contains("eps_list"))
        for (const auto& e : j["eps_list"]) spec.eps_list.push_back(get_number(e, ctx + ".eps_list"));
    if (j.contains("slope_min")) spec.slope_min = get_number(j["slope_min"], ctx);
    if (j.contains("substeps")) spec.substeps = get_int(j["substeps"], ctx);
    return spec;
}

}  // namespace

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const nlohmann::json::parse_error& err) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < err.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError("parse error in '" + path.string() + "' at line " +
                          std::to_string(line) + ", column " + std::to_string(col) + ": " +
                          err.what());
    }
    return parse_config(doc, path.parent_path());
}

ScenarioConfig parse_config(const Json& doc, const std::filesystem::path& base_dir) {
    require_object(doc, "config",
                   {"name", "system", "scheme", "potential", "params", "initial", "integrators",
                    "checks", "outputs"},
                   {"system", "potential", "params", "initial"});

    ScenarioConfig config;
    if (doc.contains("name")) config.name = get_string(doc["name"], "config.name");

    {
        const auto& s = doc["system"];
        require_object(s, "config.system", {"name"}, {"name"});
        config.system = make_system(get_string(s["name"], "config.system.name"));
    }
    const int n = config.system.state_dim;
    const int m = config.system.control_dim;

    if (doc.contains("scheme")) {
        const auto& s = doc["scheme"];
        require_object(s, "config.scheme", {"s1", "s2", "kappa"}, {"s1", "s2"});
        BracketScheme scheme;
        for (const auto& i : s["s1"]) scheme.s1.push_back(get_int(i, "config.scheme.s1"));
        for (const auto& p : s["s2"]) {
            if (!p.is_array() || p.size() != 2)
                fail("config.scheme.s2", "each pair must be a two-element array");
            scheme.s2.emplace_back(get_int(p[0], "config.scheme.s2"),
                                   get_int(p[1], "config.scheme.s2"));
        }
        if (s.contains("kappa")) {
            for (const auto& k : s["kappa"]) scheme.kappa.push_back(get_int(k, "config.scheme.kappa"));
        } else {
            for (std::size_t i = 0; i < scheme.s2.size(); ++i)
                scheme.kappa.push_back(static_cast<int>(i + 1));
        }
        config.scheme = std::move(scheme);
    } else {
        config.scheme = default_scheme(config.system);
    }
    config.scheme.validate(config.system);

    {
        const auto& p = doc["potential"];
        require_object(p, "config.potential",
                       {"kind", "x_star", "p", "curve", "workspace", "K", "xi_level"}, {"kind"});
        const std::string kind = get_string(p["kind"], "config.potential.kind");
        config.potential_kind = kind;
        if (kind == "power") {
            require_object(p, "config.potential", {"kind", "x_star", "p"}, {"kind", "x_star", "p"});
            const Vec x_star = get_vector_dim(p["x_star"], "config.potential.x_star", n);
            config.potential = make_power_potential(x_star, get_int(p["p"], "config.potential.p"));
            config.x_star = x_star;
        } else if (kind == "tracking") {
            require_object(p, "config.potential", {"kind", "curve"}, {"kind", "curve"});
            config.curve = parse_curve(p["curve"], "config.potential.curve", n, m, base_dir);
            config.potential = make_tracking_potential(config.curve->position);
        } else if (kind == "navigation") {
            require_object(p, "config.potential", {"kind", "workspace", "x_star", "K"},
                           {"kind", "workspace", "x_star", "K"});
            if (n < 2) fail("config.potential", "workspace potentials need n >= 2");
            config.workspace = parse_workspace(p["workspace"], "config.potential.workspace");
            const Vec x_star = get_vector_dim(p["x_star"], "config.potential.x_star", n);
            config.potential = make_navigation_potential(*config.workspace, x_star,
                                                         get_int(p["K"], "config.potential.K"));
            config.x_star = x_star;
        } else if (kind == "artificial_khatib") {
            require_object(p, "config.potential", {"kind", "workspace", "x_star", "K", "xi_level"},
                           {"kind", "workspace", "x_star", "K", "xi_level"});
            if (n < 2) fail("config.potential", "workspace potentials need n >= 2");
            config.workspace = parse_workspace(p["workspace"], "config.potential.workspace");
            const Vec x_star = get_vector_dim(p["x_star"], "config.potential.x_star", n);
            config.potential = make_artificial_khatib(
                x_star, *config.workspace, get_number(p["K"], "config.potential.K"),
                get_number(p["xi_level"], "config.potential.xi_level"));
            config.x_star = x_star;
        } else if (kind == "artificial_ratio") {
            require_object(p, "config.potential", {"kind", "workspace", "x_star", "K"},
                           {"kind", "workspace", "x_star", "K"});
            if (n < 2) fail("config.potential", "workspace potentials need n >= 2");
            config.workspace = parse_workspace(p["workspace"], "config.potential.workspace");
            const Vec x_star = get_vector_dim(p["x_star"], "config.potential.x_star", n);
            config.potential = make_artificial_ratio(x_star, *config.workspace,
                                                     get_number(p["K"], "config.potential.K"));
            config.x_star = x_star;
        } else {
            fail("config.potential", "unknown potential kind '" + kind + "'");
        }
    }

    {
        const auto& p = doc["params"];
        require_object(p, "config.params", {"gamma", "epsilon", "feedforward", "auto_epsilon"},
                       {"gamma", "epsilon"});
        config.params.gamma = get_number(p["gamma"], "config.params.gamma");
        config.params.epsilon = get_number(p["epsilon"], "config.params.epsilon");
        if (p.contains("auto_epsilon"))
            config.auto_epsilon = get_bool(p["auto_epsilon"], "config.params.auto_epsilon");
        if (p.contains("feedforward") && get_bool(p["feedforward"], "config.params.feedforward")) {
            if (!config.curve || !config.curve->feedforward)
                fail("config.params.feedforward",
                     "feedforward requested but the curve provides no feedforward channel");
            config.params.feedforward = config.curve->feedforward;
        }
        config.params.validate();
    }

    {
        const auto& init = doc["initial"];
        require_object(init, "config.initial",
                       {"x0", "t0", "horizon", "substeps_per_period", "cond_limit"},
                       {"x0", "horizon"});
        config.x0 = get_vector_dim(init["x0"], "config.initial.x0", n);
        config.t0 = init.contains("t0") ? get_number(init["t0"], "config.initial.t0") : 0.0;
        config.solver.horizon = get_number(init["horizon"], "config.initial.horizon");
        if (init.contains("substeps_per_period"))
            config.solver.substeps_per_period =
                get_int(init["substeps_per_period"], "config.initial.substeps_per_period");
        if (init.contains("cond_limit"))
            config.solver.cond_limit = get_number(init["cond_limit"], "config.initial.cond_limit");
        config.solver.validate();
    }

    if (doc.contains("integrators")) {
        for (const auto& entry : doc["integrators"]) {
            const std::string kind = get_string(entry, "config.integrators");
            if (kind == "pi_epsilon")
                config.integrators.push_back(TrajectoryKind::pi_epsilon);
            else if (kind == "classical")
                config.integrators.push_back(TrajectoryKind::classical);
            else if (kind == "gradient_flow")
                config.integrators.push_back(TrajectoryKind::gradient_flow);
            else
                fail("config.integrators", "unknown integrator '" + kind + "'");
        }
    } else {
        config.integrators.push_back(TrajectoryKind::pi_epsilon);
    }

    if (doc.contains("checks")) {
        int i = 0;
        for (const auto& c : doc["checks"])
            config.checks.push_back(parse_check(c, "config.checks[" + std::to_string(i++) + "]"));
    }
    for (const auto& check : config.checks) {
        const bool needs_target = check.kind == "exponential_envelope" ||
                                  check.kind == "polynomial_envelope" ||
                                  check.kind == "obstacle_run";
        if (needs_target && !config.x_star)
            fail("config.checks", check.kind + " requires a potential with a target point");
        if (check.kind == "tube_attraction" && !config.curve)
            fail("config.checks", "tube_attraction requires a tracking potential");
        if (check.kind == "obstacle_run" && !config.workspace)
            fail("config.checks", "obstacle_run requires a workspace potential");
    }

    if (doc.contains("outputs")) {
        const auto& o = doc["outputs"];
        require_object(o, "config.outputs", {"csv_prefix", "summary"}, {});
        if (o.contains("csv_prefix"))
            config.outputs.csv_prefix = get_string(o["csv_prefix"], "config.outputs.csv_prefix");
        if (o.contains("summary"))
            config.outputs.summary = get_string(o["summary"], "config.outputs.summary");
    }

    // curve/feedforward dimension probes at the start time
    if (config.curve) {
        const Vec c0 = config.curve->position(config.t0);
        if (c0.size() != n)
            fail("config.potential.curve", "curve dimension " + std::to_string(c0.size()) +
                                               " does not match state dimension " +
                                               std::to_string(n));
    }
    if (config.params.feedforward) {
        const Vec ff0 = config.params.feedforward(config.t0);
        if (ff0.size() != m)
            fail("config.params.feedforward", "feedforward dimension " +
                                                  std::to_string(ff0.size()) +
                                                  " does not match control dimension " +
                                                  std::to_string(m));
    }
    return config;
}

}  // namespace gradflow
