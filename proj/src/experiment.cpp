#include "ttsa/experiment.hpp"

#include "ttsa/constants.hpp"
#include "ttsa/gtd.hpp"
#include "ttsa/simulate.hpp"
#include "ttsa/synthetic.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ttsa {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Fits
// ---------------------------------------------------------------------------

namespace {

std::vector<CurvePoint> window_points(std::span<const CurvePoint> curve,
                                      FitWindow window) {
    if (curve.empty()) throw InsufficientData("fit: empty curve");
    long t_max = 0;
    for (const auto& p : curve) t_max = std::max(t_max, p.t);
    const double lo = window.lo * static_cast<double>(t_max);
    const double hi = window.hi * static_cast<double>(t_max);
    std::vector<CurvePoint> pts;
    for (const auto& p : curve) {
        if (static_cast<double>(p.t) >= lo && static_cast<double>(p.t) <= hi) {
            pts.push_back(p);
        }
    }
    return pts;
}

}  // namespace

double fit_loglog_slope(std::span<const CurvePoint> curve, FitWindow window) {
    std::vector<CurvePoint> pts = window_points(curve, window);
    std::erase_if(pts, [](const CurvePoint& p) { return !(p.value > 0.0); });
    if (pts.size() < 5) {
        throw InsufficientData("fit_loglog_slope: fewer than 5 positive points in window");
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : pts) {
        const double lx = std::log(static_cast<double>(p.t));
        const double ly = std::log(p.value);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = static_cast<double>(pts.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double fit_majorant_constant(std::span<const CurvePoint> curve,
                             double floor_value, FitWindow window) {
    const std::vector<CurvePoint> pts = window_points(curve, window);
    if (pts.empty()) throw InsufficientData("fit_majorant_constant: empty window");
    const double tol = 1e-9 + 0.25 * std::abs(floor_value);
    double best = 0.0;
    for (const auto& p : pts) {
        if (p.value < floor_value - tol) {
            throw std::invalid_argument("fit_majorant_constant: curve dips below the floor");
        }
        best = std::max(best, static_cast<double>(p.t) * (p.value - floor_value));
    }
    return best;
}

std::pair<double, double> fit_inverse_t_law(std::span<const CurvePoint> curve,
                                            FitWindow window) {
    const std::vector<CurvePoint> pts = window_points(curve, window);
    if (pts.size() < 5) {
        throw InsufficientData("fit_inverse_t_law: fewer than 5 points in window");
    }
    // Least squares of z = t * value against [1, 1/t].
    double s11 = 0, s1u = 0, suu = 0, s1z = 0, suz = 0;
    for (const auto& p : pts) {
        const double u = 1.0 / static_cast<double>(p.t);
        const double z = static_cast<double>(p.t) * p.value;
        s11 += 1.0;
        s1u += u;
        suu += u * u;
        s1z += z;
        suz += u * z;
    }
    const double det = s11 * suu - s1u * s1u;
    if (det == 0.0) throw InsufficientData("fit_inverse_t_law: degenerate window");
    const double a = (suu * s1z - s1u * suz) / det;
    const double b = (s11 * suz - s1u * s1z) / det;
    return {a, b};
}

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void config_error(const std::string& key, const std::string& why) {
    throw std::invalid_argument("config key '" + key + "': " + why);
}

}  // namespace

void RunConfig::validate() const {
    if (experiment != "synthetic" && experiment != "gtd" && experiment != "check" &&
        experiment != "bounds") {
        config_error("experiment", "must be one of synthetic|gtd|check|bounds");
    }
    if (n < 1) config_error("n", "must be >= 1");
    if (m < 1) config_error("m", "must be >= 1");
    if (r < 1 || r > std::min(n, m)) config_error("r", "must satisfy 1 <= r <= min(n, m)");
    if (coupling_scale < 0.0) config_error("coupling_scale", "must be >= 0");
    if (!spectrum_fast.empty() && static_cast<long>(spectrum_fast.size()) != n) {
        config_error("spectrum_fast", "must have n entries");
    }
    if (!spectrum_slow.empty() && static_cast<long>(spectrum_slow.size()) != m) {
        config_error("spectrum_slow", "must have m entries");
    }
    for (double v : spectrum_fast) {
        if (!(v < 0.0)) config_error("spectrum_fast", "entries must be strictly negative");
    }
    for (double v : spectrum_slow) {
        if (!(v < 0.0)) config_error("spectrum_slow", "entries must be strictly negative");
    }
    if (!(alpha > 0.0)) config_error("alpha", "must be > 0");
    if (!(beta > 0.0) || beta > alpha) config_error("beta", "must satisfy 0 < beta <= alpha");
    if (noise_kind != "gaussian_iid" && noise_kind != "none") {
        config_error("noise_kind", "must be gaussian_iid|none");
    }
    if (sigma < 0.0) config_error("sigma", "must be >= 0");
    if (steps < 1) config_error("steps", "must be >= 1");
    if (trials < 1) config_error("trials", "must be >= 1");
    if (init != "constrained" && init != "zero") {
        config_error("init", "must be constrained|zero");
    }
    if (checkpoint_count < 2) config_error("checkpoint_count", "must be >= 2");
    for (long t : bound_check_ts) {
        if (t < 1) config_error("bound_check_ts", "entries must be >= 1");
    }
    if (!(fit_window_lo >= 0.0) || !(fit_window_lo < fit_window_hi) ||
        !(fit_window_hi <= 1.0)) {
        config_error("fit_window_lo", "need 0 <= lo < hi <= 1");
    }
    if (out_dir.empty()) config_error("out_dir", "must not be empty");
}

RunConfig default_config(const std::string& experiment) {
    RunConfig cfg;
    cfg.experiment = experiment;
    cfg.seed = 42;
    if (experiment == "gtd") {
        cfg.alpha = 0.02;
        cfg.beta = 0.001;
        cfg.steps = 400000;
    }
    return cfg;
}

RunConfig load_config_file(const std::filesystem::path& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config: parse error in " + path.string() + ": " + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "experiment") base.experiment = value.get<std::string>();
            else if (key == "n") base.n = value.get<long>();
            else if (key == "m") base.m = value.get<long>();
            else if (key == "r") base.r = value.get<long>();
            else if (key == "coupling_scale") base.coupling_scale = value.get<double>();
            else if (key == "decay_rate") base.decay_rate = value.get<double>();
            else if (key == "spectrum_fast") base.spectrum_fast = value.get<std::vector<double>>();
            else if (key == "spectrum_slow") base.spectrum_slow = value.get<std::vector<double>>();
            else if (key == "alpha") base.alpha = value.get<double>();
            else if (key == "beta") base.beta = value.get<double>();
            else if (key == "noise_kind") base.noise_kind = value.get<std::string>();
            else if (key == "sigma") base.sigma = value.get<double>();
            else if (key == "steps") base.steps = value.get<long>();
            else if (key == "trials") base.trials = value.get<int>();
            else if (key == "seed") base.seed = value.get<std::uint64_t>();
            else if (key == "init") base.init = value.get<std::string>();
            else if (key == "checkpoint_count") base.checkpoint_count = value.get<int>();
            else if (key == "bound_check_ts") base.bound_check_ts = value.get<std::vector<long>>();
            else if (key == "fit_window_lo") base.fit_window_lo = value.get<double>();
            else if (key == "fit_window_hi") base.fit_window_hi = value.get<double>();
            else if (key == "out_dir") base.out_dir = value.get<std::string>();
            else if (key == "dump_system") base.dump_system = value.get<bool>();
            else if (key == "system_file") base.system_file = value.get<std::string>();
            else if (key == "basis_x_file") base.basis_x_file = value.get<std::string>();
            else if (key == "basis_y_file") base.basis_y_file = value.get<std::string>();
            else config_error(key, "unknown key");
        } catch (const json::exception& e) {
            config_error(key, std::string("wrong type: ") + e.what());
        }
    }
    return base;
}

// ---------------------------------------------------------------------------
// Structured-text schema I/O
// ---------------------------------------------------------------------------

namespace {

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j, const std::string& key) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) {
        throw std::invalid_argument("system file: key '" + key + "' must be a nested array");
    }
    const Index rows = static_cast<Index>(j.size());
    const Index cols = static_cast<Index>(j[0].size());
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        if (static_cast<Index>(j[i].size()) != cols) {
            throw std::invalid_argument("system file: ragged rows under '" + key + "'");
        }
        for (Index jj = 0; jj < cols; ++jj) m(i, jj) = j[i][jj].get<double>();
    }
    return m;
}

json vector_to_json(const Vector& v) {
    json arr = json::array();
    for (Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

Vector vector_from_json(const json& j, const std::string& key) {
    if (!j.is_array()) {
        throw std::invalid_argument("system file: key '" + key + "' must be an array");
    }
    Vector v(static_cast<Index>(j.size()));
    for (Index i = 0; i < v.size(); ++i) v(i) = j[i].get<double>();
    return v;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    json j;
    in >> j;
    return j;
}

}  // namespace

void save_system(const std::filesystem::path& path, const TwoTimeScaleSystem& sys) {
    json j;
    j["A_ff"] = matrix_to_json(sys.a_ff);
    j["A_fs"] = matrix_to_json(sys.a_fs);
    j["A_sf"] = matrix_to_json(sys.a_sf);
    j["A_ss"] = matrix_to_json(sys.a_ss);
    j["b1"] = vector_to_json(sys.b1);
    j["b2"] = vector_to_json(sys.b2);
    write_text_file(path, j.dump(2) + "\n");
}

TwoTimeScaleSystem load_system(const std::filesystem::path& path) {
    const json j = read_json_file(path);
    TwoTimeScaleSystem sys;
    sys.a_ff = matrix_from_json(j.at("A_ff"), "A_ff");
    sys.a_fs = matrix_from_json(j.at("A_fs"), "A_fs");
    sys.a_sf = matrix_from_json(j.at("A_sf"), "A_sf");
    sys.a_ss = matrix_from_json(j.at("A_ss"), "A_ss");
    sys.b1 = vector_from_json(j.at("b1"), "b1");
    sys.b2 = vector_from_json(j.at("b2"), "b2");
    sys.validate();
    return sys;
}

void save_subspace(const std::filesystem::path& path, const Subspace& sub) {
    json j;
    j["U"] = matrix_to_json(sub.basis());
    write_text_file(path, j.dump(2) + "\n");
}

Subspace load_subspace(const std::filesystem::path& path) {
    const json j = read_json_file(path);
    return Subspace(matrix_from_json(j.at("U"), "U"));
}

// ---------------------------------------------------------------------------
// Artifact emission
// ---------------------------------------------------------------------------

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_trace_csv(const std::filesystem::path& path,
                     std::span<const TraceRow> rows,
                     std::span<const BoundPoint> bounds) {
    std::ostringstream out;
    out << "t,stat_x,stat_y,total_x,total_y,bound_x,bound_y\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const TraceRow& r = rows[i];
        const BoundPoint& b = bounds[i];
        out << r.t << ',' << fmt17(r.stat_x) << ',' << fmt17(r.stat_y) << ','
            << fmt17(r.total_x) << ',' << fmt17(r.total_y) << ','
            << fmt17(b.bound_x) << ',' << fmt17(b.bound_y) << '\n';
    }
    write_text_file(path, out.str());
}

json verdict_json(const Verdict& v) {
    return json{{"pass", v.pass}, {"value", v.value}};
}

json report_json(const AssumptionReport& rep) {
    json j;
    j["a1_aff_hurwitz"] = verdict_json(rep.a1_aff_hurwitz);
    j["a1_schur_hurwitz"] = verdict_json(rep.a1_schur_hurwitz);
    j["a2_fast_hurwitz"] = verdict_json(rep.a2_fast_hurwitz);
    j["a2_slow_hurwitz"] = verdict_json(rep.a2_slow_hurwitz);
    j["a2_slow_plus_variant"] = verdict_json(rep.a2_slow_plus_variant);
    j["a3_mu_y_positive"] = verdict_json(rep.a3_mu_y_positive);
    j["a3_resolvent_xy"] = verdict_json(rep.a3_resolvent_xy);
    j["a3_resolvent_yx"] = verdict_json(rep.a3_resolvent_yx);
    j["step_alpha"] = verdict_json(rep.step_alpha);
    j["step_beta"] = verdict_json(rep.step_beta);
    j["step_ratio"] = verdict_json(rep.step_ratio);
    j["step_sizes_ok"] = rep.step_sizes_ok();
    j["matrix_assumptions_pass"] = rep.matrix_assumptions_pass();
    j["all_pass"] = rep.all_pass();
    return j;
}

json constants_json(const ResolventConstants& rc, const TheoremConstants& tc) {
    return json{{"m_x", rc.m_x},       {"m_y", rc.m_y},
                {"mu_x", rc.mu_x},     {"mu_y", rc.mu_y},
                {"kappa_xy", rc.kappa_xy}, {"kappa_yx", rc.kappa_yx},
                {"L_x", tc.l_x},       {"L_y", tc.l_y},
                {"B_xx", tc.b_xx},     {"B_xy", tc.b_xy},
                {"B_yx", tc.b_yx},     {"B_yy", tc.b_yy},
                {"C_eps", tc.c_eps},   {"C_psi", tc.c_psi}};
}

json config_json(const RunConfig& c) {
    json j;
    j["experiment"] = c.experiment;
    j["n"] = c.n;
    j["m"] = c.m;
    j["r"] = c.r;
    j["coupling_scale"] = c.coupling_scale;
    j["decay_rate"] = c.decay_rate;
    j["spectrum_fast"] = c.spectrum_fast;
    j["spectrum_slow"] = c.spectrum_slow;
    j["alpha"] = c.alpha;
    j["beta"] = c.beta;
    j["noise_kind"] = c.noise_kind;
    j["sigma"] = c.sigma;
    j["steps"] = c.steps;
    j["trials"] = c.trials;
    j["seed"] = c.seed;
    j["init"] = c.init;
    j["checkpoint_count"] = c.checkpoint_count;
    j["bound_check_ts"] = c.bound_check_ts;
    j["fit_window_lo"] = c.fit_window_lo;
    j["fit_window_hi"] = c.fit_window_hi;
    // out_dir is a location, not an experiment parameter; leaving it out keeps
    // artifacts byte-identical across output directories.
    j["dump_system"] = c.dump_system;
    j["system_file"] = c.system_file;
    j["basis_x_file"] = c.basis_x_file;
    j["basis_y_file"] = c.basis_y_file;
    return j;
}

std::vector<CurvePoint> curve_of(std::span<const TraceRow> rows,
                                 double TraceRow::* field) {
    std::vector<CurvePoint> c;
    c.reserve(rows.size());
    for (const auto& r : rows) c.push_back({r.t, r.*field});
    return c;
}

struct InstanceBundle {
    TwoTimeScaleSystem system;
    SolutionPair solution;
    Subspace sub_x;
    Subspace sub_y;
};

InstanceBundle make_instance(const RunConfig& cfg) {
    if (!cfg.system_file.empty()) {
        TwoTimeScaleSystem sys = load_system(cfg.system_file);
        Subspace sx = cfg.basis_x_file.empty() ? Subspace::full(sys.fast_dim())
                                               : load_subspace(cfg.basis_x_file);
        Subspace sy = cfg.basis_y_file.empty() ? Subspace::full(sys.slow_dim())
                                               : load_subspace(cfg.basis_y_file);
        SolutionPair sol = unconstrained_solution(sys);
        return {std::move(sys), std::move(sol), std::move(sx), std::move(sy)};
    }
    SyntheticConfig scfg;
    scfg.n = cfg.n;
    scfg.m = cfg.m;
    scfg.r = cfg.r;
    scfg.coupling_scale = cfg.coupling_scale;
    scfg.decay_rate = cfg.decay_rate;
    scfg.spectrum_fast = cfg.spectrum_fast;
    scfg.spectrum_slow = cfg.spectrum_slow;
    scfg.seed = cfg.seed;
    SyntheticInstance inst = generate(scfg);
    return {std::move(inst.system), std::move(inst.solution),
            std::move(inst.sub_x), std::move(inst.sub_y)};
}

NoiseModel make_noise(const RunConfig& cfg) {
    return cfg.noise_kind == "none" ? NoiseModel::none()
                                    : NoiseModel::gaussian(cfg.sigma);
}

struct Analysis {
    AssumptionReport report;
    ConstrainedSolution constrained;
    ResolventConstants rc;
    TheoremConstants tc;
    double eps_x_sq = 0.0;
    double eps_y_sq = 0.0;
    double floor_x = 0.0;  // |x_p - x*|^2
    double floor_y = 0.0;  // |y_p - y*|^2
};

Analysis analyze(const TwoTimeScaleSystem& sys, const Subspace& sub_x,
                 const Subspace& sub_y, const SolutionPair& sol,
                 const RunConfig& cfg) {
    Analysis an;
    an.report = check_assumptions(sys, sub_x, sub_y, cfg.alpha, cfg.beta);
    an.constrained = constrained_solution(sys, sub_x, sub_y);
    std::tie(an.eps_x_sq, an.eps_y_sq) = approximation_errors(sol, sub_x, sub_y);
    an.floor_x = (an.constrained.x_p - sol.x_star).squaredNorm();
    an.floor_y = (an.constrained.y_p - sol.y_star).squaredNorm();
    an.rc = resolvent_constants(sys, sub_x, sub_y);
    const NoiseModel noise = make_noise(cfg);
    an.tc = theorem_constants(an.rc, sys, noise.c_eps(sys.fast_dim()),
                              noise.c_psi(sys.slow_dim()));
    return an;
}

json approximation_json(const Analysis& an) {
    return json{{"eps_x_sq", an.eps_x_sq},
                {"eps_y_sq", an.eps_y_sq},
                {"floor_x", an.floor_x},
                {"floor_y", an.floor_y},
                {"b_bound_x", an.tc.b_xx * an.eps_x_sq + an.tc.b_xy * an.eps_y_sq},
                {"b_bound_y", an.tc.b_yx * an.eps_x_sq + an.tc.b_yy * an.eps_y_sq},
                {"constrained_residual_fast", an.constrained.residual_fast},
                {"constrained_residual_slow", an.constrained.residual_slow}};
}

/// Slope, majorant, and 1/t-law fits; keys are omitted instead of fabricated
/// when a window holds fewer than 5 checkpoints.
json fits_json(std::span<const TraceRow> rows, const Analysis& an,
               FitWindow window) {
    json j;
    const auto stat_x = curve_of(rows, &TraceRow::stat_x);
    const auto stat_y = curve_of(rows, &TraceRow::stat_y);
    const auto total_x = curve_of(rows, &TraceRow::total_x);
    const auto total_y = curve_of(rows, &TraceRow::total_y);
    try {
        j["slope_stat_x"] = fit_loglog_slope(stat_x, window);
        j["slope_stat_y"] = fit_loglog_slope(stat_y, window);
    } catch (const InsufficientData&) {
    }
    try {
        j["majorant_L_x"] = fit_majorant_constant(total_x, an.floor_x);
        j["majorant_L_y"] = fit_majorant_constant(total_y, an.floor_y);
    } catch (const InsufficientData&) {
    }
    try {
        const auto [lx, dx] = fit_inverse_t_law(stat_x, window);
        const auto [ly, dy] = fit_inverse_t_law(stat_y, window);
        j["stat_law_x"] = json{{"L_hat", lx}, {"D_hat", dx}};
        j["stat_law_y"] = json{{"L_hat", ly}, {"D_hat", dy}};
    } catch (const InsufficientData&) {
    }
    return j;
}

json margins_json(std::span<const TraceRow> rows,
                  std::span<const BoundPoint> bounds,
                  std::span<const long> check_ts) {
    json arr = json::array();
    for (long t : check_ts) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].t != t) continue;
            json entry;
            entry["t"] = t;
            entry["lhs_x"] = rows[i].total_x;
            entry["rhs_x"] = bounds[i].bound_x;
            entry["margin_x"] = rows[i].total_x > 0.0
                                    ? bounds[i].bound_x / rows[i].total_x
                                    : std::numeric_limits<double>::infinity();
            entry["lhs_y"] = rows[i].total_y;
            entry["rhs_y"] = bounds[i].bound_y;
            entry["margin_y"] = rows[i].total_y > 0.0
                                    ? bounds[i].bound_y / rows[i].total_y
                                    : std::numeric_limits<double>::infinity();
            entry["stat_x"] = rows[i].stat_x;
            entry["stat_y"] = rows[i].stat_y;
            arr.push_back(std::move(entry));
        }
    }
    return arr;
}

void write_summary(const std::filesystem::path& out_dir, const json& summary) {
    write_text_file(out_dir / "summary.json", summary.dump(2) + "\n");
}

Vector init_vector(const RunConfig& cfg, const Vector& constrained_point,
                   Index dim) {
    if (cfg.init == "constrained") return constrained_point;
    return Vector::Zero(dim);
}

void run_synthetic(const RunConfig& cfg,
                   const std::filesystem::path& out_dir) {
    const InstanceBundle inst = make_instance(cfg);
    const Analysis an = analyze(inst.system, inst.sub_x, inst.sub_y,
                                inst.solution, cfg);
    const StepSizes steps{cfg.alpha, cfg.beta};
    const NoiseModel noise = make_noise(cfg);
    const std::vector<long> grid = geometric_checkpoints(
        cfg.steps, cfg.checkpoint_count, cfg.bound_check_ts);
    const ReferencePoints refs{an.constrained.x_p, an.constrained.y_p,
                               inst.solution.x_star, inst.solution.y_star};
    const Vector x0 = init_vector(cfg, an.constrained.x_p, inst.system.fast_dim());
    const Vector y0 = init_vector(cfg, an.constrained.y_p, inst.system.slow_dim());

    const ExperimentTrace agg =
        run_experiment(inst.system, inst.sub_x, inst.sub_y, steps, noise,
                       cfg.steps, cfg.trials, cfg.seed, grid, x0, y0, refs);
    const std::vector<BoundPoint> bounds =
        bound_curve(an.tc, an.eps_x_sq, an.eps_y_sq, grid);
    write_trace_csv(out_dir / "trace.csv", agg.mean_rows, bounds);

    json summary;
    summary["command"] = cfg.experiment;
    summary["config"] = config_json(cfg);
    summary["assumptions"] = report_json(an.report);
    summary["constants"] = constants_json(an.rc, an.tc);
    summary["approximation"] = approximation_json(an);
    summary["fits"] = fits_json(agg.mean_rows, an,
                                FitWindow{cfg.fit_window_lo, cfg.fit_window_hi});
    summary["bound_margins"] = margins_json(agg.mean_rows, bounds, cfg.bound_check_ts);
    write_summary(out_dir, summary);

    if (cfg.dump_system) {
        save_system(out_dir / "system.json", inst.system);
        save_subspace(out_dir / "basis_x.json", inst.sub_x);
        save_subspace(out_dir / "basis_y.json", inst.sub_y);
    }
}

void run_gtd(const RunConfig& cfg, const std::filesystem::path& out_dir) {
    const auto [mdp, vs] = build_mdp(cfg.seed);
    const TwoTimeScaleSystem sys = gtd_system(mdp);
    const SolutionPair uncon = unconstrained_solution(sys);
    const auto families = feature_families(vs, cfg.seed);
    const StepSizes steps{cfg.alpha, cfg.beta};
    const NoiseModel noise = make_noise(cfg);
    const std::vector<long> grid = geometric_checkpoints(
        cfg.steps, cfg.checkpoint_count, cfg.bound_check_ts);

    json summary;
    summary["command"] = cfg.experiment;
    summary["config"] = config_json(cfg);
    const Vector bellman_residual =
        mdp.reward + mdp.gamma * mdp.transition * vs.v_pi - vs.v_pi;
    summary["mdp"] = json{{"states", mdp.num_states()},
                          {"gamma", mdp.gamma},
                          {"coeffs", vector_to_json(vs.coeffs)},
                          {"bellman_residual", bellman_residual.norm()},
                          {"v_pi_norm_sq", vs.v_pi.squaredNorm()}};

    json fam_json;
    std::vector<double> eps_order;
    for (const FeatureFamily& fam : families) {
        const Subspace sub(fam.phi);
        const Analysis an = analyze(sys, sub, sub, uncon, cfg);
        const ReferencePoints refs{an.constrained.x_p, an.constrained.y_p,
                                   uncon.x_star, uncon.y_star};
        const Vector x0 = init_vector(cfg, an.constrained.x_p, sys.fast_dim());
        const Vector y0 = init_vector(cfg, an.constrained.y_p, sys.slow_dim());
        // All families share the master seed (common random numbers).
        const ExperimentTrace agg =
            run_experiment(sys, sub, sub, steps, noise, cfg.steps, cfg.trials,
                           cfg.seed, grid, x0, y0, refs);
        const std::vector<BoundPoint> bounds =
            bound_curve(an.tc, an.eps_x_sq, an.eps_y_sq, grid);
        const std::string label = to_string(fam.label);
        write_trace_csv(out_dir / ("trace_" + label + ".csv"), agg.mean_rows,
                        bounds);
        json f;
        f["assumptions"] = report_json(an.report);
        f["constants"] = constants_json(an.rc, an.tc);
        f["approximation"] = approximation_json(an);
        f["fits"] = fits_json(agg.mean_rows, an,
                              FitWindow{cfg.fit_window_lo, cfg.fit_window_hi});
        f["bound_margins"] = margins_json(agg.mean_rows, bounds, cfg.bound_check_ts);
        fam_json[label] = std::move(f);
        eps_order.push_back(an.eps_y_sq);

        if (cfg.dump_system) {
            save_subspace(out_dir / ("features_" + label + ".json"), sub);
        }
    }
    summary["families"] = std::move(fam_json);
    summary["alignment_ordering_ok"] =
        eps_order[0] < eps_order[1] && eps_order[1] < eps_order[2];
    write_summary(out_dir, summary);

    if (cfg.dump_system) save_system(out_dir / "system.json", sys);
}

void run_check(const RunConfig& cfg, const std::filesystem::path& out_dir,
               bool with_bounds) {
    const InstanceBundle inst = make_instance(cfg);
    json summary;
    summary["command"] = cfg.experiment;
    summary["config"] = config_json(cfg);
    const AssumptionReport rep =
        check_assumptions(inst.system, inst.sub_x, inst.sub_y, cfg.alpha, cfg.beta);
    summary["assumptions"] = report_json(rep);

    // Constants require the checker's invertibility conditions; report what
    // can be computed and leave the rest absent.
    try {
        const Analysis an =
            analyze(inst.system, inst.sub_x, inst.sub_y, inst.solution, cfg);
        summary["constants"] = constants_json(an.rc, an.tc);
        summary["approximation"] = approximation_json(an);
        if (with_bounds) {
            const std::vector<long> grid = geometric_checkpoints(
                cfg.steps, cfg.checkpoint_count, cfg.bound_check_ts);
            const std::vector<BoundPoint> bounds =
                bound_curve(an.tc, an.eps_x_sq, an.eps_y_sq, grid);
            json arr = json::array();
            for (const BoundPoint& b : bounds) {
                arr.push_back(json{{"t", b.t},
                                   {"bound_x", b.bound_x},
                                   {"bound_y", b.bound_y}});
            }
            summary["bound_curve"] = std::move(arr);
        }
    } catch (const NumericError& e) {
        summary["constants_error"] = e.what();
    }
    write_summary(out_dir, summary);

    if (cfg.dump_system) {
        save_system(out_dir / "system.json", inst.system);
        save_subspace(out_dir / "basis_x.json", inst.sub_x);
        save_subspace(out_dir / "basis_y.json", inst.sub_y);
    }
}

}  // namespace

void run(const RunConfig& config) {
    config.validate();
    const std::filesystem::path out_dir(config.out_dir);
    std::filesystem::create_directories(out_dir);
    if (config.experiment == "synthetic") {
        run_synthetic(config, out_dir);
    } else if (config.experiment == "gtd") {
        run_gtd(config, out_dir);
    } else if (config.experiment == "check") {
        run_check(config, out_dir, /*with_bounds=*/false);
    } else {
        run_check(config, out_dir, /*with_bounds=*/true);
    }
}

}  // namespace ttsa
