#include "qlqg/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace qlqg {

namespace {

constexpr double kPi = 3.14159265358979323846;

double wrap_phase(double th) {
    th = std::fmod(th, kPi);
    if (th < 0.0) th += kPi;
    return th;
}

struct PointEval {
    double e = 0.0;
    double residual = 0.0;
    Mat v;
};

std::optional<PointEval> evaluate_point(const OscillatorParams& model, NetworkConfig cfg,
                                        double t1, double t2) {
    cfg.theta1 = t1;
    cfg.theta2 = t2;
    SystemModel sys = build_oscillator_system(model, cfg);
    StationaryCovariance sol = stationary_covariance(sys);
    if (!sol.converged) return std::nullopt;
    return PointEval{e_min(sol.v), sol.residual, std::move(sol.v.v)};
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

std::vector<double> uniform_grid(double lo, double hi, int points) {
    if (points < 1) throw std::invalid_argument("uniform_grid: need at least one point");
    std::vector<double> g(points);
    if (points == 1) {
        g[0] = lo;
        return g;
    }
    for (int i = 0; i < points; ++i) g[i] = lo + (hi - lo) * i / (points - 1);
    return g;
}

PhaseOptimum optimize_phases(const OscillatorParams& model, NetworkConfig cfg,
                             int grid_points, int refine_iters) {
    if (grid_points < 4)
        throw std::invalid_argument("optimize_phases: phase grid needs at least 4 points per axis");

    PhaseOptimum best;
    best.e_min = std::numeric_limits<double>::infinity();

    // Homodyne selection is pi-periodic up to an output sign, so [0, pi)^2
    // covers all distinct measurements. Fixed scan order keeps tie-breaking
    // deterministic.
    for (int i = 0; i < grid_points; ++i) {
        double t1 = kPi * i / grid_points;
        for (int j = 0; j < grid_points; ++j) {
            double t2 = kPi * j / grid_points;
            auto ev = evaluate_point(model, cfg, t1, t2);
            if (ev && ev->e < best.e_min) {
                best = PhaseOptimum{t1, t2, ev->e, true, ev->residual, std::move(ev->v)};
            }
        }
    }
    if (!best.converged) return best;  // nothing converged anywhere

    // Coordinate descent with interval halving around the best grid point.
    double h = kPi / grid_points / 2.0;
    for (int iter = 0; iter < refine_iters; ++iter) {
        bool improved = false;
        for (int axis = 0; axis < 2; ++axis) {
            for (int dir : {+1, -1}) {
                double t1 = best.theta1;
                double t2 = best.theta2;
                (axis == 0 ? t1 : t2) = wrap_phase((axis == 0 ? t1 : t2) + dir * h);
                auto ev = evaluate_point(model, cfg, t1, t2);
                if (ev && ev->e < best.e_min) {
                    best = PhaseOptimum{t1, t2, ev->e, true, ev->residual, std::move(ev->v)};
                    improved = true;
                }
            }
        }
        if (!improved) h *= 0.5;
    }
    return best;
}

SweepResult run_sweep(const SweepSpec& spec, int threads, std::ostream* log) {
    if (spec.beta1_sq_grid.empty()) throw std::invalid_argument("run_sweep: empty grid");
    const size_t n = spec.beta1_sq_grid.size();

    SweepResult result;
    result.rows.resize(n);

    std::atomic<size_t> next{0};
    std::mutex log_mutex;

    auto worker = [&]() {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= n) break;
            const double b1 = spec.beta1_sq_grid[i];
            NetworkConfig cfg;
            cfg.beta1_sq = b1;
            cfg.beta2_sq = spec.beta2_sq;
            cfg.delta_sq = spec.delta_sq;
            cfg.r = spec.r;

            SweepRow row;
            row.beta1_sq = b1;
            PhaseOptimum opt =
                optimize_phases(spec.model, cfg, spec.phase_grid_points, spec.refine_iters);
            row.converged = opt.converged;
            if (opt.converged) {
                row.theta1_opt = opt.theta1;
                row.theta2_opt = opt.theta2;
                row.cheap_bound = opt.v_inf(0, 0) + opt.v_inf(1, 1);
                row.e_min = (row.cheap_bound - 1.0) / 2.0;
                row.residual = opt.residual;
                row.v_inf = std::move(opt.v_inf);
            }
            cfg.theta1 = row.theta1_opt;
            cfg.theta2 = row.theta2_opt;
            row.drift_hurwitz =
                is_hurwitz(build_oscillator_system(spec.model, cfg).effective_drift());
            result.rows[i] = std::move(row);

            if (log) {
                std::scoped_lock lk(log_mutex);
                *log << "row " << i << " beta1_sq=" << b1;
                if (result.rows[i].converged)
                    *log << " e_min=" << result.rows[i].e_min;
                else
                    *log << " FAILED";
                *log << '\n';
            }
        }
    };

    int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(n)));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    for (const auto& row : result.rows)
        if (!row.converged) ++result.failures;
    return result;
}

std::string to_csv(const SweepResult& result) {
    std::string out = "beta1_sq,theta1_opt,theta2_opt,e_min,cheap_bound,residual,converged\n";
    for (const auto& row : result.rows) {
        out += format_number(row.beta1_sq);
        out += ',';
        out += format_number(row.theta1_opt);
        out += ',';
        out += format_number(row.theta2_opt);
        out += ',';
        out += format_number(row.e_min);
        out += ',';
        out += format_number(row.cheap_bound);
        out += ',';
        out += format_number(row.residual);
        out += ',';
        out += row.converged ? '1' : '0';
        out += '\n';
    }
    return out;
}

void emit_csv(const SweepResult& result, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("emit_csv: cannot open " + path);
    f << to_csv(result);
    if (!f) throw std::runtime_error("emit_csv: write failed for " + path);
}

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

SweepConfig parse_config(std::istream& in) {
    SweepConfig cfg;
    double b1_min = 0.0, b1_max = 1.0;
    int b1_steps = 101;

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.empty())
            throw std::runtime_error("config line " + std::to_string(lineno) + ": empty value");

        auto as_double = [&]() {
            size_t pos = 0;
            double v = std::stod(value, &pos);
            if (pos != value.size())
                throw std::runtime_error("config line " + std::to_string(lineno) + ": bad number '" + value + "'");
            return v;
        };
        auto as_int = [&]() {
            double v = as_double();
            int i = static_cast<int>(v);
            if (i != v)
                throw std::runtime_error("config line " + std::to_string(lineno) + ": expected integer");
            return i;
        };

        if (key == "omega") cfg.spec.model.omega = as_double();
        else if (key == "lambda") cfg.spec.model.lambda = as_double();
        else if (key == "kappa") cfg.spec.model.kappa = as_double();
        else if (key == "delta_detuning") cfg.spec.model.delta_detuning = as_double();
        else if (key == "gamma") cfg.spec.model.gamma = as_double();
        else if (key == "nbar") cfg.spec.model.nbar = as_double();
        else if (key == "r") cfg.spec.r = as_double();
        else if (key == "beta2_sq") cfg.spec.beta2_sq = as_double();
        else if (key == "delta_loss_sq") cfg.spec.delta_sq = as_double();
        else if (key == "beta1_sq_min") b1_min = as_double();
        else if (key == "beta1_sq_max") b1_max = as_double();
        else if (key == "beta1_sq_steps") b1_steps = as_int();
        else if (key == "phase_grid") cfg.spec.phase_grid_points = as_int();
        else if (key == "refine_iters") cfg.spec.refine_iters = as_int();
        else if (key == "output") cfg.output = value;
        else throw std::runtime_error("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }

    if (b1_min < 0.0 || b1_max > 1.0 || b1_min > b1_max)
        throw std::runtime_error("config: beta1_sq range must satisfy 0 <= min <= max <= 1");
    if (cfg.spec.phase_grid_points < 4) throw std::runtime_error("config: phase_grid must be >= 4");
    if (cfg.spec.refine_iters < 0) throw std::runtime_error("config: refine_iters must be >= 0");
    cfg.spec.beta1_sq_grid = uniform_grid(b1_min, b1_max, b1_steps);
    return cfg;
}

SweepConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file " + path);
    return parse_config(f);
}

}  // namespace qlqg
