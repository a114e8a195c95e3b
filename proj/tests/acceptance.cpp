// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "enkf_lab/commands.hpp"
#include "enkf_lab/csv.hpp"
#include "enkf_lab/dynamics.hpp"
#include "enkf_lab/enkf.hpp"
#include "enkf_lab/experiments.hpp"
#include "enkf_lab/kalman.hpp"
#include "support.hpp"

using namespace enkf_lab;
using testing::Gen;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome woodbury_identity() {
    const auto t0 = Clock::now();
    Gen g(1001);
    double worst = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = g.index(1, 8);
        const std::size_t k = g.index(1, 3);
        const Matrix a = g.spd(n);
        const Matrix u = g.matrix(n, k);
        const Matrix c = g.spd(k);
        const Matrix v = g.matrix(k, n);
        const Matrix w = woodbury_inverse(inverse(a), u, c, v);
        const Matrix e = matmul(w, a + matmul(matmul(u, c), v)) - Matrix::identity(n);
        worst = std::max(worst, frobenius_norm(e));
    }
    const double secs = seconds_since(t0);
    return {worst < 1e-9 && secs < 1.0,
            fmt("200 instances, max ||W(A+UCV) - I||_F = %.3e (< 1e-9), %.3f s (< 1 s)", worst, secs)};
}

Outcome scalar_fusion() {
    const AnalysisState a =
        analyze({Vector{1.0}, Matrix{{1.0}}}, Vector{2.0}, {Matrix{{1.0}}, Matrix{{1.0}}});
    const double dk = std::abs(a.gain(0, 0) - 0.5);
    const double dm = std::abs(a.posterior.mean[0] - 1.5);
    const double dc = std::abs(a.posterior.covariance(0, 0) - 0.5);
    return {dk <= 1e-12 && dm <= 1e-12 && dc <= 1e-12,
            fmt("K=%.17g m=%.17g C=%.17g (expect 0.5, 1.5, 0.5 within 1e-12)", a.gain(0, 0),
                a.posterior.mean[0], a.posterior.covariance(0, 0))};
}

Outcome information_form() {
    Gen g(1003);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = g.index(1, 4), m = g.index(1, 4);
        const GaussianState prior{g.vector(n), g.spd(n)};
        const ObservationModel obs{g.matrix(m, n), g.spd(m)};
        const Vector y = g.vector(m);
        const GaussianState info = analyze_information_form(prior, y, obs);
        const GaussianState std_form = analyze(prior, y, obs).posterior;
        worst = std::max(worst, norm2(info.mean - std_form.mean) / norm2(std_form.mean));
        worst = std::max(worst, frobenius_norm(info.covariance - std_form.covariance) /
                                    frobenius_norm(std_form.covariance));
    }
    return {worst < 1e-9, fmt("100 instances n,m <= 4, max relative difference %.3e (< 1e-9)", worst)};
}

Outcome gain_optimality() {
    Gen g(1004);
    double min_margin = INFINITY;
    for (int rep = 0; rep < 50; ++rep) {
        const Matrix c = g.spd(3);
        const ObservationModel obs{Matrix::identity(3), 0.01 * Matrix::identity(3)};
        const Matrix k = kalman_gain(c, obs);
        const double best = trace(joseph_covariance(c, k, obs));
        for (int d = 0; d < 20; ++d) {
            const Matrix dir = g.matrix(3, 3);
            const Matrix k2 = k + (1e-3 / frobenius_norm(dir)) * dir;
            min_margin = std::min(min_margin, trace(joseph_covariance(c, k2, obs)) - best);
        }
    }
    return {min_margin > 0.0,
            fmt("50 instances x 20 perturbations (|delta| = 1e-3), min J(K+delta) - J(K) = %.3e (> 0)",
                min_margin)};
}

Outcome enkf_to_kf() {
    const auto t0 = Clock::now();
    const Matrix m{{0.9, 0.2}, {-0.1, 0.8}};
    const Matrix sigma{{0.05, 0.01}, {0.01, 0.03}};
    const ObservationModel obs{Matrix{{1.0, 0.0}}, Matrix{{0.1}}};
    const Vector center{1.0, -1.0};
    const double spread = 0.5;
    const Vector y{0.7};
    const std::size_t count = 10000;

    const GaussianState prior = predict({center, spread * spread * Matrix::identity(2)}, {m, sigma});
    const GaussianState kf = analyze(prior, y, obs).posterior;

    int passes = 0;
    double worst_cov = 0.0, worst_se = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const RngStream base(seed);
        const Ensemble e0 = init_ensemble(center, spread, count, derive_stream(base, 0));
        const ForecastResult f = enkf_predict(e0, LinearTransition(m), sigma, derive_stream(base, 1));
        const AnalysisResult a =
            enkf_analyze(f.ensemble, y, obs, derive_stream(base, 2), EnkfOptions{0.0, 1.0});
        const double cov_rel =
            frobenius_norm(a.stats.covariance - kf.covariance) / frobenius_norm(kf.covariance);
        double se_mult = 0.0;
        for (std::size_t i = 0; i < 2; ++i)
            se_mult = std::max(se_mult, std::abs(a.stats.mean[i] - kf.mean[i]) /
                                            std::sqrt(kf.covariance(i, i) / static_cast<double>(count)));
        worst_cov = std::max(worst_cov, cov_rel);
        worst_se = std::max(worst_se, se_mult);
        passes += (cov_rel < 0.10 && se_mult <= 3.0);
    }
    const double secs = seconds_since(t0);
    return {passes >= 18 && secs < 10.0,
            fmt("%d/20 seeds within 3 SE and 10%% covariance (need 18); worst %.2f SE, %.1f%%; %.2f s",
                passes, worst_se, 100.0 * worst_cov, secs)};
}

Outcome zero_perturbation_covariance() {
    Gen g(1006);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = g.index(1, 4), m = g.index(1, 4), count = g.index(2, 12);
        const Ensemble e(g.matrix(n, count));
        const ObservationModel obs{g.matrix(m, n), g.spd(m)};
        const AnalysisResult a = enkf_analyze_with_perturbations(e, g.vector(m), obs, Matrix(m, count),
                                                                 EnkfOptions{0.0, 1.0});
        const Matrix ref = deterministic_analysis_covariance(ensemble_stats(e), a.gain, obs);
        worst = std::max(worst, testing::max_abs_diff(a.stats.covariance, ref));
    }
    return {worst <= 1e-12, fmt("100 instances, max |sample cov - (I-KH)C(I-KH)^T| = %.3e (<= 1e-12)", worst)};
}

Outcome rk4_order() {
    const DriftFunction decay{1, [](const Vector& v) { return -1.0 * v; }};
    auto exp_err = [&](std::size_t n) {
        return std::abs(integrate_rk4(decay, Vector{1.0}, 0.1, n)[0] - std::exp(-0.1));
    };
    const double r_exp = exp_err(1) / exp_err(2);

    const auto f = lorenz_drift_function();
    const Vector v0{-10, -10, 20};
    const Vector a = integrate_rk4(f, v0, 0.1, 10);
    const Vector b = integrate_rk4(f, v0, 0.1, 20);
    const Vector c = integrate_rk4(f, v0, 0.1, 40);
    const double r_lorenz = norm2(a - b) / norm2(b - c);

    auto in_band = [](double r) { return r >= 12.0 && r <= 20.0; };
    return {in_band(r_exp) && in_band(r_lorenz),
            fmt("error reduction under step halving: exponential %.2f, Lorenz %.2f (both in [12, 20])",
                r_exp, r_lorenz)};
}

const SweepResult& default_sweep(double* secs = nullptr) {
    static double elapsed = 0.0;
    static const SweepResult result = [] {
        const auto t0 = Clock::now();
        SweepResult r = sweep_ensemble_sizes(TwinExperimentConfig{});
        elapsed = seconds_since(t0);
        return r;
    }();
    if (secs) *secs = elapsed;
    return result;
}

Outcome twin_experiment() {
    double secs = 0.0;
    const SweepResult& r = default_sweep(&secs);
    double e20 = NAN, e50 = NAN, e100 = NAN;
    for (const SweepSummary& s : r.summaries) {
        if (s.ensemble_size == 20) e20 = s.median;
        if (s.ensemble_size == 50) e50 = s.median;
        if (s.ensemble_size == 100) e100 = s.median;
    }
    return {e100 < e20 && secs < 60.0,
            fmt("median final running mean error N=20 %.4f, N=50 %.4f, N=100 %.4f; "
                "need N=100 < N=20; sweep %.2f s (< 60 s)",
                e20, e50, e100, secs)};
}

Outcome trace_reduction() {
    const SweepResult& r = default_sweep();
    std::size_t steps = 0, violations = 0, raw_violations = 0, failed = 0;
    for (const SweepCell& cell : r.cells) {
        if (!cell.series) {
            ++failed;
            continue;
        }
        const MetricSeries& s = *cell.series;
        for (std::size_t j = 0; j < s.steps(); ++j) {
            ++steps;
            violations += s.anal_cov_trace[j] > s.pred_cov_trace[j] + 1e-9;
            raw_violations += s.anal_cov_trace[j] > s.pred_sample_cov_trace[j] + 1e-9;
        }
    }
    return {violations == 0 && failed == 0,
            fmt("%zu steps over 3 N x 20 seeds: %zu violations against the forecast covariance used "
                "by the analysis (C + qI); %zu against the raw forecast sample covariance",
                steps, violations, raw_violations)};
}

Outcome sweep_determinism() {
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / "enkf_lab_acceptance";
    fs::remove_all(root);
    const TwinExperimentConfig config;
    cmd_sweep(config, {root / "a", OutputFormat::both});
    cmd_sweep(config, {root / "b", OutputFormat::both});
    std::size_t files = 0, differing = 0;
    for (const auto& entry : fs::directory_iterator(root / "a")) {
        ++files;
        const fs::path other = root / "b" / entry.path().filename();
        if (!fs::exists(other) || read_file(entry.path()) != read_file(other)) ++differing;
    }
    std::size_t files_b = 0;
    for ([[maybe_unused]] const auto& entry : fs::directory_iterator(root / "b")) ++files_b;
    fs::remove_all(root);
    return {files >= 2 && differing == 0 && files == files_b,
            fmt("two cmd_sweep runs: %zu files each, %zu differ", files, differing)};
}

Outcome controlled_contraction() {
    const auto e = controlled_map_errors(1.2, 0.5, 1.0, 0.0, 50);
    std::size_t first_below = 0;
    for (std::size_t j = 0; j < e.size(); ++j)
        if (std::abs(e[j]) < 1e-6) {
            first_below = j;
            break;
        }
    const auto g = controlled_map_errors(1.2, 0.0, 1.0, 0.0, 50);
    bool grows = true;
    for (std::size_t j = 0; j + 1 < g.size(); ++j) grows = grows && std::abs(g[j + 1]) > std::abs(g[j]);
    return {first_below > 0 && first_below <= 50 && grows,
            fmt("K=0.5: |e| < 1e-6 first at j=%zu (<= 50), |e_50| = %.3e; K=0: |e_50| = %.3e, monotone growth %s",
                first_below, std::abs(e.back()), std::abs(g.back()), grows ? "yes" : "no")};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"AC1 Woodbury identity", woodbury_identity},
        {"AC2 linear KF scalar fusion", scalar_fusion},
        {"AC3 information-form equivalence", information_form},
        {"AC4 gain optimality", gain_optimality},
        {"AC5 EnKF to KF convergence", enkf_to_kf},
        {"AC6 zero-perturbation covariance", zero_perturbation_covariance},
        {"AC7 RK4 order", rk4_order},
        {"AC8 Lorenz twin experiment", twin_experiment},
        {"AC9 trace reduction every step", trace_reduction},
        {"AC10 sweep determinism", sweep_determinism},
        {"AC11 controlled-map contraction", controlled_contraction},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
