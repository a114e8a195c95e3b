#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "enkf_lab/enkf.hpp"
#include "support.hpp"

using namespace enkf_lab;
using testing::Gen;
using testing::max_abs_diff;

namespace {

const EnkfOptions kNoJitter{0.0, 1.0};

Ensemble scalar_ensemble(std::initializer_list<double> values) {
    return Ensemble(Matrix(1, values.size(), std::vector<double>(values)));
}

}  // namespace

TEST_CASE("Ensemble shape rules") {
    CHECK_THROWS_AS(Ensemble(Matrix(3, 1)), InvalidInput);
    CHECK_THROWS_AS(Ensemble::from_members(std::vector<Vector>{Vector{1, 2}}), InvalidInput);
    CHECK_THROWS_AS(Ensemble::from_members(std::vector<Vector>{Vector{1, 2}, Vector{1.0}}),
                    InvalidInput);

    const std::vector<Vector> members{Vector{1, 2}, Vector{3, 4}, Vector{5, 6}};
    const Ensemble e = Ensemble::from_members(members);
    CHECK(e.dim() == 2);
    CHECK(e.size() == 3);
    CHECK(e.member(1) == Vector{3, 4});
    CHECK(e.members() == members);
}

TEST_CASE("ensemble_stats agree with the list-based statistics") {
    Gen g(51);
    for (int rep = 0; rep < 30; ++rep) {
        const Ensemble e(g.matrix(3, g.index(2, 40)));
        const EnsembleStats s = ensemble_stats(e);
        const auto members = e.members();
        const Vector mean = sample_mean(members);
        CHECK(max_abs_diff(s.mean, mean) < 1e-14);
        CHECK(max_abs_diff(s.covariance, sample_covariance(members, mean)) < 1e-14);
        CHECK(s.covariance == transpose(s.covariance));
    }
}

TEST_CASE("init_ensemble") {
    const Vector center{-11, -12, 10};
    SUBCASE("zero spread") {
        const Ensemble e = init_ensemble(center, 0.0, 5, RngStream(1));
        for (const Vector& v : e.members()) CHECK(v == center);
    }
    SUBCASE("N=100 mean near the center") {
        const Ensemble e = init_ensemble(center, 0.1, 100, RngStream(2));
        const EnsembleStats s = ensemble_stats(e);
        for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(s.mean[i] - center[i]) < 0.05);
    }
    SUBCASE("N=1e4 covariance near 0.01 I") {
        const Ensemble e = init_ensemble(center, 0.1, 10000, RngStream(3));
        const Matrix target = 0.01 * Matrix::identity(3);
        const Matrix c = ensemble_stats(e).covariance;
        CHECK(frobenius_norm(c - target) / frobenius_norm(target) < 0.05);
    }
    SUBCASE("member k does not depend on N") {
        const Ensemble small = init_ensemble(center, 0.1, 20, RngStream(4));
        const Ensemble large = init_ensemble(center, 0.1, 100, RngStream(4));
        for (std::size_t k = 0; k < 20; ++k) CHECK(small.member(k) == large.member(k));
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(init_ensemble(center, 0.1, 1, RngStream(5)), InvalidInput);
        CHECK_THROWS_AS(init_ensemble(center, -0.1, 4, RngStream(5)), InvalidInput);
    }
}

TEST_CASE("enkf_predict") {
    SUBCASE("identity map without noise") {
        Gen g(52);
        const Ensemble e(g.matrix(3, 6));
        const ForecastResult f =
            enkf_predict(e, LinearTransition(Matrix::identity(3)), Matrix(3, 3), RngStream(1));
        CHECK(f.ensemble.states() == e.states());
    }
    SUBCASE("doubling map on {1, 3}") {
        const FunctionTransition twice(1, [](const Vector& v) { return 2.0 * v; });
        const ForecastResult f =
            enkf_predict(scalar_ensemble({1, 3}), twice, Matrix(1, 1), RngStream(1));
        CHECK(f.ensemble.member(0)[0] == 2.0);
        CHECK(f.ensemble.member(1)[0] == 6.0);
        CHECK(f.stats.mean[0] == 4.0);
        CHECK(f.stats.covariance(0, 0) == 8.0);
    }
    SUBCASE("Lorenz members match single-state integration") {
        const Ensemble e = init_ensemble(Vector{-11, -12, 10}, 1.0, 9, RngStream(6));
        const ForecastResult f =
            enkf_predict(e, LorenzTransition({}, 0.1, 10), Matrix(3, 3), RngStream(7));
        for (std::size_t k = 0; k < e.size(); ++k)
            CHECK(f.ensemble.member(k) ==
                  integrate_rk4(lorenz_drift_function(), e.member(k), 0.1, 10));
    }
    SUBCASE("process noise has the requested covariance") {
        const Ensemble e(Matrix(2, 20000));
        const Matrix sigma{{0.5, 0.1}, {0.1, 0.2}};
        const ForecastResult f =
            enkf_predict(e, LinearTransition(Matrix::identity(2)), sigma, RngStream(8));
        CHECK(frobenius_norm(f.stats.covariance - sigma) / frobenius_norm(sigma) < 0.05);
    }
    SUBCASE("divergence names the member") {
        const FunctionTransition blow(1, [](const Vector& v) {
            return Vector{v[0] > 1.5 ? std::nan("") : v[0]};
        });
        try {
            (void)enkf_predict(scalar_ensemble({0, 1, 2, 0}), blow, Matrix(1, 1), RngStream(1));
            FAIL("expected divergence");
        } catch (const DivergenceError& err) {
            CHECK(err.index() == 2);
        }
    }
}

TEST_CASE("enkf_gain") {
    const ObservationModel scalar_obs{Matrix{{1.0}}, Matrix{{2.0}}};
    CHECK(enkf_gain({Vector{0.0}, Matrix{{2.0}}}, scalar_obs)(0, 0) == 0.5);
    CHECK(enkf_gain({Vector{0.0}, Matrix{{0.0}}}, scalar_obs)(0, 0) == 0.0);

    Gen g(53);
    const Matrix c = g.spd(3);
    const ObservationModel obs{g.matrix(2, 3), g.spd(2)};
    CHECK(enkf_gain({Vector(3), c}, obs) == kalman_gain(c, obs));
}

TEST_CASE("enkf_analyze") {
    const ObservationModel scalar_obs{Matrix{{1.0}}, Matrix{{2.0}}};

    SUBCASE("hand case {0, 2}") {
        const AnalysisResult a = enkf_analyze_with_perturbations(
            scalar_ensemble({0, 2}), Vector{1.0}, scalar_obs, Matrix{{1.0, -1.0}}, kNoJitter);
        CHECK(a.gain(0, 0) == 0.5);
        CHECK(a.ensemble.member(0)[0] == 1.0);
        CHECK(a.ensemble.member(1)[0] == 1.0);
        CHECK(a.stats.covariance(0, 0) == 0.0);
        CHECK(a.mean_update[0] == 1.0);
    }
    SUBCASE("collapsed ensemble is left alone") {
        const Ensemble e = scalar_ensemble({3, 3, 3});
        const AnalysisResult a = enkf_analyze(e, Vector{10.0}, scalar_obs, RngStream(1), kNoJitter);
        CHECK(a.ensemble.states() == e.states());
    }
    SUBCASE("perfect observations pull every member to y") {
        Gen g(54);
        const Ensemble e(g.matrix(3, 8));
        const Vector y{1, 2, 3};
        const ObservationModel obs{Matrix::identity(3), 1e-12 * Matrix::identity(3)};
        const AnalysisResult a = enkf_analyze_with_perturbations(e, y, obs, Matrix(3, 8), kNoJitter);
        for (const Vector& v : a.ensemble.members()) CHECK(max_abs_diff(v, y) < 1e-9);
    }
    SUBCASE("zero perturbations reproduce the deterministic covariance") {
        Gen g(55);
        for (int rep = 0; rep < 50; ++rep) {
            const std::size_t n = g.index(1, 4), m = g.index(1, 4), count = g.index(2, 12);
            const Ensemble e(g.matrix(n, count));
            const ObservationModel obs{g.matrix(m, n), g.spd(m)};
            const AnalysisResult a =
                enkf_analyze_with_perturbations(e, g.vector(m), obs, Matrix(m, count), kNoJitter);
            const Matrix ref = deterministic_analysis_covariance(ensemble_stats(e), a.gain, obs);
            CHECK(max_abs_diff(a.stats.covariance, ref) < 1e-12);
            CHECK(trace(ref) <= trace(ensemble_stats(e).covariance) + 1e-12);
        }
    }
    SUBCASE("analysis mean follows the realized perturbation mean") {
        Gen g(56);
        for (int rep = 0; rep < 30; ++rep) {
            const std::size_t count = g.index(2, 30);
            const Ensemble e(g.matrix(3, count));
            const ObservationModel obs{g.matrix(2, 3), g.spd(2)};
            const Vector y = g.vector(2);
            const AnalysisResult a = enkf_analyze(e, y, obs, RngStream(rep), kNoJitter);

            Vector eta_bar(2);
            for (std::size_t k = 0; k < count; ++k)
                eta_bar = eta_bar + a.perturbations.column_vector(k);
            eta_bar = (1.0 / static_cast<double>(count)) * eta_bar;

            const Vector m_hat = ensemble_stats(e).mean;
            const Vector expected = m_hat + matvec(a.gain, y + eta_bar - matvec(obs.op, m_hat));
            CHECK(max_abs_diff(a.stats.mean, expected) < 1e-12);
            CHECK(max_abs_diff(a.mean_update, m_hat + matvec(a.gain, y - matvec(obs.op, m_hat))) <
                  1e-12);
        }
    }
    SUBCASE("jitter enters the gain") {
        const AnalysisResult a = enkf_analyze_with_perturbations(
            scalar_ensemble({0, 2}), Vector{1.0}, scalar_obs, Matrix{{0.0, 0.0}}, {0.5, 1.0});
        CHECK(a.prior_covariance(0, 0) == 2.5);
        CHECK(a.gain(0, 0) == doctest::Approx(2.5 / 4.5).epsilon(1e-15));
    }
    SUBCASE("members permute with their perturbations") {
        Gen g(57);
        const std::size_t count = 7;
        const Ensemble e(g.matrix(3, count));
        const ObservationModel obs{Matrix::identity(3), 0.01 * Matrix::identity(3)};
        const Matrix eta = 0.1 * g.matrix(3, count);
        const Vector y = g.vector(3);

        std::vector<std::size_t> perm(count);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), g.engine());
        Matrix e_perm(3, count), eta_perm(3, count);
        for (std::size_t k = 0; k < count; ++k) {
            e_perm.set_column(k, e.member(perm[k]));
            eta_perm.set_column(k, eta.column_vector(perm[k]));
        }

        const AnalysisResult a = enkf_analyze_with_perturbations(e, y, obs, eta);
        const AnalysisResult b = enkf_analyze_with_perturbations(Ensemble(e_perm), y, obs, eta_perm);
        for (std::size_t k = 0; k < count; ++k)
            CHECK(max_abs_diff(b.ensemble.member(k), a.ensemble.member(perm[k])) < 1e-13);
    }
    SUBCASE("errors") {
        const Ensemble e = scalar_ensemble({0, 1});
        CHECK_THROWS_AS(enkf_analyze(e, Vector{1, 2}, scalar_obs, RngStream(1)), InvalidInput);
        CHECK_THROWS_AS(
            enkf_analyze_with_perturbations(e, Vector{1.0}, scalar_obs, Matrix(1, 3)),
            InvalidInput);
        CHECK_THROWS_AS(enkf_analyze(e, Vector{1.0}, scalar_obs, RngStream(1), {0.001, 1.1}),
                        InvalidInput);
    }
}

TEST_CASE("deterministic_analysis_covariance") {
    Gen g(58);
    const EnsembleStats s{Vector(3), g.spd(3)};
    const ObservationModel obs{Matrix::identity(3), Matrix::identity(3)};
    CHECK(max_abs_diff(deterministic_analysis_covariance(s, Matrix(3, 3), obs), s.covariance) < 1e-15);
    CHECK(max_abs(deterministic_analysis_covariance(s, Matrix::identity(3), obs)) == 0.0);
}

TEST_CASE("one cycle converges to the linear filter for large N") {
    const Matrix m{{0.9, 0.2}, {-0.1, 0.8}};
    const Matrix sigma{{0.05, 0.01}, {0.01, 0.03}};
    const ObservationModel obs{Matrix{{1.0, 0.0}}, Matrix{{0.1}}};
    const Vector center{1.0, -1.0};
    const double spread = 0.5;
    const Vector y{0.7};

    const GaussianState prior = predict({center, spread * spread * Matrix::identity(2)}, {m, sigma});
    const GaussianState kf = analyze(prior, y, obs).posterior;

    int passes = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const RngStream base(seed);
        const Ensemble e0 = init_ensemble(center, spread, 10000, derive_stream(base, 0));
        const ForecastResult f = enkf_predict(e0, LinearTransition(m), sigma, derive_stream(base, 1));
        const AnalysisResult a = enkf_analyze(f.ensemble, y, obs, derive_stream(base, 2), kNoJitter);
        bool ok = frobenius_norm(a.stats.covariance - kf.covariance) / frobenius_norm(kf.covariance) <
                  0.10;
        for (std::size_t i = 0; i < 2; ++i)
            ok = ok && std::abs(a.stats.mean[i] - kf.mean[i]) <=
                           3.0 * std::sqrt(kf.covariance(i, i) / 10000.0);
        passes += ok;
    }
    CHECK(passes >= 18);
}
