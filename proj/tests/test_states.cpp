#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "catwit/states.hpp"

using namespace catwit;

TEST_CASE("ideal_hybrid_state") {
    Ket psi = ideal_hybrid_state(1.0, 25);

    SECTION("unit norm") {
        REQUIRE(std::abs(psi.norm() - 1.0) < 1e-12);
    }

    SECTION("reduced qubit is maximally mixed") {
        Operator q = partial_trace_pure(psi, {0});
        Eigen::SelfAdjointEigenSolver<Matrix> es(q.mat);
        REQUIRE(es.eigenvalues()[0] == Catch::Approx(0.5).margin(1e-12));
        REQUIRE(es.eigenvalues()[1] == Catch::Approx(0.5).margin(1e-12));
    }

    SECTION("overlap with |0> (x) odd cat is 1/sqrt(2)") {
        Ket target = tensor(basis_ket(ModeShape{2}, {0}), cat_ket(1.0, CatSign::minus, 25));
        REQUIRE(std::abs(overlap(target, psi) - cplx(1.0 / std::sqrt(2.0), 0)) < 1e-12);
    }
}

TEST_CASE("thermal_state") {
    SECTION("n_th = 0 is the vacuum projector") {
        Operator t = thermal_state(0.0, 10);
        REQUIRE(std::abs(t.mat(0, 0) - cplx(1, 0)) < 1e-15);
        REQUIRE(t.mat.cwiseAbs().sum() == Catch::Approx(1.0).margin(1e-15));
    }

    SECTION("mean photon number equals n_th") {
        Operator t = thermal_state(0.5, 60);
        double mean = 0;
        for (int n = 0; n <= 60; ++n) mean += n * t.mat(n, n).real();
        REQUIRE(mean == Catch::Approx(0.5).margin(1e-9));
    }

    SECTION("purity 1/(2 n_th + 1)") {
        Operator t = thermal_state(1.0, 60);
        double purity = (t.mat * t.mat).trace().real();
        REQUIRE(purity == Catch::Approx(1.0 / 3.0).margin(1e-9));
    }

    SECTION("cutoff errors when the geometric tail is too heavy") {
        REQUIRE_THROWS_AS(thermal_state(5.0, 3), CutoffTooSmall);
    }
}

TEST_CASE("noisy_hybrid_state basics") {
    SECTION("no noise reproduces the ideal projector") {
        Operator rho = noisy_hybrid_state(1.0, NoiseParams{0, 0, 0}, 25);
        Ket psi = ideal_hybrid_state(1.0, 25);
        double fid = (psi.amps.adjoint() * rho.mat * psi.amps)(0).real();
        REQUIRE(fid >= 1.0 - 1e-10);
    }

    SECTION("full loss yields a product state") {
        Operator rho = noisy_hybrid_state(1.0, NoiseParams{1, 1, 0}, 25);
        Operator q = partial_trace(rho, {0});
        Operator c = partial_trace(rho, {1});
        Operator prod = tensor(q, c);
        REQUIRE((rho.mat - prod.mat).cwiseAbs().maxCoeff() < 1e-10);
        // all the light ended in the traced arms
        REQUIRE(std::abs(rho.mat(0, 0) - cplx(1, 0)) < 1e-10);
    }

    SECTION("density-operator checks on random parameter draws") {
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        for (int trial = 0; trial < 100; ++trial) {
            double alpha = 0.6 + 0.8 * uni(rng);
            NoiseParams np{uni(rng), uni(rng), 0};
            Operator rho = noisy_hybrid_state(alpha, np, default_cutoff(alpha));
            DensityCheck chk = check_density(rho, 1e-10, 1e-9, 1e-10);
            REQUIRE(chk.pass);
        }
    }

    SECTION("fidelity to the ideal state is non-increasing in each loss") {
        Ket psi = ideal_hybrid_state(1.0, 24);
        auto fidelity = [&](double e, double ed) {
            Operator rho = noisy_hybrid_state(1.0, NoiseParams{e, ed, 0}, 24);
            return (psi.amps.adjoint() * rho.mat * psi.amps)(0).real();
        };
        std::vector<double> grid;
        for (int i = 0; i < 10; ++i) grid.push_back(i / 9.0);
        for (int i = 0; i < 10; ++i) {
            double prev = 2;
            for (int j = 0; j < 10; ++j) {
                double f = fidelity(grid[size_t(j)], grid[size_t(i)]);
                REQUIRE(f <= prev + 1e-12);
                prev = f;
            }
            prev = 2;
            for (int j = 0; j < 10; ++j) {
                double f = fidelity(grid[size_t(i)], grid[size_t(j)]);
                REQUIRE(f <= prev + 1e-12);
                prev = f;
            }
        }
    }
}

TEST_CASE("thermal ancilla keeps the quadrature correlators") {
    // First moments of the ancilla vanish, so the two witness correlators do
    // not depend on the ancilla temperature.
    const int cutoff = 22;
    LadderOps l = ladder_ops(cutoff + thermal_cutoff(0.2));
    auto correlators = [&](double n_th) {
        Operator rho = noisy_hybrid_state(1.0, NoiseParams{0.1, 0.1, n_th}, cutoff);
        const int d = rho.shape.dims[1];
        Matrix x = l.a.mat.topLeftCorner(d, d) + l.a_dagger.mat.topLeftCorner(d, d);
        Matrix y = cplx(0, 1) * (l.a.mat.topLeftCorner(d, d) - l.a_dagger.mat.topLeftCorner(d, d));
        Eigen::Matrix2cd sx, sy;
        sx << 0, 1, 1, 0;
        sy << 0, cplx(0, -1), cplx(0, 1), 0;
        Matrix sxx(2 * d, 2 * d), syy(2 * d, 2 * d);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                sxx.block(i * d, j * d, d, d) = sx(i, j) * x;
                syy.block(i * d, j * d, d, d) = sy(i, j) * y;
            }
        return std::pair<double, double>{(sxx * rho.mat).trace().real(),
                                         (syy * rho.mat).trace().real()};
    };
    auto [x0, y0] = correlators(0.0);
    auto [xt, yt] = correlators(0.2);
    REQUIRE(std::abs(x0 - xt) < 1e-6);
    REQUIRE(std::abs(y0 - yt) < 1e-6);
}

TEST_CASE("thermal_occupation") {
    SECTION("optical frequency at room temperature is ~ 1e-35") {
        double n = thermal_occupation(5e14, 300.0);
        REQUIRE(n > 1e-36);
        REQUIRE(n < 1e-34);
    }

    SECTION("vanishes as T -> 0") {
        REQUIRE(thermal_occupation(5e14, 1e-3) == 0.0);
    }

    SECTION("h nu / kB T = ln 2 gives exactly one photon") {
        double t = 300.0;
        double nu = kBoltzmann * t * std::log(2.0) / kPlanck;
        REQUIRE(thermal_occupation(nu, t) == Catch::Approx(1.0).epsilon(1e-9));
    }
}
