#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "catwit/fock.hpp"

using namespace catwit;

namespace {

// Series oracle for <alpha|beta> on an explicit Fock grid, independent of
// coherent_ket's normalization path.
double coherent_overlap_series(double alpha, double beta, int terms) {
    double sum = 0;
    double term = std::exp(-(alpha * alpha + beta * beta) / 2.0);
    for (int n = 0; n < terms; ++n) {
        if (n > 0) term *= alpha * beta / n;
        sum += term;
    }
    return sum;
}

// Poisson tail mass beyond cutoff, by direct summation.
double poisson_tail(double lambda, int cutoff) {
    double term = std::exp(-lambda);
    double cum = term;
    for (int n = 1; n <= cutoff; ++n) {
        term *= lambda / n;
        cum += term;
    }
    return 1.0 - cum;
}

Matrix random_density(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Matrix a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = cplx(g(rng), g(rng));
    Matrix rho = a * a.adjoint();
    rho /= rho.trace();
    return rho;
}

} // namespace

TEST_CASE("coherent_ket basics") {
    SECTION("alpha = 0 is the vacuum unit vector") {
        Ket v = coherent_ket(0.0, 8);
        REQUIRE(std::abs(v.amps[0] - cplx(1, 0)) < 1e-15);
        REQUIRE(v.amps.tail(8).norm() < 1e-15);
    }

    SECTION("overlap <1|-1> = e^{-2}, against the series oracle") {
        double oracle = coherent_overlap_series(1.0, -1.0, 200);
        REQUIRE(oracle == Catch::Approx(std::exp(-2.0)).epsilon(1e-12));
        Ket a = coherent_ket(1.0, 40);
        Ket b = coherent_ket(-1.0, 40);
        REQUIRE(std::abs(overlap(a, b) - cplx(oracle, 0)) < 1e-12);
    }

    SECTION("cutoff too small raises") {
        REQUIRE(poisson_tail(1.0, 2) > 1e-10);
        REQUIRE_THROWS_AS(coherent_ket(1.0, 2), CutoffTooSmall);
    }

    SECTION("cutoff helper matches the tail rule") {
        int n = coherent_cutoff(1.0);
        REQUIRE(poisson_tail(1.0, n) < 1e-10);
        REQUIRE(poisson_tail(1.0, n - 1) >= 1e-10);
        REQUIRE_NOTHROW(coherent_ket(1.0, n));
    }
}

TEST_CASE("cat_ket parity and norm") {
    Ket even = cat_ket(1.0, CatSign::plus, 40);
    Ket odd = cat_ket(1.0, CatSign::minus, 40);

    SECTION("opposite-parity cats are orthogonal") {
        REQUIRE(std::abs(overlap(even, odd)) < 1e-14);
    }

    SECTION("even cat has no odd Fock amplitudes") {
        for (int n = 1; n <= 40; n += 2) REQUIRE(std::abs(even.amps[n]) < 1e-15);
        for (int n = 0; n <= 40; n += 2) REQUIRE(std::abs(odd.amps[n]) < 1e-15);
    }

    SECTION("mean photon number of the odd cat, against a direct series") {
        // <N> = sum n |c_n|^2 with c_n the odd-cat amplitudes built from the
        // raw coherent series, normalized by the same series.
        double num = 0, den = 0;
        double term = std::exp(-1.0); // |<n|1>|^2 at n=0
        for (int n = 0; n <= 60; ++n) {
            if (n > 0) term *= 1.0 / n;
            if (n % 2 == 1) {
                num += n * term;
                den += term;
            }
        }
        double oracle = num / den;
        LadderOps l = ladder_ops(40);
        double got = (odd.amps.adjoint() * l.number.mat * odd.amps)(0).real();
        REQUIRE(got == Catch::Approx(oracle).margin(1e-10));
        // sanity: equals alpha^2 coth(alpha^2) at alpha = 1
        REQUIRE(oracle == Catch::Approx(1.0 / std::tanh(1.0)).margin(1e-12));
    }

    SECTION("odd cat at alpha ~ 0 is degenerate") {
        REQUIRE_THROWS_AS(cat_ket(0.0, CatSign::minus, 10), DegenerateCat);
    }
}

TEST_CASE("ladder operators") {
    LadderOps l = ladder_ops(6);

    SECTION("a|1> = |0>") {
        Vector one = Vector::Zero(7);
        one[1] = 1;
        Vector res = l.a.mat * one;
        REQUIRE(std::abs(res[0] - cplx(1, 0)) < 1e-15);
        REQUIRE(res.tail(6).norm() < 1e-15);
    }

    SECTION("(a + a^dag) entry (n, n+1) = sqrt(n+1)") {
        Matrix x = l.a.mat + l.a_dagger.mat;
        for (int n = 0; n < 6; ++n) {
            REQUIRE(std::abs(x(n, n + 1) - cplx(std::sqrt(n + 1.0), 0)) < 1e-15);
        }
    }

    SECTION("[a, a^dag] = 1 with the -N truncation artifact") {
        Matrix comm = l.a.mat * l.a_dagger.mat - l.a_dagger.mat * l.a.mat;
        for (int n = 0; n < 6; ++n) REQUIRE(std::abs(comm(n, n) - cplx(1, 0)) < 1e-14);
        REQUIRE(std::abs(comm(6, 6) - cplx(-6, 0)) < 1e-14);
    }
}

TEST_CASE("beamsplitter_unitary") {
    SECTION("eta = 0 is the identity") {
        Operator u = beamsplitter_unitary(0.0, 8);
        REQUIRE((u.mat - Matrix::Identity(81, 81)).cwiseAbs().maxCoeff() < 1e-13);
    }

    SECTION("unitarity") {
        Operator u = beamsplitter_unitary(0.37, 10);
        Matrix res = u.mat.adjoint() * u.mat - Matrix::Identity(121, 121);
        REQUIRE(res.cwiseAbs().maxCoeff() < 1e-12);
    }

    SECTION("coherent input splits into a product of coherent states") {
        const int n = 24;
        Ket in = tensor(coherent_ket(1.0, n), basis_ket(ModeShape{n + 1}, {0}));
        Operator u = beamsplitter_unitary(0.3, n);
        Ket out = apply_on_modes(u, in, 0, 2);
        Ket expect = tensor(coherent_ket(std::sqrt(0.7), n), coherent_ket(std::sqrt(0.3), n));
        double fid = std::norm(overlap(expect, out));
        REQUIRE(fid >= 1.0 - 1e-8);
    }

    SECTION("photon number is conserved") {
        const int n = 18;
        Ket in = tensor(cat_ket(1.0, CatSign::plus, n), coherent_ket(0.5, n));
        Operator u = beamsplitter_unitary(0.42, n);
        Ket out = apply_on_modes(u, in, 0, 2);
        LadderOps l = ladder_ops(n);
        Operator ntot = tensor(std::vector<Operator>{l.number, identity_op(ModeShape{n + 1})});
        Operator n2 = tensor(std::vector<Operator>{identity_op(ModeShape{n + 1}), l.number});
        ntot.mat += n2.mat;
        double before = (in.amps.adjoint() * ntot.mat * in.amps)(0).real();
        double after = (out.amps.adjoint() * ntot.mat * out.amps)(0).real();
        REQUIRE(std::abs(before - after) < 1e-10);
    }
}

TEST_CASE("tensor and partial_trace") {
    std::mt19937_64 rng(12345);

    SECTION("partial trace of a product returns the factor") {
        Operator rho{random_density(3, rng), ModeShape{3}};
        Operator sig{random_density(4, rng), ModeShape{4}};
        Operator prod = tensor(rho, sig);
        Operator red = partial_trace(prod, {0});
        REQUIRE((red.mat - rho.mat).cwiseAbs().maxCoeff() < 1e-13);
        Operator red2 = partial_trace(prod, {1});
        REQUIRE((red2.mat - sig.mat).cwiseAbs().maxCoeff() < 1e-13);
    }

    SECTION("trace preservation and linearity on random operators") {
        for (int trial = 0; trial < 20; ++trial) {
            Operator a{random_density(6, rng), ModeShape{2, 3}};
            Operator b{random_density(6, rng), ModeShape{2, 3}};
            Operator ra = partial_trace(a, {0});
            Operator rb = partial_trace(b, {0});
            REQUIRE(std::abs(ra.mat.trace() - a.mat.trace()) < 1e-13);
            Operator mix{0.3 * a.mat + 0.7 * b.mat, a.shape};
            Operator rmix = partial_trace(mix, {0});
            REQUIRE((rmix.mat - (0.3 * ra.mat + 0.7 * rb.mat)).cwiseAbs().maxCoeff() < 1e-13);
        }
    }

    SECTION("Bell-like pure state reduces to the maximally mixed qubit") {
        Vector bell = Vector::Zero(4);
        bell[0] = bell[3] = 1.0 / std::sqrt(2.0);
        Ket psi{bell, ModeShape{2, 2}};
        Operator red = partial_trace_pure(psi, {0});
        REQUIRE((red.mat - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
    }

    SECTION("partial_trace_pure agrees with partial_trace of the projector") {
        Ket psi = tensor(cat_ket(0.8, CatSign::plus, 16), coherent_ket(0.5, 16));
        Operator proj = outer(psi, psi);
        Operator a = partial_trace(proj, {1});
        Operator b = partial_trace_pure(psi, {1});
        REQUIRE((a.mat - b.mat).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("density operator checks") {
    std::mt19937_64 rng(99);
    Operator good{random_density(5, rng), ModeShape{5}};
    REQUIRE(check_density(good).pass);
    Operator bad = good;
    bad.mat(0, 0) += cplx(0.1, 0.0);
    REQUIRE_FALSE(check_density(bad).pass);
    REQUIRE_THROWS_AS(assert_density(bad), NotPositive);
}

TEST_CASE("cutoff convergence harness") {
    // Doubling the cutoff moves a downstream scalar by less than 1e-8.
    const double alpha = 1.0;
    int n = std::max(20, coherent_cutoff(alpha));
    auto mean_photons = [&](int cutoff) {
        Ket c = cat_ket(alpha, CatSign::minus, cutoff);
        LadderOps l = ladder_ops(cutoff);
        return (c.amps.adjoint() * l.number.mat * c.amps)(0).real();
    };
    REQUIRE(std::abs(mean_photons(n) - mean_photons(2 * n)) < 1e-8);
}
