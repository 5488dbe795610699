#include <catch2/catch_amalgamated.hpp>

#include "steercert/fixtures.hpp"
#include "steercert/functional.hpp"
#include "test_helpers.hpp"

using namespace steercert;
using namespace steercert::testing;

namespace {
MinimalFunctional random_minimal(Rng& rng) {
    MinimalFunctional f = MinimalFunctional::zero(qubit_222_scenario());
    f.F_A = random_symmetric(rng, 2);
    for (auto& m : f.F_B) m = random_symmetric(rng, 2);
    for (auto& m : f.F_C) m = random_symmetric(rng, 2);
    for (auto& row : f.F_YZ)
        for (auto& m : row) m = random_symmetric(rng, 2);
    return f;
}

Assemblage random_valid_assemblage(Rng& rng) {
    const HermitianMatrix rho = random_density(rng, 2, true);
    Assemblage a = Assemblage::zero(qubit_222_scenario());
    for (int k = 0; k < 6; ++k) {
        const double w = 1.0 / 6.0;
        const int bmap = static_cast<int>(rng.integer() % 4);
        const int cmap = static_cast<int>(rng.integer() % 4);
        for (int y = 0; y < 2; ++y)
            for (int z = 0; z < 2; ++z)
                a.at((bmap >> y) & 1, (cmap >> z) & 1, y, z) += rho * w;
    }
    return a;
}
}  // namespace

TEST_CASE("published functional on the published assemblage") {
    const Assemblage t1 = fixtures::table1_assemblage();
    const MinimalFunctional t2 = fixtures::table2_functional();

    const double beta_min = evaluate_minimal(t2, t1);
    CHECK(beta_min == Catch::Approx(fixtures::kBeta).margin(5e-3));
    CHECK(beta_min == Catch::Approx(-0.52073625).margin(1e-9));  // exact on 4-decimal data

    const double beta_full = evaluate_functional(expand_minimal(t2), t1);
    CHECK(beta_full == Catch::Approx(beta_min).margin(1e-10));
}

TEST_CASE("functional evaluation basics") {
    const Assemblage t1 = fixtures::table1_assemblage();
    SECTION("zero functional gives zero") {
        CHECK(evaluate_functional(SteeringFunctional::zero(t1.scenario()), t1) == 0.0);
        CHECK(evaluate_minimal(MinimalFunctional::zero(t1.scenario()), t1) == 0.0);
    }
    SECTION("delta functional picks one block trace") {
        SteeringFunctional f = SteeringFunctional::zero(t1.scenario());
        f.at(0, 0, 0, 0) = HermitianMatrix::identity(2);
        CHECK(evaluate_functional(f, t1) == Catch::Approx(0.2720).margin(1e-3));
    }
    SECTION("scenario mismatch is an error") {
        const SteeringFunctional f = SteeringFunctional::zero(Scenario{3, 2, 2, 2, 2});
        CHECK_THROWS_AS(evaluate_functional(f, t1), DimensionError);
    }
}

TEST_CASE("minimal and full evaluation agree on random data") {
    Rng rng(21);
    for (int i = 0; i < 10; ++i) {
        const MinimalFunctional f = random_minimal(rng);
        const Assemblage a = random_valid_assemblage(rng);
        REQUIRE(validate_tripartite_ns(a, 1e-10).pass);
        CHECK(evaluate_minimal(f, a) ==
              Catch::Approx(evaluate_functional(expand_minimal(f), a)).margin(1e-10));
    }
}

TEST_CASE("expand and extract are mutually inverse") {
    Rng rng(22);
    for (int i = 0; i < 5; ++i) {
        const MinimalFunctional f = random_minimal(rng);
        const MinimalFunctional g = extract_minimal(expand_minimal(f));
        CHECK(max_abs(g.F_A.mat() - f.F_A.mat()) < 1e-12);
        for (int y = 0; y < 2; ++y) CHECK(max_abs(g.F_B[y].mat() - f.F_B[y].mat()) < 1e-12);
        for (int z = 0; z < 2; ++z) CHECK(max_abs(g.F_C[z].mat() - f.F_C[z].mat()) < 1e-12);
        for (int y = 0; y < 2; ++y)
            for (int z = 0; z < 2; ++z)
                CHECK(max_abs(g.F_YZ[y][z].mat() - f.F_YZ[y][z].mat()) < 1e-12);
    }
}

TEST_CASE("identity-only minimal functional spreads uniformly") {
    MinimalFunctional f = MinimalFunctional::zero(qubit_222_scenario());
    f.F_A = HermitianMatrix::identity(2);
    const SteeringFunctional full = expand_minimal(f);
    for (int y = 0; y < 2; ++y)
        for (int z = 0; z < 2; ++z)
            for (int b = 0; b < 2; ++b)
                for (int c = 0; c < 2; ++c)
                    CHECK(max_abs(full.at(b, c, y, z).mat() -
                                  0.25 * CMat::Identity(2, 2)) < 1e-14);
}

TEST_CASE("gauge freedom does not change values on no-signaling assemblages") {
    // any two expansions satisfying the reduction relations agree on the
    // no-signaling affine space; compare the canonical gauge against one
    // shifted by a null-space direction
    Rng rng(23);
    const MinimalFunctional f = random_minimal(rng);
    const SteeringFunctional a = expand_minimal(f);

    SteeringFunctional b = a;
    // null direction of all four reduction maps:
    // dF_{bcyz} = (-1)^b u(z) G restricted to y = 0, with u = (1, -1)
    const HermitianMatrix G = random_symmetric(rng, 2);
    for (int b2 = 0; b2 < 2; ++b2)
        for (int c2 = 0; c2 < 2; ++c2)
            for (int z2 = 0; z2 < 2; ++z2) {
                const double s = ((b2 == 0) ? 1.0 : -1.0) * ((z2 == 0) ? 1.0 : -1.0);
                b.at(b2, c2, 0, z2) = b.at(b2, c2, 0, z2) + G * s;
            }
    // verify it is a genuine gauge direction
    const MinimalFunctional fb = extract_minimal(b);
    CHECK(max_abs(fb.F_A.mat() - f.F_A.mat()) < 1e-12);
    for (int y = 0; y < 2; ++y) CHECK(max_abs(fb.F_B[y].mat() - f.F_B[y].mat()) < 1e-12);
    for (int z = 0; z < 2; ++z) CHECK(max_abs(fb.F_C[z].mat() - f.F_C[z].mat()) < 1e-12);
    for (int y = 0; y < 2; ++y)
        for (int z = 0; z < 2; ++z)
            CHECK(max_abs(fb.F_YZ[y][z].mat() - f.F_YZ[y][z].mat()) < 1e-12);

    for (int i = 0; i < 5; ++i) {
        const Assemblage asmb = random_valid_assemblage(rng);
        CHECK(evaluate_functional(a, asmb) ==
              Catch::Approx(evaluate_functional(b, asmb)).margin(1e-10));
    }
}
