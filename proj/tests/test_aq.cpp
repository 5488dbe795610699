#include <catch2/catch_amalgamated.hpp>

#include "steercert/aq.hpp"
#include "steercert/fixtures.hpp"
#include "test_helpers.hpp"

using namespace steercert;
using namespace steercert::testing;

namespace {
const Assemblage& table1() {
    static const Assemblage a = fixtures::table1_assemblage();
    return a;
}
const SteeringFunctional& table2() {
    static const SteeringFunctional f = expand_minimal(fixtures::table2_functional());
    return f;
}
}  // namespace

TEST_CASE("aq bound reproduces the published almost-quantum value") {
    const AqBoundResult r = aq_bound(table2());
    CHECK(r.bound == Catch::Approx(fixtures::kBetaAQ).margin(1e-3));
    // value frozen from an independent conic solver on the same relaxation
    CHECK(r.bound == Catch::Approx(-0.5084204253).margin(2e-6));

    // the optimizer read off the first row is a valid assemblage achieving it
    CHECK(validate_tripartite_ns(r.optimizer, 1e-6).pass);
    CHECK(evaluate_functional(table2(), r.optimizer) == Catch::Approx(r.bound).margin(1e-6));

    // moment-matrix witness is PSD
    Eigen::SelfAdjointEigenSolver<CMat> es(r.gamma, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-7);
}

TEST_CASE("aq bound trivial functionals") {
    const Scenario sc = qubit_222_scenario();

    SECTION("delta functional picking one probability is bounded by zero") {
        SteeringFunctional f = SteeringFunctional::zero(sc);
        f.at(0, 0, 0, 0) = HermitianMatrix::identity(2);
        const AqBoundResult r = aq_bound(f);
        CHECK(r.bound == Catch::Approx(0.0).margin(1e-6));
    }

    SECTION("identity functional gives the setting count") {
        SteeringFunctional f = SteeringFunctional::zero(sc);
        for (auto& [b, c, y, z] : std::vector<std::array<int, 4>>{}) (void)b;
        for (int y = 0; y < 2; ++y)
            for (int z = 0; z < 2; ++z)
                for (int b = 0; b < 2; ++b)
                    for (int c = 0; c < 2; ++c)
                        f.at(b, c, y, z) = HermitianMatrix::identity(2) * (1.0 / 16.0);
        const AqBoundResult r = aq_bound(f);
        CHECK(r.bound == Catch::Approx(0.25).margin(1e-7));
    }

    SECTION("scale covariance") {
        Rng rng(77);
        MinimalFunctional mf = MinimalFunctional::zero(sc);
        mf.F_A = random_symmetric(rng, 2);
        for (auto& m : mf.F_B) m = random_symmetric(rng, 2);
        for (auto& m : mf.F_C) m = random_symmetric(rng, 2);
        for (auto& row : mf.F_YZ)
            for (auto& m : row) m = random_symmetric(rng, 2);
        const SteeringFunctional f = expand_minimal(mf);
        const double b1 = aq_bound(f).bound;
        const double b3 = aq_bound(f.scaled(3.0)).bound;
        CHECK(b3 == Catch::Approx(3.0 * b1).margin(1e-6));
    }
}

TEST_CASE("membership separates quantum from post-quantum") {
    SECTION("ghz assemblage is in the relaxation") {
        const MembershipResult r = membership_sdp(ghz_assemblage());
        CHECK(r.in_aq);
        CHECK(r.eigenvalue_deficit <= 1e-8);
        Eigen::SelfAdjointEigenSolver<CMat> es(r.gamma, Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues().minCoeff() >= -1e-8);
    }

    SECTION("pr-box product assemblage is excluded") {
        const Assemblage pr = prbox_product(HermitianMatrix::identity(2) * 0.5);
        const MembershipResult r = membership_sdp(pr);
        CHECK(!r.in_aq);
        CHECK(r.eigenvalue_deficit == Catch::Approx(0.0539720).margin(1e-4));
        CHECK(r.separation > 0.0);
    }

    SECTION("published assemblage is excluded with a checkable certificate") {
        const MembershipResult r = membership_sdp(table1());
        CHECK(!r.in_aq);
        CHECK(r.eigenvalue_deficit == Catch::Approx(0.0043390778).margin(1e-5));
        CHECK(r.separation >= 0.005);
        // the reported separation is exactly bound minus value for the
        // emitted certificate, so it can be re-verified independently
        CHECK(r.separation ==
              Catch::Approx(r.certificate_bound - r.certificate_value).margin(1e-9));
        CHECK(r.certificate_value == Catch::Approx(evaluate_functional(r.certificate, table1()))
                                         .margin(1e-9));
        const double cells = static_cast<double>(r.certificate.operators().size());
        CHECK(r.certificate.norm_sum() == Catch::Approx(cells).margin(1e-6));
    }
}

TEST_CASE("membership of random quantum assemblages with bound monotonicity") {
    Rng rng(2024);
    for (int trial = 0; trial < 3; ++trial) {
        const Assemblage qa = random_quantum_assemblage(rng);
        REQUIRE(validate_tripartite_ns(qa, 1e-9).pass);
        const MembershipResult r = membership_sdp(qa);
        CHECK(r.in_aq);
        // bound of any functional is below its value on any member
        MinimalFunctional mf = MinimalFunctional::zero(qa.scenario());
        mf.F_A = random_symmetric(rng, 2);
        for (auto& m : mf.F_B) m = random_symmetric(rng, 2);
        for (auto& m : mf.F_C) m = random_symmetric(rng, 2);
        for (auto& row : mf.F_YZ)
            for (auto& m : row) m = random_symmetric(rng, 2);
        const SteeringFunctional f = expand_minimal(mf);
        CHECK(aq_bound(f).bound <= evaluate_functional(f, qa) + 1e-7);
    }
}

TEST_CASE("real and complex formulations agree") {
    AqOptions real_opts;
    AqOptions cplx_opts;
    cplx_opts.force_complex = true;

    const double br = aq_bound(table2(), real_opts).bound;
    const double bc = aq_bound(table2(), cplx_opts).bound;
    CHECK(br == Catch::Approx(bc).margin(1e-8));

    const MembershipResult mr = membership_sdp(table1(), real_opts);
    const MembershipResult mc = membership_sdp(table1(), cplx_opts);
    CHECK(mr.eigenvalue_deficit == Catch::Approx(mc.eigenvalue_deficit).margin(1e-7));
}

TEST_CASE("membership is invariant under a local unitary rotation") {
    // conjugating every block by a fixed unitary produces genuinely complex
    // data; the verdict and deficit must not change
    CMat u(2, 2);
    const double th = 0.7;
    u << Complex(std::cos(th), 0), Complex(0, -std::sin(th)),
         Complex(0, -std::sin(th)), Complex(std::cos(th), 0);
    const Assemblage& t1 = table1();
    Assemblage rot = t1;
    for (int y = 0; y < 2; ++y)
        for (int z = 0; z < 2; ++z)
            for (int b = 0; b < 2; ++b)
                for (int c = 0; c < 2; ++c)
                    rot.at(b, c, y, z) = hermitize(u * t1.at(b, c, y, z).mat() * u.adjoint());
    REQUIRE(!rot.is_real(1e-3));
    const MembershipResult r = membership_sdp(rot);
    CHECK(!r.in_aq);
    CHECK(r.eigenvalue_deficit == Catch::Approx(0.0043390778).margin(1e-5));
}

TEST_CASE("pinning consistency of the bound optimizer") {
    // the assemblage reconstructed from the first row of a feasible moment
    // matrix satisfies no-signaling by construction of the relaxation
    const AqBoundResult r = aq_bound(table2());
    const ValidationReport rep = validate_tripartite_ns(r.optimizer, 1e-8);
    CHECK(rep.marginal_b <= 1e-8);
    CHECK(rep.marginal_c <= 1e-8);
    CHECK(rep.normalization <= 1e-8);
}
