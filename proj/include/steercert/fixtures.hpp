#pragma once

#include <cmath>

#include "steercert/assemblage.hpp"
#include "steercert/functional.hpp"

namespace steercert::fixtures {

// Published example data, transcribed verbatim at 4-decimal precision.
// The assemblage and functional are Bob<->Charlie symmetric, so only the
// independent blocks are listed; sigma_{00|01} = sigma_{00|10} and
// F_YZ[0][1] = F_YZ[1][0].

inline constexpr double kBeta = -0.520495;        // published functional value
inline constexpr double kBetaAQ = -0.508417;      // published almost-quantum bound
inline double mu_star() { return std::cos(M_PI / 8.0); }

inline HermitianMatrix m2(double a11, double a12, double a22) {
    RMat m(2, 2);
    m << a11, a12, a12, a22;
    return HermitianMatrix(m);
}

inline MinimalAssemblageData table1_minimal() {
    MinimalAssemblageData d;
    d.rho = m2(0.3666, -0.0896, 0.6334);
    d.sigma_b0 = {m2(0.1464, -0.1114, 0.1600), m2(0.2851, -0.0586, 0.2473)};
    const HermitianMatrix s00 = m2(0.1360, -0.1257, 0.1360);
    const HermitianMatrix s10 = m2(0.0803, -0.0523, 0.0982);
    const HermitianMatrix s11 = m2(0.2555, -0.1192, 0.0709);
    d.s00 = {{s00, s10}, {s10, s11}};
    return d;
}

inline Assemblage table1_assemblage() {
    return reconstruct_from_minimal(table1_minimal(), qubit_222_scenario());
}

inline MinimalFunctional table2_functional() {
    MinimalFunctional f = MinimalFunctional::zero(qubit_222_scenario());
    f.F_A = m2(1.4622, 0.1773, -0.4622);
    f.F_B = {m2(-0.2894, 0.2468, 0.9767), m2(-1.0943, -0.4673, 0.0648)};
    f.F_C = f.F_B;
    const HermitianMatrix f00 = m2(-0.1948, 0.5653, -0.7229);
    const HermitianMatrix f10 = m2(0.5482, -0.4270, -0.8690);
    const HermitianMatrix f11 = m2(0.2875, 1.0320, 0.9182);
    f.F_YZ = {{f00, f10}, {f10, f11}};
    return f;
}

} // namespace steercert::fixtures
