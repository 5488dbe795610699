#pragma once

#include <vector>

#include "steercert/assemblage.hpp"

namespace steercert {

/// Linear steering functional: operators F_{bcyz} defining
/// beta = tr( sum_{bcyz} F_{bcyz} sigma_{bc|yz} ).
class SteeringFunctional {
  public:
    SteeringFunctional() = default;

    SteeringFunctional(Scenario sc, std::vector<HermitianMatrix> ops)
        : sc_(sc), ops_(std::move(ops)) {
        sc_.validate();
        const std::size_t n = static_cast<std::size_t>(sc_.outB) * sc_.outC * sc_.setB * sc_.setC;
        if (ops_.size() != n) throw DimensionError("SteeringFunctional: wrong operator count");
        for (const auto& m : ops_)
            if (m.dim() != sc_.dimA)
                throw DimensionError("SteeringFunctional: operator dimension mismatch");
    }

    static SteeringFunctional zero(const Scenario& sc) {
        std::vector<HermitianMatrix> ops(
            static_cast<std::size_t>(sc.outB) * sc.outC * sc.setB * sc.setC,
            HermitianMatrix::zero(sc.dimA));
        return SteeringFunctional(sc, std::move(ops));
    }

    const Scenario& scenario() const { return sc_; }

    std::size_t index(int b, int c, int y, int z) const {
        return ((static_cast<std::size_t>(y) * sc_.setC + z) * sc_.outB + b) * sc_.outC + c;
    }
    const HermitianMatrix& at(int b, int c, int y, int z) const {
        return ops_[index(b, c, y, z)];
    }
    HermitianMatrix& at(int b, int c, int y, int z) { return ops_[index(b, c, y, z)]; }
    const std::vector<HermitianMatrix>& operators() const { return ops_; }

    SteeringFunctional scaled(double s) const {
        SteeringFunctional out = *this;
        for (auto& m : out.ops_) m = m * s;
        return out;
    }

    /// sum of Frobenius norms over all cells; the normalization used for
    /// randomly generated functionals and reported certificates.
    double norm_sum() const {
        double n = 0.0;
        for (const auto& m : ops_) n += m.frobenius_norm();
        return n;
    }

  private:
    Scenario sc_;
    std::vector<HermitianMatrix> ops_;
};

/// beta = tr( sum F_{bcyz} sigma_{bc|yz} ).  The imaginary residue of the
/// trace sum must vanish (both inputs Hermitian); a residue signals bad data.
inline double evaluate_functional(const SteeringFunctional& f, const Assemblage& a,
                                  double imag_tol = 1e-10) {
    if (!(f.scenario() == a.scenario()))
        throw DimensionError("evaluate_functional: scenario mismatch");
    const Scenario& sc = f.scenario();
    double re = 0.0, im = 0.0;
    for (int y = 0; y < sc.setB; ++y)
        for (int z = 0; z < sc.setC; ++z)
            for (int b = 0; b < sc.outB; ++b)
                for (int c = 0; c < sc.outC; ++c) {
                    re += trace_product(f.at(b, c, y, z), a.at(b, c, y, z));
                    im += trace_product_imag(f.at(b, c, y, z), a.at(b, c, y, z));
                }
    if (std::abs(im) > imag_tol)
        throw InvalidInput("evaluate_functional: non-negligible imaginary part " +
                           std::to_string(im));
    return re;
}

/// Minimal representation of a functional for 2-outcome scenarios:
/// beta = tr( F_A rho_A + sum_y F_B[y] sigma^B_{0|y}
///            + sum_z F_C[z] sigma^C_{0|z} + sum_yz F_YZ[y][z] sigma_{00|yz} ).
struct MinimalFunctional {
    Scenario scenario;
    HermitianMatrix F_A;
    std::vector<HermitianMatrix> F_B;                 // per Bob setting
    std::vector<HermitianMatrix> F_C;                 // per Charlie setting
    std::vector<std::vector<HermitianMatrix>> F_YZ;   // per setting pair

    void validate() const {
        scenario.validate();
        if (scenario.outB != 2 || scenario.outC != 2)
            throw InvalidInput("MinimalFunctional: requires 2-outcome scenario");
        if (static_cast<int>(F_B.size()) != scenario.setB ||
            static_cast<int>(F_C.size()) != scenario.setC)
            throw DimensionError("MinimalFunctional: wrong marginal operator count");
        if (F_A.dim() != scenario.dimA)
            throw DimensionError("MinimalFunctional: operator dimension mismatch");
    }

    static MinimalFunctional zero(const Scenario& sc) {
        MinimalFunctional f;
        f.scenario = sc;
        f.F_A = HermitianMatrix::zero(sc.dimA);
        f.F_B.assign(sc.setB, HermitianMatrix::zero(sc.dimA));
        f.F_C.assign(sc.setC, HermitianMatrix::zero(sc.dimA));
        f.F_YZ.assign(sc.setB,
                      std::vector<HermitianMatrix>(sc.setC, HermitianMatrix::zero(sc.dimA)));
        return f;
    }
};

/// Evaluate through the minimal-representation formula.  Requires a
/// 2-outcome assemblage with well-defined marginals.
inline double evaluate_minimal(const MinimalFunctional& f, const Assemblage& a) {
    f.validate();
    if (a.scenario().outB != 2 || a.scenario().outC != 2)
        throw InvalidInput("evaluate_minimal: requires 2-outcome scenario");
    if (a.scenario().dimA != f.scenario.dimA || a.scenario().setB != f.scenario.setB ||
        a.scenario().setC != f.scenario.setC)
        throw DimensionError("evaluate_minimal: scenario mismatch");
    const MinimalAssemblageData d = minimal_data_of(a);
    double v = trace_product(f.F_A, d.rho);
    for (int y = 0; y < f.scenario.setB; ++y) v += trace_product(f.F_B[y], d.sigma_b0[y]);
    for (int z = 0; z < f.scenario.setC; ++z) v += trace_product(f.F_C[z], a.marginal_c(0, z));
    for (int y = 0; y < f.scenario.setB; ++y)
        for (int z = 0; z < f.scenario.setC; ++z)
            v += trace_product(f.F_YZ[y][z], d.s00[y][z]);
    return v;
}

/// Expand a minimal functional to full F_{bcyz} form in the uniform-spread
/// gauge.  The four defining relations
///   F_A        = sum_yz F_{11yz}
///   F_B[y]     = sum_bz (-1)^b F_{b1yz}
///   F_C[z]     = sum_cy (-1)^c F_{1cyz}
///   F_YZ[y][z] = sum_bc (-1)^{b+c} F_{bcyz}
/// under-determine F; the gauge below spreads each family uniformly over
/// settings and satisfies the relations exactly, so expand followed by
/// extract_minimal is the identity.  Any gauge gives the same beta on
/// no-signaling assemblages.
inline SteeringFunctional expand_minimal(const MinimalFunctional& f) {
    f.validate();
    const Scenario& sc = f.scenario;
    const int mb = sc.setB, mc = sc.setC;
    const int d = sc.dimA;

    CMat sumFB = CMat::Zero(d, d), sumFC = CMat::Zero(d, d), sumFYZ = CMat::Zero(d, d);
    for (int y = 0; y < mb; ++y) sumFB += f.F_B[y].mat();
    for (int z = 0; z < mc; ++z) sumFC += f.F_C[z].mat();
    for (int y = 0; y < mb; ++y)
        for (int z = 0; z < mc; ++z) sumFYZ += f.F_YZ[y][z].mat();

    const CMat A = (f.F_A.mat() + sumFB / 2.0 + sumFC / 2.0 + sumFYZ / 4.0) / (mb * mc);

    SteeringFunctional out = SteeringFunctional::zero(sc);
    for (int y = 0; y < mb; ++y)
        for (int z = 0; z < mc; ++z) {
            CMat rowFYZ = CMat::Zero(d, d), colFYZ = CMat::Zero(d, d);
            for (int zz = 0; zz < mc; ++zz) rowFYZ += f.F_YZ[y][zz].mat();
            for (int yy = 0; yy < mb; ++yy) colFYZ += f.F_YZ[yy][z].mat();
            const CMat B = (f.F_B[y].mat() / 2.0 + rowFYZ / 4.0) / mc;
            const CMat C = (f.F_C[z].mat() / 2.0 + colFYZ / 4.0) / mb;
            const CMat D = f.F_YZ[y][z].mat() / 4.0;
            for (int b = 0; b < 2; ++b)
                for (int c = 0; c < 2; ++c) {
                    const double sb = (b == 0) ? 1.0 : -1.0;
                    const double sc_ = (c == 0) ? 1.0 : -1.0;
                    out.at(b, c, y, z) = hermitize(A + sb * B + sc_ * C + sb * sc_ * D);
                }
        }
    return out;
}

/// Recover the minimal representation of a full functional (2-outcome).
inline MinimalFunctional extract_minimal(const SteeringFunctional& f) {
    const Scenario& sc = f.scenario();
    if (sc.outB != 2 || sc.outC != 2)
        throw InvalidInput("extract_minimal: requires 2-outcome scenario");
    const int d = sc.dimA;
    MinimalFunctional out = MinimalFunctional::zero(sc);

    CMat fa = CMat::Zero(d, d);
    for (int y = 0; y < sc.setB; ++y)
        for (int z = 0; z < sc.setC; ++z) fa += f.at(1, 1, y, z).mat();
    out.F_A = hermitize(fa);

    for (int y = 0; y < sc.setB; ++y) {
        CMat acc = CMat::Zero(d, d);
        for (int b = 0; b < 2; ++b)
            for (int z = 0; z < sc.setC; ++z)
                acc += (b == 0 ? 1.0 : -1.0) * f.at(b, 1, y, z).mat();
        out.F_B[y] = hermitize(acc);
    }
    for (int z = 0; z < sc.setC; ++z) {
        CMat acc = CMat::Zero(d, d);
        for (int c = 0; c < 2; ++c)
            for (int y = 0; y < sc.setB; ++y)
                acc += (c == 0 ? 1.0 : -1.0) * f.at(1, c, y, z).mat();
        out.F_C[z] = hermitize(acc);
    }
    for (int y = 0; y < sc.setB; ++y)
        for (int z = 0; z < sc.setC; ++z) {
            CMat acc = CMat::Zero(d, d);
            for (int b = 0; b < 2; ++b)
                for (int c = 0; c < 2; ++c)
                    acc += ((b + c) % 2 == 0 ? 1.0 : -1.0) * f.at(b, c, y, z).mat();
            out.F_YZ[y][z] = hermitize(acc);
        }
    return out;
}

} // namespace steercert
