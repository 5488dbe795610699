#pragma once

#include <vector>

#include "steercert/assemblage.hpp"

namespace steercert {

/// A POVM on Alice: list of effects summing to the identity.
struct Povm {
    std::vector<HermitianMatrix> effects;
    double label = 0.0;  // measurement angle where meaningful

    void validate(double tol = 1e-10) const {
        if (effects.empty()) throw InvalidInput("Povm: empty effect list");
        const int d = effects[0].dim();
        CMat sum = CMat::Zero(d, d);
        for (const auto& e : effects) {
            if (e.dim() != d) throw DimensionError("Povm: effect dimension mismatch");
            if (!e.is_psd(tol)) throw InvalidInput("Povm: effect not positive semidefinite");
            sum += e.mat();
        }
        if (max_abs(sum - CMat::Identity(d, d)) > tol)
            throw InvalidInput("Povm: effects do not sum to the identity");
    }
};

/// A finite collection of POVMs for Alice.
struct MeasurementSet {
    std::vector<Povm> povms;

    void validate(double tol = 1e-10) const {
        for (const auto& p : povms) p.validate(tol);
    }
    int settings() const { return static_cast<int>(povms.size()); }
    int outcomes() const { return povms.empty() ? 0 : static_cast<int>(povms[0].effects.size()); }
};

inline RMat pauli_x() {
    RMat m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}
inline RMat pauli_z() {
    RMat m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

/// Projector (I + (-1)^a (cos(theta) X + sin(theta) Z)) / 2 in the x-z plane.
inline HermitianMatrix xz_projector(int a, double theta) {
    const double s = (a == 0) ? 1.0 : -1.0;
    const RMat m = (RMat::Identity(2, 2) +
                    s * (std::cos(theta) * pauli_x() + std::sin(theta) * pauli_z())) /
                   2.0;
    return HermitianMatrix(m);
}

/// The four x-z-plane measurements at angles x*pi/4; their eight effects
/// form a regular octagon of Bloch vectors.
inline MeasurementSet octagon_set() {
    MeasurementSet ms;
    for (int x = 0; x < 4; ++x) {
        const double theta = x * M_PI / 4.0;
        Povm p;
        p.label = theta;
        p.effects = {xz_projector(0, theta), xz_projector(1, theta)};
        ms.povms.push_back(std::move(p));
    }
    return ms;
}

/// Conditional probability table p(a,b,c | x,y,z), stored row-major in the
/// index order (x, y, z, a, b, c).
struct Behaviour {
    int nX = 0, nY = 0, nZ = 0, nA = 0, nB = 0, nC = 0;
    std::vector<double> p;

    std::size_t index(int x, int y, int z, int a, int b, int c) const {
        return ((((static_cast<std::size_t>(x) * nY + y) * nZ + z) * nA + a) * nB + b) * nC + c;
    }
    double at(int x, int y, int z, int a, int b, int c) const {
        return p[index(x, y, z, a, b, c)];
    }
    std::size_t size() const { return p.size(); }
    int setting_triples() const { return nX * nY * nZ; }

    struct Check {
        double negativity = 0.0;       // most negative entry, as a violation
        double normalization = 0.0;    // worst |sum_abc p - 1| per setting triple
        double signaling = 0.0;        // worst marginal mismatch across settings
        bool pass = false;
    };

    /// Structural invariants: nonnegativity, per-setting normalization and
    /// no-signaling of the table itself.
    Check validate(double entry_tol = 1e-10, double ns_tol = 1e-9) const {
        Check ck;
        for (double v : p) ck.negativity = std::max(ck.negativity, -v);
        for (int x = 0; x < nX; ++x)
            for (int y = 0; y < nY; ++y)
                for (int z = 0; z < nZ; ++z) {
                    double s = 0.0;
                    for (int a = 0; a < nA; ++a)
                        for (int b = 0; b < nB; ++b)
                            for (int c = 0; c < nC; ++c) s += at(x, y, z, a, b, c);
                    ck.normalization = std::max(ck.normalization, std::abs(s - 1.0));
                }
        // marginal of each party must not depend on the other settings
        auto marg_a = [&](int x, int a, int y, int z) {
            double s = 0.0;
            for (int b = 0; b < nB; ++b)
                for (int c = 0; c < nC; ++c) s += at(x, y, z, a, b, c);
            return s;
        };
        for (int x = 0; x < nX; ++x)
            for (int a = 0; a < nA; ++a)
                for (int y = 0; y < nY; ++y)
                    for (int z = 0; z < nZ; ++z)
                        ck.signaling = std::max(
                            ck.signaling, std::abs(marg_a(x, a, y, z) - marg_a(x, a, 0, 0)));
        auto marg_b = [&](int y, int b, int x, int z) {
            double s = 0.0;
            for (int a = 0; a < nA; ++a)
                for (int c = 0; c < nC; ++c) s += at(x, y, z, a, b, c);
            return s;
        };
        for (int y = 0; y < nY; ++y)
            for (int b = 0; b < nB; ++b)
                for (int x = 0; x < nX; ++x)
                    for (int z = 0; z < nZ; ++z)
                        ck.signaling = std::max(
                            ck.signaling, std::abs(marg_b(y, b, x, z) - marg_b(y, b, 0, 0)));
        auto marg_c = [&](int z, int c, int x, int y) {
            double s = 0.0;
            for (int a = 0; a < nA; ++a)
                for (int b = 0; b < nB; ++b) s += at(x, y, z, a, b, c);
            return s;
        };
        for (int z = 0; z < nZ; ++z)
            for (int c = 0; c < nC; ++c)
                for (int x = 0; x < nX; ++x)
                    for (int y = 0; y < nY; ++y)
                        ck.signaling = std::max(
                            ck.signaling, std::abs(marg_c(z, c, x, y) - marg_c(z, c, 0, 0)));
        ck.pass = ck.negativity <= entry_tol && ck.normalization <= entry_tol &&
                  ck.signaling <= ns_tol;
        return ck;
    }
};

/// p(abc|xyz) = tr( E_{a|x} sigma_{bc|yz} ).
inline Behaviour behaviour(const Assemblage& a, const MeasurementSet& ms,
                           double povm_tol = 1e-10) {
    ms.validate(povm_tol);
    const Scenario& sc = a.scenario();
    if (ms.povms[0].effects[0].dim() != sc.dimA)
        throw DimensionError("behaviour: measurement dimension mismatch");
    Behaviour out;
    out.nX = ms.settings();
    out.nY = sc.setB;
    out.nZ = sc.setC;
    out.nA = ms.outcomes();
    out.nB = sc.outB;
    out.nC = sc.outC;
    out.p.assign(static_cast<std::size_t>(out.nX) * out.nY * out.nZ * out.nA * out.nB * out.nC,
                 0.0);
    for (int x = 0; x < out.nX; ++x)
        for (int y = 0; y < out.nY; ++y)
            for (int z = 0; z < out.nZ; ++z)
                for (int a2 = 0; a2 < out.nA; ++a2)
                    for (int b = 0; b < out.nB; ++b)
                        for (int c = 0; c < out.nC; ++c)
                            out.p[out.index(x, y, z, a2, b, c)] = trace_product(
                                ms.povms[x].effects[a2], a.at(b, c, y, z));
    return out;
}

} // namespace steercert
