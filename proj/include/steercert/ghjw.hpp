#pragma once

#include <vector>

#include "steercert/assemblage.hpp"

namespace steercert {

/// Explicit quantum realization of a bipartite no-signaling assemblage:
/// a pure state on A x B (dim = dimA^2) and effects for Bob.  Effects are
/// supported on the support of rho_A, so sum_b E_{b|y} equals the support
/// projector; completed_povms() distributes the off-support remainder onto
/// outcome 0 when a physically complete POVM is wanted.
struct QuantumRealization {
    CVec state;                               // |Psi>, row-major (i_A, i_B)
    std::vector<HermitianMatrix> povms;       // E_{b|y}, index y*outB + b
    int dimA = 0;
    int outB = 0;
    int setB = 0;
    int support_dim = 0;

    const HermitianMatrix& effect(int b, int y) const {
        return povms[static_cast<std::size_t>(y) * outB + b];
    }

    /// POVMs completed to identity by assigning I - P_supp to outcome 0.
    std::vector<HermitianMatrix> completed_povms(const HermitianMatrix& support_proj) const {
        std::vector<HermitianMatrix> out = povms;
        const CMat off = CMat::Identity(dimA, dimA) - support_proj.mat();
        for (int y = 0; y < setB; ++y)
            out[static_cast<std::size_t>(y) * outB] =
                hermitize(out[static_cast<std::size_t>(y) * outB].mat() + off);
        return out;
    }
};

/// Rank cutoff on eigenvalues of rho_A; the construction works on the
/// support and treats smaller eigenvalues as zero.
inline constexpr double kGhjwRankTol = 1e-10;

/// Partial trace reconstruction tr_B[ |Psi><Psi| (I x E) ] = W E^T W^dagger
/// with W the dimA x dimA reshaping of |Psi>.
inline HermitianMatrix ghjw_reconstruct_block(const CVec& state, int dimA,
                                              const HermitianMatrix& effect) {
    CMat W(dimA, dimA);
    for (int i = 0; i < dimA; ++i)
        for (int m = 0; m < dimA; ++m) W(i, m) = state(static_cast<Eigen::Index>(i) * dimA + m);
    return hermitize(W * effect.mat().transpose() * W.adjoint());
}

inline BipartiteAssemblage ghjw_reconstruct(const QuantumRealization& r) {
    std::vector<HermitianMatrix> blocks;
    blocks.reserve(r.povms.size());
    for (int y = 0; y < r.setB; ++y)
        for (int b = 0; b < r.outB; ++b)
            blocks.push_back(ghjw_reconstruct_block(r.state, r.dimA, r.effect(b, y)));
    return BipartiteAssemblage(r.dimA, r.outB, r.setB, std::move(blocks));
}

/// Construct the quantum realization of a bipartite no-signaling assemblage:
/// diagonalize rho_A = sum_k mu_k |k><k|, take the purification
/// |Psi> = sum_k sqrt(mu_k) |k>|k> and effects
/// E_{b|y} = rho^{-1/2} sigma^T_{b|y} rho^{-1/2} with the transpose taken in
/// the eigenbasis of rho_A (required for the reconstruction identity when
/// rho_A is not diagonal).
inline QuantumRealization ghjw_realize(const BipartiteAssemblage& a, double tol = 1e-9) {
    const ValidationReport rep = validate_bipartite_ns(a, tol);
    if (!rep.pass)
        throw InvalidInput("ghjw_realize: assemblage fails no-signaling validation (worst " +
                           std::to_string(rep.worst()) + ")");
    const int d = a.dimA();
    const HermitianMatrix rho = a.reduced_state();

    Eigen::SelfAdjointEigenSolver<CMat> es(rho.mat());
    const RVec mu = es.eigenvalues();
    const CMat U = es.eigenvectors();

    std::vector<int> supp;
    for (int k = 0; k < d; ++k)
        if (mu(k) > kGhjwRankTol) supp.push_back(k);
    if (supp.empty()) throw InvalidInput("ghjw_realize: rho_A has empty support");

    CMat proj = CMat::Zero(d, d);
    for (int k : supp) proj += U.col(k) * U.col(k).adjoint();

    // every block must live on the support of rho_A
    for (const auto& s : a.blocks()) {
        const double leak = max_abs(s.mat() - proj * s.mat() * proj);
        if (leak > tol)
            throw InvalidInput("ghjw_realize: block support leaks outside rho_A's support by " +
                               std::to_string(leak));
    }

    QuantumRealization r;
    r.dimA = d;
    r.outB = a.outB();
    r.setB = a.setB();
    r.support_dim = static_cast<int>(supp.size());

    r.state = CVec::Zero(static_cast<Eigen::Index>(d) * d);
    for (int k : supp) {
        const double w = std::sqrt(mu(k));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                r.state(static_cast<Eigen::Index>(i) * d + j) += w * U(i, k) * U(j, k);
    }

    r.povms.reserve(a.blocks().size());
    for (int y = 0; y < a.setB(); ++y)
        for (int b = 0; b < a.outB(); ++b) {
            const CMat st = U.adjoint() * a.at(b, y).mat() * U;  // eigenbasis coordinates
            CMat eff = CMat::Zero(d, d);
            for (int k : supp)
                for (int l : supp)
                    eff(l, k) = st(k, l) / std::sqrt(mu(k) * mu(l));
            r.povms.push_back(hermitize(U * eff * U.adjoint()));
        }
    return r;
}

/// Largest deviation between the input assemblage and the reconstruction
/// from its realization; the executable form of the bipartite theorem.
inline double ghjw_reconstruction_error(const BipartiteAssemblage& a,
                                        const QuantumRealization& r) {
    double err = 0.0;
    for (int y = 0; y < a.setB(); ++y)
        for (int b = 0; b < a.outB(); ++b)
            err = std::max(err, max_abs(a.at(b, y).mat() -
                                        ghjw_reconstruct_block(r.state, r.dimA,
                                                               r.effect(b, y)).mat()));
    return err;
}

} // namespace steercert
