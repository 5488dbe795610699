#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "steercert/matrix.hpp"
#include "steercert/scenario.hpp"

namespace steercert {

/// Validation tolerance used when checking tables published with 4-decimal
/// rounding; constructed data is validated at kHermTol instead.
inline constexpr double kPublishedTol = 1e-3;

/// Outcome of a no-signaling validation: per-constraint-family worst
/// violations plus the overall verdict.
struct ValidationReport {
    double positivity = 0.0;     // most negative block eigenvalue, as a violation (>= 0)
    double marginal_b = 0.0;     // worst setting-dependence of Bob-summed marginals
    double marginal_c = 0.0;     // worst setting-dependence of Charlie-summed marginals
    double normalization = 0.0;  // |tr rho_A - 1| worst case over settings
    double tolerance = 0.0;
    bool pass = false;

    double worst() const {
        return std::max(std::max(positivity, normalization), std::max(marginal_b, marginal_c));
    }
};

/// Tripartite assemblage: family of unnormalized conditional states on
/// Alice's system, indexed by Bob/Charlie outcomes and settings.
class Assemblage {
  public:
    Assemblage() = default;

    Assemblage(Scenario sc, std::vector<HermitianMatrix> blocks)
        : sc_(sc), blocks_(std::move(blocks)) {
        sc_.validate();
        const std::size_t n = static_cast<std::size_t>(sc_.outB) * sc_.outC * sc_.setB * sc_.setC;
        if (blocks_.size() != n)
            throw DimensionError("Assemblage: expected " + std::to_string(n) + " blocks");
        for (const auto& m : blocks_)
            if (m.dim() != sc_.dimA)
                throw DimensionError("Assemblage: block dimension does not match scenario");
    }

    static Assemblage zero(const Scenario& sc) {
        std::vector<HermitianMatrix> blocks(
            static_cast<std::size_t>(sc.outB) * sc.outC * sc.setB * sc.setC,
            HermitianMatrix::zero(sc.dimA));
        return Assemblage(sc, std::move(blocks));
    }

    const Scenario& scenario() const { return sc_; }

    std::size_t index(int b, int c, int y, int z) const {
        return ((static_cast<std::size_t>(y) * sc_.setC + z) * sc_.outB + b) * sc_.outC + c;
    }

    const HermitianMatrix& at(int b, int c, int y, int z) const {
        return blocks_[index(b, c, y, z)];
    }
    HermitianMatrix& at(int b, int c, int y, int z) { return blocks_[index(b, c, y, z)]; }

    const std::vector<HermitianMatrix>& blocks() const { return blocks_; }

    /// sigma^B_{b|y} = sum_c sigma_{bc|yz}, averaged over z for robustness
    /// against tolerated NS violations in validated-but-rounded data.
    HermitianMatrix marginal_b(int b, int y) const {
        CMat acc = CMat::Zero(sc_.dimA, sc_.dimA);
        for (int z = 0; z < sc_.setC; ++z)
            for (int c = 0; c < sc_.outC; ++c) acc += at(b, c, y, z).mat();
        return hermitize(acc / sc_.setC);
    }

    HermitianMatrix marginal_c(int c, int z) const {
        CMat acc = CMat::Zero(sc_.dimA, sc_.dimA);
        for (int y = 0; y < sc_.setB; ++y)
            for (int b = 0; b < sc_.outB; ++b) acc += at(b, c, y, z).mat();
        return hermitize(acc / sc_.setB);
    }

    /// rho_A = sum_{bc} sigma_{bc|yz}, averaged over all setting pairs.
    HermitianMatrix reduced_state() const {
        CMat acc = CMat::Zero(sc_.dimA, sc_.dimA);
        for (int y = 0; y < sc_.setB; ++y)
            for (int z = 0; z < sc_.setC; ++z)
                for (int b = 0; b < sc_.outB; ++b)
                    for (int c = 0; c < sc_.outC; ++c) acc += at(b, c, y, z).mat();
        return hermitize(acc / (sc_.setB * sc_.setC));
    }

    bool is_real(double tol = kHermTol) const {
        for (const auto& m : blocks_)
            if (!m.is_real(tol)) return false;
        return true;
    }

  private:
    Scenario sc_;
    std::vector<HermitianMatrix> blocks_;
};

/// Bipartite assemblage: one untrusted party (Bob).
class BipartiteAssemblage {
  public:
    BipartiteAssemblage() = default;

    BipartiteAssemblage(int dimA, int outB, int setB, std::vector<HermitianMatrix> blocks)
        : dimA_(dimA), outB_(outB), setB_(setB), blocks_(std::move(blocks)) {
        if (dimA < 1 || outB < 1 || setB < 1)
            throw InvalidInput("BipartiteAssemblage: dimensions must be >= 1");
        if (blocks_.size() != static_cast<std::size_t>(outB) * setB)
            throw DimensionError("BipartiteAssemblage: wrong number of blocks");
        for (const auto& m : blocks_)
            if (m.dim() != dimA)
                throw DimensionError("BipartiteAssemblage: block dimension mismatch");
    }

    int dimA() const { return dimA_; }
    int outB() const { return outB_; }
    int setB() const { return setB_; }

    const HermitianMatrix& at(int b, int y) const {
        return blocks_[static_cast<std::size_t>(y) * outB_ + b];
    }
    HermitianMatrix& at(int b, int y) { return blocks_[static_cast<std::size_t>(y) * outB_ + b]; }
    const std::vector<HermitianMatrix>& blocks() const { return blocks_; }

    HermitianMatrix reduced_state() const {
        CMat acc = CMat::Zero(dimA_, dimA_);
        for (int y = 0; y < setB_; ++y)
            for (int b = 0; b < outB_; ++b) acc += at(b, y).mat();
        return hermitize(acc / setB_);
    }

  private:
    int dimA_ = 0, outB_ = 0, setB_ = 0;
    std::vector<HermitianMatrix> blocks_;
};

/// No-signaling validation of a tripartite assemblage: block positivity,
/// setting-independence of both summed marginals, and unit normalization.
inline ValidationReport validate_tripartite_ns(const Assemblage& asm_, double tol) {
    const Scenario& sc = asm_.scenario();
    ValidationReport rep;
    rep.tolerance = tol;

    for (const auto& m : asm_.blocks())
        rep.positivity = std::max(rep.positivity, -m.min_eigenvalue());

    // sum_b sigma_{bc|yz} must be independent of y
    for (int c = 0; c < sc.outC; ++c)
        for (int z = 0; z < sc.setC; ++z)
            for (int y = 0; y < sc.setB; ++y)
                for (int y2 = y + 1; y2 < sc.setB; ++y2) {
                    CMat d = CMat::Zero(sc.dimA, sc.dimA);
                    for (int b = 0; b < sc.outB; ++b)
                        d += asm_.at(b, c, y, z).mat() - asm_.at(b, c, y2, z).mat();
                    rep.marginal_b = std::max(rep.marginal_b, max_abs(d));
                }

    // sum_c sigma_{bc|yz} must be independent of z
    for (int b = 0; b < sc.outB; ++b)
        for (int y = 0; y < sc.setB; ++y)
            for (int z = 0; z < sc.setC; ++z)
                for (int z2 = z + 1; z2 < sc.setC; ++z2) {
                    CMat d = CMat::Zero(sc.dimA, sc.dimA);
                    for (int c = 0; c < sc.outC; ++c)
                        d += asm_.at(b, c, y, z).mat() - asm_.at(b, c, y, z2).mat();
                    rep.marginal_c = std::max(rep.marginal_c, max_abs(d));
                }

    for (int y = 0; y < sc.setB; ++y)
        for (int z = 0; z < sc.setC; ++z) {
            double tr = 0.0;
            for (int b = 0; b < sc.outB; ++b)
                for (int c = 0; c < sc.outC; ++c) tr += asm_.at(b, c, y, z).trace();
            rep.normalization = std::max(rep.normalization, std::abs(tr - 1.0));
        }

    rep.pass = rep.worst() <= tol;
    return rep;
}

inline ValidationReport validate_bipartite_ns(const BipartiteAssemblage& asm_, double tol) {
    ValidationReport rep;
    rep.tolerance = tol;
    for (const auto& m : asm_.blocks())
        rep.positivity = std::max(rep.positivity, -m.min_eigenvalue());
    for (int y = 0; y < asm_.setB(); ++y)
        for (int y2 = y + 1; y2 < asm_.setB(); ++y2) {
            CMat d = CMat::Zero(asm_.dimA(), asm_.dimA());
            for (int b = 0; b < asm_.outB(); ++b)
                d += asm_.at(b, y).mat() - asm_.at(b, y2).mat();
            rep.marginal_b = std::max(rep.marginal_b, max_abs(d));
        }
    for (int y = 0; y < asm_.setB(); ++y) {
        double tr = 0.0;
        for (int b = 0; b < asm_.outB(); ++b) tr += asm_.at(b, y).trace();
        rep.normalization = std::max(rep.normalization, std::abs(tr - 1.0));
    }
    rep.pass = rep.worst() <= tol;
    return rep;
}

/// Minimal representation of a 2-outcome, Bob<->Charlie symmetric assemblage:
/// reduced state, outcome-0 Bob marginals and the (0,0) joint blocks.
struct MinimalAssemblageData {
    HermitianMatrix rho;                             // rho_A
    std::vector<HermitianMatrix> sigma_b0;           // sigma^B_{0|y}
    std::vector<std::vector<HermitianMatrix>> s00;   // sigma_{00|yz}
};

/// Rebuild the full 2-outcome assemblage from minimal symmetric data using
/// sigma^C_{0|z} = sigma^B_{0|z} and the no-signaling sum rules.
inline Assemblage reconstruct_from_minimal(const MinimalAssemblageData& d, const Scenario& sc,
                                           double sym_tol = kPublishedTol) {
    if (sc.outB != 2 || sc.outC != 2)
        throw InvalidInput("reconstruct_from_minimal: requires 2-outcome scenario");
    if (sc.setB != sc.setC)
        throw InvalidInput("reconstruct_from_minimal: requires equal setting counts");
    if (static_cast<int>(d.sigma_b0.size()) != sc.setB)
        throw DimensionError("reconstruct_from_minimal: wrong marginal count");
    for (int y = 0; y < sc.setB; ++y)
        for (int z = 0; z < sc.setC; ++z) {
            double dev = max_abs(d.s00[y][z].mat() - CMat(d.s00[z][y].mat().transpose()));
            if (dev > sym_tol)
                throw InvalidInput("reconstruct_from_minimal: Bob<->Charlie symmetry violated by " +
                                   std::to_string(dev));
        }

    Assemblage out = Assemblage::zero(sc);
    for (int y = 0; y < sc.setB; ++y)
        for (int z = 0; z < sc.setC; ++z) {
            const auto& s00 = d.s00[y][z];
            const auto& sB = d.sigma_b0[y];
            const auto& sC = d.sigma_b0[z];  // sigma^C_{0|z} read as literal block equality
            out.at(0, 0, y, z) = s00;
            out.at(0, 1, y, z) = sB - s00;
            out.at(1, 0, y, z) = sC - s00;
            out.at(1, 1, y, z) = d.rho - sB - sC + s00;
        }
    return out;
}

/// Extract the minimal representation (outcome-0 data) from a full assemblage.
inline MinimalAssemblageData minimal_data_of(const Assemblage& a) {
    const Scenario& sc = a.scenario();
    if (sc.outB != 2 || sc.outC != 2)
        throw InvalidInput("minimal_data_of: requires 2-outcome scenario");
    MinimalAssemblageData d;
    d.rho = a.reduced_state();
    for (int y = 0; y < sc.setB; ++y) d.sigma_b0.push_back(a.marginal_b(0, y));
    d.s00.assign(sc.setB, std::vector<HermitianMatrix>(sc.setC, HermitianMatrix::zero(sc.dimA)));
    for (int y = 0; y < sc.setB; ++y)
        for (int z = 0; z < sc.setC; ++z) d.s00[y][z] = a.at(0, 0, y, z);
    return d;
}

/// PR-box probability table p(bc|yz) = 1/2 if b xor c = y*z, else 0.
inline double prbox_probability(int b, int c, int y, int z) {
    return ((b ^ c) == (y & z)) ? 0.5 : 0.0;
}

/// Product assemblage sigma_{bc|yz} = p_PR(bc|yz) * rho_A.
inline Assemblage prbox_product(const HermitianMatrix& rho, double tol = kHermTol) {
    if (!rho.is_psd(tol) || std::abs(rho.trace() - 1.0) > tol)
        throw InvalidInput("prbox_product: rho_A must be a density matrix");
    Scenario sc{rho.dim(), 2, 2, 2, 2};
    Assemblage out = Assemblage::zero(sc);
    for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c)
            for (int y = 0; y < 2; ++y)
                for (int z = 0; z < 2; ++z)
                    out.at(b, c, y, z) = rho * prbox_probability(b, c, y, z);
    return out;
}

/// Blockwise depolarization sigma(mu) = mu sigma + (1-mu) tr(sigma) I/2.
/// Qubit-specific (the identity term is I/2).
inline Assemblage add_noise(const Assemblage& a, double mu) {
    if (a.scenario().dimA != 2) throw InvalidInput("add_noise: requires dimA = 2");
    if (mu < 0.0 || mu > 1.0) throw InvalidInput("add_noise: mu must lie in [0,1]");
    Assemblage out = a;
    const CMat id = CMat::Identity(2, 2);
    for (int y = 0; y < a.scenario().setB; ++y)
        for (int z = 0; z < a.scenario().setC; ++z)
            for (int b = 0; b < a.scenario().outB; ++b)
                for (int c = 0; c < a.scenario().outC; ++c) {
                    const HermitianMatrix& s = a.at(b, c, y, z);
                    out.at(b, c, y, z) =
                        hermitize(mu * s.mat() + (1.0 - mu) * s.trace() * id / 2.0);
                }
    return out;
}

/// Inverse of add_noise.  De-noised blocks of rounded published data may be
/// slightly indefinite; the most negative eigenvalue is reported through
/// min_eigenvalue_out rather than treated as an error.
inline Assemblage denoise(const Assemblage& a, double mu,
                          double* min_eigenvalue_out = nullptr) {
    if (a.scenario().dimA != 2) throw InvalidInput("denoise: requires dimA = 2");
    if (!(mu > 0.0)) throw InvalidInput("denoise: mu must be positive");
    Assemblage out = a;
    const CMat id = CMat::Identity(2, 2);
    double min_eig = 0.0;
    for (int y = 0; y < a.scenario().setB; ++y)
        for (int z = 0; z < a.scenario().setC; ++z)
            for (int b = 0; b < a.scenario().outB; ++b)
                for (int c = 0; c < a.scenario().outC; ++c) {
                    const HermitianMatrix& s = a.at(b, c, y, z);
                    HermitianMatrix r =
                        hermitize((s.mat() - (1.0 - mu) * s.trace() * id / 2.0) / mu);
                    min_eig = std::min(min_eig, r.min_eigenvalue());
                    out.at(b, c, y, z) = r;
                }
    if (min_eigenvalue_out) *min_eigenvalue_out = min_eig;
    return out;
}

/// Qutrit lift sigma' = (1/3) sigma + (2/3) tr(sigma) |2><2|, embedding the
/// qubit blocks in the {|0>,|1>} subspace.  Trace-preserving.
inline Assemblage lift_qutrit(const Assemblage& a) {
    if (a.scenario().dimA != 2) throw InvalidInput("lift_qutrit: requires dimA = 2");
    Scenario sc3 = a.scenario();
    sc3.dimA = 3;
    Assemblage out = Assemblage::zero(sc3);
    for (int y = 0; y < sc3.setB; ++y)
        for (int z = 0; z < sc3.setC; ++z)
            for (int b = 0; b < sc3.outB; ++b)
                for (int c = 0; c < sc3.outC; ++c) {
                    const HermitianMatrix& s = a.at(b, c, y, z);
                    CMat m = CMat::Zero(3, 3);
                    m.topLeftCorner(2, 2) = s.mat() / 3.0;
                    m(2, 2) = 2.0 / 3.0 * s.trace();
                    out.at(b, c, y, z) = hermitize(m);
                }
    return out;
}

/// Local filter F = |0><0| + |1><1| applied to a qutrit assemblage, with the
/// result renormalized by the weight the filter keeps.  Inverse of
/// lift_qutrit on its outputs.
inline Assemblage filter_back(const Assemblage& a3, double tol = kHermTol) {
    if (a3.scenario().dimA != 3) throw InvalidInput("filter_back: requires dimA = 3");
    double weight = a3.reduced_state().mat().topLeftCorner(2, 2).trace().real();
    if (weight <= tol) throw InvalidInput("filter_back: no weight in the qubit subspace");
    Scenario sc2 = a3.scenario();
    sc2.dimA = 2;
    Assemblage out = Assemblage::zero(sc2);
    for (int y = 0; y < sc2.setB; ++y)
        for (int z = 0; z < sc2.setC; ++z)
            for (int b = 0; b < sc2.outB; ++b)
                for (int c = 0; c < sc2.outC; ++c)
                    out.at(b, c, y, z) =
                        hermitize(a3.at(b, c, y, z).mat().topLeftCorner(2, 2) / weight);
    return out;
}

} // namespace steercert
