#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "steercert/conic.hpp"

namespace steercert {

struct IpmOptions {
    double tolerance = 1e-9;        // target primal/dual feasibility and relative gap
    double accept_tolerance = 1e-7; // accept on numerical stall once below this
    int max_iterations = 120;
};

/// Solution of a conic program: primal blocks, dual multipliers y and dual
/// slack blocks, plus the achieved accuracy.
struct ConicSolution {
    std::vector<RMat> psd;       // primal PSD blocks
    RVec nonneg;                 // primal nonnegative variables
    RVec y;                      // equality multipliers
    std::vector<RMat> dual_psd;  // dual slack blocks
    RVec dual_nonneg;
    double primal_objective = 0.0;
    double dual_objective = 0.0;
    double gap = 0.0;
    double primal_infeasibility = 0.0;
    double dual_infeasibility = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Primal-dual interior-point solver (HKM direction, Mehrotra
/// predictor-corrector) for small dense problems.  Every program this
/// artifact builds is feasible and bounded with strictly feasible points by
/// construction, so no infeasibility detection is attempted; verdicts such
/// as "not local" are encoded in objective values of always-feasible
/// programs.
class IpmSolver {
  public:
    explicit IpmSolver(IpmOptions opts = {}) : opts_(opts) {}

    ConicSolution solve(const ConicProgram& prog) const {
        Workspace w(prog);
        return run(w);
    }

  private:
    struct Workspace {
        const ConicProgram& prog;
        std::vector<int> dims;
        int lp = 0;
        int nvec = 0;
        std::vector<int> offsets;
        int lp_offset = 0;
        RMat A;
        RVec b;
        RVec c;
        std::vector<int> kept;
        std::vector<int> dropped;
        int m = 0;

        explicit Workspace(const ConicProgram& p) : prog(p) {
            dims = p.psd_dims;
            lp = p.nonneg;
            for (int d : dims) {
                offsets.push_back(nvec);
                nvec += d * (d + 1) / 2;
            }
            lp_offset = nvec;
            nvec += lp;
            c = to_svec(p.objective);

            const int m_all = static_cast<int>(p.constraints.size());
            RMat A_all(m_all, nvec);
            for (int i = 0; i < m_all; ++i) A_all.row(i) = to_svec(p.constraints[i]);

            // drop dependent rows (rank-revealing QR of A^T); dependent rows
            // with inconsistent rhs would make the program infeasible, which
            // the generators never produce -- verified post-solve.
            Eigen::ColPivHouseholderQR<RMat> qr(A_all.transpose());
            const RMat& R = qr.matrixR();
            const double thresh = std::max(1e-12, 1e-10 * std::abs(R(0, 0)));
            int rank = 0;
            for (int i = 0; i < std::min<int>(m_all, nvec); ++i)
                if (std::abs(R(i, i)) > thresh) ++rank;
            std::vector<char> keep(m_all, 0);
            for (int i = 0; i < rank; ++i) keep[qr.colsPermutation().indices()(i)] = 1;
            for (int i = 0; i < m_all; ++i) (keep[i] ? kept : dropped).push_back(i);

            m = rank;
            A.resize(m, nvec);
            b.resize(m);
            for (int i = 0; i < m; ++i) {
                A.row(i) = A_all.row(kept[i]);
                b(i) = prog.rhs[kept[i]];
            }
        }

        // svec with sqrt(2) off-diagonal scaling preserves inner products
        RVec to_svec(const LinearOperator& op) const {
            RVec v = RVec::Zero(nvec);
            for (const auto& e : op.entries) {
                if (e.block == static_cast<int>(dims.size())) {
                    v(lp_offset + e.row) += e.value;
                } else {
                    const int idx = offsets[e.block] + e.col * (e.col + 1) / 2 + e.row;
                    v(idx) += (e.row == e.col) ? e.value : e.value / std::numbers::sqrt2;
                }
            }
            return v;
        }

        RMat block_from_svec(const RVec& v, int blk) const {
            const int n = dims[blk];
            RMat M(n, n);
            int k = offsets[blk];
            for (int j = 0; j < n; ++j)
                for (int i = 0; i <= j; ++i, ++k) {
                    const double val = (i == j) ? v(k) : v(k) / std::numbers::sqrt2;
                    M(i, j) = val;
                    M(j, i) = val;
                }
            return M;
        }

        void block_to_svec(const RMat& M, int blk, RVec& v) const {
            const int n = dims[blk];
            int k = offsets[blk];
            for (int j = 0; j < n; ++j)
                for (int i = 0; i <= j; ++i, ++k)
                    v(k) = (i == j) ? M(i, j) : M(i, j) * std::numbers::sqrt2;
        }
    };

    struct Kernel {
        // factorizations of the current S blocks and X eigensystems
        std::vector<RMat> X, Sinv;
    };

    ConicSolution run(Workspace& w) const {
        const int nb = static_cast<int>(w.dims.size());
        double nu = w.lp;
        for (int d : w.dims) nu += d;
        nu = std::max(1.0, nu);

        const double bnorm = w.b.size() ? w.b.cwiseAbs().maxCoeff() : 0.0;
        const double cnorm = w.c.size() ? w.c.cwiseAbs().maxCoeff() : 0.0;
        const double xs = std::max({10.0, 2.0 * bnorm, std::sqrt(nu)});
        const double ss = std::max({10.0, 2.0 * cnorm, std::sqrt(nu)});

        RVec x = RVec::Zero(w.nvec), s = RVec::Zero(w.nvec);
        for (int blk = 0; blk < nb; ++blk) {
            RMat I = RMat::Identity(w.dims[blk], w.dims[blk]);
            w.block_to_svec(I * xs, blk, x);
            w.block_to_svec(I * ss, blk, s);
        }
        for (int k = 0; k < w.lp; ++k) {
            x(w.lp_offset + k) = xs;
            s(w.lp_offset + k) = ss;
        }
        RVec y = RVec::Zero(w.m);

        ConicSolution sol;
        Kernel K;
        K.X.resize(nb);
        K.Sinv.resize(nb);
        RMat Msch(w.m, w.m);
        RVec dy(w.m), dy_aff(w.m);
        RVec dx(w.nvec), ds(w.nvec), dx_aff(w.nvec), ds_aff(w.nvec);
        int stall = 0;
        double last_mu = 1e300;
        bool numerical_end = false;

        for (int iter = 0; iter < opts_.max_iterations; ++iter) {
            for (int blk = 0; blk < nb; ++blk) {
                K.X[blk] = w.block_from_svec(x, blk);
                K.Sinv[blk] = clamped_inverse(w.block_from_svec(s, blk));
            }

            const double mu = x.dot(s) / nu;
            const RVec rp = w.b - w.A * x;
            const RVec rd = w.c - s - w.A.transpose() * y;
            const double pobj = w.c.dot(x);
            const double dobj = w.b.dot(y);
            sol.primal_infeasibility =
                rp.size() ? rp.cwiseAbs().maxCoeff() / (1.0 + bnorm) : 0.0;
            sol.dual_infeasibility = rd.cwiseAbs().maxCoeff() / (1.0 + cnorm);
            sol.gap = x.dot(s) / (1.0 + std::abs(pobj) + std::abs(dobj));
            sol.iterations = iter;
            if (accuracy_met(sol, opts_.tolerance)) {
                sol.converged = true;
                break;
            }
            if (mu > 0.99 * last_mu) {
                if (++stall >= 4) {
                    numerical_end = true;
                    break;
                }
            } else {
                stall = 0;
            }
            last_mu = mu;

            build_schur(w, K, x, s, Msch);
            Eigen::LDLT<RMat> fact;
            double reg = 0.0;
            for (int attempt = 0;; ++attempt) {
                RMat Mreg = Msch;
                if (reg > 0.0)
                    Mreg.diagonal().array() += reg * (1.0 + Msch.diagonal().cwiseAbs().maxCoeff());
                fact.compute(Mreg);
                if (fact.info() == Eigen::Success && fact.isPositive()) break;
                if (attempt >= 4) break;
                reg = (reg == 0.0) ? 1e-14 : reg * 100.0;
            }
            auto schur_solve = [&](const RVec& r) {
                RVec sln = fact.solve(r);
                // one refinement step against the unregularized matrix
                sln += fact.solve(r - Msch * sln);
                return sln;
            };

            // predictor
            RVec kv = kernel_vector(w, K, x, s, rd, 0.0, 0.0, nullptr, nullptr);
            dy_aff = schur_solve(rp - w.A * kv);
            recover_direction(w, K, x, s, rd, 0.0, 0.0, nullptr, nullptr, dy_aff, dx_aff, ds_aff);

            const double ap_aff = std::min(1.0, max_step(w, x, dx_aff));
            const double ad_aff = std::min(1.0, max_step(w, s, ds_aff));
            const double mu_aff = (x + ap_aff * dx_aff).dot(s + ad_aff * ds_aff) / nu;
            const double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3.0);

            // corrector
            kv = kernel_vector(w, K, x, s, rd, sigma, mu, &dx_aff, &ds_aff);
            dy = schur_solve(rp - w.A * kv);
            recover_direction(w, K, x, s, rd, sigma, mu, &dx_aff, &ds_aff, dy, dx, ds);

            const double frac = std::min(0.99, std::max(0.90, 1.0 - mu));
            const double ap = std::min(1.0, frac * max_step(w, x, dx));
            const double ad = std::min(1.0, frac * max_step(w, s, ds));
            if (ap < 1e-10 && ad < 1e-10) {
                numerical_end = true;
                break;
            }
            x += ap * dx;
            y += ad * dy;
            s += ad * ds;
        }

        if (!sol.converged) {
            (void)numerical_end;
            if (accuracy_met(sol, opts_.accept_tolerance)) {
                sol.converged = true;  // achieved accuracy recorded in the result
            } else {
                std::ostringstream os;
                os << "ipm: no convergence (gap " << sol.gap << ", pinf "
                   << sol.primal_infeasibility << ", dinf " << sol.dual_infeasibility << ")";
                throw SolverError(os.str());
            }
        }

        sol.psd.resize(nb);
        sol.dual_psd.resize(nb);
        for (int blk = 0; blk < nb; ++blk) {
            sol.psd[blk] = w.block_from_svec(x, blk);
            sol.dual_psd[blk] = w.block_from_svec(s, blk);
        }
        sol.nonneg = x.tail(w.lp);
        sol.dual_nonneg = s.tail(w.lp);
        sol.primal_objective = w.c.dot(x);
        sol.dual_objective = w.b.dot(y);

        sol.y = RVec::Zero(static_cast<Eigen::Index>(w.prog.constraints.size()));
        for (int i = 0; i < w.m; ++i) sol.y(w.kept[i]) = y(i);

        for (int i : w.dropped) {
            const double v = w.to_svec(w.prog.constraints[i]).dot(x);
            if (std::abs(v - w.prog.rhs[i]) > 1e-6 * (1.0 + std::abs(w.prog.rhs[i])))
                throw SolverError("ipm: dependent constraint row is inconsistent");
        }
        return sol;
    }

    static bool accuracy_met(const ConicSolution& s, double tol) {
        return s.primal_infeasibility < tol && s.dual_infeasibility < tol && s.gap < tol;
    }

    // inverse through an eigendecomposition with eigenvalues clamped away
    // from zero; keeps late iterations alive when S grazes the boundary
    static RMat clamped_inverse(const RMat& S) {
        Eigen::SelfAdjointEigenSolver<RMat> es(S);
        const double lmax = std::max(1e-300, es.eigenvalues().maxCoeff());
        const double floor_ = std::max(1e-250, 1e-16 * lmax);
        RVec inv = es.eigenvalues();
        for (int i = 0; i < inv.size(); ++i) inv(i) = 1.0 / std::max(inv(i), floor_);
        return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
    }

    void build_schur(const Workspace& w, const Kernel& K, const RVec& x, const RVec& s,
                     RMat& M) const {
        const int nb = static_cast<int>(w.dims.size());
        M.setZero();
        RVec tv = RVec::Zero(w.nvec);
        for (int blk = 0; blk < nb; ++blk) {
            const int off = w.offsets[blk];
            const int len = w.dims[blk] * (w.dims[blk] + 1) / 2;
            for (int j = 0; j < w.m; ++j) {
                if (w.A.row(j).segment(off, len).isZero(0.0)) continue;
                RVec full = RVec::Zero(w.nvec);
                full.segment(off, len) = w.A.row(j).segment(off, len);
                const RMat Aj = w.block_from_svec(full, blk);
                const RMat T = K.X[blk] * Aj * K.Sinv[blk];
                w.block_to_svec(0.5 * (T + T.transpose()), blk, tv);
                for (int i = 0; i <= j; ++i) {
                    const double mij = w.A.row(i).segment(off, len).dot(tv.segment(off, len));
                    M(i, j) += mij;
                    if (i != j) M(j, i) += mij;
                }
            }
        }
        if (w.lp > 0) {
            RVec d(w.lp);
            for (int k = 0; k < w.lp; ++k) d(k) = x(w.lp_offset + k) / s(w.lp_offset + k);
            for (int j = 0; j < w.m; ++j) {
                RVec aj = w.A.row(j).tail(w.lp);
                if (aj.isZero(0.0)) continue;
                const RVec daj = d.cwiseProduct(aj);
                for (int i = 0; i <= j; ++i) {
                    const double mij = w.A.row(i).tail(w.lp).dot(daj);
                    M(i, j) += mij;
                    if (i != j) M(j, i) += mij;
                }
            }
        }
    }

    // sigma mu Sinv - X - sym(X Rd Sinv) [- sym(dXa dSa Sinv)] per block
    RVec kernel_vector(const Workspace& w, const Kernel& K, const RVec& x, const RVec& s,
                       const RVec& rd_vec, double sigma, double mu, const RVec* dxa,
                       const RVec* dsa) const {
        const int nb = static_cast<int>(w.dims.size());
        RVec out = RVec::Zero(w.nvec);
        for (int blk = 0; blk < nb; ++blk) {
            const RMat Rd = w.block_from_svec(rd_vec, blk);
            RMat term = -K.X[blk] - sym_prod(K.X[blk], Rd, K.Sinv[blk]);
            if (sigma > 0.0)
                term += sigma * mu * K.Sinv[blk];
            if (dxa && dsa)
                term -= sym_prod(w.block_from_svec(*dxa, blk), w.block_from_svec(*dsa, blk),
                                 K.Sinv[blk]);
            w.block_to_svec(term, blk, out);
        }
        for (int k = 0; k < w.lp; ++k) {
            const int idx = w.lp_offset + k;
            double t = -x(idx) - x(idx) * rd_vec(idx) / s(idx);
            if (sigma > 0.0) t += sigma * mu / s(idx);
            if (dxa && dsa) t -= (*dxa)(idx) * (*dsa)(idx) / s(idx);
            out(idx) = t;
        }
        return out;
    }

    void recover_direction(const Workspace& w, const Kernel& K, const RVec& x, const RVec& s,
                           const RVec& rd_vec, double sigma, double mu, const RVec* dxa,
                           const RVec* dsa, const RVec& dy, RVec& dx, RVec& ds) const {
        ds = rd_vec - w.A.transpose() * dy;
        const int nb = static_cast<int>(w.dims.size());
        dx = RVec::Zero(w.nvec);
        for (int blk = 0; blk < nb; ++blk) {
            const RMat dS = w.block_from_svec(ds, blk);
            RMat term = -K.X[blk] - sym_prod(K.X[blk], dS, K.Sinv[blk]);
            if (sigma > 0.0) term += sigma * mu * K.Sinv[blk];
            if (dxa && dsa)
                term -= sym_prod(w.block_from_svec(*dxa, blk), w.block_from_svec(*dsa, blk),
                                 K.Sinv[blk]);
            w.block_to_svec(term, blk, dx);
        }
        for (int k = 0; k < w.lp; ++k) {
            const int idx = w.lp_offset + k;
            double t = -x(idx) - x(idx) * ds(idx) / s(idx);
            if (sigma > 0.0) t += sigma * mu / s(idx);
            if (dxa && dsa) t -= (*dxa)(idx) * (*dsa)(idx) / s(idx);
            dx(idx) = t;
        }
    }

    static RMat sym_prod(const RMat& P, const RMat& Q, const RMat& R) {
        const RMat T = P * Q * R;
        return 0.5 * (T + T.transpose());
    }

    // largest alpha with v + alpha dv in the cone, via the eigenvalues of
    // V^{-1/2} dV V^{-1/2} with clamped eigenvalues of V
    double max_step(const Workspace& w, const RVec& v, const RVec& dv) const {
        double alpha = 1e30;
        const int nb = static_cast<int>(w.dims.size());
        for (int blk = 0; blk < nb; ++blk) {
            const RMat V = w.block_from_svec(v, blk);
            const RMat dV = w.block_from_svec(dv, blk);
            Eigen::SelfAdjointEigenSolver<RMat> es(V);
            const double lmax = std::max(1e-300, es.eigenvalues().maxCoeff());
            const double floor_ = std::max(1e-250, 1e-16 * lmax);
            RVec isqrt = es.eigenvalues();
            for (int i = 0; i < isqrt.size(); ++i)
                isqrt(i) = 1.0 / std::sqrt(std::max(isqrt(i), floor_));
            const RMat Vih = es.eigenvectors() * isqrt.asDiagonal() * es.eigenvectors().transpose();
            const RMat W = Vih * dV * Vih;
            Eigen::SelfAdjointEigenSolver<RMat> es2(0.5 * (W + W.transpose()),
                                                    Eigen::EigenvaluesOnly);
            const double lmin = es2.eigenvalues().minCoeff();
            if (lmin < 0.0) alpha = std::min(alpha, -1.0 / lmin);
        }
        for (int k = 0; k < w.lp; ++k) {
            const int idx = w.lp_offset + k;
            if (dv(idx) < 0.0) alpha = std::min(alpha, -v(idx) / dv(idx));
        }
        return alpha;
    }

    IpmOptions opts_;
};

} // namespace steercert
