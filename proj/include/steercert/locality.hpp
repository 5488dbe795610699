#pragma once

#include <cstdint>
#include <vector>

#include "steercert/behaviour.hpp"
#include "steercert/ipm.hpp"

namespace steercert {

/// Deterministic local strategy: fixed response functions for all parties.
struct DeterministicStrategy {
    std::vector<int> a;  // a(x)
    std::vector<int> b;  // b(y)
    std::vector<int> c;  // c(z)
};

struct StrategyDims {
    int nX, nY, nZ, nA, nB, nC;
};

/// Complete, duplicate-free enumeration in lexicographic order of
/// (a-responses, b-responses, c-responses); count nA^nX * nB^nY * nC^nZ.
inline std::vector<DeterministicStrategy> enumerate_strategies(
    const StrategyDims& d, std::uint64_t cap = 1000000) {
    auto powi = [](std::uint64_t base, int e) {
        std::uint64_t r = 1;
        for (int i = 0; i < e; ++i) r *= base;
        return r;
    };
    const std::uint64_t total =
        powi(d.nA, d.nX) * powi(d.nB, d.nY) * powi(d.nC, d.nZ);
    if (total > cap)
        throw InvalidInput("enumerate_strategies: strategy count " + std::to_string(total) +
                           " exceeds cap " + std::to_string(cap));
    auto responses = [](int settings, int outcomes) {
        std::vector<std::vector<int>> out;
        std::vector<int> cur(settings, 0);
        while (true) {
            out.push_back(cur);
            int k = settings - 1;
            while (k >= 0 && ++cur[k] == outcomes) cur[k--] = 0;
            if (k < 0) break;
        }
        return out;
    };
    const auto ra = responses(d.nX, d.nA);
    const auto rb = responses(d.nY, d.nB);
    const auto rc = responses(d.nZ, d.nC);
    std::vector<DeterministicStrategy> out;
    out.reserve(total);
    for (const auto& a : ra)
        for (const auto& b : rb)
            for (const auto& c : rc) out.push_back({a, b, c});
    return out;
}

inline Behaviour strategy_behaviour(const DeterministicStrategy& s, const StrategyDims& d) {
    Behaviour p;
    p.nX = d.nX; p.nY = d.nY; p.nZ = d.nZ;
    p.nA = d.nA; p.nB = d.nB; p.nC = d.nC;
    p.p.assign(static_cast<std::size_t>(d.nX) * d.nY * d.nZ * d.nA * d.nB * d.nC, 0.0);
    for (int x = 0; x < d.nX; ++x)
        for (int y = 0; y < d.nY; ++y)
            for (int z = 0; z < d.nZ; ++z)
                p.p[p.index(x, y, z, s.a[x], s.b[y], s.c[z])] = 1.0;
    return p;
}

/// Bell functional reported for an LP-infeasible behaviour, shifted so its
/// local bound is 0; its value on the tested behaviour is the negative
/// violation.
struct BellCertificate {
    std::vector<double> coefficients;  // same index order as Behaviour
    double local_bound = 0.0;          // min over deterministic strategies (= 0 after shift)
    double value = 0.0;                // on the tested behaviour
    double violation = 0.0;            // local_bound - value > 0
};

struct LocalityCertificate {
    bool local = false;
    double max_residual = 0.0;             // LP optimum: worst per-cell deviation
    std::vector<double> weights;           // q_lambda over enumerate_strategies order
    BellCertificate bell;                  // populated when not local
    Behaviour::Check behaviour_check;
};

/// Decide Bell locality by linear programming: minimize the worst per-cell
/// deviation t between the behaviour and a convex mixture of deterministic
/// strategies.  local iff t* <= epsilon.
inline LocalityCertificate is_local(const Behaviour& p, double epsilon = 1e-7,
                                    const std::vector<DeterministicStrategy>* strategies = nullptr,
                                    double solver_tol = 1e-10) {
    LocalityCertificate out;
    out.behaviour_check = p.validate(std::max(1e-10, epsilon), std::max(1e-9, epsilon));
    if (!out.behaviour_check.pass) {
        out.local = false;
        out.max_residual = std::max(out.behaviour_check.negativity,
                                    out.behaviour_check.normalization);
    }

    const StrategyDims dims{p.nX, p.nY, p.nZ, p.nA, p.nB, p.nC};
    std::vector<DeterministicStrategy> own;
    if (!strategies) {
        own = enumerate_strategies(dims);
        strategies = &own;
    }
    const int nl = static_cast<int>(strategies->size());
    const int cells = static_cast<int>(p.size());

    // variables: q (nl), t, u (cells), v (cells); all nonnegative
    //   sum_l q_l D_l + u - t = p      (upper residual slack)
    //   sum_l q_l D_l - v + t = p      (lower residual slack)
    //   sum_l q_l = 1
    ConicProgram prog;
    prog.nonneg = nl + 1 + 2 * cells;
    const int iT = nl;
    const int iU = nl + 1;
    const int iV = nl + 1 + cells;
    prog.description = "locality LP";

    std::vector<std::vector<std::pair<int, double>>> cell_terms(cells);
    for (int l = 0; l < nl; ++l) {
        const DeterministicStrategy& s = (*strategies)[l];
        for (int x = 0; x < p.nX; ++x)
            for (int y = 0; y < p.nY; ++y)
                for (int z = 0; z < p.nZ; ++z)
                    cell_terms[p.index(x, y, z, s.a[x], s.b[y], s.c[z])].push_back({l, 1.0});
    }
    for (int cell = 0; cell < cells; ++cell) {
        LinearOperator up, lo;
        for (auto [l, w] : cell_terms[cell]) {
            up.entries.push_back({0, l, l, w});
            lo.entries.push_back({0, l, l, w});
        }
        up.entries.push_back({0, iU + cell, iU + cell, 1.0});
        up.entries.push_back({0, iT, iT, -1.0});
        lo.entries.push_back({0, iV + cell, iV + cell, -1.0});
        lo.entries.push_back({0, iT, iT, 1.0});
        prog.add_constraint(std::move(up), p.p[cell]);
        prog.add_constraint(std::move(lo), p.p[cell]);
    }
    LinearOperator norm;
    for (int l = 0; l < nl; ++l) norm.entries.push_back({0, l, l, 1.0});
    prog.add_constraint(std::move(norm), 1.0);
    prog.objective.entries.push_back({0, iT, iT, 1.0});

    IpmOptions io;
    io.tolerance = solver_tol;
    const ConicSolution sol = IpmSolver(io).solve(prog);

    out.max_residual = std::max(out.max_residual, sol.primal_objective);
    out.local = out.behaviour_check.pass && sol.primal_objective <= epsilon;

    out.weights.assign(nl, 0.0);
    for (int l = 0; l < nl; ++l) out.weights[l] = sol.nonneg(l);
    if (out.local) {
        // clean tiny interior noise: drop negligible weights, renormalize
        double total = 0.0;
        for (double& w : out.weights) {
            if (w < 1e-9) w = 0.0;
            total += w;
        }
        if (total > 0.0)
            for (double& w : out.weights) w /= total;
    } else {
        // dual multipliers of the residual rows give the Bell functional:
        // w_cell = y_up + y_lo restricted to the behaviour terms
        BellCertificate bell;
        bell.coefficients.assign(cells, 0.0);
        for (int cell = 0; cell < cells; ++cell)
            bell.coefficients[cell] = sol.y(2 * cell) + sol.y(2 * cell + 1);
        double bmax = -1e300;
        for (const auto& s : *strategies) {
            double v = 0.0;
            for (int x = 0; x < p.nX; ++x)
                for (int y = 0; y < p.nY; ++y)
                    for (int z = 0; z < p.nZ; ++z)
                        v += bell.coefficients[p.index(x, y, z, s.a[x], s.b[y], s.c[z])];
            bmax = std::max(bmax, v);
        }
        // shift so the local bound is exactly zero and flip the sign so the
        // tested behaviour sits below it (steering-functional convention)
        const double shift = bmax / p.setting_triples();
        double value = 0.0;
        for (int cell = 0; cell < cells; ++cell) {
            bell.coefficients[cell] = shift - bell.coefficients[cell];
            value += bell.coefficients[cell] * p.p[cell];
        }
        bell.local_bound = 0.0;
        bell.value = value;
        bell.violation = -value;
        out.bell = std::move(bell);
    }
    return out;
}

/// Decompose a noisy x-z projector Pi_{a|theta}(mu) as a convex mixture of
/// the octagon effects.  Feasible exactly when the shrunk Bloch vector lies
/// inside the octagon, whose inradius is cos(pi/8).
struct CoveringResult {
    bool feasible = false;
    double residual = 0.0;                  // worst Bloch-component deviation
    std::vector<double> coefficients;       // c_{a'x}, index a'*4 + x
};

inline CoveringResult cover_noisy_measurement(double theta, double mu,
                                              double tol = 1e-10) {
    if (mu < 0.0 || mu > 1.0)
        throw InvalidInput("cover_noisy_measurement: mu must lie in [0,1]");
    // Bloch vectors: target mu*(cos theta, sin theta); vertices at x*pi/4
    // and their antipodes.  Solved as a tiny LP minimizing the worst
    // component deviation.
    const int nv = 8;
    ConicProgram prog;
    prog.description = "octagon covering LP";
    const int iT = nv;
    const int iU = nv + 1;    // 2 upper slacks
    const int iV = nv + 3;    // 2 lower slacks
    prog.nonneg = nv + 1 + 4;
    auto vertex = [](int k) {
        const int x = k % 4;
        const double s = (k < 4) ? 1.0 : -1.0;
        const double th = x * M_PI / 4.0;
        return std::pair<double, double>{s * std::cos(th), s * std::sin(th)};
    };
    const double target[2] = {mu * std::cos(theta), mu * std::sin(theta)};
    for (int comp = 0; comp < 2; ++comp) {
        LinearOperator up, lo;
        for (int k = 0; k < nv; ++k) {
            const auto [vx, vz] = vertex(k);
            const double coef = comp == 0 ? vx : vz;
            if (coef != 0.0) {
                up.entries.push_back({0, k, k, coef});
                lo.entries.push_back({0, k, k, coef});
            }
        }
        up.entries.push_back({0, iU + comp, iU + comp, 1.0});
        up.entries.push_back({0, iT, iT, -1.0});
        lo.entries.push_back({0, iV + comp, iV + comp, -1.0});
        lo.entries.push_back({0, iT, iT, 1.0});
        prog.add_constraint(std::move(up), target[comp]);
        prog.add_constraint(std::move(lo), target[comp]);
    }
    LinearOperator norm;
    for (int k = 0; k < nv; ++k) norm.entries.push_back({0, k, k, 1.0});
    prog.add_constraint(std::move(norm), 1.0);
    prog.objective.entries.push_back({0, iT, iT, 1.0});

    IpmOptions io;
    io.tolerance = 1e-12;
    io.accept_tolerance = 1e-8;
    const ConicSolution sol = IpmSolver(io).solve(prog);

    CoveringResult r;
    // index convention c_{a'x}: vertices k < 4 are outcome 0 at angle x*pi/4,
    // k >= 4 outcome 1 (antipodal)
    r.coefficients.assign(nv, 0.0);
    for (int k = 0; k < nv; ++k) r.coefficients[k] = std::max(0.0, sol.nonneg(k));

    // refine on the support identified by the interior-point solve: least
    // squares with sum = 1 removes the solver's boundary stall
    std::vector<int> supp;
    for (int k = 0; k < nv; ++k)
        if (sol.nonneg(k) > 1e-7) supp.push_back(k);
    if (!supp.empty()) {
        const int ns = static_cast<int>(supp.size());
        RMat V(2, ns);
        for (int j = 0; j < ns; ++j) {
            const auto [vx, vz] = vertex(supp[j]);
            V(0, j) = vx;
            V(1, j) = vz;
        }
        RMat kkt = RMat::Zero(ns + 1, ns + 1);
        kkt.topLeftCorner(ns, ns) = 2.0 * V.transpose() * V;
        kkt.topRightCorner(ns, 1).setOnes();
        kkt.bottomLeftCorner(1, ns).setOnes();
        RVec rhs_v = RVec::Zero(ns + 1);
        rhs_v.head(ns) = 2.0 * V.transpose() * Eigen::Vector2d(target[0], target[1]);
        rhs_v(ns) = 1.0;
        const RVec c = Eigen::FullPivLU<RMat>(kkt).solve(rhs_v).head(ns);
        if (c.minCoeff() >= -1e-12) {
            std::vector<double> refined(nv, 0.0);
            for (int j = 0; j < ns; ++j) refined[supp[j]] = std::max(0.0, c(j));
            r.coefficients = std::move(refined);
        }
    }

    // exact residual of the reported coefficients
    double mixx = 0.0, mixz = 0.0, total = 0.0;
    for (int k = 0; k < nv; ++k) {
        const auto [vx, vz] = vertex(k);
        mixx += r.coefficients[k] * vx;
        mixz += r.coefficients[k] * vz;
        total += r.coefficients[k];
    }
    r.residual = std::max({std::abs(mixx - target[0]), std::abs(mixz - target[1]),
                           std::abs(total - 1.0)});
    r.feasible = r.residual <= tol;
    return r;
}

/// Table of the reconstruction identity: the mixture of octagon effects with
/// the returned coefficients reproduces Pi_{a|theta}(mu) entrywise.
inline double covering_reconstruction_error(double theta, double mu,
                                            const std::vector<double>& coeff) {
    CMat target = (mu * xz_projector(0, theta).mat() +
                   (1.0 - mu) * CMat::Identity(2, 2) / 2.0);
    CMat mix = CMat::Zero(2, 2);
    for (int k = 0; k < 8; ++k) {
        const int x = k % 4;
        const int a = k < 4 ? 0 : 1;
        mix += coeff[k] * xz_projector(a, x * M_PI / 4.0).mat();
    }
    return max_abs(target - mix);
}

struct ProjectiveLocalityVerdict {
    bool pass = false;
    std::string reason;
    LocalityCertificate lp;
    double mu = 0.0;
};

/// Certify that the noisy assemblage sigma(mu) is Bell-local for all
/// projective measurements: sigma must be local for the octagon set and mu
/// must not exceed the octagon inradius cos(pi/8).  Restricted to
/// real-valued qubit assemblages (x-z plane reduction).
inline ProjectiveLocalityVerdict locality_for_all_projective(const Assemblage& a, double mu,
                                                             double epsilon = 1e-7) {
    if (a.scenario().dimA != 2)
        throw InvalidInput("locality_for_all_projective: requires dimA = 2");
    if (!a.is_real(1e-10))
        throw InvalidInput("locality_for_all_projective: requires real-valued blocks");
    ProjectiveLocalityVerdict v;
    v.mu = mu;
    if (mu > std::cos(M_PI / 8.0) + 1e-12) {
        v.pass = false;
        v.reason = "covering bound exceeded: mu > cos(pi/8)";
        return v;
    }
    v.lp = is_local(behaviour(a, octagon_set()), epsilon);
    v.pass = v.lp.local;
    v.reason = v.pass ? "octagon behaviour is local"
                      : "octagon behaviour not local (residual " +
                            std::to_string(v.lp.max_residual) + ")";
    return v;
}

} // namespace steercert
