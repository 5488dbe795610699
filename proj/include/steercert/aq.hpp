#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "steercert/assemblage.hpp"
#include "steercert/functional.hpp"
#include "steercert/ipm.hpp"
#include "steercert/moment.hpp"

namespace steercert {

struct AqOptions {
    double solver_tolerance = 1e-9;
    /// Verdict threshold on the eigenvalue deficit t*; feasible moment
    /// matrices of quantum inputs land orders of magnitude below it.
    double membership_threshold = 1e-8;
    /// Use the complex (embedded) formulation even for real inputs.
    bool force_complex = false;
    /// Skip the certificate bound re-solve (used when aq_bound calls itself).
    bool extract_certificate = true;
};

/// First-row coefficient operators of a functional after eliminating the
/// last outcome of each party through the no-signaling sums: the objective
/// tr(sum F sigma) becomes
///   tr( G_rho rho + sum G_B sigma^B_{b|y} + sum G_C sigma^C_{c|z}
///       + sum G_BC sigma_{bc|yz} )
/// over the minimal first-row data (b < outB-1, c < outC-1).
struct FirstRowObjective {
    Scenario sc;
    HermitianMatrix rho;
    std::vector<HermitianMatrix> B;                 // (outB-1) x setB, index y*(outB-1)+b
    std::vector<HermitianMatrix> C;
    std::vector<HermitianMatrix> BC;                // index ((y*setC+z)*(outB-1)+b)*(outC-1)+c

    static FirstRowObjective reduce(const SteeringFunctional& f) {
        const Scenario& sc = f.scenario();
        const int KB = sc.outB - 1, KC = sc.outC - 1;
        const int d = sc.dimA;
        FirstRowObjective g;
        g.sc = sc;
        CMat rho = CMat::Zero(d, d);
        for (int y = 0; y < sc.setB; ++y)
            for (int z = 0; z < sc.setC; ++z) rho += f.at(KB, KC, y, z).mat();
        g.rho = hermitize(rho);
        for (int y = 0; y < sc.setB; ++y)
            for (int b = 0; b < KB; ++b) {
                CMat acc = CMat::Zero(d, d);
                for (int z = 0; z < sc.setC; ++z)
                    acc += f.at(b, KC, y, z).mat() - f.at(KB, KC, y, z).mat();
                g.B.push_back(hermitize(acc));
            }
        for (int z = 0; z < sc.setC; ++z)
            for (int c = 0; c < KC; ++c) {
                CMat acc = CMat::Zero(d, d);
                for (int y = 0; y < sc.setB; ++y)
                    acc += f.at(KB, c, y, z).mat() - f.at(KB, KC, y, z).mat();
                g.C.push_back(hermitize(acc));
            }
        for (int y = 0; y < sc.setB; ++y)
            for (int z = 0; z < sc.setC; ++z)
                for (int b = 0; b < KB; ++b)
                    for (int c = 0; c < KC; ++c)
                        g.BC.push_back(hermitize(f.at(b, c, y, z).mat() -
                                                 f.at(b, KC, y, z).mat() -
                                                 f.at(KB, c, y, z).mat() +
                                                 f.at(KB, KC, y, z).mat()));
        return g;
    }

    const HermitianMatrix& b_op(int b, int y) const {
        return B[static_cast<std::size_t>(y) * (sc.outB - 1) + b];
    }
    const HermitianMatrix& c_op(int c, int z) const {
        return C[static_cast<std::size_t>(z) * (sc.outC - 1) + c];
    }
    const HermitianMatrix& bc_op(int b, int y, int c, int z) const {
        return BC[((static_cast<std::size_t>(y) * sc.setC + z) * (sc.outB - 1) + b) *
                      (sc.outC - 1) +
                  c];
    }
};

/// Minimal first-row data of the moment matrix (general outcome counts).
struct FirstRowData {
    Scenario sc;
    HermitianMatrix rho;
    std::vector<HermitianMatrix> B;   // sigma^B_{b|y}, b < outB-1
    std::vector<HermitianMatrix> C;
    std::vector<HermitianMatrix> BC;  // sigma_{bc|yz}, b,c below the last outcome

    static FirstRowData from_assemblage(const Assemblage& a) {
        const Scenario& sc = a.scenario();
        FirstRowData d;
        d.sc = sc;
        d.rho = a.reduced_state();
        for (int y = 0; y < sc.setB; ++y)
            for (int b = 0; b + 1 < sc.outB; ++b) d.B.push_back(a.marginal_b(b, y));
        for (int z = 0; z < sc.setC; ++z)
            for (int c = 0; c + 1 < sc.outC; ++c) d.C.push_back(a.marginal_c(c, z));
        for (int y = 0; y < sc.setB; ++y)
            for (int z = 0; z < sc.setC; ++z)
                for (int b = 0; b + 1 < sc.outB; ++b)
                    for (int c = 0; c + 1 < sc.outC; ++c) d.BC.push_back(a.at(b, c, y, z));
        return d;
    }

    const HermitianMatrix& datum(const PinnedDatum& p) const {
        switch (p.kind) {
            case PinnedDatum::Kind::Rho: return rho;
            case PinnedDatum::Kind::SigmaB:
                return B[static_cast<std::size_t>(p.y) * (sc.outB - 1) + p.b];
            case PinnedDatum::Kind::SigmaC:
                return C[static_cast<std::size_t>(p.z) * (sc.outC - 1) + p.c];
            default:
                return BC[((static_cast<std::size_t>(p.y) * sc.setC + p.z) * (sc.outB - 1) +
                           p.b) *
                              (sc.outC - 1) +
                          p.c];
        }
    }

    bool is_real(double tol = kHermTol) const {
        auto ok = [tol](const HermitianMatrix& m) { return m.is_real(tol); };
        if (!ok(rho)) return false;
        for (const auto& m : B)
            if (!ok(m)) return false;
        for (const auto& m : C)
            if (!ok(m)) return false;
        for (const auto& m : BC)
            if (!ok(m)) return false;
        return true;
    }

    /// Rebuild the full assemblage through the no-signaling sum rules.
    Assemblage to_assemblage() const {
        const int KB = sc.outB - 1, KC = sc.outC - 1;
        Assemblage out = Assemblage::zero(sc);
        for (int y = 0; y < sc.setB; ++y)
            for (int z = 0; z < sc.setC; ++z) {
                CMat accBC = CMat::Zero(sc.dimA, sc.dimA);
                for (int b = 0; b < KB; ++b)
                    for (int c = 0; c < KC; ++c) {
                        const CMat& s = BC[((static_cast<std::size_t>(y) * sc.setC + z) * KB +
                                            b) * KC + c].mat();
                        out.at(b, c, y, z) = hermitize(s);
                        accBC += s;
                    }
                CMat accB = CMat::Zero(sc.dimA, sc.dimA);
                for (int b = 0; b < KB; ++b) {
                    CMat row = B[static_cast<std::size_t>(y) * KB + b].mat();
                    for (int c = 0; c < KC; ++c) row -= out.at(b, c, y, z).mat();
                    out.at(b, KC, y, z) = hermitize(row);
                    accB += B[static_cast<std::size_t>(y) * KB + b].mat();
                }
                CMat accC = CMat::Zero(sc.dimA, sc.dimA);
                for (int c = 0; c < KC; ++c) {
                    CMat col = C[static_cast<std::size_t>(z) * KC + c].mat();
                    for (int b = 0; b < KB; ++b) col -= out.at(b, c, y, z).mat();
                    out.at(KB, c, y, z) = hermitize(col);
                    accC += C[static_cast<std::size_t>(z) * KC + c].mat();
                }
                out.at(KB, KC, y, z) = hermitize(rho.mat() - accB - accC + accBC);
            }
        return out;
    }
};

/// Builds the moment-matrix conic program shared by the membership and
/// bound SDPs.  In complex mode the Hermitian matrix Gamma = X + iY is
/// embedded as the real symmetric [[X, -Y], [Y, X]] of twice the dimension.
class MomentProgramBuilder {
  public:
    MomentProgramBuilder(const Scenario& sc, bool complex_mode, bool with_shift)
        : sc_(sc), complex_(complex_mode), shift_(with_shift) {
        words_ = word_set(sc_);
        W_ = static_cast<int>(words_.size());
        d_ = sc_.dimA;
        N_ = W_ * d_;
        prog_.psd_dims = {complex_ ? 2 * N_ : N_};
        prog_.nonneg = shift_ ? 1 : 0;
        classify_pairs();
        emit_structure_rows();
    }

    const ConicProgram& program() const { return prog_; }
    ConicProgram& program() { return prog_; }
    int words() const { return W_; }
    int gamma_dim() const { return N_; }

    /// Pin the first row to the given data (membership mode).  Returns the
    /// row index range so duals can be mapped back to datum entries.
    void pin_first_row(const FirstRowData& data) {
        for (const auto& [key, rep] : registry_) {
            auto it = pins_.find(key);
            if (it == pins_.end()) continue;
            const PinnedDatum& pd = it->second;
            const CMat& v = data.datum(pd).mat();
            const bool diag_block = (rep.i == rep.j);
            for (int p = 0; p < d_; ++p)
                for (int q = 0; q < d_; ++q) {
                    if (diag_block && q < p) continue;  // svec covers p <= q once
                    Ref r{rep.i * d_ + p, rep.j * d_ + q, 1.0, false};
                    const Complex val = v(p, q);
                    const int re_row = emit_row({r}, val.real(), true);
                    pin_rows_.push_back({re_row, key, p, q, false});
                    if (complex_ && r.P != r.Q) {
                        const int im_row = emit_row({r}, val.imag(), false);
                        if (im_row >= 0) pin_rows_.push_back({im_row, key, p, q, true});
                    }
                }
        }
    }

    /// Add tr(rho) = 1 on the first diagonal block (bound mode).
    void add_normalization() {
        LinearOperator op;
        for (int p = 0; p < d_; ++p) op.entries.push_back({0, p, p, 1.0});
        prog_.add_constraint(std::move(op), 1.0);
    }

    /// Objective sum over first-row data of tr(G_datum * datum).
    void set_objective(const FirstRowObjective& g) {
        LinearOperator C;
        for (const auto& [key, rep] : registry_) {
            auto it = pins_.find(key);
            if (it == pins_.end()) continue;
            const PinnedDatum& pd = it->second;
            const CMat* G = nullptr;
            switch (pd.kind) {
                case PinnedDatum::Kind::Rho: G = &g.rho.mat(); break;
                case PinnedDatum::Kind::SigmaB: G = &g.b_op(pd.b, pd.y).mat(); break;
                case PinnedDatum::Kind::SigmaC: G = &g.c_op(pd.c, pd.z).mat(); break;
                case PinnedDatum::Kind::SigmaBC: G = &g.bc_op(pd.b, pd.y, pd.c, pd.z).mat(); break;
            }
            add_datum_objective(C, rep, *G);
        }
        prog_.objective = C;
    }

    /// Read the first-row data out of a solved PSD block.
    FirstRowData recover_first_row(const RMat& X, const Scenario& sc) const {
        FirstRowData out;
        out.sc = sc;
        auto read = [&](const BlockRef& rep) {
            CMat v(d_, d_);
            for (int p = 0; p < d_; ++p)
                for (int q = 0; q < d_; ++q) v(p, q) = read_entry(X, rep.i * d_ + p, rep.j * d_ + q);
            return hermitize(v);
        };
        std::map<std::string, HermitianMatrix> by_key;
        for (const auto& [key, rep] : registry_)
            if (pins_.count(key)) by_key.emplace(key, read(rep));

        auto find = [&](const Word& w) -> HermitianMatrix {
            const EntryClass e = canonical_entry(Word{Word::Kind::Empty}, w);
            return by_key.at(e.key());
        };
        out.rho = find(Word{Word::Kind::Empty});
        for (int y = 0; y < sc.setB; ++y)
            for (int b = 0; b + 1 < sc.outB; ++b)
                out.B.push_back(find(Word{Word::Kind::B, b, y, -1, -1}));
        for (int z = 0; z < sc.setC; ++z)
            for (int c = 0; c + 1 < sc.outC; ++c)
                out.C.push_back(find(Word{Word::Kind::C, -1, -1, c, z}));
        for (int y = 0; y < sc.setB; ++y)
            for (int z = 0; z < sc.setC; ++z)
                for (int b = 0; b + 1 < sc.outB; ++b)
                    for (int c = 0; c + 1 < sc.outC; ++c)
                        out.BC.push_back(find(Word{Word::Kind::BC, b, y, c, z}));
        return out;
    }

    /// Full Gamma (complex N x N) from a solved block.
    CMat recover_gamma(const RMat& X) const {
        CMat G(N_, N_);
        for (int P = 0; P < N_; ++P)
            for (int Q = P; Q < N_; ++Q) {
                const Complex v = read_entry(X, P, Q);
                G(P, Q) = v;
                G(Q, P) = std::conj(v);
            }
        return G;
    }

    /// Assemble the separating functional from pin-row duals: the linear
    /// sensitivity of the eigenvalue deficit to each pinned datum entry.
    FirstRowObjective certificate_from_duals(const RVec& y) const {
        FirstRowObjective g;
        g.sc = sc_;
        const int KB = sc_.outB - 1, KC = sc_.outC - 1;
        std::map<std::string, CMat> acc;
        for (const auto& [key, pd] : pins_) acc.emplace(key, CMat::Zero(d_, d_));
        for (const auto& pr : pin_rows_) {
            const Complex unit = pr.imag ? Complex(0, 1) : Complex(1, 0);
            acc.at(pr.key)(pr.p, pr.q) += unit * y(pr.row);
        }
        auto grab = [&](const Word& w, bool diag_block) {
            const EntryClass e = canonical_entry(Word{Word::Kind::Empty}, w);
            CMat m = acc.at(e.key());
            if (diag_block) {
                // svec pins cover p <= q once; split off-diagonal weight
                CMat full = CMat::Zero(d_, d_);
                for (int p = 0; p < d_; ++p)
                    for (int q = p; q < d_; ++q) {
                        if (p == q)
                            full(p, q) = m(p, q);
                        else {
                            full(p, q) = m(p, q) / 2.0;
                            full(q, p) = std::conj(m(p, q)) / 2.0;
                        }
                    }
                return hermitize(full);
            }
            return hermitize(m);
        };
        g.rho = grab(Word{Word::Kind::Empty}, true);
        for (int y2 = 0; y2 < sc_.setB; ++y2)
            for (int b = 0; b < KB; ++b)
                g.B.push_back(grab(Word{Word::Kind::B, b, y2, -1, -1}, false));
        for (int z = 0; z < sc_.setC; ++z)
            for (int c = 0; c < KC; ++c)
                g.C.push_back(grab(Word{Word::Kind::C, -1, -1, c, z}, false));
        for (int y2 = 0; y2 < sc_.setB; ++y2)
            for (int z = 0; z < sc_.setC; ++z)
                for (int b = 0; b < KB; ++b)
                    for (int c = 0; c < KC; ++c)
                        g.BC.push_back(grab(Word{Word::Kind::BC, b, y2, c, z}, false));
        return g;
    }

  private:
    struct BlockRef {
        int i, j;
    };
    struct Ref {
        int P, Q;
        double coeff;
        bool conj;
    };
    struct PinRow {
        int row;
        std::string key;
        int p, q;
        bool imag;
    };

    void classify_pairs() {
        for (int i = 0; i < W_; ++i)
            for (int j = i; j < W_; ++j) {
                const EntryClass e = canonical_entry(words_[i], words_[j]);
                if (e.zero) {
                    emit_zero_block(i, j);
                    continue;
                }
                const std::string key = e.key();
                const std::string adj = e.adjoint().key();
                if (auto it = registry_.find(key); it != registry_.end()) {
                    emit_tie_block(i, j, it->second, false);
                } else if (auto it2 = registry_.find(adj); it2 != registry_.end()) {
                    emit_tie_block(i, j, it2->second, true);
                } else {
                    registry_.emplace(key, BlockRef{i, j});
                    if (e.pinned()) {
                        pins_.emplace(key, pinned_datum_of(e));
                        if (key == adj && i != j) emit_selfadjoint_block(i, j);
                    }
                }
            }
    }

    void emit_zero_block(int i, int j) {
        for (int p = 0; p < d_; ++p)
            for (int q = 0; q < d_; ++q) {
                if (i == j && q < p) continue;
                Ref r{i * d_ + p, j * d_ + q, 1.0, false};
                emit_row({r}, 0.0, true);
                if (complex_ && r.P != r.Q) emit_row({r}, 0.0, false);
            }
    }

    void emit_tie_block(int i, int j, const BlockRef& rep, bool adjoint) {
        for (int p = 0; p < d_; ++p)
            for (int q = 0; q < d_; ++q) {
                if (i == j && q < p) continue;
                Ref a{i * d_ + p, j * d_ + q, 1.0, false};
                Ref b = adjoint ? Ref{rep.i * d_ + q, rep.j * d_ + p, -1.0, true}
                                : Ref{rep.i * d_ + p, rep.j * d_ + q, -1.0, false};
                if (a.P == b.P && a.Q == b.Q && !b.conj) continue;
                if (a.P == b.P && a.Q == b.Q && b.conj) {
                    // X = conj(X): imaginary part vanishes
                    if (complex_ && a.P != a.Q) emit_row({a}, 0.0, false);
                    continue;
                }
                emit_row({a, b}, 0.0, true);
                if (complex_) emit_row({a, b}, 0.0, false);
            }
    }

    // Gamma_block = Gamma_block^dagger for a pinned representative that is
    // left free (bound mode): forces the datum Hermitian.
    void emit_selfadjoint_block(int i, int j) {
        for (int p = 0; p < d_; ++p)
            for (int q = 0; q < d_; ++q) {
                Ref a{i * d_ + p, j * d_ + q, 1.0, false};
                Ref b{i * d_ + q, j * d_ + p, -1.0, true};
                if (p == q) {
                    if (complex_) emit_row({a}, 0.0, false);  // diagonal entry real
                    continue;
                }
                if (p > q) continue;
                emit_row({a, b}, 0.0, true);
                if (complex_) emit_row({a, b}, 0.0, false);
            }
    }

    void emit_structure_rows() {
        if (!complex_) return;
        // top-left block equals bottom-right; top-right block antisymmetric
        for (int P = 0; P < N_; ++P)
            for (int Q = P; Q < N_; ++Q) {
                LinearOperator op;
                add_cell(op, P, Q, 1.0);
                add_cell(op, N_ + P, N_ + Q, -1.0);
                add_shift(op, P, Q, N_ + P, N_ + Q);
                prog_.add_constraint(std::move(op), 0.0);
            }
        for (int P = 0; P < N_; ++P) {
            LinearOperator op;
            add_cell(op, P, N_ + P, 1.0);
            prog_.add_constraint(std::move(op), 0.0);
        }
        for (int P = 0; P < N_; ++P)
            for (int Q = P + 1; Q < N_; ++Q) {
                LinearOperator op;
                add_cell(op, P, N_ + Q, 1.0);
                add_cell(op, Q, N_ + P, 1.0);
                prog_.add_constraint(std::move(op), 0.0);
            }
    }

    // emit one scalar row over the referenced entries; re selects the real
    // or imaginary component of the complex relation.  Returns the row index.
    int emit_row(const std::vector<Ref>& refs, double rhs, bool re) {
        LinearOperator op;
        bool nonempty = false;
        double tshift = 0.0;
        for (const Ref& r : refs) {
            int P = r.P, Q = r.Q;
            bool cj = r.conj;
            if (P > Q) {
                std::swap(P, Q);
                cj = !cj;
            }
            if (re) {
                add_cell(op, P, Q, r.coeff);
                if (P == Q) tshift -= r.coeff;  // Gamma = Gamma' - t I on the diagonal
                nonempty = true;
            } else {
                if (P == Q) continue;  // imaginary diagonal is identically zero
                // Im Gamma(P,Q) = -cell(P, N+Q); conjugation flips the sign
                add_cell(op, P, N_ + Q, cj ? r.coeff : -r.coeff);
                nonempty = true;
            }
        }
        if (!nonempty) return -1;
        if (shift_ && re && tshift != 0.0)
            op.entries.push_back({prog_.nonneg_block(), 0, 0, tshift});
        prog_.add_constraint(std::move(op), rhs);
        return static_cast<int>(prog_.constraints.size()) - 1;
    }

    void add_cell(LinearOperator& op, int P, int Q, double coeff) {
        if (P > Q) std::swap(P, Q);
        op.entries.push_back({0, P, Q, coeff});
    }

    // shift entries cancel between tl and br diagonals; kept explicit for clarity
    void add_shift(LinearOperator& op, int P1, int Q1, int P2, int Q2) {
        if (!shift_) return;
        double t = 0.0;
        if (P1 == Q1) t -= 1.0;
        if (P2 == Q2) t += 1.0;
        if (t != 0.0) op.entries.push_back({prog_.nonneg_block(), 0, 0, t});
    }

    void add_datum_objective(LinearOperator& C, const BlockRef& rep, const CMat& G) {
        const bool diag_block = (rep.i == rep.j);
        for (int p = 0; p < d_; ++p)
            for (int q = 0; q < d_; ++q) {
                // contribution G(p,q) * sigma(q,p); sigma(q,p) = Gamma entry below
                int P = rep.i * d_ + q, Q = rep.j * d_ + p;
                bool cj = false;
                if (P > Q) {
                    std::swap(P, Q);
                    cj = true;
                }
                const double re = G(p, q).real(), im = G(p, q).imag();
                if (re != 0.0) add_cell(C, P, Q, re);
                if (complex_ && P != Q && im != 0.0) {
                    // -Im G(p,q) * Im sigma(q,p); Im Gamma(P,Q) = -cell(P,N+Q)
                    const double s = cj ? -1.0 : 1.0;  // Im sigma(q,p) = s * Im Gamma(P,Q)
                    add_cell(C, P, N_ + Q, im * s);
                }
                (void)diag_block;
            }
    }

    Complex read_entry(const RMat& X, int P, int Q) const {
        bool cj = false;
        if (P > Q) {
            std::swap(P, Q);
            cj = true;
        }
        const double re = X(P, Q);
        double im = 0.0;
        if (complex_ && P != Q) im = -X(P, N_ + Q);
        Complex v(re, im);
        return cj ? std::conj(v) : v;
    }

    Scenario sc_;
    bool complex_;
    bool shift_;
    std::vector<Word> words_;
    int W_ = 0, d_ = 0, N_ = 0;
    ConicProgram prog_;
    std::map<std::string, BlockRef> registry_;
    std::map<std::string, PinnedDatum> pins_;
    std::vector<PinRow> pin_rows_;
};

/// Expand first-row coefficient operators into a full functional (particular
/// solution of the reduction relations; valid for any outcome counts).
inline SteeringFunctional expand_first_row(const FirstRowObjective& g) {
    const Scenario& sc = g.sc;
    const int KB = sc.outB - 1, KC = sc.outC - 1;
    const double mb = sc.setB, mc = sc.setC;
    SteeringFunctional out = SteeringFunctional::zero(sc);
    for (int y = 0; y < sc.setB; ++y)
        for (int z = 0; z < sc.setC; ++z) {
            const CMat fKK = g.rho.mat() / (mb * mc);
            out.at(KB, KC, y, z) = hermitize(fKK);
            for (int b = 0; b < KB; ++b)
                out.at(b, KC, y, z) = hermitize(g.b_op(b, y).mat() / mc + fKK);
            for (int c = 0; c < KC; ++c)
                out.at(KB, c, y, z) = hermitize(g.c_op(c, z).mat() / mb + fKK);
            for (int b = 0; b < KB; ++b)
                for (int c = 0; c < KC; ++c)
                    out.at(b, c, y, z) =
                        hermitize(g.bc_op(b, y, c, z).mat() + out.at(b, KC, y, z).mat() +
                                  out.at(KB, c, y, z).mat() - fKK);
        }
    return out;
}

struct AqBoundResult {
    double bound = 0.0;
    Assemblage optimizer;
    CMat gamma;
};

struct MembershipResult {
    bool in_aq = false;
    double eigenvalue_deficit = 0.0;   // optimal shift t*
    CMat gamma;                        // moment-matrix witness (IN verdict)
    SteeringFunctional certificate;    // separating functional (NOT_IN verdict)
    MinimalFunctional certificate_minimal;
    double certificate_value = 0.0;    // evaluate(certificate, input)
    double certificate_bound = 0.0;    // aq_bound(certificate)
    double separation = 0.0;           // bound - value, > 0 certifies post-quantumness
};

inline bool aq_use_complex(const FirstRowData& d, const AqOptions& o) {
    return o.force_complex || !d.is_real(1e-12);
}

/// Lower bound on the steering Tsirelson bound: minimize the functional over
/// the almost-quantum relaxation.  Also returns the optimizing assemblage
/// read off the first row of the moment matrix.
inline AqBoundResult aq_bound(const SteeringFunctional& f, const AqOptions& opts = {},
                              ConicProgram* dump = nullptr) {
    const Scenario& sc = f.scenario();
    bool cplx = opts.force_complex;
    for (const auto& m : f.operators())
        if (!m.is_real(1e-12)) cplx = true;

    MomentProgramBuilder mb(sc, cplx, /*with_shift=*/false);
    mb.add_normalization();
    mb.set_objective(FirstRowObjective::reduce(f));
    mb.program().description = "almost-quantum bound SDP";
    if (dump) *dump = mb.program();

    IpmOptions io;
    io.tolerance = opts.solver_tolerance;
    const ConicSolution sol = IpmSolver(io).solve(mb.program());

    AqBoundResult r;
    r.bound = sol.primal_objective;
    r.gamma = mb.recover_gamma(sol.psd[0]);
    r.optimizer = mb.recover_first_row(sol.psd[0], sc).to_assemblage();
    return r;
}

inline AqBoundResult aq_bound(const MinimalFunctional& f, const AqOptions& opts = {},
                              ConicProgram* dump = nullptr) {
    return aq_bound(expand_minimal(f), opts, dump);
}

/// Almost-quantum membership: does a PSD moment matrix with the required
/// structure exist whose first row is pinned to the assemblage?  Posed as
/// minimizing the uniform eigenvalue shift t with Gamma + t I PSD; t* <=
/// threshold certifies membership, and the dual of a violated instance
/// yields a separating steering functional.
inline MembershipResult membership_sdp(const Assemblage& a, const AqOptions& opts = {},
                                       ConicProgram* dump = nullptr) {
    const ValidationReport rep = validate_tripartite_ns(a, kPublishedTol);
    if (!rep.pass)
        throw InvalidInput("membership_sdp: input fails no-signaling validation (worst " +
                           std::to_string(rep.worst()) + ")");
    const FirstRowData data = FirstRowData::from_assemblage(a);
    const bool cplx = aq_use_complex(data, opts);

    MomentProgramBuilder mb(a.scenario(), cplx, /*with_shift=*/true);
    mb.pin_first_row(data);
    LinearOperator obj;
    obj.entries.push_back({mb.program().nonneg_block(), 0, 0, 1.0});
    mb.program().objective = obj;
    mb.program().description = "almost-quantum membership SDP";
    if (dump) *dump = mb.program();

    IpmOptions io;
    io.tolerance = opts.solver_tolerance;
    const ConicSolution sol = IpmSolver(io).solve(mb.program());

    MembershipResult r;
    r.eigenvalue_deficit = sol.primal_objective;
    r.in_aq = r.eigenvalue_deficit <= opts.membership_threshold;
    const double t = sol.nonneg(0);
    CMat gp = mb.recover_gamma(sol.psd[0]);
    r.gamma = gp - t * CMat::Identity(gp.rows(), gp.cols());

    if (!r.in_aq && opts.extract_certificate) {
        // dual sensitivity of t* to the pinned data = separating functional;
        // sign flipped so post-quantum inputs sit strictly below its bound
        FirstRowObjective g = mb.certificate_from_duals(sol.y);
        g.rho = g.rho * -1.0;
        for (auto& m : g.B) m = m * -1.0;
        for (auto& m : g.C) m = m * -1.0;
        for (auto& m : g.BC) m = m * -1.0;
        SteeringFunctional cert = expand_first_row(g);

        // canonical certificate scale: unit average operator norm
        const double n = cert.norm_sum();
        const double cells = static_cast<double>(cert.operators().size());
        if (n > 0.0) cert = cert.scaled(cells / n);

        r.certificate = cert;
        if (a.scenario().outB == 2 && a.scenario().outC == 2)
            r.certificate_minimal = extract_minimal(cert);
        r.certificate_value = evaluate_functional(cert, a);
        AqOptions sub = opts;
        sub.extract_certificate = false;
        r.certificate_bound = aq_bound(cert, sub).bound;
        r.separation = r.certificate_bound - r.certificate_value;
    }
    return r;
}

} // namespace steercert
