#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>

#include "steercert/errors.hpp"

namespace steercert {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

/// Default tolerance for the Hermiticity invariant of constructed data.
inline constexpr double kHermTol = 1e-10;

inline double max_abs(const CMat& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// Complex square matrix with Hermiticity as a checked invariant.  The
/// universal carrier for states, effects and functional operators.
class HermitianMatrix {
  public:
    HermitianMatrix() = default;

    explicit HermitianMatrix(CMat m, double tol = kHermTol) : m_(std::move(m)) {
        if (m_.rows() != m_.cols())
            throw DimensionError("HermitianMatrix: matrix is not square");
        const double dev = max_abs(m_ - m_.adjoint());
        if (dev > tol)
            throw InvalidInput("HermitianMatrix: Hermiticity violated by " +
                               std::to_string(dev));
    }

    explicit HermitianMatrix(const RMat& m, double tol = kHermTol)
        : HermitianMatrix(CMat(m.cast<Complex>()), tol) {}

    static HermitianMatrix zero(int dim) { return HermitianMatrix(CMat(CMat::Zero(dim, dim))); }
    static HermitianMatrix identity(int dim) {
        return HermitianMatrix(CMat(CMat::Identity(dim, dim)));
    }

    int dim() const { return static_cast<int>(m_.rows()); }
    const CMat& mat() const { return m_; }

    double trace() const {
        // trace of a Hermitian matrix is real; the imaginary residue is noise
        return m_.trace().real();
    }

    bool is_real(double tol = kHermTol) const { return max_abs_imag() <= tol; }
    double max_abs_imag() const { return m_.size() == 0 ? 0.0 : m_.imag().cwiseAbs().maxCoeff(); }

    RMat real_part() const { return m_.real(); }

    /// Smallest eigenvalue (self-adjoint solve; exact Hermitization first
    /// so float noise in the input cannot leak into complex eigenvalues).
    double min_eigenvalue() const {
        if (m_.rows() == 0) return 0.0;
        Eigen::SelfAdjointEigenSolver<CMat> es(((m_ + m_.adjoint()) / 2.0).eval(),
                                               Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }

    bool is_psd(double tol) const { return min_eigenvalue() >= -tol; }

    double frobenius_norm() const { return m_.norm(); }

    HermitianMatrix operator+(const HermitianMatrix& o) const { return wrap(m_ + o.m_); }
    HermitianMatrix operator-(const HermitianMatrix& o) const { return wrap(m_ - o.m_); }
    HermitianMatrix operator*(double s) const { return wrap(m_ * s); }
    HermitianMatrix operator/(double s) const { return wrap(m_ / s); }
    HermitianMatrix& operator+=(const HermitianMatrix& o) {
        require_same_dim(o);
        m_ += o.m_;
        return *this;
    }

    friend HermitianMatrix operator*(double s, const HermitianMatrix& m) { return m * s; }

  private:
    // trusted fast path for arithmetic on already-validated operands
    HermitianMatrix wrap(CMat m) const {
        HermitianMatrix r;
        r.m_ = std::move(m);
        return r;
    }
    void require_same_dim(const HermitianMatrix& o) const {
        if (o.dim() != dim()) throw DimensionError("HermitianMatrix: dimension mismatch");
    }

    CMat m_;
};

/// tr(A B) for Hermitian A, B; the result is real up to float noise, which
/// the caller may inspect via trace_product_imag.
inline double trace_product(const HermitianMatrix& a, const HermitianMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionError("trace_product: dimension mismatch");
    return (a.mat() * b.mat()).trace().real();
}

inline double trace_product_imag(const HermitianMatrix& a, const HermitianMatrix& b) {
    return (a.mat() * b.mat()).trace().imag();
}

/// Hermitize (M + M^dagger)/2: used by operations whose algebra guarantees a
/// Hermitian result so accumulated float noise is removed, not hidden.
inline HermitianMatrix hermitize(const CMat& m) {
    return HermitianMatrix(CMat(((m + m.adjoint()) / 2.0)));
}

} // namespace steercert
