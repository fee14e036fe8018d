#include "qmiset/matrix.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace qmiset {

void require_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) {
        throw std::invalid_argument(std::string(what) + ": non-finite entries");
    }
}

Matrix symmetrize(const Matrix& s) {
    if (s.rows() != s.cols()) {
        throw std::invalid_argument("symmetrize: matrix must be square");
    }
    return 0.5 * (s + s.transpose());
}

bool is_symmetric(const Matrix& s, double tol) {
    if (s.rows() != s.cols()) return false;
    if (s.size() == 0) return true;
    const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
    return (s - s.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

double spectral_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

double spectral_radius(const Matrix& a) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument("spectral_radius: matrix must be square");
    }
    if (a.size() == 0) return 0.0;
    Eigen::EigenSolver<Matrix> es(a, /*computeEigenvectors=*/false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

double min_eigenvalue(const Matrix& s) {
    if (s.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(s), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double max_eigenvalue(const Matrix& s) {
    if (s.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(s), Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

PsdResult is_psd(const Matrix& s, double tol) {
    require_finite(s, "is_psd");
    if (s.rows() != s.cols()) {
        throw std::invalid_argument("is_psd: matrix must be square");
    }
    if (s.size() == 0) return {true, 0.0};
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(s), Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().cwiseAbs().maxCoeff();
    const double thresh = tol * std::max(1.0, hi);
    return {lo >= -thresh, lo};
}

Eigen::Index numerical_rank(const Matrix& a, double rank_tol) {
    if (a.size() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(a);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    const double cutoff = rank_tol * sv(0);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) ++r;
    }
    return r;
}

Matrix kernel_basis(const Matrix& a, double rank_tol) {
    require_finite(a, "kernel_basis");
    if (rank_tol <= 0.0) {
        throw std::invalid_argument("kernel_basis: rank_tol must be positive");
    }
    const Eigen::Index rows = a.rows();
    const Eigen::Index cols = a.cols();
    if (rows <= cols) {
        // Basis of ker(A) as rows, A K^T = 0.
        Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        const double cutoff = (sv.size() > 0 && sv(0) > 0.0) ? rank_tol * sv(0) : 0.0;
        Eigen::Index r = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i) {
            if (sv(i) > cutoff) ++r;
        }
        const Eigen::Index nullity = cols - r;
        return svd.matrixV().rightCols(nullity).transpose();
    }
    // Tall: basis of ker(A^T) as columns, K^T A = 0.
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU);
    const auto& sv = svd.singularValues();
    const double cutoff = (sv.size() > 0 && sv(0) > 0.0) ? rank_tol * sv(0) : 0.0;
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) ++r;
    }
    return svd.matrixU().rightCols(rows - r);
}

Matrix schur_reduce(const Matrix& s, Eigen::Index split, SchurBlock which) {
    require_finite(s, "schur_reduce");
    if (s.rows() != s.cols()) {
        throw std::invalid_argument("schur_reduce: matrix must be square");
    }
    if (!is_symmetric(s, 1e-10)) {
        throw std::invalid_argument("schur_reduce: matrix must be symmetric");
    }
    const Eigen::Index d = s.rows();
    if (split <= 0 || split >= d) {
        throw std::invalid_argument("schur_reduce: split must lie strictly inside the matrix");
    }

    Matrix kept, off, elim;
    if (which == SchurBlock::Trailing) {
        kept = s.topLeftCorner(split, split);
        off = s.topRightCorner(split, d - split);
        elim = symmetrize(s.bottomRightCorner(d - split, d - split));
    } else {
        kept = s.bottomRightCorner(d - split, d - split);
        off = s.bottomLeftCorner(d - split, split);
        elim = symmetrize(s.topLeftCorner(split, split));
    }

    Eigen::SelfAdjointEigenSolver<Matrix> es(elim, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().cwiseAbs().maxCoeff();
    if (lo <= 1e-12 * std::max(1.0, hi)) {
        throw SingularBlockError("schur_reduce: designated block is not positive definite", lo);
    }

    Eigen::LLT<Matrix> llt(elim);
    return symmetrize(kept - off * llt.solve(off.transpose()));
}

RightInversePair right_inverse_pair(const Matrix& x, const Matrix& r, double rank_tol) {
    require_finite(x, "right_inverse_pair: X");
    require_finite(r, "right_inverse_pair: R");
    const Eigen::Index n = x.rows();
    const Eigen::Index N = x.cols();
    if (n > N) {
        throw std::invalid_argument("right_inverse_pair: X must have at least as many columns as rows");
    }
    if (r.rows() != N || r.cols() != N) {
        throw std::invalid_argument("right_inverse_pair: R must be N x N");
    }
    const Matrix r_sym = symmetrize(r);
    {
        Eigen::SelfAdjointEigenSolver<Matrix> es(r_sym, Eigen::EigenvaluesOnly);
        const double lo = es.eigenvalues().minCoeff();
        const double hi = es.eigenvalues().cwiseAbs().maxCoeff();
        if (lo <= 1e-12 * std::max(1.0, hi)) {
            throw std::invalid_argument("right_inverse_pair: R is not positive definite");
        }
    }
    if (numerical_rank(x, rank_tol) != n) {
        throw std::invalid_argument("right_inverse_pair: X is rank deficient");
    }

    Eigen::LLT<Matrix> r_llt(r_sym);
    const Matrix rinv_xt = r_llt.solve(x.transpose());          // R^-1 X^T
    const Matrix gram = symmetrize(x * rinv_xt);                // X R^-1 X^T
    Eigen::LLT<Matrix> gram_llt(gram);
    RightInversePair out;
    out.G = gram_llt.solve(rinv_xt.transpose()).transpose();    // R^-1 X^T (X R^-1 X^T)^-1

    const Matrix xperp = kernel_basis(x, rank_tol);             // (N-n) x N, orthonormal rows
    out.X_tilde = xperp * r_sym;
    if (xperp.rows() == 0) {
        out.G_tilde = Matrix::Zero(N, 0);
        return out;
    }
    const Matrix w = symmetrize(xperp * r_sym * xperp.transpose());
    Eigen::LLT<Matrix> w_llt(w);
    out.G_tilde = w_llt.solve(xperp).transpose();               // Xperp^T (Xperp R Xperp^T)^-1
    return out;
}

BasisTriple basis_from_complement(const Matrix& x, const Matrix& x_tilde) {
    require_finite(x, "basis_from_complement: X");
    require_finite(x_tilde, "basis_from_complement: X_tilde");
    const Eigen::Index N = x.cols();
    if (x_tilde.cols() != N || x.rows() + x_tilde.rows() != N) {
        throw std::invalid_argument("basis_from_complement: [X; X_tilde] must be square");
    }
    Matrix stacked(N, N);
    stacked.topRows(x.rows()) = x;
    stacked.bottomRows(x_tilde.rows()) = x_tilde;
    Eigen::FullPivLU<Matrix> lu(stacked);
    if (!lu.isInvertible()) {
        throw std::invalid_argument("basis_from_complement: [X; X_tilde] is singular");
    }
    const Matrix inv = lu.inverse();
    BasisTriple out;
    out.X_tilde = x_tilde;
    out.G = inv.leftCols(x.rows());
    out.G_tilde = inv.rightCols(x_tilde.rows());
    return out;
}

double basis_identity_residual(const Matrix& x, const BasisTriple& basis) {
    const Eigen::Index N = x.cols();
    Matrix stacked(N, N);
    stacked.topRows(x.rows()) = x;
    stacked.bottomRows(basis.X_tilde.rows()) = basis.X_tilde;
    Matrix right(N, N);
    right.leftCols(basis.G.cols()) = basis.G;
    right.rightCols(basis.G_tilde.cols()) = basis.G_tilde;
    return (stacked * right - Matrix::Identity(N, N)).cwiseAbs().maxCoeff();
}

}  // namespace qmiset
