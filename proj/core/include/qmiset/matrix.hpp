#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

// Dense linear-algebra utilities shared by the whole library: kernel bases,
// definiteness tests, Schur reductions and the weighted right-inverse pair
// used by the set parameterizations. All functions are pure and operate on
// immutable value inputs; calling them concurrently is safe.

namespace qmiset {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Thrown when a Schur reduction is requested on a block that is not
// (numerically) positive definite.
class SingularBlockError : public std::runtime_error {
public:
    SingularBlockError(const std::string& msg, double lambda_min)
        : std::runtime_error(msg), lambda_min_(lambda_min) {}
    double lambda_min() const { return lambda_min_; }

private:
    double lambda_min_;
};

// Throws std::invalid_argument if any entry is NaN or infinite.
void require_finite(const Matrix& m, const char* what);

// (A + A^T)/2
Matrix symmetrize(const Matrix& s);

bool is_symmetric(const Matrix& s, double tol = 1e-12);

// Largest singular value; 0 for empty matrices.
double spectral_norm(const Matrix& m);

// Largest absolute eigenvalue modulus of a square matrix.
double spectral_radius(const Matrix& a);

// Smallest eigenvalue of a symmetric matrix (the input is symmetrized).
double min_eigenvalue(const Matrix& s);
double max_eigenvalue(const Matrix& s);

struct PsdResult {
    bool psd;
    double margin;  // lambda_min of the (symmetrized) input
};

// True iff lambda_min(S) >= -tol * max(1, ||S||_2). The margin is returned
// so callers can report how close to the boundary the matrix sits.
PsdResult is_psd(const Matrix& s, double tol = 1e-9);

// Orthonormal basis of the kernel, following the wide/tall convention:
//  - rows(A) <= cols(A): returns K with orthonormal rows, A K^T = 0,
//    rows(K) = nullity of A;
//  - rows(A) >  cols(A): returns K with orthonormal columns spanning
//    ker(A^T), K^T A = 0, cols(K) = dim ker(A^T).
// Rank is decided by singular values above rank_tol * sigma_max.
Matrix kernel_basis(const Matrix& a, double rank_tol = 1e-12);

// Numerical rank at the same threshold convention as kernel_basis.
Eigen::Index numerical_rank(const Matrix& a, double rank_tol = 1e-12);

enum class SchurBlock { Leading, Trailing };

// For S = [S11 S12; S12^T S22] split at `split` rows/cols, returns the Schur
// complement with respect to the designated block (Trailing eliminates S22,
// Leading eliminates S11). The eliminated block must be positive definite,
// otherwise SingularBlockError is thrown. S >= 0 with S22 > 0 iff the
// reduction is >= 0; tests rely on this equivalence.
Matrix schur_reduce(const Matrix& s, Eigen::Index split,
                    SchurBlock which = SchurBlock::Trailing);

// The triple (G, G_tilde, X_tilde) built from a full row rank X (n x N,
// n <= N) and R > 0:
//   G       = R^-1 X^T (X R^-1 X^T)^-1
//   X_tilde = Xperp R
//   G_tilde = Xperp^T (Xperp R Xperp^T)^-1
// so that [X; X_tilde] [G G_tilde] = I_N and G^T R G_tilde = 0.
struct RightInversePair {
    Matrix G;
    Matrix G_tilde;
    Matrix X_tilde;
};

RightInversePair right_inverse_pair(const Matrix& x, const Matrix& r,
                                    double rank_tol = 1e-12);

// A general basis triple for the annihilator decomposition: any X_tilde with
// [X; X_tilde] square invertible induces (G, G_tilde) by inversion. Used to
// exercise the invariance of the consistent set under the basis choice.
struct BasisTriple {
    Matrix X_tilde;
    Matrix G;
    Matrix G_tilde;
};

BasisTriple basis_from_complement(const Matrix& x, const Matrix& x_tilde);

// Max |entry| of the residual [X; X_tilde][G G_tilde] - I.
double basis_identity_residual(const Matrix& x, const BasisTriple& basis);

}  // namespace qmiset
