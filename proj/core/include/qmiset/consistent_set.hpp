#pragma once

#include <optional>
#include <vector>

#include "qmiset/dataset.hpp"

namespace qmiset {

// Matrix-ellipsoidal parameter sets
//
//   { Theta | (Theta - theta0)^T Pi11 (Theta - theta0)
//             + (Theta - theta0)^T Pi12 + Pi12^T (Theta - theta0)
//             + Pi22  >= 0 }
//
// Two constructions are provided:
//  - the consistent set: the exact set of parameter matrices that can
//    reproduce the data together with an admissible noise realization,
//    reduced to a single QMI through the annihilator basis (the default
//    basis is the weighted pair with G^T R G_tilde = 0, which makes
//    Pi12 = 0 and Pi22 = (X R^-1 X^T)^-1);
//  - the superset: the overapproximation obtained by projecting with a
//    right inverse G of X, dropping the consistency constraint
//    (Pi11 = -Q, Pi12 = 0, Pi22 = G^T R G, center (Y - W0) G).
//
// The consistent construction carries M = G_tilde^T R G_tilde -
// theta_tilde0^T Q theta_tilde0 as a diagnostic: M close to zero means the
// data pins the parameters down (the set collapses onto its center), while
// theta_tilde0 = 0 means consistency adds nothing over the superset.

class SlaterViolationError : public std::runtime_error {
public:
    SlaterViolationError(const std::string& msg, double lambda_min_m)
        : std::runtime_error(msg), lambda_min_m_(lambda_min_m) {}
    double lambda_min_m() const { return lambda_min_m_; }

private:
    double lambda_min_m_;
};

enum class SetKind { Consistent, Superset };

struct QmiParamSet {
    Matrix theta0;
    Matrix Pi11;
    Matrix Pi12;
    Matrix Pi22;

    struct Diagnostics {
        Matrix M;             // empty for supersets
        Matrix theta_tilde0;  // empty for supersets
        SetKind kind = SetKind::Consistent;
    } diag;

    Eigen::Index param_rows() const { return theta0.rows(); }
    Eigen::Index param_cols() const { return theta0.cols(); }

    // Default membership tolerance: boundary members are the interesting
    // regime, so the slack scales with the constant block.
    double default_tolerance() const;

    Json to_json() const;
    static QmiParamSet from_json(const Json& j);
};

struct CenterSplit {
    Matrix theta0;
    Matrix theta_tilde0;
};

// Splits Y - W0 = [theta0 theta_tilde0] [X; X_tilde] using the right-inverse
// pair; the basis identity is verified first.
CenterSplit split_center(const RegressionData& data, const NoiseModel& model,
                         const BasisTriple& basis);

struct ConsistentSetOptions {
    double rank_tol = 1e-12;
    // Optional R + eps*I regularization applied before the construction
    // (use the epsilon suggested by check_slater).
    std::optional<double> regularize_epsilon;
    // Optional explicit basis triple; the default is the weighted pair of
    // right_inverse_pair, which block-diagonalizes the set.
    std::optional<BasisTriple> basis;
};

QmiParamSet build_consistent_qmi(const RegressionData& data, const NoiseModel& model,
                                 const ConsistentSetOptions& opts = {});

MembershipResult qmi_membership(const QmiParamSet& set, const Matrix& theta, double tol = -1.0);

// Brute-force oracle: Theta is consistent iff the unique residual Y - Theta X
// is admissible noise.
MembershipResult direct_membership(const RegressionData& data, const NoiseModel& model,
                                   const Matrix& theta, double tol = 0.0);

QmiParamSet build_superset_qmi(const RegressionData& data, const NoiseModel& model,
                               const Matrix& g);

// G_hat = R^-1 X^T (X R^-1 X^T)^-1, the right inverse minimizing G^T R G in
// the semidefinite order over all right inverses of X.
Matrix optimal_right_inverse(const Matrix& x, const Matrix& r);

// Executable witness of the projected-noise set identity: given Delta
// satisfying the reduced QMI with G^T R G, reconstructs an admissible W_hat
// with W_hat G = Delta and verifies both properties numerically.
struct Lemma1Witness {
    bool ok = false;
    Matrix w_hat;
    double reconstruction_error = 0.0;  // max |W_hat G - Delta|
    double membership_margin = 0.0;
};

Lemma1Witness lemma1_oracle_check(const NoiseModel& model, const Matrix& g, const Matrix& delta,
                                  double tol = 1e-9);

// True iff theta_tilde0 vanishes, in which case the consistent set equals the
// superset built with the optimal right inverse.
bool check_equality_condition(const QmiParamSet& set, double tol);

struct CollapseReport {
    bool collapsing = false;
    double lambda_max_M = 0.0;
    Matrix limit_point;  // (Y - W0) G for the default basis == set center
};

CollapseReport check_collapse(const QmiParamSet& set, double eps);

// Diameter in spectral norm. Requires Pi11 < 0 (bounded set); after
// completing the square the set is { c + A^-1/2 E S^1/2 : ||E||_2 <= 1 } with
// A = -Pi11 and S = Pi22 + Pi12^T A^-1 Pi12, so the diameter is
// 2 sqrt(lambda_max(S) / lambda_min(A)).
double set_diameter(const QmiParamSet& set);

// Members of the set, alternating boundary and interior points: random unit
// directions scaled to the boundary along theta0 + t D by bisection on the
// QMI. Every returned matrix passes qmi_membership at default tolerance.
std::vector<Matrix> sample_from_set(const QmiParamSet& set, int count, uint64_t seed);

const char* to_string(SetKind k);

}  // namespace qmiset
