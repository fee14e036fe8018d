#pragma once

#include "qmiset/io.hpp"
#include "qmiset/matrix.hpp"

namespace qmiset {

// The admissible noise set
//   { W | [W - W0; I]^T diag(-Q, R) [W - W0; I] >= 0 },
// i.e. R - (W - W0)^T Q (W - W0) >= 0, with Q >= 0 (p x p) and R >= 0 (N x N).
struct NoiseModel {
    Matrix W0;
    Matrix Q;
    Matrix R;

    NoiseModel(Matrix w0, Matrix q, Matrix r, double psd_tol = 1e-9);

    Eigen::Index noise_rows() const { return W0.rows(); }
    Eigen::Index samples() const { return W0.cols(); }

    // Same model with R replaced by R + eps*I (Slater regularization).
    NoiseModel regularized(double eps) const;

    Json to_json() const;
    static NoiseModel from_json(const Json& j);
};

// Unit-weight model: W0 = 0, Q = I_p, R = bound^2 * I_N, so membership is
// exactly sigma_max(W) <= bound.
NoiseModel unit_noise_model(Eigen::Index rows, Eigen::Index samples, double bound = 1.0);

struct MembershipResult {
    bool inside;
    double margin;  // lambda_min of the evaluated QMI matrix
};

// Evaluates the defining QMI of the set. `tol` is an absolute slack on the
// smallest eigenvalue; boundary noise (margin == 0) is inside.
MembershipResult noise_membership(const Matrix& w, const NoiseModel& model, double tol = 0.0);

}  // namespace qmiset
