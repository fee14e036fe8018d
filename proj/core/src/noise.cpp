#include "qmiset/noise.hpp"

namespace qmiset {

NoiseModel::NoiseModel(Matrix w0, Matrix q, Matrix r, double psd_tol)
    : W0(std::move(w0)), Q(std::move(q)), R(std::move(r)) {
    require_finite(W0, "NoiseModel: W0");
    require_finite(Q, "NoiseModel: Q");
    require_finite(R, "NoiseModel: R");
    if (Q.rows() != Q.cols() || R.rows() != R.cols()) {
        throw std::invalid_argument("NoiseModel: Q and R must be square");
    }
    if (Q.rows() != W0.rows() || R.rows() != W0.cols()) {
        throw std::invalid_argument("NoiseModel: dimensions of W0, Q, R are inconsistent");
    }
    Q = symmetrize(Q);
    R = symmetrize(R);
    if (!is_psd(Q, psd_tol).psd) {
        throw std::invalid_argument("NoiseModel: Q is not positive semidefinite");
    }
    if (!is_psd(R, psd_tol).psd) {
        throw std::invalid_argument("NoiseModel: R is not positive semidefinite");
    }
}

NoiseModel NoiseModel::regularized(double eps) const {
    if (eps < 0.0) {
        throw std::invalid_argument("NoiseModel::regularized: eps must be nonnegative");
    }
    return NoiseModel(W0, Q, R + eps * Matrix::Identity(R.rows(), R.cols()));
}

Json NoiseModel::to_json() const {
    return Json{{"W0", matrix_to_json(W0)}, {"Q", matrix_to_json(Q)}, {"R", matrix_to_json(R)}};
}

NoiseModel NoiseModel::from_json(const Json& j) {
    return NoiseModel(matrix_from_json(j.at("W0")), matrix_from_json(j.at("Q")),
                      matrix_from_json(j.at("R")));
}

NoiseModel unit_noise_model(Eigen::Index rows, Eigen::Index samples, double bound) {
    if (bound <= 0.0) {
        throw std::invalid_argument("unit_noise_model: bound must be positive");
    }
    return NoiseModel(Matrix::Zero(rows, samples), Matrix::Identity(rows, rows),
                      bound * bound * Matrix::Identity(samples, samples));
}

MembershipResult noise_membership(const Matrix& w, const NoiseModel& model, double tol) {
    require_finite(w, "noise_membership: W");
    if (w.rows() != model.noise_rows() || w.cols() != model.samples()) {
        throw std::invalid_argument("noise_membership: W has wrong dimensions");
    }
    const Matrix dev = w - model.W0;
    const Matrix value = symmetrize(model.R - dev.transpose() * model.Q * dev);
    const double margin = min_eigenvalue(value);
    return {margin >= -tol, margin};
}

}  // namespace qmiset
