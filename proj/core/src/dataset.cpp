#include "qmiset/dataset.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <cstring>

namespace qmiset {

// ---------------------------------------------------------------------------
// Random streams
// ---------------------------------------------------------------------------

namespace {

uint64_t splitmix64(uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

uint64_t fnv1a(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

uint64_t double_bits(double t) {
    uint64_t u = 0;
    std::memcpy(&u, &t, sizeof(u));
    return u;
}

}  // namespace

uint64_t mix_key(uint64_t state, uint64_t value) {
    uint64_t s = state ^ (value + 0x9e3779b97f4a7c15ull + (state << 6) + (state >> 2));
    return splitmix64(s);
}

uint64_t stream_key(uint64_t seed, std::string_view tag, uint64_t a, uint64_t b, double t) {
    uint64_t k = seed;
    k = mix_key(k, fnv1a(tag));
    k = mix_key(k, a);
    k = mix_key(k, b);
    k = mix_key(k, double_bits(t));
    return k;
}

std::mt19937_64 make_stream(uint64_t seed, std::string_view tag, uint64_t a, uint64_t b, double t) {
    return std::mt19937_64(stream_key(seed, tag, a, b, t));
}

double uniform01(std::mt19937_64& rng) {
    // 53 significant bits, portable across standard libraries.
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform_in(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

double standard_normal(std::mt19937_64& rng) {
    // Box-Muller on explicit uniforms; u1 > 0 guaranteed by the offset.
    const double u1 = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Matrix random_normal_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = standard_normal(rng);
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// Containers
// ---------------------------------------------------------------------------

RegressionData::RegressionData(Matrix x, Matrix y) : X(std::move(x)), Y(std::move(y)) {
    require_finite(X, "RegressionData: X");
    require_finite(Y, "RegressionData: Y");
    if (X.cols() != Y.cols()) {
        throw std::invalid_argument("RegressionData: X and Y must have the same column count");
    }
}

PlantRealization::PlantRealization(Matrix a, Matrix bp, Matrix cy, Matrix dyp, Matrix cp, Matrix dp)
    : A(std::move(a)), Bp(std::move(bp)), Cy(std::move(cy)), Dyp(std::move(dyp)),
      Cp(std::move(cp)), Dp(std::move(dp)) {
    require_finite(A, "PlantRealization: A");
    require_finite(Bp, "PlantRealization: Bp");
    require_finite(Cy, "PlantRealization: Cy");
    require_finite(Dyp, "PlantRealization: Dyp");
    require_finite(Cp, "PlantRealization: Cp");
    require_finite(Dp, "PlantRealization: Dp");
    const Eigen::Index n = A.rows();
    const Eigen::Index np = Bp.cols();
    if (A.cols() != n || Bp.rows() != n) {
        throw std::invalid_argument("PlantRealization: A must be square and Bp n x np");
    }
    if (Cy.cols() != n || Dyp.rows() != Cy.rows() || Dyp.cols() != np) {
        throw std::invalid_argument("PlantRealization: Cy/Dyp dimensions inconsistent");
    }
    if (Cp.cols() != n || Dp.rows() != Cp.rows() || Dp.cols() != np) {
        throw std::invalid_argument("PlantRealization: Cp/Dp dimensions inconsistent");
    }
}

Json PlantRealization::to_json() const {
    return Json{{"A", matrix_to_json(A)},   {"Bp", matrix_to_json(Bp)},
                {"Cy", matrix_to_json(Cy)}, {"Dyp", matrix_to_json(Dyp)},
                {"Cp", matrix_to_json(Cp)}, {"Dp", matrix_to_json(Dp)}};
}

PlantRealization PlantRealization::from_json(const Json& j) {
    return PlantRealization(matrix_from_json(j.at("A")), matrix_from_json(j.at("Bp")),
                            matrix_from_json(j.at("Cy")), matrix_from_json(j.at("Dyp")),
                            matrix_from_json(j.at("Cp")), matrix_from_json(j.at("Dp")));
}

PlantRealization fourth_order_plant() {
    Matrix A(4, 4);
    A << 1.0, 0.2, 0.0, 0.0,
        -1.0, 0.5, 0.6, 0.3,
        0.0, 0.0, 1.0, 0.2,
        0.3, 0.15, -0.3, 0.85;
    Matrix Bp(4, 6);
    Bp << Matrix::Identity(4, 4), Matrix::Zero(4, 2);
    Matrix Cy(2, 4);
    Cy << 1, 0, 0, 0,
        0, 0, 1, 0;
    Matrix Dyp(2, 6);
    Dyp << Matrix::Zero(2, 4), Matrix::Identity(2, 2);
    // Estimate the full state.
    Matrix Cp = Matrix::Identity(4, 4);
    Matrix Dp = Matrix::Zero(4, 6);
    return PlantRealization(A, Bp, Cy, Dyp, Cp, Dp);
}

BoxBounds::BoxBounds(Vector lo_, Vector hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
    if (lo.size() != hi.size()) {
        throw std::invalid_argument("BoxBounds: lo and hi must have the same size");
    }
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
        if (!std::isfinite(lo(i)) || !std::isfinite(hi(i)) || lo(i) > hi(i)) {
            throw std::invalid_argument("BoxBounds: invalid bounds");
        }
    }
}

BoxBounds BoxBounds::cube(Eigen::Index dim, double lo, double hi) {
    return BoxBounds(Vector::Constant(dim, lo), Vector::Constant(dim, hi));
}

EstimationDataset::EstimationDataset(Matrix x, Matrix x_plus, Matrix wp, Matrix y,
                                     NoiseModel noise_w, NoiseModel noise_v, Meta meta_)
    : X(std::move(x)), X_plus(std::move(x_plus)), Wp(std::move(wp)), Y(std::move(y)),
      noise_W(std::move(noise_w)), noise_V(std::move(noise_v)), meta(meta_) {
    require_finite(X, "EstimationDataset: X");
    require_finite(X_plus, "EstimationDataset: X_plus");
    require_finite(Wp, "EstimationDataset: Wp");
    require_finite(Y, "EstimationDataset: Y");
    const Eigen::Index N = X.cols();
    if (X_plus.cols() != N || Wp.cols() != N || Y.cols() != N) {
        throw std::invalid_argument("EstimationDataset: all blocks need the same column count");
    }
    if (X_plus.rows() != X.rows()) {
        throw std::invalid_argument("EstimationDataset: X and X_plus row counts differ");
    }
    if (noise_W.noise_rows() != X.rows() || noise_W.samples() != N) {
        throw std::invalid_argument("EstimationDataset: noise_W dimensions inconsistent");
    }
    if (noise_V.noise_rows() != Y.rows() || noise_V.samples() != N) {
        throw std::invalid_argument("EstimationDataset: noise_V dimensions inconsistent");
    }
}

Matrix EstimationDataset::combined_regressor() const {
    Matrix reg(X.rows() + Wp.rows(), X.cols());
    reg.topRows(X.rows()) = X;
    reg.bottomRows(Wp.rows()) = Wp;
    return reg;
}

RegressionData EstimationDataset::dynamics_data() const {
    return RegressionData(combined_regressor(), X_plus);
}

RegressionData EstimationDataset::output_data() const {
    return RegressionData(combined_regressor(), Y);
}

Json EstimationDataset::to_json() const {
    return Json{{"X", matrix_to_json(X)},
                {"X_plus", matrix_to_json(X_plus)},
                {"Wp", matrix_to_json(Wp)},
                {"Y", matrix_to_json(Y)},
                {"noise_W", noise_W.to_json()},
                {"noise_V", noise_V.to_json()},
                {"meta", Json{{"seed", meta.seed}, {"tau0", meta.tau0}, {"N", meta.N}}}};
}

EstimationDataset EstimationDataset::from_json(const Json& j) {
    Meta meta;
    meta.seed = j.at("meta").at("seed").get<uint64_t>();
    meta.tau0 = j.at("meta").at("tau0").get<double>();
    meta.N = j.at("meta").at("N").get<int>();
    return EstimationDataset(matrix_from_json(j.at("X")), matrix_from_json(j.at("X_plus")),
                             matrix_from_json(j.at("Wp")), matrix_from_json(j.at("Y")),
                             NoiseModel::from_json(j.at("noise_W")),
                             NoiseModel::from_json(j.at("noise_V")), meta);
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

EstimationDataset generate_dataset(const PlantRealization& plant, int N,
                                   const BoxBounds& state_box, const BoxBounds& input_box,
                                   uint64_t seed, double noise_bound) {
    if (N < 1) {
        throw std::invalid_argument("generate_dataset: N must be at least 1");
    }
    const Eigen::Index n = plant.state_dim();
    const Eigen::Index np = plant.input_dim();
    if (state_box.lo.size() != n || input_box.lo.size() != np) {
        throw std::invalid_argument("generate_dataset: box dimensions do not match the plant");
    }

    auto rng = make_stream(seed, "dataset");
    Matrix X(n, N), Wp(np, N);
    for (int k = 0; k < N; ++k) {
        for (Eigen::Index i = 0; i < n; ++i) {
            X(i, k) = uniform_in(rng, state_box.lo(i), state_box.hi(i));
        }
        for (Eigen::Index i = 0; i < np; ++i) {
            Wp(i, k) = uniform_in(rng, input_box.lo(i), input_box.hi(i));
        }
    }
    const Matrix X_plus = plant.A * X + plant.Bp * Wp;
    const Matrix Y = plant.Cy * X + plant.Dyp * Wp;

    EstimationDataset::Meta meta;
    meta.seed = seed;
    meta.tau0 = 0.0;
    meta.N = N;
    return EstimationDataset(X, X_plus, Wp, Y, unit_noise_model(n, N, noise_bound),
                             unit_noise_model(plant.output_dim(), N, noise_bound), meta);
}

Matrix make_structured_noise(const Matrix& x, Eigen::Index rows, double tau0, uint64_t seed,
                             double bound) {
    require_finite(x, "make_structured_noise: X");
    if (tau0 < 0.0 || tau0 >= 1.0) {
        throw std::invalid_argument("make_structured_noise: tau0 must lie in [0, 1)");
    }
    if (bound <= 0.0) {
        throw std::invalid_argument("make_structured_noise: bound must be positive");
    }
    const Eigen::Index m = x.rows();
    const Eigen::Index N = x.cols();
    if (rows < 1) {
        throw std::invalid_argument("make_structured_noise: rows must be at least 1");
    }
    if (numerical_rank(x) != m) {
        throw std::invalid_argument("make_structured_noise: X must have full row rank");
    }
    if (rows > N - m) {
        throw std::runtime_error(
            "make_structured_noise: construction failure, kernel of X is too small to give the "
            "kernel component " + std::to_string(rows) + " equal singular values (dim " +
            std::to_string(N - m) + ")");
    }

    const Matrix xperp = kernel_basis(x);  // (N - m) x N, orthonormal rows

    // Kernel component: all singular values equal to bound.
    auto rng_ker = make_stream(seed, "noise-kernel", static_cast<uint64_t>(rows), 0, tau0);
    const Matrix raw = random_normal_matrix(rng_ker, rows, N - m);
    Eigen::JacobiSVD<Matrix> svd(raw, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Matrix theta_ker = bound * svd.matrixU() * svd.matrixV().transpose();
    const Matrix kernel_component = tau0 * theta_ker * xperp;

    // Row-space component direction.
    auto rng_row = make_stream(seed, "noise-rowspace", static_cast<uint64_t>(rows), 0, tau0);
    const Matrix theta_row = random_normal_matrix(rng_row, rows, m);
    const Matrix row_component = theta_row * x;
    const double s_row = spectral_norm(row_component);
    if (s_row <= 1e-14 * std::max(1.0, bound)) {
        throw std::runtime_error(
            "make_structured_noise: construction failure, row-space component vanished "
            "(sigma_max = " + std::to_string(s_row) + ")");
    }

    // sigma_max(tau1 * row + kernel)^2 = lambda_max(tau1^2 row row^T + ker ker^T)
    // is monotone in tau1 because the two components have orthogonal row
    // spaces; bisect for sigma_max(W) == bound.
    double lo = 0.0;
    double hi = bound / s_row;
    auto sigma_at = [&](double t) { return spectral_norm(t * row_component + kernel_component); };
    if (sigma_at(hi) < bound - 1e-13 * bound) {
        throw std::runtime_error("make_structured_noise: construction failure, cannot bracket tau1");
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-13 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (sigma_at(mid) < bound) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double tau1 = hi;
    Matrix w = tau1 * row_component + kernel_component;
    const double achieved = spectral_norm(w);
    if (std::abs(achieved - bound) > 1e-9 * bound) {
        throw std::runtime_error("make_structured_noise: construction failure, sigma_max(W) = " +
                                 std::to_string(achieved) + " != bound");
    }
    return w;
}

SlaterReport check_slater(const RegressionData& data, const NoiseModel& model,
                          double classify_tol) {
    if (model.noise_rows() != data.regressand_dim() || model.samples() != data.samples()) {
        throw std::invalid_argument("check_slater: noise model does not match the data");
    }
    const Eigen::Index n = data.regressor_dim();
    if (numerical_rank(data.X) != n) {
        throw std::invalid_argument("check_slater: X must have full row rank");
    }

    SlaterReport report;
    // Unweighted least squares maximizes residual slack cheaply and does not
    // depend on R, so the epsilon search below shifts eigenvalues exactly.
    Eigen::LLT<Matrix> gram(symmetrize(data.X * data.X.transpose()));
    report.theta_bar = gram.solve(data.X * data.Y.transpose()).transpose();
    report.w_bar = data.Y - report.theta_bar * data.X;

    const Matrix dev = report.w_bar - model.W0;
    const Matrix value = symmetrize(model.R - dev.transpose() * model.Q * dev);
    report.lambda_min = min_eigenvalue(value);

    const double scale = std::max(1.0, spectral_norm(model.R));
    const double thresh = classify_tol * scale;
    if (report.lambda_min > thresh) {
        report.status = SlaterStatus::Strict;
        report.suggested_epsilon = 0.0;
        return report;
    }
    report.status = report.lambda_min < -thresh ? SlaterStatus::Infeasible : SlaterStatus::Marginal;

    // Smallest eps with lambda_min(value + eps I) strictly positive at the
    // classification threshold, found by bisection on the classifier.
    auto strict_at = [&](double eps) {
        return report.lambda_min + eps > classify_tol * std::max(1.0, spectral_norm(model.R) + eps);
    };
    double lo = 0.0;
    double hi = std::max(1e-12, 4.0 * (thresh - report.lambda_min));
    int guard = 0;
    while (!strict_at(hi) && guard++ < 200) hi *= 2.0;
    for (int it = 0; it < 200 && (hi - lo) > 1e-12 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (strict_at(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    report.suggested_epsilon = hi;
    return report;
}

const char* to_string(SlaterStatus s) {
    switch (s) {
        case SlaterStatus::Strict: return "strict";
        case SlaterStatus::Marginal: return "marginal";
        case SlaterStatus::Infeasible: return "infeasible";
    }
    return "unknown";
}

}  // namespace qmiset
