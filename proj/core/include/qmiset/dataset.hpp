#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

#include "qmiset/noise.hpp"

namespace qmiset {

// ---------------------------------------------------------------------------
// Reproducible random streams
// ---------------------------------------------------------------------------
// Every random draw in the library comes from an mt19937_64 seeded through a
// splitmix64 chain over (seed, tag, a, b, bits(t)). Distinct purposes use
// distinct tags, so e.g. the regressor skeleton of a sweep cell is keyed by
// (seed, "skeleton", trial) while its noise draws are keyed by
// (seed, "noise-*", trial, tau0). Uniform and normal variates are generated
// from raw 64-bit words (not std::*_distribution), so a fixed seed gives
// bit-identical data.

uint64_t mix_key(uint64_t state, uint64_t value);
uint64_t stream_key(uint64_t seed, std::string_view tag, uint64_t a = 0, uint64_t b = 0,
                    double t = 0.0);
std::mt19937_64 make_stream(uint64_t seed, std::string_view tag, uint64_t a = 0, uint64_t b = 0,
                            double t = 0.0);

double uniform01(std::mt19937_64& rng);                    // [0, 1)
double uniform_in(std::mt19937_64& rng, double lo, double hi);
double standard_normal(std::mt19937_64& rng);
Matrix random_normal_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols);

// ---------------------------------------------------------------------------
// Data containers
// ---------------------------------------------------------------------------

// Columns are samples: Y = Theta X + W with X (n x N) and Y (p x N).
struct RegressionData {
    Matrix X;
    Matrix Y;

    RegressionData(Matrix x, Matrix y);

    Eigen::Index regressor_dim() const { return X.rows(); }
    Eigen::Index regressand_dim() const { return Y.rows(); }
    Eigen::Index samples() const { return X.cols(); }
};

// Discrete-time plant
//   x+  = A x + Bp wp
//   zp  = Cp x + Dp wp
//   y   = Cy x + Dyp wp
struct PlantRealization {
    Matrix A;
    Matrix Bp;
    Matrix Cy;
    Matrix Dyp;
    Matrix Cp;
    Matrix Dp;

    PlantRealization(Matrix a, Matrix bp, Matrix cy, Matrix dyp, Matrix cp, Matrix dp);

    Eigen::Index state_dim() const { return A.rows(); }
    Eigen::Index input_dim() const { return Bp.cols(); }
    Eigen::Index output_dim() const { return Cy.rows(); }
    Eigen::Index performance_dim() const { return Cp.rows(); }

    Json to_json() const;
    static PlantRealization from_json(const Json& j);
};

// The fourth-order benchmark plant used throughout the experiments
// (state estimation: zp = x).
PlantRealization fourth_order_plant();

struct BoxBounds {
    Vector lo;
    Vector hi;

    BoxBounds(Vector lo_, Vector hi_);
    static BoxBounds cube(Eigen::Index dim, double lo, double hi);
};

// One-step experiment data: columns of X are independently sampled states,
// columns of X_plus / Y the correspondingly propagated quantities. The
// combined regressor [X; Wp] must have full row rank before the data can be
// used to build parameter sets.
struct EstimationDataset {
    Matrix X;
    Matrix X_plus;
    Matrix Wp;
    Matrix Y;
    NoiseModel noise_W;
    NoiseModel noise_V;
    struct Meta {
        uint64_t seed = 0;
        double tau0 = 0.0;
        int N = 0;
    } meta;

    EstimationDataset(Matrix x, Matrix x_plus, Matrix wp, Matrix y, NoiseModel noise_w,
                      NoiseModel noise_v, Meta meta);

    Eigen::Index state_dim() const { return X.rows(); }
    Eigen::Index input_dim() const { return Wp.rows(); }
    Eigen::Index output_dim() const { return Y.rows(); }
    Eigen::Index samples() const { return X.cols(); }

    // [X; Wp], the shared regressor of both identification problems.
    Matrix combined_regressor() const;
    RegressionData dynamics_data() const;  // regressand X_plus
    RegressionData output_data() const;    // regressand Y

    Json to_json() const;
    static EstimationDataset from_json(const Json& j);
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// Noise-free skeleton: draws N state / input columns uniformly from the
// boxes, propagates them exactly through the plant and attaches unit noise
// models with the given bound. Deterministic for a fixed seed.
EstimationDataset generate_dataset(const PlantRealization& plant, int N,
                                   const BoxBounds& state_box, const BoxBounds& input_box,
                                   uint64_t seed, double noise_bound = 1.0);

// Structured noise W = tau1 * Th_row * X + tau0 * Th_ker * Xperp with
//  - every singular value of Th_ker * Xperp equal to `bound`,
//  - tau1 >= 0 chosen by bisection so that sigma_max(W) == bound.
// `rows` is the number of noise rows (it is not determined by X: the same
// regressor serves noise of different dimension in the estimation setup).
Matrix make_structured_noise(const Matrix& x, Eigen::Index rows, double tau0, uint64_t seed,
                             double bound);

enum class SlaterStatus { Strict, Marginal, Infeasible };

struct SlaterReport {
    SlaterStatus status = SlaterStatus::Infeasible;
    Matrix theta_bar;          // least-squares witness
    Matrix w_bar;              // residual Y - theta_bar X
    double lambda_min = 0.0;   // of the witness QMI matrix
    double suggested_epsilon = 0.0;  // smallest R + eps*I shift restoring strictness
};

// Least-squares witness check of the strict-feasibility assumption. Never
// throws for infeasible data; the caller decides whether to regularize.
SlaterReport check_slater(const RegressionData& data, const NoiseModel& model,
                          double classify_tol = 1e-9);

const char* to_string(SlaterStatus s);

}  // namespace qmiset
