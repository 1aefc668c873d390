#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wprime/model.hpp"

namespace wprime {

/// Sampling configuration of the discretization.
class DiscretizationConfig {
public:
    /// Throws DomainError unless ts > 0 and finite.
    explicit DiscretizationConfig(double ts);
    double ts() const noexcept { return ts_; }

private:
    double ts_;
};

/// Per-step blocks of the loop-free subsystem
///   [xi(k+1); x(k)] = [M11 M12; M21 M22] [xi(k); ubar(k)],  ubar = B(p) u.
/// M21 and M22 are the same matrix Phi Ts/2.
struct SigmaRealization {
    Matrix m11;  ///< I + Phi A Ts
    Matrix m12;  ///< 2 Phi
    Matrix m21;  ///< Phi Ts/2
    Matrix m22;  ///< Phi Ts/2
};

/// Generic DT update shared by every stepping engine:
///   s(k+1) = Axi s(k) + Bxi u(k)
///   y(k)   = Cxi s(k) + Dxi u(k)
///   x(k)   = Xxi s(k) + Xu u(k)
struct StepMatrices {
    Matrix Axi, Bxi, Cxi, Dxi, Xxi, Xu;
};

struct WellposednessReport {
    double ts = 0.0;
    std::size_t samples_checked = 0;
    double min_abs_det = 0.0;
    std::vector<double> argmin_p;
    double max_condition_number = 0.0;
    std::vector<std::vector<double>> singular_points;
    bool passed = false;
};

/// |det| threshold below which I - A Ts/2 counts as singular:
/// 1e-12 * max(1, max|A_ij| * Ts/2).
double singularity_threshold(const Matrix& a_p, double ts);

/// Phi = (I - A_p Ts/2)^{-1}, obtained from an LU solve against the identity.
/// Throws WellposednessError when the determinant falls below
/// singularity_threshold().
Matrix phi(const Matrix& a_p, const DiscretizationConfig& cfg);

SigmaRealization sigma_step(const LpvStateSpace& model, std::span<const double> p,
                            const DiscretizationConfig& cfg);

/// Full discretized system at p, stepping the xi state.
StepMatrices dt_step_matrices(const LpvStateSpace& model, std::span<const double> p,
                              const DiscretizationConfig& cfg);

/// Classical bilinear discretization of the frozen model at p. The stored state
/// is the Tustin state itself, so Xxi = I and Xu = 0.
StepMatrices tustin_frozen(const LpvStateSpace& model, std::span<const double> p,
                           const DiscretizationConfig& cfg);

/// Largest block mismatch of the similarity xi = (2/Ts) x_tustin between the
/// w' step matrices and the Tustin step matrices at the same frozen point:
/// Axi = Ad, Bxi = (2/Ts) Bd, Cxi = (Ts/2) Cd, Dxi = Dd. Each block error is
/// max|difference| / max(1, max|Tustin side|).
double similarity_residual(const StepMatrices& wprime, const StepMatrices& tustin, const DiscretizationConfig& cfg);

/// [[I, 2I], [Ts/2 I, Ts/2 I]] with n_x x n_x blocks: the realization of the
/// inverse w' operator, mapping [xi(k); rx(k)] to [xi(k+1); x(k)].
Matrix rinv_matrices(std::size_t n_x, const DiscretizationConfig& cfg);

/// Sampled check of det(I - A(p) Ts/2) != 0 over the domain. Sample order:
/// box vertices, then an endpoint-inclusive grid (row-major, last coordinate
/// fastest), then `random_samples` uniform draws from a seeded mt19937_64.
/// A sampled check cannot certify the condition for every p in the box.
WellposednessReport wellposedness_check(const LpvStateSpace& model, const DiscretizationConfig& cfg,
                                        std::size_t grid_per_dim, std::size_t random_samples,
                                        std::uint64_t seed);

/// Uniform double in [0, 1) from the top 53 bits of one mt19937_64 draw.
/// Used instead of std::uniform_real_distribution so sample sequences are
/// identical across standard libraries.
double unit_uniform(std::uint64_t bits) noexcept;

}  // namespace wprime
