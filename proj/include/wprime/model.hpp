#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "wprime/errors.hpp"

namespace wprime {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Closed box P = [lower_1, upper_1] x ... x [lower_np, upper_np].
class SchedulingDomain {
public:
    SchedulingDomain(std::vector<double> lower, std::vector<double> upper);

    std::size_t dim() const noexcept { return lower_.size(); }
    const std::vector<double>& lower() const noexcept { return lower_; }
    const std::vector<double>& upper() const noexcept { return upper_; }

    /// True iff lower_i <= p_i <= upper_i for every i. Throws ModelError on a
    /// length mismatch.
    bool contains(std::span<const double> p) const;

    /// All 2^np corners, enumerated with the first coordinate varying slowest.
    std::vector<std::vector<double>> vertices() const;

    bool operator==(const SchedulingDomain&) const = default;

private:
    std::vector<double> lower_;
    std::vector<double> upper_;
};

/// One monomial of a parameter-dependent matrix: coeff * prod_i p_i^exponents_i.
struct MonomialTerm {
    std::vector<unsigned> exponents;
    Matrix coeff;
};

/// Matrix-valued polynomial in the scheduling vector,
///   M(p) = sum_terms coeff * prod_i p_i^e_i.
///
/// Terms are held in canonical form: exponent vectors are unique (duplicates
/// are merged by adding their coefficients on construction) and sorted
/// lexicographically.
class PMatrixFunction {
public:
    PMatrixFunction(std::size_t rows, std::size_t cols, std::size_t n_p,
                    std::vector<MonomialTerm> terms = {});

    static PMatrixFunction constant(const Matrix& value, std::size_t n_p);
    static PMatrixFunction zero(std::size_t rows, std::size_t cols, std::size_t n_p);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t n_p() const noexcept { return n_p_; }
    const std::vector<MonomialTerm>& terms() const noexcept { return terms_; }

    /// True when every term has an all-zero exponent vector.
    bool is_constant() const noexcept;

    Matrix operator()(std::span<const double> p) const;

    bool operator==(const PMatrixFunction& other) const;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::size_t n_p_;
    std::vector<MonomialTerm> terms_;
};

/// Evaluates f at a frozen scheduling point. 0^0 is taken as 1.
Matrix eval_pmatrix(const PMatrixFunction& f, std::span<const double> p);
inline Matrix eval_pmatrix(const PMatrixFunction& f, const std::vector<double>& p) {
    return eval_pmatrix(f, std::span<const double>(p));
}

/// Returns f with every coefficient multiplied by alpha.
PMatrixFunction scale_terms(const PMatrixFunction& f, double alpha);

/// Continuous-time LPV state-space model
///   xdot = A(p) x + B(p) u,   y = C(p) x + D(p) u,   p in domain.
class LpvStateSpace {
public:
    LpvStateSpace(PMatrixFunction a, PMatrixFunction b, PMatrixFunction c, PMatrixFunction d,
                  SchedulingDomain domain);

    std::size_t n_x() const noexcept { return a_.rows(); }
    std::size_t n_u() const noexcept { return b_.cols(); }
    std::size_t n_y() const noexcept { return c_.rows(); }
    std::size_t n_p() const noexcept { return domain_.dim(); }

    const PMatrixFunction& A() const noexcept { return a_; }
    const PMatrixFunction& B() const noexcept { return b_; }
    const PMatrixFunction& C() const noexcept { return c_; }
    const PMatrixFunction& D() const noexcept { return d_; }
    const SchedulingDomain& domain() const noexcept { return domain_; }

    /// True when none of A, B, C, D depends on p.
    bool is_constant() const noexcept;

    bool operator==(const LpvStateSpace&) const = default;

private:
    PMatrixFunction a_;
    PMatrixFunction b_;
    PMatrixFunction c_;
    PMatrixFunction d_;
    SchedulingDomain domain_;
};

bool validate_point(const SchedulingDomain& domain, std::span<const double> p);

/// Parses the JSON model format. Throws ModelError with ErrorCode::Parse for
/// syntax errors and missing fields, ErrorCode::Dim for shape mismatches.
LpvStateSpace parse_model(std::string_view text);
LpvStateSpace load_model(const std::string& path);

/// Canonical JSON text for a model (terms sorted, numbers round-trippable).
std::string serialize_model(const LpvStateSpace& model);

}  // namespace wprime
