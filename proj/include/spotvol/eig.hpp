#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace spotvol {

/**
 * Dense symmetric d x d matrix.
 *
 * Only the diagonal and the strict upper triangle are ever written; the
 * lower triangle is a mirror, so (i, j) and (j, i) are always the same bits.
 * Estimator outputs and the true spot volatility Sigma(t) are all stored
 * in this form.
 */
class SymMatrix {
public:
    explicit SymMatrix(std::size_t dim);

    /// Builds from a full row-major d x d buffer, reading the upper triangle only.
    static SymMatrix from_upper(std::size_t dim, std::span<const double> row_major);

    static SymMatrix identity(std::size_t dim);

    std::size_t dim() const noexcept { return dim_; }

    double operator()(std::size_t i, std::size_t j) const noexcept {
        return data_[i * dim_ + j];
    }

    /// Sets (i, j) and (j, i) together.
    void set(std::size_t i, std::size_t j, double value) noexcept {
        data_[i * dim_ + j] = value;
        data_[j * dim_ + i] = value;
    }

    double trace() const noexcept;
    double frobenius_norm() const noexcept;

    /// Row-major view of all d*d entries.
    std::span<const double> data() const noexcept { return data_; }

    friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

private:
    std::size_t dim_;
    std::vector<double> data_;
};

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator*(double s, const SymMatrix& a);

/// Eigenvalues sorted descending: values[0] is the largest.
struct Spectrum {
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
    double max() const { return values.front(); }
    double min() const { return values.back(); }
    double sum() const noexcept;
};

inline constexpr double kDefaultEigTol = 1e-12;
inline constexpr int kJacobiSweepBudget = 100;

/**
 * Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
 *
 * Sweeps until every off-diagonal entry of the rotated matrix is at most
 * tol * ||m||_F. Throws IterationLimitError if kJacobiSweepBudget sweeps
 * are not enough, ContractViolation if tol <= 0.
 */
Spectrum eigenvalues_sym(const SymMatrix& m, double tol = kDefaultEigTol);

/// sqrt(tr((A - B)^2)), the Frobenius distance. Upper-bounds the l2
/// distance between the sorted spectra of A and B.
double hoffman_wielandt_gap(const SymMatrix& a, const SymMatrix& b);

/// sum_i |a_i - b_i| over two spectra sorted the same way.
double spectrum_l1_distance(const Spectrum& a, const Spectrum& b);

/// sum_i (a_i - b_i)^2.
double spectrum_l2_squared(const Spectrum& a, const Spectrum& b);

/// Entrywise l1 distance sum_{i,j} |A_ij - B_ij|.
double entrywise_l1_distance(const SymMatrix& a, const SymMatrix& b);

}  // namespace spotvol
