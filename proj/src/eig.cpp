#include "spotvol/eig.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "spotvol/errors.hpp"

namespace spotvol {

SymMatrix::SymMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, 0.0) {
    if (dim == 0) throw ContractViolation("SymMatrix: dim must be >= 1");
}

SymMatrix SymMatrix::from_upper(std::size_t dim, std::span<const double> row_major) {
    if (row_major.size() != dim * dim) {
        throw ContractViolation("SymMatrix::from_upper: buffer size " +
                                std::to_string(row_major.size()) + " != dim^2");
    }
    SymMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = i; j < dim; ++j) m.set(i, j, row_major[i * dim + j]);
    return m;
}

SymMatrix SymMatrix::identity(std::size_t dim) {
    SymMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m.set(i, i, 1.0);
    return m;
}

double SymMatrix::trace() const noexcept {
    double t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += data_[i * dim_ + i];
    return t;
}

double SymMatrix::frobenius_norm() const noexcept {
    double s = 0.0;
    for (double x : data_) s += x * x;
    return std::sqrt(s);
}

namespace {

void require_same_dim(const SymMatrix& a, const SymMatrix& b, const char* op) {
    if (a.dim() != b.dim()) {
        throw ContractViolation(std::string(op) + ": dimension mismatch " +
                                std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
    }
}

template <class Op>
SymMatrix combine(const SymMatrix& a, const SymMatrix& b, Op op) {
    require_same_dim(a, b, "SymMatrix arithmetic");
    SymMatrix out(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = i; j < a.dim(); ++j) out.set(i, j, op(a(i, j), b(i, j)));
    return out;
}

}  // namespace

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
    return combine(a, b, std::plus<>{});
}

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
    return combine(a, b, std::minus<>{});
}

SymMatrix operator*(double s, const SymMatrix& a) {
    SymMatrix out(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = i; j < a.dim(); ++j) out.set(i, j, s * a(i, j));
    return out;
}

double Spectrum::sum() const noexcept {
    return std::accumulate(values.begin(), values.end(), 0.0);
}

Spectrum eigenvalues_sym(const SymMatrix& m, double tol) {
    if (!(tol > 0.0)) throw ContractViolation("eigenvalues_sym: tol must be > 0");

    const std::size_t d = m.dim();
    std::vector<double> a(m.data().begin(), m.data().end());
    auto at = [&a, d](std::size_t i, std::size_t j) -> double& { return a[i * d + j]; };

    const double threshold = tol * m.frobenius_norm();

    auto max_off = [&] {
        double mx = 0.0;
        for (std::size_t p = 0; p < d; ++p)
            for (std::size_t q = p + 1; q < d; ++q) mx = std::max(mx, std::abs(at(p, q)));
        return mx;
    };

    int sweep = 0;
    while (max_off() > threshold) {
        if (sweep++ == kJacobiSweepBudget) {
            throw IterationLimitError("eigenvalues_sym: no convergence after " +
                                      std::to_string(kJacobiSweepBudget) + " sweeps");
        }
        for (std::size_t p = 0; p + 1 < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) continue;
                // Rutishauser's stable form of the rotation angle.
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                at(p, p) -= t * apq;
                at(q, q) += t * apq;
                at(p, q) = at(q, p) = 0.0;
                for (std::size_t r = 0; r < d; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = at(r, p);
                    const double arq = at(r, q);
                    at(r, p) = at(p, r) = arp - s * (arq + tau * arp);
                    at(r, q) = at(q, r) = arq + s * (arp - tau * arq);
                }
            }
        }
    }

    Spectrum out;
    out.values.resize(d);
    for (std::size_t i = 0; i < d; ++i) out.values[i] = at(i, i);
    std::sort(out.values.begin(), out.values.end(), std::greater<>{});
    return out;
}

double hoffman_wielandt_gap(const SymMatrix& a, const SymMatrix& b) {
    require_same_dim(a, b, "hoffman_wielandt_gap");
    return (a - b).frobenius_norm();
}

namespace {

void require_same_length(const Spectrum& a, const Spectrum& b, const char* op) {
    if (a.size() != b.size()) {
        throw ContractViolation(std::string(op) + ": length mismatch " +
                                std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    }
}

}  // namespace

double spectrum_l1_distance(const Spectrum& a, const Spectrum& b) {
    require_same_length(a, b, "spectrum_l1_distance");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a.values[i] - b.values[i]);
    return s;
}

double spectrum_l2_squared(const Spectrum& a, const Spectrum& b) {
    require_same_length(a, b, "spectrum_l2_squared");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double e = a.values[i] - b.values[i];
        s += e * e;
    }
    return s;
}

double entrywise_l1_distance(const SymMatrix& a, const SymMatrix& b) {
    require_same_dim(a, b, "entrywise_l1_distance");
    double s = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) s += std::abs(a.data()[i] - b.data()[i]);
    return s;
}

}  // namespace spotvol
