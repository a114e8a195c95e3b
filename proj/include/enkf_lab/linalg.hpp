#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "enkf_lab/errors.hpp"

namespace enkf_lab {

/// Dense real vector. Dimension is fixed at construction and is at least one.
class Vector {
public:
    explicit Vector(std::size_t dim, double fill = 0.0);
    explicit Vector(std::vector<double> data);
    Vector(std::initializer_list<double> values);

    std::size_t dim() const noexcept { return data_.size(); }
    double& operator[](std::size_t i) noexcept { return data_[i]; }
    double operator[](std::size_t i) const noexcept { return data_[i]; }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }

    bool all_finite() const noexcept;

    friend bool operator==(const Vector&, const Vector&) = default;

private:
    std::vector<double> data_;
};

/// Dense row-major real matrix with at least one row and one column.
class Matrix {
public:
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);
    /// Nested-list constructor, e.g. `Matrix{{1, 2}, {3, 4}}`.
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix diagonal(std::span<const double> diag);
    static Matrix diagonal(std::initializer_list<double> diag);
    static Matrix column(const Vector& v);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept {
        return {data_.data() + r * cols_, cols_};
    }
    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }

    Vector column_vector(std::size_t c) const;
    void set_column(std::size_t c, const Vector& v);

    bool all_finite() const noexcept;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& a, const Vector& x);
Matrix transpose(const Matrix& a);

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Vector operator+(const Vector& a, const Vector& b);
Vector operator-(const Vector& a, const Vector& b);
Vector operator*(double s, const Vector& a);

double trace(const Matrix& a);
double dot(const Vector& a, const Vector& b);
double norm2(const Vector& a);
double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);

/// Returns (A + Aᵀ)/2. A must be square.
Matrix symmetrize(const Matrix& a);

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
/// The input is symmetrized first; if a pivot is not positive the
/// factorization is retried once with 1e-12·I added to the diagonal.
/// Throws SingularMatrixError if that also fails.
Matrix cholesky(const Matrix& a);

/// Square-root factor L (L·Lᵀ = A) of a symmetric positive semidefinite
/// matrix. Full-rank inputs go through `cholesky`; rank-deficient ones get
/// zero columns where the pivot vanishes (relative tolerance 1e-12), so the
/// factor spans exactly the column space of A. Negative curvature beyond
/// the tolerance throws SingularMatrixError.
Matrix psd_factor(const Matrix& a);

/// Solves A·X = B for symmetric positive definite A without forming A⁻¹.
/// A must be symmetric to within 1e-10 (relative to its largest entry).
Matrix solve_spd(const Matrix& a, const Matrix& b);

/// Solves A·X = B for a general square A by LU with partial pivoting.
Matrix solve_general(const Matrix& a, const Matrix& b);
Matrix inverse(const Matrix& a);

/// (A + U·C·V)⁻¹ from a known A⁻¹ by the matrix inversion lemma:
/// A⁻¹ − A⁻¹U(C⁻¹ + V·A⁻¹·U)⁻¹V·A⁻¹.
Matrix woodbury_inverse(const Matrix& a_inv, const Matrix& u, const Matrix& c, const Matrix& v);

Vector sample_mean(std::span<const Vector> members);
/// Unbiased sample covariance (divisor N − 1). Result is exactly symmetric.
Matrix sample_covariance(std::span<const Vector> members, const Vector& mean);

}  // namespace enkf_lab
