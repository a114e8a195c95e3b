#include "enkf_lab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace enkf_lab {

namespace {

constexpr double kFactorJitter = 1e-12;
constexpr double kSymmetryTolerance = 1e-10;

void require(bool condition, const char* what) {
    if (!condition) throw InvalidInput(what);
}

std::string dims(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

// In-place Cholesky of a symmetric matrix. Returns false on a non-positive pivot.
bool try_cholesky(Matrix& a) {
    const std::size_t n = a.rows();
    for (std::size_t j = 0; j < n; ++j) {
        double pivot = a(j, j);
        for (std::size_t k = 0; k < j; ++k) pivot -= a(j, k) * a(j, k);
        if (!(pivot > 0.0)) return false;
        const double ljj = std::sqrt(pivot);
        a(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
            a(i, j) = s / ljj;
        }
        for (std::size_t c = j + 1; c < n; ++c) a(j, c) = 0.0;
    }
    return true;
}

Matrix cholesky_solve(const Matrix& l, const Matrix& b) {
    const std::size_t n = l.rows();
    Matrix x = b;
    for (std::size_t c = 0; c < b.cols(); ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = x(i, c);
            for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x(k, c);
            x(i, c) = s / l(i, i);
        }
        for (std::size_t i = n; i-- > 0;) {
            double s = x(i, c);
            for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * x(k, c);
            x(i, c) = s / l(i, i);
        }
    }
    return x;
}

}  // namespace

// ---------------------------------------------------------------- Vector

Vector::Vector(std::size_t dim, double fill) : data_(dim, fill) {
    require(dim >= 1, "Vector: dimension must be at least 1");
}

Vector::Vector(std::vector<double> data) : data_(std::move(data)) {
    require(!data_.empty(), "Vector: dimension must be at least 1");
}

Vector::Vector(std::initializer_list<double> values) : data_(values) {
    require(!data_.empty(), "Vector: dimension must be at least 1");
}

bool Vector::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

// ---------------------------------------------------------------- Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    require(rows >= 1 && cols >= 1, "Matrix: dimensions must be at least 1");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
    require(rows >= 1 && cols >= 1, "Matrix: dimensions must be at least 1");
    require(data_.size() == rows * cols, "Matrix: entry count does not match dimensions");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
    require(rows_ >= 1 && cols_ >= 1, "Matrix: dimensions must be at least 1");
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        require(r.size() == cols_, "Matrix: ragged initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
    Matrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
}

Matrix Matrix::diagonal(std::initializer_list<double> diag) {
    return diagonal(std::span<const double>(diag.begin(), diag.size()));
}

Matrix Matrix::column(const Vector& v) {
    return Matrix(v.dim(), 1, std::vector<double>(v.values().begin(), v.values().end()));
}

Vector Matrix::column_vector(std::size_t c) const {
    Vector v(rows_);
    for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
}

void Matrix::set_column(std::size_t c, const Vector& v) {
    require(v.dim() == rows_, "Matrix::set_column: dimension mismatch");
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = v[r];
}

bool Matrix::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

// ---------------------------------------------------------------- arithmetic

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw InvalidInput("matmul: " + dims(a) + " times " + dims(b));
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

Vector matvec(const Matrix& a, const Vector& x) {
    if (a.cols() != x.dim())
        throw InvalidInput("matvec: " + dims(a) + " times vector of dim " + std::to_string(x.dim()));
    Vector y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * x[k];
        y[i] = s;
    }
    return y;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw InvalidInput("matrix add: " + dims(a) + " vs " + dims(b));
    Matrix c = a;
    auto cv = c.values();
    auto bv = b.values();
    for (std::size_t i = 0; i < cv.size(); ++i) cv[i] += bv[i];
    return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw InvalidInput("matrix subtract: " + dims(a) + " vs " + dims(b));
    Matrix c = a;
    auto cv = c.values();
    auto bv = b.values();
    for (std::size_t i = 0; i < cv.size(); ++i) cv[i] -= bv[i];
    return c;
}

Matrix operator*(double s, const Matrix& a) {
    Matrix c = a;
    for (double& v : c.values()) v *= s;
    return c;
}

Vector operator+(const Vector& a, const Vector& b) {
    require(a.dim() == b.dim(), "vector add: dimension mismatch");
    Vector c = a;
    for (std::size_t i = 0; i < c.dim(); ++i) c[i] += b[i];
    return c;
}

Vector operator-(const Vector& a, const Vector& b) {
    require(a.dim() == b.dim(), "vector subtract: dimension mismatch");
    Vector c = a;
    for (std::size_t i = 0; i < c.dim(); ++i) c[i] -= b[i];
    return c;
}

Vector operator*(double s, const Vector& a) {
    Vector c = a;
    for (double& v : c.values()) v *= s;
    return c;
}

double trace(const Matrix& a) {
    if (!a.is_square()) throw InvalidInput("trace: matrix is " + dims(a));
    double t = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
    return t;
}

double dot(const Vector& a, const Vector& b) {
    require(a.dim() == b.dim(), "dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

double frobenius_norm(const Matrix& a) {
    double s = 0.0;
    for (double v : a.values()) s += v * v;
    return std::sqrt(s);
}

double max_abs(const Matrix& a) {
    double m = 0.0;
    for (double v : a.values()) m = std::max(m, std::abs(v));
    return m;
}

Matrix symmetrize(const Matrix& a) {
    if (!a.is_square()) throw InvalidInput("symmetrize: matrix is " + dims(a));
    Matrix s = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j) {
            const double v = 0.5 * (a(i, j) + a(j, i));
            s(i, j) = v;
            s(j, i) = v;
        }
    return s;
}

// ---------------------------------------------------------------- factorizations

Matrix cholesky(const Matrix& a) {
    if (!a.is_square()) throw InvalidInput("cholesky: matrix is " + dims(a));
    const Matrix sym = symmetrize(a);
    Matrix l = sym;
    if (try_cholesky(l)) return l;
    l = sym;
    for (std::size_t i = 0; i < l.rows(); ++i) l(i, i) += kFactorJitter;
    if (try_cholesky(l)) return l;
    throw SingularMatrixError("cholesky: matrix is not positive definite");
}

Matrix psd_factor(const Matrix& a) {
    if (!a.is_square()) throw InvalidInput("psd_factor: matrix is " + dims(a));
    const Matrix sym = symmetrize(a);
    Matrix l = sym;
    if (try_cholesky(l)) return l;

    const std::size_t n = sym.rows();
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(sym(i, i)));
    const double tol = kFactorJitter * std::max(1.0, scale);

    l = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double pivot = sym(j, j);
        for (std::size_t k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
        if (pivot < -tol)
            throw SingularMatrixError("psd_factor: matrix has a negative eigen-direction");
        if (pivot <= tol) continue;  // column stays zero
        const double ljj = std::sqrt(pivot);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = sym(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    return l;
}

Matrix solve_spd(const Matrix& a, const Matrix& b) {
    if (!a.is_square()) throw InvalidInput("solve_spd: matrix is " + dims(a));
    if (b.rows() != a.rows())
        throw InvalidInput("solve_spd: " + dims(a) + " system with right-hand side " + dims(b));
    const double scale = std::max(1.0, max_abs(a));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j)
            if (std::abs(a(i, j) - a(j, i)) > kSymmetryTolerance * scale)
                throw InvalidInput("solve_spd: matrix is not symmetric");
    return cholesky_solve(cholesky(a), b);
}

Matrix solve_general(const Matrix& a, const Matrix& b) {
    if (!a.is_square()) throw InvalidInput("solve_general: matrix is " + dims(a));
    if (b.rows() != a.rows())
        throw InvalidInput("solve_general: " + dims(a) + " system with right-hand side " + dims(b));
    const std::size_t n = a.rows();
    Matrix lu = a;
    Matrix x = b;
    const double scale = max_abs(a);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(lu(i, k)) > std::abs(lu(p, k))) p = i;
        if (!(std::abs(lu(p, k)) > 1e-14 * scale))
            throw SingularMatrixError("solve_general: matrix is singular");
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(p, j));
            for (std::size_t j = 0; j < x.cols(); ++j) std::swap(x(k, j), x(p, j));
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = lu(i, k) / lu(k, k);
            lu(i, k) = f;
            for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
            for (std::size_t j = 0; j < x.cols(); ++j) x(i, j) -= f * x(k, j);
        }
    }
    for (std::size_t c = 0; c < x.cols(); ++c)
        for (std::size_t i = n; i-- > 0;) {
            double s = x(i, c);
            for (std::size_t k = i + 1; k < n; ++k) s -= lu(i, k) * x(k, c);
            x(i, c) = s / lu(i, i);
        }
    return x;
}

Matrix inverse(const Matrix& a) { return solve_general(a, Matrix::identity(a.rows())); }

Matrix woodbury_inverse(const Matrix& a_inv, const Matrix& u, const Matrix& c, const Matrix& v) {
    const std::size_t n = a_inv.rows();
    const std::size_t k = c.rows();
    if (!a_inv.is_square() || !c.is_square() || u.rows() != n || u.cols() != k ||
        v.rows() != k || v.cols() != n)
        throw InvalidInput("woodbury_inverse: A⁻¹ " + dims(a_inv) + ", U " + dims(u) + ", C " +
                           dims(c) + ", V " + dims(v));
    const Matrix a_inv_u = matmul(a_inv, u);
    const Matrix v_a_inv = matmul(v, a_inv);
    const Matrix inner = inverse(c) + matmul(v, a_inv_u);
    return a_inv - matmul(a_inv_u, solve_general(inner, v_a_inv));
}

// ---------------------------------------------------------------- sample statistics

Vector sample_mean(std::span<const Vector> members) {
    require(!members.empty(), "sample_mean: no members");
    const std::size_t n = members.front().dim();
    Vector m(n);
    for (const Vector& v : members) {
        require(v.dim() == n, "sample_mean: members differ in dimension");
        for (std::size_t i = 0; i < n; ++i) m[i] += v[i];
    }
    const double inv = 1.0 / static_cast<double>(members.size());
    for (std::size_t i = 0; i < n; ++i) m[i] *= inv;
    return m;
}

Matrix sample_covariance(std::span<const Vector> members, const Vector& mean) {
    require(members.size() >= 2, "sample_covariance: need at least two members");
    const std::size_t n = mean.dim();
    Matrix c(n, n);
    for (const Vector& v : members) {
        require(v.dim() == n, "sample_covariance: member dimension differs from mean");
        for (std::size_t i = 0; i < n; ++i) {
            const double di = v[i] - mean[i];
            for (std::size_t j = 0; j <= i; ++j) c(i, j) += di * (v[j] - mean[j]);
        }
    }
    const double inv = 1.0 / static_cast<double>(members.size() - 1);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            c(i, j) *= inv;
            c(j, i) = c(i, j);
        }
    return c;
}

}  // namespace enkf_lab
