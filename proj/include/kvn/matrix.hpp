#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "kvn/errors.hpp"

namespace kvn {

using Vector = std::vector<double>;

/// Dense row-major matrix. Small fixed-order problems only; no view semantics.
class Matrix {
  public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    Matrix(std::initializer_list<std::initializer_list<double>> rows) {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_)
                throw ValidationError("matrix literal has ragged rows");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const double* row_ptr(std::size_t i) const { return data_.data() + i * cols_; }
    double* row_ptr(std::size_t i) { return data_.data() + i * cols_; }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Matrix& operator*=(double s) {
        for (double& v : data_) v *= s;
        return *this;
    }

    Matrix& operator+=(const Matrix& other) {
        check_same_shape(other);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
        return *this;
    }

    Matrix& operator-=(const Matrix& other) {
        check_same_shape(other);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
        return *this;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (double v : data_) s += v * v;
        return std::sqrt(s);
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    /// Columns listed in `idx`, in that order.
    Matrix columns(const std::vector<std::size_t>& idx) const {
        Matrix out(rows_, idx.size());
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < idx.size(); ++j) out(i, j) = (*this)(i, idx[j]);
        return out;
    }

    Vector column(std::size_t j) const {
        Vector c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    void set_column(std::size_t j, const Vector& c) {
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
    }

  private:
    void check_same_shape(const Matrix& other) const {
        if (rows_ != other.rows_ || cols_ != other.cols_)
            throw ValidationError("matrix shape mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw ValidationError("matrix product shape mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* ci = c.row_ptr(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const double* bk = b.row_ptr(k);
            for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

inline Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
inline Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
inline Matrix operator*(double s, Matrix a) { return a *= s; }

inline Vector operator*(const Matrix& a, const Vector& x) {
    if (a.cols() != x.size()) throw ValidationError("matvec shape mismatch");
    Vector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* ai = a.row_ptr(i);
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += ai[j] * x[j];
        y[i] = s;
    }
    return y;
}

inline Matrix hstack(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw ValidationError("hstack row mismatch");
    Matrix c(a.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j);
        for (std::size_t j = 0; j < b.cols(); ++j) c(i, a.cols() + j) = b(i, j);
    }
    return c;
}

inline double dot(const Vector& a, const Vector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(const Vector& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

/// Symmetric dense matrix. Construction from a general square matrix
/// symmetrizes by averaging; the full storage stays exactly symmetric
/// (mirror entries are single writes of the identical value).
class SymMatrix {
  public:
    SymMatrix() = default;

    explicit SymMatrix(std::size_t order, double fill = 0.0)
        : order_(order), data_(order * order, fill) {
        if (order == 0) throw ValidationError("SymMatrix order must be >= 1");
    }

    explicit SymMatrix(const Matrix& a) : order_(a.rows()), data_(a.rows() * a.rows()) {
        if (a.rows() != a.cols()) throw ValidationError("SymMatrix source must be square");
        if (a.rows() == 0) throw ValidationError("SymMatrix order must be >= 1");
        for (std::size_t i = 0; i < order_; ++i) {
            data_[i * order_ + i] = a(i, i);
            for (std::size_t j = i + 1; j < order_; ++j) {
                const double v = 0.5 * (a(i, j) + a(j, i));
                data_[i * order_ + j] = v;
                data_[j * order_ + i] = v;
            }
        }
    }

    SymMatrix(std::initializer_list<std::initializer_list<double>> rows)
        : SymMatrix(Matrix(rows)) {}

    static SymMatrix identity(std::size_t n) {
        SymMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1.0);
        return m;
    }

    static SymMatrix diagonal(const Vector& d) {
        SymMatrix m(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m.set(i, i, d[i]);
        return m;
    }

    std::size_t order() const { return order_; }

    double operator()(std::size_t i, std::size_t j) const { return data_[i * order_ + j]; }

    void set(std::size_t i, std::size_t j, double v) {
        data_[i * order_ + j] = v;
        data_[j * order_ + i] = v;
    }

    void add(std::size_t i, std::size_t j, double v) {
        data_[i * order_ + j] += v;
        if (i != j) data_[j * order_ + i] += v;
    }

    Matrix to_matrix() const {
        Matrix m(order_, order_);
        for (std::size_t i = 0; i < order_; ++i)
            for (std::size_t j = 0; j < order_; ++j) m(i, j) = (*this)(i, j);
        return m;
    }

    Vector diagonal_values() const {
        Vector d(order_);
        for (std::size_t i = 0; i < order_; ++i) d[i] = (*this)(i, i);
        return d;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (double v : data_) s += v * v;
        return std::sqrt(s);
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    SymMatrix& operator+=(const SymMatrix& other) {
        if (order_ != other.order_) throw ValidationError("SymMatrix shape mismatch");
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
        return *this;
    }

    SymMatrix& operator-=(const SymMatrix& other) {
        if (order_ != other.order_) throw ValidationError("SymMatrix shape mismatch");
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
        return *this;
    }

    SymMatrix& operator*=(double s) {
        for (double& v : data_) v *= s;
        return *this;
    }

  private:
    std::size_t order_ = 0;
    std::vector<double> data_;
};

inline SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
inline SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
inline SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

inline Vector operator*(const SymMatrix& a, const Vector& x) { return a.to_matrix() * x; }

/// Pack A^T B A without forming intermediates larger than needed.
inline SymMatrix congruence(const Matrix& a, const SymMatrix& b) {
    return SymMatrix(a.transposed() * b.to_matrix() * a);
}

/// LU factorization with partial pivoting, in place; returns permutation sign.
/// Throws RankDeficient when a pivot falls below `tol` times the matrix scale.
inline void lu_factor(Matrix& a, std::vector<std::size_t>& perm, double tol = 1e-13) {
    const std::size_t n = a.rows();
    if (n != a.cols()) throw ValidationError("lu_factor needs a square matrix");
    const double scale = std::max(a.max_abs(), 1.0);
    perm.resize(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(a(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double v = std::abs(a(i, k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (best <= tol * scale)
            throw RankDeficient("matrix is numerically singular");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(perm[k], perm[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = a(i, k) / a(k, k);
            a(i, k) = m;
            if (m == 0.0) continue;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= m * a(k, j);
        }
    }
}

inline Vector lu_solve(const Matrix& lu, const std::vector<std::size_t>& perm, const Vector& b) {
    const std::size_t n = lu.rows();
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[perm[i]];
    for (std::size_t i = 1; i < n; ++i) {
        double s = x[i];
        for (std::size_t j = 0; j < i; ++j) s -= lu(i, j) * x[j];
        x[i] = s;
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = x[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= lu(ii, j) * x[j];
        x[ii] = s / lu(ii, ii);
    }
    return x;
}

/// Dense inverse through LU; reserved for small well-conditioned systems
/// (basis-change matrices). Throws RankDeficient when singular.
inline Matrix lu_inverse(const Matrix& a) {
    const std::size_t n = a.rows();
    Matrix lu = a;
    std::vector<std::size_t> perm;
    lu_factor(lu, perm);
    Matrix inv(n, n);
    Vector e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e.assign(n, 0.0);
        e[j] = 1.0;
        const Vector x = lu_solve(lu, perm, e);
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = x[i];
    }
    return inv;
}

}  // namespace kvn
