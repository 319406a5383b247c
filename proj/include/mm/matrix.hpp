#ifndef MM_MATRIX_HPP
#define MM_MATRIX_HPP

#include <optional>
#include <vector>

#include "numberfield.hpp"

namespace mm {

// Immutable-by-convention dense matrix over an exact field scalar (Rat or FE).
// All elimination is exact Gauss-Jordan; pivoting is deterministic (first
// nonzero entry in row-major order), so echelon bases are reproducible.
template <class T>
class Mat {
public:
    Mat() : r_(0), c_(0) {}
    Mat(size_t r, size_t c) : r_(r), c_(c), e_(r * c, T(0)) {}
    Mat(size_t r, size_t c, std::vector<T> entries) : r_(r), c_(c), e_(std::move(entries)) {
        if (e_.size() != r_ * c_) throw InternalInconsistency("matrix entry count");
    }

    static Mat identity(size_t n) {
        Mat m(n, n);
        for (size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    size_t rows() const { return r_; }
    size_t cols() const { return c_; }
    T& operator()(size_t i, size_t j) { return e_[i * c_ + j]; }
    const T& operator()(size_t i, size_t j) const { return e_[i * c_ + j]; }
    const std::vector<T>& entries() const { return e_; }

    friend Mat operator+(const Mat& a, const Mat& b) {
        if (a.r_ != b.r_ || a.c_ != b.c_) throw InternalInconsistency("matrix shape mismatch in +");
        Mat r(a.r_, a.c_);
        for (size_t i = 0; i < a.e_.size(); ++i) r.e_[i] = a.e_[i] + b.e_[i];
        return r;
    }
    friend Mat operator-(const Mat& a, const Mat& b) {
        if (a.r_ != b.r_ || a.c_ != b.c_) throw InternalInconsistency("matrix shape mismatch in -");
        Mat r(a.r_, a.c_);
        for (size_t i = 0; i < a.e_.size(); ++i) r.e_[i] = a.e_[i] - b.e_[i];
        return r;
    }
    friend Mat operator*(const Mat& a, const Mat& b) {
        if (a.c_ != b.r_) throw InternalInconsistency("matrix shape mismatch in *");
        Mat r(a.r_, b.c_);
        for (size_t i = 0; i < a.r_; ++i)
            for (size_t k = 0; k < a.c_; ++k) {
                if (is_zero(a(i, k))) continue;
                for (size_t j = 0; j < b.c_; ++j)
                    r(i, j) = r(i, j) + a(i, k) * b(k, j);
            }
        return r;
    }
    friend Mat operator*(const T& s, const Mat& a) {
        Mat r(a);
        for (auto& x : r.e_) x = s * x;
        return r;
    }
    friend bool operator==(const Mat& a, const Mat& b) {
        if (a.r_ != b.r_ || a.c_ != b.c_) return false;
        for (size_t i = 0; i < a.e_.size(); ++i)
            if (!(a.e_[i] == b.e_[i])) return false;
        return true;
    }
    friend bool operator!=(const Mat& a, const Mat& b) { return !(a == b); }

    bool all_zero() const {
        for (const auto& x : e_)
            if (!is_zero(x)) return false;
        return true;
    }

    Mat transpose() const {
        Mat r(c_, r_);
        for (size_t i = 0; i < r_; ++i)
            for (size_t j = 0; j < c_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }

    Mat col(size_t j) const {
        Mat r(r_, 1);
        for (size_t i = 0; i < r_; ++i) r(i, 0) = (*this)(i, j);
        return r;
    }

    std::vector<T> col_vec(size_t j) const {
        std::vector<T> v(r_);
        for (size_t i = 0; i < r_; ++i) v[i] = (*this)(i, j);
        return v;
    }

    static Mat from_col(const std::vector<T>& v) {
        Mat r(v.size(), 1);
        for (size_t i = 0; i < v.size(); ++i) r(i, 0) = v[i];
        return r;
    }

    static Mat hstack(const Mat& a, const Mat& b) {
        if (a.r_ != b.r_) throw InternalInconsistency("hstack row mismatch");
        Mat r(a.r_, a.c_ + b.c_);
        for (size_t i = 0; i < a.r_; ++i) {
            for (size_t j = 0; j < a.c_; ++j) r(i, j) = a(i, j);
            for (size_t j = 0; j < b.c_; ++j) r(i, a.c_ + j) = b(i, j);
        }
        return r;
    }
    static Mat vstack(const Mat& a, const Mat& b) {
        if (a.c_ != b.c_) throw InternalInconsistency("vstack col mismatch");
        Mat r(a.r_ + b.r_, a.c_);
        for (size_t i = 0; i < a.r_; ++i)
            for (size_t j = 0; j < a.c_; ++j) r(i, j) = a(i, j);
        for (size_t i = 0; i < b.r_; ++i)
            for (size_t j = 0; j < a.c_; ++j) r(a.r_ + i, j) = b(i, j);
        return r;
    }

    void set_block(size_t i0, size_t j0, const Mat& b) {
        for (size_t i = 0; i < b.r_; ++i)
            for (size_t j = 0; j < b.c_; ++j) (*this)(i0 + i, j0 + j) = b(i, j);
    }
    Mat block(size_t i0, size_t j0, size_t nr, size_t nc) const {
        Mat r(nr, nc);
        for (size_t i = 0; i < nr; ++i)
            for (size_t j = 0; j < nc; ++j) r(i, j) = (*this)(i0 + i, j0 + j);
        return r;
    }

private:
    size_t r_, c_;
    std::vector<T> e_;
};

// fallback pivot-size measure for scalar types without a cheaper notion
template <class T>
size_t entry_weight(const T&) { return 1; }

// In-place reduced row echelon form; returns the pivot columns.
template <class T>
std::vector<size_t> rref(Mat<T>& m) {
    std::vector<size_t> pivots;
    size_t row = 0;
    for (size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
        // among the candidate rows, a small pivot keeps the fractions from
        // snowballing through the elimination
        size_t sel = m.rows();
        size_t best = 0;
        for (size_t i = row; i < m.rows(); ++i) {
            if (is_zero(m(i, col))) continue;
            size_t w = entry_weight(m(i, col));
            if (sel == m.rows() || w < best) {
                sel = i;
                best = w;
                if (w <= 1) break;
            }
        }
        if (sel == m.rows()) continue;
        if (sel != row)
            for (size_t j = 0; j < m.cols(); ++j) std::swap(m(sel, j), m(row, j));
        T piv_inv = inv(m(row, col));
        for (size_t j = col; j < m.cols(); ++j) m(row, j) = m(row, j) * piv_inv;
        for (size_t i = 0; i < m.rows(); ++i) {
            if (i == row || is_zero(m(i, col))) continue;
            T f = m(i, col);
            for (size_t j = col; j < m.cols(); ++j) m(i, j) = m(i, j) - f * m(row, j);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

template <class T>
size_t rank(Mat<T> m) { return rref(m).size(); }

// Columns form a basis of ker(M); width 0 when the kernel is trivial.
template <class T>
Mat<T> solve_kernel(const Mat<T>& m0) {
    Mat<T> m(m0);
    std::vector<size_t> pivots = rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (size_t p : pivots) is_pivot[p] = true;
    std::vector<size_t> free_cols;
    for (size_t j = 0; j < m.cols(); ++j)
        if (!is_pivot[j]) free_cols.push_back(j);
    Mat<T> k(m.cols(), free_cols.size());
    for (size_t f = 0; f < free_cols.size(); ++f) {
        size_t fc = free_cols[f];
        k(fc, f) = T(1);
        for (size_t r = 0; r < pivots.size(); ++r)
            k(pivots[r], f) = T(0) - m(r, fc);
    }
    return k;
}

// Least-index particular solution of A x = b, if any.
template <class T>
std::optional<std::vector<T>> solve_linear(const Mat<T>& a, const std::vector<T>& b) {
    Mat<T> aug = Mat<T>::hstack(a, Mat<T>::from_col(b));
    std::vector<size_t> pivots = rref(aug);
    if (!pivots.empty() && pivots.back() == a.cols()) return std::nullopt;
    std::vector<T> x(a.cols(), T(0));
    for (size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug(r, a.cols());
    return x;
}

// Least-index solutions of A X = B columnwise; nullopt when any column is
// inconsistent. One elimination serves all right-hand sides.
template <class T>
std::optional<Mat<T>> solve_linear_many(const Mat<T>& a, const Mat<T>& b) {
    Mat<T> aug = Mat<T>::hstack(a, b);
    std::vector<size_t> pivots;
    size_t row = 0;
    for (size_t col = 0; col < a.cols() && row < aug.rows(); ++col) {
        size_t sel = row;
        while (sel < aug.rows() && is_zero(aug(sel, col))) ++sel;
        if (sel == aug.rows()) continue;
        if (sel != row)
            for (size_t j = 0; j < aug.cols(); ++j) std::swap(aug(sel, j), aug(row, j));
        T piv_inv = inv(aug(row, col));
        for (size_t j = col; j < aug.cols(); ++j) aug(row, j) = aug(row, j) * piv_inv;
        for (size_t i = 0; i < aug.rows(); ++i) {
            if (i == row || is_zero(aug(i, col))) continue;
            T f = aug(i, col);
            for (size_t j = col; j < aug.cols(); ++j)
                aug(i, j) = aug(i, j) - f * aug(row, j);
        }
        pivots.push_back(col);
        ++row;
    }
    for (size_t i = row; i < aug.rows(); ++i)
        for (size_t j = 0; j < b.cols(); ++j)
            if (!is_zero(aug(i, a.cols() + j))) return std::nullopt;
    Mat<T> x(a.cols(), b.cols());
    for (size_t r = 0; r < pivots.size(); ++r)
        for (size_t j = 0; j < b.cols(); ++j) x(pivots[r], j) = aug(r, a.cols() + j);
    return x;
}

template <class T>
Mat<T> inverse(const Mat<T>& a) {
    if (a.rows() != a.cols()) throw InternalInconsistency("inverse of non-square matrix");
    Mat<T> aug = Mat<T>::hstack(a, Mat<T>::identity(a.rows()));
    std::vector<size_t> pivots = rref(aug);
    if (pivots.size() != a.rows()) throw InternalInconsistency("singular matrix");
    return aug.block(0, a.rows(), a.rows(), a.rows());
}

template <class T>
bool is_invertible(const Mat<T>& a) {
    return a.rows() == a.cols() && rank(a) == a.rows();
}

template <class T>
T det(Mat<T> m) {
    if (m.rows() != m.cols()) throw InternalInconsistency("det of non-square matrix");
    T d(1);
    size_t n = m.rows();
    for (size_t col = 0; col < n; ++col) {
        size_t sel = col;
        while (sel < n && is_zero(m(sel, col))) ++sel;
        if (sel == n) return T(0);
        if (sel != col) {
            for (size_t j = 0; j < n; ++j) std::swap(m(sel, j), m(col, j));
            d = T(0) - d;
        }
        d = d * m(col, col);
        T piv_inv = inv(m(col, col));
        for (size_t i = col + 1; i < n; ++i) {
            if (is_zero(m(i, col))) continue;
            T f = m(i, col) * piv_inv;
            for (size_t j = col; j < n; ++j) m(i, j) = m(i, j) - f * m(col, j);
        }
    }
    return d;
}

using QMat = Mat<Rat>;
using KMat = Mat<FE>;

// d x d rational matrix of multiplication by a in the power basis of k.
inline QMat mul_matrix(const NFPtr& k, const FE& a0) {
    const int d = k->deg();
    FE a = a0.promote(k);
    QMat m(static_cast<size_t>(d), static_cast<size_t>(d));
    FE basis_pow(Rat(1));
    FE gen = FE::gen(k);
    for (int j = 0; j < d; ++j) {
        FE aj = a * basis_pow;
        std::vector<Rat> col = aj.coords(d);
        for (int i = 0; i < d; ++i) m(static_cast<size_t>(i), static_cast<size_t>(j)) = col[static_cast<size_t>(i)];
        basis_pow = basis_pow * gen;
    }
    return m;
}

// Read a k-linear map as a Q-linear map in the power basis: block (i,j) is
// the multiplication-by-M(i,j) matrix.
inline QMat restrict_scalars(const NFPtr& k, const KMat& m) {
    const size_t d = static_cast<size_t>(k->deg());
    QMat r(m.rows() * d, m.cols() * d);
    for (size_t i = 0; i < m.rows(); ++i)
        for (size_t j = 0; j < m.cols(); ++j) {
            if (is_zero(m(i, j))) continue;
            r.set_block(i * d, j * d, mul_matrix(k, m(i, j)));
        }
    return r;
}

// Writes the field generator as sum_i q_i (gen+i)^mu. Shifts i = 0..mu-1 are
// tried first; when that system is inconsistent (possible once the field
// degree exceeds mu) one more shift is added, which always suffices since
// mu+1 shifted mu-th powers span all polynomials of degree <= mu.
inline std::vector<Rat> express_generator_in_powers(const NFPtr& k, int mu) {
    if (mu < 1) throw BadIndex("mu must be positive");
    const int d = k->deg();
    const FE gen = FE::gen(k);
    for (int shifts = mu; shifts <= mu + 1; ++shifts) {
        QMat a(static_cast<size_t>(d), static_cast<size_t>(shifts));
        for (int i = 0; i < shifts; ++i) {
            FE base = gen + FE(static_cast<long>(i));
            FE pw(Rat(1));
            for (int e = 0; e < mu; ++e) pw = pw * base;
            std::vector<Rat> col = pw.coords(d);
            for (int r = 0; r < d; ++r) a(static_cast<size_t>(r), static_cast<size_t>(i)) = col[static_cast<size_t>(r)];
        }
        std::vector<Rat> b = gen.coords(d);
        if (auto x = solve_linear(a, b)) return *x;
    }
    throw InternalInconsistency("generator power expression solve failed");
}

// Coordinates of each column of v in the column span of basis; throws if a
// column is outside the span.
template <class T>
Mat<T> express_in_basis(const Mat<T>& basis, const Mat<T>& v) {
    Mat<T> aug = Mat<T>::hstack(basis, v);
    std::vector<size_t> pivots = rref(aug);
    for (size_t p : pivots)
        if (p >= basis.cols())
            throw InternalInconsistency("vector outside spanning set");
    Mat<T> out(basis.cols(), v.cols());
    for (size_t r = 0; r < pivots.size(); ++r)
        for (size_t j = 0; j < v.cols(); ++j)
            out(pivots[r], j) = aug(r, basis.cols() + j);
    return out;
}

} // namespace mm

#endif
