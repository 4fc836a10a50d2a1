#include "revs/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace revs {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    require(data_.size() == rows_ * cols_, ErrorKind::domain,
            "matrix data length " + std::to_string(data_.size()) + " != " +
                std::to_string(rows_) + "x" + std::to_string(cols_));
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Vector Matrix::column(std::size_t c) const {
    Vector out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
}

void Matrix::set_column(std::size_t c, std::span<const double> values) {
    require(values.size() == rows_, ErrorKind::domain, "column length mismatch");
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = values[r];
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    const double* xs = x.data();
    double* ys = y.data();
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) ys[i] += alpha * xs[i];
}

Vector matvec(const Matrix& m, std::span<const double> x) {
    require(x.size() == m.cols(), ErrorKind::domain, "matvec: dimension mismatch");
    Vector y(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) y[r] = dot(m.row(r), x);
    return y;
}

Vector matvec_transposed(const Matrix& m, std::span<const double> x) {
    require(x.size() == m.rows(), ErrorKind::domain, "matvec_transposed: dimension mismatch");
    Vector y(m.cols(), 0.0);
    for (std::size_t r = 0; r < m.rows(); ++r) axpy(x[r], m.row(r), y);
    return y;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    require(a.cols() == b.rows(), ErrorKind::domain, "matmul: dimension mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto out = c.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) axpy(a(i, k), b.row(k), out);
    }
    return c;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorKind::domain,
            "max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

bool all_finite(std::span<const double> values) {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

// ---------------------------------------------------------------------------

namespace {

void check_token(std::span<const double> logits, TokenId token) {
    if (token < 0 || static_cast<std::size_t>(token) >= logits.size())
        fail(ErrorKind::domain, "token id " + std::to_string(token) + " out of range for " +
                                    std::to_string(logits.size()) + " logits");
}

// Strict "ranks above" relation: higher value first, lower index on ties.
inline bool ranks_above(double va, std::size_t a, double vb, std::size_t b) {
    return va > vb || (va == vb && a < b);
}

}  // namespace

Rank rank_of_token(std::span<const double> logits, TokenId token) {
    check_token(logits, token);
    const auto t = static_cast<std::size_t>(token);
    const double vt = logits[t];
    Rank above = 0;
    for (std::size_t j = 0; j < logits.size(); ++j)
        if (ranks_above(logits[j], j, vt, t)) ++above;
    return above + 1;
}

Rank rank_from_bottom(std::span<const double> logits, TokenId token) {
    return logits.size() + 1 - rank_of_token(logits, token);
}

std::vector<std::size_t> top_k_indices(std::span<const double> values, std::size_t k) {
    require(k <= values.size(), ErrorKind::domain,
            "top_k: k=" + std::to_string(k) + " exceeds length " + std::to_string(values.size()));
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    auto cmp = [&](std::size_t a, std::size_t b) { return ranks_above(values[a], a, values[b], b); };
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), cmp);
    idx.resize(k);
    return idx;
}

std::vector<std::size_t> bottom_k_indices(std::span<const double> values, std::size_t k) {
    require(k <= values.size(), ErrorKind::domain,
            "bottom_k: k=" + std::to_string(k) + " exceeds length " + std::to_string(values.size()));
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    auto cmp = [&](std::size_t a, std::size_t b) { return ranks_above(values[b], b, values[a], a); };
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), cmp);
    idx.resize(k);
    return idx;
}

std::size_t argmax(std::span<const double> values) {
    require(!values.empty(), ErrorKind::domain, "argmax of empty vector");
    std::size_t best = 0;
    for (std::size_t j = 1; j < values.size(); ++j)
        if (values[j] > values[best]) best = j;
    return best;
}

// ---------------------------------------------------------------------------

Matrix cholesky(const Matrix& a) {
    require(a.rows() == a.cols(), ErrorKind::domain, "cholesky: matrix not square");
    const std::size_t n = a.rows();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
        if (!(diag > 0.0) || !std::isfinite(diag))
            fail(ErrorKind::numeric, "degenerate unembedding: Gram matrix not positive definite at pivot " +
                                         std::to_string(j));
        const double ljj = std::sqrt(diag);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    return l;
}

namespace {

// Solves L Lᵀ x = b in place.
void cholesky_solve(const Matrix& l, std::span<double> b) {
    const std::size_t n = l.rows();
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * b[k];
        b[i] = s / l(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * b[k];
        b[i] = s / l(i, i);
    }
}

double normalize(std::span<double> v) {
    const double norm = std::sqrt(dot(v, v));
    for (double& x : v) x /= norm;
    return norm;
}

// Condition number of the SPD Gram matrix from power iteration (largest
// eigenvalue) and inverse iteration through the factor (smallest).
double estimate_condition(const Matrix& gram, const Matrix& l) {
    const std::size_t n = gram.rows();
    Vector v(n), w(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.01 * static_cast<double>(i % 7);
    normalize(v);
    double lambda_max = 0.0;
    for (int it = 0; it < 100; ++it) {
        w = matvec(gram, v);
        lambda_max = normalize(w);
        v.swap(w);
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 - 0.01 * static_cast<double>(i % 5);
    normalize(v);
    double inv_lambda_min = 0.0;
    for (int it = 0; it < 100; ++it) {
        w = v;
        cholesky_solve(l, w);
        inv_lambda_min = normalize(w);
        v.swap(w);
    }
    return lambda_max * inv_lambda_min;
}

}  // namespace

Matrix pseudoinverse(const Matrix& u, const PseudoinverseOptions& options) {
    const std::size_t rows = u.rows();
    const std::size_t d = u.cols();
    require(rows >= d, ErrorKind::domain,
            "pseudoinverse: expected a tall matrix, got " + std::to_string(rows) + "x" + std::to_string(d));
    require(all_finite(u.data()), ErrorKind::numeric, "pseudoinverse: non-finite input");

    Matrix gram(d, d);
    for (std::size_t r = 0; r < rows; ++r) {
        const auto ur = u.row(r);
        for (std::size_t i = 0; i < d; ++i) axpy(ur[i], ur, gram.row(i));
    }
    const Matrix l = cholesky(gram);
    const double cond = estimate_condition(gram, l);
    if (!(cond <= options.max_condition))
        fail(ErrorKind::numeric, "degenerate unembedding: condition estimate " + std::to_string(cond) +
                                     " exceeds " + std::to_string(options.max_condition));

    // Column r of U† solves (UᵀU) x = U[r, :]ᵀ.
    Matrix pinv(d, rows);
    Vector x(d);
    for (std::size_t r = 0; r < rows; ++r) {
        const auto ur = u.row(r);
        std::copy(ur.begin(), ur.end(), x.begin());
        cholesky_solve(l, x);
        for (std::size_t i = 0; i < d; ++i) pinv(i, r) = x[i];
    }
    return pinv;
}

}  // namespace revs
