#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "revs/error.hpp"

namespace revs {

using TokenId = std::int32_t;
using Vector = std::vector<double>;

/// 1-based position of a token in a descending ordering of logits.
/// Rank 1 is the most likely token.
using Rank = std::size_t;

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    Vector column(std::size_t c) const;
    void set_column(std::size_t c, std::span<const double> values);

    Matrix transposed() const;

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Products

/// y = M x
Vector matvec(const Matrix& m, std::span<const double> x);
/// y = Mᵀ x
Vector matvec_transposed(const Matrix& m, std::span<const double> x);
/// C = A B
Matrix matmul(const Matrix& a, const Matrix& b);

double dot(std::span<const double> a, std::span<const double> b);
/// y += alpha x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

double max_abs_diff(const Matrix& a, const Matrix& b);
bool all_finite(std::span<const double> values);

// ---------------------------------------------------------------------------
// Ranks. Ties are always broken by ascending token id.

Rank rank_of_token(std::span<const double> logits, TokenId token);
Rank rank_from_bottom(std::span<const double> logits, TokenId token);

/// Indices of the k largest entries, descending by value, ties by ascending index.
std::vector<std::size_t> top_k_indices(std::span<const double> values, std::size_t k);
/// Indices of the k smallest entries in bottom-rank order (the inverse
/// of the top ordering): ascending by value, ties by descending index.
std::vector<std::size_t> bottom_k_indices(std::span<const double> values, std::size_t k);

/// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> values);

// ---------------------------------------------------------------------------
// Pseudoinverse

struct PseudoinverseOptions {
    /// Rejects UᵀU whose estimated condition number exceeds this.
    double max_condition = 1e12;
};

/// Moore-Penrose pseudoinverse of a tall full-column-rank matrix,
/// U† = (UᵀU)⁻¹Uᵀ, through a Cholesky factorization of the Gram matrix.
Matrix pseudoinverse(const Matrix& u, const PseudoinverseOptions& options = {});

/// Lower-triangular L with LLᵀ = A. Throws numeric error if A is not
/// numerically positive definite.
Matrix cholesky(const Matrix& a);

}  // namespace revs
