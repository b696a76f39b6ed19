#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace evsparse {

// Input failed a shape, schema or finiteness check.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A numeric guard tripped (exponent range, total conflict, lost normalization).
class NumericalGuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Dense row-major matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<const double> values() const { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Dense categorical distribution over K classes.
struct Distribution {
    std::vector<double> probs;

    std::size_t num_classes() const { return probs.size(); }
};

// Distribution restricted to a support set; entries outside the support are zero.
struct SparseDistribution {
    std::size_t num_classes = 0;
    std::vector<std::size_t> support;  // strictly increasing
    std::vector<double> probs;         // aligned with support, all > 0
    bool vacuous_fallback = false;

    std::vector<double> dense() const;
};

inline std::vector<double> SparseDistribution::dense() const {
    std::vector<double> out(num_classes, 0.0);
    for (std::size_t i = 0; i < support.size(); ++i) out[support[i]] = probs[i];
    return out;
}

}  // namespace evsparse
