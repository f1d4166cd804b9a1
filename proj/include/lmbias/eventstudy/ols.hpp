#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lmbias/error.hpp"

namespace lmbias::eventstudy {

// Dense column-major matrix; columns are contiguous so the QR sweeps run on
// the vector kernels.
class DesignMatrix {
public:
    DesignMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& operator()(std::size_t r, std::size_t c) { return data_[c * rows_ + r]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[c * rows_ + r]; }
    std::span<double> column(std::size_t c) { return {data_.data() + c * rows_, rows_}; }
    std::span<const double> column(std::size_t c) const { return {data_.data() + c * rows_, rows_}; }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

class RankDeficientError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

struct OlsResult {
    std::vector<double> coefficients;
    std::vector<double> residuals;
    double ssr = 0.0;
    double residual_variance = 0.0;  // ssr / (n - p)
};

// Least squares by Householder QR. A column whose remaining norm after
// elimination falls below rank_tolerance times its original norm makes the
// problem rank deficient.
OlsResult least_squares(const DesignMatrix& x, std::span<const double> y, double rank_tolerance = 1e-10);

}  // namespace lmbias::eventstudy
