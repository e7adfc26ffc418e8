#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

namespace ppacdc {

// Dense row-major matrix. Desk scale only; the analysis module never builds
// anything bigger than 2n x 2n for n <= ~100.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("Matrix: negative dimension");
    }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    double operator()(int r, int c) const {
        return data_[static_cast<std::size_t>(r) * cols_ + c];
    }

    // y = A x, accumulated left to right in column order.
    std::vector<double> apply(std::span<const double> x) const;

    Matrix operator+(const Matrix& other) const;
    Matrix operator-(const Matrix& other) const;

private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

// QR iteration exceeded its sweep budget; carries how far it got.
struct EigenFailure : std::runtime_error {
    explicit EigenFailure(int sweeps_done)
        : std::runtime_error("eigenvalue QR iteration did not converge within sweep cap"),
          sweeps(sweeps_done) {}
    int sweeps;
};

struct EigenvalueResult {
    std::vector<std::complex<double>> values;
    int sweeps = 0;  // total double-shift QR sweeps spent
};

// All eigenvalues of a real square matrix: Householder reduction to upper
// Hessenberg form followed by Francis double-shift QR iteration,
// eigenvalues only. Throws EigenFailure past max_sweeps.
EigenvalueResult eigenvalues(Matrix a, int max_sweeps = 500);

}  // namespace ppacdc
