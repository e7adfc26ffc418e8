#include "ppacdc/linalg.hpp"

#include <cmath>
#include <limits>

namespace ppacdc {

std::vector<double> Matrix::apply(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != cols_)
        throw std::invalid_argument("Matrix::apply: dimension mismatch");
    std::vector<double> y(rows_, 0.0);
    for (int r = 0; r < rows_; ++r) {
        double acc = 0.0;
        for (int c = 0; c < cols_; ++c) acc += (*this)(r, c) * x[c];
        y[r] = acc;
    }
    return y;
}

Matrix Matrix::operator+(const Matrix& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_)
        throw std::invalid_argument("Matrix::operator+: shape mismatch");
    Matrix out(rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] + other.data_[i];
    return out;
}

Matrix Matrix::operator-(const Matrix& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_)
        throw std::invalid_argument("Matrix::operator-: shape mismatch");
    Matrix out(rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] - other.data_[i];
    return out;
}

namespace {

double sign_like(double magnitude, double sign_of) {
    return sign_of >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude);
}

// Householder similarity reduction to upper Hessenberg form, in place.
// Entries below the first subdiagonal are zeroed explicitly afterwards.
void hessenberg_reduce(Matrix& a) {
    const int n = a.rows();
    std::vector<double> ort(n, 0.0);
    for (int m = 1; m <= n - 2; ++m) {
        double scale = 0.0;
        for (int i = m; i < n; ++i) scale += std::abs(a(i, m - 1));
        if (scale == 0.0) continue;

        double h = 0.0;
        for (int i = n - 1; i >= m; --i) {
            ort[i] = a(i, m - 1) / scale;
            h += ort[i] * ort[i];
        }
        double g = -sign_like(std::sqrt(h), ort[m]);
        h -= ort[m] * g;
        ort[m] -= g;

        // apply (I - u u^T / h) from the left ...
        for (int j = m; j < n; ++j) {
            double f = 0.0;
            for (int i = n - 1; i >= m; --i) f += ort[i] * a(i, j);
            f /= h;
            for (int i = m; i < n; ++i) a(i, j) -= f * ort[i];
        }
        // ... and from the right
        for (int i = 0; i < n; ++i) {
            double f = 0.0;
            for (int j = n - 1; j >= m; --j) f += ort[j] * a(i, j);
            f /= h;
            for (int j = m; j < n; ++j) a(i, j) -= f * ort[j];
        }
        a(m, m - 1) = scale * g;
    }
    for (int i = 2; i < n; ++i)
        for (int j = 0; j < i - 1; ++j) a(i, j) = 0.0;
}

}  // namespace

// Francis double-shift QR on an upper Hessenberg matrix (the classic
// EISPACK hqr scheme), eigenvalues only.
EigenvalueResult eigenvalues(Matrix a, int max_sweeps) {
    if (a.rows() != a.cols()) throw std::invalid_argument("eigenvalues: matrix not square");
    const int n = a.rows();
    EigenvalueResult result;
    result.values.assign(n, {0.0, 0.0});
    if (n == 0) return result;
    if (n == 1) {
        result.values[0] = {a(0, 0), 0.0};
        return result;
    }

    hessenberg_reduce(a);

    const double eps = std::numeric_limits<double>::epsilon();
    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));

    int nn = n - 1;
    double t = 0.0;
    int total_sweeps = 0;
    while (nn >= 0) {
        int its = 0;
        int l;
        do {
            for (l = nn; l >= 1; --l) {
                double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(a(l, l - 1)) <= eps * s) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            double x = a(nn, nn);
            if (l == nn) {  // one real eigenvalue isolated
                result.values[nn] = {x + t, 0.0};
                --nn;
            } else {
                double y = a(nn - 1, nn - 1);
                double w = a(nn, nn - 1) * a(nn - 1, nn);
                if (l == nn - 1) {  // a 2x2 block isolated
                    double p = 0.5 * (y - x);
                    double q = p * p + w;
                    double z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {  // real pair
                        z = p + sign_like(z, p);
                        double r1 = x + z;
                        double r2 = (z != 0.0) ? x - w / z : x + z;
                        result.values[nn - 1] = {r1, 0.0};
                        result.values[nn] = {r2, 0.0};
                    } else {  // complex conjugate pair
                        result.values[nn - 1] = {x + p, z};
                        result.values[nn] = {x + p, -z};
                    }
                    nn -= 2;
                } else {  // no luck yet, do a double QR sweep
                    if (its == 30 || total_sweeps >= max_sweeps) throw EigenFailure(total_sweeps);
                    if (its == 10 || its == 20) {  // exceptional shift
                        t += x;
                        for (int i = 0; i <= nn; ++i) a(i, i) -= x;
                        double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    ++total_sweeps;

                    double p = 0.0, q = 0.0, r = 0.0;
                    int m;
                    for (m = nn - 2; m >= l; --m) {
                        double z = a(m, m);
                        double rr = x - z;
                        double ss = y - z;
                        p = (rr * ss - w) / a(m + 1, m) + a(m, m + 1);
                        q = a(m + 1, m + 1) - z - rr - ss;
                        r = a(m + 2, m + 1);
                        double s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
                        const double v =
                            std::abs(p) *
                            (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
                        if (u <= eps * v) break;
                    }
                    for (int i = m + 2; i <= nn; ++i) {
                        a(i, i - 2) = 0.0;
                        if (i != m + 2) a(i, i - 3) = 0.0;
                    }
                    for (int k = m; k <= nn - 1; ++k) {
                        if (k != m) {
                            p = a(k, k - 1);
                            q = a(k + 1, k - 1);
                            r = (k + 1 != nn) ? a(k + 2, k - 1) : 0.0;
                            x = std::abs(p) + std::abs(q) + std::abs(r);
                            if (x != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        double s = sign_like(std::sqrt(p * p + q * q + r * r), p);
                        if (s == 0.0) continue;
                        if (k == m) {
                            if (l != m) a(k, k - 1) = -a(k, k - 1);
                        } else {
                            a(k, k - 1) = -s * x;
                        }
                        p += s;
                        x = p / s;
                        double yy = q / s;
                        double zz = r / s;
                        q /= p;
                        r /= p;
                        for (int j = k; j <= nn; ++j) {  // row modification
                            double pp = a(k, j) + q * a(k + 1, j);
                            if (k + 1 != nn) pp += r * a(k + 2, j);
                            a(k, j) -= pp * x;
                            a(k + 1, j) -= pp * yy;
                            if (k + 1 != nn) a(k + 2, j) -= pp * zz;
                        }
                        const int mmin = (nn < k + 3) ? nn : k + 3;
                        for (int i = l; i <= mmin; ++i) {  // column modification
                            double pp = x * a(i, k) + yy * a(i, k + 1);
                            if (k + 1 != nn) pp += zz * a(i, k + 2);
                            a(i, k) -= pp;
                            a(i, k + 1) -= pp * q;
                            if (k + 1 != nn) a(i, k + 2) -= pp * r;
                        }
                    }
                }
            }
        } while (nn >= 0 && l < nn - 1);
    }
    result.sweeps = total_sweeps;
    return result;
}

}  // namespace ppacdc
