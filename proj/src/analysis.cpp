#include "ppacdc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ppacdc/sim.hpp"

namespace ppacdc {

Matrix pull_matrix(const Digraph& g) {
    const int n = g.node_count();
    Matrix r(n, n);
    for (NodeId j = 0; j < n; ++j) {
        r(j, j) = pull_weight(g, j, j);
        for (NodeId i : g.in_neighbors(j)) r(j, i) = pull_weight(g, j, i);
    }
    return r;
}

Matrix push_matrix(const Digraph& g) {
    const int n = g.node_count();
    Matrix c(n, n);
    for (NodeId j = 0; j < n; ++j) {
        c(j, j) = push_weight(g, j, j);
        for (NodeId l : g.out_neighbors(j)) c(l, j) = push_weight(g, l, j);
    }
    return c;
}

AugmentedSystem build_augmented(const Digraph& g, double gamma) {
    // gamma = 0 is allowed here (zero gamma block) so the structure can be
    // probed; the protocol and the CLI enforce gamma > 0.
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw std::invalid_argument("build_augmented: gamma must be nonnegative");
    if (!is_strongly_connected(g))
        throw std::invalid_argument("build_augmented: graph must be strongly connected");
    const int n = g.node_count();
    const Matrix r = pull_matrix(g);
    const Matrix c = push_matrix(g);

    AugmentedSystem sys;
    sys.n = n;
    sys.gamma_block = Matrix(2 * n, 2 * n);
    sys.pi_block = Matrix(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        sys.gamma_block(i, n + i) = gamma;
        sys.gamma_block(n + i, n + i) = -gamma;
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            sys.pi_block(i, j) = r(i, j);
            sys.pi_block(n + i, j) = (i == j ? 1.0 : 0.0) - r(i, j);
            sys.pi_block(n + i, n + j) = c(i, j);
        }
    }
    sys.system = sys.gamma_block + sys.pi_block;
    return sys;
}

std::vector<double> lti_step(const AugmentedSystem& sys, std::span<const double> z,
                             std::span<const double> e) {
    const int dim = 2 * sys.n;
    if (static_cast<int>(z.size()) != dim || static_cast<int>(e.size()) != dim)
        throw std::invalid_argument("lti_step: expected stacked vectors of length 2n");
    std::vector<double> out(dim, 0.0);
    for (int i = 0; i < dim; ++i) {
        double acc = 0.0;
        for (int j = 0; j < dim; ++j) acc += sys.system(i, j) * z[j];
        for (int j = 0; j < dim; ++j)
            acc += (sys.pi_block(i, j) - (i == j ? 1.0 : 0.0)) * e[j];
        out[i] = acc;
    }
    return out;
}

SpectralReport spectral_check(const AugmentedSystem& sys, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("spectral_check: tol must be positive");
    const EigenvalueResult eig = eigenvalues(sys.system);

    SpectralReport rep;
    rep.sweeps = eig.sweeps;

    // dominant = largest modulus, ties broken toward 1
    std::size_t dom = 0;
    for (std::size_t i = 1; i < eig.values.size(); ++i) {
        const double mi = std::abs(eig.values[i]);
        const double md = std::abs(eig.values[dom]);
        if (mi > md || (mi == md && std::abs(eig.values[i] - 1.0) <
                                        std::abs(eig.values[dom] - 1.0)))
            dom = i;
    }
    rep.dominant = eig.values[dom];

    int near_one = 0;
    bool rest_inside = true;
    rep.second_modulus = 0.0;
    for (std::size_t i = 0; i < eig.values.size(); ++i) {
        if (std::abs(eig.values[i] - 1.0) <= tol) {
            ++near_one;
            continue;
        }
        rep.second_modulus = std::max(rep.second_modulus, std::abs(eig.values[i]));
        if (std::abs(eig.values[i]) > 1.0 - tol) rest_inside = false;
    }
    // A repeated unit eigenvalue is a failure: convergence needs the unit
    // eigenvalue simple and everything else strictly inside the circle.
    rep.passes = (near_one == 1) && rest_inside;
    if (near_one != 1) {
        rep.second_modulus = 0.0;
        for (std::size_t i = 0; i < eig.values.size(); ++i)
            if (i != dom) rep.second_modulus = std::max(rep.second_modulus,
                                                        std::abs(eig.values[i]));
    }
    return rep;
}

std::vector<ReferencePoint> reference_run(const Digraph& g, std::span<const double> x0,
                                          double gamma, int iters) {
    if (static_cast<int>(x0.size()) != g.node_count())
        throw std::invalid_argument("reference_run: x0 length must match node count");
    if (iters < 0) throw std::invalid_argument("reference_run: iters must be >= 0");
    const AugmentedSystem sys = build_augmented(g, gamma);
    const int n = sys.n;

    std::vector<double> z(2 * n, 0.0);
    std::copy(x0.begin(), x0.end(), z.begin());
    const std::vector<double> zero(2 * n, 0.0);

    std::vector<ReferencePoint> out;
    out.reserve(iters + 1);
    auto snapshot = [&] {
        ReferencePoint p;
        p.x.assign(z.begin(), z.begin() + n);
        p.s.assign(z.begin() + n, z.end());
        out.push_back(std::move(p));
    };
    snapshot();
    for (int k = 0; k < iters; ++k) {
        z = lti_step(sys, z, zero);
        snapshot();
    }
    return out;
}

std::vector<std::vector<double>> error_trace(std::span<const TraceRecord> trace) {
    std::vector<std::vector<double>> out;
    out.reserve(trace.size());
    for (const TraceRecord& rec : trace) {
        const std::size_t n = rec.x.size();
        if (rec.x_hat.size() != n || rec.s.size() != n || rec.s_hat.size() != n)
            throw std::invalid_argument("error_trace: record lacks quantized values");
        std::vector<double> e(2 * n);
        for (std::size_t j = 0; j < n; ++j) {
            e[j] = rec.x_hat[j] - rec.x[j];
            e[n + j] = rec.s_hat[j] - rec.s[j];
        }
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace ppacdc
