#pragma once

#include <complex>
#include <span>
#include <vector>

#include "ppacdc/graph.hpp"
#include "ppacdc/linalg.hpp"

namespace ppacdc {

struct TraceRecord;  // sim.hpp

// Dense pull matrix R (row-stochastic) and push matrix C (column-stochastic)
// induced by the degree weights. Only the analysis side ever materializes
// these; agents stay degree-local.
Matrix pull_matrix(const Digraph& g);
Matrix push_matrix(const Digraph& g);

// Stacked (x, s) dynamics z_{k+1} = (gamma_block + pi_block) z_k
// + (pi_block - I) e_k, with
//   gamma_block = [ 0   gamma*I ]      pi_block = [ R     0 ]
//                 [ 0  -gamma*I ]                 [ I-R   C ].
struct AugmentedSystem {
    int n = 0;  // agent count; matrices are 2n x 2n
    Matrix gamma_block;
    Matrix pi_block;
    Matrix system;  // gamma_block + pi_block
};

AugmentedSystem build_augmented(const Digraph& g, double gamma);

// One step of the augmented iteration with error input e.
std::vector<double> lti_step(const AugmentedSystem& sys, std::span<const double> z,
                             std::span<const double> e);

struct SpectralReport {
    std::complex<double> dominant;  // largest-modulus eigenvalue (ties: nearest 1)
    double second_modulus = 0.0;    // largest modulus among the rest
    bool passes = false;            // exactly one eigenvalue at 1, rest strictly inside
    int sweeps = 0;                 // QR sweeps spent
};

// Checks the convergence structure: passes iff exactly one eigenvalue lies
// within tol of 1 and every other one has modulus <= 1 - tol. A repeated
// unit eigenvalue fails. Propagates EigenFailure if QR stalls.
SpectralReport spectral_check(const AugmentedSystem& sys, double tol = 1e-9);

struct ReferencePoint {
    std::vector<double> x;
    std::vector<double> s;
};

// The unquantized surplus-consensus baseline: repeated lti_step with e = 0,
// starting from (x0, 0). Returns the trajectory including the initial point.
std::vector<ReferencePoint> reference_run(const Digraph& g, std::span<const double> x0,
                                          double gamma, int iters);

// Per-round quantization error e_k = (x_hat - x, s_hat - s) read off a
// simulation trace (each record carries both raw and quantized values).
std::vector<std::vector<double>> error_trace(std::span<const TraceRecord> trace);

}  // namespace ppacdc
