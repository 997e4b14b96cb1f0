// oracle.hpp — Brute-force verification on a truncated two-mode Fock space:
// time-ordered evolution by midpoint exponentials with step halving, the
// generator H_theta by central finite differences of the propagator, and the
// mixed-state QFI evaluated directly from its definition.

#pragma once

#include <Eigen/Dense>
#include <optional>

#include "omqfi/coupling.hpp"

namespace omqfi {

// Ladder operators and the nine Lie-algebra generators on the truncated
// two-mode space. Full-space index convention: |n_a, n_m> -> n_a * n_mech + n_m.
struct TruncatedSpace {
    int n_cav = 0;
    int n_mech = 0;

    // single-mode pieces
    Eigen::MatrixXd b;       // mechanical annihilation, <n-1|b|n> = sqrt(n)
    Eigen::MatrixXd a;       // cavity annihilation
    Eigen::MatrixXd nb;      // b^dag b
    Eigen::MatrixXd bp;      // b^dag + b
    Eigen::MatrixXd bp2;     // b^dag^2 + b^2
    Eigen::MatrixXcd bm;     // i (b^dag - b)
    Eigen::MatrixXcd bm2;    // i (b^dag^2 - b^2)

    // full-space generators
    Eigen::MatrixXcd N_a, N_a2, N_b, B_plus, B_minus, B2_plus, B2_minus;
    Eigen::MatrixXcd NaB_plus, NaB_minus;

    int dim() const { return n_cav * n_mech; }
};

TruncatedSpace build_space(int n_cav, int n_mech);

struct OracleConfig {
    double dt_init = 0.05;        // initial midpoint step
    double convergence = 1e-6;    // max-norm target between successive halvings
    int max_halvings = 14;
    double omega_c = 0.0;         // dimensionless cavity frequency
    bool block_fast_path = true;  // exploit [H, N_a] = 0 (exact for this family)
    int edge_margin = 2;          // levels treated as truncation edge in diagnostics
    // Maximum thermally weighted probe mass tolerated on the top mechanical
    // levels. Edge mass is a conservative proxy for norm loss: the truncated
    // evolution is exactly unitary, so what signals a too-small space is
    // population reaching the edge rows, whose dynamics lack the upward
    // couplings.
    double leak_tol = 1e-6;
};

// H / (hbar omega_m) on the truncated space; theta_override substitutes the
// value of the spec's tagged parameter.
Eigen::MatrixXcd hamiltonian_matrix(const TruncatedSpace& space, const CouplingSpec& spec,
                                    double tau, std::optional<double> theta_override = {},
                                    double omega_c = 0.0);

// Time-ordered propagator over [0, tau_final]: product of per-step exponentials
// of the midpoint-evaluated Hamiltonian, with the step count doubled until two
// successive results differ by less than cfg.convergence in max norm.
// Throws ConvergenceError if max_halvings is exhausted.
Eigen::MatrixXcd evolve(const TruncatedSpace& space, const CouplingSpec& spec,
                        double tau_final, const OracleConfig& cfg = {},
                        std::optional<double> theta_override = {});

// As evolve, but always through the dense full-space path (test reference).
Eigen::MatrixXcd evolve_dense(const TruncatedSpace& space, const CouplingSpec& spec,
                              double tau_final, const OracleConfig& cfg = {},
                              std::optional<double> theta_override = {});

// QFI for the spec's tagged parameter at time tau, from the definition:
// H_theta = -i U^dag dU/dtheta with a Richardson-refined central difference
// (step h_fd, or 1e-5 * max(1, |theta|) when h_fd <= 0), thermal sums cut
// where the weight drops below 1e-12.
// Throws TruncationError when the coherent-state norm defect exceeds 1e-8,
// when the thermal tail does not fit the mechanical truncation, or when the
// evolved probe leaks more than cfg.leak_tol onto the mechanical edge levels.
double qfi_oracle(const TruncatedSpace& space, const CouplingSpec& spec,
                  const ProbeState& probe, double tau, double h_fd = 0.0,
                  const OracleConfig& cfg = {});

// Coherent-state amplitude vector on the cavity truncation (test helper).
Eigen::VectorXcd coherent_vector(int n_cav, std::complex<double> mu);

}  // namespace omqfi
