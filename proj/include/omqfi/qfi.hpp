// qfi.hpp — Generator coefficients, the general quantum Fisher information,
// closed-form QFI expressions for the three worked examples, and the
// Cramer-Rao sensitivity bound.

#pragma once

#include <optional>

#include "omqfi/coupling.hpp"
#include "omqfi/fcoeffs.hpp"
#include "omqfi/mechanics.hpp"

namespace omqfi {

// Coefficients of the generator H_theta = A Na^2 + B Na + C+- B+- +
// C_{Na,+-} Na B+- + E Nb + F B2+ + G B2- + K, plus the auxiliary R factors.
// e and k never enter the QFI; they are carried for completeness.
struct QfiCoefficients {
    double a = 0.0;
    double b = 0.0;
    double c_plus = 0.0;
    double c_minus = 0.0;
    double c_na_plus = 0.0;
    double c_na_minus = 0.0;
    double e = 0.0;
    double f_big = 0.0;
    double g_big = 0.0;
    double k = 0.0;
    double r0 = 0.0;
    double r_plus = 0.0;
    double r_minus = 0.0;
};

struct QfiTerms {
    double a_block = 0.0;   // 4 (4|mu|^6 + 6|mu|^4 + |mu|^2) A^2
    double ab_cross = 0.0;  // 8 (2|mu|^4 + |mu|^2) A B
    double b_block = 0.0;   // 4 |mu|^2 B^2
    double c_block = 0.0;   // the two C sums
    double fg_block = 0.0;  // 16 cosh^2 / (cosh^2 + 1) (F^2 + G^2)
};

struct QfiResult {
    double value = 0.0;
    QfiTerms terms;
    Branch branch = Branch::General;
    bool resonance_branch_used = false;
};

// The tau * d(Omega_c)/d(theta) contribution to B is fixed to zero: frequency
// estimation is out of scope, so Omega_c never carries the parameter.
QfiCoefficients assemble_coefficients(const FCoefficients& f, const FDerivatives& df,
                                      const JTriple& j, double tau);

// Evaluates the general QFI expression from the assembled coefficients.
// Blocks are combined with compensated summation (|mu|^2 up to ~1e8).
QfiResult qfi_general(const QfiCoefficients& c, const ProbeState& probe);

// Full pipeline: quadrature F, closed-form theta-derivatives when available
// (finite differences otherwise), coefficient assembly, general QFI.
QfiResult qfi_pipeline(const CouplingSpec& spec, double tau, const ProbeState& probe);

// --- example (i): estimating parameters of G(tau) = g0 (1 + eps sin(wg tau))
QfiResult qfi_g0_general(double g0, double eps, double omega_g, double tau,
                         const ProbeState& probe);
QfiResult qfi_g0_res(double g0, double eps, double tau, const ProbeState& probe);
// Leading asymptotic form (tau >> 1, eps << 1, r_T = 0 regime).
QfiResult qfi_g0_res_asymptotic(double g0, double eps, double tau,
                                const ProbeState& probe);

// --- example (ii): estimating d1 in D1(tau) = d1 cos(w_d1 tau)
QfiResult qfi_d1_general(double g0, double d1, double omega_d1, double tau,
                         const ProbeState& probe);
QfiResult qfi_d1_const(double g0, double d1, double tau, const ProbeState& probe);
QfiResult qfi_d1_res(double g0, double d1, double tau, const ProbeState& probe);

// --- example (iii): estimating d2 (approximate forms, d2 << 1 regime)
QfiResult qfi_d2_const_app(double g0, double tau, const ProbeState& probe);
QfiResult qfi_d2_res_app(double g0, double tau, const ProbeState& probe);

// Single-shot standard-deviation bound 1/sqrt(M * qfi) over M measurements.
// Returns nullopt when qfi == 0 (unbounded variance).
std::optional<double> cramer_rao(double qfi, long measurements);

}  // namespace omqfi
