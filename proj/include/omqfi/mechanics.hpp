// mechanics.hpp — Mechanical-subsystem dynamics: the P11 / I_P22 oscillator
// equations, Bogoliubov coefficients, squeezing decomposition (J functions),
// and the squeezing composition algebra.

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "omqfi/coupling.hpp"

namespace omqfi {

struct JTriple {
    double plus = 0.0;
    double minus = 0.0;
    double b = 0.0;
};

// Solution of the mechanical equations on a uniform grid starting at tau = 0,
// together with the decoupling-function integrals accumulated alongside
// (augmented state, see solve_mechanics).
struct MechanicsSolution {
    CouplingSpec spec;

    std::vector<double> grid;
    std::vector<double> p11, p11_dot, ip22, ip22_dot;
    std::vector<std::complex<double>> xi, alpha, beta;
    std::vector<double> j_plus, j_minus, j_b;  // from extract_J, J_b unwrapped

    // Decoupling-function integrals on the grid (read through fcoeffs).
    std::vector<double> f_na, f_na2, f_bp, f_bm, f_nabp, f_nabm;

    // Taus where 1 + 4 D2(tau) changed sign (integration continues; the
    // P-form equations are regular there).
    std::vector<double> turning_points;

    double rel_tol = 1e-10;

    double tau_max() const { return grid.back(); }
    // Largest index k with grid[k] <= tau (+ small slack for roundoff).
    std::size_t index_at_or_below(double tau) const;
};

// Integrates the augmented system {P11, I_P22, F integrals} over [0, tau_max]
// with relative tolerance tol (absolute tolerance tol * 1e-2), sampling on a
// uniform grid dtau = min(0.01, 2*pi / (50 * Omega_max)).
// Throws IntegratorError on step underflow.
MechanicsSolution solve_mechanics(const CouplingSpec& spec, double tau_max,
                                  double tol = 1e-10);

// Augmented state {P11, dP11, I_P22, dI_P22, F_Na, F_Na2, F_B+, F_B-, F_NaB+,
// F_NaB-} at an arbitrary tau within the solution range, obtained by
// restarting the integrator from the nearest grid node below tau.
std::array<double, 10> augmented_state_at(const MechanicsSolution& sol, double tau);

// J triple at an arbitrary tau, branch-matched to the unwrapped grid values.
JTriple j_at(const MechanicsSolution& sol, double tau);

// Squeeze-rotation decomposition of a Bogoliubov pair. Requires
// | |alpha|^2 - |beta|^2 - 1 | <= 1e-6. Returns the canonical branch with
// J+ >= 0, J- >= 0 and J_b in (-pi/2, pi/2].
JTriple extract_J(std::complex<double> alpha, std::complex<double> beta);

// Elementwise reconstruction of (alpha, beta) from a J triple.
std::pair<std::complex<double>, std::complex<double>> bogoliubov_from_J(const JTriple& j);

struct JSolution {
    std::vector<double> grid;
    std::vector<double> j_plus, j_minus, j_b;
};

// Direct integration of the first-order J equations with J(0) = 0.
JSolution solve_J_odes(const CouplingSpec& spec, double tau_max, double tol = 1e-10);

// Closed-form approximate xi at parametric resonance (Omega_d2 = 2),
// valid for d2 << 1, tau >> 1.
std::complex<double> rwa_xi(double d2, double tau);

struct SqueezeParams {
    double r = 0.0;      // magnitude, >= 0
    double theta = 0.0;  // phase in (-pi, pi]
};

struct ComposedSqueeze {
    double rotation = 0.0;  // angle a with S(z1) S(z2) = S_R(a) S_sq(r3, theta3)
    SqueezeParams s;
};

ComposedSqueeze squeeze_compose(const SqueezeParams& s1, const SqueezeParams& s2);

struct CompactSqueeze {
    double phi = 0.0;                   // extra rotation angle
    std::complex<double> zeta{0.0, 0.0};  // |zeta| < 1
};

// Single rotation + single squeeze equivalent (up to global phase) of the
// two-squeeze product exp(-i J+ B+^(2)) exp(-i J- B-^(2)).
CompactSqueeze compact_squeeze_params(double j_plus, double j_minus);

// 2x2 symplectic representations (test and reconstruction helpers).
using Mat2c = std::array<std::complex<double>, 4>;  // row-major {m00, m01, m10, m11}
Mat2c squeeze_matrix(const SqueezeParams& s);
Mat2c rotation_matrix(double a);
Mat2c mat2_mul(const Mat2c& x, const Mat2c& y);

}  // namespace omqfi
