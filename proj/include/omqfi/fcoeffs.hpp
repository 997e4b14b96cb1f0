// fcoeffs.hpp — The six decoupling functions F: quadrature evaluation for any
// coupling spec, closed-form expressions for the three worked examples, and
// their derivatives with respect to the estimation parameter.

#pragma once

#include "omqfi/coupling.hpp"
#include "omqfi/mechanics.hpp"

namespace omqfi {

struct FCoefficients {
    double f_na = 0.0;
    double f_na2 = 0.0;
    double f_bp = 0.0;
    double f_bm = 0.0;
    double f_nabp = 0.0;
    double f_nabm = 0.0;
};

// d/dtheta of the F functions plus d/dtheta of the J functions.
struct FDerivatives {
    double f_na = 0.0;
    double f_na2 = 0.0;
    double f_bp = 0.0;
    double f_bm = 0.0;
    double f_nabp = 0.0;
    double f_nabm = 0.0;
    double dj_plus = 0.0;
    double dj_minus = 0.0;
    double dj_b = 0.0;
};

enum class Branch { General, Resonant, Constant, Approximate };

struct ClosedFormF {
    FCoefficients f;
    JTriple j;      // for examples (i), (ii): {plus = 0, minus = 0, b = tau}
    Branch branch = Branch::General;
    // true when the resonance-limit branch was used because the frequency fell
    // inside the switch window without being exactly resonant
    bool resonance_branch_used = false;
};

// Frequency window below which the closed forms dispatch to the resonance /
// zero-frequency limit expressions. General expressions lose accuracy to
// cancellation inside this window.
inline constexpr double resonance_switch = 1e-6;

// Quadrature values at tau, read from the augmented mechanics solution.
// Throws std::out_of_range when tau exceeds the solution range.
FCoefficients compute_F(const CouplingSpec& spec, const MechanicsSolution& mech,
                        double tau);

// Example (i): G(tau) = g0 (1 + eps sin(omega_g tau)), D1 = D2 = 0.
// omega_g inside the switch window around 1 uses the resonance list;
// omega_g = 0 is rejected (use the constant form instead).
ClosedFormF closed_form_F_example_i(double g0, double eps, double omega_g, double tau);

// Example (ii): G = g0, D1(tau) = d1 cos(omega_d1 tau), D2 = 0.
// omega_d1 near 1 dispatches to the resonance list; omega_d1 near 0 to the
// constant-drive limit (the general expressions are regular there but cancel).
ClosedFormF closed_form_F_example_ii(double g0, double d1, double omega_d1, double tau);

enum class D2Mode { Constant, Resonant };

// Example (iii): G = g0, D1 = 0, D2 constant or modulated at parametric
// resonance (omega_d2 = 2); approximate forms valid for d2 << 1 and tau >> 1.
// d2 >= 0.2 is rejected; d2 > 0.05 sets the validity warning flag.
struct ClosedFormFIii {
    FCoefficients f;
    JTriple j;
    bool validity_warning = false;
};
ClosedFormFIii closed_form_F_example_iii(double g0, double d2, D2Mode mode, double tau);

enum class DerivativeMethod { ClosedForm, FiniteDiff };

// Thrown when no analytically differentiated expression exists for the
// requested (form, theta) pair; callers fall back to FiniteDiff.
class UnsupportedDerivative : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// d/dtheta of F and J at tau for the parameter tagged in spec.
// ClosedForm handles:  example (i) with theta in {g0, epsilon},
//                      example (ii) with theta = d1,
//                      example (iii) specs with theta = d2 (approximate forms).
// FiniteDiff central-differences the full quadrature pipeline with step
// h = fd_step (or 1e-6 * max(1, |theta|) when fd_step <= 0) and one Richardson
// refinement.
FDerivatives derivatives_wrt_theta(const CouplingSpec& spec, double tau,
                                   DerivativeMethod method, double fd_step = 0.0);

// F evaluated at tau together with the J triple, everything from the
// quadrature pipeline (example-independent path used by the exact QFI).
struct PipelineF {
    FCoefficients f;
    JTriple j;
};
PipelineF pipeline_F(const CouplingSpec& spec, double tau, double tol = 1e-10);

}  // namespace omqfi
