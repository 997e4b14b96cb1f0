// coupling.hpp — Time-dependent Hamiltonian coefficients, estimation-parameter
// binding, probe state, and physical-unit conversions.

#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>

namespace omqfi {

// SI 2019 exact values.
inline constexpr double hbar = 1.054571817e-34;  // J s
inline constexpr double k_B  = 1.380649e-23;     // J/K

// Functional form of the dimensionless optomechanical coupling G(tau).
enum class GForm {
    Constant,       // G(tau) = g0
    SineModulated,  // G(tau) = g0 (1 + epsilon sin(omega_g tau))
};

// Functional form of a drive coefficient D1(tau) or D2(tau).
enum class DriveForm {
    Zero,
    Constant,      // D(tau) = d
    CosModulated,  // D(tau) = d cos(omega tau)
};

// Which scalar of the coupling spec is the estimation parameter.
enum class Theta { G0, Epsilon, OmegaG, D1, OmegaD1, D2, OmegaD2 };

struct CouplingSpec {
    GForm g_form = GForm::Constant;
    double g0 = 0.0;
    double epsilon = 0.0;
    double omega_g = 0.0;

    DriveForm d1_form = DriveForm::Zero;
    double d1 = 0.0;
    double omega_d1 = 0.0;

    DriveForm d2_form = DriveForm::Zero;
    double d2 = 0.0;
    double omega_d2 = 0.0;

    Theta theta = Theta::G0;

    // Throws std::invalid_argument on non-finite amplitudes or negative frequencies.
    void validate() const;
};

double eval_G(const CouplingSpec& spec, double tau);
double eval_D1(const CouplingSpec& spec, double tau);
double eval_D2(const CouplingSpec& spec, double tau);

// Read/replace the scalar bound to spec.theta (used for finite differencing
// and for the oracle's theta override).
double theta_value(const CouplingSpec& spec);
CouplingSpec with_theta_value(CouplingSpec spec, double value);

std::string theta_name(Theta theta);

// Initial probe: cavity coherent state, mechanical thermal state.
struct ProbeState {
    std::complex<double> mu_c{0.0, 0.0};
    double r_T = 0.0;  // >= 0; 0 means mechanical vacuum

    double mu2() const { return std::norm(mu_c); }
    void validate() const;
};

struct PhysicalUnits {
    double omega_m = 0.0;                    // rad/s, > 0
    std::optional<double> mass;              // kg
    std::optional<double> temperature;       // K

    void validate() const;
};

// r_T = atanh(exp(-hbar omega_m / (2 k_B T))); T = 0 returns 0 (vacuum limit).
double r_T_from_temperature(double temperature, double omega_m);

// Chain rule for restoring dimensions: (dtheta_tilde/dtheta_phys)^2 * QFI.
double dimensionful_rescale(double qfi_dimensionless, double dtheta_dphys);

}  // namespace omqfi
