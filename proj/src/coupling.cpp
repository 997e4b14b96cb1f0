#include "omqfi/coupling.hpp"

#include <cmath>

namespace omqfi {

namespace {

void require_finite(double x, const char* name) {
    if (!std::isfinite(x)) {
        throw std::invalid_argument(std::string("coupling: non-finite ") + name);
    }
}

void require_nonneg(double x, const char* name) {
    require_finite(x, name);
    if (x < 0.0) {
        throw std::invalid_argument(std::string("coupling: negative ") + name);
    }
}

}  // namespace

void CouplingSpec::validate() const {
    require_finite(g0, "g0");
    require_finite(epsilon, "epsilon");
    require_finite(d1, "d1");
    require_finite(d2, "d2");
    require_nonneg(omega_g, "omega_g");
    require_nonneg(omega_d1, "omega_d1");
    require_nonneg(omega_d2, "omega_d2");
}

double eval_G(const CouplingSpec& spec, double tau) {
    switch (spec.g_form) {
        case GForm::Constant:
            return spec.g0;
        case GForm::SineModulated:
            return spec.g0 * (1.0 + spec.epsilon * std::sin(spec.omega_g * tau));
    }
    return 0.0;
}

double eval_D1(const CouplingSpec& spec, double tau) {
    switch (spec.d1_form) {
        case DriveForm::Zero:
            return 0.0;
        case DriveForm::Constant:
            return spec.d1;
        case DriveForm::CosModulated:
            return spec.d1 * std::cos(spec.omega_d1 * tau);
    }
    return 0.0;
}

double eval_D2(const CouplingSpec& spec, double tau) {
    switch (spec.d2_form) {
        case DriveForm::Zero:
            return 0.0;
        case DriveForm::Constant:
            return spec.d2;
        case DriveForm::CosModulated:
            return spec.d2 * std::cos(spec.omega_d2 * tau);
    }
    return 0.0;
}

double theta_value(const CouplingSpec& spec) {
    switch (spec.theta) {
        case Theta::G0:      return spec.g0;
        case Theta::Epsilon: return spec.epsilon;
        case Theta::OmegaG:  return spec.omega_g;
        case Theta::D1:      return spec.d1;
        case Theta::OmegaD1: return spec.omega_d1;
        case Theta::D2:      return spec.d2;
        case Theta::OmegaD2: return spec.omega_d2;
    }
    return 0.0;
}

CouplingSpec with_theta_value(CouplingSpec spec, double value) {
    switch (spec.theta) {
        case Theta::G0:      spec.g0 = value; break;
        case Theta::Epsilon: spec.epsilon = value; break;
        case Theta::OmegaG:  spec.omega_g = value; break;
        case Theta::D1:      spec.d1 = value; break;
        case Theta::OmegaD1: spec.omega_d1 = value; break;
        case Theta::D2:      spec.d2 = value; break;
        case Theta::OmegaD2: spec.omega_d2 = value; break;
    }
    return spec;
}

std::string theta_name(Theta theta) {
    switch (theta) {
        case Theta::G0:      return "g0";
        case Theta::Epsilon: return "epsilon";
        case Theta::OmegaG:  return "omega_g";
        case Theta::D1:      return "d1";
        case Theta::OmegaD1: return "omega_d1";
        case Theta::D2:      return "d2";
        case Theta::OmegaD2: return "omega_d2";
    }
    return "?";
}

void ProbeState::validate() const {
    if (!std::isfinite(mu_c.real()) || !std::isfinite(mu_c.imag())) {
        throw std::invalid_argument("probe: non-finite mu_c");
    }
    if (!(r_T >= 0.0) || !std::isfinite(r_T)) {
        throw std::invalid_argument("probe: r_T must be finite and >= 0");
    }
}

void PhysicalUnits::validate() const {
    if (!(omega_m > 0.0) || !std::isfinite(omega_m)) {
        throw std::invalid_argument("units: omega_m must be > 0");
    }
    if (mass && !(*mass > 0.0)) {
        throw std::invalid_argument("units: mass must be > 0");
    }
    if (temperature && !(*temperature >= 0.0)) {
        throw std::invalid_argument("units: temperature must be >= 0");
    }
}

double r_T_from_temperature(double temperature, double omega_m) {
    if (!(omega_m > 0.0)) {
        throw std::invalid_argument("r_T_from_temperature: omega_m must be > 0");
    }
    if (temperature < 0.0) {
        throw std::invalid_argument("r_T_from_temperature: negative temperature");
    }
    if (temperature == 0.0) {
        return 0.0;  // vacuum limit: atanh(exp(-inf)) = 0
    }
    return std::atanh(std::exp(-hbar * omega_m / (2.0 * k_B * temperature)));
}

double dimensionful_rescale(double qfi_dimensionless, double dtheta_dphys) {
    return dtheta_dphys * dtheta_dphys * qfi_dimensionless;
}

}  // namespace omqfi
