#include "omqfi/fcoeffs.hpp"

#include <cmath>
#include <numbers>

namespace omqfi {

namespace {

struct ExampleIParts {
    // F_Na2 = g0^2 (t0 + eps t1 + eps^2 t2);  F_NaB+/- = g0 (p0 + eps p1)
    double t0, t1, t2;
    double p0_plus, p1_plus;
    double p0_minus, p1_minus;
};

// General-frequency lists for example (i). Valid away from omega_g in {0, 1}.
ExampleIParts example_i_parts_general(double w, double tau) {
    using std::cos, std::sin;
    const double t = tau;
    ExampleIParts parts{};
    parts.t0 = -(t - sin(t) * cos(t));
    parts.t1 = 2.0 / w * (sin(t) * sin(t) * cos(w * t) - 2.0 * sin(t / 2) * sin(t / 2)) -
               sin(2 * t) * sin(w * t) / (w * (1 + w)) -
               4.0 * cos(t) * sin((1 - w) * t / 2) * sin((1 - w) * t / 2) /
                   (w * (1 - w * w));
    // the three eps^2 summands, kept separate as printed
    const double q1 =
        (2 * t - 4 * sin(t) * cos(w * t) * (cos(t) * cos(w * t) - 2)) /
        (4 * w * (1 + w));
    const double q2 = (4 * sin(t) * cos(w * t) * (cos(t) * cos(w * t) - 2) +
                       8 * cos(t) * sin(w * t) + (1 - 2 * cos(2 * t)) * sin(2 * w * t) -
                       2 * t) /
                      (4 * w * (1 - w * w));
    const double q3 = (4 * w * sin(t) * cos(w * t) - w * sin(2 * t) * cos(2 * w * t) -
                       4 * cos(t) * sin(w * t) + cos(2 * t) * sin(2 * w * t)) /
                      (2 * w * (1 - w * w) * (1 - w * w));
    parts.t2 = q1 + q2 + q3;

    parts.p0_plus = -sin(t);
    parts.p1_plus = -sin(t) * sin(w * t) / (1 + w) +
                    2 * w * sin((1 - w) * t / 2) * sin((1 - w) * t / 2) / (1 - w * w);
    parts.p0_minus = -2 * sin(t / 2) * sin(t / 2);
    parts.p1_minus =
        -sin(t) * cos(w * t) / (1 - w) + sin((1 + w) * t) / (1 - w * w);
    return parts;
}

ExampleIParts example_i_parts_resonant(double tau) {
    using std::cos, std::sin;
    const double t = tau;
    ExampleIParts parts{};
    parts.t0 = -(16 * t - 8 * sin(2 * t)) / 16.0;
    parts.t1 = -(32 - 36 * cos(t) + 4 * cos(3 * t)) / 16.0;
    parts.t2 = -(6 * t - 4 * sin(2 * t) + sin(2 * t) * cos(2 * t)) / 16.0;
    parts.p0_plus = -sin(t);
    parts.p1_plus = -0.5 * sin(t) * sin(t);
    parts.p0_minus = -2 * sin(t / 2) * sin(t / 2);
    parts.p1_minus = (sin(2 * t) - 2 * t) / 4.0;
    return parts;
}

struct ExampleIiParts {
    // F_Na = g0 d1 n;  F_B+ = d1 bp;  F_B- = d1 bm;
    // F_Na2 = g0^2 n2;  F_NaB+ = g0 pp;  F_NaB- = g0 pm
    double n, bp, bm, n2, pp, pm;
};

ExampleIiParts example_ii_parts(double w, double tau, Branch branch) {
    using std::cos, std::sin;
    const double t = tau;
    ExampleIiParts parts{};
    parts.n2 = 0.5 * (sin(2 * t) - 2 * t);
    parts.pp = -sin(t);
    parts.pm = cos(t) - 1;
    switch (branch) {
        case Branch::Constant:
            parts.n = 2 * (t - sin(t) * cos(t));
            parts.bp = sin(t);
            parts.bm = 1 - cos(t);
            break;
        case Branch::Resonant:
            parts.n = -0.25 * (sin(3 * t) - 7 * sin(t) + 4 * t * cos(t));
            parts.bp = 0.5 * (t + sin(t) * cos(t));
            parts.bm = 0.5 * sin(t) * sin(t);
            break;
        default:
            parts.n = -(2 * w * w * cos(t) * cos(t) * sin(w * t) +
                        sin(w * t) * (w * w * cos(2 * t) - 3 * w * w + 4) -
                        4 * w * sin(t) * cos(t) * cos(w * t)) /
                      (2 * w * (w * w - 1));
            parts.bp = -(w * cos(t) * sin(w * t) - sin(t) * cos(w * t)) / (1 - w * w);
            parts.bm = -(w * sin(t) * sin(w * t) + cos(t) * cos(w * t) - 1) / (1 - w * w);
            break;
    }
    return parts;
}

bool is_example_i(const CouplingSpec& s) {
    return s.d1_form == DriveForm::Zero && s.d2_form == DriveForm::Zero;
}

bool is_example_ii(const CouplingSpec& s) {
    return s.g_form == GForm::Constant && s.d2_form == DriveForm::Zero &&
           (s.d1_form == DriveForm::CosModulated || s.d1_form == DriveForm::Constant);
}

// Example (iii) spec shapes: constant squeezing, or squeezing modulated at
// parametric resonance. Returns the mode, or throws for a resonant request
// away from omega_d2 = 2.
D2Mode example_iii_mode(const CouplingSpec& s) {
    if (s.d2_form == DriveForm::Constant) return D2Mode::Constant;
    if (std::abs(s.omega_d2 - 2.0) > 1e-9) {
        throw std::invalid_argument(
            "example (iii) closed forms require constant squeezing or omega_d2 = 2");
    }
    return D2Mode::Resonant;
}

// Only the constant and parametric-resonance shapes have printed forms; a
// modulated d2 away from omega_d2 = 2 must go through the quadrature pipeline.
bool is_example_iii(const CouplingSpec& s) {
    if (s.g_form != GForm::Constant || s.d1_form != DriveForm::Zero) return false;
    if (s.d2_form == DriveForm::Constant) return true;
    return s.d2_form == DriveForm::CosModulated && std::abs(s.omega_d2 - 2.0) <= 1e-9;
}

}  // namespace

FCoefficients compute_F(const CouplingSpec& spec, const MechanicsSolution& mech,
                        double tau) {
    (void)spec;
    const auto y = augmented_state_at(mech, tau);
    return FCoefficients{y[4], y[5], y[6], y[7], y[8], y[9]};
}

ClosedFormF closed_form_F_example_i(double g0, double eps, double omega_g, double tau) {
    if (omega_g < resonance_switch) {
        throw std::invalid_argument(
            "closed_form_F_example_i: omega_g = 0 is not covered; use a constant "
            "coupling (epsilon = 0) instead");
    }
    ClosedFormF out;
    ExampleIParts parts;
    if (std::abs(omega_g - 1.0) < resonance_switch) {
        parts = example_i_parts_resonant(tau);
        out.branch = Branch::Resonant;
        out.resonance_branch_used = omega_g != 1.0;
    } else {
        parts = example_i_parts_general(omega_g, tau);
    }
    out.f.f_na2 = g0 * g0 * (parts.t0 + eps * parts.t1 + eps * eps * parts.t2);
    out.f.f_nabp = g0 * (parts.p0_plus + eps * parts.p1_plus);
    out.f.f_nabm = g0 * (parts.p0_minus + eps * parts.p1_minus);
    out.j = JTriple{0.0, 0.0, tau};
    return out;
}

ClosedFormF closed_form_F_example_ii(double g0, double d1, double omega_d1, double tau) {
    ClosedFormF out;
    Branch branch = Branch::General;
    if (omega_d1 < resonance_switch) {
        branch = Branch::Constant;
        out.resonance_branch_used = omega_d1 != 0.0;
    } else if (std::abs(omega_d1 - 1.0) < resonance_switch) {
        branch = Branch::Resonant;
        out.resonance_branch_used = omega_d1 != 1.0;
    }
    out.branch = branch;
    const ExampleIiParts parts = example_ii_parts(omega_d1, tau, branch);
    out.f.f_na = g0 * d1 * parts.n;
    out.f.f_na2 = g0 * g0 * parts.n2;
    out.f.f_bp = d1 * parts.bp;
    out.f.f_bm = d1 * parts.bm;
    out.f.f_nabp = g0 * parts.pp;
    out.f.f_nabm = g0 * parts.pm;
    out.j = JTriple{0.0, 0.0, tau};
    return out;
}

ClosedFormFIii closed_form_F_example_iii(double g0, double d2, D2Mode mode, double tau) {
    if (!(d2 >= 0.0) || d2 >= 0.2) {
        throw std::invalid_argument(
            "closed_form_F_example_iii: approximate forms require 0 <= d2 < 0.2");
    }
    ClosedFormFIii out;
    out.validity_warning = d2 > 0.05;
    using std::cos, std::sin;
    if (mode == D2Mode::Constant) {
        const double u = 1.0 + 2.0 * d2;
        out.f.f_na2 = -g0 * g0 * (2 * u * tau - sin(2 * u * tau)) / 2.0;
        out.f.f_nabp = -g0 * sin(u * tau);
        out.f.f_nabm = -g0 * (1 - cos(u * tau));
        out.j = JTriple{0.0, 0.0, u * tau};
    } else {
        const double ch = std::cosh(d2 * tau), sh = std::sinh(d2 * tau);
        const double ch2 = std::cosh(2 * d2 * tau), sh2 = std::sinh(2 * d2 * tau);
        out.f.f_na2 = g0 * g0 * (ch2 * sin(2 * tau) + sh2 - 2 * tau) / 2.0;
        out.f.f_nabp = -g0 * (ch * sin(tau) + sh * cos(tau));
        out.f.f_nabm = g0 * (ch * cos(tau) + sh * sin(tau) - 1);
        out.j = JTriple{0.5 * d2 * tau, 0.0, tau};
    }
    return out;
}

PipelineF pipeline_F(const CouplingSpec& spec, double tau, double tol) {
    PipelineF out;
    if (tau == 0.0) {
        return out;  // empty integrals, identity evolution
    }
    const MechanicsSolution mech = solve_mechanics(spec, tau, tol);
    out.f = compute_F(spec, mech, tau);
    out.j = j_at(mech, tau);
    return out;
}

namespace {

FDerivatives closed_form_derivatives(const CouplingSpec& spec, double tau) {
    FDerivatives d;
    if (is_example_i(spec)) {
        const bool degenerate_modulation =
            spec.g_form == GForm::SineModulated && spec.omega_g < resonance_switch;
        if (spec.theta == Theta::G0 && !degenerate_modulation) {
            if (spec.g_form == GForm::Constant) {
                d.f_na2 = -2.0 * spec.g0 * (tau - std::sin(tau) * std::cos(tau));
                d.f_nabp = -std::sin(tau);
                d.f_nabm = -2.0 * std::sin(tau / 2) * std::sin(tau / 2);
                return d;
            }
            const ClosedFormF unit =
                closed_form_F_example_i(1.0, spec.epsilon, spec.omega_g, tau);
            d.f_na2 = 2.0 * spec.g0 * unit.f.f_na2;
            d.f_nabp = unit.f.f_nabp;
            d.f_nabm = unit.f.f_nabm;
            return d;
        }
        if (spec.theta == Theta::Epsilon && spec.g_form == GForm::SineModulated &&
            !degenerate_modulation) {
            const double w = spec.omega_g;
            const ExampleIParts parts = (std::abs(w - 1.0) < resonance_switch)
                                            ? example_i_parts_resonant(tau)
                                            : example_i_parts_general(w, tau);
            d.f_na2 = spec.g0 * spec.g0 * (parts.t1 + 2.0 * spec.epsilon * parts.t2);
            d.f_nabp = spec.g0 * parts.p1_plus;
            d.f_nabm = spec.g0 * parts.p1_minus;
            return d;
        }
    }
    if (is_example_ii(spec) && spec.theta == Theta::D1) {
        const double w =
            spec.d1_form == DriveForm::Constant ? 0.0 : spec.omega_d1;
        Branch branch = Branch::General;
        if (w < resonance_switch) branch = Branch::Constant;
        else if (std::abs(w - 1.0) < resonance_switch) branch = Branch::Resonant;
        const ExampleIiParts parts = example_ii_parts(w, tau, branch);
        d.f_na = spec.g0 * parts.n;
        d.f_bp = parts.bp;
        d.f_bm = parts.bm;
        return d;
    }
    if (is_example_iii(spec) && spec.theta == Theta::D2) {
        const double g0 = spec.g0, d2 = spec.d2;
        using std::cos, std::sin;
        if (example_iii_mode(spec) == D2Mode::Constant) {
            const double u = 1.0 + 2.0 * d2;
            d.f_na2 = -2.0 * g0 * g0 * tau * (1 - cos(2 * u * tau));
            d.f_nabp = -2.0 * g0 * tau * cos(u * tau);
            d.f_nabm = -2.0 * g0 * tau * sin(u * tau);
            d.dj_b = 2.0 * tau;
        } else {
            const double ch = std::cosh(d2 * tau), sh = std::sinh(d2 * tau);
            const double ch2 = std::cosh(2 * d2 * tau), sh2 = std::sinh(2 * d2 * tau);
            d.f_na2 = g0 * g0 * tau * (sh2 * sin(2 * tau) + ch2);
            d.f_nabp = -g0 * tau * (sh * sin(tau) + ch * cos(tau));
            d.f_nabm = g0 * tau * (sh * cos(tau) + ch * sin(tau));
            d.dj_plus = 0.5 * tau;
        }
        return d;
    }
    throw UnsupportedDerivative(
        "derivatives_wrt_theta: no closed-form derivative for theta = " +
        theta_name(spec.theta) + " with this coupling form; use FiniteDiff");
}

struct PipelineSample {
    FCoefficients f;
    JTriple j;
};

PipelineSample pipeline_sample(const CouplingSpec& spec, double tau, const JTriple& ref) {
    const MechanicsSolution mech = solve_mechanics(spec, tau);
    PipelineSample s;
    s.f = compute_F(spec, mech, tau);
    s.j = j_at(mech, tau);
    // branch-match against the unperturbed J_b so the difference quotient is
    // taken on one sheet
    s.j.b += std::numbers::pi * std::round((ref.b - s.j.b) / std::numbers::pi);
    return s;
}

FDerivatives fd_difference(const CouplingSpec& spec, double tau, double h,
                           const JTriple& ref) {
    const double theta0 = theta_value(spec);
    const PipelineSample up = pipeline_sample(with_theta_value(spec, theta0 + h), tau, ref);
    const PipelineSample dn = pipeline_sample(with_theta_value(spec, theta0 - h), tau, ref);
    const double inv = 1.0 / (2.0 * h);
    FDerivatives d;
    d.f_na = (up.f.f_na - dn.f.f_na) * inv;
    d.f_na2 = (up.f.f_na2 - dn.f.f_na2) * inv;
    d.f_bp = (up.f.f_bp - dn.f.f_bp) * inv;
    d.f_bm = (up.f.f_bm - dn.f.f_bm) * inv;
    d.f_nabp = (up.f.f_nabp - dn.f.f_nabp) * inv;
    d.f_nabm = (up.f.f_nabm - dn.f.f_nabm) * inv;
    d.dj_plus = (up.j.plus - dn.j.plus) * inv;
    d.dj_minus = (up.j.minus - dn.j.minus) * inv;
    d.dj_b = (up.j.b - dn.j.b) * inv;
    return d;
}

}  // namespace

FDerivatives derivatives_wrt_theta(const CouplingSpec& spec, double tau,
                                   DerivativeMethod method, double fd_step) {
    if (method == DerivativeMethod::ClosedForm) {
        return closed_form_derivatives(spec, tau);
    }
    const double theta0 = theta_value(spec);
    const double h =
        fd_step > 0.0 ? fd_step : 1e-6 * std::max(1.0, std::abs(theta0));
    const JTriple ref = pipeline_F(spec, tau).j;
    const FDerivatives coarse = fd_difference(spec, tau, h, ref);
    const FDerivatives fine = fd_difference(spec, tau, h / 2, ref);
    auto richardson = [](double c, double f) { return (4.0 * f - c) / 3.0; };
    FDerivatives d;
    d.f_na = richardson(coarse.f_na, fine.f_na);
    d.f_na2 = richardson(coarse.f_na2, fine.f_na2);
    d.f_bp = richardson(coarse.f_bp, fine.f_bp);
    d.f_bm = richardson(coarse.f_bm, fine.f_bm);
    d.f_nabp = richardson(coarse.f_nabp, fine.f_nabp);
    d.f_nabm = richardson(coarse.f_nabm, fine.f_nabm);
    d.dj_plus = richardson(coarse.dj_plus, fine.dj_plus);
    d.dj_minus = richardson(coarse.dj_minus, fine.dj_minus);
    d.dj_b = richardson(coarse.dj_b, fine.dj_b);
    return d;
}

}  // namespace omqfi
