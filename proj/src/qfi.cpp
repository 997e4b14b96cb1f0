#include "omqfi/qfi.hpp"

#include <cmath>

namespace omqfi {

namespace {

// Compensated (Kahan) sum of the term blocks.
double kahan_sum(std::initializer_list<double> terms) {
    double sum = 0.0, c = 0.0;
    for (double t : terms) {
        const double y = t - c;
        const double s = sum + y;
        c = (s - sum) - y;
        sum = s;
    }
    return sum;
}

}  // namespace

QfiCoefficients assemble_coefficients(const FCoefficients& f, const FDerivatives& df,
                                      const JTriple& j, double tau) {
    (void)tau;  // would multiply d(Omega_c)/d(theta) in B, which is pinned to 0
    QfiCoefficients c;
    c.r0 = 2.0 * df.dj_minus - std::sinh(4.0 * j.plus) * df.dj_b;
    c.r_plus = 2.0 * df.dj_plus - std::cosh(4.0 * j.plus) * df.dj_b;
    c.r_minus = 2.0 * df.dj_plus + std::cosh(4.0 * j.plus) * df.dj_b;

    const double em = std::exp(-4.0 * j.minus);  // e^{-4 J-}
    const double ep = std::exp(4.0 * j.minus);   // e^{+4 J-}

    c.a = -df.f_na2 - 2.0 * f.f_nabm * df.f_nabp + 2.0 * f.f_nabm * f.f_nabp * c.r0 +
          em * f.f_nabp * f.f_nabp * c.r_plus - ep * f.f_nabm * f.f_nabm * c.r_minus;

    c.b = -df.f_na - 2.0 * f.f_bm * df.f_nabp - 2.0 * f.f_nabm * df.f_bp +
          2.0 * (f.f_bp * f.f_nabm + f.f_bm * f.f_nabp) * c.r0 +
          2.0 * em * f.f_bp * f.f_nabp * c.r_plus -
          2.0 * ep * f.f_bm * f.f_nabm * c.r_minus;

    c.c_plus = -df.f_bp + f.f_bp * c.r0 - ep * f.f_bm * c.r_minus;
    c.c_minus = -df.f_bm - f.f_bm * c.r0 - em * f.f_bp * c.r_plus;
    c.c_na_plus = -df.f_nabp + f.f_nabp * c.r0 - ep * f.f_nabm * c.r_minus;
    c.c_na_minus = -df.f_nabm - f.f_nabm * c.r0 - em * f.f_nabp * c.r_plus;

    c.e = -(ep * c.r_minus - em * c.r_plus) / 2.0;
    c.f_big = -(ep * c.r_minus + em * c.r_plus) / 4.0;
    c.g_big = -c.r0 / 2.0;
    c.k = -2.0 * f.f_bm * df.f_bp + 2.0 * f.f_bm * f.f_bp * c.r0 +
          em * f.f_bp * f.f_bp * c.r_plus - ep * f.f_bm * f.f_bm * c.r_minus +
          df.dj_b / 2.0 + c.e / 2.0;
    return c;
}

QfiResult qfi_general(const QfiCoefficients& c, const ProbeState& probe) {
    probe.validate();
    const double mu2 = probe.mu2();
    const double ch = std::cosh(2.0 * probe.r_T);

    QfiResult out;
    out.terms.a_block =
        4.0 * (4.0 * mu2 * mu2 * mu2 + 6.0 * mu2 * mu2 + mu2) * c.a * c.a;
    out.terms.ab_cross = 8.0 * (2.0 * mu2 * mu2 + mu2) * c.a * c.b;
    out.terms.b_block = 4.0 * mu2 * c.b * c.b;
    const double cp = c.c_plus + c.c_na_plus * mu2;
    const double cm = c.c_minus + c.c_na_minus * mu2;
    out.terms.c_block =
        4.0 * (ch * (c.c_na_plus * c.c_na_plus + c.c_na_minus * c.c_na_minus) * mu2 +
               (cp * cp + cm * cm) / ch);
    out.terms.fg_block = 16.0 * ch * ch / (ch * ch + 1.0) *
                         (c.f_big * c.f_big + c.g_big * c.g_big);
    out.value = kahan_sum({out.terms.a_block, out.terms.ab_cross, out.terms.b_block,
                           out.terms.c_block, out.terms.fg_block});
    return out;
}

QfiResult qfi_pipeline(const CouplingSpec& spec, double tau, const ProbeState& probe) {
    const PipelineF pf = pipeline_F(spec, tau);
    FDerivatives df;
    try {
        df = derivatives_wrt_theta(spec, tau, DerivativeMethod::ClosedForm);
    } catch (const UnsupportedDerivative&) {
        df = derivatives_wrt_theta(spec, tau, DerivativeMethod::FiniteDiff);
    }
    return qfi_general(assemble_coefficients(pf.f, df, pf.j, tau), probe);
}

QfiResult qfi_g0_general(double g0, double eps, double omega_g, double tau,
                         const ProbeState& probe) {
    if (eps == 0.0) {
        // constant coupling: the modulation drops out and the result is
        // frequency independent; A = 2 g0 (tau - sin tau) and the two C_Na
        // coefficients square-sum to 4 sin^2(tau/2)
        probe.validate();
        const double mu2 = probe.mu2();
        const double ch = std::cosh(2.0 * probe.r_T);
        const double a = 2.0 * g0 * (tau - std::sin(tau));
        const double sh = std::sin(tau / 2);
        QfiResult out;
        out.branch = Branch::Constant;
        out.terms.a_block = 4.0 * mu2 * (4 * mu2 * mu2 + 6 * mu2 + 1) * a * a;
        out.terms.c_block =
            16.0 * mu2 * ch * (1.0 + mu2 / (ch * ch)) * sh * sh;
        out.value = out.terms.a_block + out.terms.c_block;
        return out;
    }
    if (std::abs(omega_g - 1.0) < resonance_switch) {
        QfiResult out = qfi_g0_res(g0, eps, tau, probe);
        out.resonance_branch_used = omega_g != 1.0;
        return out;
    }
    if (omega_g < resonance_switch) {
        throw std::invalid_argument(
            "qfi_g0_general: omega_g = 0 requires a constant coupling (eps = 0)");
    }
    probe.validate();
    using std::cos, std::sin;
    const double t = tau, w = omega_g, mu2 = probe.mu2();
    const double ch = std::cosh(2.0 * probe.r_T);

    const double big =
        2 * t * std::pow(w, 5) - 4 * t * w * w * w + 2 * t * w -
        t * w * w * w * eps * eps + 0.5 * w * w * eps * eps * sin(2 * w * t) +
        2 * w * w * eps * eps * cos(t) * sin(w * t) + t * w * eps * eps -
        4 * std::pow(w, 4) * eps * cos(t) * sin(w * t / 2) * sin(w * t / 2) -
        2 * (w * w - 1) * w * sin(t) * (w * w - eps * sin(w * t) - 1) +
        4 * w * w * eps * cos(t) * sin(w * t / 2) * sin(w * t / 2) -
        eps * cos(w * t) *
            (2 * w * w * w * eps * sin(t) + eps * sin(w * t) + 2 * std::pow(w, 4) -
             6 * w * w + 4) +
        2 * std::pow(w, 4) * eps - 6 * w * w * eps + 4 * eps;

    const double denom = w * w * std::pow(w * w - 1.0, 4);
    const double term1 =
        4.0 * g0 * g0 / denom * mu2 * (4 * mu2 * mu2 + 6 * mu2 + 1) * big * big;

    const double br1 = 1 - cos(t) -
                       eps * (w * cos(w * t) * sin(t) - cos(t) * sin(w * t)) / (w * w - 1);
    const double br2 = sin(t) +
                       eps * (w * (1 - cos(t) * cos(w * t)) - sin(t) * sin(w * t)) /
                           (w * w - 1);
    const double term2 =
        4.0 * mu2 * ch * (1.0 + mu2 / (ch * ch)) * (br1 * br1 + br2 * br2);

    QfiResult out;
    out.branch = Branch::General;
    out.terms.a_block = term1;
    out.terms.c_block = term2;
    out.value = term1 + term2;
    return out;
}

QfiResult qfi_g0_res(double g0, double eps, double tau, const ProbeState& probe) {
    probe.validate();
    using std::cos, std::sin;
    const double t = tau, mu2 = probe.mu2();
    const double ch = std::cosh(2.0 * probe.r_T);

    const double x = 4 * t * eps * eps - 3 * eps * eps * sin(2 * t) -
                     8 * t * eps * sin(t) - 32 * eps * cos(t) +
                     2 * eps * (t * eps + 2) * cos(2 * t) + 16 * t - 16 * sin(t) +
                     28 * eps;
    const double term1 =
        (1.0 / 16) * mu2 * g0 * g0 * (4 * mu2 * mu2 + 6 * mu2 + 1) * x * x;
    const double c_sum =
        sin(t) * sin(t) * (eps * sin(t) + 2) * (eps * sin(t) + 2) +
        (t * eps - cos(t) * (eps * sin(t) + 2) + 2) * (t * eps - cos(t) * (eps * sin(t) + 2) + 2);
    const double term2 = mu2 * ch * (mu2 / (ch * ch) + 1) * c_sum;

    QfiResult out;
    out.branch = Branch::Resonant;
    out.terms.a_block = term1;
    out.terms.c_block = term2;
    out.value = term1 + term2;
    return out;
}

QfiResult qfi_g0_res_asymptotic(double g0, double eps, double tau,
                                const ProbeState& probe) {
    probe.validate();
    const double mu2 = probe.mu2();
    QfiResult out;
    out.branch = Branch::Approximate;
    out.terms.a_block = 16.0 * g0 * g0 * tau * tau * mu2 *
                        (4 * mu2 * mu2 + 6 * mu2 + 1) * (1.0 - eps * std::sin(tau));
    out.value = out.terms.a_block;
    return out;
}

QfiResult qfi_d1_general(double g0, double d1, double omega_d1, double tau,
                         const ProbeState& probe) {
    if (omega_d1 < resonance_switch) {
        QfiResult out = qfi_d1_const(g0, d1, tau, probe);
        out.resonance_branch_used = omega_d1 != 0.0;
        return out;
    }
    if (std::abs(omega_d1 - 1.0) < resonance_switch) {
        QfiResult out = qfi_d1_res(g0, d1, tau, probe);
        out.resonance_branch_used = omega_d1 != 1.0;
        return out;
    }
    probe.validate();
    using std::cos, std::sin;
    const double t = tau, w = omega_d1, mu2 = probe.mu2();
    const double ch = std::cosh(2.0 * probe.r_T);
    const double pre = 4.0 / (w * w * (1 - w * w) * (1 - w * w));

    const double bterm = sin(w * t) * (w * w * (1 - cos(t)) - 1) + w * sin(t) * cos(w * t);
    const double b_block = pre * 4.0 * g0 * g0 * mu2 * bterm * bterm;
    const double c_block = pre * w * w / ch *
                           (2 + (w * w - 1) * sin(w * t) * sin(w * t) -
                            2 * w * sin(t) * sin(w * t) - 2 * cos(t) * cos(w * t));

    QfiResult out;
    out.branch = Branch::General;
    out.terms.b_block = b_block;
    out.terms.c_block = c_block;
    out.value = b_block + c_block;
    return out;
}

QfiResult qfi_d1_const(double g0, double d1, double tau, const ProbeState& probe) {
    (void)d1;  // the QFI for estimating d1 is independent of its value
    probe.validate();
    const double mu2 = probe.mu2();
    const double ch = std::cosh(2.0 * probe.r_T);
    const double s = std::sin(tau), sh = std::sin(tau / 2);

    QfiResult out;
    out.branch = Branch::Constant;
    out.terms.b_block = 16.0 * g0 * g0 * mu2 * (tau - s) * (tau - s);
    out.terms.c_block = 16.0 * sh * sh / ch;
    out.value = out.terms.b_block + out.terms.c_block;
    return out;
}

QfiResult qfi_d1_res(double g0, double d1, double tau, const ProbeState& probe) {
    (void)d1;
    probe.validate();
    const double mu2 = probe.mu2();
    const double ch = std::cosh(2.0 * probe.r_T);
    const double s = std::sin(tau), c = std::cos(tau);

    QfiResult out;
    out.branch = Branch::Resonant;
    const double br = tau + s * (c - 2);
    out.terms.b_block = 4.0 * g0 * g0 * mu2 * br * br;
    out.terms.c_block = (tau * tau + 2 * tau * s * c + s * s) / ch;
    out.value = out.terms.b_block + out.terms.c_block;
    return out;
}

QfiResult qfi_d2_const_app(double g0, double tau, const ProbeState& probe) {
    probe.validate();
    const double mu2 = probe.mu2();
    const double ch = std::cosh(2.0 * probe.r_T);
    QfiResult out;
    out.branch = Branch::Approximate;
    out.terms.c_block = 16.0 * g0 * g0 * tau * tau * mu2 * (mu2 + ch * ch) / ch;
    out.value = out.terms.c_block;
    return out;
}

QfiResult qfi_d2_res_app(double g0, double tau, const ProbeState& probe) {
    probe.validate();
    const double mu2 = probe.mu2();
    const double ch = std::cosh(2.0 * probe.r_T);
    QfiResult out;
    out.branch = Branch::Approximate;
    out.terms.a_block =
        4.0 * tau * tau * g0 * g0 * g0 * g0 * (4 * mu2 * mu2 * mu2 + 6 * mu2 * mu2 + mu2);
    out.terms.c_block = 4.0 * tau * tau * g0 * g0 * mu2 * (mu2 + ch * ch) / ch;
    out.terms.fg_block = 4.0 * tau * tau * ch * ch / (ch * ch + 1);
    out.value = kahan_sum({out.terms.a_block, out.terms.c_block, out.terms.fg_block});
    return out;
}

std::optional<double> cramer_rao(double qfi, long measurements) {
    if (qfi < 0.0 || !std::isfinite(qfi)) {
        throw std::invalid_argument("cramer_rao: qfi must be finite and >= 0");
    }
    if (measurements < 1) {
        throw std::invalid_argument("cramer_rao: need at least one measurement");
    }
    if (qfi == 0.0) {
        return std::nullopt;  // unbounded variance
    }
    return 1.0 / std::sqrt(static_cast<double>(measurements) * qfi);
}

}  // namespace omqfi
