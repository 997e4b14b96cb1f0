#include "omqfi/mechanics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "omqfi/errors.hpp"
#include "omqfi/ode.hpp"

namespace omqfi {

namespace {

constexpr double pi = std::numbers::pi;

// Augmented state layout:
//   0 P11   1 dP11   2 I_P22   3 dI_P22
//   4 F_Na  5 F_Na2  6 F_B+    7 F_B-    8 F_NaB+  9 F_NaB-
// Re xi = P11, Im xi = -I_P22. The inner integrals of the nested double
// integrals are recovered from the state itself:
//   int G Re(xi)  = -F_NaB+     int D1 Re(xi) = F_B+
struct AugmentedRhs {
    const CouplingSpec& spec;

    void operator()(double t, const std::vector<double>& y,
                    std::vector<double>& dydt) const {
        const double g = eval_G(spec, t);
        const double d1 = eval_D1(spec, t);
        const double w2 = 1.0 + 4.0 * eval_D2(spec, t);
        const double re_xi = y[0];
        const double im_xi = -y[2];
        const double inner_g = -y[8];
        const double inner_d = y[6];

        dydt[0] = y[1];
        dydt[1] = -w2 * y[0];
        dydt[2] = y[3];
        dydt[3] = -w2 * y[2];
        dydt[4] = -2.0 * d1 * im_xi * inner_g - 2.0 * g * im_xi * inner_d;
        dydt[5] = 2.0 * g * im_xi * inner_g;
        dydt[6] = d1 * re_xi;
        dydt[7] = -d1 * im_xi;
        dydt[8] = -g * re_xi;
        dydt[9] = g * im_xi;
    }
};

double grid_spacing(const CouplingSpec& spec) {
    double omega_max = 1.0;
    if (spec.g_form == GForm::SineModulated) omega_max = std::max(omega_max, spec.omega_g);
    if (spec.d1_form == DriveForm::CosModulated)
        omega_max = std::max(omega_max, spec.omega_d1);
    if (spec.d2_form == DriveForm::CosModulated)
        omega_max = std::max(omega_max, spec.omega_d2);
    return std::min(0.01, 2.0 * pi / (50.0 * omega_max));
}

double clamped_acosh(double x, const char* what) {
    if (x < 1.0 - 1e-9) {
        throw std::invalid_argument(std::string("extract_J: acosh argument ") + what +
                                    " below 1 beyond roundoff window");
    }
    return std::acosh(std::max(x, 1.0));
}

}  // namespace

std::size_t MechanicsSolution::index_at_or_below(double tau) const {
    if (grid.empty() || tau < -1e-12) {
        throw std::out_of_range("mechanics: tau below solution range");
    }
    const double dtau = grid.size() > 1 ? grid[1] - grid[0] : 1.0;
    if (tau > grid.back() + 0.5 * dtau * 1e-6) {
        throw std::out_of_range("mechanics: tau beyond solution range");
    }
    auto it = std::upper_bound(grid.begin(), grid.end(), tau + dtau * 1e-9);
    std::size_t k = static_cast<std::size_t>(it - grid.begin());
    return k == 0 ? 0 : k - 1;
}

MechanicsSolution solve_mechanics(const CouplingSpec& spec, double tau_max, double tol) {
    spec.validate();
    if (!(tau_max > 0.0)) throw std::invalid_argument("solve_mechanics: tau_max must be > 0");
    if (!(tol > 0.0)) throw std::invalid_argument("solve_mechanics: tol must be > 0");

    MechanicsSolution sol;
    sol.spec = spec;
    sol.rel_tol = tol;

    const double dtau = grid_spacing(spec);
    const auto n_nodes = static_cast<std::size_t>(std::ceil(tau_max / dtau - 1e-9)) + 1;

    ode::Options opt;
    opt.rel_tol = tol;
    opt.abs_tol = tol * 1e-2;
    opt.h_max = dtau;

    AugmentedRhs rhs{spec};
    std::vector<double> y = {1, 0, 0, 1, 0, 0, 0, 0, 0, 0};

    sol.grid.reserve(n_nodes);
    auto push_node = [&](double tau) {
        sol.grid.push_back(tau);
        sol.p11.push_back(y[0]);
        sol.p11_dot.push_back(y[1]);
        sol.ip22.push_back(y[2]);
        sol.ip22_dot.push_back(y[3]);
        sol.f_na.push_back(y[4]);
        sol.f_na2.push_back(y[5]);
        sol.f_bp.push_back(y[6]);
        sol.f_bm.push_back(y[7]);
        sol.f_nabp.push_back(y[8]);
        sol.f_nabm.push_back(y[9]);
        sol.xi.emplace_back(y[0], -y[2]);
        sol.alpha.emplace_back(0.5 * (y[0] + y[3]), 0.5 * (y[1] - y[2]));
        sol.beta.emplace_back(0.5 * (y[0] - y[3]), 0.5 * (y[1] + y[2]));
    };
    push_node(0.0);

    double w2_prev = 1.0 + 4.0 * eval_D2(spec, 0.0);
    for (std::size_t k = 1; k < n_nodes; ++k) {
        const double t0 = sol.grid.back();
        const double t1 = std::min(static_cast<double>(k) * dtau, tau_max);
        ode::integrate(rhs, t0, t1, y, opt);
        const double w2 = 1.0 + 4.0 * eval_D2(spec, t1);
        if ((w2_prev > 0.0) != (w2 > 0.0)) {
            sol.turning_points.push_back(0.5 * (t0 + t1));
        }
        w2_prev = w2;
        push_node(t1);
    }

    // J functions from pointwise extraction, with the Arg of alpha^2 - beta^2
    // unwrapped along the grid so that J_b is continuous and J_b(0) = 0.
    sol.j_plus.resize(sol.grid.size());
    sol.j_minus.resize(sol.grid.size());
    sol.j_b.resize(sol.grid.size());
    double phase_offset = 0.0;
    double prev_principal = 0.0;
    for (std::size_t k = 0; k < sol.grid.size(); ++k) {
        const JTriple j = extract_J(sol.alpha[k], sol.beta[k]);
        const double principal = -2.0 * j.b;  // Arg(alpha^2 - beta^2)
        if (k > 0) {
            double d = principal - prev_principal;
            if (d > pi) phase_offset -= 2.0 * pi;
            if (d < -pi) phase_offset += 2.0 * pi;
        }
        prev_principal = principal;
        sol.j_plus[k] = j.plus;
        sol.j_minus[k] = j.minus;
        sol.j_b[k] = -(principal + phase_offset) / 2.0;
    }
    return sol;
}

std::array<double, 10> augmented_state_at(const MechanicsSolution& sol, double tau) {
    const std::size_t k = sol.index_at_or_below(tau);
    std::array<double, 10> state = {
        sol.p11[k],  sol.p11_dot[k], sol.ip22[k],  sol.ip22_dot[k], sol.f_na[k],
        sol.f_na2[k], sol.f_bp[k],   sol.f_bm[k],  sol.f_nabp[k],   sol.f_nabm[k]};
    const double t0 = sol.grid[k];
    if (tau - t0 > 1e-13 * std::max(1.0, tau)) {
        ode::Options opt;
        opt.rel_tol = sol.rel_tol;
        opt.abs_tol = sol.rel_tol * 1e-2;
        opt.h_max = tau - t0;
        std::vector<double> y(state.begin(), state.end());
        ode::integrate(AugmentedRhs{sol.spec}, t0, tau, y, opt);
        std::copy(y.begin(), y.end(), state.begin());
    }
    return state;
}

JTriple j_at(const MechanicsSolution& sol, double tau) {
    const std::size_t k = sol.index_at_or_below(tau);
    const auto y = augmented_state_at(sol, tau);
    const std::complex<double> alpha{0.5 * (y[0] + y[3]), 0.5 * (y[1] - y[2])};
    const std::complex<double> beta{0.5 * (y[0] - y[3]), 0.5 * (y[1] + y[2])};
    JTriple j = extract_J(alpha, beta);
    // extract_J returns J_b modulo pi; pick the sheet closest to the unwrapped
    // grid value (adjacent nodes are far less than pi/2 apart in J_b).
    const double ref = sol.j_b[k];
    j.b += pi * std::round((ref - j.b) / pi);
    return j;
}

JTriple extract_J(std::complex<double> alpha, std::complex<double> beta) {
    const double norm_defect = std::norm(alpha) - std::norm(beta) - 1.0;
    if (std::abs(norm_defect) > 1e-6) {
        throw std::invalid_argument(
            "extract_J: |alpha|^2 - |beta|^2 deviates from 1 by more than 1e-6");
    }
    const std::complex<double> z = alpha * alpha - beta * beta;
    const double m = std::abs(z);

    JTriple j;
    j.plus = clamped_acosh(m, "|alpha^2 - beta^2|") / 4.0;
    j.minus = clamped_acosh((2.0 * std::norm(alpha) - 1.0) / m, "(2|alpha|^2-1)/|..|") / 4.0;
    j.b = -std::arg(z / m) / 2.0;
    return j;
}

std::pair<std::complex<double>, std::complex<double>> bogoliubov_from_J(const JTriple& j) {
    using namespace std::complex_literals;
    const double cp = std::cosh(2.0 * j.plus), sp = std::sinh(2.0 * j.plus);
    const double cm = std::cosh(2.0 * j.minus), sm = std::sinh(2.0 * j.minus);
    const std::complex<double> phase = std::exp(-1i * j.b);
    const std::complex<double> alpha = phase * (cp * cm - 1i * sp * sm);
    const std::complex<double> beta = -phase * (1i * sp * cm - cp * sm);
    return {alpha, beta};
}

JSolution solve_J_odes(const CouplingSpec& spec, double tau_max, double tol) {
    spec.validate();
    if (!(tau_max > 0.0)) throw std::invalid_argument("solve_J_odes: tau_max must be > 0");

    auto rhs = [&spec](double t, const std::vector<double>& y, std::vector<double>& dydt) {
        const double d2 = eval_D2(spec, t);
        const double jb = y[0], jp = y[1];
        dydt[0] = 1.0 + 2.0 * d2 * (1.0 - std::sin(2.0 * jb) * std::tanh(4.0 * jp));
        dydt[1] = d2 * std::cos(2.0 * jb);
        dydt[2] = d2 * std::sin(2.0 * jb) / std::cosh(4.0 * jp);
    };

    const double dtau = grid_spacing(spec);
    const auto n_nodes = static_cast<std::size_t>(std::ceil(tau_max / dtau - 1e-9)) + 1;

    ode::Options opt;
    opt.rel_tol = tol;
    opt.abs_tol = tol * 1e-2;
    opt.h_max = dtau;

    std::vector<double> y = {0.0, 0.0, 0.0};
    JSolution sol;
    sol.grid.push_back(0.0);
    sol.j_b.push_back(0.0);
    sol.j_plus.push_back(0.0);
    sol.j_minus.push_back(0.0);
    for (std::size_t k = 1; k < n_nodes; ++k) {
        const double t0 = sol.grid.back();
        const double t1 = std::min(static_cast<double>(k) * dtau, tau_max);
        ode::integrate(rhs, t0, t1, y, opt);
        sol.grid.push_back(t1);
        sol.j_b.push_back(y[0]);
        sol.j_plus.push_back(y[1]);
        sol.j_minus.push_back(y[2]);
    }
    return sol;
}

std::complex<double> rwa_xi(double d2, double tau) {
    using namespace std::complex_literals;
    return std::exp(-1i * tau) * std::cosh(d2 * tau) +
           1i * std::exp(1i * tau) * std::sinh(d2 * tau);
}

Mat2c squeeze_matrix(const SqueezeParams& s) {
    using namespace std::complex_literals;
    const double ch = std::cosh(s.r), sh = std::sinh(s.r);
    const std::complex<double> ph = std::exp(1i * s.theta);
    return {ch, -ph * sh, -std::conj(ph) * sh, ch};
}

Mat2c rotation_matrix(double a) {
    using namespace std::complex_literals;
    return {std::exp(-1i * a), 0.0, 0.0, std::exp(1i * a)};
}

Mat2c mat2_mul(const Mat2c& x, const Mat2c& y) {
    return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3],
            x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]};
}

ComposedSqueeze squeeze_compose(const SqueezeParams& s1, const SqueezeParams& s2) {
    using namespace std::complex_literals;
    if (s1.r < 0.0 || s2.r < 0.0) {
        throw std::invalid_argument("squeeze_compose: squeeze magnitudes must be >= 0");
    }
    const std::complex<double> t1 = std::tanh(s1.r) * std::exp(1i * s1.theta);
    const std::complex<double> t2 = std::tanh(s2.r) * std::exp(1i * s2.theta);
    const std::complex<double> den = 1.0 + t1 * std::conj(t2);
    const std::complex<double> t3 = (t1 + t2) / den;
    const std::complex<double> w = den / (1.0 + std::conj(t1) * t2);

    ComposedSqueeze out;
    out.rotation = -0.5 * std::arg(w);
    const double mag = std::min(std::abs(t3), 1.0 - 1e-16);
    out.s.r = std::atanh(mag);
    out.s.theta = (mag == 0.0) ? 0.0 : std::arg(t3);
    return out;
}

CompactSqueeze compact_squeeze_params(double j_plus, double j_minus) {
    using namespace std::complex_literals;
    const double tp = std::tanh(2.0 * j_plus);
    const double tm = std::tanh(2.0 * j_minus);
    CompactSqueeze out;
    out.phi = std::atan(tp * tm);
    out.zeta = (1i * tp - tm) / (1.0 - 1i * tp * tm);
    return out;
}

}  // namespace omqfi
