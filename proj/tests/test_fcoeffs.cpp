#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "omqfi/fcoeffs.hpp"

using namespace omqfi;
constexpr double pi = std::numbers::pi;

namespace {

CouplingSpec spec_i(double g0, double eps, double omega_g) {
    CouplingSpec s;
    s.g_form = eps == 0.0 ? GForm::Constant : GForm::SineModulated;
    s.g0 = g0;
    s.epsilon = eps;
    s.omega_g = omega_g;
    s.theta = Theta::G0;
    return s;
}

CouplingSpec spec_ii(double g0, double d1, double omega_d1) {
    CouplingSpec s;
    s.g_form = GForm::Constant;
    s.g0 = g0;
    s.d1_form = omega_d1 == 0.0 ? DriveForm::Constant : DriveForm::CosModulated;
    s.d1 = d1;
    s.omega_d1 = omega_d1;
    s.theta = Theta::D1;
    return s;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1e-30, std::abs(b)); }

void check_close(const FCoefficients& a, const FCoefficients& b, double tol,
                 double floor = 1e-10) {
    auto one = [&](double x, double y) {
        if (std::abs(y) < floor) {
            CHECK(std::abs(x - y) < tol);
        } else {
            CHECK(rel(x, y) < tol);
        }
    };
    one(a.f_na, b.f_na);
    one(a.f_na2, b.f_na2);
    one(a.f_bp, b.f_bp);
    one(a.f_bm, b.f_bm);
    one(a.f_nabp, b.f_nabp);
    one(a.f_nabm, b.f_nabm);
}

}  // namespace

TEST_CASE("compute_F vanishes at tau = 0") {
    const auto spec = spec_ii(1.0, 0.5, 0.7);
    const auto mech = solve_mechanics(spec, 1.0);
    const auto f = compute_F(spec, mech, 0.0);
    CHECK(f.f_na == 0.0);
    CHECK(f.f_na2 == 0.0);
    CHECK(f.f_bp == 0.0);
    CHECK(f.f_bm == 0.0);
    CHECK(f.f_nabp == 0.0);
    CHECK(f.f_nabm == 0.0);
}

TEST_CASE("constant coupling at tau = pi") {
    const double g0 = 0.8;
    const auto spec = spec_i(g0, 0.0, 0.0);
    const auto mech = solve_mechanics(spec, pi);
    const auto f = compute_F(spec, mech, pi);
    CHECK(std::abs(f.f_nabp) < 1e-9);                       // -g0 sin(pi)
    CHECK(f.f_nabm == doctest::Approx(-2 * g0).epsilon(1e-9));
    CHECK(f.f_na2 == doctest::Approx(-g0 * g0 * pi).epsilon(1e-9));
    CHECK(f.f_na == 0.0);
    CHECK(f.f_bp == 0.0);
}

TEST_CASE("quadrature matches closed form, example (i) spot") {
    const auto spec = spec_i(1.0, 0.5, 0.8);
    const auto mech = solve_mechanics(spec, 7.0);
    const auto fq = compute_F(spec, mech, 7.0);
    const auto fc = closed_form_F_example_i(1.0, 0.5, 0.8, 7.0);
    check_close(fq, fc.f, 1e-8);
    CHECK(fc.branch == Branch::General);
}

TEST_CASE("example (i) closed form: eps = 0 reduces to constant coupling") {
    const double g0 = 1.4, tau = 5.3;
    const auto fc = closed_form_F_example_i(g0, 0.0, 0.6, tau);
    CHECK(fc.f.f_na2 ==
          doctest::Approx(-g0 * g0 * (tau - std::sin(tau) * std::cos(tau))).epsilon(1e-13));
    CHECK(fc.f.f_nabp == doctest::Approx(-g0 * std::sin(tau)).epsilon(1e-13));
}

TEST_CASE("example (i) resonance values at tau = 2 pi") {
    const auto fc = closed_form_F_example_i(1.0, 0.5, 1.0, 2 * pi);
    CHECK(fc.branch == Branch::Resonant);
    CHECK(!fc.resonance_branch_used);  // exactly resonant
    CHECK(std::abs(fc.f.f_nabp) < 1e-14);
    CHECK(fc.f.f_nabm == doctest::Approx(-pi / 2).epsilon(1e-13));
    CHECK(fc.j.b == 2 * pi);
    CHECK(fc.j.plus == 0.0);
}

TEST_CASE("example (i) rejects omega_g = 0") {
    CHECK_THROWS_AS(closed_form_F_example_i(1.0, 0.5, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("example (ii) closed form spots") {
    SUBCASE("d1 = 0 leaves only the coupling terms") {
        const auto fc = closed_form_F_example_ii(1.1, 0.0, 0.6, 4.0);
        CHECK(fc.f.f_bp == 0.0);
        CHECK(fc.f.f_bm == 0.0);
        CHECK(fc.f.f_na == 0.0);
        CHECK(fc.f.f_nabp == doctest::Approx(-1.1 * std::sin(4.0)).epsilon(1e-13));
    }
    SUBCASE("resonance list at tau = 2 pi") {
        const auto fc = closed_form_F_example_ii(1.0, 1.0, 1.0, 2 * pi);
        CHECK(fc.branch == Branch::Resonant);
        CHECK(fc.f.f_bp == doctest::Approx(pi).epsilon(1e-13));
        CHECK(std::abs(fc.f.f_bm) < 1e-13);
    }
    SUBCASE("general frequency matches quadrature") {
        const auto spec = spec_ii(1.0, 1.0, 0.37);
        const auto mech = solve_mechanics(spec, 9.0);
        const auto fq = compute_F(spec, mech, 9.0);
        const auto fc = closed_form_F_example_ii(1.0, 1.0, 0.37, 9.0);
        check_close(fq, fc.f, 1e-8);
    }
    SUBCASE("omega_d1 = 0 equals the constant-drive limit and the quadrature") {
        const auto spec = spec_ii(0.9, 0.4, 0.0);
        const auto mech = solve_mechanics(spec, 6.0);
        const auto fq = compute_F(spec, mech, 6.0);
        const auto fc = closed_form_F_example_ii(0.9, 0.4, 0.0, 6.0);
        CHECK(fc.branch == Branch::Constant);
        check_close(fq, fc.f, 1e-8);
    }
}

TEST_CASE("example (iii) approximate forms") {
    SUBCASE("d2 = 0, constant mode, reduces to constant coupling with J_b = tau") {
        const auto fc = closed_form_F_example_iii(1.0, 0.0, D2Mode::Constant, 1.0);
        CHECK(fc.f.f_nabp == doctest::Approx(-std::sin(1.0)).epsilon(1e-14));
        CHECK(fc.j.b == 1.0);
        CHECK(fc.j.plus == 0.0);
        CHECK(!fc.validity_warning);
    }
    SUBCASE("resonant J growth") {
        const auto fc = closed_form_F_example_iii(1.0, 0.01, D2Mode::Resonant, 10.0);
        CHECK(fc.j.plus == doctest::Approx(0.05).epsilon(1e-14));
        CHECK(fc.j.minus == 0.0);
        CHECK(fc.j.b == 10.0);
    }
    SUBCASE("resonant F tracks the Mathieu quadrature to the RWA error") {
        const double d2 = 0.01, tau = 30.0;
        CouplingSpec s;
        s.g_form = GForm::Constant;
        s.g0 = 1.0;
        s.d2_form = DriveForm::CosModulated;
        s.d2 = d2;
        s.omega_d2 = 2.0;
        const auto mech = solve_mechanics(s, tau);
        const auto fq = compute_F(s, mech, tau);
        const auto fc = closed_form_F_example_iii(1.0, d2, D2Mode::Resonant, tau);
        CHECK(rel(fc.f.f_nabp, fq.f_nabp) < 5e-2);
    }
    SUBCASE("validity guard") {
        CHECK_THROWS_AS(closed_form_F_example_iii(1.0, 0.25, D2Mode::Constant, 1.0),
                        std::invalid_argument);
        CHECK(closed_form_F_example_iii(1.0, 0.08, D2Mode::Constant, 1.0).validity_warning);
    }
}

TEST_CASE("closed-form derivatives") {
    SUBCASE("theta = d1 on example (ii): linearity in d1") {
        auto spec = spec_ii(1.2, 0.7, 0.6);
        const double tau = 4.2;
        const auto d = derivatives_wrt_theta(spec, tau, DerivativeMethod::ClosedForm);
        const auto fc = closed_form_F_example_ii(1.2, 0.7, 0.6, tau);
        CHECK(d.f_bp == doctest::Approx(fc.f.f_bp / 0.7).epsilon(1e-13));
        CHECK(d.f_bm == doctest::Approx(fc.f.f_bm / 0.7).epsilon(1e-13));
        CHECK(d.f_na == doctest::Approx(fc.f.f_na / 0.7).epsilon(1e-13));
        CHECK(d.f_na2 == 0.0);
        CHECK(d.dj_b == 0.0);
        CHECK(d.dj_plus == 0.0);
    }
    SUBCASE("theta = g0 on example (i): closed form vs finite differences") {
        auto spec = spec_i(1.0, 0.5, 0.8);
        const double tau = 5.0;
        const auto dc = derivatives_wrt_theta(spec, tau, DerivativeMethod::ClosedForm);
        const auto df = derivatives_wrt_theta(spec, tau, DerivativeMethod::FiniteDiff, 1e-6);
        CHECK(rel(df.f_na2, dc.f_na2) < 1e-6);
        CHECK(rel(df.f_nabp, dc.f_nabp) < 1e-6);
        CHECK(rel(df.f_nabm, dc.f_nabm) < 1e-6);
    }
    SUBCASE("theta = epsilon on example (i): closed form vs finite differences") {
        auto spec = spec_i(0.8, 0.4, 1.3);
        spec.theta = Theta::Epsilon;
        const double tau = 6.0;
        const auto dc = derivatives_wrt_theta(spec, tau, DerivativeMethod::ClosedForm);
        const auto df = derivatives_wrt_theta(spec, tau, DerivativeMethod::FiniteDiff);
        CHECK(rel(df.f_na2, dc.f_na2) < 1e-6);
        CHECK(rel(df.f_nabp, dc.f_nabp) < 1e-6);
    }
    SUBCASE("unsupported pair raises, caller can fall back") {
        auto spec = spec_i(1.0, 0.5, 0.8);
        spec.theta = Theta::OmegaG;
        CHECK_THROWS_AS(derivatives_wrt_theta(spec, 3.0, DerivativeMethod::ClosedForm),
                        UnsupportedDerivative);
        const auto d = derivatives_wrt_theta(spec, 3.0, DerivativeMethod::FiniteDiff);
        CHECK(std::isfinite(d.f_na2));
    }
    SUBCASE("theta = d2 resonant approximation derivative") {
        CouplingSpec s;
        s.g_form = GForm::Constant;
        s.g0 = 1.0;
        s.d2_form = DriveForm::CosModulated;
        s.d2 = 0.01;
        s.omega_d2 = 2.0;
        s.theta = Theta::D2;
        const auto d = derivatives_wrt_theta(s, 10.0, DerivativeMethod::ClosedForm);
        CHECK(d.dj_plus == doctest::Approx(5.0).epsilon(1e-14));
        CHECK(d.dj_b == 0.0);
    }
}

TEST_CASE("finite-difference step halving is consistent") {
    CouplingSpec s;
    s.g_form = GForm::Constant;
    s.g0 = 0.7;
    s.d2_form = DriveForm::CosModulated;
    s.d2 = 0.05;
    s.omega_d2 = 2.0;
    s.theta = Theta::D2;
    const auto d1 = derivatives_wrt_theta(s, 5.0, DerivativeMethod::FiniteDiff, 1e-5);
    const auto d2 = derivatives_wrt_theta(s, 5.0, DerivativeMethod::FiniteDiff, 5e-6);
    CHECK(rel(d1.f_na2, d2.f_na2) < 1e-5);
    CHECK(rel(d1.dj_plus, d2.dj_plus) < 1e-5);
}

TEST_CASE("epsilon-order groups of the long F_Na2 match quadrature") {
    // F_Na2 is a quadratic polynomial in eps; extract the eps^0, eps^1 and
    // eps^2 groups from the quadrature by polynomial sampling and compare
    // against the printed summand groups.
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> uw(0.1, 2.4), ut(1.0, 15.0);
    for (int it = 0; it < 5; ++it) {
        const double w = uw(rng), tau = ut(rng);
        if (std::abs(w - 1.0) < 0.05) continue;
        const double eps = 0.3;
        auto quad = [&](double e) {
            CouplingSpec s = spec_i(1.0, e, w);
            if (e == 0.0) s.g_form = GForm::SineModulated;  // keep the modulated form
            const auto mech = solve_mechanics(s, tau);
            return compute_F(s, mech, tau).f_na2;
        };
        const double f0 = quad(0.0), fp = quad(eps), fm = quad(-eps);
        const double t0 = f0;
        const double t1 = (fp - fm) / (2 * eps);
        const double t2 = (fp + fm - 2 * f0) / (2 * eps * eps);
        // closed-form groups via linearity in the implementation
        const double c0 = closed_form_F_example_i(1.0, 0.0, w, tau).f.f_na2;
        const double cp = closed_form_F_example_i(1.0, eps, w, tau).f.f_na2;
        const double cm = closed_form_F_example_i(1.0, -eps, w, tau).f.f_na2;
        const double c1 = (cp - cm) / (2 * eps);
        const double c2 = (cp + cm - 2 * c0) / (2 * eps * eps);
        CHECK(std::abs(t0 - c0) < 1e-7 * std::max(1.0, std::abs(c0)));
        CHECK(std::abs(t1 - c1) < 1e-6 * std::max(1.0, std::abs(c1)));
        CHECK(std::abs(t2 - c2) < 1e-4 * std::max(1.0, std::abs(c2)));
    }
}

TEST_CASE("resonance-branch continuity") {
    // Just outside the switch window the general branch must (a) still agree
    // with the quadrature despite the growing cancellation, and (b) approach
    // the resonance-limit expressions. The resonance comparison uses a short
    // tau: the secular terms make the true Omega-derivative of F grow like
    // eps tau^2, so 1e-5 agreement at |Omega - 1| = 1e-4 only holds early.
    SUBCASE("general branch stays accurate at |Omega - 1| = 1e-4") {
        const double tau = 6.0;
        for (double w : {1.0 - 1e-4, 1.0 + 1e-4}) {
            const auto spec1 = spec_i(1.0, 0.5, w);
            const auto mech1 = solve_mechanics(spec1, tau);
            check_close(compute_F(spec1, mech1, tau),
                        closed_form_F_example_i(1.0, 0.5, w, tau).f, 1e-7);
            const auto spec2 = spec_ii(1.0, 0.8, w);
            const auto mech2 = solve_mechanics(spec2, tau);
            check_close(compute_F(spec2, mech2, tau),
                        closed_form_F_example_ii(1.0, 0.8, w, tau).f, 1e-7);
        }
    }
    SUBCASE("example (i) approaches the resonance list") {
        const double tau = 0.8;
        const auto res = closed_form_F_example_i(1.0, 0.2, 1.0, tau);
        for (double w : {1.0 - 1e-4, 1.0 + 1e-4}) {
            const auto gen = closed_form_F_example_i(1.0, 0.2, w, tau);
            CHECK(std::abs(gen.f.f_na2 - res.f.f_na2) <
                  1e-5 * std::max(1.0, std::abs(res.f.f_na2)));
            CHECK(std::abs(gen.f.f_nabp - res.f.f_nabp) <
                  1e-5 * std::max(1.0, std::abs(res.f.f_nabp)));
            CHECK(std::abs(gen.f.f_nabm - res.f.f_nabm) <
                  1e-5 * std::max(1.0, std::abs(res.f.f_nabm)));
        }
    }
    SUBCASE("example (ii) approaches the resonance list") {
        const double tau = 0.8;
        const auto res = closed_form_F_example_ii(1.0, 0.5, 1.0, tau);
        for (double w : {1.0 - 1e-4, 1.0 + 1e-4}) {
            const auto gen = closed_form_F_example_ii(1.0, 0.5, w, tau);
            CHECK(std::abs(gen.f.f_na - res.f.f_na) <
                  1e-5 * std::max(1.0, std::abs(res.f.f_na)));
            CHECK(std::abs(gen.f.f_bp - res.f.f_bp) <
                  1e-5 * std::max(1.0, std::abs(res.f.f_bp)));
            CHECK(std::abs(gen.f.f_bm - res.f.f_bm) <
                  1e-5 * std::max(1.0, std::abs(res.f.f_bm)));
        }
    }
}
