#include "omqfi/oracle.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <vector>

#include "omqfi/errors.hpp"

namespace omqfi {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using std::complex;

constexpr complex<double> I1{0.0, 1.0};

MatrixXd ladder(int n) {
    MatrixXd m = MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) m(k - 1, k) = std::sqrt(static_cast<double>(k));
    return m;
}

// kron(A, B) with A acting on the cavity index and B on the mechanical one
template <typename MA, typename MB>
MatrixXcd kron(const MA& a, const MB& b) {
    MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
                complex<double>(a(i, j)) * b.template cast<complex<double>>();
    return out;
}

// coefficients of H(tau) = c_I I + Nb + g_bp Bp + d2 (Bp2 + 2 Nb) acting on one
// cavity-number block (everything real symmetric)
struct BlockCoeffs {
    double c_I, g_bp, d2;
};

BlockCoeffs block_coeffs(const CouplingSpec& spec, double tau, int n_a, double omega_c) {
    const double g = eval_G(spec, tau);
    const double d1 = eval_D1(spec, tau);
    const double d2 = eval_D2(spec, tau);
    return {omega_c * n_a + d2, d1 - g * n_a, d2};
}

// exp(-i H dt) for a real symmetric H
MatrixXcd expm_real_sym(const MatrixXd& h, double dt) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(h);
    const auto& v = es.eigenvectors();
    VectorXcd phases(h.rows());
    for (int k = 0; k < h.rows(); ++k) phases(k) = std::exp(-I1 * es.eigenvalues()(k) * dt);
    return (v * phases.asDiagonal() * v.transpose()).eval();
}

MatrixXcd evolve_steps_block(const TruncatedSpace& space, const CouplingSpec& spec,
                             double tau_final, int n_steps, double omega_c) {
    const int nm = space.n_mech;
    const double dt = tau_final / n_steps;
    const MatrixXd nb2 = 2.0 * space.nb;
    MatrixXcd full = MatrixXcd::Zero(space.dim(), space.dim());
    MatrixXd h(nm, nm);
    for (int na = 0; na < space.n_cav; ++na) {
        MatrixXcd u = MatrixXcd::Identity(nm, nm);
        for (int k = 0; k < n_steps; ++k) {
            const double t_mid = (k + 0.5) * dt;
            const BlockCoeffs c = block_coeffs(spec, t_mid, na, omega_c);
            h = space.nb + c.g_bp * space.bp + c.d2 * (space.bp2 + nb2);
            h.diagonal().array() += c.c_I;
            u = (expm_real_sym(h, dt) * u).eval();
        }
        full.block(na * nm, na * nm, nm, nm) = u;
    }
    return full;
}

MatrixXcd evolve_steps_dense(const TruncatedSpace& space, const CouplingSpec& spec,
                             double tau_final, int n_steps, double omega_c) {
    const double dt = tau_final / n_steps;
    MatrixXcd u = MatrixXcd::Identity(space.dim(), space.dim());
    for (int k = 0; k < n_steps; ++k) {
        const double t_mid = (k + 0.5) * dt;
        const MatrixXcd h = hamiltonian_matrix(space, spec, t_mid, {}, omega_c);
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
        VectorXcd phases(space.dim());
        for (int j = 0; j < space.dim(); ++j)
            phases(j) = std::exp(-I1 * es.eigenvalues()(j) * dt);
        u = (es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint() * u)
                .eval();
    }
    return u;
}

// Max-norm over the entries whose mechanical indices stay below the
// truncation edge; the edge rows carry no physical content and would
// otherwise dominate the step-error estimate.
double interior_max_norm(const MatrixXcd& m, int n_cav, int n_mech, int edge) {
    const int keep = n_mech - edge;
    double worst = 0.0;
    for (int na = 0; na < n_cav; ++na)
        for (int nb = 0; nb < n_cav; ++nb)
            worst = std::max(worst, m.block(na * n_mech, nb * n_mech, keep, keep)
                                        .cwiseAbs()
                                        .maxCoeff());
    return worst;
}

template <typename Stepper>
MatrixXcd evolve_converged(const Stepper& stepper, double tau_final, int n_cav,
                           int n_mech, const OracleConfig& cfg, int* steps_used) {
    const int edge = std::min(std::max(1, cfg.edge_margin), n_mech / 2);
    int n = std::max(2, static_cast<int>(std::ceil(tau_final / cfg.dt_init)));
    MatrixXcd u_prev = stepper(n);
    for (int halving = 0; halving < cfg.max_halvings; ++halving) {
        n *= 2;
        MatrixXcd u = stepper(n);
        const double diff = interior_max_norm(u - u_prev, n_cav, n_mech, edge);
        if (diff < cfg.convergence) {
            if (steps_used) *steps_used = n;
            return u;
        }
        u_prev.swap(u);
    }
    throw ConvergenceError("evolve: step halving did not converge to " +
                           std::to_string(cfg.convergence) + " within " +
                           std::to_string(cfg.max_halvings) + " halvings");
}

}  // namespace

TruncatedSpace build_space(int n_cav, int n_mech) {
    if (n_cav < 2 || n_mech < 2) {
        throw std::invalid_argument("build_space: dimensions must be >= 2");
    }
    TruncatedSpace s;
    s.n_cav = n_cav;
    s.n_mech = n_mech;

    s.b = ladder(n_mech);
    s.a = ladder(n_cav);
    s.nb = s.b.transpose() * s.b;
    s.bp = s.b.transpose() + s.b;
    const MatrixXd b2 = s.b * s.b;
    s.bp2 = b2.transpose() + b2;
    s.bm = I1 * (s.b.transpose() - s.b).cast<complex<double>>();
    s.bm2 = I1 * (b2.transpose() - b2).cast<complex<double>>();

    const MatrixXd na_c = s.a.transpose() * s.a;
    const MatrixXd id_m = MatrixXd::Identity(n_mech, n_mech);
    const MatrixXd id_c = MatrixXd::Identity(n_cav, n_cav);

    s.N_a = kron(na_c, id_m);
    s.N_a2 = kron((na_c * na_c).eval(), id_m);
    s.N_b = kron(id_c, s.nb);
    s.B_plus = kron(id_c, s.bp);
    s.B_minus = kron(id_c, s.bm);
    s.B2_plus = kron(id_c, s.bp2);
    s.B2_minus = kron(id_c, s.bm2);
    s.NaB_plus = kron(na_c, s.bp);
    s.NaB_minus = kron(na_c, s.bm);
    return s;
}

Eigen::MatrixXcd hamiltonian_matrix(const TruncatedSpace& space, const CouplingSpec& spec_in,
                                    double tau, std::optional<double> theta_override,
                                    double omega_c) {
    const CouplingSpec spec =
        theta_override ? with_theta_value(spec_in, *theta_override) : spec_in;
    const double g = eval_G(spec, tau);
    const double d1 = eval_D1(spec, tau);
    const double d2 = eval_D2(spec, tau);
    // (b^dag + b)^2 expanded as B2+ + 2 Nb + 1
    MatrixXcd h = omega_c * space.N_a + space.N_b - g * space.NaB_plus +
                  d1 * space.B_plus + d2 * (space.B2_plus + 2.0 * space.N_b);
    h.diagonal().array() += d2;
    return h;
}

Eigen::MatrixXcd evolve(const TruncatedSpace& space, const CouplingSpec& spec_in,
                        double tau_final, const OracleConfig& cfg,
                        std::optional<double> theta_override) {
    if (!(tau_final > 0.0)) throw std::invalid_argument("evolve: tau_final must be > 0");
    const CouplingSpec spec =
        theta_override ? with_theta_value(spec_in, *theta_override) : spec_in;
    if (cfg.block_fast_path) {
        return evolve_converged(
            [&](int n) {
                return evolve_steps_block(space, spec, tau_final, n, cfg.omega_c);
            },
            tau_final, space.n_cav, space.n_mech, cfg, nullptr);
    }
    return evolve_converged(
        [&](int n) { return evolve_steps_dense(space, spec, tau_final, n, cfg.omega_c); },
        tau_final, space.n_cav, space.n_mech, cfg, nullptr);
}

Eigen::MatrixXcd evolve_dense(const TruncatedSpace& space, const CouplingSpec& spec_in,
                              double tau_final, const OracleConfig& cfg,
                              std::optional<double> theta_override) {
    const CouplingSpec spec =
        theta_override ? with_theta_value(spec_in, *theta_override) : spec_in;
    return evolve_converged(
        [&](int n) { return evolve_steps_dense(space, spec, tau_final, n, cfg.omega_c); },
        tau_final, space.n_cav, space.n_mech, cfg, nullptr);
}

Eigen::VectorXcd coherent_vector(int n_cav, std::complex<double> mu) {
    VectorXcd c(n_cav);
    c(0) = 1.0;
    for (int k = 1; k < n_cav; ++k) c(k) = c(k - 1) * mu / std::sqrt(static_cast<double>(k));
    c *= std::exp(-0.5 * std::norm(mu));
    return c;
}

double qfi_oracle(const TruncatedSpace& space, const CouplingSpec& spec,
                  const ProbeState& probe, double tau, double h_fd,
                  const OracleConfig& cfg) {
    probe.validate();
    const int nm = space.n_mech;

    const VectorXcd coh = coherent_vector(space.n_cav, probe.mu_c);
    const double norm_defect = std::abs(1.0 - coh.squaredNorm());
    if (norm_defect > 1e-8) {
        throw TruncationError(
            "qfi_oracle: coherent-state norm defect " + std::to_string(norm_defect) +
            " exceeds 1e-8; enlarge the cavity truncation");
    }

    // Thermal weights, cut where they drop below 1e-12. The summed weight
    // beyond the usable levels (four below the edge) must be negligible:
    // sum_{k >= n} lambda_k = tanh^{2n}(r_T).
    const double t2 = std::tanh(probe.r_T) * std::tanh(probe.r_T);
    const int n_usable = nm - 4;
    if (std::pow(t2, n_usable) > 1e-10) {
        throw TruncationError(
            "qfi_oracle: thermal tail does not fit the mechanical truncation");
    }
    std::vector<double> lam;
    const double l0 = 1.0 / (std::cosh(probe.r_T) * std::cosh(probe.r_T));
    for (double l = l0; l > 1e-12 && static_cast<int>(lam.size()) < n_usable; l *= t2) {
        lam.push_back(l);
        if (t2 == 0.0) break;
    }
    const int n_th = static_cast<int>(lam.size());

    const double theta0 = theta_value(spec);
    const double h = h_fd > 0.0 ? h_fd : 1e-5 * std::max(1.0, std::abs(theta0));

    // converge the step count on the central evolution, reuse it for the shifts
    int n_steps = 0;
    MatrixXcd u0;
    {
        auto stepper = [&](int n) {
            return cfg.block_fast_path
                       ? evolve_steps_block(space, spec, tau, n, cfg.omega_c)
                       : evolve_steps_dense(space, spec, tau, n, cfg.omega_c);
        };
        u0 = evolve_converged(stepper, tau, space.n_cav, space.n_mech, cfg, &n_steps);
    }
    auto evolve_at = [&](double theta) {
        const CouplingSpec s = with_theta_value(spec, theta);
        return cfg.block_fast_path
                   ? evolve_steps_block(space, s, tau, n_steps, cfg.omega_c)
                   : evolve_steps_dense(space, s, tau, n_steps, cfg.omega_c);
    };

    // Truncation-leakage diagnostic: evolved probe mass on the top mechanical
    // levels, weighted by the thermal occupation of each level (the QFI sums
    // carry the same weights). The evolution is cavity-number preserving, so
    // the cavity truncation is covered by the coherent norm-defect check.
    {
        const int edge = std::max(1, cfg.edge_margin);
        double leaked = 0.0;
        for (int n = 0; n < n_th; ++n) {
            VectorXcd v = VectorXcd::Zero(space.dim());
            for (int na = 0; na < space.n_cav; ++na) v(na * nm + n) = coh(na);
            const VectorXcd psi = u0 * v;
            double mass = 0.0;
            for (int na = 0; na < space.n_cav; ++na)
                for (int m = nm - edge; m < nm; ++m) mass += std::norm(psi(na * nm + m));
            leaked += lam[n] * mass;
        }
        if (leaked > cfg.leak_tol) {
            char msg[128];
            std::snprintf(msg, sizeof msg,
                          "qfi_oracle: evolved probe leaks %.2e onto the mechanical "
                          "truncation edge",
                          leaked);
            throw TruncationError(msg);
        }
    }

    // Richardson-refined central difference of U
    const MatrixXcd d_coarse = (evolve_at(theta0 + h) - evolve_at(theta0 - h)) / (2.0 * h);
    const MatrixXcd d_fine = (evolve_at(theta0 + h / 2) - evolve_at(theta0 - h / 2)) / h;
    const MatrixXcd du = (4.0 * d_fine - d_coarse) / 3.0;

    MatrixXcd gen = -I1 * (u0.adjoint() * du);
    gen = 0.5 * (gen + gen.adjoint()).eval();

    // eigenstates |mu_c> (x) |n>
    std::vector<VectorXcd> basis(n_th), gen_basis(n_th);
    for (int n = 0; n < n_th; ++n) {
        VectorXcd v = VectorXcd::Zero(space.dim());
        for (int na = 0; na < space.n_cav; ++na) v(na * nm + n) = coh(na);
        basis[n] = v;
        gen_basis[n] = gen * v;
    }

    double qfi = 0.0;
    for (int n = 0; n < n_th; ++n) {
        const double h2 = gen_basis[n].squaredNorm();  // <n|H^2|n> (H hermitian)
        const double h1 = basis[n].dot(gen_basis[n]).real();
        qfi += 4.0 * lam[n] * (h2 - h1 * h1);
    }
    for (int n = 0; n < n_th; ++n) {
        for (int m = 0; m < n_th; ++m) {
            if (n == m) continue;
            const complex<double> el = basis[n].dot(gen_basis[m]);
            qfi -= 8.0 * lam[n] * lam[m] / (lam[n] + lam[m]) * std::norm(el);
        }
    }
    return qfi;
}

}  // namespace omqfi
