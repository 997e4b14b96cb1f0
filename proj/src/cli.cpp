#include "omqfi/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "omqfi/errors.hpp"
#include "omqfi/mechanics.hpp"
#include "omqfi/oracle.hpp"

namespace omqfi::cli {

namespace {

constexpr double pi = std::numbers::pi;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_config(const std::string& msg) {
    throw std::invalid_argument("config: " + msg);
}

using Section = std::map<std::string, std::string>;

struct RawConfig {
    std::map<std::string, Section> sections;
};

RawConfig read_ini(std::istream& in) {
    RawConfig raw;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') bad_config("unterminated section at line " +
                                               std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            raw.sections[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos || section.empty()) {
            bad_config("expected key = value at line " + std::to_string(lineno));
        }
        const std::string key = trim(line.substr(0, eq));
        raw.sections[section][key] = trim(line.substr(eq + 1));
    }
    return raw;
}

class SectionReader {
  public:
    SectionReader(const Section& s, std::string name) : s_(s), name_(std::move(name)) {}

    ~SectionReader() = default;

    std::optional<std::string> get(const std::string& key) {
        seen_.insert(key);
        auto it = s_.find(key);
        if (it == s_.end()) return std::nullopt;
        return it->second;
    }

    double number(const std::string& key, double fallback) {
        auto v = get(key);
        if (!v) return fallback;
        try {
            std::size_t used = 0;
            const double x = std::stod(*v, &used);
            if (used != v->size()) throw std::invalid_argument("");
            return x;
        } catch (...) {
            bad_config("[" + name_ + "] " + key + ": not a number: " + *v);
        }
    }

    std::optional<double> number_opt(const std::string& key) {
        if (!get(key)) return std::nullopt;
        return number(key, 0.0);
    }

    int integer(const std::string& key, int fallback) {
        const double x = number(key, fallback);
        if (x != std::floor(x)) bad_config("[" + name_ + "] " + key + ": not an integer");
        return static_cast<int>(x);
    }

    void reject_unknown() const {
        for (const auto& [k, v] : s_) {
            if (!seen_.count(k)) bad_config("[" + name_ + "] unknown key: " + k);
        }
    }

  private:
    const Section& s_;
    std::string name_;
    std::set<std::string> seen_;
};

GForm parse_g_form(const std::string& v) {
    if (v == "constant") return GForm::Constant;
    if (v == "sine") return GForm::SineModulated;
    bad_config("g_form must be constant|sine, got " + v);
}

DriveForm parse_drive_form(const std::string& v, const std::string& key) {
    if (v == "zero") return DriveForm::Zero;
    if (v == "constant") return DriveForm::Constant;
    if (v == "cos") return DriveForm::CosModulated;
    bad_config(key + " must be zero|constant|cos, got " + v);
}

Theta parse_theta(const std::string& v) {
    if (v == "g0") return Theta::G0;
    if (v == "epsilon") return Theta::Epsilon;
    if (v == "omega_g") return Theta::OmegaG;
    if (v == "d1") return Theta::D1;
    if (v == "omega_d1") return Theta::OmegaD1;
    if (v == "d2") return Theta::D2;
    if (v == "omega_d2") return Theta::OmegaD2;
    bad_config("theta must be one of g0|epsilon|omega_g|d1|omega_d1|d2|omega_d2");
}

Scenario parse_scenario(const std::string& v) {
    if (v == "g0") return Scenario::G0;
    if (v == "d1") return Scenario::D1;
    if (v == "d2const") return Scenario::D2Const;
    if (v == "d2res") return Scenario::D2Res;
    bad_config("scenario must be g0|d1|d2const|d2res, got " + v);
}

Axis parse_axis(const std::string& v) {
    if (v == "time") return Axis::Time;
    if (v == "frequency") return Axis::Frequency;
    bad_config("axis must be time|frequency, got " + v);
}

const char* branch_name(Branch b) {
    switch (b) {
        case Branch::General: return "general";
        case Branch::Resonant: return "resonant";
        case Branch::Constant: return "constant";
        case Branch::Approximate: return "approximate";
    }
    return "?";
}

QfiResult evaluate_point(const SweepRequest& req, double axis_value) {
    const CouplingSpec& s = req.spec;
    const double tau = req.axis == Axis::Time ? axis_value : req.fixed_tau;
    switch (req.scenario) {
        case Scenario::G0: {
            const double eps = s.g_form == GForm::SineModulated ? s.epsilon : 0.0;
            const double omega = req.axis == Axis::Frequency ? axis_value : s.omega_g;
            return qfi_g0_general(s.g0, eps, omega, tau, req.probe);
        }
        case Scenario::D1: {
            const double omega = req.axis == Axis::Frequency
                                     ? axis_value
                                     : (s.d1_form == DriveForm::Constant ? 0.0
                                                                         : s.omega_d1);
            return qfi_d1_general(s.g0, s.d1, omega, tau, req.probe);
        }
        case Scenario::D2Const:
            return qfi_d2_const_app(s.g0, tau, req.probe);
        case Scenario::D2Res:
            return qfi_d2_res_app(s.g0, tau, req.probe);
    }
    throw std::logic_error("unreachable scenario");
}

}  // namespace

std::string format_double(double value) {
    if (value == 0.0) return "0";  // avoid the cosmetic "-0"
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

unsigned sweep_thread_count() {
    if (const char* env = std::getenv("OMQFI_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n >= 1 && n <= 512) return static_cast<unsigned>(n);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void SweepRequest::validate() const {
    spec.validate();
    probe.validate();
    if (count < 2) throw std::invalid_argument("sweep: count must be >= 2");
    if (!(start < stop)) throw std::invalid_argument("sweep: start must be < stop");
    if (axis == Axis::Time && start < 0.0) {
        throw std::invalid_argument("sweep: time axis must start at tau >= 0");
    }
    if (axis == Axis::Frequency && !(fixed_tau > 0.0)) {
        throw std::invalid_argument("sweep: frequency axis needs tau > 0");
    }
    switch (scenario) {
        case Scenario::G0:
            if (spec.theta != Theta::G0) {
                throw std::invalid_argument("sweep: scenario g0 requires theta = g0");
            }
            break;
        case Scenario::D1:
            if (spec.theta != Theta::D1) {
                throw std::invalid_argument("sweep: scenario d1 requires theta = d1");
            }
            break;
        case Scenario::D2Const:
        case Scenario::D2Res:
            if (spec.theta != Theta::D2) {
                throw std::invalid_argument("sweep: d2 scenarios require theta = d2");
            }
            if (axis == Axis::Frequency) {
                throw std::invalid_argument(
                    "sweep: d2 scenarios are fixed-frequency; use the time axis");
            }
            break;
    }
}

std::vector<SweepRow> run_sweep(const SweepRequest& req) {
    req.validate();
    const int n = req.count;
    std::vector<SweepRow> rows(n);

    const unsigned n_threads = std::min<unsigned>(sweep_thread_count(), n);
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            try {
                const double x =
                    req.start + (req.stop - req.start) * i / static_cast<double>(n - 1);
                rows[i].axis_value = x;
                rows[i].qfi = evaluate_point(req, x);
            } catch (...) {
                std::scoped_lock lk(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);

    if (!req.output_path.empty()) {
        std::ofstream out(req.output_path);
        if (!out) throw std::runtime_error("sweep: cannot open " + req.output_path);
        out << "axis_value,qfi,term_A,term_AB,term_B,term_C,term_FG,branch\n";
        for (const auto& row : rows) {
            out << format_double(row.axis_value) << ',' << format_double(row.qfi.value)
                << ',' << format_double(row.qfi.terms.a_block) << ','
                << format_double(row.qfi.terms.ab_cross) << ','
                << format_double(row.qfi.terms.b_block) << ','
                << format_double(row.qfi.terms.c_block) << ','
                << format_double(row.qfi.terms.fg_block) << ','
                << branch_name(row.qfi.branch) << '\n';
        }
        if (!out) throw std::runtime_error("sweep: write failed for " + req.output_path);
    }
    return rows;
}

Table1Report table1(const Table1Options& opt) {
    const double omega_m = 2.0 * pi * 100.0;
    const double temperature = 200e-9;
    const double tau = 2.0 * pi;
    const double g0 = 100.0;
    const double eps = 0.5;
    const double mu2 = opt.mu2_override.value_or(1e6);

    const double r_T = r_T_from_temperature(temperature, omega_m);
    ProbeState probe{std::sqrt(mu2), r_T};

    Table1Report rep;
    auto add = [&rep](std::string label, double computed, double reference) {
        Table1Row row;
        row.label = std::move(label);
        row.computed = computed;
        row.reference = reference;
        row.rel_deviation = std::abs(computed - reference) / std::abs(reference);
        rep.rows.push_back(std::move(row));
    };

    add("r_T", r_T, 2.56);
    const double i_g0 = qfi_g0_res(g0, eps, tau, probe).value;
    add("I_g0_res", i_g0, 3.02e25);
    const double i_d1 = qfi_d1_res(g0, 1.0, tau, probe).value;
    add("I_d1_res", i_d1, 1.58e12);
    const double i_d2 = qfi_d2_res_app(g0, tau, probe).value;
    add("I_d2_res_app", i_d2, 6.32e28);

    if (opt.sensitivity) {
        auto sens = [](double qfi) {
            const auto s = cramer_rao(qfi, 1);
            return s ? *s : std::numeric_limits<double>::infinity();
        };
        rep.rows[1].sensitivity = sens(i_g0);
        rep.rows[1].sensitivity_label = "dg0";
        rep.rows[2].sensitivity = sens(i_d1);
        rep.rows[2].sensitivity_label = "dd1";
        // frequency-shift sensitivity in rad/s after restoring dimensions
        rep.rows[3].sensitivity = sens(dimensionful_rescale(i_d2, 1.0 / omega_m));
        rep.rows[3].sensitivity_label = "d(domega_m) [rad/s]";
    }

    rep.max_rel_deviation = 0.0;
    for (const auto& row : rep.rows) {
        rep.max_rel_deviation = std::max(rep.max_rel_deviation, row.rel_deviation);
    }
    rep.pass = rep.max_rel_deviation <= 0.01;
    return rep;
}

namespace {

struct OracleInstance {
    std::string label;
    CouplingSpec spec;
    ProbeState probe;
    double tau;
    int n_cav, n_mech;
};

CouplingSpec spec_example_i(double g0, double eps, double omega_g) {
    CouplingSpec s;
    if (eps == 0.0) {
        s.g_form = GForm::Constant;
    } else {
        s.g_form = GForm::SineModulated;
        s.epsilon = eps;
        s.omega_g = omega_g;
    }
    s.g0 = g0;
    s.theta = Theta::G0;
    return s;
}

CouplingSpec spec_example_ii(double g0, double d1, double omega_d1) {
    CouplingSpec s;
    s.g_form = GForm::Constant;
    s.g0 = g0;
    s.d1 = d1;
    if (omega_d1 == 0.0) {
        s.d1_form = DriveForm::Constant;
    } else {
        s.d1_form = DriveForm::CosModulated;
        s.omega_d1 = omega_d1;
    }
    s.theta = Theta::D1;
    return s;
}

std::vector<OracleInstance> oracle_instances(const std::string& preset) {
    auto inst_i = [](double g0, double eps, double og, double mu, double rT, double tau,
                     int nc, int nm) {
        OracleInstance o;
        std::ostringstream label;
        label << "i: g0=" << g0 << " eps=" << eps << " Og=" << og << " mu=" << mu
              << " rT=" << rT << " tau=" << tau;
        o.label = label.str();
        o.spec = spec_example_i(g0, eps, og);
        o.probe = ProbeState{mu, rT};
        o.tau = tau;
        o.n_cav = nc;
        o.n_mech = nm;
        return o;
    };
    auto inst_ii = [](double g0, double d1, double od, double mu, double rT, double tau,
                      int nc, int nm) {
        OracleInstance o;
        std::ostringstream label;
        label << "ii: g0=" << g0 << " d1=" << d1 << " Od1=" << od << " mu=" << mu
              << " rT=" << rT << " tau=" << tau;
        o.label = label.str();
        o.spec = spec_example_ii(g0, d1, od);
        o.probe = ProbeState{mu, rT};
        o.tau = tau;
        o.n_cav = nc;
        o.n_mech = nm;
        return o;
    };

    std::vector<OracleInstance> all = {
        inst_i(0.10, 0.3, 1.0, 1.0, 0.3, 2.0, 16, 24),
        inst_i(0.15, 0.5, 0.7, 1.0, 0.0, 3.0, 16, 24),
        inst_i(0.20, 0.4, 1.3, 0.8, 0.5, 2.5, 16, 24),
        inst_i(0.05, 0.8, 0.5, 1.5, 0.2, 4.0, 20, 28),
        inst_i(0.30, 0.2, 1.0, 0.6, 0.4, 3.0, 16, 28),
        inst_i(0.12, 0.0, 0.0, 1.2, 0.1, 3.5, 16, 24),
        inst_ii(0.10, 0.2, 0.0, 1.0, 0.0, pi, 16, 24),
        inst_ii(0.20, 0.3, 0.6, 1.5, 0.4, 3.0, 20, 30),
        inst_ii(0.15, 0.5, 1.0, 1.0, 0.3, 2.0, 16, 24),
        inst_ii(0.30, 0.1, 1.5, 0.8, 0.5, 2.5, 16, 26),
        inst_ii(0.05, 0.4, 0.3, 2.0, 0.1, 4.0, 24, 30),
        inst_ii(0.25, 0.25, 1.0, 1.2, 0.25, 3.5, 22, 30),
    };
    if (preset == "default") return all;
    if (preset == "quick") return {all[0], all[8]};
    throw std::invalid_argument("oracle_check: unknown preset " + preset);
}

double analytic_qfi(const OracleInstance& inst) {
    const CouplingSpec& s = inst.spec;
    if (s.theta == Theta::G0) {
        const double eps = s.g_form == GForm::SineModulated ? s.epsilon : 0.0;
        return qfi_g0_general(s.g0, eps, s.omega_g, inst.tau, inst.probe).value;
    }
    const double omega = s.d1_form == DriveForm::Constant ? 0.0 : s.omega_d1;
    return qfi_d1_general(s.g0, s.d1, omega, inst.tau, inst.probe).value;
}

}  // namespace

OracleCheckReport oracle_check(const std::string& preset,
                               std::optional<double> dt_override) {
    OracleConfig cfg;
    cfg.convergence = 1e-5;  // QFI error stays ~1e-7 here; see the oracle tests
    if (dt_override) {
        cfg.dt_init = *dt_override;
        cfg.max_halvings = 3;  // a deliberately coarse run must fail, not crawl
    }

    OracleCheckReport rep;
    for (const auto& inst : oracle_instances(preset)) {
        const TruncatedSpace space = build_space(inst.n_cav, inst.n_mech);
        OracleCheckRow row;
        row.label = inst.label;
        row.analytic = analytic_qfi(inst);
        row.oracle = qfi_oracle(space, inst.spec, inst.probe, inst.tau, 0.0, cfg);
        row.rel_error = std::abs(row.analytic - row.oracle) / std::abs(row.analytic);
        rep.max_rel_error = std::max(rep.max_rel_error, row.rel_error);
        rep.rows.push_back(std::move(row));
    }
    rep.pass = rep.max_rel_error < 1e-3;
    return rep;
}

namespace {

CouplingSpec parse_couplings(SectionReader& r) {
    CouplingSpec s;
    if (auto v = r.get("g_form")) s.g_form = parse_g_form(*v);
    s.g0 = r.number("g0", 0.0);
    s.epsilon = r.number("epsilon", 0.0);
    s.omega_g = r.number("omega_g", 0.0);
    if (auto v = r.get("d1_form")) s.d1_form = parse_drive_form(*v, "d1_form");
    s.d1 = r.number("d1", 0.0);
    s.omega_d1 = r.number("omega_d1", 0.0);
    if (auto v = r.get("d2_form")) s.d2_form = parse_drive_form(*v, "d2_form");
    s.d2 = r.number("d2", 0.0);
    s.omega_d2 = r.number("omega_d2", 0.0);
    if (auto v = r.get("theta")) s.theta = parse_theta(*v);
    r.reject_unknown();
    s.validate();
    return s;
}

}  // namespace

Config parse_config(std::istream& in) {
    const RawConfig raw = read_ini(in);
    for (const auto& [name, _] : raw.sections) {
        if (name != "couplings" && name != "probe" && name != "units" &&
            name != "sweep" && name != "mechanics") {
            bad_config("unknown section [" + name + "]");
        }
    }
    Config cfg;

    if (auto it = raw.sections.find("couplings"); it != raw.sections.end()) {
        SectionReader r(it->second, "couplings");
        cfg.spec = parse_couplings(r);
    }

    if (auto it = raw.sections.find("units"); it != raw.sections.end()) {
        SectionReader r(it->second, "units");
        PhysicalUnits u;
        u.omega_m = r.number("omega_m", 0.0);
        u.mass = r.number_opt("mass");
        u.temperature = r.number_opt("temperature");
        r.reject_unknown();
        u.validate();
        cfg.units = u;
    }

    if (auto it = raw.sections.find("probe"); it != raw.sections.end()) {
        SectionReader r(it->second, "probe");
        cfg.probe.mu_c = {r.number("mu_re", 0.0), r.number("mu_im", 0.0)};
        const auto r_T = r.number_opt("r_T");
        r.reject_unknown();
        if (r_T) {
            cfg.probe.r_T = *r_T;
        } else if (cfg.units && cfg.units->temperature) {
            cfg.probe.r_T =
                r_T_from_temperature(*cfg.units->temperature, cfg.units->omega_m);
        }
        cfg.probe.validate();
    }

    if (auto it = raw.sections.find("sweep"); it != raw.sections.end()) {
        SectionReader r(it->second, "sweep");
        SweepRequest req;
        req.spec = cfg.spec;
        req.probe = cfg.probe;
        req.units = cfg.units;
        if (auto v = r.get("scenario")) req.scenario = parse_scenario(*v);
        else bad_config("[sweep] scenario is required");
        if (auto v = r.get("axis")) req.axis = parse_axis(*v);
        req.start = r.number("start", 0.0);
        req.stop = r.number("stop", 0.0);
        req.count = r.integer("count", 0);
        req.fixed_tau = r.number("tau", 0.0);
        if (auto v = r.get("output")) req.output_path = *v;
        r.reject_unknown();
        req.validate();
        cfg.sweep = req;
    }

    if (auto it = raw.sections.find("mechanics"); it != raw.sections.end()) {
        SectionReader r(it->second, "mechanics");
        MechanicsDumpRequest req;
        req.spec = cfg.spec;
        req.tau_max = r.number("tau_max", 0.0);
        req.tol = r.number("tol", 1e-10);
        if (auto v = r.get("output")) req.output_path = *v;
        r.reject_unknown();
        if (!(req.tau_max > 0.0)) bad_config("[mechanics] tau_max must be > 0");
        cfg.mechanics = req;
    }
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    return parse_config(in);
}

void mechanics_dump(const MechanicsDumpRequest& req) {
    const MechanicsSolution sol = solve_mechanics(req.spec, req.tau_max, req.tol);
    std::ostream* out = nullptr;
    std::ofstream file;
    if (req.output_path.empty()) bad_config("[mechanics] output path is required");
    file.open(req.output_path);
    if (!file) throw std::runtime_error("mechanics dump: cannot open " + req.output_path);
    out = &file;

    *out << "tau,p11,p11_dot,ip22,ip22_dot,re_xi,im_xi,re_alpha,im_alpha,re_beta,"
            "im_beta,j_plus,j_minus,j_b\n";
    for (std::size_t k = 0; k < sol.grid.size(); ++k) {
        *out << format_double(sol.grid[k]) << ',' << format_double(sol.p11[k]) << ','
             << format_double(sol.p11_dot[k]) << ',' << format_double(sol.ip22[k]) << ','
             << format_double(sol.ip22_dot[k]) << ',' << format_double(sol.xi[k].real())
             << ',' << format_double(sol.xi[k].imag()) << ','
             << format_double(sol.alpha[k].real()) << ','
             << format_double(sol.alpha[k].imag()) << ','
             << format_double(sol.beta[k].real()) << ','
             << format_double(sol.beta[k].imag()) << ','
             << format_double(sol.j_plus[k]) << ',' << format_double(sol.j_minus[k])
             << ',' << format_double(sol.j_b[k]) << '\n';
    }
    if (!*out) throw std::runtime_error("mechanics dump: write failed");
}

}  // namespace omqfi::cli
