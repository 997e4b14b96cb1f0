#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "omqfi/cli.hpp"
#include "omqfi/errors.hpp"
#include "omqfi/qfi.hpp"

using namespace omqfi;
using namespace omqfi::cli;
constexpr double pi = std::numbers::pi;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/omqfi_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

const char* sweep_config = R"(
# oscillating-coupling sweep
[couplings]
g_form = sine
g0 = 1.0
epsilon = 0.5
omega_g = 1.0
theta = g0

[probe]
mu_re = 1.0
r_T = 0.0

[sweep]
scenario = g0
axis = time
start = 1.0
stop = 9.0
count = 5
output = OUTPUT
)";

std::string config_with_output(const std::string& tmpl, const std::string& path) {
    std::string s = tmpl;
    const auto pos = s.find("OUTPUT");
    s.replace(pos, 6, path);
    return s;
}

}  // namespace

TEST_CASE("format_double round-trips") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1e30, 1e30);
    for (int it = 0; it < 1000; ++it) {
        const double x = u(rng) * std::pow(10.0, static_cast<int>(it % 60) - 30);
        const double back = std::stod(format_double(x));
        CHECK(back == x);
    }
}

TEST_CASE("config parsing") {
    SUBCASE("full round trip") {
        std::istringstream in(config_with_output(sweep_config, "/tmp/x.csv"));
        const Config cfg = parse_config(in);
        CHECK(cfg.spec.g_form == GForm::SineModulated);
        CHECK(cfg.spec.g0 == 1.0);
        CHECK(cfg.spec.theta == Theta::G0);
        REQUIRE(cfg.sweep.has_value());
        CHECK(cfg.sweep->count == 5);
        CHECK(cfg.sweep->output_path == "/tmp/x.csv");
    }
    SUBCASE("unknown key rejected") {
        std::istringstream in("[couplings]\nbogus = 1\n");
        CHECK_THROWS_AS(parse_config(in), std::invalid_argument);
    }
    SUBCASE("unknown section rejected") {
        std::istringstream in("[nonsense]\na = 1\n");
        CHECK_THROWS_AS(parse_config(in), std::invalid_argument);
    }
    SUBCASE("malformed number rejected") {
        std::istringstream in("[couplings]\ng0 = abc\n");
        CHECK_THROWS_AS(parse_config(in), std::invalid_argument);
    }
    SUBCASE("r_T derived from units when absent") {
        std::istringstream in(
            "[units]\nomega_m = 628.3185307179587\ntemperature = 2e-7\n"
            "[probe]\nmu_re = 1.0\n");
        const Config cfg = parse_config(in);
        CHECK(cfg.probe.r_T == doctest::Approx(2.5580827559826).epsilon(1e-10));
    }
}

TEST_CASE("sweep validation") {
    SweepRequest req;
    req.scenario = Scenario::G0;
    req.spec.g_form = GForm::SineModulated;
    req.spec.g0 = 1.0;
    req.spec.epsilon = 0.5;
    req.spec.omega_g = 1.0;
    req.spec.theta = Theta::G0;
    req.probe = ProbeState{1.0, 0.0};
    req.start = 0.0;
    req.stop = 1.0;
    req.count = 2;

    SUBCASE("count below 2") {
        req.count = 1;
        CHECK_THROWS_AS(req.validate(), std::invalid_argument);
    }
    SUBCASE("reversed range") {
        req.start = 2.0;
        CHECK_THROWS_AS(req.validate(), std::invalid_argument);
    }
    SUBCASE("theta mismatch") {
        req.spec.theta = Theta::D1;
        CHECK_THROWS_AS(req.validate(), std::invalid_argument);
    }
    SUBCASE("d2 frequency sweep rejected") {
        req.scenario = Scenario::D2Res;
        req.spec.theta = Theta::D2;
        req.axis = Axis::Frequency;
        req.fixed_tau = 1.0;
        CHECK_THROWS_AS(req.validate(), std::invalid_argument);
    }
}

TEST_CASE("run_sweep: row count, spot value, determinism") {
    TempFile tmp1("sweep1.csv"), tmp2("sweep2.csv");
    std::istringstream in(config_with_output(sweep_config, tmp1.path));
    Config cfg = parse_config(in);
    REQUIRE(cfg.sweep.has_value());

    auto rows = run_sweep(*cfg.sweep);
    REQUIRE(rows.size() == 5);
    // grid point 1.0 + 2/4 * 8.0 = 5.0:
    CHECK(rows[2].axis_value == 5.0);
    const double expected = qfi_g0_res(1.0, 0.5, 5.0, ProbeState{1.0, 0.0}).value;
    CHECK(rows[2].qfi.value == doctest::Approx(expected).epsilon(1e-14));

    // byte-identical reruns, also across thread counts
    SweepRequest req2 = *cfg.sweep;
    req2.output_path = tmp2.path;
    setenv("OMQFI_THREADS", "1", 1);
    run_sweep(req2);
    unsetenv("OMQFI_THREADS");
    const std::string a = slurp(tmp1.path), b = slurp(tmp2.path);
    CHECK(!a.empty());
    CHECK(a == b);
    CHECK(a.substr(0, a.find('\n')) ==
          "axis_value,qfi,term_A,term_AB,term_B,term_C,term_FG,branch");
}

TEST_CASE("run_sweep: trivial two-point sweep") {
    SweepRequest req;
    req.scenario = Scenario::D2Res;
    req.axis = Axis::Time;
    req.spec.g_form = GForm::Constant;
    req.spec.g0 = 2.0;
    req.spec.d2_form = DriveForm::CosModulated;
    req.spec.d2 = 0.01;
    req.spec.omega_d2 = 2.0;
    req.spec.theta = Theta::D2;
    req.probe = ProbeState{1.0, 0.0};
    req.start = 1.0;
    req.stop = 2.0;
    req.count = 2;
    const auto rows = run_sweep(req);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].qfi.value ==
          doctest::Approx(qfi_d2_res_app(2.0, 1.0, req.probe).value).epsilon(1e-14));
    CHECK(rows[1].axis_value == 2.0);
}

TEST_CASE("run_sweep: d1 time sweep hits the resonant value at 2 pi") {
    SweepRequest req;
    req.scenario = Scenario::D1;
    req.axis = Axis::Time;
    req.spec.g_form = GForm::Constant;
    req.spec.g0 = 1.0;
    req.spec.d1_form = DriveForm::CosModulated;
    req.spec.d1 = 1.0;
    req.spec.omega_d1 = 1.0;
    req.spec.theta = Theta::D1;
    req.probe = ProbeState{1.0, 0.0};
    req.start = 0.0;
    req.stop = 8 * pi;
    req.count = 5;  // 0, 2pi, 4pi, 6pi, 8pi
    const auto rows = run_sweep(req);
    const double expected = qfi_d1_res(1.0, 1.0, 2 * pi, req.probe).value;
    CHECK(rows[1].qfi.value == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("table1 reproduces the published values") {
    const Table1Report rep = table1();
    REQUIRE(rep.rows.size() == 4);
    CHECK(rep.pass);
    CHECK(rep.max_rel_deviation <= 0.01);
    CHECK(rep.rows[0].label == "r_T");
    CHECK(std::abs(rep.rows[0].computed - 2.56) <= 0.01);
}

TEST_CASE("table1 with a vacuum cavity override") {
    Table1Options opt;
    opt.mu2_override = 0.0;
    const Table1Report rep = table1(opt);
    CHECK(rep.rows[1].computed == 0.0);  // I_g0 row vanishes with mu_c = 0
    CHECK(!rep.pass);
}

TEST_CASE("table1 sensitivities") {
    Table1Options opt;
    opt.sensitivity = true;
    const Table1Report rep = table1(opt);
    REQUIRE(rep.rows[1].sensitivity.has_value());
    CHECK(std::abs(*rep.rows[1].sensitivity - 1.82e-13) / 1.82e-13 < 0.02);
    CHECK(std::abs(*rep.rows[2].sensitivity - 7.96e-7) / 7.96e-7 < 0.02);
    CHECK(std::abs(*rep.rows[3].sensitivity - 2.50e-12) / 2.50e-12 < 0.02);
}

TEST_CASE("mechanics dump writes the documented CSV") {
    TempFile tmp("mech.csv");
    MechanicsDumpRequest req;
    req.spec.d2_form = DriveForm::CosModulated;
    req.spec.d2 = 0.05;
    req.spec.omega_d2 = 2.0;
    req.tau_max = 1.0;
    req.output_path = tmp.path;
    mechanics_dump(req);

    std::ifstream in(tmp.path);
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "tau,p11,p11_dot,ip22,ip22_dot,re_xi,im_xi,re_alpha,im_alpha,re_beta,"
          "im_beta,j_plus,j_minus,j_b");
    std::string first;
    std::getline(in, first);
    CHECK(first.substr(0, 10) == "0,1,0,0,1,");
    int rows = 1;
    std::string line;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 101);  // dtau = 0.01 over [0, 1]
}

TEST_CASE("oracle_check quick preset passes") {
    const OracleCheckReport rep = oracle_check("quick");
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.pass);
    CHECK(rep.max_rel_error < 1e-3);
}

TEST_CASE("oracle_check rejects unknown presets and coarse stepping") {
    CHECK_THROWS_AS(oracle_check("bogus"), std::invalid_argument);
    CHECK_THROWS_AS(oracle_check("quick", 10.0), ConvergenceError);
}
