// cli.hpp — Config parsing, parameter sweeps, the headline reference table,
// oracle comparison runs, and the mechanics CSV dump. The CLI binary in
// tools/ is a thin wrapper over these entry points.

#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "omqfi/coupling.hpp"
#include "omqfi/qfi.hpp"

namespace omqfi::cli {

// Exit-code contract: 0 success, 2 validation error, 3 numerical failure,
// 4 acceptance deviation.
inline constexpr int exit_ok = 0;
inline constexpr int exit_validation = 2;
inline constexpr int exit_numerical = 3;
inline constexpr int exit_deviation = 4;

enum class Scenario { G0, D1, D2Const, D2Res };
enum class Axis { Time, Frequency };

struct SweepRequest {
    Scenario scenario = Scenario::G0;
    Axis axis = Axis::Time;
    double start = 0.0;
    double stop = 0.0;
    int count = 0;
    double fixed_tau = 0.0;  // time of measurement for frequency sweeps
    CouplingSpec spec;
    ProbeState probe;
    std::optional<PhysicalUnits> units;
    std::string output_path;

    void validate() const;  // throws std::invalid_argument
};

struct SweepRow {
    double axis_value = 0.0;
    QfiResult qfi;
};

// Evaluates the sweep (points in parallel, assembled in axis order) and, when
// req.output_path is nonempty, writes the CSV
//   axis_value,qfi,term_A,term_AB,term_B,term_C,term_FG,branch
// with shortest round-trip number formatting. Deterministic across runs.
std::vector<SweepRow> run_sweep(const SweepRequest& req);

struct Table1Options {
    std::optional<double> mu2_override;
    bool sensitivity = false;
};

struct Table1Row {
    std::string label;
    double computed = 0.0;
    double reference = 0.0;
    double rel_deviation = 0.0;
    std::optional<double> sensitivity;  // 1/sqrt(QFI), when requested
    std::string sensitivity_label;
};

struct Table1Report {
    std::vector<Table1Row> rows;
    double max_rel_deviation = 0.0;
    bool pass = false;  // all deviations within 1%
};

// Computes {r_T, I_g0_res, I_d1_res, I_d2_res_app} at the reference operating
// point (tau = 2*pi, g0 = 100, |mu|^2 = 1e6, eps = 0.5, T = 200 nK,
// omega_m = 2*pi*100 rad/s) next to the published values.
Table1Report table1(const Table1Options& opt = {});

struct OracleCheckRow {
    std::string label;
    double analytic = 0.0;
    double oracle = 0.0;
    double rel_error = 0.0;
};

struct OracleCheckReport {
    std::vector<OracleCheckRow> rows;
    double max_rel_error = 0.0;
    bool pass = false;  // max relative error below 1e-3
};

// Desk-scale oracle-vs-analytic suite over examples (i) and (ii).
// Presets: "default" (six instances per example) and "quick" (two per example).
// dt_override forces the initial oracle step (misuse path for testing).
OracleCheckReport oracle_check(const std::string& preset = "default",
                               std::optional<double> dt_override = {});

// --- config file -----------------------------------------------------------
//
// Sections: [couplings] [probe] [units] [sweep] [mechanics]. Keys documented
// in the README; unknown keys are rejected.

struct MechanicsDumpRequest {
    CouplingSpec spec;
    double tau_max = 0.0;
    double tol = 1e-10;
    std::string output_path;
};

struct Config {
    CouplingSpec spec;
    ProbeState probe;
    std::optional<PhysicalUnits> units;
    std::optional<SweepRequest> sweep;
    std::optional<MechanicsDumpRequest> mechanics;
};

Config parse_config(std::istream& in);
Config load_config(const std::string& path);

// Writes tau,p11,p11_dot,ip22,ip22_dot,re_xi,im_xi,re_alpha,im_alpha,re_beta,
// im_beta,j_plus,j_minus,j_b, one row per grid point, round-trip formatting.
void mechanics_dump(const MechanicsDumpRequest& req);

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

// Number of worker threads for sweeps: OMQFI_THREADS when set, else the
// hardware concurrency.
unsigned sweep_thread_count();

}  // namespace omqfi::cli
