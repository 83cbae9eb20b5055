#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fkcell/asymptotics.hpp"
#include "fkcell/shapes.hpp"

// Flat `key = value` run configuration with `#` comments and dotted keys.
// All numeric fields are validated against the module invariants before any
// solve starts, and a parsed config round-trips to a canonical text form
// byte-identically.
namespace fkcell::io {

struct RunConfig {
    // shape.*
    std::string shape_kind;  // circle | ellipse | mconvex | vigdergauz
    std::optional<double> shape_r, shape_a, shape_b, shape_m, shape_f;
    // lame.*
    double lambda = 1.0;
    double mu = 1.0;
    // cell.*
    std::optional<double> eps;
    std::vector<double> eps_list;
    std::optional<double> L1, L2;
    // solver.*
    int n1 = 128;
    int n2 = 256;
    double grading = 2000.0;
    double tol = 1e-10;
    // integral.*
    std::optional<double> integral_m, integral_kappa0, integral_eps, integral_s;
    // aux.*
    int aux_points = 10000;
    // output.*
    std::string csv_path = "sweep.csv";
    int precision = 17;
    int polygon_points = 4096;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Canonical serialization: known keys only, sorted, numbers at 17
// significant digits. parse(canonical(c)) == c byte-for-byte.
std::string canonical_text(const RunConfig& cfg);

// Number formatting used by every CSV writer (17 significant digits by
// default: bit-faithful round-trip of doubles).
std::string format_double(double x, int precision = 17);

// The inclusion shape named by the config (validates parameters).
geom::InclusionShape shape_from_config(const RunConfig& cfg);

// Lame parameters (validated).
LameParams lame_from_config(const RunConfig& cfg);

// CSV schema shared by the moduli and sweep commands.
extern const char* kCsvHeader;

std::string csv_row(const asym::SweepRow& row, int precision);

}  // namespace fkcell::io
