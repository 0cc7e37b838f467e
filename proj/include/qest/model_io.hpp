#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qest/estimation.hpp"
#include "qest/qsys.hpp"

namespace qest {

/// Squeezer family parameters as they appear in model files.
struct SqueezerParams {
    double gamma = 0.0;
    std::vector<double> kappas;
    Complex chi{0.0, 0.0};
};

/// Explicit doubled-form matrices as they appear in model files.
struct RawModel {
    ComplexMatrix F;
    ComplexMatrix G;
    ComplexMatrix H;
    ComplexMatrix K;
};

/// A model file: either {"squeezer": {...}} or {"raw": {...}}, plus an
/// optional cost row "C". Complex scalars are encoded as [re, im] pairs and
/// matrices as arrays of rows of pairs.
struct ModelSpec {
    std::variant<SqueezerParams, RawModel> model;
    std::optional<ComplexMatrix> C;

    bool is_squeezer() const { return std::holds_alternative<SqueezerParams>(model); }

    /// Instantiates the system. `enforce` applies the squeezer realizability
    /// constraint at construction; pass false when the caller wants the
    /// checker to produce the diagnosis instead.
    QuantumSystem build(bool enforce) const;
};

struct SolverOverrides {
    std::optional<double> tol;
    std::optional<std::size_t> max_iter;
};

struct OutputSpec {
    std::string csv_path = "sweep.csv";
    std::optional<std::string> svg_path;
};

/// A sweep configuration file.
struct RunConfig {
    ModelSpec plant;
    std::optional<ModelSpec> controller;
    std::optional<ComplexMatrix> cost_row;
    AngleGrid angles;
    SolverOverrides solver;
    OutputSpec outputs;

    /// cost_row when present, otherwise the plant model's C row.
    ComplexMatrix effective_cost_row() const;
};

/// Parses a model file. Throws ParseError on malformed JSON and
/// ValidationError on schema violations (unknown keys are rejected).
ModelSpec parse_model(const std::string& text);

/// Parses a sweep configuration file; same error contract.
RunConfig parse_config(const std::string& text);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

/// Header `theta_deg,cost_classical,cost_coherent`, one row per grid point in
/// grid order; the third column is left empty when no controller ran.
/// Byte-identical across repeated runs on the same input.
std::string render_csv(const SweepResult& result);

/// 800x600 plot of cost against angle: linear axes auto-scaled with 5%
/// margins, classical curve solid, coherent curve dashed.
std::string render_svg(const SweepResult& result);

/// Write-temp-then-rename. Throws IoError with the path on failure.
void atomic_write_file(const std::string& path, const std::string& content);

/// Emits the CSV (always) and the SVG (when configured).
void write_outputs(const SweepResult& result, const OutputSpec& outputs);

} // namespace qest
