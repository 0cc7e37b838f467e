#include "qest/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "qest/care.hpp"
#include "qest/estimation.hpp"
#include "qest/model_io.hpp"
#include "qest/qsys.hpp"

namespace qest {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw ValidationError("cannot read " + path);
    }
    std::ostringstream oss;
    oss << f.rdbuf();
    return oss.str();
}

/// QEST_TOL overrides the solver tolerance for every CLI-issued solve.
void apply_env_tolerance(SolveOptions& opts) {
    const char* env = std::getenv("QEST_TOL");
    if (env == nullptr || *env == '\0') {
        return;
    }
    char* end = nullptr;
    const double tol = std::strtod(env, &end);
    if (end == nullptr || *end != '\0' || !(tol > 0.0) || !std::isfinite(tol)) {
        throw ValidationError(std::string("QEST_TOL: expected a positive number, got \"") +
                              env + "\"");
    }
    opts.tol = tol;
}

/// True when the doubled-form off-diagonal blocks vanish, i.e. the model is
/// expressible with annihilation operators alone.
bool is_annihilation_only(const QuantumSystem& sys, double tol) {
    const auto off_norm = [&](const ComplexMatrix& a) {
        const std::size_t r = a.rows() / 2;
        const std::size_t c = a.cols() / 2;
        const double top = a.block(0, c, r, c).frobenius_norm();
        const double bottom = a.block(r, 0, r, c).frobenius_norm();
        return std::sqrt(top * top + bottom * bottom);
    };
    const double dev = off_norm(sys.F) + off_norm(sys.G) + off_norm(sys.H) + off_norm(sys.K);
    return dev <= tol;
}

PassiveSystem annihilation_part(const QuantumSystem& sys) {
    return PassiveSystem::create(sys.F.block(0, 0, sys.n, sys.n),
                                 sys.G.block(0, 0, sys.n, sys.m),
                                 sys.H.block(0, 0, sys.m, sys.n),
                                 sys.K.block(0, 0, sys.m, sys.m));
}

void print_report(std::ostream& out, const std::string& title,
                  const RealizabilityReport& rep) {
    out << title << "\n";
    if (rep.inconclusive) {
        out << "  inconclusive: " << rep.detail << "\n";
        return;
    }
    out << "  commutation structure residual: " << rep.commutation_residual
        << (rep.failed == RealizabilityReport::Condition::commutation ? "  FAIL" : "") << "\n";
    out << "  coupling residual:              " << rep.coupling_residual
        << (rep.failed == RealizabilityReport::Condition::coupling ? "  FAIL" : "") << "\n";
    out << "  scattering residual:            " << rep.scattering_residual
        << (rep.failed == RealizabilityReport::Condition::scattering ? "  FAIL" : "") << "\n";
    if (rep.structural_check_only) {
        out << "  note: structural check only (inertia not certified)\n";
    }
    if (rep.realizable) {
        out << "  => physically realizable\n";
    } else {
        out << "  => NOT physically realizable (failed condition: " << to_string(rep.failed)
            << "; " << rep.detail << ")\n";
    }
}

int cmd_check(const std::string& model_path, std::ostream& out) {
    const ModelSpec spec = parse_model(read_file(model_path));
    const QuantumSystem sys = spec.build(/*enforce=*/false);

    out << "model: " << model_path << " (n = " << sys.n << " mode(s), m = " << sys.m
        << " channel(s))\n";
    const RealizabilityReport general = check_realizable_general(sys);
    print_report(out, "general doubled-form check:", general);

    if (is_annihilation_only(sys, 1e-12)) {
        const RealizabilityReport passive = check_realizable_passive(annihilation_part(sys));
        print_report(out, "annihilation-operator-only check:", passive);
    }
    return general.realizable ? 0 : 1;
}

struct SweepSummary {
    double min_classical = 0.0;
    double min_coherent = 0.0;
    bool has_coherent = false;
};

SweepSummary summarize(const SweepResult& result) {
    SweepSummary s;
    s.min_classical = result.rows.front().cost_classical;
    for (const SweepRow& r : result.rows) {
        s.min_classical = std::min(s.min_classical, r.cost_classical);
        if (r.cost_coherent) {
            s.min_coherent = s.has_coherent ? std::min(s.min_coherent, *r.cost_coherent)
                                            : *r.cost_coherent;
            s.has_coherent = true;
        }
    }
    return s;
}

void print_sweep_summary(std::ostream& out, const SweepResult& result,
                         const OutputSpec& outputs) {
    const SweepSummary s = summarize(result);
    out << "rows: " << result.rows.size() << "\n";
    out << "min cost (classical): " << format_double(s.min_classical) << "\n";
    if (s.has_coherent) {
        out << "min cost (coherent):  " << format_double(s.min_coherent) << "\n";
    }
    out << "csv: " << outputs.csv_path << "\n";
    if (outputs.svg_path) {
        out << "svg: " << *outputs.svg_path << "\n";
    }
}

int cmd_sweep(const std::string& config_path, std::ostream& out) {
    const RunConfig cfg = parse_config(read_file(config_path));

    QuantumSystem plant = cfg.plant.build(/*enforce=*/true);
    const ComplexMatrix cost_row = cfg.effective_cost_row();
    if (cost_row.cols() != 2 * plant.n) {
        throw ValidationError("config: cost row has " + std::to_string(cost_row.cols()) +
                              " entries, expected " + std::to_string(2 * plant.n));
    }
    plant.C = cost_row;

    std::optional<QuantumSystem> controller;
    if (cfg.controller) {
        controller = cfg.controller->build(/*enforce=*/true);
    }

    SolveOptions opts;
    if (cfg.solver.tol) {
        opts.tol = *cfg.solver.tol;
    }
    if (cfg.solver.max_iter) {
        opts.max_iter = *cfg.solver.max_iter;
    }
    apply_env_tolerance(opts);

    const SweepResult result =
        sweep(plant, controller ? &*controller : nullptr, cfg.angles, opts);
    write_outputs(result, cfg.outputs);
    print_sweep_summary(out, result, cfg.outputs);
    return 0;
}

int cmd_demo(const std::string& which, std::optional<std::string> csv_path,
             std::optional<std::string> svg_path, std::ostream& out) {
    const bool passive = which == "passive";
    const Complex plant_chi = passive ? Complex{0.0, 0.0} : Complex{1.0, 0.0};
    const Complex ctrl_chi = passive ? Complex{2.0, 0.0} : Complex{4.0, 0.0};

    QuantumSystem plant = make_squeezer(4.0, {4.0}, plant_chi, true);
    plant.C = ComplexMatrix::from_rows({{0.2, -0.2}});
    const QuantumSystem controller = make_squeezer(16.0, {16.0}, ctrl_chi, true);

    SolveOptions opts;
    apply_env_tolerance(opts);

    const AngleGrid grid{0.0, 180.0, 181};
    const SweepResult result = sweep(plant, &controller, grid, opts);

    OutputSpec outputs;
    outputs.csv_path = csv_path.value_or(passive ? "demo_passive.csv" : "demo_squeezer.csv");
    outputs.svg_path = svg_path;
    write_outputs(result, outputs);
    print_sweep_summary(out, result, outputs);

    if (passive) {
        // both schemes must sit at C Theta C' = 0.08 for every angle
        double max_gap = 0.0;
        double max_dev = 0.0;
        for (const SweepRow& r : result.rows) {
            max_gap = std::max(max_gap, std::abs(*r.cost_coherent - r.cost_classical));
            max_dev = std::max({max_dev, std::abs(r.cost_classical - 0.08),
                                std::abs(*r.cost_coherent - 0.08)});
        }
        out << "max |coherent - classical| over grid: " << max_gap << "\n";
        out << "max deviation from C Theta C' = 0.08: " << max_dev << "\n";
        if (max_gap <= 1e-8 && max_dev <= 1e-8) {
            out << "Theorem 3 verified: coherent-classical estimation of the passive plant "
                   "matches purely-classical estimation at every angle.\n";
            return 0;
        }
        out << "Theorem 3 verification FAILED\n";
        return 1;
    }

    const SweepRow& at40 = result.rows[40];
    const SweepSummary s = summarize(result);
    out << "cost at theta = 40 deg: classical " << format_double(at40.cost_classical)
        << ", coherent " << format_double(*at40.cost_coherent) << "\n";
    out << "best over grid: classical " << format_double(s.min_classical) << ", coherent "
        << format_double(s.min_coherent) << "\n";
    const bool coherent_wins_at_40 = *at40.cost_coherent < at40.cost_classical;
    const bool classical_wins_at_best = s.min_classical <= s.min_coherent;
    if (coherent_wins_at_40) {
        out << "coherent-classical estimation beats purely-classical at 40 deg\n";
    }
    if (classical_wins_at_best) {
        out << "purely-classical estimation wins at the best angle\n";
    }
    return (coherent_wins_at_40 && classical_wins_at_best) ? 0 : 1;
}

} // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"linear quantum system estimation toolkit"};
    app.name("qest");
    app.require_subcommand(1);

    std::string model_path;
    auto* check = app.add_subcommand("check", "physical realizability report for a model file");
    check->add_option("model", model_path, "model JSON file")->required();

    std::string config_path;
    auto* sweep_cmd = app.add_subcommand("sweep", "homodyne angle sweep from a config file");
    sweep_cmd->add_option("config", config_path, "sweep configuration JSON file")->required();

    std::string which;
    std::string demo_csv;
    std::string demo_svg;
    auto* demo = app.add_subcommand("demo", "reproduce the built-in experiments");
    demo->add_option("which", which, "passive | squeezer")
        ->required()
        ->check(CLI::IsMember({"passive", "squeezer"}));
    demo->add_option("--csv", demo_csv, "CSV output path");
    demo->add_option("--svg", demo_svg, "SVG output path");

    std::vector<std::string> argv_storage;
    argv_storage.push_back("qest");
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    argv.reserve(argv_storage.size());
    for (const auto& a : argv_storage) {
        argv.push_back(a.c_str());
    }

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (check->parsed()) {
            return cmd_check(model_path, out);
        }
        if (sweep_cmd->parsed()) {
            return cmd_sweep(config_path, out);
        }
        return cmd_demo(which,
                        demo_csv.empty() ? std::nullopt : std::make_optional(demo_csv),
                        demo_svg.empty() ? std::nullopt : std::make_optional(demo_svg), out);
    } catch (const ParseError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace qest
