#include "qest/model_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <system_error>

#include <json.hpp>

namespace qest {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& context, const std::string& what) {
    throw ValidationError(context + ": " + what);
}

void reject_unknown_keys(const json& obj, const std::string& context,
                         std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) {
            return item.key() == k;
        });
        if (!known) {
            fail(context, "unknown key \"" + item.key() + "\"");
        }
    }
}

double parse_number(const json& j, const std::string& context) {
    if (!j.is_number()) {
        fail(context, "expected a number");
    }
    return j.get<double>();
}

Complex parse_complex(const json& j, const std::string& context) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        fail(context, "expected a [re, im] pair");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

ComplexMatrix parse_matrix(const json& j, const std::string& context) {
    if (!j.is_array() || j.empty()) {
        fail(context, "expected a non-empty array of rows");
    }
    const std::size_t rows = j.size();
    std::size_t cols = 0;
    std::vector<Complex> data;
    for (std::size_t i = 0; i < rows; ++i) {
        const json& row = j[i];
        if (!row.is_array() || row.empty()) {
            fail(context, "row " + std::to_string(i) + " is not a non-empty array");
        }
        if (i == 0) {
            cols = row.size();
            data.reserve(rows * cols);
        } else if (row.size() != cols) {
            fail(context, "row " + std::to_string(i) + " has inconsistent length");
        }
        for (std::size_t k = 0; k < row.size(); ++k) {
            data.push_back(
                parse_complex(row[k], context + "[" + std::to_string(i) + "][" +
                                          std::to_string(k) + "]"));
        }
    }
    return {rows, cols, std::move(data)};
}

ComplexMatrix parse_row_vector(const json& j, const std::string& context) {
    if (!j.is_array() || j.empty()) {
        fail(context, "expected a non-empty array of [re, im] pairs");
    }
    std::vector<Complex> data;
    data.reserve(j.size());
    for (std::size_t k = 0; k < j.size(); ++k) {
        data.push_back(parse_complex(j[k], context + "[" + std::to_string(k) + "]"));
    }
    return {1, data.size(), std::move(data)};
}

ModelSpec parse_model_object(const json& obj, const std::string& context) {
    if (!obj.is_object()) {
        fail(context, "expected an object");
    }
    reject_unknown_keys(obj, context, {"squeezer", "raw", "C"});
    const bool has_squeezer = obj.contains("squeezer");
    const bool has_raw = obj.contains("raw");
    if (has_squeezer == has_raw) {
        fail(context, "exactly one of \"squeezer\" or \"raw\" is required");
    }

    ModelSpec spec;
    if (has_squeezer) {
        const json& sq = obj["squeezer"];
        const std::string sq_ctx = context + ".squeezer";
        if (!sq.is_object()) {
            fail(sq_ctx, "expected an object");
        }
        reject_unknown_keys(sq, sq_ctx, {"gamma", "kappas", "chi_re", "chi_im"});
        SqueezerParams params;
        if (!sq.contains("gamma") || !sq.contains("kappas")) {
            fail(sq_ctx, "\"gamma\" and \"kappas\" are required");
        }
        params.gamma = parse_number(sq["gamma"], sq_ctx + ".gamma");
        const json& kappas = sq["kappas"];
        if (!kappas.is_array() || kappas.empty()) {
            fail(sq_ctx + ".kappas", "expected a non-empty array of numbers");
        }
        for (std::size_t i = 0; i < kappas.size(); ++i) {
            params.kappas.push_back(
                parse_number(kappas[i], sq_ctx + ".kappas[" + std::to_string(i) + "]"));
        }
        const double re = sq.contains("chi_re") ? parse_number(sq["chi_re"], sq_ctx + ".chi_re")
                                                : 0.0;
        const double im = sq.contains("chi_im") ? parse_number(sq["chi_im"], sq_ctx + ".chi_im")
                                                : 0.0;
        params.chi = Complex{re, im};
        spec.model = std::move(params);
    } else {
        const json& raw = obj["raw"];
        const std::string raw_ctx = context + ".raw";
        if (!raw.is_object()) {
            fail(raw_ctx, "expected an object");
        }
        reject_unknown_keys(raw, raw_ctx, {"F", "G", "H", "K"});
        for (const char* key : {"F", "G", "H", "K"}) {
            if (!raw.contains(key)) {
                fail(raw_ctx, std::string("\"") + key + "\" is required");
            }
        }
        RawModel model;
        model.F = parse_matrix(raw["F"], raw_ctx + ".F");
        model.G = parse_matrix(raw["G"], raw_ctx + ".G");
        model.H = parse_matrix(raw["H"], raw_ctx + ".H");
        model.K = parse_matrix(raw["K"], raw_ctx + ".K");
        spec.model = std::move(model);
    }
    if (obj.contains("C")) {
        spec.C = parse_row_vector(obj["C"], context + ".C");
    }
    return spec;
}

json parse_json_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());
    }
}

} // namespace

QuantumSystem ModelSpec::build(bool enforce) const {
    QuantumSystem sys;
    if (const auto* sq = std::get_if<SqueezerParams>(&model)) {
        sys = make_squeezer(sq->gamma, sq->kappas, sq->chi, enforce);
    } else {
        const auto& raw = std::get<RawModel>(model);
        sys = QuantumSystem::create(raw.F, raw.G, raw.H, raw.K);
    }
    if (C) {
        if (C->cols() != 2 * sys.n) {
            throw ValidationError("model: C row has " + std::to_string(C->cols()) +
                                  " entries, expected " + std::to_string(2 * sys.n));
        }
        sys.C = *C;
    }
    return sys;
}

ComplexMatrix RunConfig::effective_cost_row() const {
    if (cost_row) {
        return *cost_row;
    }
    if (plant.C) {
        return *plant.C;
    }
    throw ValidationError("config: a cost row is required (\"cost_row\" or plant \"C\")");
}

ModelSpec parse_model(const std::string& text) {
    return parse_model_object(parse_json_text(text), "model");
}

RunConfig parse_config(const std::string& text) {
    const json root = parse_json_text(text);
    if (!root.is_object()) {
        fail("config", "expected an object");
    }
    reject_unknown_keys(root, "config",
                        {"plant", "controller", "cost_row", "angles", "solver", "outputs"});
    if (!root.contains("plant")) {
        fail("config", "\"plant\" is required");
    }

    RunConfig cfg;
    cfg.plant = parse_model_object(root["plant"], "config.plant");
    if (root.contains("controller")) {
        cfg.controller = parse_model_object(root["controller"], "config.controller");
    }
    if (root.contains("cost_row")) {
        cfg.cost_row = parse_row_vector(root["cost_row"], "config.cost_row");
    }
    if (root.contains("angles")) {
        const json& angles = root["angles"];
        if (!angles.is_object()) {
            fail("config.angles", "expected an object");
        }
        reject_unknown_keys(angles, "config.angles", {"start_deg", "stop_deg", "steps"});
        if (angles.contains("start_deg")) {
            cfg.angles.start_deg = parse_number(angles["start_deg"], "config.angles.start_deg");
        }
        if (angles.contains("stop_deg")) {
            cfg.angles.stop_deg = parse_number(angles["stop_deg"], "config.angles.stop_deg");
        }
        if (angles.contains("steps")) {
            const json& steps = angles["steps"];
            if (!steps.is_number_unsigned() || steps.get<std::uint64_t>() == 0) {
                fail("config.angles.steps", "expected an integer >= 1");
            }
            cfg.angles.steps = steps.get<std::size_t>();
        }
        if (cfg.angles.stop_deg < cfg.angles.start_deg) {
            fail("config.angles", "stop_deg must not precede start_deg");
        }
    }
    if (root.contains("solver")) {
        const json& solver = root["solver"];
        if (!solver.is_object()) {
            fail("config.solver", "expected an object");
        }
        reject_unknown_keys(solver, "config.solver", {"tol", "max_iter"});
        if (solver.contains("tol")) {
            const double tol = parse_number(solver["tol"], "config.solver.tol");
            if (!(tol > 0.0)) {
                fail("config.solver.tol", "must be positive");
            }
            cfg.solver.tol = tol;
        }
        if (solver.contains("max_iter")) {
            const json& mi = solver["max_iter"];
            if (!mi.is_number_unsigned() || mi.get<std::uint64_t>() == 0) {
                fail("config.solver.max_iter", "expected an integer >= 1");
            }
            cfg.solver.max_iter = mi.get<std::size_t>();
        }
    }
    if (root.contains("outputs")) {
        const json& outputs = root["outputs"];
        if (!outputs.is_object()) {
            fail("config.outputs", "expected an object");
        }
        reject_unknown_keys(outputs, "config.outputs", {"csv_path", "svg_path"});
        if (outputs.contains("csv_path")) {
            if (!outputs["csv_path"].is_string()) {
                fail("config.outputs.csv_path", "expected a string");
            }
            cfg.outputs.csv_path = outputs["csv_path"].get<std::string>();
        }
        if (outputs.contains("svg_path")) {
            if (!outputs["svg_path"].is_string()) {
                fail("config.outputs.svg_path", "expected a string");
            }
            cfg.outputs.svg_path = outputs["svg_path"].get<std::string>();
        }
    }
    return cfg;
}

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, res.ptr};
}

std::string render_csv(const SweepResult& result) {
    std::string out = "theta_deg,cost_classical,cost_coherent\n";
    for (const SweepRow& row : result.rows) {
        out += format_double(row.theta_deg);
        out += ',';
        out += format_double(row.cost_classical);
        out += ',';
        if (row.cost_coherent) {
            out += format_double(*row.cost_coherent);
        }
        out += '\n';
    }
    return out;
}

namespace {

struct AxisRange {
    double lo = 0.0;
    double hi = 1.0;
};

AxisRange padded(double lo, double hi) {
    double span = hi - lo;
    if (span < 1e-12) {
        const double pad = std::max(1e-6, std::abs(hi) * 0.05);
        return {lo - pad, hi + pad};
    }
    return {lo - 0.05 * span, hi + 0.05 * span};
}

} // namespace

std::string render_svg(const SweepResult& result) {
    if (result.rows.empty()) {
        throw BadParameterError("render_svg: at least one row is required");
    }

    double xmin = result.rows.front().theta_deg;
    double xmax = xmin;
    double ymin = std::numeric_limits<double>::infinity();
    double ymax = -std::numeric_limits<double>::infinity();
    bool any_coherent = false;
    for (const SweepRow& r : result.rows) {
        xmin = std::min(xmin, r.theta_deg);
        xmax = std::max(xmax, r.theta_deg);
        ymin = std::min(ymin, r.cost_classical);
        ymax = std::max(ymax, r.cost_classical);
        if (r.cost_coherent) {
            any_coherent = true;
            ymin = std::min(ymin, *r.cost_coherent);
            ymax = std::max(ymax, *r.cost_coherent);
        }
    }
    const AxisRange xr = padded(xmin, xmax);
    const AxisRange yr = padded(ymin, ymax);

    // plot area inside the fixed 800x600 viewport
    const double px0 = 80.0, px1 = 760.0, py0 = 40.0, py1 = 540.0;
    const auto map_x = [&](double x) {
        return px0 + (x - xr.lo) / (xr.hi - xr.lo) * (px1 - px0);
    };
    const auto map_y = [&](double y) {
        return py1 - (y - yr.lo) / (yr.hi - yr.lo) * (py1 - py0);
    };

    const auto polyline = [&](auto getter, const char* stroke, const char* dash) {
        std::string pts;
        for (const SweepRow& r : result.rows) {
            const auto v = getter(r);
            if (!v) {
                continue;
            }
            if (!pts.empty()) {
                pts += ' ';
            }
            pts += format_double(map_x(r.theta_deg));
            pts += ',';
            pts += format_double(map_y(*v));
        }
        std::string elem = "  <polyline fill=\"none\" stroke=\"";
        elem += stroke;
        elem += "\" stroke-width=\"2\"";
        if (dash != nullptr) {
            elem += " stroke-dasharray=\"";
            elem += dash;
            elem += "\"";
        }
        elem += " points=\"" + pts + "\"/>\n";
        return elem;
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
           "viewBox=\"0 0 800 600\">\n";
    svg += "  <rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
    svg += "  <line x1=\"80\" y1=\"540\" x2=\"760\" y2=\"540\" stroke=\"black\"/>\n";
    svg += "  <line x1=\"80\" y1=\"540\" x2=\"80\" y2=\"40\" stroke=\"black\"/>\n";
    svg += "  <text x=\"420\" y=\"580\" text-anchor=\"middle\" font-size=\"16\">theta "
           "(deg)</text>\n";
    svg += "  <text x=\"24\" y=\"290\" text-anchor=\"middle\" font-size=\"16\" "
           "transform=\"rotate(-90 24 290)\">cost</text>\n";
    svg += "  <text x=\"80\" y=\"558\" text-anchor=\"middle\" font-size=\"12\">" +
           format_double(xr.lo) + "</text>\n";
    svg += "  <text x=\"760\" y=\"558\" text-anchor=\"middle\" font-size=\"12\">" +
           format_double(xr.hi) + "</text>\n";
    svg += "  <text x=\"74\" y=\"544\" text-anchor=\"end\" font-size=\"12\">" +
           format_double(yr.lo) + "</text>\n";
    svg += "  <text x=\"74\" y=\"44\" text-anchor=\"end\" font-size=\"12\">" +
           format_double(yr.hi) + "</text>\n";
    svg += polyline([](const SweepRow& r) { return std::optional<double>(r.cost_classical); },
                    "#1f77b4", nullptr);
    if (any_coherent) {
        svg += polyline([](const SweepRow& r) { return r.cost_coherent; }, "#d62728", "6 4");
    }
    svg += "</svg>\n";
    return svg;
}

void atomic_write_file(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw IoError("cannot open " + tmp + " for writing");
        }
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        f.flush();
        if (!f) {
            throw IoError("write failed for " + tmp);
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw IoError("cannot rename " + tmp + " to " + path + ": " + ec.message());
    }
}

void write_outputs(const SweepResult& result, const OutputSpec& outputs) {
    if (result.rows.empty()) {
        throw BadParameterError("write_outputs: at least one row is required");
    }
    atomic_write_file(outputs.csv_path, render_csv(result));
    if (outputs.svg_path) {
        atomic_write_file(*outputs.svg_path, render_svg(result));
    }
}

} // namespace qest
