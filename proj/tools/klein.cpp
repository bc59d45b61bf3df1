// Command-line front end. Every run ends with one machine-readable line
// "RESULT {json}" on stdout.
//
// Exit codes:
//   0  success; compare: Conjugate
//   1  compare: ConjugateAfterBar
//   2  invalid flags or flag values
//   3  construction failure (gen) or an input file that fails to load
//   4  compare: Distinct
//   5  numerically ambiguous or other numerical failure

#include "klein/io.hpp"
#include "klein/pressure.hpp"
#include "klein/rigidity.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

using namespace klein;
using Json = nlohmann::ordered_json;

namespace {

enum Exit : int {
    kExitOk = 0,
    kExitAfterBar = 1,
    kExitUsage = 2,
    kExitConstruction = 3,
    kExitDistinct = 4,
    kExitAmbiguous = 5,
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LoadError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void emit_result(const Json& j)
{
    std::cout << "RESULT " << j.dump() << std::endl;
}

Json to_json(Complexd z)
{
    return Json::array({z.real(), z.imag()});
}

Json to_json(const Mat2d& m)
{
    return Json::array({to_json(m(0, 0)), to_json(m(0, 1)), to_json(m(1, 0)), to_json(m(1, 1))});
}

// Complex literal: "0.1", "0.02i", "-i", "0.1-0.02i", "1e-3+2e-2i".
Complexd parse_complex(std::string s)
{
    try {
        if (s.empty())
            throw UsageError("empty complex number");
        if (s.back() != 'i')
            return parse_decimal(s);
        s.pop_back();
        std::size_t split = std::string::npos;
        for (std::size_t k = s.size(); k-- > 1;)
            if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
                split = k;
                break;
            }
        const std::string re = split == std::string::npos ? "" : s.substr(0, split);
        std::string im = split == std::string::npos ? s : s.substr(split);
        if (im.empty() || im == "+" || im == "-")
            im += "1";
        return {re.empty() ? 0.0 : parse_decimal(re), parse_decimal(im)};
    } catch (const Error&) {
        throw UsageError("invalid complex number '" + s + "'");
    }
}

SurfaceRepresentation load(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw LoadError("cannot open " + path);
    try {
        return read_representation(in);
    } catch (const Error& e) {
        throw LoadError(path + ": " + e.what());
    }
}

GroupWord parse_curve(int genus, const std::string& text)
{
    try {
        return parse_word(genus, text);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

// Minimal line plot: one or more series of (x, y) points.
struct Series {
    std::string label;
    std::vector<double> x, y;
};

void write_svg(const std::string& path, const std::string& title, const std::string& xlabel,
               const std::string& ylabel, const std::vector<Series>& series)
{
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    if (!(x1 > x0))
        x1 = x0 + 1;
    if (!(y1 > y0))
        y1 = y0 + 1;
    const double w = 640, h = 400, m = 60;
    const auto px = [&](double x) { return m + (x - x0) / (x1 - x0) * (w - 2 * m); };
    const auto py = [&](double y) { return h - m - (y - y0) / (y1 - y0) * (h - 2 * m); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    std::ofstream out(path);
    if (!out)
        throw UsageError("cannot write " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title << "</text>\n"
        << "<line x1=\"" << m << "\" y1=\"" << h - m << "\" x2=\"" << w - m << "\" y2=\"" << h - m
        << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << m << "\" y1=\"" << m << "\" x2=\"" << m << "\" y2=\"" << h - m << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << w / 2 << "\" y=\"" << h - 15 << "\" text-anchor=\"middle\">" << xlabel << " [" << x0
        << ", " << x1 << "]</text>\n"
        << "<text x=\"15\" y=\"" << h / 2 << "\" transform=\"rotate(-90 15 " << h / 2
        << ")\" text-anchor=\"middle\">" << ylabel << " [" << y0 << ", " << y1 << "]</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = colors[k % 4];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        out << "\"/>\n<text x=\"" << w - m << "\" y=\"" << m + 16 * k << "\" text-anchor=\"end\" fill=\"" << color
            << "\">" << s.label << "</text>\n";
    }
    out << "</svg>\n";
}

Series growth_series(const GeodesicCensus& census, const std::string& label)
{
    Series s{label, {}, {}};
    std::size_t count = 0;
    for (const auto& e : census.entries) {
        if (e.length == 0.0)
            continue;
        ++count;
        if (e.length > census.T_effective)
            break;
        s.x.push_back(e.length);
        s.y.push_back(std::log(static_cast<double>(count)));
    }
    return s;
}

struct GenOptions {
    int genus = 2;
    std::vector<std::string> bends;
    std::string conjugate;
    unsigned long long seed = 1;
    bool bar = false;
    std::string out;
};

int run_gen(const GenOptions& o)
{
    if (o.genus < 2)
        throw UsageError("--genus must be at least 2");
    struct BendSpec {
        int handle;
        Complexd t;
    };
    std::vector<BendSpec> bends;
    for (const auto& spec : o.bends) {
        const auto colon = spec.find(':');
        if (colon == std::string::npos)
            throw UsageError("--bend expects handle:t, got '" + spec + "'");
        int handle = 0;
        try {
            std::size_t used = 0;
            handle = std::stoi(spec.substr(0, colon), &used);
            if (used != colon)
                throw std::invalid_argument("handle");
        } catch (const std::exception&) {
            throw UsageError("invalid bend handle in '" + spec + "'");
        }
        if (handle < 2 || handle > o.genus)
            throw UsageError("bend handle must be in 2.." + std::to_string(o.genus));
        bends.push_back({handle, parse_complex(spec.substr(colon + 1))});
    }
    std::optional<Mat2d> conjugator;
    if (!o.conjugate.empty()) {
        if (o.conjugate == "random") {
            std::mt19937_64 rng(o.seed);
            conjugator = random_conjugator(rng);
        } else {
            std::vector<std::string> parts;
            std::stringstream ss(o.conjugate);
            for (std::string p; std::getline(ss, p, ',');)
                parts.push_back(p);
            if (parts.size() != 4)
                throw UsageError("--conjugate expects 'random' or four comma-separated complex entries");
            Mat2d m;
            for (int i = 0; i < 4; ++i)
                m(i / 2, i % 2) = parse_complex(parts[i]);
            const Complexd det = determinant(m);
            if (std::abs(det) < 1e-12 || !m.allFinite())
                throw UsageError("--conjugate matrix is singular");
            conjugator = m / std::sqrt(det);
        }
    }

    SurfaceRepresentation rep;
    try {
        rep = fuchsian_base(o.genus);
        for (const auto& b : bends)
            rep = bend(rep, b.handle, b.t);
        if (conjugator)
            rep = conjugate(rep, *conjugator);
        if (o.bar)
            rep = complex_conjugate(rep);
        rep = make_representation(rep.genus, rep.images, rep.metadata, kInputRelatorTolerance);
    } catch (const Error& e) {
        std::cerr << "construction failed: " << e.what() << "\n";
        emit_result({{"command", "gen"}, {"status", "construction-failure"}, {"error", e.what()}});
        return kExitConstruction;
    }
    const std::string text = to_file_text(rep);
    std::ofstream out(o.out, std::ios::binary);
    if (!out)
        throw UsageError("cannot write " + o.out);
    out << text;
    out.close();
    std::cout << "genus " << rep.genus << ", relator defect " << rep.relator_defect << ", written to " << o.out
              << "\n";
    emit_result({{"command", "gen"},
                 {"status", "ok"},
                 {"genus", rep.genus},
                 {"relator_defect", rep.relator_defect},
                 {"metadata", rep.metadata},
                 {"out", o.out}});
    return kExitOk;
}

int run_compare(const std::string& f1, const std::string& f2, int budget, int escalations, int threads)
{
    if (budget < 1)
        throw UsageError("--budget must be positive");
    const SurfaceRepresentation rho1 = load(f1), rho2 = load(f2);
    if (rho1.genus != rho2.genus)
        throw LoadError("genus mismatch between the two files");
    Json result{{"command", "compare"}};
    try {
        const RigidityVerdict v = reconstruct(rho1, rho2, budget, {threads, escalations});
        const auto& d = v.diagnostics;
        result["verdict"] = to_string(v.kind);
        std::cout << "verdict: " << to_string(v.kind) << "\n";
        std::cout << "curves compared: " << d.curves_compared << ", escalations: " << d.escalations << "\n";
        if (v.kind == VerdictKind::Distinct) {
            std::cout << "witness: " << to_string(v.witness->word) << "  l1 = " << format_decimal(v.l1)
                      << "  l2 = " << format_decimal(v.l2) << "\n";
            result["witness"] = to_string(v.witness->word);
            result["l1"] = v.l1;
            result["l2"] = v.l2;
        } else {
            std::cout << "reference curve: " << d.reference_curve << " (" << to_string(d.mode) << ")\n";
            std::cout << "conjugator:\n";
            for (int r = 0; r < 2; ++r)
                std::cout << "  " << format_decimal(v.conjugator(r, 0).real()) << " "
                          << format_decimal(v.conjugator(r, 0).imag()) << "i    "
                          << format_decimal(v.conjugator(r, 1).real()) << " "
                          << format_decimal(v.conjugator(r, 1).imag()) << "i\n";
            std::cout << "orbit distance: " << v.orbit_distance << "\n";
            result["conjugator"] = to_json(v.conjugator);
            result["orbit_distance"] = v.orbit_distance;
            result["reference_curve"] = d.reference_curve;
            result["mode"] = to_string(d.mode);
        }
        result["curves_compared"] = d.curves_compared;
        result["escalations"] = d.escalations;
        emit_result(result);
        switch (v.kind) {
        case VerdictKind::Conjugate: return kExitOk;
        case VerdictKind::ConjugateAfterBar: return kExitAfterBar;
        case VerdictKind::Distinct: return kExitDistinct;
        }
    } catch (const Error& e) {
        std::cout << "verdict: ambiguous (" << e.what() << ")\n";
        result["verdict"] = "Ambiguous";
        result["error"] = e.what();
        emit_result(result);
    }
    return kExitAmbiguous;
}

int run_pressure(const std::string& f1, const std::string& f2, int letters, std::optional<double> T,
                 const std::string& svg, int threads)
{
    if (letters < 1)
        throw UsageError("--letters must be positive");
    const SurfaceRepresentation rho1 = load(f1), rho2 = load(f2);
    if (rho1.genus != rho2.genus)
        throw LoadError("genus mismatch between the two files");
    const GeodesicCensus census1 = build_census(rho1, letters, threads);
    const double t = T.value_or(census1.T_effective);
    if (t > census1.T_effective * (1 + kCountTolerance))
        throw UsageError("--T " + std::to_string(t) + " exceeds T_effective " + std::to_string(census1.T_effective));
    const PressureEstimate p = pressure_J(rho1, rho2, census1, t, threads);
    std::cout << "census sizes: " << p.census1_size << " " << p.census2_size << " (max letters " << letters
              << ", T_effective " << format_decimal(census1.T_effective) << ")\n"
              << "T = " << format_decimal(p.T) << ", classes used " << p.classes_used << ", parabolic excluded "
              << p.parabolic_excluded << "\n"
              << "L_hat  = " << format_decimal(p.L_hat) << "\n"
              << "h1_hat = " << format_decimal(p.h1_hat) << "\n"
              << "h2_hat = " << format_decimal(p.h2_hat) << "\n"
              << "J_hat  = " << format_decimal(p.J_hat) << "\n";
    if (!svg.empty())
        write_svg(svg, "census growth", "T", "log #R_T",
                  {growth_series(census1, f1), growth_series(build_census(rho2, letters, threads), f2)});
    emit_result({{"command", "pressure"},
                 {"L_hat", p.L_hat},
                 {"h1_hat", p.h1_hat},
                 {"h2_hat", p.h2_hat},
                 {"J_hat", p.J_hat},
                 {"T", p.T},
                 {"T_effective", census1.T_effective},
                 {"classes_used", p.classes_used},
                 {"parabolic_excluded", p.parabolic_excluded},
                 {"census1_size", p.census1_size},
                 {"census2_size", p.census2_size}});
    return kExitOk;
}

int run_expand(const std::string& file, const std::string& alpha_text, const std::string& beta_text, int nmin,
               int nmax, const std::string& svg)
{
    if (nmin < 1 || nmax < nmin)
        throw UsageError("need 1 <= --nmin <= --nmax");
    const SurfaceRepresentation rep = load(file);
    const GroupWord a = parse_curve(rep.genus, alpha_text), b = parse_curve(rep.genus, beta_text);
    const ExpansionReport r = expansion_report(rep, a, b, nmin, nmax);
    std::printf("lambda = %.17g %+.17gi\n", r.lambda.real(), r.lambda.imag());
    std::printf("%4s  %24s  %24s  %24s  %24s\n", "n", "exact", "predicted", "residual", "|complex residual|");
    Series s{"log10 |complex residual|", {}, {}};
    for (const auto& row : r.rows) {
        std::printf("%4d  %24.17g  %24.17g  %24.17g  %24.17g\n", row.n, row.exact, row.predicted, row.residual,
                    row.complex_residual_abs);
        if (row.complex_residual_abs > 0) {
            s.x.push_back(row.n);
            s.y.push_back(std::log10(row.complex_residual_abs));
        }
    }
    std::printf("decay rate: fitted %.6g, predicted |lambda|^-4 = %.6g\n", r.fitted_decay_rate, r.predicted_decay_rate);
    if (!svg.empty())
        write_svg(svg, "expansion residual", "n", "log10 |residual|", {s});
    Json rows = Json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"n", row.n}, {"residual", row.residual}, {"complex_residual_abs", row.complex_residual_abs}});
    emit_result({{"command", "expand"},
                 {"lambda", to_json(r.lambda)},
                 {"fitted_decay_rate", r.fitted_decay_rate},
                 {"predicted_decay_rate", r.predicted_decay_rate},
                 {"rows", rows}});
    return kExitOk;
}

int run_spectrum(const std::string& file, int budget)
{
    if (budget < 1)
        throw UsageError("--budget must be positive");
    const SurfaceRepresentation rep = load(file);
    const auto stream = simple_curve_stream(StandardGenerators::canonical(rep.genus), budget);
    std::printf("%-40s  %24s  %24s  %24s\n", "curve", "length", "complex length re", "complex length im");
    for (const auto& c : stream) {
        const ComplexLengthd l = complex_length(rep, c.word);
        std::printf("%-40s  %24.17g  %24.17g  %24.17g\n", to_string(c.word).c_str(), l.translation(),
                    l.value.real(), l.value.imag());
    }
    emit_result({{"command", "spectrum"}, {"budget", budget}, {"curves", stream.size()}});
    return kExitOk;
}

int run_census(const std::string& file, int letters, const std::string& out_path, const std::string& svg,
               int threads)
{
    if (letters < 1)
        throw UsageError("--letters must be positive");
    const SurfaceRepresentation rep = load(file);
    const GeodesicCensus census = build_census(rep, letters, threads);
    std::ofstream out(out_path, std::ios::binary);
    if (!out)
        throw UsageError("cannot write " + out_path);
    write_census(out, census);
    out.close();
    std::cout << census.entries.size() << " classes, T_effective " << format_decimal(census.T_effective)
              << ", written to " << out_path << "\n";
    if (!svg.empty())
        write_svg(svg, "census growth", "T", "log #R_T", {growth_series(census, file)});
    emit_result({{"command", "census"},
                 {"classes", census.entries.size()},
                 {"parabolic", census.parabolic},
                 {"T_effective", census.T_effective},
                 {"distortion", census.distortion},
                 {"out", out_path}});
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Simple length spectrum rigidity for surface group representations in SL(2,C)"};
    app.require_subcommand(1);
    int threads = 1;
    app.add_option("--threads", threads, "Worker threads for census and spectrum work")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    GenOptions gen;
    auto* gen_cmd = app.add_subcommand("gen", "Write a representation file");
    gen_cmd->add_option("--genus", gen.genus, "Surface genus (>= 2)")->required();
    gen_cmd->add_option("--bend", gen.bends, "Bend handle:t, t complex such as 0.02i (repeatable)");
    gen_cmd->add_option("--conjugate", gen.conjugate, "'random' or a matrix a,b,c,d of complex entries");
    gen_cmd->add_option("--seed", gen.seed, "Seed for --conjugate random")->capture_default_str();
    gen_cmd->add_flag("--bar", gen.bar, "Apply complex conjugation last");
    gen_cmd->add_option("-o,--out", gen.out, "Output file")->required();

    std::string file1, file2;
    int budget = 3, escalations = 2;
    auto* compare_cmd = app.add_subcommand("compare", "Decide conjugacy from simple length spectra");
    compare_cmd->add_option("file1", file1)->required();
    compare_cmd->add_option("file2", file2)->required();
    compare_cmd->add_option("--budget", budget, "Curve stream budget")->capture_default_str();
    compare_cmd->add_option("--escalations", escalations, "Budget doublings before giving up")->capture_default_str();

    int letters = 6;
    std::optional<double> T;
    std::string svg;
    auto* pressure_cmd = app.add_subcommand("pressure", "Entropy and renormalized pressure intersection");
    pressure_cmd->add_option("file1", file1)->required();
    pressure_cmd->add_option("file2", file2)->required();
    pressure_cmd->add_option("--letters", letters, "Word-length cutoff of the census")->capture_default_str();
    pressure_cmd->add_option("--T", T, "Length truncation (default: T_effective)");
    pressure_cmd->add_option("--emit-svg", svg, "Write a census growth plot");

    std::string alpha_text = "a1", beta_text = "b1";
    int nmin = 1, nmax = 10;
    auto* expand_cmd = app.add_subcommand("expand", "Eigenvalue expansion along alpha^n beta");
    expand_cmd->add_option("file", file1)->required();
    expand_cmd->add_option("--alpha", alpha_text, "Curve word for alpha")->capture_default_str();
    expand_cmd->add_option("--beta", beta_text, "Curve word for beta")->capture_default_str();
    expand_cmd->add_option("--nmin", nmin, "First exponent")->capture_default_str();
    expand_cmd->add_option("--nmax", nmax, "Last exponent")->capture_default_str();
    expand_cmd->add_option("--emit-svg", svg, "Write a residual plot");

    int spectrum_budget = 2;
    auto* spectrum_cmd = app.add_subcommand("spectrum", "Simple curves with their lengths");
    spectrum_cmd->add_option("file", file1)->required();
    spectrum_cmd->add_option("--budget", spectrum_budget, "Curve stream budget")->capture_default_str();

    std::string census_out;
    auto* census_cmd = app.add_subcommand("census", "Export the geodesic census");
    census_cmd->add_option("file", file1)->required();
    census_cmd->add_option("--letters", letters, "Word-length cutoff")->capture_default_str();
    census_cmd->add_option("-o,--out", census_out, "Output file")->required();
    census_cmd->add_option("--emit-svg", svg, "Write a census growth plot");

    for (auto* sub : {gen_cmd, compare_cmd, pressure_cmd, expand_cmd, spectrum_cmd, census_cmd})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (gen_cmd->parsed())
            return run_gen(gen);
        if (compare_cmd->parsed())
            return run_compare(file1, file2, budget, escalations, threads);
        if (pressure_cmd->parsed())
            return run_pressure(file1, file2, letters, T, svg, threads);
        if (expand_cmd->parsed())
            return run_expand(file1, alpha_text, beta_text, nmin, nmax, svg);
        if (spectrum_cmd->parsed())
            return run_spectrum(file1, spectrum_budget);
        return run_census(file1, letters, census_out, svg, threads);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        emit_result({{"status", "usage-error"}, {"error", e.what()}});
        return kExitUsage;
    } catch (const LoadError& e) {
        std::cerr << "error: " << e.what() << "\n";
        emit_result({{"status", "load-failure"}, {"error", e.what()}});
        return kExitConstruction;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        emit_result({{"status", "numerical-failure"}, {"error", e.what()}});
        return e.kind() == ErrorKind::TruncationUnsafe ? kExitUsage : kExitAmbiguous;
    }
}
