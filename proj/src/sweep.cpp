#include "invisim/sweep.hpp"

#include "invisim/quadrature.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace invisim {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string csv_escape(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

} // namespace

void SweepConfig::validate() const {
    if (!(kMin >= 1.0))
        throw ConfigError("kmin must be at least 1");
    if (samples < 2)
        throw ConfigError("samples must be at least 2");
    quadrature.validate();
}

ResonanceTable resonant_frequencies(double lambda0, int nMin, int nMax, double delta) {
    if (!(delta > 0.0))
        throw ConfigError("phase shift must be positive");
    ResonanceTable t;
    t.lambda0 = lambda0;
    cplx A = (I - 2.0 * lambda0) / (I + 2.0 * lambda0);
    double offset = -2.0 * std::arg(A) / delta;
    double spacing = 2.0 * pi / delta;
    for (int n = nMin; n <= nMax; ++n) {
        double k = offset + spacing * n;
        if (k > 0.0)
            t.entries.emplace_back(n, k);
    }
    return t;
}

std::vector<double> sweep_wavenumbers(const SweepConfig& c) {
    std::vector<double> ks;
    if (c.kMax < c.kMin)
        return ks;
    for (int i = 0; i < c.samples; ++i)
        ks.push_back(c.kMin + (c.kMax - c.kMin) * i / (c.samples - 1));
    return ks;
}

std::vector<CrossSectionReport> run_sweep(const Obstacle& ob, const SweepConfig& config) {
    config.validate();
    std::vector<double> ks = sweep_wavenumbers(config);
    std::vector<CrossSectionReport> out;
    for (double k : ks) {
        FarFieldOptions opts = config.farfield;
        opts.surface = k <= config.surfaceMaxK;
        opts.surfaceOptions.layers = config.quadrature;
        try {
            out.push_back(cross_section_report(ob, k, config.lambda, opts));
        } catch (const Error& e) {
            CrossSectionReport r;
            r.k = k;
            r.lambda = config.lambda.lambda;
            r.sigmaAsym = sigma_asymptotic(k, config.lambda, ob.delta);
            r.error = e.what();
            out.push_back(r);
            if (!config.outputPath.empty())
                emit_report(out, ReportFormat::Csv, config.outputPath);
            if (dynamic_cast<const BudgetExceeded*>(&e))
                throw;
        }
    }
    return out;
}

std::vector<double> default_eps_schedule(const std::vector<double>& ks) {
    std::vector<double> eps;
    for (double k : ks)
        eps.push_back(std::pow(k, -0.25));
    return eps;
}

std::vector<AverageRow> impedance_average_experiment(const Obstacle& ob, double lambda0,
                                                     const std::vector<int>& nList,
                                                     const std::vector<double>& eps,
                                                     const FarFieldOptions& opts, int lambdaNodes) {
    if (nList.size() != eps.size())
        throw ConfigError("eps schedule and n list differ in length");
    for (double e : eps)
        if (!(e > 0.0))
            throw ConfigError("eps schedule must be positive");
    const Rule1D& g = gauss_legendre(lambdaNodes);
    std::vector<AverageRow> rows;
    for (size_t i = 0; i < nList.size(); ++i) {
        auto table = resonant_frequencies(lambda0, nList[i], nList[i], ob.delta);
        if (table.entries.empty())
            throw ConfigError("no positive resonant wavenumber for n = " + std::to_string(nList[i]));
        AverageRow row;
        row.n = nList[i];
        row.k = table.entries.front().second;
        row.eps = eps[i];
        std::vector<Impedance> lambdas;
        for (double x : g.x)
            lambdas.emplace_back(lambda0 + eps[i] * x);
        lambdas.emplace_back(lambda0);
        std::vector<double> sig = cross_sections_for_impedances(ob, row.k, lambdas, opts);
        CompensatedSum s;
        for (size_t j = 0; j < g.size(); ++j)
            s.add(0.5 * g.w[j] * sig[j]);
        row.averaged = s.value();
        row.atCenter = sig.back();
        rows.push_back(row);
    }
    return rows;
}

ReportFormat parse_format(const std::string& name) {
    if (name == "csv")
        return ReportFormat::Csv;
    if (name == "json")
        return ReportFormat::Json;
    throw ConfigError("unknown format '" + name + "' (expected csv or json)");
}

double round_report_value(double v) { return std::strtod(num(v).c_str(), nullptr); }

std::string format_reports(const std::vector<CrossSectionReport>& reports, ReportFormat format) {
    std::ostringstream os;
    if (format == ReportFormat::Csv) {
        bool anyError = false;
        for (const auto& r : reports)
            anyError = anyError || !r.error.empty();
        os << "k,lambda_re,lambda_im,sigma_grid,sigma_surface,sigma_asym,sigma_transport,forward_re,forward_im";
        if (anyError)
            os << ",error";
        os << '\n';
        for (const auto& r : reports) {
            bool failed = !r.error.empty();
            os << num(r.k) << ',' << num(r.lambda.real()) << ',' << num(r.lambda.imag()) << ',';
            os << (failed ? "" : num(r.sigmaGrid)) << ',';
            os << (r.sigmaSurface ? num(*r.sigmaSurface) : "") << ',';
            os << num(r.sigmaAsym) << ',';
            os << (failed ? "" : num(r.sigmaTransport)) << ',';
            os << (failed ? "" : num(r.forwardRe)) << ',' << (failed ? "" : num(r.forwardIm));
            if (anyError)
                os << ',' << (failed ? csv_escape(r.error) : "");
            os << '\n';
        }
        return os.str();
    }
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : reports)
        arr.push_back(nlohmann::ordered_json::parse(report_json(r)));
    return arr.dump(2) + "\n";
}

std::string report_json(const CrossSectionReport& r, int indent) {
    nlohmann::ordered_json o;
    o["k"] = round_report_value(r.k);
    o["lambda_re"] = round_report_value(r.lambda.real());
    o["lambda_im"] = round_report_value(r.lambda.imag());
    o["sigma_grid"] = round_report_value(r.sigmaGrid);
    o["sigma_surface"] =
        r.sigmaSurface ? nlohmann::ordered_json(round_report_value(*r.sigmaSurface)) : nlohmann::ordered_json();
    o["sigma_asym"] = round_report_value(r.sigmaAsym);
    o["sigma_transport"] = round_report_value(r.sigmaTransport);
    o["forward_re"] = round_report_value(r.forwardRe);
    o["forward_im"] = round_report_value(r.forwardIm);
    if (!r.error.empty())
        o["error"] = r.error;
    return o.dump(indent);
}

void emit_report(const std::vector<CrossSectionReport>& reports, ReportFormat format, const std::string& path) {
    if (reports.empty())
        throw ConfigError("no reports to emit");
    std::string text = format_reports(reports, format);
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path);
    if (!f)
        throw Error("cannot open '" + path + "' for writing");
    f << text;
    if (!f)
        throw Error("write to '" + path + "' failed");
}

std::vector<CrossSectionReport> parse_reports_json(const std::string& text) {
    auto arr = nlohmann::json::parse(text);
    std::vector<CrossSectionReport> out;
    for (const auto& o : arr) {
        CrossSectionReport r;
        r.k = o.at("k").get<double>();
        r.lambda = {o.at("lambda_re").get<double>(), o.at("lambda_im").get<double>()};
        r.sigmaGrid = o.at("sigma_grid").get<double>();
        if (!o.at("sigma_surface").is_null())
            r.sigmaSurface = o.at("sigma_surface").get<double>();
        r.sigmaAsym = o.at("sigma_asym").get<double>();
        r.sigmaTransport = o.at("sigma_transport").get<double>();
        r.forwardRe = o.at("forward_re").get<double>();
        r.forwardIm = o.at("forward_im").get<double>();
        if (o.contains("error"))
            r.error = o.at("error").get<std::string>();
        out.push_back(r);
    }
    return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw ConfigError("cannot read config file '" + path + "'");
    std::map<std::string, std::string> out;
    std::string line;
    int lineNo = 0;
    while (std::getline(f, line)) {
        ++lineNo;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineNo) + ": expected key=value");
        std::string key = trim(t.substr(0, eq));
        if (key.rfind("--", 0) == 0)
            key = key.substr(2);
        if (key.empty())
            throw ConfigError(path + ":" + std::to_string(lineNo) + ": empty key");
        out[key] = trim(t.substr(eq + 1));
    }
    return out;
}

Impedance parse_impedance(const std::string& text) {
    std::string t = trim(text);
    size_t comma = t.find(',');
    try {
        size_t used = 0;
        double re = std::stod(t.substr(0, comma), &used);
        if (trim(t.substr(0, comma)).size() != used)
            throw std::invalid_argument("trailing");
        double im = 0.0;
        if (comma != std::string::npos) {
            std::string rest = trim(t.substr(comma + 1));
            im = std::stod(rest, &used);
            if (used != rest.size())
                throw std::invalid_argument("trailing");
        }
        return Impedance(re, im);
    } catch (const std::invalid_argument&) {
        throw ConfigError("cannot parse impedance '" + text + "' (expected RE,IM)");
    } catch (const std::out_of_range&) {
        throw ConfigError("impedance out of range: '" + text + "'");
    }
}

} // namespace invisim
