#pragma once

#include "invisim/farfield.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace invisim {

struct SweepConfig {
    double kMin = 14.0;
    double kMax = 90.0;
    int samples = 200;
    Impedance lambda;
    QuadratureSpec quadrature = surface_layer_spec();
    FarFieldOptions farfield;
    // The surface route is filled in only up to this wavenumber.
    double surfaceMaxK = 60.0;
    std::string outputPath;

    void validate() const;
};

struct ResonanceTable {
    double lambda0 = 0.0;
    std::vector<std::pair<int, double>> entries; // (n, k_n)
};

// k_n = (-2 arg A(lambda0) + 2 pi n) / delta for n in [nMin, nMax], keeping k_n > 0.
ResonanceTable resonant_frequencies(double lambda0, int nMin, int nMax, double delta);

// Wavenumbers of a sweep: samples points evenly spaced over [kMin, kMax], empty when kMax < kMin.
std::vector<double> sweep_wavenumbers(const SweepConfig& config);

// One report per wavenumber, in order. A failing sample keeps its slot with the error set.
std::vector<CrossSectionReport> run_sweep(const Obstacle& obstacle, const SweepConfig& config);

struct AverageRow {
    int n = 0;
    double k = 0.0;
    double eps = 0.0;
    double averaged = 0.0; // mean of sigma over [lambda0 - eps, lambda0 + eps]
    double atCenter = 0.0; // sigma at lambda0
};

// Default shrinking half-widths eps_n = k_n^(-1/4).
std::vector<double> default_eps_schedule(const std::vector<double>& ks);

// Interval average of sigma at the resonant wavenumbers of lambda0, by Gauss quadrature in
// the impedance. nList and epsSchedule must have the same length.
std::vector<AverageRow> impedance_average_experiment(const Obstacle& obstacle, double lambda0,
                                                     const std::vector<int>& nList,
                                                     const std::vector<double>& epsSchedule,
                                                     const FarFieldOptions& opts = {},
                                                     int lambdaNodes = 21);

enum class ReportFormat { Csv, Json };

ReportFormat parse_format(const std::string& name);

// One report as a JSON object.
std::string report_json(const CrossSectionReport& report, int indent = 2);

std::string format_reports(const std::vector<CrossSectionReport>& reports, ReportFormat format);

// Writes to path, or to stdout when path is empty or "-".
void emit_report(const std::vector<CrossSectionReport>& reports, ReportFormat format,
                 const std::string& path);

std::vector<CrossSectionReport> parse_reports_json(const std::string& text);

// Value rounded to the 12 significant digits used in reports.
double round_report_value(double v);

// Plain key=value lines; blank lines and lines starting with '#' are skipped.
std::map<std::string, std::string> read_config_file(const std::string& path);

// "RE,IM" or "RE".
Impedance parse_impedance(const std::string& text);

} // namespace invisim
