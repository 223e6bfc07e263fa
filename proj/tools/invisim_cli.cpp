// Command line driver: obstacle export, near and far fields, sweeps and resonance tables.

#include "invisim/farfield.hpp"
#include "invisim/sweep.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace invisim;

namespace {

struct Common {
    double width = 1.0;
    double depth = 1.0;
    double notch = 0.0375;
    double ppw = 10.0;
    double cutoffScale = CutoffProfile{}.scale;
    int threads = 0;
    std::string out;
    std::string format = "csv";
};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

Vec3 parse_point(const std::string& s) {
    std::stringstream ss(s);
    std::string part;
    std::vector<double> v;
    while (std::getline(ss, part, ','))
        v.push_back(std::stod(part));
    if (v.size() != 3)
        throw ConfigError("expected a point x,y,z, got '" + s + "'");
    return {v[0], v[1], v[2]};
}

// Writes to the --out path or stdout.
void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path);
    if (!f || !(f << text))
        throw Error("cannot write '" + path + "'");
}

QuadratureSpec quadrature(const Common& c) {
    QuadratureSpec q;
    q.pointsPerWavelength = c.ppw;
    q.cutoff.scale = c.cutoffScale;
    q.validate();
    return q;
}

// Near-uniform directions on the sphere.
std::vector<Vec3> fibonacci_directions(int n) {
    std::vector<Vec3> out;
    const double golden = pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
        double z = 1.0 - 2.0 * (i + 0.5) / n;
        double r = std::sqrt(1.0 - z * z);
        out.emplace_back(r * std::cos(golden * i), r * std::sin(golden * i), z);
    }
    return out;
}

// Puts key=value pairs from --config right after the subcommand as --key=value, so later
// command line flags take precedence.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string path;
    std::vector<std::string> rest;
    for (size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (path.empty())
        return rest;
    std::vector<std::string> out;
    size_t at = 0;
    if (!rest.empty() && rest[0].rfind("-", 0) != 0)
        out.push_back(rest[at++]);
    for (const auto& [key, value] : read_config_file(path))
        out.push_back("--" + key + "=" + value);
    out.insert(out.end(), rest.begin() + at, rest.end());
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scattering by the two-prism invisible obstacle"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_option("--config", "File of key=value lines; command line flags override it");

    Common c;
    auto common = [&](CLI::App* sub) {
        sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        sub->add_option("--width", c.width, "Base width of the obstacle");
        sub->add_option("--depth", c.depth, "Extrusion depth");
        sub->add_option("--notch", c.notch, "Inward displacement of the lateral faces, relative to the width");
        sub->add_option("--ppw", c.ppw, "Gauss nodes per 2 pi of phase in the face quadrature");
        sub->add_option("--cutoff-scale", c.cutoffScale, "Edge band scale of the cut-off");
        sub->add_option("--threads", c.threads, "Worker threads (0 = hardware)");
        sub->add_option("--out", c.out, "Output path (default stdout)");
        sub->add_option("--format", c.format, "csv or json");
    };

    std::string lambdaText = "0,0";
    double k = 50.0;

    auto* geom = app.add_subcommand("geom", "Export the obstacle as JSON");
    common(geom);

    auto* near = app.add_subcommand("nearfield", "Field values at probe points");
    common(near);
    std::string mode = "kirchhoff";
    std::vector<std::string> probes;
    std::string pointsFile;
    near->add_option("--k", k, "Wavenumber");
    near->add_option("--lambda", lambdaText, "Impedance RE,IM");
    near->add_option("--mode", mode, "eikonal or kirchhoff")->check(CLI::IsMember({"eikonal", "kirchhoff"}));
    near->add_option("--probe", probes, "Probe point x,y,z (repeatable)")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    near->add_option("--points", pointsFile, "File with one x,y,z point per line");

    auto* far = app.add_subcommand("farfield", "Far-field amplitude and cross sections");
    common(far);
    int directions = 200;
    bool report = false, surface = false;
    far->add_option("--k", k, "Wavenumber");
    far->add_option("--lambda", lambdaText, "Impedance RE,IM");
    far->add_option("--directions", directions, "Number of near-uniform directions");
    far->add_flag("--report", report, "Emit the cross-section report as JSON");
    far->add_flag("--surface", surface, "Also evaluate the surface route (slow)");

    auto* sweep = app.add_subcommand("sweep", "Cross sections over a range of wavenumbers");
    common(sweep);
    SweepConfig sc;
    sweep->add_option("--kmin", sc.kMin, "Smallest wavenumber");
    sweep->add_option("--kmax", sc.kMax, "Largest wavenumber");
    sweep->add_option("--samples", sc.samples, "Number of wavenumbers");
    sweep->add_option("--lambda", lambdaText, "Impedance RE,IM");
    sweep->add_option("--surface-max-k", sc.surfaceMaxK, "Largest wavenumber for the surface route");

    auto* res = app.add_subcommand("resonances", "Resonant wavenumbers for a real impedance");
    common(res);
    double lambda0 = 0.0;
    int nMin = 1, nMax = 20;
    res->add_option("--lambda0", lambda0, "Real impedance");
    res->add_option("--nmin", nMin, "First index");
    res->add_option("--nmax", nMax, "Last index");

    auto* avg = app.add_subcommand("average", "Impedance-averaged cross sections at resonances");
    common(avg);
    double epsScale = 1.0;
    avg->add_option("--lambda0", lambda0, "Real impedance");
    avg->add_option("--nmin", nMin, "First index");
    avg->add_option("--nmax", nMax, "Last index");
    avg->add_option("--eps-scale", epsScale, "Multiplier of the k^(-1/4) half-width schedule");

    try {
        std::vector<std::string> args = expand_config(argc, argv);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        ReportFormat format = parse_format(c.format);
        Obstacle ob = build_obstacle(c.width, c.depth, c.notch);

        if (*geom) {
            write_text(c.out, obstacle_to_json(ob) + "\n");
        } else if (*near) {
            Impedance lam = parse_impedance(lambdaText);
            std::vector<Vec3> pts;
            for (const auto& p : probes)
                pts.push_back(parse_point(p));
            if (!pointsFile.empty()) {
                std::ifstream f(pointsFile);
                if (!f)
                    throw ConfigError("cannot read points file '" + pointsFile + "'");
                std::string line;
                while (std::getline(f, line))
                    if (!line.empty() && line[0] != '#')
                        pts.push_back(parse_point(line));
            }
            if (pts.empty())
                for (int i = 0; i <= 20; ++i)
                    pts.emplace_back(-0.375 * c.width, 0.5 * c.depth, -0.5 + 2.0 * i / 20.0);
            std::ostringstream os;
            if (mode == "eikonal") {
                os << "x,y,z,Re,Im,branches\n";
                for (const auto& r : pts) {
                    EikonalValue v = eikonal_total_field(r, k, lam, ob);
                    os << num(r.x()) << ',' << num(r.y()) << ',' << num(r.z()) << ',' << num(v.value.real())
                       << ',' << num(v.value.imag()) << ',' << v.branchCount << '\n';
                }
            } else {
                KirchhoffField field(ob, k, lam, quadrature(c));
                os << "x,y,z,Re,Im,gradRe_x,gradRe_y,gradRe_z,gradIm_x,gradIm_y,gradIm_z,zone\n";
                for (const auto& r : pts) {
                    FieldSample s = field.sample(r);
                    os << num(r.x()) << ',' << num(r.y()) << ',' << num(r.z()) << ',' << num(s.value.real())
                       << ',' << num(s.value.imag());
                    for (int i = 0; i < 3; ++i)
                        os << ',' << num(s.gradient[i].real());
                    for (int i = 0; i < 3; ++i)
                        os << ',' << num(s.gradient[i].imag());
                    os << ',' << to_string(s.zone) << '\n';
                }
            }
            write_text(c.out, os.str());
        } else if (*far) {
            Impedance lam = parse_impedance(lambdaText);
            FarFieldOptions opts;
            opts.cutoff.scale = c.cutoffScale;
            opts.surfaceOptions.layers = quadrature(c);
            opts.surfaceOptions.threads = c.threads;
            if (report) {
                opts.surface = surface;
                write_text(c.out, report_json(cross_section_report(ob, k, lam, opts)) + "\n");
            } else {
                if (directions < 1)
                    throw ConfigError("directions must be positive");
                ClosedFormFarField cf(ob, k, lam, opts.cutoff);
                std::ostringstream os;
                os << "theta_x,theta_y,theta_z,Re,Im\n";
                for (const auto& t : fibonacci_directions(directions)) {
                    cplx u = cf.amplitude(t);
                    os << num(t.x()) << ',' << num(t.y()) << ',' << num(t.z()) << ',' << num(u.real()) << ','
                       << num(u.imag()) << '\n';
                }
                write_text(c.out, os.str());
            }
        } else if (*sweep) {
            sc.lambda = parse_impedance(lambdaText);
            sc.quadrature = quadrature(c);
            sc.farfield.cutoff.scale = c.cutoffScale;
            sc.farfield.surfaceOptions.threads = c.threads;
            sc.outputPath = c.out;
            auto reports = run_sweep(ob, sc);
            if (reports.empty()) {
                std::cerr << "empty wavenumber range, nothing to report\n";
                return 0;
            }
            emit_report(reports, format, c.out);
        } else if (*res) {
            auto table = resonant_frequencies(lambda0, nMin, nMax, ob.delta);
            std::ostringstream os;
            os << "n,k\n";
            for (const auto& [n, kn] : table.entries)
                os << n << ',' << num(kn) << '\n';
            write_text(c.out, os.str());
        } else if (*avg) {
            auto table = resonant_frequencies(lambda0, nMin, nMax, ob.delta);
            std::vector<int> ns;
            std::vector<double> ks;
            for (const auto& [n, kn] : table.entries) {
                ns.push_back(n);
                ks.push_back(kn);
            }
            std::vector<double> eps = default_eps_schedule(ks);
            for (double& e : eps)
                e *= epsScale;
            FarFieldOptions opts;
            opts.cutoff.scale = c.cutoffScale;
            auto rows = impedance_average_experiment(ob, lambda0, ns, eps, opts);
            std::ostringstream os;
            os << "n,k,eps,sigma_average,sigma_center\n";
            for (const auto& r : rows)
                os << r.n << ',' << num(r.k) << ',' << num(r.eps) << ',' << num(r.averaged) << ','
                   << num(r.atCenter) << '\n';
            write_text(c.out, os.str());
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
