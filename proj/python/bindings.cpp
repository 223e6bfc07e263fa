#include "invisim/farfield.hpp"
#include "invisim/quadrature.hpp"
#include "invisim/sweep.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace invisim;

namespace {

Impedance to_impedance(cplx lambda) { return Impedance(lambda); }

py::dict report_dict(const CrossSectionReport& r) {
    py::dict d;
    d["k"] = r.k;
    d["lambda"] = r.lambda;
    d["sigma_grid"] = r.sigmaGrid;
    d["sigma_surface"] = r.sigmaSurface ? py::cast(*r.sigmaSurface) : py::none();
    d["sigma_asym"] = r.sigmaAsym;
    d["sigma_transport"] = r.sigmaTransport;
    d["forward"] = cplx(r.forwardRe, r.forwardIm);
    if (!r.error.empty())
        d["error"] = r.error;
    return d;
}

FarFieldOptions far_options(double nodesPer2Pi, double cutoffScale) {
    FarFieldOptions o;
    o.grid.nodesPer2Pi = nodesPer2Pi;
    o.cutoff.scale = cutoffScale;
    return o;
}

} // namespace

PYBIND11_MODULE(invisim, m) {
    m.doc() = "High-frequency scattering by an invisible polyhedron: rays, Kirchhoff fields, far fields";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<NonPlanarFace>(m, "NonPlanarFace", base.ptr());
    py::register_exception<EdgeHit>(m, "EdgeHit", base.ptr());
    py::register_exception<PoleAtLambda>(m, "PoleAtLambda", base.ptr());
    py::register_exception<BudgetExceeded>(m, "BudgetExceeded", base.ptr());
    py::register_exception<ZoneAmbiguous>(m, "ZoneAmbiguous", base.ptr());
    py::register_exception<LobeUnresolved>(m, "LobeUnresolved", base.ptr());

    py::enum_<FaceLabel>(m, "FaceLabel")
        .value("UpperLeft", FaceLabel::UpperLeft)
        .value("UpperRight", FaceLabel::UpperRight)
        .value("LowerLeft", FaceLabel::LowerLeft)
        .value("LowerRight", FaceLabel::LowerRight)
        .value("Passive", FaceLabel::Passive);

    py::enum_<Zone>(m, "Zone")
        .value("Shadow", Zone::Shadow)
        .value("Reflected", Zone::Reflected)
        .value("Outside", Zone::Outside)
        .value("Boundary", Zone::Boundary);

    py::class_<PolygonFace>(m, "PolygonFace")
        .def_readonly("vertices", &PolygonFace::vertices)
        .def_readonly("normal", &PolygonFace::normal)
        .def_readonly("label", &PolygonFace::label)
        .def("centroid", &PolygonFace::centroid)
        .def("area", &PolygonFace::area);

    py::class_<Obstacle>(m, "Obstacle")
        .def_readonly("faces", &Obstacle::faces)
        .def_readonly("width", &Obstacle::width)
        .def_readonly("depth", &Obstacle::depth)
        .def_readonly("notch", &Obstacle::notch)
        .def_readonly("delta", &Obstacle::delta)
        .def_readonly("d", &Obstacle::d)
        .def_readonly("geom_cross", &Obstacle::geomCross)
        .def("face", &Obstacle::face, py::return_value_policy::copy)
        .def("center", &Obstacle::center)
        .def("radius", &Obstacle::radius)
        .def("to_json", [](const Obstacle& o) { return obstacle_to_json(o); });

    m.def("build_obstacle", &build_obstacle, py::arg("width") = 1.0, py::arg("depth") = 1.0,
          py::arg("notch") = 0.0375, py::arg("source_offset") = 1.0);
    m.def("phase_shift_delta", &phase_shift_delta);
    m.def("reflect_direction", &reflect_direction, py::arg("alpha"), py::arg("n"));
    m.def("classify_zone", &classify_zone, py::arg("r"), py::arg("alpha"), py::arg("face"),
          py::arg("tol") = default_zone_tol());

    m.def(
        "trace_ray",
        [](double x0, double y0, const Obstacle& ob) {
            RayPath p = trace_ray(x0, y0, ob);
            py::dict d;
            d["collisions"] = p.collisions;
            d["action"] = p.action;
            d["excess"] = p.excess();
            d["exit_direction"] = p.exit_direction();
            d["hits"] = p.hits;
            return d;
        },
        py::arg("x0"), py::arg("y0"), py::arg("obstacle"));

    m.def(
        "reflection_coefficient",
        [](cplx lambda, double nAlpha) { return face_reflection_coefficient(to_impedance(lambda), nAlpha); },
        py::arg("lambda_"), py::arg("n_alpha") = -0.5);

    m.def(
        "eikonal_field",
        [](const Vec3& r, double k, cplx lambda, const Obstacle& ob, bool scattered) {
            EikonalValue v = scattered ? eikonal_scattered_field(r, k, to_impedance(lambda), ob)
                                       : eikonal_total_field(r, k, to_impedance(lambda), ob);
            return py::make_tuple(v.value, v.branchCount, v.onCut);
        },
        py::arg("r"), py::arg("k"), py::arg("lambda_"), py::arg("obstacle"), py::arg("scattered") = false);

    py::class_<KirchhoffField>(m, "KirchhoffField")
        .def(py::init([](const Obstacle& ob, double k, cplx lambda, double ppw, double cutoffScale) {
                 QuadratureSpec s;
                 s.pointsPerWavelength = ppw;
                 s.cutoff.scale = cutoffScale;
                 s.validate();
                 return std::make_unique<KirchhoffField>(ob, k, to_impedance(lambda), s);
             }),
             py::arg("obstacle"), py::arg("k"), py::arg("lambda_"), py::arg("ppw") = 10.0,
             py::arg("cutoff_scale") = CutoffProfile{}.scale)
        .def(
            "sample",
            [](const KirchhoffField& f, const Vec3& r) {
                FieldSample s = f.sample(r);
                return py::make_tuple(s.value, CVec3(s.gradient), s.zone);
            },
            py::arg("r"))
        .def(
            "values",
            [](const KirchhoffField& f, const Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>& pts) {
                std::vector<cplx> out(pts.rows());
                parallel_for(out.size(), [&](size_t i) { out[i] = f.sample(pts.row(i).transpose(), false).value; });
                return py::array_t<cplx>(out.size(), out.data());
            },
            py::arg("points"));

    m.def(
        "u0_field",
        [](const Vec3& r, const Obstacle& ob, double k, cplx lambda, double ppw) {
            QuadratureSpec s;
            s.pointsPerWavelength = ppw;
            FieldSample f = u0_field(r, ob, k, to_impedance(lambda), s);
            return py::make_tuple(f.value, CVec3(f.gradient), f.zone);
        },
        py::arg("r"), py::arg("obstacle"), py::arg("k"), py::arg("lambda_"), py::arg("ppw") = 10.0);

    py::class_<ClosedFormFarField>(m, "ClosedFormFarField")
        .def(py::init([](const Obstacle& ob, double k, cplx lambda, double cutoffScale) {
                 CutoffProfile c;
                 c.scale = cutoffScale;
                 return std::make_unique<ClosedFormFarField>(ob, k, to_impedance(lambda), c);
             }),
             py::arg("obstacle"), py::arg("k"), py::arg("lambda_"), py::arg("cutoff_scale") = CutoffProfile{}.scale)
        .def("amplitude", &ClosedFormFarField::amplitude, py::arg("theta"))
        .def("angular_factor", py::overload_cast<const Vec3&>(&ClosedFormFarField::angular_factor, py::const_),
             py::arg("theta"))
        .def("face_transform", &ClosedFormFarField::face_transform, py::arg("theta"))
        .def_property_readonly("A", &ClosedFormFarField::A);

    m.def(
        "spherical_grid",
        [](const Obstacle& ob, double k, double nodesPer2Pi) {
            GridOptions o;
            o.nodesPer2Pi = nodesPer2Pi;
            SphericalGrid g = spherical_grid(ob, k, o);
            py::array_t<double> nodes({g.size(), size_t(3)});
            auto n = nodes.mutable_unchecked<2>();
            for (size_t i = 0; i < g.size(); ++i)
                for (int c = 0; c < 3; ++c)
                    n(i, c) = g.nodes[i][c];
            return py::make_tuple(nodes, py::array_t<double>(g.weights.size(), g.weights.data()));
        },
        py::arg("obstacle"), py::arg("k"), py::arg("nodes_per_2pi") = GridOptions{}.nodesPer2Pi);

    m.def(
        "cross_section_report",
        [](const Obstacle& ob, double k, cplx lambda, bool surface, double nodesPer2Pi, double cutoffScale) {
            FarFieldOptions o = far_options(nodesPer2Pi, cutoffScale);
            o.surface = surface;
            CrossSectionReport r;
            {
                py::gil_scoped_release release;
                r = cross_section_report(ob, k, to_impedance(lambda), o);
            }
            return report_dict(r);
        },
        py::arg("obstacle"), py::arg("k"), py::arg("lambda_"), py::arg("surface") = false,
        py::arg("nodes_per_2pi") = GridOptions{}.nodesPer2Pi, py::arg("cutoff_scale") = CutoffProfile{}.scale);

    m.def(
        "cross_sections_for_impedances",
        [](const Obstacle& ob, double k, const std::vector<cplx>& lambdas) {
            std::vector<Impedance> imps;
            for (cplx l : lambdas)
                imps.push_back(to_impedance(l));
            py::gil_scoped_release release;
            return cross_sections_for_impedances(ob, k, imps);
        },
        py::arg("obstacle"), py::arg("k"), py::arg("lambdas"));

    m.def(
        "sigma_asymptotic",
        [](double k, cplx lambda, double delta) { return sigma_asymptotic(k, to_impedance(lambda), delta); },
        py::arg("k"), py::arg("lambda_"), py::arg("delta"));

    m.def(
        "resonant_frequencies",
        [](double lambda0, int nMin, int nMax, double delta) { return resonant_frequencies(lambda0, nMin, nMax, delta).entries; },
        py::arg("lambda0"), py::arg("n_min"), py::arg("n_max"), py::arg("delta"));

    m.def(
        "sweep",
        [](const Obstacle& ob, double kMin, double kMax, int samples, cplx lambda, double surfaceMaxK) {
            SweepConfig c;
            c.kMin = kMin;
            c.kMax = kMax;
            c.samples = samples;
            c.lambda = to_impedance(lambda);
            c.surfaceMaxK = surfaceMaxK;
            std::vector<CrossSectionReport> reps;
            {
                py::gil_scoped_release release;
                reps = run_sweep(ob, c);
            }
            py::list out;
            for (const auto& r : reps)
                out.append(report_dict(r));
            return out;
        },
        py::arg("obstacle"), py::arg("k_min"), py::arg("k_max"), py::arg("samples"), py::arg("lambda_"),
        py::arg("surface_max_k") = 0.0);

    m.def(
        "impedance_average",
        [](const Obstacle& ob, double lambda0, const std::vector<int>& ns, std::optional<std::vector<double>> eps) {
            std::vector<double> schedule;
            if (eps) {
                schedule = *eps;
            } else {
                std::vector<double> ks;
                for (int n : ns) {
                    auto t = resonant_frequencies(lambda0, n, n, ob.delta);
                    if (t.entries.empty())
                        throw ConfigError("no positive resonant wavenumber for n = " + std::to_string(n));
                    ks.push_back(t.entries.front().second);
                }
                schedule = default_eps_schedule(ks);
            }
            std::vector<AverageRow> rows;
            {
                py::gil_scoped_release release;
                rows = impedance_average_experiment(ob, lambda0, ns, schedule);
            }
            py::list out;
            for (const auto& r : rows) {
                py::dict d;
                d["n"] = r.n;
                d["k"] = r.k;
                d["eps"] = r.eps;
                d["averaged"] = r.averaged;
                d["at_center"] = r.atCenter;
                out.append(d);
            }
            return out;
        },
        py::arg("obstacle"), py::arg("lambda0"), py::arg("n_list"), py::arg("eps") = py::none());
}
