#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "startile/corrections.hpp"
#include "startile/errors.hpp"
#include "startile/nets.hpp"
#include "startile/realize.hpp"
#include "startile/rulefile.hpp"
#include "startile/starmap.hpp"
#include "startile/substitution.hpp"
#include "startile/systems.hpp"

namespace py = pybind11;
using namespace startile;

namespace {

using XY = std::pair<double, double>;

XY to_xy(Point2 p) { return {p.x, p.y}; }
Point2 to_point(const XY& p) { return {p.first, p.second}; }

std::vector<XY> to_xy(const Polygon& poly) {
    std::vector<XY> out;
    for (const auto& p : poly) out.push_back(to_xy(p));
    return out;
}

Polygon to_polygon(const std::vector<XY>& pts) {
    Polygon out;
    for (const auto& p : pts) out.push_back(to_point(p));
    return out;
}

py::int_ to_pyint(const BigInt& v) { return py::int_(py::str(v.str())); }

py::dict summary_dict(const JacobianSummary& s) {
    py::dict d;
    d["samples"] = s.samples;
    d["median"] = s.median;
    d["p90"] = s.p90;
    d["max"] = s.max;
    d["excluded_fraction"] = s.excluded_fraction;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Star-shaped substitution tilings and prescribed-Jacobian maps";

    static py::exception<ValidationError> validation_error(m, "ValidationError", PyExc_ValueError);
    static py::exception<GeometryError> geometry_error(m, "GeometryError", PyExc_ValueError);
    static py::exception<ResourceError> resource_error(m, "ResourceError", PyExc_MemoryError);
    static py::exception<NumericError> numeric_error(m, "NumericError", PyExc_ArithmeticError);
    static py::exception<DomainError> domain_error(m, "DomainError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ValidationError& e) {
            validation_error(e.what());
        } catch (const GeometryError& e) {
            geometry_error(e.what());
        } catch (const ResourceError& e) {
            resource_error(e.what());
        } catch (const NumericError& e) {
            numeric_error(e.what());
        } catch (const DomainError& e) {
            domain_error(e.what());
        }
    });

    py::class_<SubstitutionSystem>(m, "System")
        .def_readonly("name", &SubstitutionSystem::name)
        .def_readonly("xi", &SubstitutionSystem::xi)
        .def_property_readonly("size", &SubstitutionSystem::size)
        .def("prototile", [](const SubstitutionSystem& s, int id) { return to_xy(s.prototile(id).shape.vertices()); })
        .def("center", [](const SubstitutionSystem& s, int id) { return to_xy(s.prototile(id).shape.center()); })
        .def("matrix", [](const SubstitutionSystem& s) { return substitution_matrix(s); })
        .def("to_json", [](const SubstitutionSystem& s) { return system_to_json(s).dump(1); })
        .def("__repr__", [](const SubstitutionSystem& s) { return "<System " + s.name + ">"; });

    m.def("builtin_names", &builtin_names);
    m.def("load_system", &resolve_system, py::arg("name_or_path"), "Built-in name or rule-file path");
    m.def(
        "system_from_json", [](const std::string& text) { return system_from_json(nlohmann::json::parse(text)); },
        py::arg("text"));
    m.def("is_primitive", [](const SubstitutionSystem& s) { return is_primitive(substitution_matrix(s)); });

    m.def(
        "inflate_patch",
        [](const SubstitutionSystem& s, int root, int level, std::uint64_t cap) {
            const Patch patch = inflate_patch(s, root, level, cap);
            py::list tiles;
            for (const auto& t : patch.tiles) {
                py::dict d;
                d["type"] = t.type;
                d["address"] = t.address.path;
                d["vertices"] = to_xy(tile_shape(s, t).vertices());
                tiles.append(d);
            }
            return tiles;
        },
        py::arg("system"), py::arg("root"), py::arg("level"), py::arg("max_tiles") = kDefaultTileCap);

    m.def(
        "count_tiles",
        [](const SubstitutionSystem& s, int root, int level) {
            py::list out;
            for (const auto& c : count_tiles(s, root, level)) out.append(to_pyint(c));
            return out;
        },
        py::arg("system"), py::arg("root"), py::arg("level"));

    m.def("pf_stats", [](const SubstitutionSystem& s) {
        const PFStats st = pf_stats(s);
        py::dict d;
        d["lambda"] = st.lambda;
        d["lambda2_abs"] = st.lambda2_abs;
        d["rho"] = st.rho;
        d["right"] = st.right_vec;
        d["left"] = st.left_vec;
        return d;
    });

    m.def(
        "e_value",
        [](const SubstitutionSystem& s, int root, int level) {
            const EValue e = e_value(s, root, level);
            return py::make_tuple(e.e, e.excess);
        },
        py::arg("system"), py::arg("root"), py::arg("level"));

    m.def(
        "convergence_report",
        [](const SubstitutionSystem& s, int levels) {
            const ConvergenceStats st = convergence_report(s, levels);
            py::list rows;
            for (const auto& r : st.rows) {
                py::dict d;
                d["level"] = r.level;
                d["E"] = r.E;
                d["excess"] = r.excess;
                d["product"] = r.product;
                rows.append(d);
            }
            py::dict d;
            d["rows"] = rows;
            d["fitted_epsilon"] = st.fitted_epsilon;
            d["eigen_ratio"] = st.eigen_ratio;
            d["rho"] = st.rho;
            return d;
        },
        py::arg("system"), py::arg("levels"));

    py::class_<ElevationMap>(m, "ElevationMap")
        .def(py::init([](const std::vector<XY>& vertices, const XY& center) {
                 return ElevationMap(StarPolygon(to_polygon(vertices), to_point(center)));
             }),
             py::arg("vertices"), py::arg("center"))
        .def_property_readonly("jacobian", &ElevationMap::jacobian)
        .def("forward", [](const ElevationMap& h, const XY& x) { return to_xy(h.forward(to_point(x))); })
        .def("inverse", [](const ElevationMap& h, const XY& y) { return to_xy(h.inverse(to_point(y))); })
        .def("elevation", [](const ElevationMap& h, const XY& y) { return h.elevation(to_point(y)); });

    m.def(
        "correct_supertile",
        [](const SubstitutionSystem& s, int type, int level, int samples, std::uint64_t seed) {
            const SupertileProblem problem = supertile_problem(s, type, level);
            CorrectorOptions opts;
            opts.seed = seed;
            TileCorrector psi;
            {
                py::gil_scoped_release release;
                psi = tile_corrector(problem.whole, problem.parts, problem.values, opts);
            }
            py::list stages;
            for (const auto& st : psi.report.stages) {
                py::dict d;
                d["stage"] = st.stage;
                d["median"] = st.median;
                d["p90"] = st.p90;
                d["boundary_displacement"] = st.boundary_displacement;
                stages.append(d);
            }
            py::dict d;
            d["stages"] = stages;
            d["identity"] = psi.report.identity;
            d["sampled"] = summary_dict(verify_corrector(psi, problem, samples, seed));
            return d;
        },
        py::arg("system"), py::arg("type"), py::arg("level") = 1, py::arg("samples") = 10000, py::arg("seed") = 42);

    m.def(
        "realize",
        [](const SubstitutionSystem& s, int root, int levels, int working_level, int samples, std::uint64_t seed) {
            RealizeOptions opts;
            opts.working_level = working_level;
            opts.corrector.seed = seed;
            py::list rows;
            Realization real;
            {
                py::gil_scoped_release release;
                real = build_phi_m(s, root, levels, TileDensity::f_tau(), opts);
            }
            for (int k = 1; k <= levels; ++k) {
                py::dict d = summary_dict(verify_realization(real.prefix(k), s, TileDensity::f_tau(), samples, seed));
                d["level"] = k;
                rows.append(d);
            }
            return rows;
        },
        py::arg("system"), py::arg("root") = 0, py::arg("levels") = 1, py::arg("working_level") = 6,
        py::arg("samples") = 10000, py::arg("seed") = 42);

    m.def(
        "tau_y",
        [](const std::vector<XY>& points, const std::vector<XY>& region, double side, bool exact) {
            const SeparatedNet net = make_net(to_polygon(points), to_polygon(region), 0);
            TauYOptions opts;
            opts.side = side;
            opts.distance = exact ? SquareDistance::exact : SquareDistance::corners_and_center;
            const TauY tau = build_tau_Y(net, net.region, opts);
            py::dict d;
            d["side"] = tau.side;
            d["tiles"] = tau.tiles;
            d["shapes"] = distinct_tile_shapes(tau);
            return d;
        },
        py::arg("points"), py::arg("region"), py::arg("side") = 0.0, py::arg("exact") = false);
}
