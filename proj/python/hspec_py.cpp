#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hspec/corpus.hpp"
#include "hspec/error.hpp"
#include "hspec/experiment.hpp"
#include "hspec/fock.hpp"
#include "hspec/holo.hpp"
#include "hspec/restrict.hpp"
#include "hspec/spectra.hpp"
#include "hspec/wco.hpp"

namespace py = pybind11;
using namespace hspec;

namespace {

HoloMap map_from_json_text(const std::string& text) { return holo_map_from_json(nlohmann::json::parse(text)); }

}  // namespace

PYBIND11_MODULE(_hspec, m) {
    m.doc() = "Weighted composition operators on the Hardy space of the disk";
    m.attr("__version__") = version();

    auto base = py::register_exception<Error>(m, "HspecError", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<BranchError>(m, "BranchError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());
    py::register_exception<QuadratureError>(m, "QuadratureError", base.ptr());
    py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

    py::class_<HoloMap>(m, "HoloMap")
        .def_static("identity", &HoloMap::identity)
        .def_static("scale", &HoloMap::scale, py::arg("r"), py::arg("branch") = 1)
        .def_static("mobius", &HoloMap::mobius, py::arg("a"), py::arg("theta") = 0.0, py::arg("branch") = 1)
        .def_static("poly", &HoloMap::poly, py::arg("coeffs"), py::arg("branch") = 1)
        .def_static("from_json", &map_from_json_text, py::arg("text"))
        .def_static("named", [](const std::string& name) { return find_map(name).map; }, py::arg("name"))
        .def_property_readonly("branch", &HoloMap::branch)
        .def("with_branch", &HoloMap::with_branch)
        .def("deformed", &HoloMap::deformed, py::arg("t"))
        .def("then", &HoloMap::then, py::arg("next"))
        .def("normalized_at_origin", &HoloMap::normalized_at_origin)
        .def("to_json", [](const HoloMap& h) { return to_json(h).dump(); })
        .def("__call__", [](const HoloMap& h, cplx z) { return eval_map(h, z); })
        .def("derivative", [](const HoloMap& h, cplx z) { return derivative(h, z); })
        .def("sqrt_derivative", [](const HoloMap& h, cplx z) { return sqrt_derivative(h, z); });

    m.def("corpus_names", [] {
        std::vector<std::string> names;
        for (const auto& e : corpus()) names.push_back(e.name);
        for (const auto& e : extra_maps()) names.push_back(e.name);
        return names;
    });

    m.def("validate", [](const HoloMap& h) {
        const ValidationReport r = validate(h);
        py::dict d;
        d["max_modulus"] = r.max_modulus;
        d["min_derivative"] = r.min_derivative;
        d["boundary_winding"] = r.boundary_winding;
        d["warnings"] = r.warnings;
        return d;
    });

    m.def("taylor_coeffs", [](const std::vector<cplx>& samples, std::size_t N) { return taylor_coeffs(samples, N).coeffs; },
          py::arg("samples"), py::arg("N"));

    m.def("build_wco", [](const HoloMap& h, std::size_t n_cols, std::size_t n_rows, std::size_t M) {
            return build_wco(h, n_cols, n_rows, M).entries;
        },
        py::arg("map"), py::arg("n_cols"), py::arg("n_rows"), py::arg("M") = 0);

    m.def("singular_values", [](const Eigen::MatrixXcd& a) {
        const SingularSpectrum s = singular_values(OperatorMatrix(a));
        py::dict d;
        d["values"] = s.values;
        d["stab"] = s.stab;
        d["trusted"] = std::vector<bool>(s.trusted.begin(), s.trusted.end());
        return d;
    });

    m.def("essential_norm", [](const HoloMap& h, const std::vector<std::size_t>& n_list) {
        const EssentialNormEstimate e = essential_norm_estimate(h, n_list);
        py::dict d;
        d["estimate"] = e.estimate;
        d["converged"] = e.converged;
        std::vector<double> tails;
        for (const auto& p : e.profile) tails.push_back(p.tail_norm);
        d["tail_norms"] = tails;
        return d;
    });

    m.def("exterior_power", [](const Eigen::MatrixXcd& a, std::size_t n) {
        return exterior_power(OperatorMatrix(a), n).entries;
    });

    m.def("fock_norm", [](const HoloMap& h, std::size_t N) {
        const FockReport r = fock_norm(singular_values(build_wco(h, N, 4 * N)));
        py::dict d;
        d["partial_products"] = r.partial_products;
        d["verdict"] = to_string(r.verdict);
        d["lambda_norm_estimate"] = r.lambda_norm_estimate;
        return d;
    }, py::arg("map"), py::arg("N") = 64);

    m.def("gram_matrix", [](const HoloMap& h, std::size_t N, std::size_t M) { return gram_matrix(h, N, M).entries; },
          py::arg("map"), py::arg("N"), py::arg("M"));

    m.def("eigenpairs", [](const HoloMap& h, std::size_t N, std::size_t M, std::optional<double> threshold) {
            const OperatorMatrix G = gram_matrix(h, N, M);
            py::list out;
            for (const EigenPair& p : top_eigenpairs(G, threshold.value_or(default_threshold(h)))) {
                py::dict d;
                d["lambda"] = p.lambda;
                d["coeffs"] = p.f.coeffs;
                d["trusted"] = p.trusted;
                d["stab"] = p.stab;
                out.append(d);
            }
            return out;
        },
        py::arg("map"), py::arg("N"), py::arg("M"), py::arg("threshold") = py::none());

    m.def("count_zeros", [](const Eigen::VectorXcd& coeffs, double radius) {
            return count_zeros(CoeffVec(coeffs), radius).count;
        },
        py::arg("coeffs"), py::arg("radius") = 0.999);

    m.def("content_hash", &content_hash);

    m.def("run_experiment", [](const std::string& config_json) -> py::tuple {
            std::ostringstream log;
            nlohmann::json cfg;
            try {
                cfg = nlohmann::json::parse(config_json);
            } catch (const nlohmann::json::exception& e) {
                return py::make_tuple(kExitConfig, std::string("config error: ") + e.what() + "\n");
            }
            int code = 0;
            {
                py::gil_scoped_release release;
                code = run_experiment(cfg, log);
            }
            return py::make_tuple(code, log.str());
        },
        py::arg("config_json"));
}
