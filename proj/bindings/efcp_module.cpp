#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "efcp/changepoint.hpp"
#include "efcp/errors.hpp"
#include "efcp/fpca.hpp"
#include "efcp/function.hpp"
#include "efcp/io.hpp"
#include "efcp/karcher.hpp"
#include "efcp/phase.hpp"
#include "efcp/simulate.hpp"
#include "efcp/warping.hpp"

namespace py = pybind11;
using namespace efcp;

PYBIND11_MODULE(_efcp, m) {
  m.doc() = "Elastic functional changepoint detection";

  py::register_exception<invalid_input_error>(m, "InvalidInputError",
                                              PyExc_ValueError);
  py::register_exception<degenerate_data_error>(m, "DegenerateDataError",
                                                PyExc_RuntimeError);

  py::class_<Grid>(m, "Grid")
      .def(py::init<>())
      .def(py::init([](std::size_t n, double lo, double hi) {
             return Grid{n, lo, hi};
           }),
           py::arg("num_points"), py::arg("domain_min") = 0.0,
           py::arg("domain_max") = 1.0)
      .def_readwrite("num_points", &Grid::num_points)
      .def_readwrite("domain_min", &Grid::domain_min)
      .def_readwrite("domain_max", &Grid::domain_max)
      .def("spacing", &Grid::spacing)
      .def("t", &Grid::t)
      .def("original", &Grid::original)
      .def("__eq__", [](const Grid& a, const Grid& b) { return a == b; });

  py::class_<FunctionSample>(m, "FunctionSample")
      .def(py::init<>())
      .def(py::init([](const Grid& g, std::vector<double> v, std::string lab) {
             FunctionSample f;
             f.grid = g;
             f.values = std::move(v);
             f.label = std::move(lab);
             return f;
           }),
           py::arg("grid"), py::arg("values"), py::arg("label") = "")
      .def_readwrite("grid", &FunctionSample::grid)
      .def_readwrite("values", &FunctionSample::values)
      .def_readwrite("label", &FunctionSample::label);

  py::class_<SrvfSample>(m, "SrvfSample")
      .def(py::init<>())
      .def_readwrite("grid", &SrvfSample::grid)
      .def_readwrite("values", &SrvfSample::values)
      .def_readwrite("f0", &SrvfSample::f0);

  py::class_<Warping>(m, "Warping")
      .def(py::init<>())
      .def_readwrite("grid", &Warping::grid)
      .def_readwrite("values", &Warping::values);

  py::class_<PsiSample>(m, "PsiSample")
      .def(py::init<>())
      .def_readwrite("grid", &PsiSample::grid)
      .def_readwrite("values", &PsiSample::values);

  py::class_<ShootingVector>(m, "ShootingVector")
      .def(py::init<>())
      .def_readwrite("grid", &ShootingVector::grid)
      .def_readwrite("values", &ShootingVector::values)
      .def_readwrite("base", &ShootingVector::base);

  py::class_<SmoothingConfig>(m, "SmoothingConfig")
      .def(py::init<>())
      .def_readwrite("window", &SmoothingConfig::window)
      .def_readwrite("passes", &SmoothingConfig::passes);

  m.def("srvf_transform", &srvf_transform, py::arg("f"));
  m.def("srvf_inverse", &srvf_inverse, py::arg("q"));
  m.def("resample", &resample, py::arg("f"), py::arg("new_num_points"));
  m.def("box_smooth", &box_smooth, py::arg("f"), py::arg("config"));

  m.def("identity_warping", &identity_warping, py::arg("grid"));
  m.def("group_action", &group_action, py::arg("q"), py::arg("gamma"));
  m.def("warp_function", &warp_function, py::arg("f"), py::arg("gamma"));
  m.def("invert_warp", &invert_warp, py::arg("gamma"));
  m.def("compose", &compose, py::arg("g1"), py::arg("g2"));

  py::class_<OptimalWarpResult>(m, "OptimalWarpResult")
      .def_readonly("warp", &OptimalWarpResult::warp)
      .def_readonly("distance", &OptimalWarpResult::distance)
      .def_readonly("dp_energy", &OptimalWarpResult::dp_energy);
  m.def("optimal_warp", &optimal_warp, py::arg("q1"), py::arg("q2"));
  m.def("amplitude_distance", &amplitude_distance, py::arg("f1"),
        py::arg("f2"));

  m.def("to_psi", &to_psi, py::arg("gamma"));
  m.def("from_psi", &from_psi, py::arg("psi"));
  m.def("psi_distance", &psi_distance, py::arg("a"), py::arg("b"));
  m.def("phase_distance", &phase_distance, py::arg("g1"), py::arg("g2"));
  m.def("exp_map", &exp_map, py::arg("v"));
  m.def("log_map", &log_map, py::arg("psi1"), py::arg("base"));

  py::class_<WarpMeanResult>(m, "WarpMeanResult")
      .def_readonly("mean_warp", &WarpMeanResult::mean_warp)
      .def_readonly("mean_psi", &WarpMeanResult::mean_psi)
      .def_readonly("iterations", &WarpMeanResult::iterations)
      .def_readonly("converged", &WarpMeanResult::converged)
      .def_readonly("objective_history", &WarpMeanResult::objective_history);
  m.def("karcher_mean_warps", &karcher_mean_warps, py::arg("warps"),
        py::arg("tol") = 1e-6, py::arg("max_iter") = 100);
  m.def("shooting_vectors", &shooting_vectors, py::arg("warps"),
        py::arg("base"));

  py::class_<AlignmentConfig> align_cfg(m, "AlignmentConfig");
  py::enum_<AlignmentConfig::Init>(align_cfg, "Init")
      .value("l2_medoid", AlignmentConfig::Init::l2_medoid)
      .value("elastic_medoid", AlignmentConfig::Init::elastic_medoid);
  align_cfg.def(py::init<>())
      .def_readwrite("tol", &AlignmentConfig::tol)
      .def_readwrite("max_iter", &AlignmentConfig::max_iter)
      .def_readwrite("init", &AlignmentConfig::init)
      .def_readwrite("center_warps", &AlignmentConfig::center_warps);

  py::class_<AlignmentResult>(m, "AlignmentResult")
      .def_readonly("mean_q", &AlignmentResult::mean_q)
      .def_readonly("mean_f", &AlignmentResult::mean_f)
      .def_readonly("aligned_q", &AlignmentResult::aligned_q)
      .def_readonly("warps", &AlignmentResult::warps)
      .def_readonly("aligned_f", &AlignmentResult::aligned_f)
      .def_readonly("objective_history", &AlignmentResult::objective_history)
      .def_readonly("iterations", &AlignmentResult::iterations)
      .def_readonly("converged", &AlignmentResult::converged);
  m.def("karcher_mean_align", &karcher_mean_align, py::arg("functions"),
        py::arg("config") = AlignmentConfig{});
  m.def("prefix_means", &prefix_means, py::arg("alignment"));

  py::class_<ComponentSelector> selector(m, "ComponentSelector");
  py::enum_<ComponentSelector::Kind>(selector, "Kind")
      .value("fixed", ComponentSelector::Kind::fixed)
      .value("fraction", ComponentSelector::Kind::fraction);
  selector.def(py::init<>())
      .def_readwrite("kind", &ComponentSelector::kind)
      .def_readwrite("fixed_count", &ComponentSelector::fixed_count)
      .def_readwrite("fraction", &ComponentSelector::fraction)
      .def_static("fixed", &ComponentSelector::fixed, py::arg("d"))
      .def_static("cumulative", &ComponentSelector::cumulative, py::arg("tau"));
  m.def("select_components", &select_components, py::arg("eigenvalues"),
        py::arg("selector"));

  py::enum_<FpcaKind>(m, "FpcaKind")
      .value("vertical", FpcaKind::vertical)
      .value("horizontal", FpcaKind::horizontal);
  py::class_<FpcaResult>(m, "FpcaResult")
      .def_readonly("kind", &FpcaResult::kind)
      .def_readonly("grid", &FpcaResult::grid)
      .def_readonly("mean", &FpcaResult::mean)
      .def_readonly("directions", &FpcaResult::directions)
      .def_readonly("eigenvalues", &FpcaResult::eigenvalues)
      .def_readonly("scores", &FpcaResult::scores)
      .def_readonly("weights", &FpcaResult::weights);
  m.def("vertical_fpca", &vertical_fpca, py::arg("alignment"),
        py::arg("selector"));
  m.def("horizontal_fpca", &horizontal_fpca, py::arg("shooting_vectors"),
        py::arg("selector"), py::arg("center") = false);
  m.def("covariance_eigenvalues", &covariance_eigenvalues, py::arg("rows"),
        py::arg("weights"), py::arg("center"));

  py::class_<TestConfig>(m, "TestConfig")
      .def(py::init<>())
      .def_readwrite("alpha", &TestConfig::alpha)
      .def_readwrite("mc_reps", &TestConfig::mc_reps)
      .def_readwrite("mc_grid", &TestConfig::mc_grid)
      .def_readwrite("components", &TestConfig::components)
      .def_readwrite("eigen_truncation", &TestConfig::eigen_truncation)
      .def_readwrite("rng_seed", &TestConfig::rng_seed)
      .def_readwrite("per_prefix", &TestConfig::per_prefix)
      .def_readwrite("alignment", &TestConfig::alignment)
      .def_readwrite("lambda2_permutations",
                     &TestConfig::lambda2_permutations)
      .def("validate", &TestConfig::validate);

  py::class_<ChangepointResult>(m, "ChangepointResult")
      .def_readonly("method", &ChangepointResult::method)
      .def_readonly("statistic", &ChangepointResult::statistic)
      .def_readonly("k_star", &ChangepointResult::k_star)
      .def_readonly("p_value", &ChangepointResult::p_value)
      .def_readonly("lambda2", &ChangepointResult::lambda2)
      .def_readonly("lambda2_p_value", &ChangepointResult::lambda2_p_value)
      .def_readonly("cusum_trace", &ChangepointResult::cusum_trace)
      .def_readonly("mean_before", &ChangepointResult::mean_before)
      .def_readonly("mean_after", &ChangepointResult::mean_after)
      .def_readonly("delta_hat", &ChangepointResult::delta_hat)
      .def_readonly("degenerate", &ChangepointResult::degenerate)
      .def_readonly("alignment_converged",
                    &ChangepointResult::alignment_converged);

  py::class_<LimitDistribution>(m, "LimitDistribution")
      .def_readonly("draws", &LimitDistribution::draws);
  m.def("simulate_limit_sup", &simulate_limit_sup, py::arg("eigenvalues"),
        py::arg("config"));
  m.def("p_value", &p_value, py::arg("statistic"), py::arg("distribution"));

  m.def("amplitude_test_ff",
        py::overload_cast<const std::vector<FunctionSample>&,
                          const TestConfig&>(&amplitude_test_ff),
        py::arg("functions"), py::arg("config"));
  m.def("phase_test_ff",
        py::overload_cast<const std::vector<FunctionSample>&,
                          const TestConfig&>(&phase_test_ff),
        py::arg("functions"), py::arg("config"));
  m.def("amplitude_test_pca",
        py::overload_cast<const std::vector<FunctionSample>&,
                          const TestConfig&>(&amplitude_test_pca),
        py::arg("functions"), py::arg("config"));
  m.def("phase_test_pca",
        py::overload_cast<const std::vector<FunctionSample>&,
                          const TestConfig&>(&phase_test_pca),
        py::arg("functions"), py::arg("config"));
  m.def("cross_sectional_test", &cross_sectional_test, py::arg("functions"),
        py::arg("config"));
  m.def("amplitude_test_ff",
        py::overload_cast<const AlignmentResult&, const TestConfig&>(
            &amplitude_test_ff),
        py::arg("alignment"), py::arg("config"));
  m.def("phase_test_ff",
        py::overload_cast<const AlignmentResult&, const TestConfig&>(
            &phase_test_ff),
        py::arg("alignment"), py::arg("config"));
  m.def("amplitude_test_pca",
        py::overload_cast<const AlignmentResult&, const TestConfig&>(
            &amplitude_test_pca),
        py::arg("alignment"), py::arg("config"));
  m.def("phase_test_pca",
        py::overload_cast<const AlignmentResult&, const TestConfig&>(
            &phase_test_pca),
        py::arg("alignment"), py::arg("config"));

  py::enum_<Design>(m, "Design")
      .value("amplitude_change", Design::amplitude_change)
      .value("phase_change", Design::phase_change)
      .value("sensitivity", Design::sensitivity)
      .value("null_design", Design::null_design);

  py::class_<AmplitudeDesignParams>(m, "AmplitudeDesignParams")
      .def(py::init<>())
      .def_readwrite("z_mean_pre", &AmplitudeDesignParams::z_mean_pre)
      .def_readwrite("z_mean_post", &AmplitudeDesignParams::z_mean_post)
      .def_readwrite("z_sd", &AmplitudeDesignParams::z_sd)
      .def_readwrite("a_mean", &AmplitudeDesignParams::a_mean)
      .def_readwrite("a_sd", &AmplitudeDesignParams::a_sd);
  py::class_<PhaseDesignParams>(m, "PhaseDesignParams")
      .def(py::init<>())
      .def_readwrite("z_mean", &PhaseDesignParams::z_mean)
      .def_readwrite("z_sd", &PhaseDesignParams::z_sd)
      .def_readwrite("a_shift", &PhaseDesignParams::a_shift);
  py::class_<SensitivityDesignParams>(m, "SensitivityDesignParams")
      .def(py::init<>())
      .def_readwrite("coef_sd", &SensitivityDesignParams::coef_sd)
      .def_readwrite("star_min", &SensitivityDesignParams::star_min)
      .def_readwrite("star_max", &SensitivityDesignParams::star_max)
      .def_readwrite("min_change", &SensitivityDesignParams::min_change);

  py::class_<SimSpec>(m, "SimSpec")
      .def(py::init<>())
      .def_readwrite("design", &SimSpec::design)
      .def_readwrite("null_base", &SimSpec::null_base)
      .def_readwrite("n", &SimSpec::n)
      .def_readwrite("changepoint", &SimSpec::changepoint)
      .def_readwrite("grid_size", &SimSpec::grid_size)
      .def_readwrite("rng_seed", &SimSpec::rng_seed)
      .def_readwrite("amplitude", &SimSpec::amplitude)
      .def_readwrite("phase", &SimSpec::phase)
      .def_readwrite("sensitivity", &SimSpec::sensitivity)
      .def("validate", &SimSpec::validate);
  m.def("generate", &generate, py::arg("spec"));
  m.def("phase_design_warp", &phase_design_warp, py::arg("t"), py::arg("a"));

  py::class_<Dataset>(m, "Dataset")
      .def(py::init<>())
      .def(py::init([](std::vector<FunctionSample> fs) {
             Dataset ds;
             if (!fs.empty()) ds.grid = fs.front().grid;
             ds.functions = std::move(fs);
             return ds;
           }),
           py::arg("functions"))
      .def_readwrite("grid", &Dataset::grid)
      .def_readwrite("functions", &Dataset::functions);
  m.def("dataset_to_csv", &dataset_to_csv, py::arg("dataset"));
  m.def("dataset_from_csv", &dataset_from_csv, py::arg("text"));
  m.def("dataset_to_json", &dataset_to_json, py::arg("dataset"));
  m.def("dataset_from_json", &dataset_from_json, py::arg("text"));
  m.def("read_dataset", &read_dataset, py::arg("path"));
  m.def("write_dataset", &write_dataset, py::arg("path"), py::arg("dataset"));
  m.def("result_to_json", &result_to_json, py::arg("result"),
        py::arg("config"), py::arg("dataset"), py::arg("smooth_window") = 0,
        py::arg("smooth_passes") = 1);
  m.def("write_alignment_files", &write_alignment_files, py::arg("dir"),
        py::arg("alignment"), py::arg("dataset"));
}
