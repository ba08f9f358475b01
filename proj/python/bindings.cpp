#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "orbitspec/cli.hpp"
#include "orbitspec/common.hpp"
#include "orbitspec/expsum.hpp"
#include "orbitspec/intlinalg.hpp"
#include "orbitspec/intpoly.hpp"
#include "orbitspec/modular.hpp"
#include "orbitspec/spectral.hpp"
#include "orbitspec/valueset.hpp"

namespace py = pybind11;
using namespace orbitspec;

namespace {

IntMatrix to_matrix(const std::vector<std::vector<std::int64_t>>& rows) {
  IntMatrix out;
  for (const auto& row : rows) {
    std::vector<Int> r;
    for (std::int64_t x : row) r.emplace_back(x);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_orbitspec, m) {
  m.doc() = "finite abelian rotation systems: spectral measures, measure increments, "
            "expansive directions, and polynomial counterexamples";

  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<BoundError>(m, "BoundError", PyExc_OverflowError);

  m.def(
      "run",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"),
      "Run the command-line interface on an argument list; returns "
      "(exit_code, stdout, stderr) with the report on stdout.");

  m.def(
      "value_set",
      [](const std::string& poly, std::int64_t modulus) {
        auto p = IntPolynomialMap::parse(poly);
        Int q(modulus);
        auto vs = is_prime(q) ? value_set_mod_prime(p, q) : value_set_mod_squarefree(p, q);
        return vs.residues;
      },
      py::arg("poly"), py::arg("modulus"),
      "Sorted residues of the polynomial image in Z/q (q prime or squarefree).");

  m.def(
      "psi",
      [](const std::string& poly, std::int64_t q) {
        return psi_empirical(IntPolynomialMap::parse(poly), q).value;
      },
      py::arg("poly"), py::arg("q"),
      "Largest exponential-average magnitude over frequencies with denominator exactly q.");

  m.def(
      "hua_threshold",
      [](const std::string& poly, double target, std::int64_t scan_bound) {
        return hua_threshold(IntPolynomialMap::parse(poly), target, scan_bound).m;
      },
      py::arg("poly"), py::arg("target"), py::arg("scan_bound") = 1000,
      "Largest q <= scan_bound with psi(q) >= target.");

  m.def(
      "invariant_factors",
      [](const std::vector<std::vector<std::int64_t>>& rows) {
        std::vector<std::int64_t> out;
        for (const auto& f : smith_normal_form(to_matrix(rows)).invariant_factors())
          out.push_back(to_i64(f));
        return out;
      },
      py::arg("matrix"), "Invariant factors of an integer matrix via Smith normal form.");

  m.def(
      "complexity_bound",
      [](const std::string& poly) {
        return to_i64(multiplicative_complexity_bound(IntPolynomialMap::parse(poly)).q);
      },
      py::arg("poly"),
      "Uniform gcd bound for coefficient vectors of (P - P(0)) . a over coprime (a, q).");

  m.def(
      "spectral_atoms",
      [](const std::vector<std::int64_t>& moduli, const std::vector<std::int64_t>& indices) {
        auto sys = RotationSystem::diagonal(moduli);
        auto a = set_from_indices(sys, indices);
        auto table = spectral_measure(sys, a);
        py::list out;
        for (const auto& atom : table.atoms()) {
          py::list point;
          for (const auto& c : atom.point.coords()) point.append(rational_string(c));
          out.append(py::make_tuple(point, atom.mass));
        }
        return out;
      },
      py::arg("moduli"), py::arg("indices"),
      "Spectral measure of an index set on the diagonal rotation system: "
      "a list of (torus point as rational strings, mass).");
}
