#pragma once

// Fermionic Fock space at desk scale: exterior powers of small matrices, the
// norm-product formula ||Λ^n T|| = s_1 ... s_n, Fock-norm partial products
// prod max(1, s_n), and the split of a positive operator into a contraction
// plus a trace-class part.

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hspec/spectra.hpp"
#include "hspec/wco.hpp"

namespace hspec {

inline constexpr std::size_t kMaxExteriorDim = 8;

// Increasing index tuples of length n drawn from [0, dim), lexicographic.
std::vector<std::vector<std::size_t>> increasing_tuples(std::size_t dim, std::size_t n);

// Matrix of Λ^n(m) in the basis e_I = e_{i1} ^ ... ^ e_{in}, i1 < ... < in:
// entry (I, J) is the minor det m[I, J]. Dimensions up to kMaxExteriorDim.
OperatorMatrix exterior_power(const OperatorMatrix& m, std::size_t n);

struct NormProduct {
    double lhs = 0.0;  // ||Λ^n(m)||
    double rhs = 0.0;  // s_1(m) ... s_n(m)
};

NormProduct lambda_norm_formula_check(const OperatorMatrix& m, std::size_t n);

enum class FockVerdict { BoundedTrivially, BoundedConverged, Unconverged };

std::string to_string(FockVerdict v);

struct FockReport {
    std::vector<double> partial_products;  // prod_{k<=n} max(1, s_k) over trusted k
    FockVerdict verdict = FockVerdict::Unconverged;
    double lambda_norm_estimate = 1.0;
};

FockReport fock_norm(const SingularSpectrum& spec);

nlohmann::json to_json(const FockReport& report);

// |W| = (W^H W)^{1/2}, from the SVD of W.
OperatorMatrix modulus(const OperatorMatrix& w);

struct ContractionTraceSplit {
    OperatorMatrix contraction;  // T P_{<=1} + P_{>1}
    OperatorMatrix trace_part;   // (T - 1) P_{>1}
    double trace = 0.0;          // sum (s_n - 1)^+
    std::vector<double> eigenvalues;  // of the input, descending
};

// Input must be Hermitian within 1e-10 (pass |W|).
ContractionTraceSplit split_contraction_trace(const OperatorMatrix& m);

}  // namespace hspec
