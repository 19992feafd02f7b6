#pragma once

// Restriction operator R : H^2(D) -> H^2(phi(D)). Its modulus squared R^H R
// is discretized on span{1, ..., z^{N-1}} by trapezoidal quadrature over the
// image boundary,
//   G_{m,n} = (1/2pi) int phi^n conj(phi^m) |phi'| dtheta,
// which equals W^H W for the weighted composition operator of the same map.

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hspec/holo.hpp"
#include "hspec/spectra.hpp"
#include "hspec/wco.hpp"

namespace hspec {

// Eigenvalue of R^H R with its H^2(D)-normalized eigenfunction.
struct EigenPair {
    double lambda = 0.0;
    CoeffVec f;
    bool trusted = false;
    double stab = 0.0;      // relative change against the N/2 truncation
    double residual = 0.0;  // ||G f - lambda f||
    bool degenerate = false;
};

struct ZeroCount {
    int count = 0;
    double radius = 0.0;
    double winding_residual = 0.0;
};

// Eigenvalue thresholds separating genuine eigenvalues from the essential
// spectrum: [0, 1] when the image touches the circle, {0} otherwise.
inline constexpr double kContactThreshold = 1.0 + 1e-3;
inline constexpr double kCompactThreshold = 1e-6;

// max |phi| on a 8192-point boundary grid reaches 1 within 1e-10
bool has_boundary_contact(const HoloMap& map);
double default_threshold(const HoloMap& map);

// Requires M >= 8N, M a power of two.
OperatorMatrix gram_matrix(const HoloMap& map, std::size_t N, std::size_t M);

struct ModuliComparison {
    double max_mismatch = 0.0;   // max_k |lambda_k(G) - s_k(W)^2| / s_k(W)^2
    std::vector<double> gram;    // top eigenvalues of G
    std::vector<double> squared; // top s_k(W)^2, W with 4N rows
};

ModuliComparison compare_moduli(const HoloMap& map, std::size_t N, std::size_t M, std::size_t count = 10);

// Descending eigenvalues of a Hermitian matrix.
std::vector<double> hermitian_eigenvalues(const Eigen::MatrixXcd& m);

std::vector<EigenPair> top_eigenpairs(const OperatorMatrix& G, double threshold = kContactThreshold,
                                      std::size_t max_pairs = std::numeric_limits<std::size_t>::max());

struct DoubleOrthogonality {
    double res_v = 0.0;  // coefficient inner products vs delta
    double res_u = 0.0;  // boundary inner products over phi(D) vs lambda delta, relative
};

DoubleOrthogonality double_orthogonality(const std::vector<EigenPair>& pairs, const HoloMap& map, std::size_t M);

struct EigenfunctionValue {
    cplx direct;
    cplx bootstrap;
};

// direct: coefficient evaluation. bootstrap: lambda^{-1} (1/2pi) int f(w)/(1 - z conj(w)) |dw|
// over the image boundary. Throws QuadratureError when z is within a node
// spacing of the boundary singularity.
EigenfunctionValue eval_eigenfunction(const EigenPair& pair, cplx z, const HoloMap& map, std::size_t M);

// Zeros of f inside |z| < radius by the argument principle.
ZeroCount count_zeros(const CoeffVec& f, double radius);

struct DeformationRow {
    double t = 0.0;
    std::size_t n = 0;       // 0-based index
    double s = 0.0;          // (n+1)-th singular value of W_{phi_t}
    bool s_trusted = false;
    double lambda = 0.0;     // n-th eigenvalue of G_t
    int zero_count = -1;     // -1: eigenpair not counted
    bool trusted = false;    // eigenpair above threshold and stabilized
};

struct DeformationStep {
    double t = 0.0;
    SingularSpectrum spectrum;
    std::vector<EigenPair> pairs;
    std::vector<ZeroCount> zeros;  // parallel to pairs, only for trusted ones
};

struct DeformationResult {
    std::vector<DeformationStep> steps;
    std::vector<DeformationRow> rows;
    double monotonicity_violation = 0.0;  // max_k (s_k(t) - s_k(t')) for t < t'
    bool monotone = true;
    bool interior_counts_exact = true;    // t < 1: trusted pair n has n zeros
    bool boundary_counts_bounded = true;  // t = 1: trusted pair n has <= n zeros
    bool simple = true;                   // trusted gaps > 1e-8
    std::size_t excluded = 0;             // untrusted pairs left out of the assertions
};

struct DeformationOptions {
    std::size_t N = 64;
    std::size_t M = 0;            // 0 -> max(1024, 8N)
    std::size_t max_pairs = 12;
    std::size_t report_rows = 16;
    double zero_radius = 1.0 - 1e-3;
};

DeformationResult semigroup_deformation(const HoloMap& map, const std::vector<double>& t_grid,
                                        const DeformationOptions& options);

// CSV columns t,n,s_n,lambda_n,zero_count,trusted
void write_csv(std::ostream& os, const std::vector<DeformationRow>& rows);

nlohmann::json to_json(const EigenPair& pair);

}  // namespace hspec
