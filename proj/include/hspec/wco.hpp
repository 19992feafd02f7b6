#pragma once

// Finite sections of W_phi f = (phi')^{1/2} (f o phi) in the monomial basis,
// and of the operators appearing in the splitting
//   W_phi f = phi'(0)^{1/2} f(0) + A M_{(phi')^{3/2}} C_phi D f + A M_psi C_phi f,
// where A z^n = z^{n+1}/(n+1) and psi = ((phi')^{1/2})'.

#include <Eigen/Dense>
#include <cstddef>
#include <filesystem>
#include <iosfwd>

#include "hspec/holo.hpp"

namespace hspec {

// Column n holds the first rows() Taylor coefficients of the image of z^n.
struct OperatorMatrix {
    Eigen::MatrixXcd entries;

    OperatorMatrix() = default;
    explicit OperatorMatrix(Eigen::MatrixXcd m) : entries(std::move(m)) {}

    std::size_t rows() const { return static_cast<std::size_t>(entries.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(entries.cols()); }
    // leading rows x cols block
    OperatorMatrix leading(std::size_t rows, std::size_t cols) const;
};

// Largest singular value.
double operator_norm(const Eigen::MatrixXcd& m);

// Default boundary sample count for extracting `order` coefficients.
std::size_t default_samples(std::size_t order);

// Requires N_r >= N_c. M = 0 selects default_samples(N_r).
OperatorMatrix build_wco(const HoloMap& map, std::size_t n_cols, std::size_t n_rows, std::size_t M = 0);

// (N + 1) x N section of A; singular values are exactly 1/n, n = 1..N.
OperatorMatrix build_shift_integral(std::size_t N);

struct ProofSplit {
    OperatorMatrix T;  // evaluation term + A M_{(phi')^{3/2}} C_phi D
    OperatorMatrix X;  // A M_psi C_phi
    double psi_sup = 0.0;  // max |psi| on the boundary grid
};

// Requires phi(0) = 0 (see HoloMap::normalized_at_origin).
ProofSplit build_proof_split(const HoloMap& map, std::size_t n_cols, std::size_t n_rows, std::size_t M = 0);

// ||W_{phi1} W_{phi2} - W_{phi2 o phi1}|| on the leading N/2 columns, sections
// with n_rows rows (0 -> 4N).
double compose_check(const HoloMap& map1, const HoloMap& map2, std::size_t N, std::size_t n_rows = 0);

struct KernelAction {
    CoeffVec predicted;  // closed form (conj(phi'(w))(1-|w|^2)/(1-|phi(w)|^2))^{1/2} k_{phi(w)}
    CoeffVec computed;   // W^H k_w from the matrix section
};

// W^H applied to the normalized kernel at w, N coefficients (section has 4N rows).
KernelAction adjoint_kernel_action(const HoloMap& map, cplx w, std::size_t N);

// Row-major "re,im" pairs, one matrix row per line.
void write_csv(std::ostream& os, const OperatorMatrix& m);
void write_csv(const std::filesystem::path& path, const OperatorMatrix& m);

// "HSPM1", uint64 LE rows, uint64 LE cols, then rows*cols (re, im) f64 LE
// pairs in row-major order.
void write_binary(std::ostream& os, const OperatorMatrix& m);
void write_binary(const std::filesystem::path& path, const OperatorMatrix& m);
OperatorMatrix read_binary(std::istream& is);
OperatorMatrix read_binary(const std::filesystem::path& path);

}  // namespace hspec
