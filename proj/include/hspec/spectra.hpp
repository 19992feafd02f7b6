#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "hspec/holo.hpp"
#include "hspec/wco.hpp"

namespace hspec {

// A value is trusted when it moves by less than this between the section and
// its (N_c/2, N_r/2) leading block.
inline constexpr double kTrustTol = 1e-6;
// slack granted to every inequality taken from the theory
inline constexpr double kTheorySlack = 1e-6;

// Descending singular values of a section. stab[k] is the change of the k-th
// value against the leading half block (NaN past N_c/2).
struct SingularSpectrum {
    std::vector<double> values;
    std::vector<double> stab;
    std::vector<bool> trusted;
    std::size_t n_cols = 0;
    std::size_t n_rows = 0;

    std::size_t trusted_count() const;
};

// Descending singular values, no stabilization.
std::vector<double> svd_values(const Eigen::MatrixXcd& m);

SingularSpectrum singular_values(const OperatorMatrix& m);

struct EssentialNormSample {
    std::size_t N = 0;
    double tail_norm = 0.0;  // ||W_N (I - P_{N/4})||
    double s_quarter = 0.0;  // s_{N/4} of the section
};

struct EssentialNormEstimate {
    double estimate = 0.0;
    bool converged = true;
    std::vector<EssentialNormSample> profile;
};

// The tail-block norm of the (N, 4N) section tends to ||W||_e; the estimate
// extrapolates the last two levels linearly in 1/N and clamps at 0.
EssentialNormEstimate essential_norm_estimate(const HoloMap& map, const std::vector<std::size_t>& n_list);

// max over trusted n >= 4 of n (s_n - 1), and 0 if none is positive.
double fit_K(const SingularSpectrum& spec);

struct SchwarzPickResult {
    double max_quotient = 0.0;
    std::size_t evaluated = 0;
    std::size_t skipped = 0;
};

// max of |phi'(z)| log|z| / log|phi(z)| over a low-discrepancy sample of the
// punctured disk. Requires phi(0) = 0.
SchwarzPickResult schwarz_pick_check(const HoloMap& map, std::size_t n_samples);

struct JuliaProbe {
    std::vector<double> quotients;  // |phi'(w)|(1-|w|^2)/(1-|phi(w)|^2), w = r zeta
    bool contact = false;           // |phi(zeta)| = 1
};

JuliaProbe julia_caratheodory_probe(const HoloMap& map, const std::vector<double>& radii, cplx zeta = 1.0);

// CSV rows (n, s_n, stab_n, trusted), n 1-based.
void write_csv(std::ostream& os, const SingularSpectrum& spec);

}  // namespace hspec
