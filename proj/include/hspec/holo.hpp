#pragma once

// Holomorphic self-maps of the unit disk and the Hardy-space primitives built
// on them: evaluation, derivatives, the branch of (phi')^{1/2}, Taylor
// coefficient extraction from boundary samples, reproducing kernels and the
// Littlewood–Paley form of the H^2 norm.
//
// Inner products on H^2 use normalized arclength d(theta)/2pi, so the norm of
// a function is the Euclidean norm of its Taylor coefficients.

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hspec/numeric.hpp"

namespace hspec {

// z -> r z, 0 < r <= 1
struct Scale {
    double r = 1.0;
};

// z -> e^{i theta} (z - a) / (1 - conj(a) z), |a| < 1.
// Derivative at 0 is e^{i theta} (1 - |a|^2); the map sends a to 0.
struct Mobius {
    cplx a{0.0, 0.0};
    double theta = 0.0;
};

// z -> sum_k coeffs[k] z^k
struct Poly {
    std::vector<cplx> coeffs;
};

using Primitive = std::variant<Scale, Mobius, Poly>;

// Value and first two derivatives at a point.
struct Jet {
    cplx value;
    cplx d1;
    cplx d2;
};

class HoloMap {
  public:
    HoloMap() = default;
    // stages act left to right: stages[0] is applied first
    explicit HoloMap(std::vector<Primitive> stages, int branch = 1);

    static HoloMap identity();
    static HoloMap scale(double r, int branch = 1);
    static HoloMap mobius(cplx a, double theta = 0.0, int branch = 1);
    static HoloMap poly(std::vector<cplx> coeffs, int branch = 1);

    const std::vector<Primitive>& stages() const { return stages_; }
    int branch() const { return branch_; }
    HoloMap with_branch(int branch) const;

    // phi_t(z) = phi(t z)
    HoloMap deformed(double t) const;
    // this map followed by `next`, i.e. next o this; the branch is chosen so
    // that (next o this)'^{1/2} = (next'^{1/2} o this) * this'^{1/2}
    HoloMap then(const HoloMap& next) const;
    // this map followed by the Möbius map sending phi(0) to 0
    HoloMap normalized_at_origin() const;

    Jet jet(cplx z) const;
    // single-stage map with no domain check, used by chain-rule evaluation
    static Jet stage_jet(const Primitive& p, cplx z);

  private:
    std::vector<Primitive> stages_;
    int branch_ = 1;
};

cplx eval_map(const HoloMap& map, cplx z);
cplx derivative(const HoloMap& map, cplx z);
cplx second_derivative(const HoloMap& map, cplx z);

// (phi'(z))^{1/2}, anchored at branch * sqrt(phi'(0)) and continued along
// the segment [0, z]. The step count doubles until consecutive values of
// phi' differ in argument by less than pi/4.
cplx sqrt_derivative(const HoloMap& map, cplx z);

// psi = ((phi')^{1/2})' = phi'' / (2 (phi')^{1/2})
cplx sqrt_derivative_prime(const HoloMap& map, cplx z);

struct ValidationReport {
    double max_modulus = 0.0;        // max |phi| on the boundary grid
    double min_derivative = 0.0;     // min |phi'| on the boundary grid
    int boundary_winding = 0;        // winding of phi(boundary) about phi(0)
    std::vector<std::string> warnings;
};

// Throws DomainError when phi leaves the closed disk or phi' vanishes on the
// grid. A failed injectivity screen is only a warning.
ValidationReport validate(const HoloMap& map, std::size_t samples = 4096);

nlohmann::json to_json(const HoloMap& map);
HoloMap holo_map_from_json(const nlohmann::json& j);

// Truncated Taylor coefficient sequence; coeffs[n] multiplies z^n.
struct CoeffVec {
    Eigen::VectorXcd coeffs;

    CoeffVec() = default;
    explicit CoeffVec(Eigen::VectorXcd c) : coeffs(std::move(c)) {}
    static CoeffVec unit(std::size_t n, std::size_t size);

    std::size_t size() const { return static_cast<std::size_t>(coeffs.size()); }
    double h2_norm() const { return coeffs.norm(); }
    cplx operator()(cplx z) const;  // Horner evaluation
    cplx derivative_at(cplx z) const;
    CoeffVec derivative() const;
};

nlohmann::json to_json(const CoeffVec& f);

// Equispaced samples e^{2 pi i j / M} of the unit circle together with phi,
// phi' and (phi')^{1/2} there.
struct BoundaryGrid {
    std::size_t M = 0;
    std::vector<cplx> nodes;
    std::vector<cplx> phi;
    std::vector<cplx> dphi;
    std::vector<cplx> sqrt_dphi;

    static BoundaryGrid sample(const HoloMap& map, std::size_t M);
};

std::vector<cplx> unit_circle_nodes(std::size_t M);

// First N Taylor coefficients of a function from its M boundary samples.
// Requires M a power of two with M >= 4N.
CoeffVec taylor_coeffs(std::span<const cplx> samples, std::size_t N);

// |f(0)|^2 + int_D |f'|^2 log(1/|z|^2) dlambda, lambda normalized to
// lambda(D) = 1. Radial integral by composite Gauss–Legendre on panels
// graded geometrically toward 0 (radial_nodes per panel), angular mean of
// |f'|^2 by FFT evaluation on a circle.
double littlewood_paley_norm(const CoeffVec& f, std::size_t radial_nodes = 32);

// 1 / (1 - z conj(w))
cplx kernel(cplx z, cplx w);
// (1 - |w|^2)^{1/2} conj(w)^n, n < N
CoeffVec normalized_kernel(cplx w, std::size_t N);
// conj(w)^n, n < N (unnormalized kernel K_w)
CoeffVec kernel_coeffs(cplx w, std::size_t N);

}  // namespace hspec
