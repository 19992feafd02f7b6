#include "hspec/restrict.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "hspec/error.hpp"

namespace hspec {

namespace {

struct ImageBoundary {
    std::vector<cplx> phi;
    std::vector<double> speed;  // |phi'|
};

ImageBoundary sample_image(const HoloMap& map, std::size_t M) {
    ImageBoundary b;
    b.phi.resize(M);
    b.speed.resize(M);
    const auto nodes = unit_circle_nodes(M);
    for (std::size_t j = 0; j < M; ++j) {
        const Jet jt = map.jet(nodes[j]);
        if (std::abs(jt.value) > 1.0 + kValTol) throw DomainError("map leaves the closed disk on the boundary grid");
        b.phi[j] = jt.value;
        b.speed[j] = std::abs(jt.d1);
    }
    return b;
}

// (1/M) sum_j a_j conj(b_j) w_j with pairwise summation
cplx weighted_inner(const cplx* a, const cplx* b, const std::vector<double>& w, std::vector<cplx>& scratch) {
    const std::size_t M = w.size();
    scratch.resize(M);
    for (std::size_t j = 0; j < M; ++j) scratch[j] = a[j] * std::conj(b[j]) * w[j];
    return pairwise_sum(std::span<const cplx>(scratch)) / static_cast<double>(M);
}

void normalize_phase(Eigen::VectorXcd& v) {
    Eigen::Index at = 0;
    v.cwiseAbs().maxCoeff(&at);
    const cplx c = v(at);
    if (std::abs(c) > 0.0) v *= std::conj(c) / std::abs(c);
}

}  // namespace

bool has_boundary_contact(const HoloMap& map) {
    const auto nodes = unit_circle_nodes(8192);
    double best = 0.0;
    for (const cplx z : nodes) best = std::max(best, std::abs(map.jet(z).value));
    return best >= 1.0 - 1e-10;
}

double default_threshold(const HoloMap& map) {
    return has_boundary_contact(map) ? kContactThreshold : kCompactThreshold;
}

OperatorMatrix gram_matrix(const HoloMap& map, std::size_t N, std::size_t M) {
    if (N == 0) throw ConfigError("gram_matrix: need N >= 1");
    if (!is_power_of_two(M)) throw ConfigError("gram_matrix: M must be a power of two");
    if (M < 8 * N) throw ConfigError("gram_matrix: need M >= 8N quadrature nodes");
    const ImageBoundary b = sample_image(map, M);

    // powers(j, n) = phi_j^n, column-major so each power is contiguous
    Eigen::MatrixXcd powers(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(N));
    for (std::size_t j = 0; j < M; ++j) {
        cplx p = 1.0;
        for (std::size_t n = 0; n < N; ++n, p *= b.phi[j]) powers(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(n)) = p;
    }

    Eigen::MatrixXcd G(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    parallel_for(N, [&](std::size_t n) {
        std::vector<cplx> scratch;
        const cplx* pn = powers.col(static_cast<Eigen::Index>(n)).data();
        for (std::size_t m = 0; m < N; ++m) {
            const cplx* pm = powers.col(static_cast<Eigen::Index>(m)).data();
            G(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) = weighted_inner(pn, pm, b.speed, scratch);
        }
    });
    const double asym = (G - G.adjoint()).cwiseAbs().maxCoeff();
    if (asym > 1e-10) throw QuadratureError("gram_matrix: Hermiticity violated by " + std::to_string(asym));
    return OperatorMatrix(std::move(G));
}

std::vector<double> hermitian_eigenvalues(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(m, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver failed");
    const Eigen::VectorXd& v = eig.eigenvalues();
    std::vector<double> out(v.data(), v.data() + v.size());
    std::reverse(out.begin(), out.end());
    return out;
}

ModuliComparison compare_moduli(const HoloMap& map, std::size_t N, std::size_t M, std::size_t count) {
    ModuliComparison cmp;
    std::vector<double> s;
    parallel_for(2, [&](std::size_t i) {
        if (i == 0) {
            cmp.gram = hermitian_eigenvalues(gram_matrix(map, N, M).entries);
        } else {
            s = svd_values(build_wco(map, N, 4 * N).entries);
        }
    });
    count = std::min({count, cmp.gram.size(), s.size()});
    cmp.gram.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double sq = s[k] * s[k];
        cmp.squared.push_back(sq);
        cmp.max_mismatch = std::max(cmp.max_mismatch, std::abs(cmp.gram[k] - sq) / sq);
    }
    return cmp;
}

std::vector<EigenPair> top_eigenpairs(const OperatorMatrix& G, double threshold, std::size_t max_pairs) {
    if (G.rows() != G.cols()) throw PreconditionError("top_eigenpairs: matrix must be square");
    const auto N = static_cast<Eigen::Index>(G.rows());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(G.entries);
    if (eig.info() != Eigen::Success) throw NumericalError("top_eigenpairs: eigensolver failed");
    const std::vector<double> half = N >= 2 ? hermitian_eigenvalues(G.entries.topLeftCorner(N / 2, N / 2))
                                            : std::vector<double>{};

    std::vector<EigenPair> pairs;
    for (Eigen::Index k = 0; k < N && pairs.size() < max_pairs; ++k) {
        const Eigen::Index idx = N - 1 - k;  // eigenvalues come ascending
        const double lambda = eig.eigenvalues()(idx);
        if (!(lambda > threshold)) break;
        EigenPair p;
        p.lambda = lambda;
        Eigen::VectorXcd v = eig.eigenvectors().col(idx);
        v /= v.norm();
        normalize_phase(v);
        p.residual = (G.entries * v - lambda * v).norm();
        p.f = CoeffVec(std::move(v));
        if (static_cast<std::size_t>(k) < half.size()) {
            p.stab = std::abs(lambda - half[static_cast<std::size_t>(k)]) / lambda;
            p.trusted = p.stab < kTrustTol;
        } else {
            p.stab = std::numeric_limits<double>::infinity();
        }
        const auto gap_to = [&](Eigen::Index j) { return std::abs(lambda - eig.eigenvalues()(j)); };
        if ((idx + 1 < N && gap_to(idx + 1) < 1e-10) || (idx > 0 && gap_to(idx - 1) < 1e-10)) p.degenerate = true;
        pairs.push_back(std::move(p));
    }
    return pairs;
}

DoubleOrthogonality double_orthogonality(const std::vector<EigenPair>& pairs, const HoloMap& map, std::size_t M) {
    DoubleOrthogonality res;
    if (pairs.empty()) return res;
    const ImageBoundary b = sample_image(map, M);
    const std::size_t P = pairs.size();
    std::vector<std::vector<cplx>> values(P, std::vector<cplx>(M));
    parallel_for(P, [&](std::size_t i) {
        for (std::size_t j = 0; j < M; ++j) values[i][j] = pairs[i].f(b.phi[j]);
    });
    std::vector<cplx> scratch;
    for (std::size_t n = 0; n < P; ++n) {
        for (std::size_t k = 0; k < P; ++k) {
            const double delta = n == k ? 1.0 : 0.0;
            const cplx v_inner = pairs[k].f.coeffs.dot(pairs[n].f.coeffs);  // conj(f_k) . f_n
            res.res_v = std::max(res.res_v, std::abs(v_inner - delta));
            const cplx u_inner = weighted_inner(values[n].data(), values[k].data(), b.speed, scratch);
            const double scale = std::sqrt(pairs[n].lambda * pairs[k].lambda);
            res.res_u = std::max(res.res_u, std::abs(u_inner - pairs[n].lambda * delta) / scale);
        }
    }
    return res;
}

EigenfunctionValue eval_eigenfunction(const EigenPair& pair, cplx z, const HoloMap& map, std::size_t M) {
    if (std::abs(z) >= 1.0) throw DomainError("eval_eigenfunction: |z| must be < 1");
    const ImageBoundary b = sample_image(map, M);
    double max_speed = 0.0;
    for (const double s : b.speed) max_speed = std::max(max_speed, s);
    const double spacing = 2 * kPi / static_cast<double>(M) * max_speed;
    std::vector<cplx> terms(M);
    for (std::size_t j = 0; j < M; ++j) {
        const cplx den = 1.0 - z * std::conj(b.phi[j]);
        if (std::abs(den) < spacing) {
            throw QuadratureError("eval_eigenfunction: z within a node spacing of the boundary singularity");
        }
        terms[j] = pair.f(b.phi[j]) * b.speed[j] / den;
    }
    const cplx integral = pairwise_sum(terms) / static_cast<double>(M);
    return {pair.f(z), integral / pair.lambda};
}

ZeroCount count_zeros(const CoeffVec& f, double radius) {
    if (!(radius > 0.0 && radius <= 1.0)) throw DomainError("count_zeros: radius must lie in (0, 1]");
    const double scale = std::max(f.h2_norm(), 1e-300);
    for (int attempt = 0; attempt <= 5; ++attempt) {
        const double r = radius * (1.0 - 1e-4 * attempt);
        bool too_small = false;
        double previous = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t K = std::max<std::size_t>(1024, next_power_of_two(16 * f.size())); K <= (std::size_t{1} << 20);
             K *= 2) {
            const auto nodes = unit_circle_nodes(K);
            std::vector<double> terms(K);
            for (std::size_t j = 0; j < K; ++j) {
                const cplx z = r * nodes[j];
                const cplx v = f(z);
                if (std::abs(v) < 1e-8 * scale) {
                    too_small = true;
                    break;
                }
                // Re of z f'(z)/f(z); its mean is the winding number
                terms[j] = (z * f.derivative_at(z) / v).real();
            }
            if (too_small) break;
            const double winding = pairwise_sum(terms) / static_cast<double>(K);
            const double nearest = std::round(winding);
            const double residual = std::abs(winding - nearest);
            // accepted: a count in [0, degree] repeated on the doubled grid
            const bool admissible = residual < 0.1 && nearest >= 0.0 && nearest < static_cast<double>(f.size());
            if (admissible && nearest == previous) return {static_cast<int>(nearest), r, residual};
            previous = admissible ? nearest : std::numeric_limits<double>::quiet_NaN();
        }
        if (!too_small) throw NumericalError("count_zeros: winding number not resolved");
    }
    throw NumericalError("count_zeros: f nearly vanishes on every trial circle");
}

DeformationResult semigroup_deformation(const HoloMap& map, const std::vector<double>& t_grid,
                                        const DeformationOptions& options) {
    if (t_grid.empty() || t_grid.back() != 1.0) throw ConfigError("semigroup_deformation: t_grid must end at 1");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > 0.0 && t_grid[i] <= 1.0)) throw ConfigError("semigroup_deformation: t must lie in (0, 1]");
        if (i > 0 && t_grid[i] <= t_grid[i - 1]) throw ConfigError("semigroup_deformation: t_grid must increase");
    }
    const std::size_t N = options.N;
    const std::size_t M = options.M == 0 ? std::max<std::size_t>(1024, next_power_of_two(8 * N)) : options.M;

    DeformationResult result;
    result.steps.resize(t_grid.size());
    parallel_for(t_grid.size(), [&](std::size_t i) {
        const double t = t_grid[i];
        const HoloMap deformed = map.deformed(t);
        DeformationStep& step = result.steps[i];
        step.t = t;
        step.spectrum = singular_values(build_wco(deformed, N, 4 * N));
        step.pairs = top_eigenpairs(gram_matrix(deformed, N, M), default_threshold(deformed), options.max_pairs);
        step.zeros.resize(step.pairs.size());
        for (std::size_t k = 0; k < step.pairs.size(); ++k) {
            if (step.pairs[k].trusted) step.zeros[k] = count_zeros(step.pairs[k].f, options.zero_radius);
        }
    });

    for (std::size_t i = 0; i + 1 < result.steps.size(); ++i) {
        const auto& lo = result.steps[i].spectrum.values;
        const auto& hi = result.steps[i + 1].spectrum.values;
        for (std::size_t k = 0; k < N / 2; ++k) {
            result.monotonicity_violation = std::max(result.monotonicity_violation, lo[k] - hi[k]);
        }
    }
    result.monotone = result.monotonicity_violation <= 1e-8;

    for (const auto& step : result.steps) {
        double previous = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < step.pairs.size(); ++k) {
            const EigenPair& p = step.pairs[k];
            if (!p.trusted) {
                ++result.excluded;
                continue;
            }
            const int zeros = step.zeros[k].count;
            if (step.t < 1.0 && zeros != static_cast<int>(k)) result.interior_counts_exact = false;
            if (step.t == 1.0 && zeros > static_cast<int>(k)) result.boundary_counts_bounded = false;
            if (previous - p.lambda <= 1e-8) result.simple = false;
            previous = p.lambda;
        }
        const std::vector<double> lambdas = [&] {
            std::vector<double> l;
            for (const auto& p : step.pairs) l.push_back(p.lambda);
            return l;
        }();
        for (std::size_t n = 0; n < std::min(options.report_rows, step.spectrum.values.size()); ++n) {
            DeformationRow row;
            row.t = step.t;
            row.n = n;
            row.s = step.spectrum.values[n];
            row.s_trusted = step.spectrum.trusted[n];
            row.lambda = n < lambdas.size() ? lambdas[n] : std::numeric_limits<double>::quiet_NaN();
            if (n < step.pairs.size() && step.pairs[n].trusted) {
                row.zero_count = step.zeros[n].count;
                row.trusted = true;
            }
            result.rows.push_back(row);
        }
    }
    return result;
}

void write_csv(std::ostream& os, const std::vector<DeformationRow>& rows) {
    std::ostringstream line;
    line << std::setprecision(17);
    os << "t,n,s_n,lambda_n,zero_count,trusted\n";
    for (const auto& r : rows) {
        line.str("");
        line << r.t << ',' << r.n << ',' << r.s << ',';
        if (std::isnan(r.lambda)) {
            line << "nan";
        } else {
            line << r.lambda;
        }
        line << ',' << r.zero_count << ',' << (r.trusted ? 1 : 0);
        os << line.str() << '\n';
    }
}

nlohmann::json to_json(const EigenPair& pair) {
    return {{"lambda", pair.lambda}, {"coeffs", to_json(pair.f)}};
}

}  // namespace hspec
