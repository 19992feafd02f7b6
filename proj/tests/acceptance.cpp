// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.
// Exit status is nonzero when any criterion fails.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hspec/corpus.hpp"
#include "hspec/fock.hpp"
#include "hspec/holo.hpp"
#include "hspec/restrict.hpp"
#include "hspec/spectra.hpp"
#include "hspec/wco.hpp"

using namespace hspec;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string sci(double x) {
    std::ostringstream os;
    os << std::setprecision(3) << std::scientific << x;
    return os.str();
}

std::string fine(double x) {
    std::ostringstream os;
    os << std::setprecision(12) << x;
    return os.str();
}

std::vector<double> oracle_singular_values(const Eigen::MatrixXcd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const Eigen::VectorXd& s = svd.singularValues();
    return {s.data(), s.data() + s.size()};
}

std::vector<CorpusEntry> corpus_with(bool contact) {
    std::vector<CorpusEntry> out;
    for (auto& e : corpus()) {
        if (e.contact == contact) out.push_back(e);
    }
    return out;
}

Eigen::MatrixXcd random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> g(0.0, 1.0 / std::sqrt(2.0 * static_cast<double>(cols)));
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = cplx(g(rng), g(rng));
    }
    return m;
}

// 1. Scale(r): s_k = r^{k+1/2}, Gram eigenvalues r^{2k+1}
Outcome diagonal_oracle() {
    constexpr double kSvTol = 1e-12;
    constexpr double kGramTol = 1e-10;
    double sv_err = 0.0;
    double gram_err = 0.0;
    for (const double r : {0.25, 0.5, 0.8}) {
        const HoloMap map = HoloMap::scale(r);
        const SingularSpectrum s = singular_values(build_wco(map, 32, 128, 512));
        const std::vector<double> g = hermitian_eigenvalues(gram_matrix(map, 32, 512).entries);
        for (std::size_t k = 0; k < 32; ++k) {
            const double kk = static_cast<double>(k);
            sv_err = std::max(sv_err, std::abs(s.values[k] - std::pow(r, kk + 0.5)));
            gram_err = std::max(gram_err, std::abs(g[k] - std::pow(r, 2 * kk + 1)));
        }
    }
    return {sv_err <= kSvTol && gram_err <= kGramTol,
            "max |s_k - r^(k+1/2)| = " + sci(sv_err) + " (tol 1e-12), max |lambda_k - r^(2k+1)| = " + sci(gram_err) +
                " (tol 1e-10)"};
}

// 2. automorphisms: leading values of the (64, 256) section within 1e-6 of 1
Outcome unitarity() {
    constexpr double kTol = 1e-6;
    double worst = 0.0;
    std::size_t trusted = 0;
    std::size_t maps = 0;
    for (const auto& e : corpus()) {
        if (e.name != "identity" && e.name != "mobius03") continue;
        ++maps;
        const SingularSpectrum s = singular_values(build_wco(e.map, 64, 256));
        for (std::size_t k = 0; k < 32; ++k) {
            worst = std::max(worst, std::abs(s.values[k] - 1.0));
            if (s.trusted[k]) ++trusted;
        }
    }
    return {worst <= kTol && trusted > 0,
            std::to_string(maps) + " maps, max |s_n - 1| over n <= 32 = " + sci(worst) + " (tol 1e-6), " +
                std::to_string(trusted) + " trusted values"};
}

// 3. essential norm 1 with boundary contact, 0 without
Outcome essential_dichotomy() {
    constexpr double kTol = 0.05;
    double worst_contact = 0.0;
    double worst_interior = 0.0;
    std::string worst_name;
    for (const auto& e : corpus()) {
        const double est = essential_norm_estimate(e.map, {64, 128, 256}).estimate;
        const double dev = e.contact ? std::abs(est - 1.0) : est;
        double& slot = e.contact ? worst_contact : worst_interior;
        if (dev > slot) {
            slot = dev;
            worst_name = e.name;
        }
    }
    return {worst_contact <= kTol && worst_interior <= kTol,
            "max |est - 1| (contact) = " + sci(worst_contact) + ", max est (no contact) = " + sci(worst_interior) +
                " (tol 0.05)"};
}

// 4. s_n <= 1 + K/n with K stable between N = 128 and N = 256
Outcome k_bound() {
    constexpr double kRelStability = 0.1;
    bool ok = true;
    double worst_excess = -1.0;
    double worst_drift = 0.0;
    for (const auto& e : corpus_with(true)) {
        const SingularSpectrum s128 = singular_values(build_wco(e.map, 128, 512));
        const SingularSpectrum s256 = singular_values(build_wco(e.map, 256, 1024));
        const double k128 = fit_K(s128);
        const double k256 = fit_K(s256);
        const double drift = std::abs(k256 - k128);
        worst_drift = std::max(worst_drift, drift);
        if (drift > kRelStability * std::max(k128, k256) + kTheorySlack) ok = false;
        for (const SingularSpectrum* s : {&s128, &s256}) {
            for (std::size_t k = 0; k < s->values.size(); ++k) {
                if (!s->trusted[k]) continue;
                const double excess = s->values[k] - (1.0 + k256 / static_cast<double>(k + 1));
                worst_excess = std::max(worst_excess, excess);
                if (excess > kTheorySlack) ok = false;
            }
        }
    }
    return {ok, "max(s_n - 1 - K/n) = " + sci(worst_excess) + " (slack 1e-6), max |K_256 - K_128| = " +
                    sci(worst_drift) + " (tol 10% + 1e-6)"};
}

std::vector<std::pair<std::string, HoloMap>> origin_fixing_versions(bool contact) {
    std::vector<std::pair<std::string, HoloMap>> out;
    for (const auto& e : corpus_with(contact)) {
        if (fixes_origin(e.map)) {
            out.emplace_back(e.name, e.map);
        } else {
            out.emplace_back(e.name + "~0", e.map.normalized_at_origin());
        }
    }
    return out;
}

// 5. ||T|| <= 1 and s_n(X) <= ||psi||/n on the leading 32 indices
Outcome proof_split() {
    constexpr double kSlack = 1e-6;
    double worst_t = 0.0;
    double worst_x = -1.0;
    std::size_t maps = 0;
    for (const auto& [name, map] : origin_fixing_versions(true)) {
        ++maps;
        const ProofSplit split = build_proof_split(map, 64, 256);
        worst_t = std::max(worst_t, oracle_singular_values(split.T.entries).front());
        const std::vector<double> sx = oracle_singular_values(split.X.entries);
        for (std::size_t k = 0; k < 32; ++k) {
            worst_x = std::max(worst_x, sx[k] - split.psi_sup / static_cast<double>(k + 1));
        }
    }
    return {worst_t <= 1.0 + kSlack && worst_x <= kSlack,
            std::to_string(maps) + " contact maps fixing 0, max ||T|| = " + fine(worst_t) +
                ", max(s_n(X) - |psi|/n) = " + sci(worst_x) + " (slack 1e-6)"};
}

// 6. |phi'(z)| log|z| / log|phi(z)| <= 1
Outcome schwarz_pick() {
    constexpr double kTol = 1e-10;
    double worst = 0.0;
    std::size_t maps = 0;
    std::size_t evaluated = 0;
    for (const bool contact : {true, false}) {
        for (const auto& [name, map] : origin_fixing_versions(contact)) {
            ++maps;
            const SchwarzPickResult r = schwarz_pick_check(map, 1000);
            worst = std::max(worst, r.max_quotient);
            evaluated += r.evaluated;
        }
    }
    return {worst <= 1.0 + kTol && evaluated > 0,
            std::to_string(maps) + " maps fixing 0, " + std::to_string(evaluated) + " samples, max quotient = " +
                fine(worst) + " (bound 1 + 1e-10)"};
}

// 7. Julia–Carathéodory quotient along the ray to 1 for (1+z)/2
Outcome julia_caratheodory() {
    constexpr double kClosedFormTol = 1e-12;
    std::vector<double> radii;
    for (int k = 1; k <= 4; ++k) radii.push_back(1.0 - std::pow(10.0, -k));
    const JuliaProbe p = julia_caratheodory_probe(HoloMap::poly({0.5, 0.5}), radii);
    bool increasing = true;
    double err = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double r = radii[i];
        err = std::max(err, std::abs(p.quotients[i] - 2.0 * (1.0 + r) / (3.0 + r)));
        if (i > 0 && !(p.quotients[i] > p.quotients[i - 1])) increasing = false;
    }
    const bool ok = increasing && p.quotients.back() > 0.99 && err <= kClosedFormTol && p.contact;
    return {ok, std::string(increasing ? "increasing" : "NOT increasing") + ", q(r = 1 - 1e-4) = " +
                    fine(p.quotients.back()) + " (> 0.99), closed-form error = " + sci(err) + " (tol 1e-12)"};
}

// 8. ||Λ^n T|| = s_1 ... s_n and Cauchy–Binet
Outcome exterior_power_norm_formula() {
    constexpr double kTol = 1e-10;
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<int> dim(2, 6);
    double worst_norm = 0.0;
    std::size_t cases = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index d = dim(rng);
        const Eigen::MatrixXcd m = random_matrix(rng, d, d);
        const std::vector<double> s = oracle_singular_values(m);
        for (std::size_t n = 1; n <= static_cast<std::size_t>(d); ++n) {
            double product = 1.0;
            for (std::size_t j = 0; j < n; ++j) product *= s[j];
            const double lhs = oracle_singular_values(exterior_power(OperatorMatrix(m), n).entries).front();
            worst_norm = std::max(worst_norm, std::abs(lhs - product));
            ++cases;
        }
    }
    double worst_cb = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::MatrixXcd a = random_matrix(rng, 5, 5);
        const Eigen::MatrixXcd b = random_matrix(rng, 5, 5);
        for (std::size_t n = 1; n <= 5; ++n) {
            const Eigen::MatrixXcd lhs = exterior_power(OperatorMatrix(a * b), n).entries;
            const Eigen::MatrixXcd rhs =
                exterior_power(OperatorMatrix(a), n).entries * exterior_power(OperatorMatrix(b), n).entries;
            worst_cb = std::max(worst_cb, (lhs - rhs).cwiseAbs().maxCoeff());
        }
    }
    return {worst_norm <= kTol && worst_cb <= kTol,
            std::to_string(cases) + " (matrix, n) cases, max |norm - product| = " + sci(worst_norm) +
                ", Cauchy-Binet error = " + sci(worst_cb) + " (tol 1e-10)"};
}

// 9. contraction + trace-class split of |W| and P_N <= exp(sum (s_n - 1)^+)
Outcome trichotomy_split() {
    constexpr double kTol = 1e-10;
    double worst_recon = 0.0;
    double worst_contraction = 0.0;
    bool bounded = true;
    std::vector<CorpusEntry> maps = corpus();
    for (auto& e : extra_maps()) maps.push_back(e);
    double max_trace = 0.0;
    for (const auto& e : maps) {
        const OperatorMatrix W = build_wco(e.map, 64, 256);
        const OperatorMatrix absW = modulus(W);
        const ContractionTraceSplit split = split_contraction_trace(absW);
        worst_recon = std::max(worst_recon,
                               (split.contraction.entries + split.trace_part.entries - absW.entries).cwiseAbs().maxCoeff());
        worst_contraction = std::max(worst_contraction, oracle_singular_values(split.contraction.entries).front());
        const SingularSpectrum spec = singular_values(W);
        double excess = 0.0;
        for (const double s : spec.values) excess += std::max(0.0, s - 1.0);
        max_trace = std::max(max_trace, excess);
        if (fock_norm(spec).lambda_norm_estimate > std::exp(excess) * (1.0 + 1e-15)) bounded = false;
        double product = 1.0;
        for (const double s : spec.values) product *= std::max(1.0, s);
        if (product > std::exp(excess) * (1.0 + 1e-15)) bounded = false;
    }
    return {worst_recon <= kTol && worst_contraction <= 1.0 + kTol && bounded,
            std::to_string(maps.size()) + " maps, reconstruction error = " + sci(worst_recon) +
                " (tol 1e-10), max ||A|| = " + fine(worst_contraction) + ", P_N <= exp(trace X): " +
                (bounded ? "yes" : "NO") + " (largest trace " + sci(max_trace) + ")"};
}

// 10. |W| = |R|: Gram eigenvalues against squared singular values
Outcome modulus_identity() {
    constexpr double kTol = 1e-6;
    double worst = 0.0;
    std::string worst_name;
    for (const auto& e : corpus()) {
        const double m = compare_moduli(e.map, 128, 1024, 10).max_mismatch;
        if (m >= worst) {
            worst = m;
            worst_name = e.name;
        }
    }
    return {worst <= kTol, "max relative mismatch over top 10 = " + sci(worst) + " (" + worst_name + ", tol 1e-6)"};
}

// 11. double orthogonality
Outcome double_orthogonality_check() {
    constexpr double kTol = 1e-6;
    double worst_v = 0.0;
    double worst_u = 0.0;
    std::size_t maps = 0;
    auto run = [&](const HoloMap& map, std::size_t N, std::size_t M) {
        std::vector<EigenPair> trusted;
        for (auto& p : top_eigenpairs(gram_matrix(map, N, M), default_threshold(map))) {
            if (p.trusted) trusted.push_back(std::move(p));
        }
        if (trusted.size() < 2) return;
        ++maps;
        const DoubleOrthogonality d = double_orthogonality(trusted, map, M);
        worst_v = std::max(worst_v, d.res_v);
        worst_u = std::max(worst_u, d.res_u);
    };
    for (const double r : {0.25, 0.5, 0.8}) run(HoloMap::scale(r), 32, 512);
    for (const auto& e : corpus()) run(e.map, 64, 1024);
    for (const auto& e : extra_maps()) run(e.map, 256, 2048);
    return {worst_v <= kTol && worst_u <= kTol && maps > 3,
            std::to_string(maps) + " maps with >= 2 trusted pairs, resV = " + sci(worst_v) + ", resU = " +
                sci(worst_u) + " (tol 1e-6)"};
}

// 12. zero counts of eigenfunctions and simplicity
Outcome zero_counts_and_simplicity() {
    bool ok = true;
    double worst_vec = 0.0;
    for (const double t : {0.5, 0.8, 0.95}) {
        const HoloMap map = HoloMap::identity().deformed(t);
        const std::vector<EigenPair> pairs = top_eigenpairs(gram_matrix(map, 32, 512), kCompactThreshold, 9);
        if (pairs.size() < 9) ok = false;
        for (std::size_t n = 0; n < pairs.size(); ++n) {
            worst_vec = std::max(worst_vec, (pairs[n].f.coeffs - CoeffVec::unit(n, 32).coeffs).norm());
            if (!pairs[n].trusted || count_zeros(pairs[n].f, 1.0 - 1e-3).count != static_cast<int>(n)) ok = false;
        }
    }
    if (worst_vec > 1e-10) ok = false;

    std::size_t checked = 0;
    std::size_t above = 0;
    bool all_counts_le = true;
    double min_gap = std::numeric_limits<double>::infinity();
    double min_gap_all = std::numeric_limits<double>::infinity();
    std::vector<std::pair<HoloMap, std::size_t>> contact;
    for (const auto& e : corpus_with(true)) contact.emplace_back(e.map, 128);
    for (const auto& e : extra_maps()) contact.emplace_back(e.map, 256);
    for (const auto& [map, N] : contact) {
        const std::vector<EigenPair> pairs = top_eigenpairs(gram_matrix(map, N, 8 * N), kContactThreshold);
        double previous = std::numeric_limits<double>::infinity();
        for (std::size_t n = 0; n < pairs.size(); ++n) {
            ++above;
            const int zeros = count_zeros(pairs[n].f, 1.0 - 1e-3).count;
            if (zeros > static_cast<int>(n)) all_counts_le = false;
            if (n > 0) min_gap_all = std::min(min_gap_all, pairs[n - 1].lambda - pairs[n].lambda);
            if (!pairs[n].trusted) continue;
            ++checked;
            if (zeros > static_cast<int>(n)) ok = false;
            min_gap = std::min(min_gap, previous - pairs[n].lambda);
            previous = pairs[n].lambda;
        }
    }
    if (min_gap <= 1e-8 || checked == 0) ok = false;
    return {ok, "identity deformations: eigenfunction n = z^n (error " + sci(worst_vec) +
                    ") with n zeros for n <= 8; contact maps: " + std::to_string(checked) +
                    " trusted pair(s) above 1 + 1e-3 with counts <= index, trusted gaps " +
                    (std::isinf(min_gap) ? std::string("n/a (single pair)") : sci(min_gap)) +
                    "; untrusted included: " + std::to_string(above) + " pairs, counts <= index: " +
                    (all_counts_le ? "yes" : "no") + ", min gap " + sci(min_gap_all)};
}

// 13. s_n(W_{phi_t}) non-decreasing in t
Outcome monotone_in_t() {
    constexpr double kTol = 1e-8;
    double worst = 0.0;
    for (const auto& e : corpus()) {
        DeformationOptions opt;
        opt.N = 64;
        worst = std::max(worst, semigroup_deformation(e.map, {0.5, 0.8, 0.95, 1.0}, opt).monotonicity_violation);
    }
    return {worst <= kTol, "max decrease of s_n, n <= 32, over t = 0.5, 0.8, 0.95, 1: " + sci(worst) + " (tol 1e-8)"};
}

// 14. Littlewood–Paley formula for random polynomials
Outcome littlewood_paley() {
    constexpr double kTol = 1e-8;
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_int_distribution<int> degree(0, 32);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int d = trial < 33 ? trial : degree(rng);
        Eigen::VectorXcd c(d + 1);
        for (int k = 0; k <= d; ++k) c(k) = cplx(g(rng), g(rng));
        double coeff_norm = 0.0;
        for (int k = 0; k <= d; ++k) coeff_norm += std::norm(c(k));
        worst = std::max(worst, std::abs(littlewood_paley_norm(CoeffVec(c)) - coeff_norm));
    }
    return {worst <= kTol, "100 polynomials of degree <= 32, max |LP - sum |a_n|^2| = " + sci(worst) + " (tol 1e-8)"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"diagonal oracle", diagonal_oracle},
        {"unitarity of automorphisms", unitarity},
        {"essential-norm dichotomy", essential_dichotomy},
        {"K-bound", k_bound},
        {"proof split", proof_split},
        {"Schwarz-Pick estimate", schwarz_pick},
        {"Julia-Caratheodory probe", julia_caratheodory},
        {"exterior-power norm formula", exterior_power_norm_formula},
        {"contraction/trace split", trichotomy_split},
        {"modulus identity", modulus_identity},
        {"double orthogonality", double_orthogonality_check},
        {"zero counts and simplicity", zero_counts_and_simplicity},
        {"monotonicity in t", monotone_in_t},
        {"Littlewood-Paley quadrature", littlewood_paley},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.pass) ++failures;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << std::setw(2) << (i + 1) << "] " << criteria[i].first
                  << ": " << o.detail << "  (" << std::fixed << std::setprecision(1) << secs << "s)" << std::endl;
        std::cout.unsetf(std::ios::fixed);
    }
    std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria FAILED") << std::endl;
    return failures == 0 ? 0 : 1;
}
