#include "hspec/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "hspec/error.hpp"

namespace hspec {

std::size_t SingularSpectrum::trusted_count() const {
    return static_cast<std::size_t>(std::count(trusted.begin(), trusted.end(), true));
}

std::vector<double> svd_values(const Eigen::MatrixXcd& m) {
    if (m.size() == 0) return {};
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
    if (svd.info() != Eigen::Success) throw NumericalError("SVD did not converge");
    const Eigen::VectorXd& s = svd.singularValues();
    std::vector<double> out(s.data(), s.data() + s.size());
    for (double v : out) {
        if (!std::isfinite(v)) throw NumericalError("SVD produced a non-finite singular value");
    }
    return out;
}

SingularSpectrum singular_values(const OperatorMatrix& m) {
    SingularSpectrum spec;
    spec.n_cols = m.cols();
    spec.n_rows = m.rows();
    const std::size_t half_cols = m.cols() / 2;
    const std::size_t half_rows = m.rows() / 2;

    std::vector<double> half;
    parallel_for(2, [&](std::size_t i) {
        if (i == 0) {
            spec.values = svd_values(m.entries);
        } else if (half_cols > 0) {
            half = svd_values(m.leading(half_rows, half_cols).entries);
        }
    });

    const std::size_t n = spec.values.size();
    spec.stab.assign(n, std::numeric_limits<double>::quiet_NaN());
    spec.trusted.assign(n, false);
    for (std::size_t k = 0; k < std::min(half_cols, half.size()); ++k) {
        spec.stab[k] = std::abs(spec.values[k] - half[k]);
        spec.trusted[k] = spec.stab[k] < kTrustTol;
    }
    return spec;
}

EssentialNormEstimate essential_norm_estimate(const HoloMap& map, const std::vector<std::size_t>& n_list) {
    if (n_list.size() < 3) throw ConfigError("essential_norm_estimate: need at least three truncation orders");
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (n_list[i] < 4) throw ConfigError("essential_norm_estimate: orders must be >= 4");
        if (i > 0 && n_list[i] <= n_list[i - 1]) throw ConfigError("essential_norm_estimate: orders must increase");
    }

    EssentialNormEstimate result;
    result.profile.resize(n_list.size());
    parallel_for(n_list.size(), [&](std::size_t i) {
        const std::size_t N = n_list[i];
        const OperatorMatrix W = build_wco(map, N, 4 * N);
        const std::size_t quarter = N / 4;
        const std::vector<double> s = svd_values(W.entries);
        const double tail = operator_norm(W.entries.rightCols(static_cast<Eigen::Index>(N - quarter)));
        result.profile[i] = {N, tail, s[quarter - 1]};
    });

    constexpr double kMonotoneTol = 1e-10;
    bool increasing = true;
    bool decreasing = true;
    for (std::size_t i = 1; i < result.profile.size(); ++i) {
        const double d = result.profile[i].tail_norm - result.profile[i - 1].tail_norm;
        if (d < -kMonotoneTol) increasing = false;
        if (d > kMonotoneTol) decreasing = false;
    }
    result.converged = increasing || decreasing;

    const auto& a = result.profile[result.profile.size() - 2];
    const auto& b = result.profile.back();
    const double na = static_cast<double>(a.N);
    const double nb = static_cast<double>(b.N);
    const double extrapolated = (nb * b.tail_norm - na * a.tail_norm) / (nb - na);
    result.estimate = std::max(0.0, extrapolated);
    return result;
}

double fit_K(const SingularSpectrum& spec) {
    double k_hat = 0.0;
    for (std::size_t k = 3; k < spec.values.size(); ++k) {
        if (!spec.trusted[k]) continue;
        const double n = static_cast<double>(k + 1);
        k_hat = std::max(k_hat, n * (spec.values[k] - 1.0));
    }
    return k_hat;
}

SchwarzPickResult schwarz_pick_check(const HoloMap& map, std::size_t n_samples) {
    if (std::abs(eval_map(map, 0.0)) > kValTol) {
        throw PreconditionError("schwarz_pick_check: requires phi(0) = 0");
    }
    // R2 low-discrepancy sequence mapped area-uniformly into the disk
    constexpr double g = 1.32471795724474602596;
    constexpr double a1 = 1.0 / g;
    constexpr double a2 = 1.0 / (g * g);
    SchwarzPickResult result;
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double u = std::fmod(0.5 + a1 * static_cast<double>(i + 1), 1.0);
        const double v = std::fmod(0.5 + a2 * static_cast<double>(i + 1), 1.0);
        const cplx z = std::polar(std::sqrt(u), 2 * kPi * v);
        const Jet jt = map.jet(z);
        const double az = std::abs(z);
        const double aw = std::abs(jt.value);
        if (az < 1e-14 || aw < 1e-14 || az >= 1.0 || aw >= 1.0) {
            ++result.skipped;
            continue;
        }
        const double q = std::abs(jt.d1) * std::log(az) / std::log(aw);
        result.max_quotient = std::max(result.max_quotient, q);
        ++result.evaluated;
    }
    return result;
}

JuliaProbe julia_caratheodory_probe(const HoloMap& map, const std::vector<double>& radii, cplx zeta) {
    if (std::abs(std::abs(zeta) - 1.0) > kValTol) throw DomainError("julia_caratheodory_probe: |zeta| must be 1");
    JuliaProbe probe;
    probe.contact = std::abs(eval_map(map, zeta)) >= 1.0 - 1e-10;
    for (const double r : radii) {
        if (!(r >= 0.0 && r < 1.0)) throw DomainError("julia_caratheodory_probe: radii must lie in [0, 1)");
        const cplx w = r * zeta;
        const Jet jt = map.jet(w);
        const double aw = std::abs(w);
        const double ap = std::abs(jt.value);
        // factored forms limit cancellation near the circle
        probe.quotients.push_back(std::abs(jt.d1) * (1.0 - aw) * (1.0 + aw) / ((1.0 - ap) * (1.0 + ap)));
    }
    return probe;
}

void write_csv(std::ostream& os, const SingularSpectrum& spec) {
    std::ostringstream line;
    line << std::setprecision(17);
    os << "n,s_n,stab_n,trusted\n";
    for (std::size_t k = 0; k < spec.values.size(); ++k) {
        line.str("");
        line << (k + 1) << ',' << spec.values[k] << ',';
        if (std::isnan(spec.stab[k])) {
            line << "nan";
        } else {
            line << spec.stab[k];
        }
        line << ',' << (spec.trusted[k] ? 1 : 0);
        os << line.str() << '\n';
    }
}

}  // namespace hspec
