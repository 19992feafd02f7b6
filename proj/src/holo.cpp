#include "hspec/holo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <unsupported/Eigen/FFT>

#include "hspec/error.hpp"

namespace hspec {

namespace {

constexpr double kVanishingDerivative = 1e-12;

void check_primitive(const Primitive& p) {
    if (const auto* s = std::get_if<Scale>(&p)) {
        if (!(s->r > 0.0 && s->r <= 1.0)) throw ConfigError("scale: r must lie in (0, 1]");
    } else if (const auto* m = std::get_if<Mobius>(&p)) {
        if (!(std::abs(m->a) < 1.0)) throw ConfigError("mobius: |a| must be < 1");
        if (!std::isfinite(m->theta)) throw ConfigError("mobius: theta must be finite");
    } else if (const auto* q = std::get_if<Poly>(&p)) {
        if (q->coeffs.empty()) throw ConfigError("poly: coefficient list is empty");
    }
}

void check_disk_point(cplx z, const char* what) {
    if (std::abs(z) > 1.0 + kValTol) {
        throw DomainError(std::string(what) + ": |z| > 1");
    }
}

Eigen::FFT<double>& fft_engine() {
    thread_local Eigen::FFT<double> engine;
    return engine;
}

}  // namespace

HoloMap::HoloMap(std::vector<Primitive> stages, int branch) : stages_(std::move(stages)), branch_(branch) {
    if (branch_ != 1 && branch_ != -1) throw ConfigError("branch must be +1 or -1");
    for (const auto& p : stages_) check_primitive(p);
}

HoloMap HoloMap::identity() { return HoloMap({}, 1); }
HoloMap HoloMap::scale(double r, int branch) { return HoloMap({Scale{r}}, branch); }
HoloMap HoloMap::mobius(cplx a, double theta, int branch) { return HoloMap({Mobius{a, theta}}, branch); }
HoloMap HoloMap::poly(std::vector<cplx> coeffs, int branch) { return HoloMap({Poly{std::move(coeffs)}}, branch); }

HoloMap HoloMap::with_branch(int branch) const { return HoloMap(stages_, branch); }

HoloMap HoloMap::deformed(double t) const {
    if (!(t > 0.0 && t <= 1.0)) throw ConfigError("deformation parameter t must lie in (0, 1]");
    if (t == 1.0) return *this;
    std::vector<Primitive> stages;
    stages.reserve(stages_.size() + 1);
    stages.emplace_back(Scale{t});
    stages.insert(stages.end(), stages_.begin(), stages_.end());
    return HoloMap(std::move(stages), branch_);
}

HoloMap HoloMap::then(const HoloMap& next) const {
    std::vector<Primitive> stages = stages_;
    stages.insert(stages.end(), next.stages_.begin(), next.stages_.end());
    HoloMap composite(std::move(stages), 1);
    const cplx wanted = sqrt_derivative(next, eval_map(*this, 0.0)) * sqrt_derivative(*this, 0.0);
    const cplx principal = sqrt_derivative(composite, 0.0);
    composite.branch_ = std::abs(principal - wanted) <= std::abs(principal + wanted) ? 1 : -1;
    return composite;
}

HoloMap HoloMap::normalized_at_origin() const {
    const cplx a = eval_map(*this, 0.0);
    if (std::abs(a) < 1e-15) return *this;
    return then(HoloMap::mobius(a, 0.0));
}

Jet HoloMap::stage_jet(const Primitive& p, cplx z) {
    if (const auto* s = std::get_if<Scale>(&p)) {
        return {s->r * z, cplx(s->r), cplx(0.0)};
    }
    if (const auto* m = std::get_if<Mobius>(&p)) {
        const cplx rot = std::polar(1.0, m->theta);
        const cplx den = 1.0 - std::conj(m->a) * z;
        const double k = 1.0 - std::norm(m->a);
        return {rot * (z - m->a) / den, rot * k / (den * den), 2.0 * std::conj(m->a) * rot * k / (den * den * den)};
    }
    const auto& c = std::get<Poly>(p).coeffs;
    cplx v = 0.0, d1 = 0.0, d2 = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        d2 = d2 * z + 2.0 * d1;
        d1 = d1 * z + v;
        v = v * z + *it;
    }
    return {v, d1, d2};
}

Jet HoloMap::jet(cplx z) const {
    Jet j{z, 1.0, 0.0};
    for (const auto& stage : stages_) {
        const Jet s = stage_jet(stage, j.value);
        j = {s.value, s.d1 * j.d1, s.d2 * j.d1 * j.d1 + s.d1 * j.d2};
    }
    return j;
}

cplx eval_map(const HoloMap& map, cplx z) {
    check_disk_point(z, "eval_map");
    return map.jet(z).value;
}

cplx derivative(const HoloMap& map, cplx z) {
    check_disk_point(z, "derivative");
    return map.jet(z).d1;
}

cplx second_derivative(const HoloMap& map, cplx z) {
    check_disk_point(z, "second_derivative");
    return map.jet(z).d2;
}

cplx sqrt_derivative(const HoloMap& map, cplx z) {
    check_disk_point(z, "sqrt_derivative");
    const cplx d0 = map.jet(0.0).d1;
    if (std::abs(d0) < kVanishingDerivative) throw BranchError("sqrt_derivative: phi'(0) vanishes");
    const cplx s0 = static_cast<double>(map.branch()) * std::sqrt(d0);
    if (z == cplx(0.0)) return s0;

    std::vector<cplx> d;
    for (std::size_t steps = 8; steps <= (std::size_t{1} << 16); steps *= 2) {
        d.assign(steps + 1, cplx(0.0));
        d[0] = d0;
        bool resolved = true;
        for (std::size_t k = 1; k <= steps; ++k) {
            d[k] = map.jet(z * (static_cast<double>(k) / static_cast<double>(steps))).d1;
            if (std::abs(d[k]) < kVanishingDerivative) {
                throw BranchError("sqrt_derivative: phi' vanishes on the tracking path");
            }
            if (std::abs(std::arg(d[k] / d[k - 1])) >= kPi / 4) {
                resolved = false;
                break;
            }
        }
        if (!resolved) continue;
        cplx tracked = s0;
        for (std::size_t k = 1; k <= steps; ++k) tracked *= std::sqrt(d[k] / d[k - 1]);
        const cplx root = std::sqrt(d[steps]);
        return std::abs(root - tracked) <= std::abs(root + tracked) ? root : -root;
    }
    throw BranchError("sqrt_derivative: argument of phi' not resolved after refinement");
}

cplx sqrt_derivative_prime(const HoloMap& map, cplx z) {
    const cplx s = sqrt_derivative(map, z);
    return map.jet(z).d2 / (2.0 * s);
}

namespace {

bool segments_cross(cplx p1, cplx p2, cplx q1, cplx q2) {
    auto cross = [](cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); };
    const double d1 = cross(p2 - p1, q1 - p1);
    const double d2 = cross(p2 - p1, q2 - p1);
    const double d3 = cross(q2 - q1, p1 - q1);
    const double d4 = cross(q2 - q1, p2 - q1);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

}  // namespace

ValidationReport validate(const HoloMap& map, std::size_t samples) {
    ValidationReport report;
    report.min_derivative = std::numeric_limits<double>::infinity();
    const auto nodes = unit_circle_nodes(samples);
    std::vector<cplx> image(samples);
    for (std::size_t j = 0; j < samples; ++j) {
        const Jet jt = map.jet(nodes[j]);
        image[j] = jt.value;
        report.max_modulus = std::max(report.max_modulus, std::abs(jt.value));
        report.min_derivative = std::min(report.min_derivative, std::abs(jt.d1));
    }
    if (report.max_modulus > 1.0 + kValTol) {
        throw DomainError("map leaves the closed disk: max |phi| on boundary = " + std::to_string(report.max_modulus));
    }
    if (report.min_derivative < kVanishingDerivative) {
        throw DomainError("phi' vanishes on the boundary grid");
    }

    const cplx centre = map.jet(0.0).value;
    double turn = 0.0;
    for (std::size_t j = 0; j < samples; ++j) {
        turn += std::arg((image[(j + 1) % samples] - centre) / (image[j] - centre));
    }
    report.boundary_winding = static_cast<int>(std::lround(turn / (2 * kPi)));
    if (report.boundary_winding != 1) {
        report.warnings.push_back("boundary image winds " + std::to_string(report.boundary_winding) +
                                  " times about phi(0); map is not univalent");
    }

    // coarse self-intersection screen on a subsampled polygon
    const std::size_t stride = std::max<std::size_t>(1, samples / 512);
    std::vector<cplx> poly;
    for (std::size_t j = 0; j < samples; j += stride) poly.push_back(image[j]);
    const std::size_t n = poly.size();
    bool crossing = false;
    for (std::size_t i = 0; i < n && !crossing; ++i) {
        for (std::size_t k = i + 2; k < n; ++k) {
            if (i == 0 && k == n - 1) continue;
            if (segments_cross(poly[i], poly[(i + 1) % n], poly[k], poly[(k + 1) % n])) {
                crossing = true;
                break;
            }
        }
    }
    if (crossing) report.warnings.push_back("boundary image self-intersects; map is not univalent");
    return report;
}

nlohmann::json to_json(const HoloMap& map) {
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& p : map.stages()) {
        if (const auto* s = std::get_if<Scale>(&p)) {
            stages.push_back({{"scale", s->r}});
        } else if (const auto* m = std::get_if<Mobius>(&p)) {
            stages.push_back({{"mobius", {{"a_re", m->a.real()}, {"a_im", m->a.imag()}, {"theta", m->theta}}}});
        } else {
            nlohmann::json coeffs = nlohmann::json::array();
            for (const cplx c : std::get<Poly>(p).coeffs) coeffs.push_back({c.real(), c.imag()});
            stages.push_back({{"poly", coeffs}});
        }
    }
    return {{"compose", stages}, {"branch", map.branch()}};
}

HoloMap holo_map_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("compose") || !j.at("compose").is_array()) {
        throw ConfigError("map: expected an object with a \"compose\" array");
    }
    std::vector<Primitive> stages;
    std::size_t index = 0;
    for (const auto& item : j.at("compose")) {
        const std::string where = "map.compose[" + std::to_string(index++) + "]";
        if (!item.is_object() || item.size() != 1) throw ConfigError(where + ": expected a single-key object");
        try {
            if (item.contains("scale")) {
                stages.emplace_back(Scale{item.at("scale").get<double>()});
            } else if (item.contains("mobius")) {
                const auto& m = item.at("mobius");
                stages.emplace_back(Mobius{cplx(m.value("a_re", 0.0), m.value("a_im", 0.0)), m.value("theta", 0.0)});
            } else if (item.contains("poly")) {
                Poly p;
                for (const auto& c : item.at("poly")) {
                    if (!c.is_array() || c.size() != 2) throw ConfigError(where + ".poly: entries must be [re, im]");
                    p.coeffs.emplace_back(c[0].get<double>(), c[1].get<double>());
                }
                stages.emplace_back(std::move(p));
            } else {
                throw ConfigError(where + ": unknown primitive (expected scale, mobius or poly)");
            }
            check_primitive(stages.back());
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(where + ": " + e.what());
        } catch (const ConfigError& e) {
            const std::string msg = e.what();
            throw ConfigError(msg.rfind(where, 0) == 0 ? msg : where + ": " + msg);
        }
    }
    const int branch = j.value("branch", 1);
    if (branch != 1 && branch != -1) throw ConfigError("map.branch: must be 1 or -1");
    return HoloMap(std::move(stages), branch);
}

CoeffVec CoeffVec::unit(std::size_t n, std::size_t size) {
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(size));
    c(static_cast<Eigen::Index>(n)) = 1.0;
    return CoeffVec(std::move(c));
}

cplx CoeffVec::operator()(cplx z) const {
    cplx v = 0.0;
    for (Eigen::Index k = coeffs.size() - 1; k >= 0; --k) v = v * z + coeffs(k);
    return v;
}

cplx CoeffVec::derivative_at(cplx z) const {
    cplx d = 0.0;
    for (Eigen::Index k = coeffs.size() - 1; k >= 1; --k) d = d * z + static_cast<double>(k) * coeffs(k);
    return d;
}

CoeffVec CoeffVec::derivative() const {
    if (coeffs.size() <= 1) return CoeffVec(Eigen::VectorXcd::Zero(1));
    Eigen::VectorXcd d(coeffs.size() - 1);
    for (Eigen::Index k = 1; k < coeffs.size(); ++k) d(k - 1) = static_cast<double>(k) * coeffs(k);
    return CoeffVec(std::move(d));
}

nlohmann::json to_json(const CoeffVec& f) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (Eigen::Index k = 0; k < f.coeffs.size(); ++k) coeffs.push_back({f.coeffs(k).real(), f.coeffs(k).imag()});
    return coeffs;
}

std::vector<cplx> unit_circle_nodes(std::size_t M) {
    std::vector<cplx> nodes(M);
    for (std::size_t j = 0; j < M; ++j) {
        nodes[j] = std::polar(1.0, 2 * kPi * static_cast<double>(j) / static_cast<double>(M));
    }
    return nodes;
}

BoundaryGrid BoundaryGrid::sample(const HoloMap& map, std::size_t M) {
    if (!is_power_of_two(M)) throw ConfigError("boundary grid size M must be a power of two");
    BoundaryGrid g;
    g.M = M;
    g.nodes = unit_circle_nodes(M);
    g.phi.resize(M);
    g.dphi.resize(M);
    g.sqrt_dphi.resize(M);
    parallel_for(M, [&](std::size_t j) {
        const Jet jt = map.jet(g.nodes[j]);
        g.phi[j] = jt.value;
        g.dphi[j] = jt.d1;
        g.sqrt_dphi[j] = sqrt_derivative(map, g.nodes[j]);
    });
    return g;
}

CoeffVec taylor_coeffs(std::span<const cplx> samples, std::size_t N) {
    const std::size_t M = samples.size();
    if (!is_power_of_two(M)) throw ConfigError("taylor_coeffs: sample count must be a power of two");
    if (M < 4 * N) throw ConfigError("taylor_coeffs: need M >= 4N boundary samples");
    std::vector<cplx> in(samples.begin(), samples.end());
    std::vector<cplx> out;
    fft_engine().fwd(out, in);
    Eigen::VectorXcd c(static_cast<Eigen::Index>(N));
    const double inv = 1.0 / static_cast<double>(M);
    for (std::size_t n = 0; n < N; ++n) c(static_cast<Eigen::Index>(n)) = out[n] * inv;
    return CoeffVec(std::move(c));
}

double littlewood_paley_norm(const CoeffVec& f, std::size_t radial_nodes) {
    const double at_origin = f.size() == 0 ? 0.0 : std::norm(f.coeffs(0));
    if (f.size() <= 1) return at_origin;
    const CoeffVec df = f.derivative();
    const std::size_t L = next_power_of_two(std::max<std::size_t>(16, 2 * df.size() + 2));
    const GaussRule rule = gauss_legendre(radial_nodes);

    // mean over the circle of radius r of |f'|^2
    auto angular_mean = [&](double r) {
        std::vector<cplx> spectrum(L, cplx(0.0));
        double rk = 1.0;
        for (std::size_t k = 0; k < df.size(); ++k, rk *= r) spectrum[k] = df.coeffs(static_cast<Eigen::Index>(k)) * rk;
        std::vector<cplx> values;
        fft_engine().inv(values, spectrum);  // scaled by 1/L
        std::vector<double> sq(L);
        for (std::size_t j = 0; j < L; ++j) sq[j] = std::norm(values[j] * static_cast<double>(L));
        return pairwise_sum(sq) / static_cast<double>(L);
    };

    // panels [0, 2^-40], [2^-40, 2^-39], ..., [1/2, 1]
    constexpr int kLevels = 40;
    std::vector<double> panel_sums;
    double lo = 0.0;
    for (int level = kLevels; level >= 0; --level) {
        const double hi = std::ldexp(1.0, -level);
        const double half = 0.5 * (hi - lo);
        const double mid = 0.5 * (hi + lo);
        std::vector<double> terms(rule.nodes.size());
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double r = mid + half * rule.nodes[q];
            terms[q] = rule.weights[q] * half * 2.0 * angular_mean(r) * (-2.0 * std::log(r)) * r;
        }
        panel_sums.push_back(pairwise_sum(terms));
        lo = hi;
    }
    return at_origin + pairwise_sum(panel_sums);
}

cplx kernel(cplx z, cplx w) {
    if (std::abs(w) >= 1.0) throw DomainError("kernel: |w| must be < 1");
    return 1.0 / (1.0 - z * std::conj(w));
}

CoeffVec kernel_coeffs(cplx w, std::size_t N) {
    if (std::abs(w) >= 1.0) throw DomainError("kernel: |w| must be < 1");
    Eigen::VectorXcd c(static_cast<Eigen::Index>(N));
    cplx p = 1.0;
    for (std::size_t n = 0; n < N; ++n, p *= std::conj(w)) c(static_cast<Eigen::Index>(n)) = p;
    return CoeffVec(std::move(c));
}

CoeffVec normalized_kernel(cplx w, std::size_t N) {
    CoeffVec k = kernel_coeffs(w, N);
    k.coeffs *= std::sqrt(1.0 - std::norm(w));
    return k;
}

}  // namespace hspec
