#include "hspec/experiment.hpp"

#include <openssl/sha.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "hspec/corpus.hpp"
#include "hspec/error.hpp"
#include "hspec/fock.hpp"
#include "hspec/restrict.hpp"
#include "hspec/spectra.hpp"
#include "hspec/wco.hpp"

#ifndef HSPEC_VERSION
#define HSPEC_VERSION "0.0.0"
#endif

namespace hspec {

using nlohmann::json;

std::string version() { return HSPEC_VERSION; }

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"singular", "fock",     "restrict", "fisher",
                                                "semigroup", "selftest", "search"};
    return names;
}

namespace {

const std::vector<std::string> kKnownFields{"suite", "map", "N_c", "N_r", "M", "n_list", "t_grid",
                                            "t",     "threshold", "out_dir", "ks", "cs", "max_pairs"};

std::size_t positive_integer(const json& j, const char* field) {
    const json& v = j.at(field);
    if (!v.is_number_integer() || v.get<long long>() <= 0) {
        throw ConfigError(std::string("config field '") + field + "': expected a positive integer");
    }
    return v.get<std::size_t>();
}

double real_field(const json& j, const char* field) {
    const json& v = j.at(field);
    if (!v.is_number()) throw ConfigError(std::string("config field '") + field + "': expected a number");
    return v.get<double>();
}

template <typename T>
std::vector<T> list_field(const json& j, const char* field) {
    const json& v = j.at(field);
    if (!v.is_array() || v.empty()) throw ConfigError(std::string("config field '") + field + "': expected a non-empty array");
    std::vector<T> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const json& e = v[i];
        const bool ok = std::is_integral_v<T> ? (e.is_number_integer() && e.get<long long>() > 0) : e.is_number();
        if (!ok) {
            throw ConfigError(std::string("config field '") + field + "[" + std::to_string(i) + "]': expected " +
                              (std::is_integral_v<T> ? "a positive integer" : "a number"));
        }
        out.push_back(e.get<T>());
    }
    return out;
}

double max_abs(const Eigen::MatrixXcd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

std::string csv_of(const SingularSpectrum& s) {
    std::ostringstream os;
    write_csv(os, s);
    return os.str();
}

std::string fmt(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

Check at_most(std::string name, double value, double bound, std::string note = {}) {
    return {std::move(name), value <= bound, value, bound, std::move(note)};
}

Check at_least(std::string name, double value, double bound, std::string note = {}) {
    return {std::move(name), value >= bound, value, bound, std::move(note)};
}

// Scale(r) maps have W = diag(r^{n+1/2}); returns r when the map is one such stage.
std::optional<double> single_scale(const HoloMap& map) {
    if (map.stages().size() != 1 || map.branch() != 1) return std::nullopt;
    if (const auto* s = std::get_if<Scale>(&map.stages().front())) return s->r;
    return std::nullopt;
}

EigenPair pair_of(double lambda, CoeffVec f) {
    EigenPair p;
    p.lambda = lambda;
    p.f = std::move(f);
    p.trusted = true;
    return p;
}

json pairs_json(const std::vector<EigenPair>& pairs) {
    json arr = json::array();
    for (const auto& p : pairs) {
        json e = to_json(p);
        e["trusted"] = p.trusted;
        e["stab"] = std::isfinite(p.stab) ? json(p.stab) : json(nullptr);
        e["residual"] = p.residual;
        e["degenerate"] = p.degenerate;
        arr.push_back(std::move(e));
    }
    return arr;
}

// ------------------------------------------------------------------ suites

SuiteResult suite_singular(const ExperimentConfig& c) {
    SuiteResult r;
    const OperatorMatrix W = build_wco(c.map, c.N_c, c.N_r, c.M);
    const SingularSpectrum spec = singular_values(W);
    r.files.emplace_back("spectrum.csv", csv_of(spec));
    {
        std::ostringstream bin;
        write_binary(bin, W);
        r.files.emplace_back("wco.hspm", bin.str());
    }

    bool sorted = true;
    for (std::size_t k = 0; k < spec.values.size(); ++k) {
        if (spec.values[k] < 0.0 || (k > 0 && spec.values[k] > spec.values[k - 1])) sorted = false;
    }
    r.checks.push_back({"sorted_nonnegative", sorted, 0.0, 0.0, ""});

    const double col0 = W.entries.col(0).norm();
    r.checks.push_back(at_least("norm_at_least_image_of_one", spec.values.front(), col0 * (1.0 - 1e-12)));

    const std::vector<double> half = svd_values(W.leading(c.N_r / 2, c.N_c / 2).entries);
    double weyl = 0.0;
    for (std::size_t k = 0; k < half.size(); ++k) weyl = std::max(weyl, half[k] - spec.values[k]);
    r.checks.push_back(at_most("section_monotone_in_truncation", weyl, 1e-10));

    if (const auto rr = single_scale(c.map)) {
        double err = 0.0;
        for (std::size_t k = 0; k < spec.values.size(); ++k) {
            err = std::max(err, std::abs(spec.values[k] - std::pow(*rr, static_cast<double>(k) + 0.5)));
        }
        r.checks.push_back(at_most("diagonal_oracle", err, 1e-12));
    }

    const double K = fit_K(spec);
    r.details["K_hat"] = K;
    r.details["trusted_count"] = spec.trusted_count();
    if (c.contact) {
        double worst = 0.0;
        for (std::size_t k = 0; k < spec.values.size(); ++k) {
            if (!spec.trusted[k]) continue;
            worst = std::max(worst, spec.values[k] - (1.0 + K / static_cast<double>(k + 1)));
        }
        r.checks.push_back(at_most("s_n_le_1_plus_K_over_n", worst, kTheorySlack));
    }

    const EssentialNormEstimate ess = essential_norm_estimate(c.map, c.n_list);
    std::ostringstream ecsv;
    ecsv << "N,tail_norm,s_quarter\n";
    for (const auto& p : ess.profile) ecsv << p.N << ',' << fmt(p.tail_norm) << ',' << fmt(p.s_quarter) << '\n';
    r.files.emplace_back("essential_norm.csv", ecsv.str());
    r.details["essential_norm"] = {{"estimate", ess.estimate}, {"converged", ess.converged}};
    const double target = c.contact ? 1.0 : 0.0;
    r.checks.push_back(at_most("essential_norm_dichotomy", std::abs(ess.estimate - target), 0.05,
                               c.contact ? "boundary contact: expect 1" : "no contact: expect 0"));
    return r;
}

SuiteResult suite_fock(const ExperimentConfig& c) {
    SuiteResult r;
    const OperatorMatrix W = build_wco(c.map, c.N_c, c.N_r, c.M);
    const SingularSpectrum spec = singular_values(W);
    const FockReport report = fock_norm(spec);
    r.files.emplace_back("spectrum.csv", csv_of(spec));
    r.files.emplace_back("fock.json", to_json(report).dump(2) + "\n");
    r.details["verdict"] = to_string(report.verdict);

    bool nondecreasing = true;
    for (std::size_t i = 1; i < report.partial_products.size(); ++i) {
        if (report.partial_products[i] < report.partial_products[i - 1]) nondecreasing = false;
    }
    r.checks.push_back({"partial_products_nondecreasing", nondecreasing, 0.0, 0.0, ""});

    const OperatorMatrix absW = modulus(W);
    const ContractionTraceSplit split = split_contraction_trace(absW);
    const double recon = max_abs(split.contraction.entries + split.trace_part.entries - absW.entries);
    r.checks.push_back(at_most("split_reconstruction", recon, 1e-10));
    r.checks.push_back(at_most("contraction_norm", operator_norm(split.contraction.entries), 1.0 + 1e-10));

    double excess = 0.0;
    for (const double s : spec.values) excess += std::max(0.0, s - 1.0);
    r.checks.push_back(at_most("trace_matches_excess", std::abs(split.trace - excess), 1e-10));
    r.checks.push_back(at_most("product_le_exp_trace", report.lambda_norm_estimate, std::exp(split.trace) * (1.0 + 1e-12)));
    r.details["trace"] = split.trace;
    return r;
}

SuiteResult suite_restrict(const ExperimentConfig& c) {
    SuiteResult r;
    const OperatorMatrix G = gram_matrix(c.map, c.N_c, c.M);
    const std::vector<double> eig = hermitian_eigenvalues(G.entries);
    {
        std::ostringstream os;
        os << "n,lambda_n\n";
        for (std::size_t k = 0; k < eig.size(); ++k) os << k << ',' << fmt(eig[k]) << '\n';
        r.files.emplace_back("gram_eigenvalues.csv", os.str());
    }

    const OperatorMatrix W = build_wco(c.map, c.N_c, c.N_r, c.M);
    const Eigen::MatrixXcd WhW = W.entries.adjoint() * W.entries;
    r.checks.push_back(at_most("gram_equals_WhW", max_abs(G.entries - WhW), 1e-8));

    const ModuliComparison cmp = compare_moduli(c.map, c.N_c, c.M);
    r.checks.push_back(at_most("modulus_identity", cmp.max_mismatch, 1e-6));

    const double threshold = c.threshold.value_or(default_threshold(c.map));
    const std::vector<EigenPair> pairs = top_eigenpairs(G, threshold, 16);
    r.files.emplace_back("eigenpairs.json", pairs_json(pairs).dump(2) + "\n");
    r.details["threshold"] = threshold;
    r.details["pairs"] = pairs.size();

    double residual = 0.0;
    std::vector<EigenPair> trusted;
    for (const auto& p : pairs) {
        residual = std::max(residual, p.residual);
        if (p.trusted) trusted.push_back(p);
    }
    r.details["trusted_pairs"] = trusted.size();
    r.checks.push_back(at_most("eigen_residual", residual, 1e-8));

    if (trusted.size() >= 2) {
        const DoubleOrthogonality d = double_orthogonality(trusted, c.map, c.M);
        r.checks.push_back(at_most("double_orthogonality_V", d.res_v, 1e-6));
        r.checks.push_back(at_most("double_orthogonality_U", d.res_u, 1e-6));
    }
    double boot = 0.0;
    for (const auto& p : trusted) {
        const EigenfunctionValue v = eval_eigenfunction(p, 0.3, c.map, c.M);
        boot = std::max(boot, std::abs(v.direct - v.bootstrap));
    }
    if (!trusted.empty()) r.checks.push_back(at_most("integral_equation_bootstrap", boot, 1e-6));
    return r;
}

SuiteResult suite_fisher(const ExperimentConfig& c, std::size_t max_pairs) {
    SuiteResult r;
    const HoloMap phi = c.t == 1.0 ? c.map : c.map.deformed(c.t);
    const bool contact = has_boundary_contact(phi);
    const double threshold = c.threshold.value_or(default_threshold(phi));
    const std::vector<EigenPair> pairs = top_eigenpairs(gram_matrix(phi, c.N_c, c.M), threshold, max_pairs);
    r.details["t"] = c.t;
    r.details["contact"] = contact;
    r.details["threshold"] = threshold;

    std::ostringstream os;
    os << "n,lambda_n,zero_count,winding_residual,trusted\n";
    bool counts_ok = true;
    bool simple = true;
    std::size_t trusted = 0;
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < pairs.size(); ++n) {
        const EigenPair& p = pairs[n];
        os << n << ',' << fmt(p.lambda) << ',';
        if (!p.trusted) {
            os << "-1,nan,0\n";
            continue;
        }
        ++trusted;
        const ZeroCount z = count_zeros(p.f, 1.0 - 1e-3);
        os << z.count << ',' << fmt(z.winding_residual) << ",1\n";
        const int idx = static_cast<int>(n);
        if (contact ? z.count > idx : z.count != idx) counts_ok = false;
        if (previous - p.lambda <= 1e-8) simple = false;
        previous = p.lambda;
    }
    r.files.emplace_back("fisher.csv", os.str());
    r.files.emplace_back("eigenpairs.json", pairs_json(pairs).dump(2) + "\n");
    r.details["trusted_pairs"] = trusted;
    r.checks.push_back({contact ? "zero_count_at_most_n" : "zero_count_exactly_n", counts_ok,
                        static_cast<double>(trusted), 0.0, "value = trusted pairs checked"});
    r.checks.push_back({"simple_spectrum", simple, 0.0, 1e-8, ""});
    return r;
}

SuiteResult suite_semigroup(const ExperimentConfig& c, std::size_t max_pairs) {
    SuiteResult r;
    DeformationOptions opt;
    opt.N = c.N_c;
    opt.M = c.M;
    opt.max_pairs = max_pairs;
    const DeformationResult d = semigroup_deformation(c.map, c.t_grid, opt);
    std::ostringstream os;
    write_csv(os, d.rows);
    r.files.emplace_back("deformation.csv", os.str());
    r.details["excluded_pairs"] = d.excluded;
    r.checks.push_back(at_most("monotone_in_t", d.monotonicity_violation, 1e-8));
    r.checks.push_back({"interior_zero_counts_exact", d.interior_counts_exact, 0.0, 0.0, "t < 1"});
    r.checks.push_back({"boundary_zero_counts_bounded", d.boundary_counts_bounded, 0.0, 0.0, "t = 1"});
    r.checks.push_back({"simple_spectrum", d.simple, 0.0, 1e-8, ""});
    return r;
}

SuiteResult suite_search(const ExperimentConfig& c, const std::vector<std::size_t>& ks, const std::vector<double>& cs) {
    SuiteResult r;
    const std::vector<SearchRow> rows = search_bump_family(ks, cs, c.N_c);
    std::ostringstream os;
    os << "k,c,s1,s1_half,lambda0\n";
    std::size_t above = 0;
    for (const auto& row : rows) {
        os << row.k << ',' << fmt(row.c) << ',' << fmt(row.s1) << ',' << fmt(row.s1_half) << ',' << fmt(row.lambda0)
           << '\n';
        if (row.lambda0 > kContactThreshold && std::abs(row.s1 - row.s1_half) < 1e-6) ++above;
    }
    r.files.emplace_back("search.csv", os.str());
    r.details["maps_scanned"] = rows.size();
    r.details["maps_with_stable_eigenvalue_above_threshold"] = above;
    return r;
}

SuiteResult suite_selftest() {
    SuiteResult r;
    r.checks = selftest_checks();
    std::ostringstream os;
    os << "check,pass,value,bound\n";
    for (const auto& ch : r.checks) os << ch.name << ',' << (ch.pass ? 1 : 0) << ',' << fmt(ch.value) << ',' << fmt(ch.bound) << '\n';
    r.files.emplace_back("selftest.csv", os.str());
    return r;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << contents;
}

}  // namespace

void apply_override(json& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "': expected key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;

    json* node = &config;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError("override '" + assignment + "': empty key segment");
        if (!node->is_object()) *node = json::object();
        node = &(*node)[part];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    *node = std::move(value);
}

ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    for (const auto& [key, _] : j.items()) {
        if (std::find(kKnownFields.begin(), kKnownFields.end(), key) == kKnownFields.end()) {
            throw ConfigError("config field '" + key + "': unknown field");
        }
    }
    ExperimentConfig c;
    if (!j.contains("suite") || !j["suite"].is_string()) throw ConfigError("config field 'suite': expected a string");
    c.suite = j["suite"].get<std::string>();
    const auto& names = suite_names();
    if (std::find(names.begin(), names.end(), c.suite) == names.end()) {
        throw ConfigError("config field 'suite': unknown suite '" + c.suite + "'");
    }

    const bool needs_map = c.suite != "selftest" && c.suite != "search";
    if (j.contains("map")) {
        c.map_spec = j["map"];
        try {
            c.map = c.map_spec.is_string() ? find_map(c.map_spec.get<std::string>()).map : holo_map_from_json(c.map_spec);
            validate(c.map);
        } catch (const Error& e) {
            throw ConfigError(std::string("config field 'map': ") + e.what());
        }
        c.contact = has_boundary_contact(c.map);
    } else if (needs_map) {
        throw ConfigError("config field 'map': required for suite '" + c.suite + "'");
    }

    c.N_c = j.contains("N_c") ? positive_integer(j, "N_c") : 64;
    if (c.N_c < 4) throw ConfigError("config field 'N_c': must be >= 4");
    c.N_r = j.contains("N_r") ? positive_integer(j, "N_r") : 4 * c.N_c;
    if (c.N_r < 4 * c.N_c) throw ConfigError("config field 'N_r': must be >= 4 * N_c");
    c.M = j.contains("M") ? positive_integer(j, "M") : std::max(default_samples(c.N_r), next_power_of_two(8 * c.N_c));
    if (!is_power_of_two(c.M)) throw ConfigError("config field 'M': must be a power of two");
    if (c.M < 8 * c.N_c) throw ConfigError("config field 'M': must be >= 8 * N_c");
    if (c.M < 4 * c.N_r) throw ConfigError("config field 'M': must be >= 4 * N_r");

    c.n_list = j.contains("n_list") ? list_field<std::size_t>(j, "n_list")
                                    : std::vector<std::size_t>{c.N_c, 2 * c.N_c, 4 * c.N_c};
    if (c.n_list.size() < 3) throw ConfigError("config field 'n_list': need at least three orders");
    for (std::size_t i = 0; i < c.n_list.size(); ++i) {
        if (c.n_list[i] < 4) throw ConfigError("config field 'n_list': orders must be >= 4");
        if (i > 0 && c.n_list[i] <= c.n_list[i - 1]) throw ConfigError("config field 'n_list': orders must increase");
    }

    c.t_grid = j.contains("t_grid") ? list_field<double>(j, "t_grid") : std::vector<double>{0.5, 0.8, 0.95, 1.0};
    for (std::size_t i = 0; i < c.t_grid.size(); ++i) {
        if (!(c.t_grid[i] > 0.0 && c.t_grid[i] <= 1.0)) throw ConfigError("config field 't_grid': entries must lie in (0, 1]");
        if (i > 0 && c.t_grid[i] <= c.t_grid[i - 1]) throw ConfigError("config field 't_grid': must be increasing");
    }
    if (c.t_grid.back() != 1.0) throw ConfigError("config field 't_grid': last entry must be 1");

    if (j.contains("t")) {
        c.t = real_field(j, "t");
        if (!(c.t > 0.0 && c.t <= 1.0)) throw ConfigError("config field 't': must lie in (0, 1]");
    }
    if (j.contains("threshold") && !j["threshold"].is_null()) {
        c.threshold = real_field(j, "threshold");
        if (!(*c.threshold >= 0.0)) throw ConfigError("config field 'threshold': must be >= 0");
    }
    if (j.contains("out_dir")) {
        if (!j["out_dir"].is_string()) throw ConfigError("config field 'out_dir': expected a string");
        c.out_dir = j["out_dir"].get<std::string>();
    }
    if (j.contains("max_pairs")) positive_integer(j, "max_pairs");
    if (j.contains("ks")) list_field<std::size_t>(j, "ks");
    if (j.contains("cs")) list_field<double>(j, "cs");

    c.echo = j;
    c.echo.erase("out_dir");
    c.echo["N_c"] = c.N_c;
    c.echo["N_r"] = c.N_r;
    c.echo["M"] = c.M;
    return c;
}

std::string content_hash(const std::string& bytes) {
    const std::string blob = "blob " + std::to_string(bytes.size()) + '\0' + bytes;
    unsigned char digest[SHA_DIGEST_LENGTH];
    SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), digest);
    std::ostringstream os;
    for (const unsigned char b : digest) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(b);
    return os.str();
}

json to_json(const Check& c) {
    json j{{"name", c.name}, {"pass", c.pass}};
    j["value"] = std::isfinite(c.value) ? json(c.value) : json(nullptr);
    j["bound"] = std::isfinite(c.bound) ? json(c.bound) : json(nullptr);
    if (!c.note.empty()) j["note"] = c.note;
    return j;
}

bool SuiteResult::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

SuiteResult run_suite(const ExperimentConfig& c) {
    const std::size_t max_pairs = c.echo.contains("max_pairs") ? c.echo["max_pairs"].get<std::size_t>() : 12;
    if (c.suite == "singular") return suite_singular(c);
    if (c.suite == "fock") return suite_fock(c);
    if (c.suite == "restrict") return suite_restrict(c);
    if (c.suite == "fisher") return suite_fisher(c, max_pairs);
    if (c.suite == "semigroup") return suite_semigroup(c, max_pairs);
    if (c.suite == "selftest") return suite_selftest();
    if (c.suite == "search") {
        const auto ks = c.echo.contains("ks") ? c.echo["ks"].get<std::vector<std::size_t>>()
                                              : std::vector<std::size_t>{2, 3, 4, 5, 6, 7, 8};
        const auto cs = c.echo.contains("cs") ? c.echo["cs"].get<std::vector<double>>()
                                              : std::vector<double>{0.05, 0.1, 0.15, 0.2, 0.3, 0.4};
        return suite_search(c, ks, cs);
    }
    throw ConfigError("config field 'suite': unknown suite '" + c.suite + "'");
}

std::vector<Check> selftest_checks() {
    std::vector<Check> out;
    const auto near = [&](const std::string& name, double value, double expected, double tol) {
        out.push_back(at_most(name, std::abs(value - expected), tol));
    };
    const auto near_c = [&](const std::string& name, cplx value, cplx expected, double tol) {
        out.push_back(at_most(name, std::abs(value - expected), tol));
    };

    // holomorphic maps and Hardy-space primitives
    near_c("eval_map_scale", eval_map(HoloMap::scale(0.5), 0.6), 0.3, 1e-15);
    near_c("derivative_mobius_origin", derivative(HoloMap::mobius(0.3), 0.0), 0.91, 1e-15);
    near_c("derivative_poly_boundary", derivative(HoloMap::poly({0.0, 0.5, 0.25}), 1.0), 1.0, 1e-15);
    near_c("sqrt_derivative_other_branch", sqrt_derivative(HoloMap::scale(0.25, -1), cplx(0.1, 0.2)), -0.5, 1e-15);
    near_c("sqrt_derivative_half_at_i", sqrt_derivative(HoloMap::poly({0.5, 0.5}), cplx(0.0, 1.0)), std::sqrt(0.5), 1e-15);
    {
        std::vector<cplx> samples(32);
        const auto nodes = unit_circle_nodes(32);
        for (std::size_t j = 0; j < 32; ++j) samples[j] = std::pow(nodes[j], 3);
        const CoeffVec c = taylor_coeffs(samples, 8);
        out.push_back(at_most("taylor_coeffs_monomial", (c.coeffs - CoeffVec::unit(3, 8).coeffs).cwiseAbs().maxCoeff(), 1e-14));
    }
    near("littlewood_paley_monomial", littlewood_paley_norm(CoeffVec::unit(5, 6)), 1.0, 1e-10);
    near_c("kernel_at_origin", kernel(cplx(0.4, 0.3), 0.0), 1.0, 1e-15);
    near("normalized_kernel_norm", normalized_kernel(0.5, 64).h2_norm(), 1.0, 1e-15);
    {
        bool all_valid = true;
        std::size_t contact = 0;
        std::size_t interior = 0;
        bool tags_match = true;
        for (const auto& e : corpus()) {
            try {
                validate(e.map);
            } catch (const Error&) {
                all_valid = false;
            }
            (e.contact ? contact : interior)++;
            if (has_boundary_contact(e.map) != e.contact) tags_match = false;
        }
        out.push_back({"corpus_validates", all_valid, 0.0, 0.0, ""});
        out.push_back({"corpus_contact_tags", tags_match && contact >= 3 && interior >= 3,
                       static_cast<double>(std::min(contact, interior)), 3.0, ""});
    }

    // finite sections
    {
        const OperatorMatrix W = build_wco(HoloMap::scale(0.5), 8, 32);
        double err = 0.0;
        for (Eigen::Index m = 0; m < 32; ++m) {
            for (Eigen::Index n = 0; n < 8; ++n) {
                const double expect = m == n ? std::pow(0.5, static_cast<double>(n) + 0.5) : 0.0;
                err = std::max(err, std::abs(W.entries(m, n) - expect));
            }
        }
        out.push_back(at_most("build_wco_diagonal", err, 1e-14));
        out.push_back(at_most("build_wco_identity",
                              max_abs(build_wco(HoloMap::identity(), 8, 32).entries - Eigen::MatrixXcd::Identity(32, 8)), 1e-14));
    }
    {
        const std::vector<double> s = svd_values(build_shift_integral(6).entries);
        double err = 0.0;
        for (std::size_t k = 0; k < s.size(); ++k) err = std::max(err, std::abs(s[k] - 1.0 / static_cast<double>(k + 1)));
        out.push_back(at_most("shift_integral_singular_values", err, 1e-14));
    }
    out.push_back(at_most("proof_split_scale_X_zero", max_abs(build_proof_split(HoloMap::scale(0.5), 8, 32).X.entries), 1e-14));
    out.push_back(at_most("compose_scale_scale", compose_check(HoloMap::scale(0.5), HoloMap::scale(0.8), 16), 1e-14));
    {
        const KernelAction a = adjoint_kernel_action(HoloMap::scale(0.25), 0.0, 16);
        out.push_back(at_most("adjoint_kernel_origin", (a.computed.coeffs - a.predicted.coeffs).norm() +
                                                           std::abs(a.computed.coeffs(0) - 0.5), 1e-14));
    }
    {
        const OperatorMatrix W = build_wco(HoloMap::poly({0.5, 0.5}), 4, 16);
        std::stringstream ss;
        write_binary(ss, W);
        out.push_back(at_most("binary_roundtrip", max_abs(read_binary(ss).entries - W.entries), 0.0));
    }

    // spectra
    {
        const SingularSpectrum s = singular_values(OperatorMatrix(Eigen::MatrixXcd::Identity(8, 8)));
        double err = 0.0;
        for (const double v : s.values) err = std::max(err, std::abs(v - 1.0));
        out.push_back(at_most("singular_values_identity", err, 1e-14));
    }
    out.push_back(at_most("essential_norm_affine", essential_norm_estimate(HoloMap::poly({0.2, 0.5}), {16, 32, 64}).estimate, 0.05));
    out.push_back(at_most("fit_K_contraction",
                          fit_K(singular_values(build_wco(HoloMap::scale(0.5), 16, 64))), 0.0));
    near("schwarz_pick_identity", schwarz_pick_check(HoloMap::identity(), 256).max_quotient, 1.0, 1e-12);
    {
        const JuliaProbe p = julia_caratheodory_probe(HoloMap::identity(), {0.9, 0.99});
        near("julia_identity", p.quotients.back(), 1.0, 1e-12);
    }

    // exterior powers and Fock norms
    {
        Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(3, 3);
        d.diagonal() << 3.0, 2.0, 1.0;
        const OperatorMatrix L = exterior_power(OperatorMatrix(d), 2);
        Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(3, 3);
        expect.diagonal() << 6.0, 3.0, 2.0;
        out.push_back(at_most("exterior_power_diagonal", max_abs(L.entries - expect), 1e-14));
        const NormProduct np = lambda_norm_formula_check(OperatorMatrix(Eigen::MatrixXcd::Identity(4, 4)), 3);
        out.push_back(at_most("lambda_norm_unitary", std::abs(np.lhs - 1.0) + std::abs(np.rhs - 1.0), 1e-14));
    }
    out.push_back({"fock_norm_contraction",
                   fock_norm(singular_values(build_wco(HoloMap::scale(0.5), 16, 64))).verdict == FockVerdict::BoundedTrivially,
                   0.0, 0.0, ""});
    {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
        m.diagonal() << 1.5, 0.5;
        const ContractionTraceSplit s = split_contraction_trace(OperatorMatrix(m));
        Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2, 2);
        a.diagonal() << 1.0, 0.5;
        out.push_back(at_most("split_diagonal", max_abs(s.contraction.entries - a) + std::abs(s.trace - 0.5), 1e-14));
    }

    // restriction operator
    out.push_back(at_most("gram_identity",
                          max_abs(gram_matrix(HoloMap::identity(), 16, 1024).entries - Eigen::MatrixXcd::Identity(16, 16)), 1e-14));
    out.push_back(at_most("compare_moduli_scale", compare_moduli(HoloMap::scale(0.5), 32, 1024).max_mismatch, 1e-10));
    out.push_back({"top_eigenpairs_mobius_empty",
                   top_eigenpairs(gram_matrix(HoloMap::mobius(0.3), 32, 1024), kContactThreshold).empty(), 0.0, 0.0, ""});
    {
        const double r = 0.5;
        const std::vector<EigenPair> pairs{pair_of(r, CoeffVec::unit(0, 8)), pair_of(r * r * r, CoeffVec::unit(1, 8))};
        const DoubleOrthogonality d = double_orthogonality(pairs, HoloMap::scale(r), 1024);
        out.push_back(at_most("double_orthogonality_scale", std::max(d.res_u, d.res_v), 1e-12));
        const EigenfunctionValue v = eval_eigenfunction(pairs[1], 0.3, HoloMap::scale(r), 1024);
        out.push_back(at_most("eval_eigenfunction_scale", std::abs(v.direct - 0.3) + std::abs(v.bootstrap - 0.3), 1e-12));
    }
    {
        Eigen::VectorXcd z3 = Eigen::VectorXcd::Zero(4);
        z3(3) = 1.0;
        out.push_back({"count_zeros_cube", count_zeros(CoeffVec(z3), 0.9).count == 3, 0.0, 0.0, ""});
    }
    {
        DeformationOptions opt;
        opt.N = 16;
        opt.max_pairs = 6;
        const DeformationResult d = semigroup_deformation(HoloMap::identity(), {0.5, 0.8, 1.0}, opt);
        out.push_back({"semigroup_identity", d.monotone && d.interior_counts_exact && d.boundary_counts_bounded && d.simple,
                       d.monotonicity_violation, 1e-8, ""});
    }

    // runner plumbing
    out.push_back({"content_hash_empty_blob", content_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391", 0.0, 0.0, ""});
    return out;
}

int run_experiment(const json& config, std::ostream& log) {
    ExperimentConfig c;
    try {
        c = parse_config(config);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        log << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    const bool write = !c.out_dir.empty();
    if (write) {
        std::error_code ec;
        std::filesystem::create_directories(c.out_dir, ec);
        if (ec) {
            log << "config error: cannot create output directory '" << c.out_dir.string() << "': " << ec.message() << '\n';
            return kExitConfig;
        }
    }

    json manifest{{"toolkit", "hspec"},
                  {"version", version()},
                  {"suite", c.suite},
                  {"config", c.echo},
                  {"input_hash", content_hash(c.echo.dump())}};
    try {
        if (write) write_file(c.out_dir / "manifest.json", manifest.dump(2) + "\n");
        const SuiteResult result = run_suite(c);
        json summary{{"suite", c.suite}, {"pass", result.passed()}, {"checks", json::array()}, {"details", result.details}};
        for (const auto& ch : result.checks) {
            summary["checks"].push_back(to_json(ch));
            log << (ch.pass ? "PASS " : "FAIL ") << ch.name << "  value=" << fmt(ch.value) << "  bound=" << fmt(ch.bound);
            if (!ch.note.empty()) log << "  (" << ch.note << ')';
            log << '\n';
        }
        if (write) {
            for (const auto& [name, contents] : result.files) write_file(c.out_dir / name, contents);
            write_file(c.out_dir / "summary.json", summary.dump(2) + "\n");
        }
        log << c.suite << ": " << (result.passed() ? "pass" : "FAIL") << '\n';
        return result.passed() ? kExitPass : kExitAssertion;
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        log << "numerical failure: " << e.what() << '\n';
        if (write) {
            json summary{{"suite", c.suite}, {"pass", false}, {"error", e.what()}};
            try {
                write_file(c.out_dir / "summary.json", summary.dump(2) + "\n");
            } catch (const std::exception&) {
            }
        }
        return kExitNumerical;
    }
}

}  // namespace hspec
