#include "hspec/wco.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "hspec/error.hpp"

namespace hspec {

namespace {

void check_grid_in_disk(const BoundaryGrid& g) {
    for (const cplx p : g.phi) {
        if (std::abs(p) > 1.0 + kValTol) throw DomainError("map leaves the closed disk on the boundary grid");
    }
}

// A applied to a coefficient vector: c_k -> position k+1 with weight 1/(k+1)
void shift_integrate_into(const CoeffVec& c, Eigen::MatrixXcd& target, Eigen::Index col) {
    for (Eigen::Index k = 0; k < c.coeffs.size(); ++k) {
        target(k + 1, col) += c.coeffs(k) / static_cast<double>(k + 1);
    }
}

template <typename T>
void put_le(std::ostream& os, T value) {
    std::array<char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    os.write(bytes.data(), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
    std::array<char, sizeof(T)> bytes;
    if (!is.read(bytes.data(), sizeof(T))) throw ConfigError("HSPM1: truncated stream");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

constexpr char kMagic[5] = {'H', 'S', 'P', 'M', '1'};

}  // namespace

OperatorMatrix OperatorMatrix::leading(std::size_t rows, std::size_t cols) const {
    return OperatorMatrix(entries.topLeftCorner(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)));
}

double operator_norm(const Eigen::MatrixXcd& m) {
    if (m.size() == 0) return 0.0;
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues()(0);
}

std::size_t default_samples(std::size_t order) { return std::max<std::size_t>(1024, next_power_of_two(8 * order)); }

OperatorMatrix build_wco(const HoloMap& map, std::size_t n_cols, std::size_t n_rows, std::size_t M) {
    if (n_rows < n_cols) throw ConfigError("build_wco: need N_r >= N_c");
    if (M == 0) M = default_samples(n_rows);
    const BoundaryGrid g = BoundaryGrid::sample(map, M);
    check_grid_in_disk(g);

    Eigen::MatrixXcd W(static_cast<Eigen::Index>(n_rows), static_cast<Eigen::Index>(n_cols));
    std::vector<cplx> f = g.sqrt_dphi;
    for (std::size_t n = 0; n < n_cols; ++n) {
        W.col(static_cast<Eigen::Index>(n)) = taylor_coeffs(f, n_rows).coeffs;
        for (std::size_t j = 0; j < M; ++j) f[j] *= g.phi[j];
    }
    return OperatorMatrix(std::move(W));
}

OperatorMatrix build_shift_integral(std::size_t N) {
    if (N < 1) throw ConfigError("build_shift_integral: need N >= 1");
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(N + 1), static_cast<Eigen::Index>(N));
    for (std::size_t n = 0; n < N; ++n) {
        A(static_cast<Eigen::Index>(n + 1), static_cast<Eigen::Index>(n)) = 1.0 / static_cast<double>(n + 1);
    }
    return OperatorMatrix(std::move(A));
}

ProofSplit build_proof_split(const HoloMap& map, std::size_t n_cols, std::size_t n_rows, std::size_t M) {
    if (n_rows < n_cols || n_rows < 2) throw ConfigError("build_proof_split: need N_r >= max(N_c, 2)");
    if (std::abs(eval_map(map, 0.0)) > kValTol) {
        throw PreconditionError("build_proof_split: requires phi(0) = 0");
    }
    if (M == 0) M = default_samples(n_rows);
    const BoundaryGrid g = BoundaryGrid::sample(map, M);
    check_grid_in_disk(g);

    const auto rows = static_cast<Eigen::Index>(n_rows);
    const auto cols = static_cast<Eigen::Index>(n_cols);
    Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(rows, cols);
    Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(rows, cols);

    std::vector<cplx> psi(M);
    std::vector<cplx> three_halves(M);
    double psi_sup = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
        const Jet jt = map.jet(g.nodes[j]);
        psi[j] = jt.d2 / (2.0 * g.sqrt_dphi[j]);
        three_halves[j] = g.dphi[j] * g.sqrt_dphi[j];
        psi_sup = std::max(psi_sup, std::abs(psi[j]));
    }

    T(0, 0) = sqrt_derivative(map, 0.0);
    std::vector<cplx> power(M, cplx(1.0));  // phi^n on the grid
    std::vector<cplx> samples(M);
    for (std::size_t n = 0; n < n_cols; ++n) {
        if (n >= 1) {
            // (phi')^{3/2} (D z^n) o phi = n (phi')^{3/2} phi^{n-1}; power holds phi^{n-1}
            for (std::size_t j = 0; j < M; ++j) samples[j] = static_cast<double>(n) * three_halves[j] * power[j];
            shift_integrate_into(taylor_coeffs(samples, n_rows - 1), T, static_cast<Eigen::Index>(n));
            for (std::size_t j = 0; j < M; ++j) power[j] *= g.phi[j];
        }
        for (std::size_t j = 0; j < M; ++j) samples[j] = psi[j] * power[j];
        shift_integrate_into(taylor_coeffs(samples, n_rows - 1), X, static_cast<Eigen::Index>(n));
    }
    return {OperatorMatrix(std::move(T)), OperatorMatrix(std::move(X)), psi_sup};
}

double compose_check(const HoloMap& map1, const HoloMap& map2, std::size_t N, std::size_t n_rows) {
    if (N < 2) throw ConfigError("compose_check: need N >= 2");
    if (n_rows == 0) n_rows = 4 * N;
    const OperatorMatrix W2 = build_wco(map2, N, n_rows);
    const OperatorMatrix W1 = build_wco(map1, n_rows, n_rows);
    const OperatorMatrix Wc = build_wco(map1.then(map2), N, n_rows);
    const auto half = static_cast<Eigen::Index>(N / 2);
    const Eigen::MatrixXcd diff = (W1.entries * W2.entries - Wc.entries).leftCols(half);
    return operator_norm(diff);
}

KernelAction adjoint_kernel_action(const HoloMap& map, cplx w, std::size_t N) {
    if (std::abs(w) >= 1.0) throw DomainError("adjoint_kernel_action: |w| must be < 1");
    const std::size_t n_rows = 4 * N;
    const OperatorMatrix W = build_wco(map, N, n_rows);
    const CoeffVec kw = normalized_kernel(w, n_rows);

    const cplx image = eval_map(map, w);
    if (std::abs(image) >= 1.0) throw DomainError("adjoint_kernel_action: phi(w) on the unit circle");
    const cplx factor =
        std::conj(sqrt_derivative(map, w)) * std::sqrt((1.0 - std::norm(w)) / (1.0 - std::norm(image)));
    CoeffVec predicted = normalized_kernel(image, N);
    predicted.coeffs *= factor;
    return {std::move(predicted), CoeffVec(W.entries.adjoint() * kw.coeffs)};
}

void write_csv(std::ostream& os, const OperatorMatrix& m) {
    std::ostringstream line;
    line << std::setprecision(17);
    for (Eigen::Index i = 0; i < m.entries.rows(); ++i) {
        line.str("");
        for (Eigen::Index k = 0; k < m.entries.cols(); ++k) {
            if (k) line << ',';
            line << m.entries(i, k).real() << ',' << m.entries(i, k).imag();
        }
        os << line.str() << '\n';
    }
}

void write_csv(const std::filesystem::path& path, const OperatorMatrix& m) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open " + path.string() + " for writing");
    write_csv(os, m);
}

void write_binary(std::ostream& os, const OperatorMatrix& m) {
    os.write(kMagic, sizeof(kMagic));
    put_le<std::uint64_t>(os, m.rows());
    put_le<std::uint64_t>(os, m.cols());
    for (Eigen::Index i = 0; i < m.entries.rows(); ++i) {
        for (Eigen::Index k = 0; k < m.entries.cols(); ++k) {
            put_le<double>(os, m.entries(i, k).real());
            put_le<double>(os, m.entries(i, k).imag());
        }
    }
}

void write_binary(const std::filesystem::path& path, const OperatorMatrix& m) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open " + path.string() + " for writing");
    write_binary(os, m);
}

OperatorMatrix read_binary(std::istream& is) {
    char magic[sizeof(kMagic)];
    if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw ConfigError("HSPM1: bad magic");
    }
    const auto rows = static_cast<Eigen::Index>(get_le<std::uint64_t>(is));
    const auto cols = static_cast<Eigen::Index>(get_le<std::uint64_t>(is));
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index k = 0; k < cols; ++k) {
            const double re = get_le<double>(is);
            const double im = get_le<double>(is);
            m(i, k) = cplx(re, im);
        }
    }
    return OperatorMatrix(std::move(m));
}

OperatorMatrix read_binary(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open " + path.string());
    return read_binary(is);
}

}  // namespace hspec
