#include "hspec/fock.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "hspec/error.hpp"

namespace hspec {

std::vector<std::vector<std::size_t>> increasing_tuples(std::size_t dim, std::size_t n) {
    std::vector<std::vector<std::size_t>> out;
    if (n > dim) return out;
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    while (true) {
        out.push_back(idx);
        // rightmost position that can still advance
        std::size_t pos = n;
        while (pos > 0 && idx[pos - 1] == dim - n + pos - 1) --pos;
        if (pos == 0) break;
        ++idx[pos - 1];
        for (std::size_t i = pos; i < n; ++i) idx[i] = idx[i - 1] + 1;
    }
    return out;
}

OperatorMatrix exterior_power(const OperatorMatrix& m, std::size_t n) {
    if (m.rows() > kMaxExteriorDim || m.cols() > kMaxExteriorDim) {
        throw ConfigError("exterior_power: dimension exceeds " + std::to_string(kMaxExteriorDim));
    }
    if (n > std::min(m.rows(), m.cols())) throw ConfigError("exterior_power: degree exceeds dimension");
    const auto rows = increasing_tuples(m.rows(), n);
    const auto cols = increasing_tuples(m.cols(), n);
    Eigen::MatrixXcd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    const auto size = static_cast<Eigen::Index>(n);
    Eigen::MatrixXcd minor(size, size);
    for (std::size_t I = 0; I < rows.size(); ++I) {
        for (std::size_t J = 0; J < cols.size(); ++J) {
            if (n == 0) {
                out(0, 0) = 1.0;
                continue;
            }
            for (Eigen::Index a = 0; a < size; ++a) {
                for (Eigen::Index b = 0; b < size; ++b) {
                    minor(a, b) = m.entries(static_cast<Eigen::Index>(rows[I][static_cast<std::size_t>(a)]),
                                            static_cast<Eigen::Index>(cols[J][static_cast<std::size_t>(b)]));
                }
            }
            out(static_cast<Eigen::Index>(I), static_cast<Eigen::Index>(J)) = minor.determinant();
        }
    }
    return OperatorMatrix(std::move(out));
}

NormProduct lambda_norm_formula_check(const OperatorMatrix& m, std::size_t n) {
    NormProduct r;
    r.lhs = operator_norm(exterior_power(m, n).entries);
    const std::vector<double> s = svd_values(m.entries);
    r.rhs = 1.0;
    for (std::size_t j = 0; j < n; ++j) r.rhs *= s[j];
    return r;
}

std::string to_string(FockVerdict v) {
    switch (v) {
        case FockVerdict::BoundedTrivially:
            return "bounded-trivially";
        case FockVerdict::BoundedConverged:
            return "bounded-converged";
        case FockVerdict::Unconverged:
            break;
    }
    return "unconverged";
}

FockReport fock_norm(const SingularSpectrum& spec) {
    FockReport report;
    double product = 1.0;
    bool exceeds_one = false;
    for (std::size_t k = 0; k < spec.values.size(); ++k) {
        if (!spec.trusted[k]) continue;
        if (spec.values[k] > 1.0 + kTheorySlack) exceeds_one = true;
        product *= std::max(1.0, spec.values[k]);
        report.partial_products.push_back(product);
    }
    report.lambda_norm_estimate = product;

    const auto& p = report.partial_products;
    if (p.empty()) {
        report.verdict = FockVerdict::Unconverged;
    } else if (!exceeds_one) {
        report.verdict = FockVerdict::BoundedTrivially;
    } else if (p.size() >= 2 && std::abs(p.back() - p[p.size() - 2]) < 1e-8 * p.back()) {
        report.verdict = FockVerdict::BoundedConverged;
    } else {
        report.verdict = FockVerdict::Unconverged;
    }
    return report;
}

nlohmann::json to_json(const FockReport& report) {
    return {{"partial_products", report.partial_products},
            {"verdict", to_string(report.verdict)},
            {"lambda_norm_estimate", report.lambda_norm_estimate}};
}

OperatorMatrix modulus(const OperatorMatrix& w) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(w.entries, Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) throw NumericalError("modulus: SVD did not converge");
    const Eigen::MatrixXcd& V = svd.matrixV();
    const Eigen::VectorXd& s = svd.singularValues();
    Eigen::MatrixXcd out = V * s.cast<cplx>().asDiagonal() * V.adjoint();
    // symmetrize away rounding
    out = 0.5 * (out + out.adjoint()).eval();
    return OperatorMatrix(std::move(out));
}

ContractionTraceSplit split_contraction_trace(const OperatorMatrix& m) {
    if (m.rows() != m.cols()) throw PreconditionError("split_contraction_trace: matrix must be square");
    if ((m.entries - m.entries.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
        throw PreconditionError("split_contraction_trace: matrix is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(m.entries);
    if (eig.info() != Eigen::Success) throw NumericalError("split_contraction_trace: eigensolver failed");
    const Eigen::VectorXd& lam = eig.eigenvalues();
    const Eigen::MatrixXcd& V = eig.eigenvectors();

    Eigen::VectorXd low(lam.size());
    Eigen::VectorXd excess(lam.size());
    ContractionTraceSplit split;
    std::vector<double> over;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        low(i) = lam(i) > 1.0 ? 1.0 : lam(i);
        excess(i) = lam(i) > 1.0 ? lam(i) - 1.0 : 0.0;
        if (excess(i) > 0.0) over.push_back(excess(i));
    }
    std::sort(over.begin(), over.end());
    for (double x : over) split.trace += x;
    split.contraction = OperatorMatrix(V * low.cast<cplx>().asDiagonal() * V.adjoint());
    split.trace_part = OperatorMatrix(V * excess.cast<cplx>().asDiagonal() * V.adjoint());
    split.eigenvalues.assign(lam.data(), lam.data() + lam.size());
    std::reverse(split.eigenvalues.begin(), split.eigenvalues.end());
    return split;
}

}  // namespace hspec
