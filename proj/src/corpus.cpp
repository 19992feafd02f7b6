#include "hspec/corpus.hpp"

#include <cmath>

#include "hspec/error.hpp"
#include "hspec/restrict.hpp"
#include "hspec/spectra.hpp"
#include "hspec/wco.hpp"

namespace hspec {

std::vector<CorpusEntry> corpus() {
    const HoloMap half = HoloMap::poly({0.5, 0.5});
    const HoloMap bump = HoloMap::poly({0.0, 1.0 / 1.4, 0.4 / 1.4});
    const HoloMap affine = HoloMap::poly({0.2, 0.5});
    const HoloMap scale05 = HoloMap::scale(0.5);
    const HoloMap mobius03 = HoloMap::mobius(0.3, 0.0);
    return {
        {"identity", HoloMap::identity(), true, "z"},
        {"scale05", scale05, false, "0.5 z"},
        {"scale025", HoloMap::scale(0.25), false, "0.25 z"},
        {"mobius03", mobius03, true, "(z - 0.3)/(1 - 0.3 z)"},
        {"half", half, true, "(1 + z)/2"},
        {"bump2", bump, true, "(z + 0.4 z^2)/1.4"},
        {"affine", affine, false, "0.5 z + 0.2"},
        {"mobius03_half", mobius03.then(half), true, "(1 + m(z))/2, m = mobius03"},
        {"scale05_mobius03", scale05.then(mobius03), false, "m(0.5 z), m = mobius03"},
        {"bump2_scale05", bump.then(scale05), false, "0.5 (z + 0.4 z^2)/1.4"},
    };
}

std::vector<CorpusEntry> extra_maps() {
    return {{"wavy6", bump_map(6, 0.15), true, "(z + 0.15 z^6)/1.15"}};
}

CorpusEntry find_map(const std::string& name) {
    for (auto& e : corpus()) {
        if (e.name == name) return e;
    }
    for (auto& e : extra_maps()) {
        if (e.name == name) return e;
    }
    throw ConfigError("unknown map name '" + name + "'");
}

bool fixes_origin(const HoloMap& map) { return std::abs(eval_map(map, 0.0)) <= kValTol; }

HoloMap bump_map(std::size_t k, double c) {
    if (k < 2) throw ConfigError("bump_map: k must be >= 2");
    if (!(c >= 0.0 && c * static_cast<double>(k) < 1.0)) throw ConfigError("bump_map: need 0 <= c k < 1");
    std::vector<cplx> coeffs(k + 1, 0.0);
    coeffs[1] = 1.0 / (1.0 + c);
    coeffs[k] = c / (1.0 + c);
    return HoloMap::poly(std::move(coeffs));
}

std::vector<SearchRow> search_bump_family(const std::vector<std::size_t>& ks, const std::vector<double>& cs,
                                          std::size_t N) {
    std::vector<SearchRow> rows;
    for (const std::size_t k : ks) {
        for (const double c : cs) {
            if (c * static_cast<double>(k) < 1.0 && c >= 0.0) rows.push_back({k, c, 0.0, 0.0, 0.0});
        }
    }
    parallel_for(rows.size(), [&](std::size_t i) {
        SearchRow& r = rows[i];
        const HoloMap map = bump_map(r.k, r.c);
        r.s1 = svd_values(build_wco(map, N, 4 * N).entries).front();
        r.s1_half = svd_values(build_wco(map, N / 2, 2 * N).entries).front();
        r.lambda0 = hermitian_eigenvalues(gram_matrix(map, N, default_samples(N)).entries).front();
    });
    return rows;
}

}  // namespace hspec
