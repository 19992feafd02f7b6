#pragma once

// Built-in test maps, each tagged with whether its image touches the unit
// circle, plus a scan over the univalent family (z + c z^k)/(1 + c).

#include <cstddef>
#include <string>
#include <vector>

#include "hspec/holo.hpp"

namespace hspec {

struct CorpusEntry {
    std::string name;
    HoloMap map;
    bool contact = false;
    std::string formula;
};

std::vector<CorpusEntry> corpus();

// Maps outside the corpus proper. "wavy6" = (z + 0.15 z^6)/1.15 touches the
// circle at the sixth roots of unity and has singular values above 1.
std::vector<CorpusEntry> extra_maps();

// Looks a name up in corpus() and then extra_maps(); ConfigError if absent.
CorpusEntry find_map(const std::string& name);

bool fixes_origin(const HoloMap& map);

// (z + c z^k)/(1 + c); univalent for 0 <= c k < 1 since Re phi' > 0.
HoloMap bump_map(std::size_t k, double c);

struct SearchRow {
    std::size_t k = 0;
    double c = 0.0;
    double s1 = 0.0;      // largest singular value of the (N, 4N) section
    double s1_half = 0.0; // same at (N/2, 2N)
    double lambda0 = 0.0; // top Gram eigenvalue at order N
};

// For each k in ks and c in cs with c k < 1.
std::vector<SearchRow> search_bump_family(const std::vector<std::size_t>& ks, const std::vector<double>& cs,
                                          std::size_t N);

}  // namespace hspec
