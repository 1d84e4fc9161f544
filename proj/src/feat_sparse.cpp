#include "windowbench/feat/sparse.hpp"

#include <algorithm>
#include <cmath>

namespace wb::feat {

bool SparseVector::valid() const {
    int32_t prev = -1;
    for (const auto& [i, v] : entries) {
        if (i <= prev || i >= dim || v == 0.0 || !std::isfinite(v)) return false;
        prev = i;
    }
    return true;
}

double SparseVector::value_at(int32_t index) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), index,
                               [](const auto& e, int32_t i) { return e.first < i; });
    return it != entries.end() && it->first == index ? it->second : 0.0;
}

double SparseVector::dot(const std::vector<double>& dense) const {
    double sum = 0.0;
    for (const auto& [i, v] : entries) sum += v * dense[static_cast<size_t>(i)];
    return sum;
}

double SparseVector::l1_norm() const {
    double sum = 0.0;
    for (const auto& [i, v] : entries) sum += std::abs(v);
    return sum;
}

double SparseVector::l2_norm() const {
    double sum = 0.0;
    for (const auto& [i, v] : entries) sum += v * v;
    return std::sqrt(sum);
}

void SparseVector::scale(double factor) {
    for (auto& [i, v] : entries) v *= factor;
}

SparseVector make_sparse(int32_t dim, std::vector<std::pair<int32_t, double>> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    SparseVector out;
    out.dim = dim;
    for (const auto& [i, v] : entries) {
        if (!out.entries.empty() && out.entries.back().first == i)
            out.entries.back().second += v;
        else
            out.entries.emplace_back(i, v);
    }
    std::erase_if(out.entries, [](const auto& e) { return e.second == 0.0; });
    return out;
}

}  // namespace wb::feat
