#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace wb::feat {

// Indices strictly increasing, no stored zeros.
struct SparseVector {
    int32_t dim = 0;
    std::vector<std::pair<int32_t, double>> entries;

    bool valid() const;
    double value_at(int32_t index) const;  // 0.0 when absent

    // Dot product against a dense vector of length >= dim.
    double dot(const std::vector<double>& dense) const;

    double l1_norm() const;
    double l2_norm() const;
    void scale(double factor);
};

// Sorts by index, sums duplicate indices, and drops zeros.
SparseVector make_sparse(int32_t dim, std::vector<std::pair<int32_t, double>> entries);

struct FeatureMatrix {
    int32_t dim = 0;
    std::vector<SparseVector> rows;

    size_t n_rows() const { return rows.size(); }
};

}  // namespace wb::feat
