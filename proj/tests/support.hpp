#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "r1c/io.hpp"
#include "r1c/tensor.hpp"

namespace r1c::testing {

inline std::string data_path(const std::string& name) { return std::string(R1C_DATA_DIR) + "/" + name; }

inline PartialTensor load_fixture(const std::string& name) { return read_tensor_file(data_path(name)); }

inline PartialTensor matrix(std::size_t rows, std::size_t cols,
                            std::vector<std::tuple<std::size_t, std::size_t, double>> cells) {
    std::vector<Entry> entries;
    for (auto [i, j, v] : cells) entries.push_back({MultiIndex{i, j}, v});
    return PartialTensor({rows, cols}, std::move(entries));
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

inline double abs_cos(std::span<const double> a, std::span<const double> b) {
    double ab = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    return std::abs(ab) / std::sqrt(aa * bb);
}

// |sin| between two vectors as the norm of the part of a/|a| orthogonal to b,
// computed without the library's metrics code; accurate near zero.
inline double sin_between(std::span<const double> a, std::span<const double> b) {
    double aa = 0, bb = 0, ab = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        aa += a[i] * a[i];
        bb += b[i] * b[i];
        ab += a[i] * b[i];
    }
    const double na = std::sqrt(aa), nb = std::sqrt(bb), proj = ab / (na * nb);
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double r = a[i] / na - proj * b[i] / nb;
        s += r * r;
    }
    return std::sqrt(s);
}

// Singular values ascending with the matching right vectors; a wide matrix is
// padded with zeros so there are always ncols values.
struct DenseOracle {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

inline DenseOracle dense_oracle(const Eigen::MatrixXd& b) {
    const Eigen::Index n = b.cols();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeFullV);
    const Eigen::VectorXd s = svd.singularValues();
    DenseOracle out;
    out.values = Eigen::VectorXd::Zero(n);
    out.vectors = Eigen::MatrixXd(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index src = n - 1 - i;
        out.values(i) = src < s.size() ? s(src) : 0.0;
        out.vectors.col(i) = svd.matrixV().col(src);
    }
    return out;
}

}  // namespace r1c::testing
