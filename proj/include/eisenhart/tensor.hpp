#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace eisenhart {

/// Dense rank-r array over n coordinates, row-major. Index order is the
/// order the indices are written in the formula, e.g. christoffel(k, i, j)
/// holds Gamma^k_ij.
class Tensor {
public:
    Tensor() = default;
    Tensor(int dim, int rank);

    int dim() const { return dim_; }
    int rank() const { return rank_; }
    std::size_t size() const { return data_.size(); }

    template <class... I>
    double& operator()(I... idx) {
        return data_[offset(idx...)];
    }
    template <class... I>
    double operator()(I... idx) const {
        return data_[offset(idx...)];
    }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    double norm() const;     // Frobenius over all components
    double max_abs() const;

    Tensor& operator+=(const Tensor& other);
    Tensor& operator*=(double s);

private:
    template <class... I>
    std::size_t offset(I... idx) const {
        assert(static_cast<int>(sizeof...(I)) == rank_);
        std::size_t o = 0;
        ((o = o * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(idx)), ...);
        return o;
    }

    int dim_ = 0;
    int rank_ = 0;
    std::vector<double> data_;
};

Tensor operator-(const Tensor& a, const Tensor& b);

}  // namespace eisenhart
