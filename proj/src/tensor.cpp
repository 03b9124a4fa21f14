#include "eisenhart/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "eisenhart/errors.hpp"

namespace eisenhart {

Tensor::Tensor(int dim, int rank) : dim_(dim), rank_(rank) {
    if (dim < 1 || rank < 0) throw ArgumentError("tensor needs dim >= 1 and rank >= 0");
    std::size_t n = 1;
    for (int r = 0; r < rank; ++r) n *= static_cast<std::size_t>(dim);
    data_.assign(n, 0.0);
}

double Tensor::norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
}

double Tensor::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

Tensor& Tensor::operator+=(const Tensor& other) {
    if (other.dim_ != dim_ || other.rank_ != rank_) throw DimensionError("tensor shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

Tensor& Tensor::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

Tensor operator-(const Tensor& a, const Tensor& b) {
    Tensor out = a;
    Tensor neg = b;
    neg *= -1.0;
    out += neg;
    return out;
}

}  // namespace eisenhart
