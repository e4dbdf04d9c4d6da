#pragma once

// Dense row-major tensor. Rank 0 (scalar), 1 (vector) and 2 (matrix) cover
// everything the models need.

#include <cmath>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "lookahead/common.hpp"

namespace lookahead {

template <typename R>
class TensorT {
  public:
    TensorT() = default;

    explicit TensorT(std::vector<int> shape)
        : shape_(std::move(shape)), data_(checked_numel(shape_), R(0)) {}

    TensorT(std::vector<int> shape, std::vector<R> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        if (data_.size() != checked_numel(shape_)) {
            throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                             " does not match shape " + shape_string());
        }
    }

    static TensorT scalar(R v) { return TensorT({}, {v}); }

    static TensorT vector_of(std::vector<R> data) {
        const int n = static_cast<int>(data.size());
        return TensorT({n}, std::move(data));
    }

    const std::vector<int>& shape() const { return shape_; }
    int rank() const { return static_cast<int>(shape_.size()); }
    std::size_t numel() const { return data_.size(); }

    int dim(int i) const { return shape_[static_cast<std::size_t>(i)]; }
    int rows() const { return rank() == 2 ? shape_[0] : (rank() == 1 ? shape_[0] : 1); }
    int cols() const { return rank() == 2 ? shape_[1] : 1; }

    R* data() { return data_.data(); }
    const R* data() const { return data_.data(); }
    std::vector<R>& values() { return data_; }
    const std::vector<R>& values() const { return data_; }

    R& operator[](std::size_t i) { return data_[i]; }
    R operator[](std::size_t i) const { return data_[i]; }

    R& at(int r, int c) { return data_[static_cast<std::size_t>(r) * shape_[1] + c]; }
    R at(int r, int c) const { return data_[static_cast<std::size_t>(r) * shape_[1] + c]; }

    // Scalar access; the tensor must hold exactly one value.
    R item() const {
        if (numel() != 1) {
            throw ShapeError("item() on tensor of shape " + shape_string());
        }
        return data_[0];
    }

    void fill(R v) { std::fill(data_.begin(), data_.end(), v); }
    void zero() { fill(R(0)); }

    void add_inplace(const TensorT& other) {
        if (other.shape_ != shape_) {
            throw ShapeError("add_inplace shape mismatch: " + shape_string() + " vs " +
                             other.shape_string());
        }
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    }

    bool all_finite() const {
        for (R v : data_) {
            if (!std::isfinite(static_cast<double>(v))) return false;
        }
        return true;
    }

    bool same_shape(const TensorT& other) const { return shape_ == other.shape_; }

    std::string shape_string() const {
        std::ostringstream os;
        os << "[";
        for (std::size_t i = 0; i < shape_.size(); ++i) {
            if (i) os << ", ";
            os << shape_[i];
        }
        os << "]";
        return os.str();
    }

    bool operator==(const TensorT& other) const {
        return shape_ == other.shape_ && data_ == other.data_;
    }

  private:
    static std::size_t checked_numel(const std::vector<int>& shape) {
        std::size_t n = 1;
        for (int d : shape) {
            if (d < 0) throw ShapeError("negative dimension in tensor shape");
            n *= static_cast<std::size_t>(d);
        }
        return n;
    }

    std::vector<int> shape_;
    std::vector<R> data_;
};

using Tensor = TensorT<Real>;

}  // namespace lookahead
