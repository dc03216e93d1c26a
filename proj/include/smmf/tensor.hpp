#pragma once

#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace smmf {

using Shape = std::vector<std::int64_t>;

inline std::int64_t shape_numel(std::span<const std::int64_t> shape) {
    std::int64_t n = 1;
    for (auto d : shape) {
        if (d < 1) {
            throw std::invalid_argument("tensor axis length must be >= 1, got " +
                                        std::to_string(d));
        }
        n *= d;
    }
    return n;
}

inline std::string shape_to_string(std::span<const std::int64_t> shape) {
    std::string s = "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(shape[i]);
    }
    s += ")";
    return s;
}

/// Dense row-major tensor of doubles. The flat buffer is the source of
/// truth; the shape is a relabeling of it.
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(Shape shape) : shape_(std::move(shape)) {
        data_.assign(static_cast<std::size_t>(shape_numel(shape_)), 0.0);
    }

    Tensor(Shape shape, std::vector<double> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        if (shape_numel(shape_) != static_cast<std::int64_t>(data_.size())) {
            throw std::invalid_argument(
                "tensor data length " + std::to_string(data_.size()) +
                " does not match shape " + shape_to_string(shape_));
        }
    }

    static Tensor zeros(Shape shape) { return Tensor(std::move(shape)); }

    static Tensor full(Shape shape, double value) {
        Tensor t(std::move(shape));
        for (auto& x : t.data_) x = value;
        return t;
    }

    static Tensor vector(std::vector<double> data) {
        Shape s{static_cast<std::int64_t>(data.size())};
        return Tensor(std::move(s), std::move(data));
    }

    static Tensor matrix(std::int64_t rows, std::int64_t cols,
                         std::vector<double> data) {
        return Tensor(Shape{rows, cols}, std::move(data));
    }

    const Shape& shape() const { return shape_; }
    std::int64_t rank() const { return static_cast<std::int64_t>(shape_.size()); }
    std::int64_t numel() const { return static_cast<std::int64_t>(data_.size()); }

    std::int64_t dim(std::int64_t axis) const { return shape_.at(static_cast<std::size_t>(axis)); }

    bool is_matrix() const { return shape_.size() == 2; }

    std::int64_t rows() const {
        require_matrix("rows");
        return shape_[0];
    }
    std::int64_t cols() const {
        require_matrix("cols");
        return shape_[1];
    }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    double& operator[](std::int64_t i) { return data_[static_cast<std::size_t>(i)]; }
    double operator[](std::int64_t i) const { return data_[static_cast<std::size_t>(i)]; }

    double& at(std::int64_t i, std::int64_t j) {
        require_matrix("at");
        return data_[static_cast<std::size_t>(i * shape_[1] + j)];
    }
    double at(std::int64_t i, std::int64_t j) const {
        require_matrix("at");
        return data_[static_cast<std::size_t>(i * shape_[1] + j)];
    }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

    /// Relabels the flat buffer under a new shape. Element count must match.
    Tensor reshaped(Shape new_shape) && {
        check_reshape(new_shape);
        return Tensor(std::move(new_shape), std::move(data_));
    }

    Tensor reshaped(Shape new_shape) const& {
        check_reshape(new_shape);
        return Tensor(std::move(new_shape), data_);
    }

    void require_same_shape(const Tensor& other, const char* op) const {
        if (!same_shape(other)) {
            throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                        shape_to_string(shape_) + " vs " +
                                        shape_to_string(other.shape_));
        }
    }

private:
    void require_matrix(const char* op) const {
        if (shape_.size() != 2) {
            throw std::invalid_argument(std::string(op) + ": expected a matrix, got rank-" +
                                        std::to_string(shape_.size()) + " tensor " +
                                        shape_to_string(shape_));
        }
    }

    void check_reshape(const Shape& new_shape) const {
        if (shape_numel(new_shape) != numel()) {
            throw std::invalid_argument("reshape: element count mismatch, " +
                                        shape_to_string(shape_) + " (" +
                                        std::to_string(numel()) + ") -> " +
                                        shape_to_string(new_shape));
        }
    }

    Shape shape_;
    std::vector<double> data_;
};

inline Tensor reshape(Tensor t, Shape new_shape) {
    return std::move(t).reshaped(std::move(new_shape));
}

} // namespace smmf
