#include "vrin/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "vrin/errors.hpp"

namespace vrin {

std::size_t shape_size(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << 'x';
        os << shape[i];
    }
    os << ']';
    return os.str();
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)) {
    for (auto d : shape_) {
        if (d == 0) throw ShapeError("tensor dimensions must be positive, got " + shape_string(shape_));
    }
    data_.assign(shape_size(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
    for (auto d : shape_) {
        if (d == 0) throw ShapeError("tensor dimensions must be positive, got " + shape_string(shape_));
    }
    if (shape_size(shape_) != data_.size()) {
        throw ShapeError("shape " + shape_string(shape_) + " does not match " + std::to_string(data_.size()) +
                         " values");
    }
}

Tensor Tensor::matrix(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r ? rows.begin()->size() : 0;
    std::vector<double> data;
    data.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c) throw ShapeError("ragged matrix literal");
        data.insert(data.end(), row.begin(), row.end());
    }
    return Tensor({r, c}, std::move(data));
}

Tensor Tensor::column(std::initializer_list<double> values) {
    return Tensor({values.size(), 1}, std::vector<double>(values));
}

Tensor Tensor::row(std::initializer_list<double> values) {
    return Tensor({1, values.size()}, std::vector<double>(values));
}

std::size_t Tensor::rows() const {
    if (shape_.size() == 1) return 1;
    if (shape_.size() == 2) return shape_[0];
    throw ShapeError("rows() needs a rank-1 or rank-2 tensor, got " + shape_string(shape_));
}

std::size_t Tensor::cols() const {
    if (shape_.size() == 1) return shape_[0];
    if (shape_.size() == 2) return shape_[1];
    throw ShapeError("cols() needs a rank-1 or rank-2 tensor, got " + shape_string(shape_));
}

double Tensor::item() const {
    if (data_.size() != 1) throw ShapeError("item() on non-scalar tensor " + shape_string(shape_));
    return data_[0];
}

bool Tensor::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

}  // namespace vrin
