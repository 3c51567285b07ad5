#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vrin/tensor.hpp"

namespace vrin {

// Named learnable arrays, each with a gradient slot of the same shape.
// Insertion order is stable and defines checkpoint layout.
class ParameterStore {
public:
    std::size_t add(std::string name, Tensor value);

    std::size_t size() const { return entries_.size(); }
    bool contains(std::string_view name) const;
    std::size_t index(std::string_view name) const;

    const std::string& name(std::size_t i) const { return entries_[i].name; }
    Tensor& value(std::size_t i) { return entries_[i].value; }
    const Tensor& value(std::size_t i) const { return entries_[i].value; }
    Tensor& value(std::string_view n) { return entries_[index(n)].value; }
    const Tensor& value(std::string_view n) const { return entries_[index(n)].value; }
    Tensor& grad(std::size_t i) { return entries_[i].grad; }
    const Tensor& grad(std::size_t i) const { return entries_[i].grad; }
    const Tensor& grad(std::string_view n) const { return entries_[index(n)].grad; }

    void zero_grad();
    std::size_t total_elements() const;

    // Indices of every parameter whose name starts with `prefix`.
    std::vector<std::size_t> with_prefix(std::string_view prefix) const;

    bool operator==(const ParameterStore& other) const;

private:
    struct Entry {
        std::string name;
        Tensor value;
        Tensor grad;
    };
    std::vector<Entry> entries_;
    std::unordered_map<std::string, std::size_t> lookup_;
};

// Uniform in +-sqrt(1/fan_in).
Tensor init_weight(std::size_t out, std::size_t fan_in, std::mt19937_64& rng);

}  // namespace vrin
