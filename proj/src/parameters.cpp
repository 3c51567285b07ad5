#include "vrin/parameters.hpp"

#include <cmath>

#include "vrin/errors.hpp"

namespace vrin {

std::size_t ParameterStore::add(std::string name, Tensor value) {
    if (lookup_.contains(name)) throw DataError("duplicate parameter name '" + name + "'");
    const std::size_t id = entries_.size();
    Tensor grad(value.shape(), 0.0);
    lookup_.emplace(name, id);
    entries_.push_back({std::move(name), std::move(value), std::move(grad)});
    return id;
}

bool ParameterStore::contains(std::string_view name) const { return lookup_.contains(std::string(name)); }

std::size_t ParameterStore::index(std::string_view name) const {
    auto it = lookup_.find(std::string(name));
    if (it == lookup_.end()) throw DataError("unknown parameter '" + std::string(name) + "'");
    return it->second;
}

void ParameterStore::zero_grad() {
    for (auto& e : entries_) e.grad.fill(0.0);
}

std::size_t ParameterStore::total_elements() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.value.size();
    return n;
}

std::vector<std::size_t> ParameterStore::with_prefix(std::string_view prefix) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (std::string_view(entries_[i].name).starts_with(prefix)) out.push_back(i);
    }
    return out;
}

bool ParameterStore::operator==(const ParameterStore& other) const {
    if (entries_.size() != other.entries_.size()) return false;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].name != other.entries_[i].name || !(entries_[i].value == other.entries_[i].value)) {
            return false;
        }
    }
    return true;
}

Tensor init_weight(std::size_t out, std::size_t fan_in, std::mt19937_64& rng) {
    const double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    Tensor w({out, fan_in});
    for (auto& v : w.values()) v = dist(rng);
    return w;
}

}  // namespace vrin
