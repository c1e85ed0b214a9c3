// manifold.hpp
//
// Model manifolds: round spheres S^d, flat tori T^n = R^n / (2 pi Z)^n and
// finite Riemannian products of them.
#pragma once

#include <compare>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace speclab {

class ManifoldSpec {
public:
    enum class Kind { Sphere, Torus, Product };

    static ManifoldSpec sphere(int d);
    static ManifoldSpec torus(int n);
    // Factor order is canonicalized; a single factor collapses to itself.
    static ManifoldSpec product(std::vector<ManifoldSpec> factors);

    Kind kind() const { return kind_; }
    bool is_leaf() const { return kind_ != Kind::Product; }
    // Dimension of a leaf; total dimension of a product.
    int dim() const { return dim_; }
    const std::vector<ManifoldSpec>& factors() const { return factors_; }
    // Sphere and torus leaves in canonical order, products flattened.
    std::vector<ManifoldSpec> leaves() const;

    // Canonical text: "S2", "T3", "S2 x S3 x T2", nested products in parentheses.
    std::string str() const;

    bool operator==(const ManifoldSpec& other) const { return str() == other.str(); }
    std::strong_ordering operator<=>(const ManifoldSpec& other) const;

private:
    ManifoldSpec(Kind kind, int dim) : kind_(kind), dim_(dim) {}

    Kind kind_ = Kind::Sphere;
    int dim_ = 0;
    std::vector<ManifoldSpec> factors_;
};

class SpecSyntaxError : public std::invalid_argument {
public:
    SpecSyntaxError(const std::string& what, std::size_t offset)
        : std::invalid_argument(what + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

// factor := "S"<int> | "T"<int> | "(" expr ")";  expr := factor (" x " factor)*
ManifoldSpec parse_spec(std::string_view text);

}  // namespace speclab
