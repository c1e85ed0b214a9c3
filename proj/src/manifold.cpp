#include "speclab/manifold.hpp"

#include <algorithm>

namespace speclab {

namespace {

// Spheres before tori, then by dimension, then nested products by text.
int kind_rank(ManifoldSpec::Kind k) {
    switch (k) {
        case ManifoldSpec::Kind::Sphere: return 0;
        case ManifoldSpec::Kind::Torus: return 1;
        case ManifoldSpec::Kind::Product: return 2;
    }
    return 3;
}

}  // namespace

ManifoldSpec ManifoldSpec::sphere(int d) {
    if (d < 1) throw std::invalid_argument("sphere dimension must be positive");
    return ManifoldSpec(Kind::Sphere, d);
}

ManifoldSpec ManifoldSpec::torus(int n) {
    if (n < 1) throw std::invalid_argument("torus dimension must be positive");
    return ManifoldSpec(Kind::Torus, n);
}

ManifoldSpec ManifoldSpec::product(std::vector<ManifoldSpec> factors) {
    if (factors.empty()) throw std::invalid_argument("product needs at least one factor");
    if (factors.size() == 1) return std::move(factors.front());
    std::stable_sort(factors.begin(), factors.end());
    ManifoldSpec spec(Kind::Product, 0);
    for (const auto& f : factors) spec.dim_ += f.dim();
    spec.factors_ = std::move(factors);
    return spec;
}

std::vector<ManifoldSpec> ManifoldSpec::leaves() const {
    if (is_leaf()) return {*this};
    std::vector<ManifoldSpec> out;
    for (const auto& f : factors_) {
        auto sub = f.leaves();
        out.insert(out.end(), sub.begin(), sub.end());
    }
    std::stable_sort(out.begin(), out.end());
    return out;
}

std::string ManifoldSpec::str() const {
    switch (kind_) {
        case Kind::Sphere: return "S" + std::to_string(dim_);
        case Kind::Torus: return "T" + std::to_string(dim_);
        case Kind::Product: break;
    }
    std::string s;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (i) s += " x ";
        const auto& f = factors_[i];
        s += f.is_leaf() ? f.str() : "(" + f.str() + ")";
    }
    return s;
}

std::strong_ordering ManifoldSpec::operator<=>(const ManifoldSpec& other) const {
    if (auto c = kind_rank(kind_) <=> kind_rank(other.kind_); c != 0) return c;
    if (is_leaf()) return dim_ <=> other.dim_;
    return str() <=> other.str();
}

namespace {

class SpecParser {
public:
    explicit SpecParser(std::string_view text) : text_(text) {}

    ManifoldSpec parse() {
        skip_spaces();
        ManifoldSpec out = expr();
        skip_spaces();
        if (pos_ < text_.size()) throw SpecSyntaxError(std::string("unexpected character '") + text_[pos_] + "'", pos_);
        return out;
    }

private:
    void skip_spaces() {
        while (pos_ < text_.size() && text_[pos_] == ' ') ++pos_;
    }

    // factor (" x " factor)*
    ManifoldSpec expr() {
        std::vector<ManifoldSpec> factors;
        factors.push_back(factor());
        for (;;) {
            const std::size_t before = pos_;
            skip_spaces();
            if (pos_ >= text_.size() || text_[pos_] == ')') {
                pos_ = before;
                break;
            }
            if (text_[pos_] != 'x' || pos_ == before) throw SpecSyntaxError("expected ' x '", pos_);
            ++pos_;
            const std::size_t after = pos_;
            skip_spaces();
            if (pos_ == after) throw SpecSyntaxError("expected ' x '", pos_);
            factors.push_back(factor());
        }
        return ManifoldSpec::product(std::move(factors));
    }

    // "S"<int> | "T"<int> | "(" expr ")"
    ManifoldSpec factor() {
        const std::size_t start = pos_;
        if (pos_ >= text_.size()) throw SpecSyntaxError("expected factor 'S<d>' or 'T<n>'", pos_);
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            ManifoldSpec inner = expr();
            if (pos_ >= text_.size() || text_[pos_] != ')') throw SpecSyntaxError("expected ')'", pos_);
            ++pos_;
            return inner;
        }
        if (c != 'S' && c != 'T') throw SpecSyntaxError(std::string("unexpected character '") + c + "'", pos_);
        ++pos_;
        const std::size_t digits = pos_;
        long value = 0;
        while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') {
            value = value * 10 + (text_[pos_] - '0');
            if (value > 100000) throw SpecSyntaxError("dimension too large", start);
            ++pos_;
        }
        if (pos_ == digits) throw SpecSyntaxError("expected dimension after '" + std::string(1, c) + "'", pos_);
        if (value == 0) throw SpecSyntaxError("dimension must be positive", start);
        return c == 'S' ? ManifoldSpec::sphere(static_cast<int>(value)) : ManifoldSpec::torus(static_cast<int>(value));
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

ManifoldSpec parse_spec(std::string_view text) { return SpecParser(text).parse(); }

}  // namespace speclab
