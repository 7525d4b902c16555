#ifndef FLOWTREE_FUNCTION_HPP
#define FLOWTREE_FUNCTION_HPP

#include <vector>

#include "rational.hpp"
#include "tree.hpp"

namespace flowtree {

/// Exact-rational-valued function on the window's vertices, default 0.
class VertexFunction {
public:
    explicit VertexFunction(const TreeWindow& w) : window_(&w), values_(w.size(), Rat(0)) {}

    const TreeWindow& window() const { return *window_; }
    const Rat& operator[](VertexId v) const { return values_[v]; }
    Rat& operator[](VertexId v) { return values_[v]; }
    std::size_t size() const { return values_.size(); }

    bool is_zero() const {
        for (const auto& x : values_)
            if (x != 0) return false;
        return true;
    }

    bool is_constant() const {
        for (const auto& x : values_)
            if (x != values_.front()) return false;
        return true;
    }

    std::vector<VertexId> support() const {
        std::vector<VertexId> s;
        for (VertexId v = 0; v < values_.size(); ++v)
            if (values_[v] != 0) s.push_back(v);
        return s;
    }

    VertexFunction abs() const {
        VertexFunction g(*window_);
        for (VertexId v = 0; v < values_.size(); ++v) g[v] = rat_abs(values_[v]);
        return g;
    }

    VertexFunction pow(unsigned p) const {
        VertexFunction g(*window_);
        for (VertexId v = 0; v < values_.size(); ++v) g[v] = rat_pow(rat_abs(values_[v]), p);
        return g;
    }

    VertexFunction& operator+=(const VertexFunction& o) {
        for (VertexId v = 0; v < values_.size(); ++v) values_[v] += o[v];
        return *this;
    }
    VertexFunction& operator-=(const VertexFunction& o) {
        for (VertexId v = 0; v < values_.size(); ++v) values_[v] -= o[v];
        return *this;
    }
    VertexFunction& operator*=(const Rat& c) {
        for (auto& x : values_) x *= c;
        return *this;
    }
    friend VertexFunction operator+(VertexFunction a, const VertexFunction& b) { return a += b; }
    friend VertexFunction operator-(VertexFunction a, const VertexFunction& b) { return a -= b; }
    friend bool operator==(const VertexFunction& a, const VertexFunction& b) {
        return a.values_ == b.values_;
    }

    Rat max_abs() const {
        Rat m = 0;
        for (const auto& x : values_) m = std::max(m, rat_abs(x));
        return m;
    }

private:
    const TreeWindow* window_;
    std::vector<Rat> values_;
};

} // namespace flowtree

#endif
