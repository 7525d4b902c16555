#ifndef FLOWTREE_OPERATORS_HPP
#define FLOWTREE_OPERATORS_HPP

#include <map>
#include <utility>
#include <vector>

#include "bmo.hpp"
#include "function.hpp"
#include "measure.hpp"
#include "trapezoid.hpp"

namespace flowtree {

/// Sparse kernel K(x, y); absent entries are 0.
class Kernel {
public:
    explicit Kernel(const TreeWindow& w) : window_(&w) {}

    const TreeWindow& window() const { return *window_; }

    void set(VertexId x, VertexId y, Rat v) {
        if (x >= window_->size() || y >= window_->size())
            throw InvalidParams("kernel entry out of range");
        if (v == 0)
            entries_.erase({x, y});
        else
            entries_[{x, y}] = std::move(v);
    }

    Rat at(VertexId x, VertexId y) const {
        auto it = entries_.find({x, y});
        return it == entries_.end() ? Rat(0) : it->second;
    }

    const std::map<std::pair<VertexId, VertexId>, Rat>& entries() const { return entries_; }

    Kernel transpose() const {
        Kernel t(*window_);
        for (const auto& [xy, v] : entries_) t.entries_[{xy.second, xy.first}] = v;
        return t;
    }

private:
    const TreeWindow* window_;
    std::map<std::pair<VertexId, VertexId>, Rat> entries_;
};

/// Tf(x) = sum_y K(x,y) f(y) m(y).
inline VertexFunction apply(const FlowMeasure& m, const Kernel& K, const VertexFunction& f) {
    VertexFunction out(m.window());
    for (const auto& [xy, v] : K.entries()) out[xy.first] += v * f[xy.second] * m.mass(xy.second);
    return out;
}

struct HormanderReport {
    Rat value = 0;          // max over bands R and pairs y,z in R of the tail integral
    std::size_t excluded = 0; // bands whose star set exits the window
    Trapezoid witness{};
};

/// max over in-window admissible bands R (with R* in window) and y,z in R of
/// the integral over the complement of R* of |K(x,y) - K(x,z)|.
inline HormanderReport hormander_1star(const FlowMeasure& m, const Kernel& K,
                                       const TrapezoidFamilyConfig& cfg) {
    const TreeWindow& w = m.window();
    HormanderReport rep;
    for (const Trapezoid& R : enumerate_all(w, cfg)) {
        if (R.singleton) continue;
        if (!star_fits(w, R)) {
            ++rep.excluded;
            continue;
        }
        std::vector<bool> in_star(w.size(), false);
        for (VertexId x : star_set(w, R)) in_star[x] = true;
        auto mem = members(w, R);
        for (std::size_t i = 0; i < mem.size(); ++i)
            for (std::size_t j = i + 1; j < mem.size(); ++j) {
                Rat s = 0;
                for (VertexId x = 0; x < w.size(); ++x)
                    if (!in_star[x]) s += rat_abs(K.at(x, mem[i]) - K.at(x, mem[j])) * m.mass(x);
                if (s > rep.value) {
                    rep.value = s;
                    rep.witness = R;
                }
            }
    }
    return rep;
}

inline HormanderReport hormander_2star(const FlowMeasure& m, const Kernel& K,
                                       const TrapezoidFamilyConfig& cfg) {
    return hormander_1star(m, K.transpose(), cfg);
}

/// max over an atom corpus of ||T a||_1.
inline Rat h1_l1_probe(const FlowMeasure& m, const Kernel& K, const std::vector<Atom>& corpus) {
    if (corpus.empty()) throw EmptyCorpus("h1_l1_probe: empty atom corpus");
    Rat best = 0;
    for (const Atom& a : corpus) best = std::max(best, m.l1_norm(apply(m, K, a.values)));
    return best;
}

} // namespace flowtree

#endif
