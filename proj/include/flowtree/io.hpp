#ifndef FLOWTREE_IO_HPP
#define FLOWTREE_IO_HPP

#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "function.hpp"
#include "measure.hpp"
#include "operators.hpp"
#include "trapezoid.hpp"
#include "tree.hpp"

namespace flowtree {

/// Owning bundle of a deserialized window, flow, and family parameter.
struct TreeBundle {
    std::unique_ptr<TreeWindow> window;
    std::unique_ptr<FlowMeasure> measure;
    TrapezoidFamilyConfig cfg;
};

namespace detail {
inline nlohmann::json parse_json(const std::string& text, const std::string& what) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(what + ": " + e.what());
    }
}
inline Rat json_rat(const nlohmann::json& j, const std::string& where) {
    if (j.is_number_integer()) return Rat(j.get<long long>());
    if (!j.is_string()) throw ParseError(where + ": expected a \"num/den\" string");
    try {
        return rat_from_string(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw ParseError(where + ": " + e.what());
    }
}
} // namespace detail

/// Parses the tree-spec JSON: {beta, levels:{top,bottom},
/// vertices:[{id,parent,level,on_spine}], leaf_masses:{id:"num/den"}}.
inline TreeBundle parse_tree_spec(const std::string& text) {
    nlohmann::json j = detail::parse_json(text, "tree spec");
    TreeBundle out;
    try {
        out.cfg = TrapezoidFamilyConfig(j.at("beta").get<int>());
        int top = j.at("levels").at("top").get<int>();
        int bottom = j.at("levels").at("bottom").get<int>();
        const auto& vs = j.at("vertices");
        std::map<long long, VertexId> index;
        for (std::size_t i = 0; i < vs.size(); ++i) {
            long long id = vs[i].at("id").get<long long>();
            if (!index.emplace(id, static_cast<VertexId>(i)).second)
                throw ParseError("tree spec: duplicate vertex id " + std::to_string(id));
        }
        std::vector<VertexId> parent(vs.size());
        std::vector<int> level(vs.size());
        std::vector<VertexId> spine_raw;
        for (std::size_t i = 0; i < vs.size(); ++i) {
            const auto& v = vs[i];
            level[i] = v.at("level").get<int>();
            if (v.at("parent").is_null()) {
                parent[i] = kNoVertex;
            } else {
                long long pid = v.at("parent").get<long long>();
                auto it = index.find(pid);
                if (it == index.end())
                    throw ParseError("tree spec: vertex " + std::to_string(v.at("id").get<long long>()) +
                                     " references unknown parent " + std::to_string(pid));
                parent[i] = it->second;
            }
            if (v.value("on_spine", false)) spine_raw.push_back(static_cast<VertexId>(i));
        }
        out.window = std::make_unique<TreeWindow>(std::move(parent), std::move(level));
        if (out.window->top_level() != top || out.window->bottom_level() != bottom)
            throw ParseError("tree spec: declared level range does not match the vertices");
        if (!spine_raw.empty()) {
            std::sort(spine_raw.begin(), spine_raw.end(), [&](VertexId a, VertexId b) {
                return out.window->level(a) > out.window->level(b);
            });
            out.window->set_spine(std::move(spine_raw));
        }
        if (j.contains("vertex_masses")) {
            // full mass table: every vertex listed; the flow identity itself
            // is deliberately not enforced here (validate_flow decides later)
            std::vector<Rat> masses(out.window->size(), Rat(0));
            std::vector<bool> seen(out.window->size(), false);
            for (const auto& [key, val] : j.at("vertex_masses").items()) {
                long long id = std::stoll(key);
                auto it = index.find(id);
                if (it == index.end())
                    throw ParseError("tree spec: vertex mass for unknown vertex " + key);
                seen[it->second] = true;
                masses[it->second] = detail::json_rat(val, "tree spec vertex mass of " + key);
            }
            for (VertexId v = 0; v < out.window->size(); ++v)
                if (!seen[v])
                    throw ParseError("tree spec: vertex_masses misses vertex " + std::to_string(v));
            out.measure = std::make_unique<FlowMeasure>(
                FlowMeasure::from_vertex_masses(*out.window, std::move(masses)));
        } else {
            std::map<VertexId, Rat> leaf_mass;
            for (const auto& [key, val] : j.at("leaf_masses").items()) {
                long long id = std::stoll(key);
                auto it = index.find(id);
                if (it == index.end())
                    throw ParseError("tree spec: leaf mass for unknown vertex " + key);
                leaf_mass[it->second] = detail::json_rat(val, "tree spec leaf mass of vertex " + key);
            }
            out.measure = std::make_unique<FlowMeasure>(
                FlowMeasure::from_leaf_masses(*out.window, leaf_mass));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("tree spec: ") + e.what());
    }
    return out;
}

inline nlohmann::json emit_tree_spec(const TreeWindow& w, const FlowMeasure& m, int beta) {
    nlohmann::json j;
    j["beta"] = beta;
    j["levels"] = {{"top", w.top_level()}, {"bottom", w.bottom_level()}};
    auto vs = nlohmann::json::array();
    for (VertexId v = 0; v < w.size(); ++v) {
        nlohmann::json e;
        e["id"] = v;
        if (w.parent(v) == kNoVertex)
            e["parent"] = nullptr;
        else
            e["parent"] = w.parent(v);
        e["level"] = w.level(v);
        e["on_spine"] = w.on_spine(v);
        vs.push_back(std::move(e));
    }
    j["vertices"] = std::move(vs);
    nlohmann::json lm = nlohmann::json::object();
    for (VertexId v = 0; v < w.size(); ++v)
        if (w.is_leaf(v)) lm[std::to_string(v)] = rat_to_string(m.mass(v));
    j["leaf_masses"] = std::move(lm);
    return j;
}

/// Function spec: {values: {id: "num/den"}}, absent ids are 0.
inline VertexFunction parse_function_spec(const std::string& text, const TreeWindow& w) {
    nlohmann::json j = detail::parse_json(text, "function spec");
    VertexFunction f(w);
    try {
        for (const auto& [key, val] : j.at("values").items()) {
            long long id = std::stoll(key);
            if (id < 0 || static_cast<std::size_t>(id) >= w.size())
                throw ParseError("function spec: unknown vertex " + key);
            f[static_cast<VertexId>(id)] = detail::json_rat(val, "function spec value of " + key);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("function spec: ") + e.what());
    }
    return f;
}

inline nlohmann::json emit_function_spec(const VertexFunction& f) {
    nlohmann::json vals = nlohmann::json::object();
    for (VertexId v = 0; v < f.size(); ++v)
        if (f[v] != 0) vals[std::to_string(v)] = rat_to_string(f[v]);
    return nlohmann::json{{"values", std::move(vals)}};
}

/// Kernel spec: {entries: [[x, y, "num/den"], ...]}.
inline Kernel parse_kernel_spec(const std::string& text, const TreeWindow& w) {
    nlohmann::json j = detail::parse_json(text, "kernel spec");
    Kernel K(w);
    try {
        for (const auto& e : j.at("entries")) {
            if (!e.is_array() || e.size() != 3)
                throw ParseError("kernel spec: each entry must be [x, y, value]");
            long long x = e[0].get<long long>(), y = e[1].get<long long>();
            if (x < 0 || y < 0 || static_cast<std::size_t>(x) >= w.size() ||
                static_cast<std::size_t>(y) >= w.size())
                throw ParseError("kernel spec: entry references an unknown vertex");
            K.set(static_cast<VertexId>(x), static_cast<VertexId>(y),
                  detail::json_rat(e[2], "kernel entry"));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("kernel spec: ") + e.what());
    }
    return K;
}

inline nlohmann::json emit_kernel_spec(const Kernel& K) {
    auto entries = nlohmann::json::array();
    for (const auto& [xy, v] : K.entries())
        entries.push_back(nlohmann::json::array({xy.first, xy.second, rat_to_string(v)}));
    return nlohmann::json{{"entries", std::move(entries)}};
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << content;
}

} // namespace flowtree

#endif
