#ifndef JETFORGE_PROBLEM_HPP
#define JETFORGE_PROBLEM_HPP

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "jetforge/invariants.hpp"
#include "jetforge/parser.hpp"

namespace jetforge {

using Json = nlohmann::ordered_json;

// A problem file: the chart, the acting pseudo-algebra, and sampling
// parameters. Expressions are parsed eagerly so every error points at its
// JSON path.
struct ProblemSpec {
    std::string name;
    std::string mode;          // "sections" | "structure"
    std::vector<std::string> independents;
    std::vector<std::string> dependents;  // sections mode only
    std::string algebra_type;  // "finite_basis" | "lie_equation"
    std::vector<std::vector<Expr>> generators;  // finite_basis: parsed rows
    std::optional<StructureField> structure;    // structure mode
    std::uint32_t lie_order = 1;                // lie_equation system order
    std::uint32_t max_order = 2;
    std::uint64_t seed = 0;
    std::size_t samples = 10;

    JetSpec section_spec() const {
        if (mode != "sections") throw SchemaError("not a sections-mode problem");
        return JetSpec(independents, dependents);
    }

    std::vector<VectorField> section_generators() const {
        JetSpec spec = section_spec();
        std::size_t n = independents.size();
        std::vector<VectorField> out;
        for (const auto& row : generators)
            out.emplace_back(spec,
                             std::vector<Expr>(row.begin(), row.begin() + static_cast<long>(n)),
                             std::vector<Expr>(row.begin() + static_cast<long>(n), row.end()));
        return out;
    }

    std::vector<BaseField> base_generators() const {
        if (mode != "structure") throw SchemaError("not a structure-mode problem");
        std::vector<BaseField> out;
        for (const auto& row : generators) out.emplace_back(independents, row);
        return out;
    }

    // The acting pseudo-algebra as an orbit distribution at jet order k.
    DistributionFrame distribution(std::uint32_t k) const {
        if (algebra_type == "finite_basis") {
            if (mode == "sections") return build_distribution(section_generators(), k, seed);
            return build_distribution(base_generators(), structure->type, k, seed);
        }
        LinearJetSystem sys = lie_equation(*structure, lie_order);
        return build_distribution(sys, StructureAction{independents, structure->type}, k);
    }

    // Chart of the jet space the distribution lives on.
    JetSpec effective_spec() const {
        if (mode == "sections") return section_spec();
        return JetSpec(independents, tensor_component_names(structure->type, independents.size()));
    }
};

namespace detail {

inline SchemaError at_path(const std::string& path, const std::string& msg) {
    return SchemaError(path + ": " + msg);
}

inline const Json& need(const Json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) throw at_path(path + "/" + key, "missing required field");
    return j.at(key);
}

inline std::string need_string(const Json& j, const std::string& path, const char* key) {
    const Json& v = need(j, path, key);
    if (!v.is_string()) throw at_path(path + "/" + key, "expected a string");
    return v.get<std::string>();
}

inline std::vector<std::string> need_name_list(const Json& j, const std::string& path,
                                               const char* key) {
    const Json& v = need(j, path, key);
    if (!v.is_array() || v.empty())
        throw at_path(path + "/" + key, "expected a non-empty array of names");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_string())
            throw at_path(path + "/" + key + "/" + std::to_string(i), "expected a string");
        out.push_back(v[i].get<std::string>());
    }
    return out;
}

template <class T>
T get_integer(const Json& j, const std::string& path, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    const Json& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw at_path(path + "/" + key, "expected a non-negative integer");
    return static_cast<T>(v.get<long long>());
}

inline Expr parse_at(const std::string& text, const Vocabulary& vocab,
                     const std::string& path) {
    try {
        return parse(text, vocab);
    } catch (const InputError& e) {
        throw at_path(path, std::string("bad expression '") + text + "': " + e.what());
    }
}

inline Symmetry symmetry_from(const std::string& s, const std::string& path) {
    if (s == "none") return Symmetry::none;
    if (s == "symmetric") return Symmetry::symmetric;
    if (s == "antisymmetric") return Symmetry::antisymmetric;
    throw at_path(path, "symmetry must be one of none, symmetric, antisymmetric");
}

} // namespace detail

inline ProblemSpec load_problem_json(const Json& j) {
    ProblemSpec p;
    p.name = j.contains("name") ? detail::need_string(j, "", "name") : "unnamed";
    p.mode = detail::need_string(j, "", "mode");
    if (p.mode != "sections" && p.mode != "structure")
        throw detail::at_path("/mode", "must be \"sections\" or \"structure\"");
    p.independents = detail::need_name_list(j, "", "independents");

    Vocabulary base_vocab;
    for (std::size_t i = 0; i < p.independents.size(); ++i)
        base_vocab.add(intern_base(p.independents[i], static_cast<std::uint32_t>(i)));

    Vocabulary gen_vocab = base_vocab;
    std::size_t gen_width = p.independents.size();
    if (p.mode == "sections") {
        p.dependents = detail::need_name_list(j, "", "dependents");
        JetSpec spec(p.independents, p.dependents);
        gen_vocab = spec.vocab(0);
        gen_width += p.dependents.size();
    } else {
        if (j.contains("dependents"))
            throw detail::at_path("/dependents", "not allowed in structure mode");
        const Json& st = detail::need(j, "", "structure");
        const Json& tt = detail::need(st, "/structure", "tensor_type");
        TensorType type{
            detail::get_integer<std::size_t>(tt, "/structure/tensor_type", "contravariant", 0),
            detail::get_integer<std::size_t>(tt, "/structure/tensor_type", "covariant", 0),
            tt.contains("symmetry")
                ? detail::symmetry_from(detail::need_string(tt, "/structure/tensor_type", "symmetry"),
                                        "/structure/tensor_type/symmetry")
                : Symmetry::none};
        const Json& comps = detail::need(st, "/structure", "components");
        if (!comps.is_array())
            throw detail::at_path("/structure/components", "expected an array");
        std::size_t want = tensor_fiber_dim(type, p.independents.size());
        if (comps.size() != want)
            throw detail::at_path("/structure/components",
                                  "expected " + std::to_string(want) +
                                      " independent components for this tensor type, got " +
                                      std::to_string(comps.size()));
        std::vector<Expr> parsed;
        for (std::size_t i = 0; i < comps.size(); ++i) {
            if (!comps[i].is_string())
                throw detail::at_path("/structure/components/" + std::to_string(i),
                                      "expected an expression string");
            parsed.push_back(detail::parse_at(comps[i].get<std::string>(), base_vocab,
                                              "/structure/components/" + std::to_string(i)));
        }
        p.structure.emplace(p.independents, type, std::move(parsed));
    }

    const Json& pa = detail::need(j, "", "pseudo_algebra");
    p.algebra_type = detail::need_string(pa, "/pseudo_algebra", "type");
    if (p.algebra_type == "finite_basis") {
        const Json& gens = detail::need(pa, "/pseudo_algebra", "generators");
        if (!gens.is_array() || gens.empty())
            throw detail::at_path("/pseudo_algebra/generators",
                                  "expected a non-empty array of generator rows");
        for (std::size_t g = 0; g < gens.size(); ++g) {
            std::string gp = "/pseudo_algebra/generators/" + std::to_string(g);
            if (!gens[g].is_array() || gens[g].size() != gen_width)
                throw detail::at_path(gp, "expected " + std::to_string(gen_width) +
                                              " component strings");
            std::vector<Expr> row;
            for (std::size_t c = 0; c < gens[g].size(); ++c) {
                if (!gens[g][c].is_string())
                    throw detail::at_path(gp + "/" + std::to_string(c),
                                          "expected an expression string");
                row.push_back(detail::parse_at(gens[g][c].get<std::string>(), gen_vocab,
                                               gp + "/" + std::to_string(c)));
            }
            p.generators.push_back(std::move(row));
        }
    } else if (p.algebra_type == "lie_equation") {
        if (p.mode != "structure")
            throw detail::at_path("/pseudo_algebra/type",
                                  "lie_equation requires structure mode");
        p.lie_order =
            detail::get_integer<std::uint32_t>(pa, "/pseudo_algebra", "order", 1);
        if (p.lie_order < 1)
            throw detail::at_path("/pseudo_algebra/order", "must be at least 1");
    } else {
        throw detail::at_path("/pseudo_algebra/type",
                              "must be \"finite_basis\" or \"lie_equation\"");
    }

    p.max_order = detail::get_integer<std::uint32_t>(j, "", "max_order", 2);
    p.seed = detail::get_integer<std::uint64_t>(j, "", "seed", 0);
    p.samples = detail::get_integer<std::size_t>(j, "", "samples", 10);
    if (p.samples < 1) throw detail::at_path("/samples", "must be at least 1");
    return p;
}

inline ProblemSpec load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open problem file '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(path + ": " + e.what());
    }
    return load_problem_json(j);
}

// Echo of the loaded problem; loading the echo reproduces the spec.
inline Json problem_echo(const ProblemSpec& p) {
    Json j;
    j["name"] = p.name;
    j["mode"] = p.mode;
    j["independents"] = p.independents;
    if (p.mode == "sections") j["dependents"] = p.dependents;
    if (p.structure) {
        Json tt;
        tt["contravariant"] = p.structure->type.contravariant;
        tt["covariant"] = p.structure->type.covariant;
        tt["symmetry"] = p.structure->type.sym == Symmetry::none ? "none"
                         : p.structure->type.sym == Symmetry::symmetric
                             ? "symmetric"
                             : "antisymmetric";
        Json comps = Json::array();
        for (const auto& e : p.structure->comps) comps.push_back(print_expr(e));
        j["structure"] = Json{{"tensor_type", tt}, {"components", comps}};
    }
    Json pa;
    pa["type"] = p.algebra_type;
    if (p.algebra_type == "finite_basis") {
        Json gens = Json::array();
        for (const auto& row : p.generators) {
            Json r = Json::array();
            for (const auto& e : row) r.push_back(print_expr(e));
            gens.push_back(r);
        }
        pa["generators"] = gens;
    } else {
        pa["order"] = p.lie_order;
    }
    j["pseudo_algebra"] = pa;
    j["max_order"] = p.max_order;
    j["seed"] = p.seed;
    j["samples"] = p.samples;
    return j;
}

} // namespace jetforge

#endif
