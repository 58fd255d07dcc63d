#pragma once

// JSON forms of marginals, DGPs, families and acts.
//
//   marginal : [p_0, ..., p_{d-1}]  or a number p (binary, P(outcome 1) = p)
//   dgp      : {"prefix": [marginal...], "tail": {"iid": marginal} | {"periodic": [marginal...]}}
//              or a bare marginal (i.i.d.)
//   box      : {"lo": [...], "hi": [...]}  or [lo, hi] (binary, bounds on outcome 1)
//   family   : {"box": {"prefix": [box...], "cycle": [box...]}} | {"box": box}
//              {"explicit": [dgp...]} | {"vertex": [marginal...]} | {"union": [family...]}
//   act      : [u_0, ..., u_{d^K-1}] (K inferred) or {"horizon": K, "payoff": [...]}

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <type_traits>
#include <variant>
#include <vector>

#include "json.hpp"
#include "robust/decision.hpp"
#include "robust/dgp.hpp"
#include "robust/error.hpp"
#include "robust/family.hpp"

namespace robust::io {

using json = nlohmann::json;

/// Config error tagged with the JSON path of the offending value.
class FieldError : public Error {
public:
    FieldError(std::string path, const std::string& what)
        : Error(Errc::Config, "field '" + path + "': " + what), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

namespace detail {

inline double number(const json& j, const std::string& path) {
    if (!j.is_number()) throw FieldError(path, "expected a number");
    return j.get<double>();
}

inline const json& array(const json& j, const std::string& path) {
    if (!j.is_array()) throw FieldError(path, "expected an array");
    return j;
}

/// Re-tags library validation errors with the field path.
template <class F> auto at_path(const std::string& path, F&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const FieldError&) {
        throw;
    } catch (const Error& e) {
        throw FieldError(path, e.what());
    }
}

} // namespace detail

inline Marginal marginal_from_json(const json& j, std::size_t d, const std::string& path) {
    return detail::at_path(path, [&] {
        if (j.is_number()) {
            if (d != 2) throw FieldError(path, "scalar shorthand needs two outcomes");
            return Marginal::bernoulli(j.get<double>());
        }
        detail::array(j, path);
        if (j.size() != d) throw FieldError(path, "expected " + std::to_string(d) + " probabilities");
        std::vector<double> p;
        for (std::size_t k = 0; k < j.size(); ++k) p.push_back(detail::number(j[k], path + "[" + std::to_string(k) + "]"));
        return Marginal(std::move(p));
    });
}

inline std::vector<Marginal> marginals_from_json(const json& j, std::size_t d, const std::string& path) {
    detail::array(j, path);
    std::vector<Marginal> out;
    for (std::size_t k = 0; k < j.size(); ++k) out.push_back(marginal_from_json(j[k], d, path + "[" + std::to_string(k) + "]"));
    return out;
}

inline IndependentDgp dgp_from_json(const json& j, std::size_t d, const std::string& path) {
    if (!j.is_object()) return IndependentDgp::iid(marginal_from_json(j, d, path));
    return detail::at_path(path, [&] {
        std::vector<Marginal> prefix;
        if (j.contains("prefix")) prefix = marginals_from_json(j["prefix"], d, path + ".prefix");
        if (!j.contains("tail")) throw FieldError(path + ".tail", "missing");
        const json& t = j["tail"];
        if (t.contains("iid")) return IndependentDgp(std::move(prefix), {marginal_from_json(t["iid"], d, path + ".tail.iid")}, true);
        if (t.contains("periodic")) {
            auto cyc = marginals_from_json(t["periodic"], d, path + ".tail.periodic");
            if (cyc.empty()) throw FieldError(path + ".tail.periodic", "needs at least one marginal");
            return IndependentDgp(std::move(prefix), std::move(cyc));
        }
        throw FieldError(path + ".tail", "expected {\"iid\": ...} or {\"periodic\": [...]}");
    });
}

inline MarginalBox box_from_json(const json& j, std::size_t d, const std::string& path) {
    return detail::at_path(path, [&] {
        if (j.is_array()) {
            if (d != 2 || j.size() != 2) throw FieldError(path, "[lo, hi] shorthand needs two outcomes");
            return MarginalBox::binary(detail::number(j[0], path + "[0]"), detail::number(j[1], path + "[1]"));
        }
        if (!j.is_object() || !j.contains("lo") || !j.contains("hi")) throw FieldError(path, "expected {\"lo\": [...], \"hi\": [...]}");
        std::vector<double> lo, hi;
        for (const auto& v : detail::array(j["lo"], path + ".lo")) lo.push_back(detail::number(v, path + ".lo"));
        for (const auto& v : detail::array(j["hi"], path + ".hi")) hi.push_back(detail::number(v, path + ".hi"));
        if (lo.size() != d || hi.size() != d) throw FieldError(path, "bounds need " + std::to_string(d) + " entries");
        return MarginalBox(std::move(lo), std::move(hi));
    });
}

inline DgpFamily family_from_json(const json& j, std::size_t d, const std::string& path) {
    if (!j.is_object() || j.size() != 1) throw FieldError(path, "expected one of box, explicit, vertex, union");
    return detail::at_path(path, [&]() -> DgpFamily {
        if (j.contains("box")) {
            const json& b = j["box"];
            const std::string p = path + ".box";
            if (b.is_object() && (b.contains("cycle") || b.contains("prefix"))) {
                std::vector<MarginalBox> prefix, cycle;
                if (b.contains("prefix"))
                    for (std::size_t k = 0; k < detail::array(b["prefix"], p + ".prefix").size(); ++k)
                        prefix.push_back(box_from_json(b["prefix"][k], d, p + ".prefix[" + std::to_string(k) + "]"));
                if (!b.contains("cycle")) throw FieldError(p + ".cycle", "missing");
                for (std::size_t k = 0; k < detail::array(b["cycle"], p + ".cycle").size(); ++k)
                    cycle.push_back(box_from_json(b["cycle"][k], d, p + ".cycle[" + std::to_string(k) + "]"));
                if (cycle.empty()) throw FieldError(p + ".cycle", "needs at least one box");
                return DgpFamily(BoxFamily(std::move(prefix), std::move(cycle)));
            }
            return DgpFamily(BoxFamily::iid(box_from_json(b, d, p)));
        }
        if (j.contains("explicit")) {
            std::vector<IndependentDgp> ms;
            const json& e = detail::array(j["explicit"], path + ".explicit");
            for (std::size_t k = 0; k < e.size(); ++k)
                ms.push_back(dgp_from_json(e[k], d, path + ".explicit[" + std::to_string(k) + "]"));
            if (ms.empty()) throw FieldError(path + ".explicit", "needs at least one member");
            return DgpFamily(ExplicitSet{std::move(ms)});
        }
        if (j.contains("vertex")) {
            auto vs = marginals_from_json(j["vertex"], d, path + ".vertex");
            if (vs.empty()) throw FieldError(path + ".vertex", "needs at least one marginal");
            return DgpFamily(VertexFamily{std::move(vs)});
        }
        if (j.contains("union")) {
            std::vector<DgpFamily> bs;
            const json& u = detail::array(j["union"], path + ".union");
            for (std::size_t k = 0; k < u.size(); ++k)
                bs.push_back(family_from_json(u[k], d, path + ".union[" + std::to_string(k) + "]"));
            return DgpFamily(UnionFamily{d, std::move(bs)});
        }
        throw FieldError(path, "expected one of box, explicit, vertex, union");
    });
}

inline Act act_from_json(const json& j, std::size_t d, const std::string& path) {
    return detail::at_path(path, [&] {
        const json& table = j.is_object() ? j.at("payoff") : j;
        std::vector<double> u;
        for (const auto& v : detail::array(table, path)) u.push_back(detail::number(v, path));
        std::size_t K = 0, n = 1;
        if (j.is_object() && j.contains("horizon")) {
            K = j["horizon"].get<std::size_t>();
        } else {
            while (n < u.size()) {
                n *= d;
                ++K;
            }
        }
        return Act(d, std::max<std::size_t>(K, 1), std::move(u));
    });
}

// --- writers -------------------------------------------------------------

inline json to_json(const Marginal& p) { return p.vec(); }

inline json to_json(const IndependentDgp& P) {
    json j;
    json prefix = json::array();
    for (const auto& m : P.prefix()) prefix.push_back(to_json(m));
    j["prefix"] = prefix;
    if (P.iid_tail()) {
        j["tail"] = {{"iid", to_json(P.cycle().front())}};
    } else {
        json cyc = json::array();
        for (const auto& m : P.cycle()) cyc.push_back(to_json(m));
        j["tail"] = {{"periodic", cyc}};
    }
    return j;
}

inline json to_json(const MarginalBox& b) { return {{"lo", b.lo()}, {"hi", b.hi()}}; }

inline json to_json(const DgpFamily& F) {
    return std::visit(
        [](const auto& f) -> json {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, BoxFamily>) {
                json prefix = json::array(), cycle = json::array();
                for (const auto& b : f.prefix) prefix.push_back(to_json(b));
                for (const auto& b : f.cycle) cycle.push_back(to_json(b));
                return {{"box", {{"prefix", prefix}, {"cycle", cycle}}}};
            } else if constexpr (std::is_same_v<T, ExplicitSet>) {
                json ms = json::array();
                for (const auto& P : f.members) ms.push_back(to_json(P));
                return {{"explicit", ms}};
            } else if constexpr (std::is_same_v<T, VertexFamily>) {
                json vs = json::array();
                for (const auto& v : f.vertices) vs.push_back(to_json(v));
                return {{"vertex", vs}};
            } else if constexpr (std::is_same_v<T, ConstrainedFamily>) {
                json cs = json::array();
                for (const auto& c : f.constraints) {
                    const char* kind = c.kind == AverageConstraint::Kind::Ball        ? "ball"
                                       : c.kind == AverageConstraint::Kind::Ellipsoid ? "ellipsoid"
                                                                                      : "bonferroni";
                    cs.push_back({{"kind", kind}, {"n", c.n}, {"phi", to_json(c.phi)}, {"level", c.level}});
                }
                return {{"constrained", {{"base", to_json(DgpFamily(f.base))}, {"constraints", cs}}}};
            } else {
                json bs = json::array();
                for (const auto& b : f.branches) bs.push_back(to_json(b));
                return {{"union", bs}};
            }
        },
        F.v);
}

inline json to_json(const Act& f) { return {{"horizon", f.horizon}, {"payoff", f.payoff}}; }

inline json to_json(const DecisionProblem& D) {
    json acts = json::array();
    for (const auto& f : D.acts) acts.push_back(to_json(f));
    return {{"origin", D.origin}, {"acts", acts}};
}

inline json to_json(const SquareMatrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.dim(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < m.dim(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

} // namespace robust::io
