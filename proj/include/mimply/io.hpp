#pragma once

// JSON text formats for derivations and certificates. Output is
// byte-deterministic: fixed key order, edges sorted, two-space indentation.

#include <json.hpp>

#include <stdexcept>
#include <string>

#include "mimply/derivation.hpp"
#include "mimply/rdag.hpp"

namespace mimply {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

using ojson = nlohmann::ordered_json;

inline ojson order_json(const SubformulaOrder& o) {
  ojson a = ojson::array();
  for (const auto& f : o.formulas()) a.push_back(f.str());
  return a;
}

inline SubformulaOrder order_from(const ojson& j) {
  if (!j.is_array() || j.empty()) throw FormatError("\"order\" must be a nonempty array");
  std::vector<Formula> fs;
  for (const auto& x : j) {
    if (!x.is_string()) throw FormatError("\"order\" entries must be strings");
    fs.push_back(parse_formula(x.get<std::string>()));
  }
  return SubformulaOrder::explicit_order(std::move(fs));
}

inline std::size_t index_from(const ojson& j, const char* what) {
  if (!j.is_number_unsigned()) throw FormatError(std::string(what) + " must be a nonnegative integer");
  return j.get<std::size_t>();
}

inline const ojson& field(const ojson& obj, const char* key) {
  if (!obj.is_object()) throw FormatError("expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(std::string("missing field \"") + key + "\"");
  return *it;
}

inline Rule rule_from(const std::string& s) {
  if (s == "hyp") return Rule::Hypothesis;
  if (s == "intro") return Rule::ImpIntro;
  if (s == "elim") return Rule::ImpElim;
  throw FormatError("unknown rule \"" + s + "\"");
}

template <class F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const FormatError&) {
    throw;
  } catch (const ParseError& e) {
    throw FormatError(std::string("bad formula: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  } catch (const std::out_of_range& e) {
    throw FormatError(e.what());
  }
}

}  // namespace detail

inline std::string to_json(const Derivation& d) {
  detail::ojson j;
  j["order"] = detail::order_json(d.order);
  detail::ojson nodes = detail::ojson::array();
  for (NodeId i = 0; i < d.nodes.size(); ++i) {
    const auto& n = d.nodes[i];
    detail::ojson o;
    o["id"] = i;
    o["formula"] = n.formula.str();
    o["rule"] = rule_name(n.rule);
    o["children"] = n.children;
    o["dep"] = n.dep.str();
    nodes.push_back(std::move(o));
  }
  j["nodes"] = std::move(nodes);
  j["root"] = d.root;
  return j.dump(2) + "\n";
}

/// Reads the derivation format. Shape is checked here; rule and dependency
/// correctness is left to validate_derivation.
inline Derivation derivation_from_json(const std::string& text) {
  return detail::guarded([&] {
    auto j = detail::ojson::parse(text);
    SubformulaOrder order = detail::order_from(detail::field(j, "order"));
    const auto& jn = detail::field(j, "nodes");
    if (!jn.is_array() || jn.empty()) throw FormatError("\"nodes\" must be a nonempty array");
    std::vector<NdNode> nodes;
    for (std::size_t i = 0; i < jn.size(); ++i) {
      const auto& o = jn[i];
      if (detail::index_from(detail::field(o, "id"), "id") != i) throw FormatError("node ids must be dense and listed in order");
      NdNode n{parse_formula(detail::field(o, "formula").get<std::string>()),
               detail::rule_from(detail::field(o, "rule").get<std::string>()), {}, Bitstring()};
      const auto& ch = detail::field(o, "children");
      if (!ch.is_array()) throw FormatError("\"children\" must be an array");
      for (const auto& c : ch) {
        std::size_t k = detail::index_from(c, "child id");
        if (k >= jn.size()) throw FormatError("child id out of range");
        n.children.push_back(k);
      }
      n.dep = Bitstring::from_string(detail::field(o, "dep").get<std::string>());
      nodes.push_back(std::move(n));
    }
    NodeId root = detail::index_from(detail::field(j, "root"), "root");
    if (root >= nodes.size()) throw FormatError("root out of range");
    return Derivation{std::move(order), std::move(nodes), root};
  });
}

inline std::string to_json(const RDagProof& c) {
  RDagProof s = c;
  sort_edges(s);
  detail::ojson j;
  j["order"] = detail::order_json(s.order);
  detail::ojson nodes = detail::ojson::array();
  for (NodeId v = 0; v < s.size(); ++v) {
    detail::ojson o;
    o["id"] = v;
    o["formula_index"] = s.label[v];
    nodes.push_back(std::move(o));
  }
  j["nodes"] = std::move(nodes);
  j["root"] = s.root;
  detail::ojson de = detail::ojson::array();
  for (const auto& e : s.d_edges) {
    detail::ojson o;
    o["from"] = e.from;
    o["to"] = e.to;
    if (e.bits) o["bits"] = e.bits->str();
    if (e.rho) o["rho"] = *e.rho;
    de.push_back(std::move(o));
  }
  j["d_edges"] = std::move(de);
  detail::ojson ae = detail::ojson::array();
  for (const auto& e : s.a_edges) {
    detail::ojson o;
    o["from"] = e.from;
    o["to"] = e.to;
    o["delta"] = e.delta;
    ae.push_back(std::move(o));
  }
  j["a_edges"] = std::move(ae);
  return j.dump(2) + "\n";
}

/// Reads the certificate format. Endpoints and labels are range-checked;
/// everything else is left to validate_structure.
inline RDagProof rdag_from_json(const std::string& text) {
  return detail::guarded([&] {
    auto j = detail::ojson::parse(text);
    SubformulaOrder order = detail::order_from(detail::field(j, "order"));
    const auto& jn = detail::field(j, "nodes");
    if (!jn.is_array()) throw FormatError("\"nodes\" must be an array");
    RDagProof c{std::move(order), {}, 0, {}, {}};
    for (std::size_t i = 0; i < jn.size(); ++i) {
      if (detail::index_from(detail::field(jn[i], "id"), "id") != i) throw FormatError("node ids must be dense and listed in order");
      std::size_t k = detail::index_from(detail::field(jn[i], "formula_index"), "formula_index");
      if (k >= c.order.size()) throw FormatError("formula_index out of range");
      c.label.push_back(k);
    }
    c.root = detail::index_from(detail::field(j, "root"), "root");
    if (c.root >= c.size()) throw FormatError("root out of range");
    auto node_ref = [&](const detail::ojson& o, const char* key) {
      std::size_t v = detail::index_from(detail::field(o, key), key);
      if (v >= c.size()) throw FormatError(std::string(key) + " out of range");
      return v;
    };
    const auto& de = detail::field(j, "d_edges");
    if (!de.is_array()) throw FormatError("\"d_edges\" must be an array");
    for (const auto& o : de) {
      DEdge e{node_ref(o, "from"), node_ref(o, "to"), std::nullopt, std::nullopt};
      if (auto it = o.find("bits"); it != o.end()) {
        e.bits = Bitstring::from_string(it->get<std::string>());
        if (e.bits->length() != c.order.size()) throw FormatError("bitstring length differs from the order");
      }
      if (auto it = o.find("rho"); it != o.end()) e.rho = detail::index_from(*it, "rho");
      c.d_edges.push_back(std::move(e));
    }
    const auto& ae = detail::field(j, "a_edges");
    if (!ae.is_array()) throw FormatError("\"a_edges\" must be an array");
    for (const auto& o : ae) {
      c.a_edges.push_back(AEdge{node_ref(o, "from"), node_ref(o, "to"), detail::index_from(detail::field(o, "delta"), "delta")});
    }
    return c;
  });
}

}  // namespace mimply
