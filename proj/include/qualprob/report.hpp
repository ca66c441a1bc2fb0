#pragma once

#include <sstream>
#include <string>

#include "json.hpp"
#include "qualprob/axioms.hpp"
#include "qualprob/credal.hpp"
#include "qualprob/realize.hpp"

namespace qualprob {

using Json = nlohmann::ordered_json;

/// Version of every JSON document produced by the CLI and the service.
inline constexpr int kSchemaVersion = 1;

namespace report {

inline Json rational(const Rational& r) { return r.str(); }

inline Json event(const Event& e) { return format_event(e); }

inline Json judgment(const Judgment& j) {
  return Json{{"id", j.id}, {"lhs", event(j.lhs)}, {"rel", relation_symbol(j.rel)}, {"rhs", event(j.rhs)}};
}

inline Json distribution(const Distribution& p) {
  Json out = Json::object();
  for (std::size_t w = 0; w < p.masses().size(); ++w) out[p.space()->world_label(w)] = rational(p.mass(w));
  return out;
}

inline Json verdict(const Verdict& v) {
  Json out{{"pass", v.pass}};
  if (v.sampled) out["sampled"] = true;
  if (!v.note.empty()) out["note"] = v.note;
  if (v.witness) {
    Json events = Json::object();
    for (const auto& [role, e] : v.witness->events) events[role] = event(e);
    Json w{{"events", events}};
    if (!v.witness->judgment_ids.empty()) w["judgments"] = v.witness->judgment_ids;
    if (!v.witness->detail.empty()) w["detail"] = v.witness->detail;
    out["witness"] = std::move(w);
  }
  return out;
}

template <typename Report>
Json verdicts(const Report& r) {
  Json out = Json::object();
  for (const auto& [axiom, v] : r.verdicts) out[std::string(axiom_name(axiom))] = verdict(v);
  return out;
}

inline Json axioms(const AxiomReport& r) {
  Json out{{"all_pass", r.all_pass()}, {"verdicts", verdicts(r)}};
  if (r.coverage) out["coverage"] = rational(*r.coverage);
  return out;
}

inline Json conditional(const ConditionalReport& r) {
  return Json{{"all_pass", r.all_pass()}, {"verdicts", verdicts(r)}};
}

inline Json realization(const RealizeOutcome& out) {
  if (const auto* r = std::get_if<Realization>(&out)) {
    return Json{{"realizable", true}, {"margin", rational(r->margin)}, {"distribution", distribution(r->distribution)}};
  }
  const auto& nr = std::get<NonRealizable>(out);
  Json cert = Json::array();
  for (const auto& c : nr.certificate) {
    Json j = judgment(c.judgment);
    j["multiplier"] = rational(c.multiplier);
    cert.push_back(std::move(j));
  }
  return Json{{"realizable", false}, {"uses_normalization", nr.uses_normalization}, {"certificate", cert}};
}

inline Json bounds(const Bounds& b) {
  return Json{{"lower", rational(b.lower)},
              {"upper", rational(b.upper)},
              {"attained_lower", b.attained_lower},
              {"attained_upper", b.attained_upper}};
}

inline Json entailment(const Entailment& e) {
  Json out{{"always", e.always}, {"minimum", rational(e.minimum)}};
  if (e.witness) out["witness"] = distribution(*e.witness);
  return out;
}

inline Json error(const Error& e) {
  Json out{{"error", error_code_name(e.code())}, {"message", e.what()}};
  if (e.offset()) out["offset"] = *e.offset();
  return out;
}

// ---------------------------------------------------------------------------
// Plain text. One fact per line, stable across runs.

inline std::string verdict_text(std::string_view name, const Verdict& v) {
  std::ostringstream os;
  os << name << ": " << (v.pass ? "PASS" : "FAIL");
  if (v.sampled) os << " (sampled)";
  if (v.witness) {
    os << "  [";
    bool first = true;
    for (const auto& [role, e] : v.witness->events) {
      os << (first ? "" : " ") << role << "=" << format_event(e);
      first = false;
    }
    for (const auto& id : v.witness->judgment_ids) {
      os << (first ? "" : " ") << id;
      first = false;
    }
    os << "]";
    if (!v.witness->detail.empty()) os << " " << v.witness->detail;
  }
  if (!v.note.empty()) os << "  -- " << v.note;
  return os.str();
}

template <typename Report>
std::string verdicts_text(const Report& r) {
  std::string out;
  for (const auto& [axiom, v] : r.verdicts) out += verdict_text(axiom_name(axiom), v) + "\n";
  return out;
}

inline std::string distribution_text(const Distribution& p) {
  std::string out;
  for (std::size_t w = 0; w < p.masses().size(); ++w) {
    out += "  p(" + p.space()->world_label(w) + ") = " + p.mass(w).str() + "\n";
  }
  return out;
}

inline std::string realization_text(const RealizeOutcome& out) {
  if (const auto* r = std::get_if<Realization>(&out)) {
    return "realizable: yes\nmargin: " + r->margin.str() + "\n" + distribution_text(r->distribution);
  }
  const auto& nr = std::get<NonRealizable>(out);
  std::string s = "realizable: no\ncertificate:";
  s += nr.uses_normalization ? " (with sum p = 1)\n" : "\n";
  for (const auto& c : nr.certificate) {
    s += "  " + c.multiplier.str() + " x " + c.judgment.id + ": " + format_event(c.judgment.lhs) + " " +
         std::string(relation_symbol(c.judgment.rel)) + " " + format_event(c.judgment.rhs) + "\n";
  }
  return s;
}

inline std::string bounds_text(const Bounds& b) {
  return b.lower.str() + " " + b.upper.str() + "\nattained: lower " + (b.attained_lower ? "true" : "false") +
         ", upper " + (b.attained_upper ? "true" : "false") + "\n";
}

inline std::string entailment_text(const Entailment& e) {
  std::string s = std::string("entailed: ") + (e.always ? "always" : "not always") + "\nminimum: " + e.minimum.str() + "\n";
  if (e.witness) s += "counterexample:\n" + distribution_text(*e.witness);
  return s;
}

}  // namespace report
}  // namespace qualprob
