#pragma once

// JSON / CSV rendering of the report structs.  Numbers pass through a
// 12-significant-digit round so repeated runs and both formats agree byte
// for byte.

#include <cstdio>
#include <cstdlib>
#include <string>

#include <json.hpp>

#include "hornindex/channels.hpp"
#include "hornindex/homotopy.hpp"
#include "hornindex/index_formulas.hpp"
#include "hornindex/kernels.hpp"
#include "hornindex/oracle.hpp"
#include "hornindex/warp.hpp"

namespace hornindex {

using ordered_json = nlohmann::ordered_json;

inline std::string fmt12(double v) {
  if (v == 0.0) v = 0.0;  // strip the sign off negative zero
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline double round12(double v) { return std::strtod(fmt12(v).c_str(), nullptr); }

inline ordered_json jnum(double v) { return round12(v); }

inline std::string family_tag(Family f) { return f == Family::T ? "t" : "tilde"; }
inline std::string branch_tag(Branch b) {
  return b == Branch::FromZero ? "from_zero" : "from_one";
}

inline ordered_json json_of(const QuotientReport& r) {
  ordered_json j;
  j["alpha"] = jnum(r.alpha);
  j["quotient_dim"] = r.dim;
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.rows) {
    ordered_json e;
    e["s"] = jnum(row.s);
    e["mult"] = row.mult;
    e["family"] = family_tag(row.family);
    e["quotient"] = row.quotient;
    e["origin"] = row.origin;
    rows.push_back(e);
  }
  j["channels"] = rows;
  return j;
}

inline std::string csv_of(const QuotientReport& r) {
  std::string out = "s,mult,family,quotient,origin\n";
  for (const auto& row : r.rows)
    out += fmt12(row.s) + "," + std::to_string(row.mult) + "," +
           family_tag(row.family) + "," + (row.quotient ? "1" : "0") + "," +
           row.origin + "\n";
  return out;
}

inline ordered_json json_of(const ParametrixReport& r) {
  ordered_json j;
  j["extension"] = r.extension;
  j["alpha"] = jnum(r.alpha);
  j["eps"] = jnum(r.eps);
  j["s_max"] = jnum(r.s_max);
  j["tail_bound"] = jnum(r.tail_bound);
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.rows) {
    ordered_json e;
    e["s"] = jnum(row.s);
    e["mult"] = row.mult;
    e["family"] = family_tag(row.family);
    e["branch"] = branch_tag(row.branch);
    e["origin"] = row.origin;
    rows.push_back(e);
  }
  j["channels"] = rows;
  return j;
}

inline ordered_json json_of(const IndexReport& r) {
  ordered_json j;
  j["operator"] = r.operator_tag;
  j["extension"] = r.extension;
  j["cross_section"] = r.cross_section;
  j["alpha"] = jnum(r.alpha);
  ordered_json t;
  t["geometric_integral"] = jnum(r.terms.geometric_integral);
  t["eta_term"] = jnum(r.terms.eta_term);
  t["kernel_term"] = jnum(r.terms.kernel_term);
  t["extension_term"] = jnum(r.terms.extension_term);
  t["betti_term"] = jnum(r.terms.betti_term);
  j["terms"] = t;
  j["raw_value"] = jnum(r.raw_value);
  j["index"] = r.index;
  j["integral_ok"] = r.integral_ok;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

inline std::string csv_of(const IndexReport& r) {
  std::string out = "key,value\n";
  out += "operator," + r.operator_tag + "\n";
  out += "extension," + r.extension + "\n";
  out += "cross_section," + r.cross_section + "\n";
  out += "alpha," + fmt12(r.alpha) + "\n";
  out += "geometric_integral," + fmt12(r.terms.geometric_integral) + "\n";
  out += "eta_term," + fmt12(r.terms.eta_term) + "\n";
  out += "kernel_term," + fmt12(r.terms.kernel_term) + "\n";
  out += "extension_term," + fmt12(r.terms.extension_term) + "\n";
  out += "betti_term," + fmt12(r.terms.betti_term) + "\n";
  out += "raw_value," + fmt12(r.raw_value) + "\n";
  out += "index," + std::to_string(r.index) + "\n";
  out += std::string("integral_ok,") + (r.integral_ok ? "1" : "0") + "\n";
  return out;
}

inline ordered_json json_of(const BoundCheckReport& r) {
  ordered_json j;
  j["lemma"] = r.lemma;
  j["pass"] = r.pass;
  j["violations"] = r.violations;
  j["sample_count"] = r.samples.size();
  j["worst_margin"] = jnum(r.worst_margin);
  if (r.fitted_constant != 0.0) j["fitted_constant"] = jnum(r.fitted_constant);
  ordered_json rows = ordered_json::array();
  for (const auto& s : r.samples) {
    ordered_json e;
    e["s"] = jnum(s.s);
    if (s.x != 0.0) e["x"] = jnum(s.x);
    if (s.gb != 0.0) e["gb"] = jnum(s.gb);
    e["lhs"] = jnum(s.lhs);
    e["rhs"] = jnum(s.rhs);
    e["margin"] = jnum(s.margin);
    rows.push_back(e);
  }
  j["samples"] = rows;
  return j;
}

inline std::string csv_of(const BoundCheckReport& r) {
  std::string out = "lemma,s,x,gb,lhs,rhs,margin\n";
  for (const auto& s : r.samples)
    out += r.lemma + "," + fmt12(s.s) + "," + fmt12(s.x) + "," + fmt12(s.gb) +
           "," + fmt12(s.lhs) + "," + fmt12(s.rhs) + "," + fmt12(s.margin) + "\n";
  return out;
}

inline ordered_json json_of(const DecayFitReport& r) {
  ordered_json j;
  j["fitted_constant"] = jnum(r.fitted_constant);
  j["fitted_slope"] = jnum(r.fitted_slope);
  j["slope_floor"] = jnum(r.slope_floor);
  j["slope_pass"] = r.slope_pass;
  return j;
}

inline ordered_json json_of(const DecayReport& r) {
  ordered_json j;
  j["slope"] = jnum(r.slope);
  j["slope_floor"] = jnum(r.slope_floor);
  j["pass"] = r.pass;
  ordered_json rows = ordered_json::array();
  for (const auto& s : r.samples) {
    ordered_json e;
    e["x"] = jnum(s.first);
    e["u"] = jnum(s.second);
    rows.push_back(e);
  }
  j["samples"] = rows;
  return j;
}

inline ordered_json json_of(const PerturbationReport& r) {
  ordered_json j;
  j["value"] = jnum(r.value);
  j["value_half"] = jnum(r.value_half);
  j["scaling_ratio"] = jnum(r.scaling_ratio);
  j["ratio_bound"] = jnum(r.ratio_bound);
  j["ratio_pass"] = r.ratio_pass;
  j["eps_below_half"] = jnum(r.eps_below_half);
  j["pairs"] = r.pairs;
  return j;
}

inline ordered_json json_of(const ContinuityReport& r) {
  ordered_json j;
  j["pass"] = r.pass;
  j["monotone"] = r.monotone;
  j["minorant_c"] = jnum(r.minorant_c);
  j["w"] = jnum(r.w);
  j["vol_bound"] = jnum(r.vol_bound);
  j["delta0"] = jnum(r.delta0);
  j["s_w"] = r.s_w;
  j["fitted_L"] = jnum(r.fitted_L);
  j["contraction_samples_ok"] = r.contraction_samples_ok;
  ordered_json rows = ordered_json::array();
  for (const auto& p : r.rows) {
    ordered_json e;
    e["beta"] = jnum(p.beta);
    e["gamma"] = jnum(p.gamma);
    e["sup_hs_t"] = jnum(p.sup_hs_t);
    e["sup_hs_tilde"] = jnum(p.sup_hs_tilde);
    e["sup_hs"] = jnum(p.sup_hs);
    e["cert_ok"] = p.cert_ok;
    rows.push_back(e);
  }
  j["pairs"] = rows;
  return j;
}

inline std::string csv_of(const ContinuityReport& r) {
  std::string out = "beta,gamma,sup_hs_t,sup_hs_tilde,sup_hs,cert_ok\n";
  for (const auto& p : r.rows)
    out += fmt12(p.beta) + "," + fmt12(p.gamma) + "," + fmt12(p.sup_hs_t) +
           "," + fmt12(p.sup_hs_tilde) + "," + fmt12(p.sup_hs) + "," +
           (p.cert_ok ? "1" : "0") + "\n";
  return out;
}

inline ordered_json json_of(const StabilityReport& r) {
  ordered_json j;
  j["pass"] = r.pass;
  j["beta_count"] = r.beta_count;
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.rows) {
    ordered_json e;
    e["family"] = family_tag(row.family);
    e["s"] = jnum(row.s);
    e["mult"] = row.mult;
    e["constant"] = row.constant;
    ordered_json cs = ordered_json::array();
    for (const auto& t : row.counts) {
      ordered_json c;
      c["ker"] = t[0];
      c["coker"] = t[1];
      c["index"] = t[2];
      cs.push_back(c);
    }
    e["counts"] = cs;
    rows.push_back(e);
  }
  j["channels"] = rows;
  return j;
}

inline ordered_json json_of(const PerturbationRemovalReport& r) {
  ordered_json j;
  ordered_json mg = ordered_json::array();
  for (double m : r.mu_grid) mg.push_back(jnum(m));
  j["mu_grid"] = mg;
  j["indices"] = r.indices;
  j["constant"] = r.constant;
  j["relative_bound"] = jnum(r.relative_bound);
  return j;
}

inline ordered_json json_of(const EulerTermBreakdown& r) {
  ordered_json j;
  j["quadrature_value"] = jnum(r.quadrature_value);
  j["closed_form"] = jnum(r.closed_form);
  j["abs_diff"] = jnum(r.abs_diff);
  return j;
}

inline ordered_json json_of(const std::vector<SkipRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json e;
    e["beta"] = jnum(r.beta);
    e["euler_integral"] = jnum(r.euler_integral);
    e["gb_index"] = r.gb_index;
    arr.push_back(e);
  }
  return arr;
}

inline std::string csv_of(const std::vector<SkipRow>& rows) {
  std::string out = "beta,euler_integral,gb_index\n";
  for (const auto& r : rows)
    out += fmt12(r.beta) + "," + fmt12(r.euler_integral) + "," +
           std::to_string(r.gb_index) + "\n";
  return out;
}

inline ordered_json json_of(const FamilyValidationReport& r) {
  ordered_json j;
  j["bounds_pass"] = r.bounds_pass;
  j["min_horn_ratio"] = jnum(r.min_horn_ratio);
  j["min_inverse"] = jnum(r.min_inverse);
  j["witness_beta"] = jnum(r.witness_beta);
  j["witness_x"] = jnum(r.witness_x);
  ordered_json d = ordered_json::array();
  for (double v : r.sup_diffs) d.push_back(jnum(v));
  j["sup_diffs"] = d;
  j["sup_diffs_decreasing"] = r.sup_diffs_decreasing;
  j["fitted_lipschitz"] = jnum(r.fitted_lipschitz);
  return j;
}

inline ordered_json json_of(const UniquenessReport& r) {
  ordered_json j;
  j["unique"] = r.unique;
  j["via_curvature"] = r.via_curvature;
  j["note"] = r.note;
  return j;
}

inline ordered_json json_of(const OracleQuotientResult& r) {
  ordered_json j;
  j["dim"] = r.dim;
  j["channels_checked"] = r.channels_checked;
  j["borderline"] = r.borderline;
  return j;
}

}  // namespace hornindex
