#pragma once

// JSON and CSV serialization for designs, certificates, family specs,
// sweep tables and concentration reports.

#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mtlab/bubble.hpp"
#include "mtlab/errors.hpp"
#include "mtlab/moment_design.hpp"
#include "mtlab/mt_lab.hpp"

namespace mtlab {

using ojson = nlohmann::ordered_json;

inline ojson point_json(const SpherePoint& p) {
  ojson a = ojson::array();
  for (Eigen::Index i = 0; i < p.coords().size(); ++i) a.push_back(p.coords()[i]);
  return a;
}

inline SpherePoint point_from_json(const ojson& j, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n + 1)
    throw DomainError("json: point must be an array of n+1 numbers");
  Eigen::VectorXd v(n + 1);
  for (int i = 0; i <= n; ++i) {
    if (!j[i].is_number()) throw DomainError("json: point coordinates must be numbers");
    v[i] = j[i].get<double>();
  }
  if (std::abs(v.norm() - 1.0) > 1e-9) throw DomainError("json: point is not of unit norm");
  return SpherePoint(v);
}

namespace detail {

inline const ojson& require(const ojson& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw DomainError(std::string("json: missing field \"") + key + "\"");
  return j.at(key);
}

inline int require_int(const ojson& j, const char* key) {
  const ojson& v = require(j, key);
  if (!v.is_number_integer()) throw DomainError(std::string("json: field \"") + key + "\" must be an integer");
  return v.get<int>();
}

inline double require_double(const ojson& j, const char* key) {
  const ojson& v = require(j, key);
  if (!v.is_number()) throw DomainError(std::string("json: field \"") + key + "\" must be a number");
  return v.get<double>();
}

inline std::vector<double> require_doubles(const ojson& j, const char* key) {
  const ojson& v = require(j, key);
  if (!v.is_array()) throw DomainError(std::string("json: field \"") + key + "\" must be an array");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw DomainError(std::string("json: field \"") + key + "\" must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

inline std::vector<SpherePoint> require_points(const ojson& j, const char* key, int n) {
  const ojson& v = require(j, key);
  if (!v.is_array()) throw DomainError(std::string("json: field \"") + key + "\" must be an array");
  std::vector<SpherePoint> out;
  for (const auto& p : v) out.push_back(point_from_json(p, n));
  return out;
}

}  // namespace detail

inline ojson design_json(const MomentDesign& d) {
  ojson j;
  j["n"] = d.n;
  j["m"] = d.m;
  j["points"] = ojson::array();
  for (const auto& p : d.points) j["points"].push_back(point_json(p));
  j["weights"] = d.weights;
  j["residual"] = d.residual;
  return j;
}

/// Parses a design and checks its weight invariants; the residual is recomputed.
inline MomentDesign design_from_json(const ojson& j) {
  MomentDesign d;
  d.n = detail::require_int(j, "n");
  d.m = detail::require_int(j, "m");
  if (d.n < 1) throw DomainError("design: require n >= 1");
  d.points = detail::require_points(j, "points", d.n);
  d.weights = detail::require_doubles(j, "weights");
  check_design_shape(d);
  d.residual = moment_residual(d);
  return d;
}

inline ojson certificate_json(const std::optional<InfeasibilityCertificate>& cert) {
  ojson j;
  if (!cert) {
    j["certificate"] = nullptr;
    return j;
  }
  j["n"] = cert->n;
  j["m"] = cert->m;
  j["points"] = ojson::array();
  for (const auto& p : cert->points) j["points"].push_back(point_json(p));
  j["xi"] = std::vector<double>(cert->xi.data(), cert->xi.data() + cert->xi.size());
  j["witness_value"] = cert->witness_value;
  j["max_witness_at_points"] = cert->max_witness_at_points();
  j["verified"] = cert->verify();
  return j;
}

struct FamilySpec {
  int n = 2;
  std::vector<SpherePoint> centers;
  std::vector<double> nu;
  double delta = kDefaultDelta;
  double eps = 1e-3;
  int m = 0;

  BubbleFamily family(double e) const {
    BubbleFamily f;
    f.n = n;
    f.centers = centers;
    f.nu = nu;
    f.delta = delta;
    f.eps = e;
    f.validate();
    return f;
  }

  MomentDesign design() const {
    MomentDesign d;
    d.n = n;
    d.m = m;
    d.points = centers;
    d.weights = nu;
    check_design_shape(d);
    d.residual = moment_residual(d);
    return d;
  }
};

inline ojson family_json(const FamilySpec& s) {
  ojson j;
  j["n"] = s.n;
  j["centers"] = ojson::array();
  for (const auto& c : s.centers) j["centers"].push_back(point_json(c));
  j["nu"] = s.nu;
  j["delta"] = s.delta;
  j["eps"] = s.eps;
  j["m"] = s.m;
  return j;
}

inline FamilySpec family_from_json(const ojson& j) {
  FamilySpec s;
  s.n = detail::require_int(j, "n");
  if (s.n < 1) throw DomainError("family: require n >= 1");
  s.centers = detail::require_points(j, "centers", s.n);
  s.nu = detail::require_doubles(j, "nu");
  s.delta = detail::require_double(j, "delta");
  s.eps = detail::require_double(j, "eps");
  s.m = j.contains("m") ? detail::require_int(j, "m") : 0;
  s.family(s.eps);
  return s;
}

inline ojson report_json(const ConcentrationReport& r) {
  ojson j;
  j["eps"] = r.eps;
  j["atoms"] = ojson::array();
  for (const auto& a : r.atoms) {
    ojson atom;
    atom["point"] = point_json(a.point);
    atom["mass"] = a.mass;
    j["atoms"].push_back(atom);
  }
  j["diffuse"] = r.diffuse_mass;
  j["kappa"] = r.kappa_estimate;
  return j;
}

inline constexpr const char* kSweepHeader =
    "eps,log_integral,mean_u,energy_v,energy_u,max_moment_defect,ratio_estimate,a_estimate";

inline std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kSweepHeader << '\n';
  for (const auto& r : rows) {
    os << format_g17(r.eps) << ',' << format_g17(r.log_integral) << ',' << format_g17(r.mean_u) << ','
       << format_g17(r.energy_v) << ',' << format_g17(r.energy_u) << ',' << format_g17(r.max_moment_defect) << ','
       << format_g17(r.ratio_estimate) << ',' << format_g17(r.a_estimate) << '\n';
  }
}

inline ojson sweep_summary_json(const SweepResult& r) {
  ojson j;
  j["n"] = r.n;
  j["m"] = r.m;
  j["N"] = r.centers;
  j["delta"] = r.delta;
  j["eta_margin"] = r.eta_margin;
  j["complete"] = r.complete;
  j["failure"] = r.failure.empty() ? ojson(nullptr) : ojson(r.failure);
  j["a_estimate"] = r.rows.empty() ? ojson(nullptr) : ojson(r.a_estimate);
  j["target"] = r.target;
  j["relative_error"] = r.rows.empty() ? ojson(nullptr) : ojson(r.a_estimate / r.target - 1.0);
  j["rows"] = ojson::array();
  for (const auto& row : r.rows) {
    ojson x;
    x["eps"] = row.eps;
    x["log_integral"] = row.log_integral;
    x["mean_u"] = row.mean_u;
    x["energy_v"] = row.energy_v;
    x["energy_u"] = row.energy_u;
    x["max_moment_defect"] = row.max_moment_defect;
    x["ratio_estimate"] = row.ratio_estimate;
    x["a_estimate"] = row.a_estimate;
    x["max_beta"] = row.max_beta;
    x["c1"] = row.c1;
    j["rows"].push_back(x);
  }
  return j;
}

}  // namespace mtlab
