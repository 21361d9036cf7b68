#include "awstab/serialize.hpp"

#include <cmath>
#include <cstdio>

namespace awstab::serialize {

using operators::Angle;
using operators::HVec;
using operators::Operator;
using operators::SupportVec;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json complex_to_json(cd z) { return json::array({z.real(), z.imag()}); }

cd complex_from_json(const json& j) {
  if (j.is_number()) return cd(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2) return cd(j[0].get<double>(), j[1].get<double>());
  throw ValidationError("complex value must be a number or [re, im]");
}

json matrix_to_json(const CMat& m) {
  json entries = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) entries.push_back(complex_to_json(m(i, j)));
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", entries}};
}

CMat matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("entries"))
    throw ValidationError("matrix must be {rows, cols, entries}");
  auto rows = j["rows"].get<Eigen::Index>();
  auto cols = j["cols"].get<Eigen::Index>();
  if (rows < 1 || cols < 1) throw ValidationError("matrix dimensions must be positive");
  const json& e = j["entries"];
  if (!e.is_array() || (Eigen::Index)e.size() != rows * cols)
    throw ValidationError("matrix entries must be a row-major array of length rows*cols");
  CMat m(rows, cols);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = complex_from_json(e[(size_t)idx++]);
  return m;
}

json angle_to_json(const Angle& a) {
  if (a.exact) return json::array({a.exact->first, a.exact->second});
  return a.value;
}

Angle angle_from_json(const json& j) {
  if (j.is_number()) return Angle::real(j.get<double>());
  if (j.is_array() && j.size() == 2)
    return Angle::fraction(j[0].get<std::int64_t>(), j[1].get<std::int64_t>());
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    auto slash = s.find('/');
    if (slash == std::string::npos) throw ValidationError("angle string must look like \"a/b\"");
    return Angle::fraction(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  }
  throw ValidationError("angle must be a number, [num, den], or \"a/b\"");
}

json operator_to_json(const Operator& op) {
  json j;
  switch (op.kind()) {
    case Operator::Kind::dense: {
      j["kind"] = "dense";
      const CMat& m = op.dense_matrix();
      json entries = json::array();
      for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) entries.push_back(complex_to_json(m(r, c)));
      j["entries"] = entries;  // square, row-major
      break;
    }
    case Operator::Kind::diag_unitary: {
      j["kind"] = "diag_unitary";
      json angles = json::array();
      for (const auto& a : op.angles()) angles.push_back(angle_to_json(a));
      j["angles"] = angles;
      break;
    }
    case Operator::Kind::unilateral_shift: j["kind"] = "unilateral_shift"; break;
    case Operator::Kind::bilateral_shift: j["kind"] = "bilateral_shift"; break;
    case Operator::Kind::direct_sum: {
      j["kind"] = "direct_sum";
      json blocks = json::array();
      for (const auto& b : op.blocks()) blocks.push_back(operator_to_json(b));
      j["blocks"] = blocks;
      break;
    }
  }
  if (op.is_adjointed()) j["adjoint"] = true;
  return j;
}

Operator operator_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw ValidationError("operator needs a kind");
  const std::string kind = j["kind"].get<std::string>();
  Operator op = [&] {
    if (kind == "dense") {
      if (j.contains("matrix")) return Operator::dense(matrix_from_json(j["matrix"]));
      if (j.contains("entries")) {
        const json& e = j["entries"];
        auto d = (Eigen::Index)std::llround(std::sqrt((double)e.size()));
        if (d < 1 || (size_t)(d * d) != e.size())
          throw ValidationError("dense operator entries must form a square matrix");
        CMat m(d, d);
        Eigen::Index idx = 0;
        for (Eigen::Index r = 0; r < d; ++r)
          for (Eigen::Index c = 0; c < d; ++c) m(r, c) = complex_from_json(e[(size_t)idx++]);
        return Operator::dense(std::move(m));
      }
      throw ValidationError("dense operator needs a matrix or entries");
    }
    if (kind == "diag_unitary") {
      std::vector<Angle> angles;
      for (const auto& a : j.at("angles")) angles.push_back(angle_from_json(a));
      return Operator::diag_unitary(std::move(angles));
    }
    if (kind == "unilateral_shift") return Operator::unilateral_shift();
    if (kind == "bilateral_shift") return Operator::bilateral_shift();
    if (kind == "direct_sum") {
      std::vector<Operator> blocks;
      for (const auto& b : j.at("blocks")) blocks.push_back(operator_from_json(b));
      return Operator::direct_sum(std::move(blocks));
    }
    throw ValidationError("unknown operator kind: " + kind);
  }();
  if (j.value("adjoint", false)) op = op.adjoint();
  return op;
}

json poly_to_json(const polyseq::IntPoly& p) { return json(p.coeffs()); }

polyseq::IntPoly poly_from_json(const json& j) {
  if (!j.is_array()) throw ValidationError("polynomial must be a coefficient array");
  std::vector<std::int64_t> c;
  for (const auto& v : j) c.push_back(v.get<std::int64_t>());
  return polyseq::IntPoly(std::move(c));
}

json hvec_to_json(const HVec& v) {
  if (std::holds_alternative<CVec>(v)) {
    const CVec& x = std::get<CVec>(v);
    json arr = json::array();
    for (Eigen::Index i = 0; i < x.size(); ++i) arr.push_back(complex_to_json(x(i)));
    return arr;
  }
  json sup = json::object();
  for (const auto& [k, c] : std::get<SupportVec>(v).coeff)
    sup[std::to_string(k)] = complex_to_json(c);
  return json{{"support", sup}};
}

HVec hvec_from_json(const json& j) {
  if (j.is_array()) {
    CVec x((Eigen::Index)j.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = complex_from_json(j[(size_t)i]);
    return HVec(x);
  }
  if (j.is_object() && j.contains("support")) {
    SupportVec v;
    for (const auto& [key, val] : j["support"].items())
      v.coeff[std::stoll(key)] = complex_from_json(val);
    return HVec(v);
  }
  throw ValidationError("vector must be an array or {\"support\": {...}}");
}

json selection_to_json(const orbitlab::Selection& sel, bool include_indices) {
  json j;
  j["horizon"] = sel.horizon;
  j["selected_count"] = sel.indices.size();
  j["density_at_horizon"] = sel.horizon > 0 ? sel.density_at(sel.horizon) : 1.0;
  json blocks = json::array();
  for (const auto& [start, level] : sel.blocks)
    blocks.push_back(json{{"start", start}, {"level", level}});
  j["blocks"] = blocks;
  json profile = json::array();
  for (const auto& [n, d] : sel.density_profile) profile.push_back(json{{"n", n}, {"density", d}});
  j["density_profile"] = profile;
  if (include_indices) j["indices"] = sel.indices;
  return j;
}

json vdc_to_json(const orbitlab::VdcStats& st) {
  return json{{"horizon", st.horizon},
              {"lag_max", st.lag_max},
              {"gamma", st.gamma},
              {"gamma_tilde", st.gamma_tilde},
              {"gamma_half", st.gamma_half},
              {"gamma_tilde_half", st.gamma_tilde_half},
              {"gamma_quarter", st.gamma_quarter},
              {"gamma_tilde_quarter", st.gamma_tilde_quarter}};
}

json aws_report_to_json(const orbitlab::AwsReport& rep) {
  json per = json::array();
  for (const auto& fr : rep.per_functional)
    per.push_back(json{{"cesaro_at_horizon", fr.cesaro_at_horizon},
                       {"below_threshold", fr.below_threshold},
                       {"selection", selection_to_json(fr.selection)}});
  return json{{"verdict", rep.verdict},
              {"tau", rep.tau},
              {"horizon", rep.horizon},
              {"per_functional", per},
              {"joint", selection_to_json(rep.joint)}};
}

json split_to_json(const splitting::SplitResult& res, bool include_bases) {
  json parts = json::array();
  for (const auto& p : res.parts) {
    json pj{{"label", p.label}, {"dim", p.dim()}};
    if (include_bases) pj["basis"] = matrix_to_json(p.basis);
    parts.push_back(pj);
  }
  json resid = json::array();
  for (const auto& [label, value] : res.residuals)
    resid.push_back(json{{"part", label}, {"invariance_defect", value}});
  json evid = json::array();
  for (const auto& [desc, value] : res.evidence)
    evid.push_back(json{{"description", desc}, {"value", value}});
  return json{{"tolerance", res.tol},
              {"parts", parts},
              {"residual_diagnostics", resid},
              {"evidence", evid},
              {"warnings", res.warnings},
              {"note", "finite-horizon Cesaro evidence corroborates stability; it cannot "
                       "certify weak accumulation at zero"}};
}

json descriptive_split_to_json(const splitting::DescriptiveSplit& res) {
  json parts = json::array();
  for (const auto& [label, extent] : res.parts)
    parts.push_back(json{{"label", label}, {"extent", extent}});
  json evid = json::array();
  for (const auto& [desc, value] : res.evidence)
    evid.push_back(json{{"description", desc}, {"value", value}});
  return json{{"descriptive", true}, {"parts", parts}, {"notes", res.notes}, {"evidence", evid}};
}

json equivalence_to_json(const ergodic::EquivalenceReport& rep) {
  return json{{"via_beta", matrix_to_json(rep.via_beta)},
              {"via_u", matrix_to_json(rep.via_u)},
              {"max_discrepancy", rep.max_discrepancy},
              {"phi_cauchy_beta", rep.phi_cauchy_beta},
              {"phi_cauchy_u", rep.phi_cauchy_u}};
}

ergodic::AverageRequest request_from_json(const json& j) {
  ergodic::AverageRequest rq;
  rq.k = j.at("k").get<int>();
  rq.r = j.at("r").get<int>();
  rq.alpha = j.at("alpha").get<std::vector<int>>();
  for (const auto& p : j.at("polys")) rq.polys.push_back(poly_from_json(p));
  rq.validate();
  return rq;
}

ergodic::MatrixAlgebra system_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "diagonal") {
    std::vector<Angle> angles;
    for (const auto& a : j.at("angles")) angles.push_back(angle_from_json(a));
    return ergodic::MatrixAlgebra::diagonal(std::move(angles));
  }
  if (kind == "dense_unitary")
    return ergodic::MatrixAlgebra::dense_unitary(matrix_from_json(j.at("matrix")));
  throw ValidationError("system kind must be diagonal or dense_unitary");
}

void write_series_csv(std::ostream& os, const std::vector<double>& y,
                      const std::vector<double>& cesaro_means, const orbitlab::Selection& sel) {
  os << "n,y,cesaro,selected,density\n";
  size_t cursor = 0;
  std::int64_t seen = 0;
  for (size_t i = 0; i < y.size(); ++i) {
    auto n = (std::int64_t)(i + 1);
    bool selected = cursor < sel.indices.size() && sel.indices[cursor] == n;
    if (selected) {
      ++cursor;
    }
    seen += selected ? 1 : 0;
    os << n << ',' << fmt17(y[i]) << ',' << fmt17(cesaro_means[i]) << ',' << (selected ? 1 : 0)
       << ',' << fmt17((double)seen / (double)n) << '\n';
  }
}

void write_counterexample_csv(std::ostream& os, const std::vector<diskflow::CounterexampleRow>& rows) {
  os << "n,t,re_gamma,im_gamma,deviation,f_value\n";
  for (const auto& r : rows)
    os << r.n << ',' << r.t << ',' << fmt17(r.gamma.real()) << ',' << fmt17(r.gamma.imag()) << ','
       << fmt17(r.deviation) << ',' << fmt17(r.f_value) << '\n';
}

void write_vdc_csv(std::ostream& os, const orbitlab::VdcStats& st) {
  os << "j,gamma,gamma_tilde,gamma_half,gamma_tilde_half,gamma_quarter,gamma_tilde_quarter\n";
  for (int j = 1; j <= st.lag_max; ++j) {
    auto at = [&](const std::vector<double>& v) {
      return v.empty() ? std::string("") : fmt17(v[(size_t)(j - 1)]);
    };
    os << j << ',' << at(st.gamma) << ',' << at(st.gamma_tilde) << ',' << at(st.gamma_half) << ','
       << at(st.gamma_tilde_half) << ',' << at(st.gamma_quarter) << ','
       << at(st.gamma_tilde_quarter) << '\n';
  }
}

}  // namespace awstab::serialize
