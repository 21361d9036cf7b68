#pragma once

#include <json.hpp>
#include <ostream>
#include <string>

#include "awstab/diskflow.hpp"
#include "awstab/ergodic.hpp"
#include "awstab/operators.hpp"
#include "awstab/orbitlab.hpp"
#include "awstab/polyseq.hpp"
#include "awstab/splitting.hpp"

namespace awstab::serialize {

using json = nlohmann::json;

/// 17 significant digits: round-trip exact for 64-bit floats.
std::string fmt17(double v);

json complex_to_json(cd z);
cd complex_from_json(const json& j);

json matrix_to_json(const CMat& m);
CMat matrix_from_json(const json& j);

/// Angles accept a plain number, an "a/b" string, or an [a, b] pair; the
/// latter two keep the rational exact.
json angle_to_json(const operators::Angle& a);
operators::Angle angle_from_json(const json& j);

/// {"kind": "dense" | "diag_unitary" | "unilateral_shift" | "bilateral_shift"
///  | "direct_sum", ...} with an optional "adjoint" flag.
json operator_to_json(const operators::Operator& op);
operators::Operator operator_from_json(const json& j);

/// Coefficient arrays, constant term first: [3, -4, 2] is 2X^2 - 4X + 3.
json poly_to_json(const polyseq::IntPoly& p);
polyseq::IntPoly poly_from_json(const json& j);

/// Dense vectors are arrays of complex entries; supported vectors are
/// {"support": {"index": complex, ...}}.
json hvec_to_json(const operators::HVec& v);
operators::HVec hvec_from_json(const json& j);

json selection_to_json(const orbitlab::Selection& sel, bool include_indices = false);
json vdc_to_json(const orbitlab::VdcStats& st);
json aws_report_to_json(const orbitlab::AwsReport& rep);
json split_to_json(const splitting::SplitResult& res, bool include_bases = true);
json descriptive_split_to_json(const splitting::DescriptiveSplit& res);
json equivalence_to_json(const ergodic::EquivalenceReport& rep);

ergodic::AverageRequest request_from_json(const json& j);
ergodic::MatrixAlgebra system_from_json(const json& j);

/// CSV with columns n, y, cesaro, selected, density.
void write_series_csv(std::ostream& os, const std::vector<double>& y,
                      const std::vector<double>& cesaro_means, const orbitlab::Selection& sel);

/// CSV with columns n, t, re_gamma, im_gamma, deviation, f_value.
void write_counterexample_csv(std::ostream& os,
                              const std::vector<diskflow::CounterexampleRow>& rows);

/// CSV with columns j, gamma, gamma_tilde, gamma_half, gamma_tilde_half,
/// gamma_quarter, gamma_tilde_quarter.
void write_vdc_csv(std::ostream& os, const orbitlab::VdcStats& st);

}  // namespace awstab::serialize
