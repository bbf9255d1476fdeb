#pragma once

// CSV and JSON serialization of measures, estimates and curves.

#include <iosfwd>
#include <map>
#include <string>

#include "rotnum/measures.hpp"
#include "rotnum/rotation.hpp"
#include "rotnum/schrodinger.hpp"

namespace rotnum {

using Params = std::map<std::string, std::string>;

/// Shortest form is not attempted: always 17 significant digits.
std::string format_double(double v);

/// Columns: position,weight.
void write_measure_csv(std::ostream& out, const EmpiricalCircleMeasure& nu);
EmpiricalCircleMeasure read_measure_csv(std::istream& in);

/// {"value", "stderr", "n", "replicas", "seed", "params"}
std::string estimate_json(const Estimate& e, const Params& params);

/// Columns: energy,ids,stderr,method,L_or_n,seed. The header is written when
/// `header` is set.
void write_ids_csv(std::ostream& out, const IdsCurve& curve, bool header = true);
}  // namespace rotnum
