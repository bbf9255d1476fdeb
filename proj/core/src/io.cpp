#include "rotnum/io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "rotnum/errors.hpp"

namespace rotnum {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_measure_csv(std::ostream& out, const EmpiricalCircleMeasure& nu) {
  out << "position,weight\n";
  for (std::size_t i = 0; i < nu.size(); ++i) {
    out << format_double(nu.positions()[i]) << ',' << format_double(nu.weights()[i]) << '\n';
  }
}

EmpiricalCircleMeasure read_measure_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "position,weight") {
    throw ParameterError("measure CSV must start with the header 'position,weight'");
  }
  std::vector<double> pos, w;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ParameterError("measure CSV row " + std::to_string(row) + " has no comma");
    }
    try {
      pos.push_back(std::stod(line.substr(0, comma)));
      w.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw ParameterError("measure CSV row " + std::to_string(row) + " is not numeric");
    }
  }
  return EmpiricalCircleMeasure(std::move(pos), std::move(w));
}

std::string estimate_json(const Estimate& e, const Params& params) {
  nlohmann::ordered_json j;
  j["value"] = e.value;
  j["stderr"] = e.std_error;
  j["n"] = e.n;
  j["replicas"] = e.replicas;
  j["seed"] = e.seed;
  j["params"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : params) j["params"][k] = v;
  return j.dump();
}

void write_ids_csv(std::ostream& out, const IdsCurve& curve, bool header) {
  if (header) out << "energy,ids,stderr,method,L_or_n,seed\n";
  for (std::size_t i = 0; i < curve.energies.size(); ++i) {
    out << format_double(curve.energies[i]) << ',' << format_double(curve.ids[i]) << ','
        << format_double(curve.std_errors[i]) << ',' << curve.method << ',' << curve.size << ','
        << curve.seed << '\n';
  }
}

}  // namespace rotnum
