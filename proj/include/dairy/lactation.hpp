#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dairy/config.hpp"
#include "dairy/core.hpp"
#include "dairy/gateway.hpp"

namespace dairy {

// MilkBot curve y(t) = a * (1 - exp((c - t) / b) / 2) * exp(-d * t), clamped at zero.
// a: scale (kg/day), b: ramp (days), c: offset (days), d: decay (1/day).
struct LactationParams {
  double a = 0;
  double b = 1;
  double c = 0;
  double d = 0;
  std::string label;

  void validate() const;  // a > 0, b > 0, d >= 0, all finite
};

double predict_yield(const LactationParams& p, double t);

// Day of maximum yield: the stationary point of the unclamped curve (c when d == 0 is not a
// peak; returns +inf then).
double peak_dim(const LactationParams& p);

class ParameterTable {
 public:
  // JSON object "REGION:parity" -> {a, b, c, d}. Keys starting with '_' are ignored.
  static ParameterTable from_json(const json& j);
  static ParameterTable load(const std::filesystem::path& path);

  const LactationParams& at(const std::string& region, std::int64_t parity) const;  // throws ValidationError
  bool contains(const std::string& region, std::int64_t parity) const;
  std::size_t size() const { return params_.size(); }

 private:
  std::map<std::pair<std::string, std::int64_t>, LactationParams> params_;
};

struct ParamExtraction {
  std::vector<std::string> region{"US"};
  std::vector<std::int64_t> parity{1};
  std::vector<std::int64_t> dim_range;  // inclusive day list; empty until normalized

  // Reads the extraction JSON: parity items may be numbers or numeric strings, regions are
  // upper-cased, dim_range is a day list or an inclusive [start, end] pair. Absent keys take
  // the defaults US / 1 / 1..305. Throws ValidationError.
  static ParamExtraction from_json(const json& j);
  json to_json() const;
};

struct CurvePoint {
  std::int64_t dim = 0;
  double yield = 0;
};

struct CurveSeries {
  std::string label;
  LactationParams params;
  std::vector<CurvePoint> points;
};

// One series per (region, parity) pair, region-major.
std::vector<CurveSeries> curve(const ParamExtraction& x, const ParameterTable& table);

// Discrete daily sum over dim_range for each series.
std::vector<double> expected_production(const ParamExtraction& x, const ParameterTable& table);

struct PlotArtifact {
  json series;      // {"series": [{"label", "params", "points": [[dim, kg], ...]}]}
  std::string svg;  // self-contained line chart
};

// band > 0 draws a +/- band fraction around each curve. Throws ValidationError on no series.
PlotArtifact render_plot(const std::vector<CurveSeries>& series, double band = 0.0);

class ModelTeam {
 public:
  ModelTeam(ModelGateway& gateway, const SystemConfig& config, const ParameterTable& params);

  // Throws ValidationError after a failed repair; the span payload keeps the model output.
  ParamExtraction extract_parameters(const UserQuery& query, Trace& trace, const std::string& parent) const;

  // extract_key_parameters (+ one repair), generate_visuals.
  AgentAnswer run(const UserQuery& query, Trace& trace, const std::string& parent) const;

 private:
  ModelGateway& gateway_;
  const SystemConfig& config_;
  const ParameterTable& params_;
};

}  // namespace dairy
