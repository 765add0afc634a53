#include "dairy/lactation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "dairy/text.hpp"

namespace dairy {

void LactationParams::validate() const {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(d)) {
    throw ValidationError("lactation parameters must be finite (" + label + ")");
  }
  if (a <= 0) throw ValidationError("scale a must be positive (" + label + ")");
  if (b <= 0) throw ValidationError("ramp b must be positive (" + label + ")");
  if (d < 0) throw ValidationError("decay d must not be negative (" + label + ")");
}

double predict_yield(const LactationParams& p, double t) {
  const double y = p.a * (1.0 - std::exp((p.c - t) / p.b) / 2.0) * std::exp(-p.d * t);
  return y > 0 ? y : 0.0;
}

double peak_dim(const LactationParams& p) {
  if (p.d <= 0) return std::numeric_limits<double>::infinity();
  const double bd = p.b * p.d;
  return p.c + p.b * std::log((1.0 + bd) / (2.0 * bd));
}

// ---- parameter table ----

ParameterTable ParameterTable::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("parameter file must be a JSON object");
  ParameterTable t;
  for (const auto& [key, v] : j.items()) {
    if (!key.empty() && key.front() == '_') continue;
    const auto colon = key.find(':');
    if (colon == std::string::npos) throw ConfigError("parameter key must be REGION:parity, got " + key);
    const auto region = text::to_upper(text::trim(key.substr(0, colon)));
    std::int64_t parity = 0;
    try {
      std::size_t used = 0;
      parity = std::stoll(key.substr(colon + 1), &used);
      if (used != key.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError("parameter key has a non-integer parity: " + key);
    }
    LactationParams p;
    try {
      p.a = v.at("a").get<double>();
      p.b = v.at("b").get<double>();
      p.c = v.at("c").get<double>();
      p.d = v.at("d").get<double>();
    } catch (const json::exception& e) {
      throw ConfigError("parameter set " + key + " needs numeric a, b, c, d");
    }
    p.label = region + " parity " + std::to_string(parity);
    try {
      p.validate();
    } catch (const ValidationError& e) {
      throw ConfigError(e.what());
    }
    t.params_[{region, parity}] = p;
  }
  if (t.params_.empty()) throw ConfigError("parameter file holds no parameter sets");
  return t;
}

ParameterTable ParameterTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open parameter file " + path.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw ConfigError("parameter file " + path.string() + " is not valid JSON: " + e.what());
  }
}

bool ParameterTable::contains(const std::string& region, std::int64_t parity) const {
  return params_.count({region, parity}) > 0;
}

const LactationParams& ParameterTable::at(const std::string& region, std::int64_t parity) const {
  auto it = params_.find({region, parity});
  if (it == params_.end()) {
    throw ValidationError("no lactation parameters for " + region + " parity " + std::to_string(parity));
  }
  return it->second;
}

// ---- extraction ----

namespace {

constexpr std::int64_t kMaxDim = 1000;

std::int64_t as_int(const json& v, const char* what) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::fabs(d) < 1e15) return static_cast<std::int64_t>(d);
  }
  if (v.is_string()) {
    const auto s = text::trim(v.get<std::string>());
    try {
      std::size_t used = 0;
      const auto n = std::stoll(s, &used);
      if (used == s.size()) return n;
    } catch (const std::exception&) {
    }
  }
  throw ValidationError(std::string(what) + " must be an integer, got " + v.dump());
}

json as_list(const json& v) {
  if (v.is_array()) return v;
  return json::array({v});
}

}  // namespace

ParamExtraction ParamExtraction::from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("parameter extraction must be a JSON object");
  ParamExtraction x;
  if (j.contains("region") && !j["region"].is_null()) {
    x.region.clear();
    for (const auto& r : as_list(j["region"])) {
      if (!r.is_string() || text::trim(r.get<std::string>()).empty()) {
        throw ValidationError("region entries must be non-empty strings");
      }
      auto name = text::to_upper(text::trim(r.get<std::string>()));
      if (std::find(x.region.begin(), x.region.end(), name) == x.region.end()) x.region.push_back(std::move(name));
    }
    if (x.region.empty()) x.region = {"US"};
  }
  if (j.contains("parity") && !j["parity"].is_null()) {
    x.parity.clear();
    for (const auto& p : as_list(j["parity"])) {
      const auto n = as_int(p, "parity");
      if (n < 1) throw ValidationError("parity must be at least 1");
      if (std::find(x.parity.begin(), x.parity.end(), n) == x.parity.end()) x.parity.push_back(n);
    }
    if (x.parity.empty()) x.parity = {1};
  }
  std::vector<std::int64_t> days;
  if (j.contains("dim_range") && !j["dim_range"].is_null()) {
    for (const auto& d : as_list(j["dim_range"])) days.push_back(as_int(d, "dim_range"));
  }
  if (days.empty()) {
    days = {1, 305};
  }
  if (days.size() == 2) {
    if (days[0] > days[1]) std::swap(days[0], days[1]);
    if (days[0] < 1 || days[1] > kMaxDim) throw ValidationError("dim_range must lie within 1.." + std::to_string(kMaxDim));
    for (auto t = days[0]; t <= days[1]; ++t) x.dim_range.push_back(t);
  } else {
    for (std::size_t i = 0; i < days.size(); ++i) {
      if (days[i] < 1 || days[i] > kMaxDim) {
        throw ValidationError("dim_range must lie within 1.." + std::to_string(kMaxDim));
      }
      if (i && days[i] <= days[i - 1]) throw ValidationError("dim_range must be strictly increasing");
    }
    x.dim_range = std::move(days);
  }
  return x;
}

json ParamExtraction::to_json() const {
  return json{{"region", region}, {"parity", parity}, {"dim_range", dim_range}};
}

std::vector<CurveSeries> curve(const ParamExtraction& x, const ParameterTable& table) {
  std::vector<CurveSeries> out;
  for (const auto& r : x.region) {
    for (auto p : x.parity) {
      CurveSeries s;
      s.params = table.at(r, p);
      s.label = s.params.label;
      s.points.reserve(x.dim_range.size());
      for (auto t : x.dim_range) s.points.push_back({t, predict_yield(s.params, static_cast<double>(t))});
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::vector<double> expected_production(const ParamExtraction& x, const ParameterTable& table) {
  std::vector<double> totals;
  for (const auto& s : curve(x, table)) {
    double sum = 0;
    for (const auto& pt : s.points) sum += pt.yield;
    totals.push_back(sum);
  }
  return totals;
}

// ---- plot ----

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

PlotArtifact render_plot(const std::vector<CurveSeries>& series, double band) {
  if (series.empty()) throw ValidationError("render_plot needs at least one series");
  PlotArtifact art;
  art.series = json{{"x_label", "DIM (days)"}, {"y_label", "Milk yield (kg/day)"}, {"series", json::array()}};

  std::int64_t xmin = std::numeric_limits<std::int64_t>::max();
  std::int64_t xmax = std::numeric_limits<std::int64_t>::min();
  double ymax = 0;
  for (const auto& s : series) {
    json pts = json::array();
    for (const auto& p : s.points) {
      pts.push_back(json::array({p.dim, p.yield}));
      xmin = std::min(xmin, p.dim);
      xmax = std::max(xmax, p.dim);
      ymax = std::max(ymax, p.yield * (1.0 + std::max(0.0, band)));
    }
    art.series["series"].push_back(json{{"label", s.label},
                                        {"params", {{"a", s.params.a}, {"b", s.params.b}, {"c", s.params.c}, {"d", s.params.d}}},
                                        {"points", std::move(pts)}});
  }
  if (xmin > xmax) xmin = xmax = 0;
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax <= 0) ymax = 1;
  ymax = std::ceil(ymax / 5.0) * 5.0;

  const double W = 720, H = 420, L = 60, R = 170, T = 30, B = 50;
  const double pw = W - L - R, ph = H - T - B;
  auto sx = [&](double x) { return L + (x - static_cast<double>(xmin)) / static_cast<double>(xmax - xmin) * pw; };
  auto sy = [&](double y) { return T + ph - y / ymax * ph; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"420\" viewBox=\"0 0 720 420\">\n";
  svg += "<rect width=\"720\" height=\"420\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(L + pw / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">Predicted milk yield</text>\n";
  svg += "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n";
  svg += "<line x1=\"" + num(L) + "\" y1=\"" + num(T + ph) + "\" x2=\"" + num(L + pw) + "\" y2=\"" + num(T + ph) + "\"/>\n";
  svg += "<line x1=\"" + num(L) + "\" y1=\"" + num(T) + "\" x2=\"" + num(L) + "\" y2=\"" + num(T + ph) + "\"/>\n";
  svg += "</g>\n<g class=\"ticks\" font-size=\"10\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = static_cast<double>(xmin) + (static_cast<double>(xmax - xmin)) * i / 5.0;
    const double yv = ymax * i / 5.0;
    svg += "<text x=\"" + num(sx(xv)) + "\" y=\"" + num(T + ph + 15) + "\" text-anchor=\"middle\">" +
           std::to_string(static_cast<long long>(std::lround(xv))) + "</text>\n";
    svg += "<text x=\"" + num(L - 6) + "\" y=\"" + num(sy(yv) + 3) + "\" text-anchor=\"end\">" + text::fixed(yv, 0) +
           "</text>\n";
  }
  svg += "</g>\n";
  svg += "<text x=\"" + num(L + pw / 2) + "\" y=\"" + num(H - 12) + "\" text-anchor=\"middle\" font-size=\"12\">DIM (days)</text>\n";
  svg += "<text x=\"16\" y=\"" + num(T + ph / 2) + "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 " +
         num(T + ph / 2) + ")\">Milk yield (kg/day)</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const std::string color = kPalette[i % std::size(kPalette)];
    if (band > 0 && !s.points.empty()) {
      std::string poly;
      for (const auto& p : s.points) poly += num(sx(static_cast<double>(p.dim))) + "," + num(sy(p.yield * (1 + band))) + " ";
      for (auto it = s.points.rbegin(); it != s.points.rend(); ++it) {
        poly += num(sx(static_cast<double>(it->dim))) + "," + num(sy(std::max(0.0, it->yield * (1 - band)))) + " ";
      }
      svg += "<polygon class=\"band\" fill=\"" + color + "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"" + poly + "\"/>\n";
    }
    std::string pts;
    for (const auto& p : s.points) pts += num(sx(static_cast<double>(p.dim))) + "," + num(sy(p.yield)) + " ";
    if (!pts.empty()) pts.pop_back();
    svg += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
  }
  svg += "<g class=\"legend\" font-size=\"12\">\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double y = T + 10 + 20.0 * static_cast<double>(i);
    const std::string color = kPalette[i % std::size(kPalette)];
    svg += "<line x1=\"" + num(W - R + 15) + "\" y1=\"" + num(y) + "\" x2=\"" + num(W - R + 40) + "\" y2=\"" + num(y) +
           "\" stroke=\"" + color + "\" stroke-width=\"2\"/>";
    svg += "<text x=\"" + num(W - R + 46) + "\" y=\"" + num(y + 4) + "\">" + xml_escape(series[i].label) + "</text>\n";
  }
  svg += "</g>\n</svg>\n";
  art.svg = std::move(svg);
  return art;
}

// ---- team ----

ModelTeam::ModelTeam(ModelGateway& gateway, const SystemConfig& config, const ParameterTable& params)
    : gateway_(gateway), config_(config), params_(params) {}

ParamExtraction ModelTeam::extract_parameters(const UserQuery& query, Trace& trace, const std::string& parent) const {
  std::string last_output;
  std::string last_error;
  for (int attempt = 0; attempt < 2; ++attempt) {
    ScopedSpan span(trace, "extract_key_parameters", parent);
    span.payload()["attempt"] = attempt + 1;
    const bool repair = attempt > 0;
    const auto prompt =
        repair ? text::render(config_.prompts.model_repair,
                              {{"question", query.text}, {"code", last_output}, {"error", last_error}})
               : text::render(config_.prompts.model_extract, {{"question", query.text}});
    try {
      const auto resp = gateway_.complete(make_request(repair ? "repair_key_parameters" : "extract_key_parameters",
                                                       config_.prompts.system, prompt, config_.model_name,
                                                       config_.temperature, config_.max_tokens));
      span.payload()["model_output"] = resp.raw_text;
      last_output = resp.clean_text;
      const auto code = extract_code_block(resp.clean_text, "json");
      json parsed;
      try {
        parsed = json::parse(code);
      } catch (const json::exception& e) {
        throw ValidationError(std::string("model output is not valid JSON: ") + e.what());
      }
      auto x = ParamExtraction::from_json(parsed);
      span.payload()["parameters"] = x.to_json();
      return x;
    } catch (const GatewayError& e) {
      span.fail(e.what());
      throw;
    } catch (const Error& e) {
      span.fail(e.what());
      last_error = e.what();
    }
  }
  throw ValidationError("parameter extraction failed after one repair: " + last_error);
}

namespace {
constexpr std::size_t kListedDays = 10;  // short day lists are spelled out in the answer
}  // namespace

AgentAnswer ModelTeam::run(const UserQuery& query, Trace& trace, const std::string& parent) const {
  AgentAnswer answer;
  answer.route = RouteLabel::Model;
  ParamExtraction x;
  try {
    x = extract_parameters(query, trace, parent);
  } catch (const Error& e) {
    answer.body = std::string("Sorry, I could not read the region, parity and DIM range from the question. "
                              "(extract_key_parameters failed: ") + e.what() + ")";
    answer.error = AnswerError{"extract_key_parameters", e.what()};
    return answer;
  }

  ScopedSpan span(trace, "generate_visuals", parent);
  std::vector<CurveSeries> series;
  try {
    series = curve(x, params_);
  } catch (const Error& e) {
    span.fail(e.what());
    answer.body = std::string("Sorry, I cannot predict that curve. (generate_visuals failed: ") + e.what() + ")";
    answer.error = AnswerError{"generate_visuals", e.what()};
    return answer;
  }
  const auto art = render_plot(series, config_.curve_band);
  span.payload()["series"] = series.size();
  span.payload()["points"] = x.dim_range.size();

  const auto first = x.dim_range.front();
  const auto last = x.dim_range.back();
  const bool contiguous = last - first + 1 == static_cast<std::int64_t>(x.dim_range.size());
  std::string span_text;
  if (contiguous) {
    span_text = "DIM " + std::to_string(first) + " to " + std::to_string(last);
  } else {
    span_text = "DIM";
    for (std::size_t i = 0; i < x.dim_range.size(); ++i) span_text += (i ? ", " : " ") + std::to_string(x.dim_range[i]);
  }
  std::string body = "Milk yield plot generated for " + std::to_string(series.size()) + " series over " + span_text + ".";
  for (const auto& s : series) {
    double total = 0;
    const CurvePoint* best = nullptr;
    for (const auto& p : s.points) {
      total += p.yield;
      if (!best || p.yield > best->yield) best = &p;
    }
    body += "\n- " + s.label + ": expected production " + text::fixed(total, 1) + " kg over " + span_text + ", peak " +
            text::fixed(best->yield, 2) + " kg/day at DIM " + std::to_string(best->dim) + ".";
    if (s.points.size() <= kListedDays) {
      body += " Daily yield:";
      for (std::size_t i = 0; i < s.points.size(); ++i) {
        body += (i ? ", DIM " : " DIM ") + std::to_string(s.points[i].dim) + " " + text::fixed(s.points[i].yield, 2) +
                " kg";
      }
      body += ".";
    }
  }
  answer.body = std::move(body);

  Attachment series_att;
  series_att.id = "series-1";
  series_att.kind = Attachment::Kind::Series;
  series_att.payload = art.series;
  Attachment svg_att;
  svg_att.id = "plot-1";
  svg_att.kind = Attachment::Kind::Svg;
  svg_att.payload = art.svg;
  answer.attachments.push_back(std::move(series_att));
  answer.attachments.push_back(std::move(svg_att));
  return answer;
}

}  // namespace dairy
