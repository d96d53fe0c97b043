#pragma once

// JSON model documents.
//
//   {"kind": "chain", "n_states": 2, "length": 10, "homogeneous": true,
//    "h": [[0, 0], [1, 0.2]], "h_last": [[0, 1], [1, 1.2]]}
//
// kind is one of chain, singleton_pair, r_range, spatial_ising. Tables may be
// nested (one array per row, row = current state) or flat row-major.
//
//   chain           h (+ optional h_last) | h_list
//   singleton_pair  theta (+ theta_last) | theta_list;  psi (+ psi_last) | psi_list
//   r_range         range;  factor (+ factor_last) | factors
//   spatial_ising   m, T, alpha, beta, delta
//
// "state_labels" is optional for chain and singleton_pair. A table given
// once with a *_last companion is repeated for every step but the last.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "gibbs/error.hpp"
#include "gibbs/model.hpp"
#include "gibbs/spatial.hpp"
#include "gibbs/step_sequence.hpp"
#include "gibbs/table.hpp"

namespace gibbs {

using AnyModel = std::variant<ChainModel, SingletonPairModel, RRangeModel, SpatialIsingModel>;

/// A parsed document: the model plus its display labels.
struct ModelDocument {
  AnyModel model;
  std::vector<std::string> labels;
};

namespace io_detail {

using nlohmann::json;

inline double real(const json& j, const char* what) {
  if (j.is_number()) {
    const double x = j.get<double>();
    if (!std::isfinite(x)) throw invalid_model("non-finite entry");
    return x;
  }
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    char* end = nullptr;
    const double x = std::strtod(s.c_str(), &end);
    if (end != s.c_str() && !std::isfinite(x)) throw invalid_model("non-finite entry");
  }
  throw invalid_model(std::string("expected a number in ") + what);
}

inline std::size_t count(const json& doc, const char* key) {
  if (!doc.contains(key)) throw invalid_model(std::string("missing field '") + key + "'");
  const json& j = doc.at(key);
  if (!j.is_number_integer() && !j.is_number_unsigned()) throw invalid_model(std::string("'") + key + "' must be an integer");
  const auto v = j.get<std::int64_t>();
  if (v < 0) throw invalid_model(std::string("'") + key + "' must be nonnegative");
  return static_cast<std::size_t>(v);
}

inline std::vector<double> vec(const json& j, const char* what) {
  if (!j.is_array()) throw invalid_model(std::string("'") + what + "' must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const json& x : j) out.push_back(real(x, what));
  return out;
}

inline Table table(const json& j, std::size_t n, const char* what) {
  if (!j.is_array()) throw invalid_model(std::string("'") + what + "' must be an array");
  std::vector<double> flat;
  if (!j.empty() && j.front().is_array()) {
    if (j.size() != n) throw invalid_model(std::string("'") + what + "' must have N rows");
    for (const json& row : j) {
      const auto r = vec(row, what);
      if (r.size() != n) throw invalid_model(std::string("'") + what + "' rows must have N entries");
      flat.insert(flat.end(), r.begin(), r.end());
    }
  } else {
    flat = vec(j, what);
    if (flat.size() != n * n) throw invalid_model(std::string("'") + what + "' must have N*N entries");
  }
  return {n, n, std::move(flat)};
}

// Either `once` (+ `last`) repeated `steps` times or the explicit `list`.
template <class Step, class Read>
StepSequence<Step> sequence(const json& doc, const char* once, const char* last, const char* list, std::size_t steps,
                            Read read) {
  if (doc.contains(list)) {
    if (doc.contains(once)) throw invalid_model(std::string("give either '") + once + "' or '" + list + "'");
    const json& j = doc.at(list);
    if (!j.is_array()) throw invalid_model(std::string("'") + list + "' must be an array");
    std::vector<Step> items;
    for (const json& x : j) items.push_back(read(x, list));
    if (items.size() != steps)
      throw invalid_model(std::string("'") + list + "' must have " + std::to_string(steps) + " entries");
    return StepSequence<Step>::from_list(std::move(items));
  }
  if (!doc.contains(once)) throw invalid_model(std::string("missing field '") + once + "' or '" + list + "'");
  std::optional<Step> tail;
  if (doc.contains(last)) tail = read(doc.at(last), last);
  return StepSequence<Step>::repeated(read(doc.at(once), once), steps, std::move(tail));
}

inline std::vector<std::string> labels(const json& doc, std::size_t n) {
  if (!doc.contains("state_labels")) return {};
  std::vector<std::string> out;
  for (const json& x : doc.at("state_labels")) {
    if (!x.is_string()) throw invalid_model("state_labels must be strings");
    out.push_back(x.get<std::string>());
  }
  if (out.size() != n) throw invalid_model("state_labels must have N entries");
  return out;
}

inline json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    static const std::regex non_finite(R"((^|[^A-Za-z_"])[-+]?(Infinity|inf|NaN|nan)([^A-Za-z_"]|$))");
    if (std::regex_search(text, non_finite)) throw invalid_model("non-finite entry");
    throw invalid_model(std::string("malformed model document: ") + e.what());
  } catch (const json::out_of_range&) {
    // Literals such as 1e999 overflow double.
    throw invalid_model("non-finite entry");
  }
}

inline void put_real(std::ostream& os, double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17e", x);
  os << buf;
}

inline void put_vec(std::ostream& os, std::span<const double> v) {
  os << '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    put_real(os, v[i]);
  }
  os << ']';
}

inline void put_table(std::ostream& os, const Table& t) {
  os << '[';
  for (std::size_t r = 0; r < t.rows(); ++r) {
    if (r) os << ", ";
    put_vec(os, std::span<const double>(t.values()).subspan(r * t.cols(), t.cols()));
  }
  os << ']';
}

template <class Step, class Put>
void put_sequence(std::ostream& os, const StepSequence<Step>& s, const char* once, const char* last, const char* list,
                  Put put) {
  if (s.is_repeated()) {
    os << ",\n  \"" << once << "\": ";
    put(os, s.body());
    if (s.has_distinct_last()) {
      os << ",\n  \"" << last << "\": ";
      put(os, s.last());
    }
    return;
  }
  os << ",\n  \"" << list << "\": [";
  for (std::size_t i = 0; i < s.size(); ++i) {
    os << (i ? ",\n    " : "\n    ");
    put(os, s[i]);
  }
  os << "\n  ]";
}

inline void put_labels(std::ostream& os, const std::vector<std::string>& labels) {
  if (labels.empty()) return;
  os << ",\n  \"state_labels\": " << json(labels).dump();
}

}  // namespace io_detail

inline ModelDocument parse_model_document(const std::string& text) {
  using io_detail::json;
  const json doc = io_detail::parse_json(text);
  if (!doc.is_object()) throw invalid_model("model document must be an object");
  if (!doc.contains("kind") || !doc.at("kind").is_string()) throw invalid_model("missing field 'kind'");
  const std::string kind = doc.at("kind").get<std::string>();

  if (kind == "spatial_ising") {
    SpatialIsingModel sm;
    sm.m = io_detail::count(doc, "m");
    sm.T = io_detail::count(doc, "T");
    sm.alpha = io_detail::real(doc.value("alpha", json(0.0)), "alpha");
    sm.beta = io_detail::real(doc.value("beta", json(0.0)), "beta");
    sm.delta = io_detail::real(doc.value("delta", json(0.0)), "delta");
    sm.validate();
    return {sm, {"-1", "+1"}};
  }

  const std::size_t n = io_detail::count(doc, "n_states");
  const std::size_t len = io_detail::count(doc, "length");
  if (n < 2) throw invalid_model("n_states must be at least 2");
  if (len < 2) throw invalid_model("length must be at least 2");
  auto read_table = [n](const json& j, const char* what) { return io_detail::table(j, n, what); };
  auto read_vec = [](const json& j, const char* what) { return io_detail::vec(j, what); };

  if (kind == "chain") {
    auto labels = io_detail::labels(doc, n);
    auto h = io_detail::sequence<Table>(doc, "h", "h_last", "h_list", len - 1, read_table);
    return {ChainModel(n, len, std::move(h), labels), labels};
  }
  if (kind == "singleton_pair") {
    auto theta = io_detail::sequence<std::vector<double>>(doc, "theta", "theta_last", "theta_list", len, read_vec);
    auto psi = io_detail::sequence<Table>(doc, "psi", "psi_last", "psi_list", len - 1, read_table);
    return {SingletonPairModel(n, len, std::move(theta), std::move(psi)), io_detail::labels(doc, n)};
  }
  if (kind == "r_range") {
    const std::size_t r = io_detail::count(doc, "range");
    if (r < 1 || r >= len) throw invalid_model("range must satisfy 1 <= r < length");
    auto f = io_detail::sequence<std::vector<double>>(doc, "factor", "factor_last", "factors", len - r, read_vec);
    return {RRangeModel(n, len, r, std::move(f)), io_detail::labels(doc, n)};
  }
  throw invalid_model("unknown model kind '" + kind + "'");
}

inline AnyModel parse_model(const std::string& text) { return parse_model_document(text).model; }

inline ModelDocument load_model_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_argument("cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model_document(ss.str());
}

inline AnyModel load_model(const std::string& path) { return load_model_document(path).model; }

/// JSON text that parse_model reads back to an identical model. Reals are
/// written with 17 significant digits.
inline std::string serialize(const AnyModel& model, const std::vector<std::string>& labels = {}) {
  using namespace io_detail;
  std::ostringstream os;
  auto put_t = [](std::ostream& o, const Table& t) { put_table(o, t); };
  auto put_v = [](std::ostream& o, const std::vector<double>& v) { put_vec(o, v); };
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, SpatialIsingModel>) {
          os << "{\n  \"kind\": \"spatial_ising\",\n  \"m\": " << m.m << ",\n  \"T\": " << m.T;
          os << ",\n  \"alpha\": ";
          put_real(os, m.alpha);
          os << ",\n  \"beta\": ";
          put_real(os, m.beta);
          os << ",\n  \"delta\": ";
          put_real(os, m.delta);
        } else {
          const char* kind = std::is_same_v<M, ChainModel> ? "chain"
                             : std::is_same_v<M, SingletonPairModel> ? "singleton_pair"
                                                                      : "r_range";
          os << "{\n  \"kind\": \"" << kind << "\",\n  \"n_states\": " << m.n_states()
             << ",\n  \"length\": " << m.length();
          if constexpr (std::is_same_v<M, ChainModel>) {
            os << ",\n  \"homogeneous\": " << (m.log_potentials().is_repeated() ? "true" : "false");
            put_sequence(os, m.log_potentials(), "h", "h_last", "h_list", put_t);
            put_labels(os, labels.empty() ? m.state_labels() : labels);
          } else if constexpr (std::is_same_v<M, SingletonPairModel>) {
            put_sequence(os, m.singletons(), "theta", "theta_last", "theta_list", put_v);
            put_sequence(os, m.pairs(), "psi", "psi_last", "psi_list", put_t);
            put_labels(os, labels);
          } else {
            os << ",\n  \"range\": " << m.range();
            put_sequence(os, m.factors(), "factor", "factor_last", "factors", put_v);
            put_labels(os, labels);
          }
        }
        os << "\n}\n";
      },
      model);
  return os.str();
}

/// The same model at another length. Only models stored in repeated form
/// (plus spatial ones) can be stretched.
inline AnyModel with_length(const AnyModel& model, std::size_t length) {
  auto stretch = []<class S>(const StepSequence<S>& s, std::size_t count, const char* what) {
    if (!s.is_repeated()) throw invalid_argument(std::string("cannot change the length of a model with an explicit ") + what);
    std::optional<S> last;
    if (s.has_distinct_last()) last = s.last();
    return StepSequence<S>::repeated(s.body(), count, std::move(last));
  };
  return std::visit(
      [&](const auto& m) -> AnyModel {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, SpatialIsingModel>) {
          SpatialIsingModel out = m;
          out.T = length;
          out.validate();
          return out;
        } else if constexpr (std::is_same_v<M, ChainModel>) {
          if (length < 2) throw invalid_argument("length must be at least 2");
          return ChainModel(m.n_states(), length, stretch(m.log_potentials(), length - 1, "h_list"), m.state_labels());
        } else if constexpr (std::is_same_v<M, SingletonPairModel>) {
          if (length < 2) throw invalid_argument("length must be at least 2");
          return SingletonPairModel(m.n_states(), length, stretch(m.singletons(), length, "theta_list"),
                                    stretch(m.pairs(), length - 1, "psi_list"));
        } else {
          if (length <= m.range()) throw invalid_argument("length must exceed the range");
          return RRangeModel(m.n_states(), length, m.range(), stretch(m.factors(), length - m.range(), "factors"));
        }
      },
      model);
}

}  // namespace gibbs
