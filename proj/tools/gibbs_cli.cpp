// gibbs: normalizing constants and marginals of chain and lattice Gibbs
// distributions.
//
// Exit codes: 0 success, 2 usage error, 3 budget or capacity exceeded,
// 4 cross-check failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gibbs/gibbs.hpp"
#include "gibbs/random_models.hpp"

namespace {

using namespace gibbs;

constexpr int kUsage = 2;
constexpr int kCapacity = 3;
constexpr int kCrossCheck = 4;

struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct cross_check_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string output = "text";
  std::uint64_t cap = std::uint64_t{1} << 24;
  std::size_t state_cap = std::size_t{1} << 12;
  std::uint64_t seed = 1;

  bool csv() const { return output == "csv"; }
  EnumerationBudget budget() const { return {cap}; }
  Limits limits() const {
    Limits l;
    l.max_table_entries = static_cast<std::size_t>(std::min<std::uint64_t>(cap, std::size_t(-1)));
    l.max_states = state_cap;
    return l;
  }
};

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string general(double x, int digits = 15) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

template <class T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream is(item);
    T v{};
    if (!(is >> v) || !(is >> std::ws).eof()) throw usage_error(std::string("bad value in ") + what + ": '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw usage_error(std::string("empty list for ") + what);
  return out;
}

void print_constant(const Globals& g, const std::string& method, std::size_t length, LogValue c) {
  if (g.csv()) {
    std::cout << "method,length,log_C,log10_C,display\n"
              << method << ',' << length << ',' << c.log_string() << ',' << general(c.log10()) << ','
              << c.scientific() << '\n';
    return;
  }
  std::cout << "C        " << c.scientific() << '\n'
            << "log C    " << c.log_string() << '\n'
            << "log10 C  " << general(c.log10()) << '\n'
            << "method   " << method << '\n';
}

// Example 1 shape: h(u, v) = a u + b u v with the last table adding a v.
std::optional<IsingChainParams> binary_example_params(const ChainModel& m) {
  const auto& h = m.log_potentials();
  if (m.n_states() != 2 || !h.is_repeated()) return std::nullopt;
  const Table& body = h.body();
  const double a = body(1, 0), b = body(1, 1) - a;
  auto close = [](double x, double y) { return std::abs(x - y) <= 1e-12 * (1.0 + std::abs(y)); };
  auto matches = [&](const Table& t, double extra) {
    return close(t(0, 0), 0.0) && close(t(0, 1), extra) && close(t(1, 0), a) && close(t(1, 1), a + b + extra);
  };
  if (m.length() > 2 && !matches(body, 0.0)) return std::nullopt;
  if (!matches(h.last(), a)) return std::nullopt;
  return IsingChainParams{a, b};
}

ConstantMethod dense_method(const std::string& method) {
  if (method == "auto") return ConstantMethod::automatic;
  if (method == "sweep") return ConstantMethod::sweep;
  if (method == "power") return ConstantMethod::power;
  if (method == "eig") return ConstantMethod::eig;
  throw usage_error("unknown method '" + method + "'");
}

LogValue chain_constant(const ChainModel& m, const std::string& method, const Globals& g) {
  if (method == "oracle") return brute_constant(m, g.budget());
  if (method == "future") return constant_via_future(from_chain_form(m));
  if (method == "eig2x2") {
    const auto p = binary_example_params(m);
    if (!p) throw usage_error("method eig2x2 needs the homogeneous binary chain h(u,v) = a u + b u v");
    return binary_chain_constant(p->alpha, p->beta, m.length());
  }
  try {
    return normalizing_constant(m, dense_method(method));
  } catch (const gibbs::invalid_argument& e) {
    throw usage_error(std::string("method not applicable: ") + e.what());
  }
}

LogValue model_constant(const AnyModel& model, const std::string& method, const Globals& g) {
  return std::visit(
      [&](const auto& m) -> LogValue {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, ChainModel>) {
          return chain_constant(m, method, g);
        } else if constexpr (std::is_same_v<M, SingletonPairModel>) {
          if (method == "future") return constant_via_future(m);
          if (method == "oracle") return brute_constant(m, g.budget());
          return chain_constant(to_chain_form(m), method, g);
        } else if constexpr (std::is_same_v<M, RRangeModel>) {
          if (method == "oracle") return brute_constant(m, g.budget());
          if (method == "future" || method == "eig2x2") throw usage_error("method not applicable to r_range models");
          try {
            return normalizing_constant(lift_r_range(m, g.limits()), dense_method(method));
          } catch (const gibbs::invalid_argument& e) {
            throw usage_error(std::string("method not applicable: ") + e.what());
          }
        } else {
          if (method == "oracle") return brute_constant(m, g.budget());
          if (method == "auto") return spatial_constant(m, SweepDirection::right_to_left, g.limits());
          if (method == "future" || method == "eig2x2") throw usage_error("method not applicable to spatial models");
          return spatial_constant_dense(m, dense_method(method), g.limits());
        }
      },
      model);
}

std::size_t model_length(const AnyModel& model) {
  return std::visit(
      [](const auto& m) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, SpatialIsingModel>)
          return m.T;
        else
          return m.length();
      },
      model);
}

ModelDocument load(const std::string& path, std::optional<std::size_t> length) {
  ModelDocument doc = load_model_document(path);
  if (length) doc.model = with_length(doc.model, *length);
  return doc;
}

int cmd_constant(const Globals& g, const std::string& file, const std::string& method, std::optional<std::size_t> length) {
  const ModelDocument doc = load(file, length);
  print_constant(g, method, model_length(doc.model), model_constant(doc.model, method, g));
  return 0;
}

int cmd_marginal(const Globals& g, const std::string& file, const std::string& sites_text, const std::string& config_text,
                 std::optional<std::size_t> length) {
  const ModelDocument doc = load(file, length);
  const auto sites = parse_list<std::size_t>(sites_text, "--sites");
  const std::size_t len = model_length(doc.model);
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (sites[i] < 1 || sites[i] > len) throw usage_error("site " + std::to_string(sites[i]) + " out of range 1.." + std::to_string(len));
    if (i && sites[i] <= sites[i - 1]) throw usage_error("sites must be strictly increasing");
  }
  const Limits limits = g.limits();
  const MarginalTable table = std::visit(
      [&](const auto& m) -> MarginalTable {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, ChainModel>)
          return subset_marginal(m, sites, limits);
        else if constexpr (std::is_same_v<M, SingletonPairModel>)
          return subset_marginal(to_chain_form(m), sites, limits);
        else if constexpr (std::is_same_v<M, RRangeModel>)
          return r_range_subset_marginal(m, sites, limits);
        else
          return spatial_subset_marginal(m, sites, limits);
      },
      doc.model);
  const bool spatial = std::holds_alternative<SpatialIsingModel>(doc.model);
  auto label = [&](std::size_t s) -> std::string {
    if (spatial || doc.labels.empty() || s >= doc.labels.size()) return std::to_string(s);
    return doc.labels[s];
  };
  if (!config_text.empty()) {
    const auto config = parse_list<int>(config_text, "--config");
    if (config.size() != sites.size()) throw usage_error("--config must list one state per site");
    for (std::size_t i = 0; i < config.size(); ++i)
      if (config[i] < 0 || static_cast<std::size_t>(config[i]) >= table.dims[i]) throw usage_error("state out of range in --config");
    const double p = table.at(config);
    if (g.csv())
      std::cout << "probability\n" << general(p) << '\n';
    else
      std::cout << general(p) << '\n';
    return 0;
  }
  write_csv(std::cout, table, label);
  return 0;
}

std::vector<int> parse_spins(const std::string& text) {
  auto z = parse_list<int>(text, "--z");
  for (int s : z)
    if (s != -1 && s != 1) throw usage_error("spins in --z must be -1 or +1");
  return z;
}

int cmd_dichotomous(const Globals& g, const std::string& sub, double alpha, double beta, std::size_t r,
                    const std::string& z_text, std::optional<std::size_t> level) {
  if (r < 1 || r > 24) throw usage_error("--r must lie in 1..24");
  const IsingChainParams fp{alpha, beta};
  if (sub == "ladder") {
    const DichotomousLadder ladder(fp, r);
    std::cout << "j,alpha_j,beta_j\n";
    for (std::size_t j = r + 1; j >= 1; --j)
      std::cout << j << ',' << general(ladder.level(j).alpha, 17) << ',' << general(ladder.level(j).beta, 17) << '\n';
    return 0;
  }
  if (sub == "constant") {
    const DichotomousPipeline pipe(fp, r);
    print_constant(g, "dichotomous", pipe.ladder().length(), pipe.constant());
    return 0;
  }
  if (z_text.empty()) throw usage_error("--z is required for " + sub);
  const auto z = parse_spins(z_text);
  const DichotomousPipeline pipe(fp, r);
  double p = 0.0;
  if (sub == "joint") {
    if (z.size() != pipe.ladder().length())
      throw usage_error("--z must hold 2^r + 1 = " + std::to_string(pipe.ladder().length()) + " spins");
    p = pipe.joint(z);
  } else {
    const std::size_t j = level.value_or(r + 1);
    if (j < 1 || j > r + 1) throw usage_error("--level must lie in 1..r+1");
    const std::size_t count = (std::size_t{1} << (j - 1)) + 1;
    if (z.size() != count) throw usage_error("--z must hold |S_j| = " + std::to_string(count) + " spins");
    p = pipe.marginal(j, z);
  }
  if (g.csv())
    std::cout << "probability\n" << general(p) << '\n';
  else
    std::cout << general(p) << '\n';
  return 0;
}

int cmd_spatial(const Globals& g, const SpatialIsingModel& sm, std::optional<std::size_t> rank, std::size_t oversampling,
                const std::string& method) {
  sm.validate();
  if (rank) {
    const ApproximateConstant a = spatial_constant_low_rank(sm, *rank, oversampling, g.seed, g.limits());
    if (g.csv()) {
      std::cout << "method,m,T,log_C,log10_C,display,rank,reconstruction_error\n"
                << "low-rank," << sm.m << ',' << sm.T << ',' << a.constant.log_string() << ','
                << general(a.constant.log10()) << ',' << a.constant.scientific() << ',' << a.rank << ','
                << general(a.reconstruction_error, 6) << '\n';
    } else {
      std::cout << "C                     " << a.constant.scientific() << '\n'
                << "log C                 " << a.constant.log_string() << '\n'
                << "log10 C               " << general(a.constant.log10()) << '\n'
                << "rank                  " << a.rank << '\n'
                << "reconstruction error  " << general(a.reconstruction_error, 6) << '\n';
    }
    return 0;
  }
  LogValue c;
  if (method == "kron")
    c = spatial_constant(sm, SweepDirection::right_to_left, g.limits());
  else if (method == "oracle")
    c = brute_constant(sm, g.budget());
  else
    c = spatial_constant_dense(sm, dense_method(method), g.limits());
  print_constant(g, method, sm.T, c);
  return 0;
}

// Bench: every exact method on the same inputs, agreement against the first.

struct BenchRow {
  std::string method;
  std::string size;
  double seconds = 0.0;
  LogValue value;
};

template <class F>
BenchRow timed(const std::string& method, const std::string& size, F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  const LogValue v = f();
  const auto t1 = std::chrono::steady_clock::now();
  return {method, size, std::chrono::duration<double>(t1 - t0).count(), v};
}

std::uint64_t config_count_or_max(std::size_t n, std::size_t len) {
  std::uint64_t c = 1;
  for (std::size_t i = 0; i < len; ++i) {
    if (c > (std::uint64_t{1} << 62) / n) return std::uint64_t(-1);
    c *= n;
  }
  return c;
}

int cmd_bench(const Globals& g, const std::string& which, const std::string& sizes_text, const std::string& models_dir,
              std::size_t m_rows, double alpha, double beta, double delta) {
  std::vector<std::size_t> sizes;
  if (!sizes_text.empty()) {
    sizes = parse_list<std::size_t>(sizes_text, "--sizes");
  } else if (which == "table1") {
    sizes = {10, 20, 25, 500};
  } else if (which == "table2") {
    sizes = {1000, 10000, 1000000};
  } else if (which == "table3") {
    sizes = {500, 1000, 10000};
  } else {
    sizes = {2, 3, 4};
  }
  std::vector<std::vector<BenchRow>> groups;
  for (std::size_t len : sizes) {
    std::vector<BenchRow> rows;
    const std::string size = which == "table4" ? std::to_string(m_rows) + "x" + std::to_string(len) : std::to_string(len);
    if (which == "table1" || which == "table2") {
      if (len < 2) throw usage_error("sizes must be at least 2");
      const ChainModel m = std::get<ChainModel>(with_length(load_model(models_dir + "/example1.json"), len));
      rows.push_back(timed("sweep", size, [&] { return normalizing_constant(m, ConstantMethod::sweep); }));
      rows.push_back(timed("power", size, [&] { return normalizing_constant(m, ConstantMethod::power); }));
      rows.push_back(timed("eig", size, [&] { return normalizing_constant(m, ConstantMethod::eig); }));
      rows.push_back(timed("eig2x2", size, [&] { return binary_chain_constant(1.0, -0.8, len); }));
      if (len <= 100000) rows.push_back(timed("future", size, [&] { return constant_via_future(from_chain_form(m)); }));
      if (config_count_or_max(2, len) <= g.cap) rows.push_back(timed("oracle", size, [&] { return brute_constant(m, g.budget()); }));
    } else if (which == "table3") {
      if (len < 2) throw usage_error("sizes must be at least 2");
      const auto sp = std::get<SingletonPairModel>(with_length(load_model(models_dir + "/example2.json"), len));
      const ChainModel m = to_chain_form(sp);
      rows.push_back(timed("sweep", size, [&] { return normalizing_constant(m, ConstantMethod::sweep); }));
      rows.push_back(timed("power", size, [&] { return normalizing_constant(m, ConstantMethod::power); }));
      rows.push_back(timed("eig", size, [&] { return normalizing_constant(m, ConstantMethod::eig); }));
      if (len <= 100000) rows.push_back(timed("future", size, [&] { return constant_via_future(sp); }));
      if (config_count_or_max(4, len) <= g.cap) rows.push_back(timed("oracle", size, [&] { return brute_constant(sp, g.budget()); }));
    } else if (which == "table4") {
      const SpatialIsingModel sm{m_rows, len, alpha, beta, delta};
      sm.validate();
      rows.push_back(timed("kron", size, [&] { return spatial_constant(sm, SweepDirection::right_to_left, g.limits()); }));
      rows.push_back(timed("kron-reversed", size, [&] { return spatial_constant(sm, SweepDirection::left_to_right, g.limits()); }));
      if (sm.column_states() <= g.state_cap) {
        rows.push_back(timed("sweep", size, [&] { return spatial_constant_dense(sm, ConstantMethod::sweep, g.limits()); }));
        rows.push_back(timed("power", size, [&] { return spatial_constant_dense(sm, ConstantMethod::power, g.limits()); }));
        rows.push_back(timed("eig", size, [&] { return spatial_constant_dense(sm, ConstantMethod::eig, g.limits()); }));
      }
      if (m_rows * len < 64 && config_count_or_max(2, m_rows * len) <= g.cap)
        rows.push_back(timed("oracle", size, [&] { return brute_constant(sm, g.budget()); }));
    } else {
      throw usage_error("unknown table '" + which + "' (expected table1..table4)");
    }
    groups.push_back(std::move(rows));
  }

  bool all_agree = true;
  std::cout << "method,size,seconds,log10_C,display,agree\n";
  for (const auto& rows : groups) {
    const double ref = rows.front().value.log10();
    for (const BenchRow& r : rows) {
      const bool agree = std::abs(r.value.log10() - ref) <= 1e-9;
      all_agree = all_agree && agree;
      std::cout << r.method << ',' << r.size << ',' << general(r.seconds, 6) << ',' << fixed(r.value.log10(), 9) << ','
                << r.value.scientific() << ',' << (agree ? "agree" : "DISAGREE") << '\n';
    }
  }
  return all_agree ? 0 : kCrossCheck;
}

// oracle-check: seeded cross-validation of every exact path against the
// enumeration oracle.

struct CheckResult {
  std::string name;
  std::size_t cases = 0;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool pass() const { return max_error <= tolerance; }
};

double rel_log_error(LogValue a, LogValue b) {
  return std::abs(a.log_magnitude() - b.log_magnitude()) / std::max(1.0, std::abs(b.log_magnitude()));
}

int cmd_oracle_check(const Globals& g, std::size_t cases) {
  std::vector<CheckResult> results;
  auto run = [&](const std::string& name, double tol, const std::function<double(ModelSampler&)>& one) {
    CheckResult r{name, cases, 0.0, tol};
    for (std::size_t i = 0; i < cases; ++i) {
      ModelSampler s(g.seed * 1000003ULL + i);
      r.max_error = std::max(r.max_error, one(s));
    }
    results.push_back(r);
  };

  run("chain constant (sweep, power, eig, future)", 1e-10, [&](ModelSampler& s) {
    const ChainModel m = s.chain(s.integer(2, 3), s.integer(2, 8), s.integer(0, 1) == 1);
    const LogValue ref = brute_constant(m, g.budget());
    double e = std::max(rel_log_error(normalizing_constant(m, ConstantMethod::sweep), ref),
                        rel_log_error(constant_via_future(from_chain_form(m)), ref));
    if (m.log_potentials().is_repeated())
      e = std::max({e, rel_log_error(normalizing_constant(m, ConstantMethod::power), ref),
                    rel_log_error(normalizing_constant(m, ConstantMethod::eig), ref)});
    return e;
  });
  run("subset marginals", 1e-12, [&](ModelSampler& s) {
    const ChainModel m = s.chain(s.integer(2, 3), s.integer(2, 7));
    std::vector<std::size_t> sites;
    for (std::size_t t = 1; t <= m.length(); ++t)
      if (s.integer(0, 2) == 0 && sites.size() < 3) sites.push_back(t);
    if (sites.empty()) sites.push_back(s.integer(1, m.length()));
    const MarginalTable a = subset_marginal(m, sites, g.limits());
    const MarginalTable b = brute_marginal_table(m, sites, g.budget());
    double e = 0.0;
    for (std::size_t i = 0; i < a.probs.size(); ++i) e = std::max(e, std::abs(a.probs[i] - b.probs[i]));
    return e;
  });
  run("r-range lift (r = 2)", 1e-12, [&](ModelSampler& s) {
    const RRangeModel m = s.r_range(2, s.integer(3, 8), 2);
    return rel_log_error(normalizing_constant(lift_r_range(m, g.limits())), brute_constant(m, g.budget()));
  });
  run("two-lag recursion", 1e-12, [&](ModelSampler& s) {
    const TwoLagModel m = s.two_lag(s.integer(2, 3), s.integer(3, 7));
    return rel_log_error(two_lag_constant(m, g.limits()), brute_constant(m, g.budget()));
  });
  run("spatial constant", 1e-10, [&](ModelSampler& s) {
    const std::size_t m = s.integer(1, 4);
    const std::size_t T = s.integer(2, std::max<std::size_t>(2, 16 / m));
    const SpatialIsingModel sm{m, T, s.real(), s.real(), s.real()};
    return rel_log_error(spatial_constant(sm), brute_constant(sm, g.budget()));
  });
  run("dichotomous joint (T = 5)", 1e-10, [&](ModelSampler& s) {
    const IsingChainParams fp{s.real(), s.real()};
    const DichotomousPipeline pipe(fp, 2);
    const ChainModel& chain = pipe.chain();
    const LogValue c = normalizing_constant(chain);
    double e = 0.0;
    detail::enumerate(2, 5, g.budget(), [&](std::span<const int> z) {
      std::vector<int> spins(z.size());
      for (std::size_t i = 0; i < z.size(); ++i) spins[i] = z[i] ? 1 : -1;
      const double ref = std::exp(energy(chain, z) - c.log_magnitude());
      e = std::max(e, std::abs(pipe.joint(spins) - ref) / ref);
    });
    return e;
  });

  bool ok = true;
  if (g.csv()) std::cout << "check,cases,max_error,tolerance,status\n";
  for (const CheckResult& r : results) {
    ok = ok && r.pass();
    if (g.csv()) {
      std::cout << r.name << ',' << r.cases << ',' << general(r.max_error, 3) << ',' << general(r.tolerance, 3) << ','
                << (r.pass() ? "pass" : "FAIL") << '\n';
    } else {
      char line[160];
      std::snprintf(line, sizeof line, "%-44s %5zu  max err %-10.3g %s", r.name.c_str(), r.cases, r.max_error,
                    r.pass() ? "pass" : "FAIL");
      std::cout << line << '\n';
    }
  }
  return ok ? 0 : kCrossCheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact normalizing constants and marginals of chain and lattice Gibbs distributions"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--output", g.output, "Output format")->check(CLI::IsMember({"text", "csv"}));
  app.add_option("--cap", g.cap, "Enumeration budget and marginal-table entry cap");
  app.add_option("--state-cap", g.state_cap, "Largest dense transfer matrix side");
  app.add_option("--seed", g.seed, "Seed for randomized paths");

  std::function<int()> action;

  std::string file, method = "auto", sites, config;
  std::optional<std::size_t> length;
  auto* constant = app.add_subcommand("constant", "Normalizing constant of a model file");
  constant->add_option("file", file, "Model file")->required();
  constant->add_option("--method", method, "auto|sweep|power|eig|eig2x2|future|oracle")
      ->check(CLI::IsMember({"auto", "sweep", "power", "eig", "eig2x2", "future", "oracle"}));
  constant->add_option("--length", length, "Override the length of a homogeneous model");
  constant->callback([&] { action = [&] { return cmd_constant(g, file, method, length); }; });

  auto* marginal = app.add_subcommand("marginal", "Marginal table on a site subset");
  marginal->add_option("file", file, "Model file")->required();
  marginal->add_option("--sites", sites, "Comma-separated increasing sites (1-based)")->required();
  marginal->add_option("--config", config, "Comma-separated states; prints one probability");
  marginal->add_option("--length", length, "Override the length of a homogeneous model");
  marginal->callback([&] { action = [&] { return cmd_marginal(g, file, sites, config, length); }; });

  std::string dsub, z;
  double alpha = 0.0, beta = 0.0;
  std::size_t r = 1;
  std::optional<std::size_t> level;
  auto* dich = app.add_subcommand("dichotomous", "Dichotomous thinning of the Ising chain");
  dich->add_option("action", dsub, "ladder|joint|marginal|constant")
      ->required()
      ->check(CLI::IsMember({"ladder", "joint", "marginal", "constant"}));
  dich->add_option("--alpha", alpha)->required();
  dich->add_option("--beta", beta)->required();
  dich->add_option("--r", r, "Depth; T = 2^r + 1")->required();
  dich->add_option("--z", z, "Comma-separated spins in {-1, 1}");
  dich->add_option("--level", level, "Level j for marginal (default r + 1)");
  dich->callback([&] { action = [&] { return cmd_dichotomous(g, dsub, alpha, beta, r, z, level); }; });

  SpatialIsingModel sm;
  std::optional<std::size_t> rank;
  std::size_t oversampling = 10;
  std::string smethod = "kron";
  auto* spatial = app.add_subcommand("spatial-constant", "Constant of the m x T lattice Ising model");
  spatial->add_option("--m", sm.m)->required();
  spatial->add_option("--T", sm.T)->required();
  spatial->add_option("--alpha", sm.alpha);
  spatial->add_option("--beta", sm.beta);
  spatial->add_option("--delta", sm.delta);
  spatial->add_option("--method", smethod, "kron|sweep|power|eig|oracle")
      ->check(CLI::IsMember({"kron", "sweep", "power", "eig", "oracle"}));
  spatial->add_option("--approx-rank", rank, "Use a randomized rank-k factorization of H");
  spatial->add_option("--oversampling", oversampling, "Extra random directions for --approx-rank");
  spatial->callback([&] { action = [&] { return cmd_spatial(g, sm, rank, oversampling, smethod); }; });

  std::string table = "table1", sizes, models_dir = GIBBS_MODELS_DIR;
  std::size_t bench_m = 3;
  double balpha = 0.5, bbeta = 0.3, bdelta = -0.2;
  auto* bench = app.add_subcommand("bench", "Method agreement and timings on the reference grids");
  bench->add_option("--table", table, "table1|table2|table3|table4");
  bench->add_option("--sizes", sizes, "Comma-separated lengths");
  bench->add_option("--models", models_dir, "Directory holding example1.json and example2.json");
  bench->add_option("--m", bench_m, "Lattice height for table4");
  bench->add_option("--alpha", balpha, "table4 alpha");
  bench->add_option("--beta", bbeta, "table4 beta");
  bench->add_option("--delta", bdelta, "table4 delta");
  bench->callback([&] {
    action = [&] { return cmd_bench(g, table, sizes, models_dir, bench_m, balpha, bbeta, bdelta); };
  });

  std::size_t cases = 50;
  auto* check = app.add_subcommand("oracle-check", "Cross-validate every exact path against enumeration");
  check->add_option("--cases", cases, "Random models per check");
  check->callback([&] { action = [&] { return cmd_oracle_check(g, cases); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Error& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    return action();
  } catch (const usage_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const capacity_exceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCapacity;
  } catch (const invalid_model& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const gibbs::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
