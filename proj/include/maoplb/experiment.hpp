#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "maoplb/simulation.hpp"

#ifndef MAOPLB_VERSION
#define MAOPLB_VERSION "0.1.0"
#endif

namespace maoplb
{

struct SweepAxis
{
  std::string axis;  // graph.p | graph.k | n_agents
  std::vector<double> values;
};

struct ExperimentSpec
{
  SimConfig base;
  std::optional<SweepAxis> sweep;
  std::size_t replications = 1;
  std::string output_dir = "out";
  // 0 picks the hardware concurrency.
  std::size_t threads = 0;
};

inline constexpr const char *csv_header =
  "run_id,seed,t,episode,phase,x0,x1,exp_reward,exp_cost,sampled_cost,inst_regret,cum_regret,"
  "est_error";

namespace detail
{
using json = nlohmann::json;

inline std::string join_path(const std::string &prefix, const std::string &key)
{
  return prefix.empty() ? key : prefix + "." + key;
}

inline void reject_unknown(const json &obj, const std::string &prefix,
                           const std::set<std::string> &allowed)
{
  for (auto it = obj.begin(); it != obj.end(); ++it)
  {
    if (!allowed.count(it.key()))
    {
      throw ConfigError("unknown key '" + join_path(prefix, it.key()) + "'");
    }
  }
}

inline const json &expect_object(const json &j, const std::string &path)
{
  if (!j.is_object())
  {
    throw ConfigError("'" + path + "' must be an object");
  }
  return j;
}

inline double get_number(const json &obj, const std::string &key, const std::string &path,
                         double fallback)
{
  if (!obj.contains(key))
  {
    return fallback;
  }
  const auto &v = obj.at(key);
  if (!v.is_number())
  {
    throw ConfigError("'" + path + "' must be a number");
  }
  return v.get<double>();
}

inline std::uint64_t get_count(const json &obj, const std::string &key, const std::string &path,
                               std::uint64_t fallback)
{
  if (!obj.contains(key))
  {
    return fallback;
  }
  const auto &v = obj.at(key);
  if (!v.is_number_unsigned())
  {
    throw ConfigError("'" + path + "' must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

inline Vector get_vector(const json &obj, const std::string &key, const std::string &path,
                         const Vector &fallback)
{
  if (!obj.contains(key))
  {
    return fallback;
  }
  const auto &v = obj.at(key);
  if (!v.is_array() || v.empty())
  {
    throw ConfigError("'" + path + "' must be a non-empty array of numbers");
  }
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); i++)
  {
    if (!v[i].is_number())
    {
      throw ConfigError("'" + path + "[" + std::to_string(i) + "]' must be a number");
    }
    out[i] = v[i].get<double>();
  }
  return out;
}

inline GraphSpec::Type parse_graph_type(const std::string &s)
{
  if (s == "erdos_renyi")
  {
    return GraphSpec::Type::erdos_renyi;
  }
  if (s == "k_regular")
  {
    return GraphSpec::Type::k_regular;
  }
  if (s == "complete")
  {
    return GraphSpec::Type::complete;
  }
  if (s == "path")
  {
    return GraphSpec::Type::path;
  }
  throw ConfigError("'graph.type' must be one of erdos_renyi, k_regular, complete, path");
}

inline json vector_json(const Vector &v) { return json(v.data()); }

inline std::string format_double(double x)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string format_short(double x)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}
}  // namespace detail

inline nlohmann::json config_to_json(const SimConfig &c)
{
  using detail::vector_json;
  nlohmann::json g = {{"type", to_string(c.graph.type)}};
  if (c.graph.type == GraphSpec::Type::erdos_renyi)
  {
    g["p"] = c.graph.p;
  }
  if (c.graph.type == GraphSpec::Type::k_regular)
  {
    g["k"] = c.graph.k;
  }
  return {{"n_agents", c.n_agents},
          {"dim", c.dim},
          {"horizon", c.horizon},
          {"tau", c.tau},
          {"c0", c.c0},
          {"ridge", c.ridge},
          {"noise_r", c.noise_r},
          {"delta", c.delta},
          {"s_bound", c.s_bound},
          {"local_spread", c.local_spread},
          {"theta_global", vector_json(c.theta_global)},
          {"mu_global", vector_json(c.mu_global)},
          {"decision_set",
           {{"center", vector_json(c.decision_set.center)},
            {"radius", c.decision_set.radius},
            {"points", c.decision_set.points}}},
          {"graph", g},
          {"seed", c.seed}};
}

//
// Parses a JSON experiment document. Missing keys take the SimConfig defaults, unknown
// keys are rejected, and every error names the offending key (or the byte offset for
// syntax errors).
//
inline ExperimentSpec parse_config(const std::string &text)
{
  using detail::json;
  json doc;
  try
  {
    doc = text.find_first_not_of(" \t\r\n") == std::string::npos ? json::object()
                                                                  : json::parse(text);
  }
  catch (const json::parse_error &e)
  {
    throw ConfigError("config is not valid JSON at byte " + std::to_string(e.byte) + ": " +
                      e.what());
  }
  detail::expect_object(doc, "<root>");
  detail::reject_unknown(doc, "",
                         {"n_agents", "dim", "horizon", "tau", "c0", "ridge", "noise_r", "delta",
                          "s_bound", "local_spread", "theta_global", "mu_global", "decision_set",
                          "graph", "seed", "replications", "sweep", "output_dir", "threads"});

  ExperimentSpec spec;
  SimConfig &c = spec.base;
  c.n_agents = detail::get_count(doc, "n_agents", "n_agents", c.n_agents);
  c.dim = detail::get_count(doc, "dim", "dim", c.dim);
  c.horizon = detail::get_count(doc, "horizon", "horizon", c.horizon);
  c.tau = detail::get_number(doc, "tau", "tau", c.tau);
  c.c0 = detail::get_number(doc, "c0", "c0", c.c0);
  c.ridge = detail::get_number(doc, "ridge", "ridge", c.ridge);
  c.noise_r = detail::get_number(doc, "noise_r", "noise_r", c.noise_r);
  c.delta = detail::get_number(doc, "delta", "delta", c.delta);
  c.s_bound = detail::get_number(doc, "s_bound", "s_bound", c.s_bound);
  c.local_spread = detail::get_number(doc, "local_spread", "local_spread", c.local_spread);
  c.theta_global = detail::get_vector(doc, "theta_global", "theta_global", c.theta_global);
  c.mu_global = detail::get_vector(doc, "mu_global", "mu_global", c.mu_global);
  c.seed = detail::get_count(doc, "seed", "seed", c.seed);
  spec.replications = detail::get_count(doc, "replications", "replications", 1);
  spec.threads = detail::get_count(doc, "threads", "threads", 0);

  if (doc.contains("decision_set"))
  {
    const auto &d = detail::expect_object(doc.at("decision_set"), "decision_set");
    detail::reject_unknown(d, "decision_set", {"center", "radius", "points"});
    c.decision_set.center =
      detail::get_vector(d, "center", "decision_set.center", c.decision_set.center);
    c.decision_set.radius =
      detail::get_number(d, "radius", "decision_set.radius", c.decision_set.radius);
    c.decision_set.points =
      detail::get_count(d, "points", "decision_set.points", c.decision_set.points);
  }
  if (doc.contains("graph"))
  {
    const auto &g = detail::expect_object(doc.at("graph"), "graph");
    detail::reject_unknown(g, "graph", {"type", "p", "k"});
    if (g.contains("type"))
    {
      if (!g.at("type").is_string())
      {
        throw ConfigError("'graph.type' must be a string");
      }
      c.graph.type = detail::parse_graph_type(g.at("type").get<std::string>());
    }
    c.graph.p = detail::get_number(g, "p", "graph.p", c.graph.p);
    c.graph.k = detail::get_count(g, "k", "graph.k", c.graph.k);
  }
  if (doc.contains("output_dir"))
  {
    if (!doc.at("output_dir").is_string())
    {
      throw ConfigError("'output_dir' must be a string");
    }
    spec.output_dir = doc.at("output_dir").get<std::string>();
  }
  if (doc.contains("sweep"))
  {
    const auto &s = detail::expect_object(doc.at("sweep"), "sweep");
    detail::reject_unknown(s, "sweep", {"axis", "values"});
    if (!s.contains("axis") || !s.at("axis").is_string())
    {
      throw ConfigError("'sweep.axis' is required and must be a string");
    }
    SweepAxis axis;
    axis.axis = s.at("axis").get<std::string>();
    if (axis.axis != "graph.p" && axis.axis != "graph.k" && axis.axis != "n_agents")
    {
      throw ConfigError("'sweep.axis' must be one of graph.p, graph.k, n_agents");
    }
    if (!s.contains("values"))
    {
      throw ConfigError("'sweep.values' is required");
    }
    axis.values = detail::get_vector(s, "values", "sweep.values", {}).data();
    if (axis.axis != "graph.p")
    {
      for (double v : axis.values)
      {
        if (v < 1.0 || v != std::floor(v))
        {
          throw ConfigError("'sweep.values' must be positive integers for axis " + axis.axis);
        }
      }
    }
    if (axis.axis == "graph.p" && c.graph.type != GraphSpec::Type::erdos_renyi)
    {
      throw ConfigError("sweep over graph.p requires graph.type erdos_renyi");
    }
    if (axis.axis == "graph.k" && c.graph.type != GraphSpec::Type::k_regular)
    {
      throw ConfigError("sweep over graph.k requires graph.type k_regular");
    }
    spec.sweep = std::move(axis);
  }
  if (spec.replications < 1)
  {
    throw ConfigError("'replications' must be at least 1");
  }
  c.validate();
  return spec;
}

struct SweepPoint
{
  std::string label;  // file stem
  SimConfig config;   // seed field holds the base seed
};

inline std::vector<SweepPoint> sweep_points(const ExperimentSpec &spec)
{
  std::vector<SweepPoint> out;
  if (!spec.sweep)
  {
    out.push_back({"run", spec.base});
    return out;
  }
  for (double v : spec.sweep->values)
  {
    SimConfig c = spec.base;
    if (spec.sweep->axis == "graph.p")
    {
      c.graph.p = v;
    }
    else if (spec.sweep->axis == "graph.k")
    {
      c.graph.k = static_cast<std::size_t>(v);
    }
    else
    {
      c.n_agents = static_cast<std::size_t>(v);
    }
    c.validate();
    out.push_back({spec.sweep->axis + "_" + detail::format_short(v), c});
  }
  return out;
}

inline void append_csv_rows(std::string &out, std::size_t run_id, const Trace &trace)
{
  using detail::format_double;
  for (const auto &r : trace.rows)
  {
    out += std::to_string(run_id);
    out += ',';
    out += std::to_string(trace.config.seed);
    out += ',';
    out += std::to_string(r.t);
    out += ',';
    out += std::to_string(r.episode);
    out += ',';
    out += to_string(r.phase);
    out += ',';
    out += format_double(r.action[0]);
    out += ',';
    out += format_double(r.action.size() > 1 ? r.action[1] : 0.0);
    for (double v : {r.exp_reward, r.exp_cost, r.sampled_cost, r.inst_regret, r.cum_regret,
                     r.est_error})
    {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
}

namespace detail
{
inline void write_atomically(const std::filesystem::path &path, const std::string &content)
{
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os)
    {
      throw Error("cannot open '" + tmp + "' for writing");
    }
    os << content;
    if (!os.flush())
    {
      throw Error("write to '" + tmp + "' failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
  {
    throw Error("cannot move '" + tmp + "' into place: " + ec.message());
  }
}
}  // namespace detail

struct ExperimentResult
{
  std::vector<std::filesystem::path> csv_files;
  std::filesystem::path manifest;
  std::vector<std::string> warnings;
};

//
// Runs every sweep point and replication and writes one CSV per point plus
// manifest.json. Replication r of point j uses derive_seed(base seed, j, r). Replications
// run concurrently; rows are assembled in replication order so output is deterministic.
//
inline ExperimentResult run_experiment(const ExperimentSpec &spec)
{
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(spec.output_dir, ec);
  if (ec)
  {
    throw Error("cannot create output directory '" + spec.output_dir + "': " + ec.message());
  }
  const auto points = sweep_points(spec);
  std::size_t workers = spec.threads ? spec.threads : std::thread::hardware_concurrency();
  workers = std::max<std::size_t>(1, workers);

  ExperimentResult result;
  std::set<std::string> warnings;
  nlohmann::json manifest = {{"version", MAOPLB_VERSION},
                             {"base_seed", spec.base.seed},
                             {"replications", spec.replications},
                             {"seed_derivation", "derive_seed(base_seed, point_index, replication)"},
                             {"csv_header", csv_header},
                             {"points", nlohmann::json::array()}};
  if (spec.sweep)
  {
    manifest["sweep"] = {{"axis", spec.sweep->axis}, {"values", spec.sweep->values}};
  }

  for (std::size_t j = 0; j < points.size(); j++)
  {
    std::vector<SimConfig> configs(spec.replications, points[j].config);
    std::vector<std::uint64_t> seeds;
    for (std::size_t r = 0; r < spec.replications; r++)
    {
      configs[r].seed = derive_seed(spec.base.seed, j, r);
      seeds.push_back(configs[r].seed);
    }
    std::vector<std::string> chunks(spec.replications);
    for (std::size_t start = 0; start < spec.replications; start += workers)
    {
      const std::size_t stop = std::min(spec.replications, start + workers);
      std::vector<std::future<Trace>> futures;
      for (std::size_t r = start; r < stop; r++)
      {
        futures.push_back(std::async(std::launch::async, [&configs, r] { return run(configs[r]); }));
      }
      for (std::size_t r = start; r < stop; r++)
      {
        const Trace tr = futures[r - start].get();
        warnings.insert(tr.warnings.begin(), tr.warnings.end());
        append_csv_rows(chunks[r], r, tr);
      }
    }
    std::string content = std::string(csv_header) + "\n";
    for (const auto &c : chunks)
    {
      content += c;
    }
    const fs::path file = fs::path(spec.output_dir) / (points[j].label + ".csv");
    detail::write_atomically(file, content);
    result.csv_files.push_back(file);

    nlohmann::json cfg = config_to_json(points[j].config);
    cfg["seed"] = spec.base.seed;
    manifest["points"].push_back({{"index", j},
                                  {"file", file.filename().string()},
                                  {"config", cfg},
                                  {"seeds", seeds}});
  }
  result.manifest = fs::path(spec.output_dir) / "manifest.json";
  detail::write_atomically(result.manifest, manifest.dump(2) + "\n");
  result.warnings.assign(warnings.begin(), warnings.end());
  return result;
}

}  // namespace maoplb
