// Command-line driver: runs experiments from a JSON config, prints the default config,
// and exports generated topologies as edge lists.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "maoplb/maoplb.hpp"

namespace
{

constexpr int exit_config_error = 1;
constexpr int exit_runtime_error = 2;

std::string read_file(const std::string &path)
{
  std::ifstream is(path, std::ios::binary);
  if (!is)
  {
    throw maoplb::ConfigError("cannot read config file '" + path + "'");
  }
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Multi-agent constrained linear bandit simulator"};
  app.require_subcommand(1);

  std::string config_path, output_dir;
  std::size_t threads = 0;
  auto *run = app.add_subcommand("run", "Run an experiment described by a JSON config");
  run->add_option("config", config_path, "Config file (JSON)")->required();
  run->add_option("-o,--output-dir", output_dir, "Override output_dir from the config");
  run->add_option("-j,--threads", threads, "Worker threads (0 = hardware concurrency)");

  auto *defaults = app.add_subcommand("defaults", "Print the default configuration");

  std::string graph_type = "erdos_renyi", edges_out;
  std::size_t nodes = 10, degree = 2;
  double prob = 0.5;
  std::uint64_t seed = 1;
  auto *topo = app.add_subcommand("topology", "Generate a topology and report its structure matrix");
  topo->add_option("--type", graph_type, "erdos_renyi | k_regular | complete | path")
    ->check(CLI::IsMember({"erdos_renyi", "k_regular", "complete", "path"}));
  topo->add_option("-n,--nodes", nodes, "Node count");
  topo->add_option("-p,--prob", prob, "Edge probability (erdos_renyi)");
  topo->add_option("-k,--degree", degree, "Regularity (k_regular)");
  topo->add_option("--seed", seed, "Seed (erdos_renyi)");
  topo->add_option("--edges", edges_out, "Write the edge list to this file ('-' for stdout)");

  CLI11_PARSE(app, argc, argv);

  try
  {
    if (*run)
    {
      maoplb::ExperimentSpec spec;
      try
      {
        spec = maoplb::parse_config(read_file(config_path));
        if (!output_dir.empty())
        {
          spec.output_dir = output_dir;
        }
        if (threads)
        {
          spec.threads = threads;
        }
        maoplb::sweep_points(spec);
      }
      catch (const maoplb::Error &e)
      {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config_error;
      }
      const auto res = maoplb::run_experiment(spec);
      for (const auto &w : res.warnings)
      {
        std::cerr << "warning: " << w << '\n';
      }
      for (const auto &f : res.csv_files)
      {
        std::cout << f.string() << '\n';
      }
      std::cout << res.manifest.string() << '\n';
      return 0;
    }
    if (*defaults)
    {
      auto j = maoplb::config_to_json(maoplb::SimConfig{});
      j["replications"] = 1;
      j["output_dir"] = "out";
      std::cout << j.dump(2) << '\n';
      return 0;
    }
    if (*topo)
    {
      maoplb::GraphSpec g;
      try
      {
        g.type = maoplb::detail::parse_graph_type(graph_type);
      }
      catch (const maoplb::Error &e)
      {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config_error;
      }
      g.p = prob;
      g.k = degree;
      maoplb::Rng rng(seed);
      maoplb::Topology t;
      try
      {
        t = maoplb::make_topology(g, nodes, rng);
      }
      catch (const maoplb::GraphError &e)
      {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config_error;
      }
      const auto w = maoplb::build_structure_matrix(t);
      std::cout << "nodes " << t.size() << " edges " << t.edge_count() << " lambda2_abs "
                << maoplb::detail::format_double(w.lambda2_abs) << " spectral_gap "
                << maoplb::detail::format_double(w.spectral_gap) << '\n';
      if (edges_out == "-")
      {
        maoplb::write_edge_list(std::cout, t);
      }
      else if (!edges_out.empty())
      {
        std::ofstream os(edges_out);
        if (!os)
        {
          throw maoplb::Error("cannot write '" + edges_out + "'");
        }
        maoplb::write_edge_list(os, t);
      }
      return 0;
    }
  }
  catch (const maoplb::ConfigError &e)
  {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config_error;
  }
  catch (const std::exception &e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return exit_runtime_error;
  }
  return 0;
}
