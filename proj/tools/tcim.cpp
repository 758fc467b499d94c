// tcim: triangle counting and in-memory data-flow simulation front end.
//
//   tcim count            --input g.txt [--engine bitwise|oracle|trace]
//   tcim compress-stats   --input g.txt --slice-length 64,128,256
//   tcim simulate         --input g.txt --policy priority --capacity-mb 8
//   tcim compare-policies --gnp 256,0.05 --seed 7 --capacity-slices 16,64
//   tcim --rerun report.json
//
// Exit codes: 0 success, 2 usage error, 3 input parse error, 4 config error.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "tcim/commands.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitParse = 3;
constexpr int kExitConfig = 4;
constexpr int kExitFailure = 1;

struct Flags {
  std::string input;
  std::string gnp;
  std::uint64_t seed = 1;
  std::vector<std::uint32_t> slice_lengths{64};
  std::uint32_t index_width = 32;
  std::vector<double> capacity_mb;
  std::vector<std::string> capacity_slices;
  std::string policy = "priority";
  std::string order = "sequential";
  std::string engine = "bitwise";
  std::string cost_config;
  std::string json_out;
  std::string compressed_out;
  unsigned threads = 1;
};

void add_input_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--input", f.input, "SNAP edge list (.txt or .txt.gz)");
  cmd->add_option("--gnp", f.gnp, "synthetic G(n,p) graph instead of --input, as N,P");
  cmd->add_option("--seed", f.seed, "seed for the synthetic graph");
  cmd->add_option("--json-out", f.json_out, "write the JSON report here");
}

void add_slice_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--slice-length", f.slice_lengths, "slice length |S| in bits")->delimiter(',');
  cmd->add_option("--index-width", f.index_width, "slice index width |D| in bits");
}

void add_sim_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--capacity-mb", f.capacity_mb, "array size in MiB (default 8)")->delimiter(',');
  cmd->add_option("--capacity-slices", f.capacity_slices, "array size in slices, or 'inf'")
      ->delimiter(',');
  cmd->add_option("--order", f.order, "row order")->check(CLI::IsMember({"sequential", "zigzag"}));
  cmd->add_option("--cost-config", f.cost_config, "cost model file (ns / pJ)");
}

tcim::RunSpec to_run_spec(const std::string& command, const Flags& f) {
  tcim::RunSpec s;
  s.command = command;
  s.input = f.input;
  if (!f.gnp.empty()) {
    const auto comma = f.gnp.find(',');
    if (comma == std::string::npos) throw tcim::ConfigError("--gnp expects N,P");
    try {
      s.gnp = tcim::GnpSpec{std::stoul(f.gnp.substr(0, comma)), std::stod(f.gnp.substr(comma + 1))};
    } catch (const std::logic_error&) {
      throw tcim::ConfigError("--gnp expects N,P, got '" + f.gnp + "'");
    }
  }
  s.seed = f.seed;
  s.slice_lengths = f.slice_lengths;
  s.index_width = f.index_width;
  s.policy = tcim::parse_policy(f.policy);
  s.order = tcim::parse_row_order(f.order);
  s.engine = tcim::parse_engine(f.engine);
  s.threads = f.threads;
  if (!f.cost_config.empty()) s.cost = tcim::load_cost_config(f.cost_config);

  const std::uint32_t first_len = f.slice_lengths.empty() ? 64 : f.slice_lengths.front();
  for (double mb : f.capacity_mb) {
    if (!(mb > 0.0)) throw tcim::ConfigError("--capacity-mb must be positive");
    s.capacities.push_back(tcim::capacity_slices_from_bytes(
        static_cast<std::uint64_t>(mb * static_cast<double>(tcim::kMebibyte)),
        {first_len, f.index_width}));
  }
  for (const std::string& c : f.capacity_slices) {
    if (c == "inf") {
      s.capacities.push_back(tcim::kUnboundedCapacity);
      continue;
    }
    try {
      s.capacities.push_back(std::stoull(c));
    } catch (const std::logic_error&) {
      throw tcim::ConfigError("--capacity-slices expects integers or 'inf', got '" + c + "'");
    }
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Triangle counting with bitwise AND+BitCount and an in-memory data-flow simulator"};
  app.require_subcommand(0, 1);
  Flags f;
  std::string rerun;
  std::string rerun_json_out;
  app.add_option("--rerun", rerun, "re-run the configuration echoed in a JSON report");
  app.add_option("--rerun-json-out", rerun_json_out, "JSON output for --rerun");

  auto* count = app.add_subcommand("count", "count triangles");
  add_input_flags(count, f);
  count->add_option("--engine", f.engine, "counting engine")
      ->check(CLI::IsMember({"bitwise", "oracle", "trace"}));
  count->add_option("--threads", f.threads, "threads for the bitwise engine");

  auto* stats = app.add_subcommand("compress-stats", "slice compression metrics");
  add_input_flags(stats, f);
  add_slice_flags(stats, f);
  stats->add_option("--compressed-out", f.compressed_out,
                    "write the compressed graph (single slice length only)");

  auto* sim = app.add_subcommand("simulate", "simulate the in-memory data flow");
  add_input_flags(sim, f);
  add_slice_flags(sim, f);
  add_sim_flags(sim, f);
  sim->add_option("--policy", f.policy, "replacement policy")
      ->check(CLI::IsMember({"lru", "priority"}));

  auto* compare = app.add_subcommand("compare-policies", "LRU versus PRIORITY replacement");
  add_input_flags(compare, f);
  add_slice_flags(compare, f);
  add_sim_flags(compare, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    tcim::RunSpec spec;
    std::string json_out;
    if (!rerun.empty()) {
      std::ifstream in(rerun);
      if (!in) throw tcim::ConfigError("cannot open report " + rerun);
      nlohmann::json report;
      try {
        report = nlohmann::json::parse(in);
        spec = report.at("config").get<tcim::RunSpec>();
      } catch (const nlohmann::json::exception& e) {
        throw tcim::ConfigError("report " + rerun + " has no usable config: " + e.what());
      }
      json_out = rerun_json_out;
    } else if (app.get_subcommands().empty()) {
      std::cerr << app.help();
      return kExitUsage;
    } else {
      const std::string command = app.get_subcommands().front()->get_name();
      spec = to_run_spec(command, f);
      json_out = f.json_out;
    }

    const nlohmann::json report = tcim::run_command(spec, std::cout);

    if (!f.compressed_out.empty()) {
      const tcim::RunSpec resolved = tcim::resolve(spec);
      if (resolved.slice_lengths.size() != 1) {
        throw tcim::ConfigError("--compressed-out needs exactly one slice length");
      }
      std::ofstream out(f.compressed_out, std::ios::binary);
      if (!out) throw tcim::ConfigError("cannot write " + f.compressed_out);
      tcim::write_compressed(out, tcim::compress(tcim::orient(tcim::load_input(resolved)),
                                                 {resolved.slice_lengths.front(), resolved.index_width}));
    }
    if (!json_out.empty()) {
      std::ofstream out(json_out);
      if (!out) throw tcim::ConfigError("cannot write " + json_out);
      out << report.dump(2) << '\n';
    }
    return kExitOk;
  } catch (const tcim::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const tcim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const tcim::DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const tcim::CapacityError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
