#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "scaling_lens/cli/config.hpp"
#include "scaling_lens/cli/output.hpp"

namespace scaling_lens::cli {

std::string version();

/// Everything a command produces, before anything touches the disk.
struct CommandOutput {
  Table data;
  // Extra tables written next to the data file as <out>.<suffix>.<format>.
  std::map<std::string, Table> side_tables;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  std::vector<std::string> warnings;
};

/// Runs the pipeline mapped to cfg.command().
CommandOutput execute(const Config& cfg);

/// Full CLI: argv without the program name. Returns the exit status
/// (0 ok, 1 validation failure, 2 numeric failure).
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace scaling_lens::cli
