#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "hforge/expr.hpp"

namespace hforge {

using Json = nlohmann::ordered_json;

enum ExitCode : int {
  kExitPass = 0,
  kExitFail = 1,
  kExitConfig = 2,
  kExitParse = 3,
  kExitUnknownTask = 4,
  kExitUnbound = 5,
  kExitEval = 6,
  kExitIO = 7,
};

// "a+bi", "a-bi", "a", "bi", "i", "-i"; components use strtod syntax.
cplx parse_complex(const std::string& text);
// Both parts with %.17g, so parse_complex(format_complex(z)) == z.
std::string format_complex(cplx z);

using Cell = std::variant<cplx, double, long long, std::string>;
std::string format_cell(const Cell& c);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<double> residuals;  // one per row
};

std::string to_csv(const Table& t);
// Parses CSV written by to_csv back into strings, header first.
std::vector<std::vector<std::string>> read_csv(const std::string& text);

struct RunOptions {
  std::optional<std::string> out_dir;
  std::optional<double> tolerance;
  bool quiet = false;
};

struct RunResult {
  int exit_code = kExitPass;
  std::string message;  // error text, or the one-line summary
  Table table;
  Json report;
  std::vector<std::string> written;  // files produced
};

// Worker count: hardware concurrency capped by HFORGE_THREADS.
unsigned worker_count();

// The task names accepted by run_config.
const std::vector<std::string>& task_names();

// Runs one task. Files are written only when an output directory is given
// (options or config "output.dir").
RunResult run_config(const Json& config, const RunOptions& options);
RunResult run_file(const std::string& path, const RunOptions& options);

}  // namespace hforge
