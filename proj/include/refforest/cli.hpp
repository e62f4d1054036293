#pragma once

#include <iosfwd>
#include <string>

namespace refforest {

enum class OutputMode { text, record, dot };

struct CliConfig {
  std::string grammar_path;
  std::string env_path;
  double proximity_threshold = 1.0;
  std::size_t tree_limit = 20;
  OutputMode output_mode = OutputMode::text;
  bool show_referents = false;
  bool provenance = false;
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int error = 1;
inline constexpr int no_parse = 2;
inline constexpr int evaluated_false = 3;
}  // namespace exit_code

/// Entry point of the `refforest` tool with injectable streams.
int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace refforest
