#ifndef SYLPIPE_TOOLS_CLI_H_
#define SYLPIPE_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace sylpipe::cli {

enum ExitCode {
  kExitOk = 0,
  kExitIo = 1,        // missing or unreadable input, unwritable output
  kExitConfig = 2,    // bad flags or annotator names
  kExitModel = 3,     // a model could not be loaded
  kExitData = 4,      // malformed or misaligned data
  kExitTraining = 5,  // training failed
};

// Environment variable naming the default model directory.
inline constexpr const char* kModelsEnv = "SYLPIPE_MODELS";

// Rewrites single-dash long flags ("-fin") to the double-dash form.
std::vector<std::string> NormalizeFlags(const std::vector<std::string>& args);

// Runs one command line (without the program name). Without a subcommand,
// "annotate" is assumed.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sylpipe::cli

#endif  // SYLPIPE_TOOLS_CLI_H_
