#pragma once

#include <string>
#include <vector>

namespace pcm {

// subcommands: ingest | score | sweep | report | all
// exit codes: 0 success, 1 usage/config, 2 data, 3 external service
int cli_main(int argc, const char* const* argv);

// convenience overload for in-process runs; args exclude the program name
int cli_main(const std::vector<std::string>& args);

}  // namespace pcm
