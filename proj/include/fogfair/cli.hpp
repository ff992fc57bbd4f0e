#pragma once

namespace fogfair {

/// Full command-line surface: validate-data, audit, mitigate, compare,
/// report, synth. Returns the process exit code: 0 success, 1 data
/// validation failure, 2 configuration or usage error.
int cli_main(int argc, const char* const* argv);

}  // namespace fogfair
