#pragma once

namespace comseq {

// Full command-line entry point; returns the process exit code
// (0 ok, 1 usage or config, 2 bad data, 3 resource guard tripped).
int cli_main(int argc, const char* const* argv);

}  // namespace comseq
