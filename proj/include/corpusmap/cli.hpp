#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace corpusmap {

// Full command line minus the program name. Results go to `out`, diagnostics
// and skipped-job notes to `err`. Returns the process exit code: 0 success,
// 1 input error, 2 runtime error.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace corpusmap
