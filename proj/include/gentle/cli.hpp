// Command-line façade: one verb per module operation, text or JSON output.
// Exit codes: 0 success, 1 semantic negative, 2 usage/parse error,
// 3 bound exhausted / undecided.
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gentle {

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gentle
