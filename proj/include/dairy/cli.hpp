#pragma once

#include <iosfwd>

namespace dairy {

// `dairy ingest|ask|serve|eval ...`. Returns 0 on success, 1 on a runtime error, 2 on a usage
// error. The config file comes from --config, else $DAIRY_CONFIG, else config/dairy.json when it
// exists, else built-in defaults rooted at the working directory.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dairy
