#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace logpi1::cli {

// Front end for the pipelines. Subcommands: validate, minimal-model, bar,
// lie {dims, bch, inner}, curve {presentation, analyze, loop}. Reports are
// canonical JSON (sorted keys, rationals as "num/den"); --out writes the
// report to a file, --format json prints it instead of the text summary.
//
// Exit status: 0 = computed (any verdict), 2 = flag parse error,
// 3 = input or validation error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace logpi1::cli
