#pragma once

#include <string>

#include "rdseed/grid.hpp"

namespace rdseed {

/// 1D: header `# nx xmin xmax`, then one `x value` pair per line.
/// 2D: header `# nx ny xmin xmax ymin ymax`, then ny rows of nx values.
/// Values use 17 significant digits, so load(dump(f)) reproduces f bit for bit.
std::string format_field(const ScalarField& field);
ScalarField parse_field(const std::string& text);

void dump_field(const std::string& path, const ScalarField& field);
ScalarField load_field(const std::string& path);

/// Shortest text that parses back to the same double (17 significant digits).
std::string format_real(double v);

}  // namespace rdseed
