#pragma once

#include <string>
#include <vector>

namespace nlmc {

/// Fixed 17-significant-digit rendering, enough to round-trip a double.
/// All report and CSV output goes through this so runs are byte-identical.
std::string fmt17(double v);

/// Comma-separated fmt17 of each entry.
std::string fmt17_join(const std::vector<double>& v);

} // namespace nlmc
