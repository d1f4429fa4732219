#pragma once

#include <string>

namespace kmeclip {

/// 17-significant-digit decimal rendering; round-trips every finite double.
std::string format_double(double value);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace kmeclip
