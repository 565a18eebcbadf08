#pragma once

#include <string>
#include <vector>

namespace sgb {

std::string read_text_file(const std::string& path);

// Writes to <path>.tmp then renames, so readers never observe a torn file
// and re-running a command replaces reports atomically.
void atomic_write_file(const std::string& path, const std::string& content);

// Minimal CSV: fields joined with commas, values quoted only when needed.
std::string csv_escape(const std::string& field);
std::string csv_row(const std::vector<std::string>& fields);

// Fixed-width decimal used in all report files; deterministic across runs.
std::string format_double(double v, int digits = 6);

}  // namespace sgb
