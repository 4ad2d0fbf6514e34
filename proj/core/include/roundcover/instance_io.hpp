#pragma once

#include <string>
#include <string_view>

#include "roundcover/instance.hpp"

namespace roundcover {

// JSON instance files. See docs/instance-format.md for the schema.
//
// Output is canonical: keys sorted, probabilities as exact "n/d" strings,
// compact separators, trailing newline. Loading accepts probabilities and
// costs as JSON numbers (read as exact decimals) or as "n/d" strings;
// rational costs are scaled to integers and the factor is recorded in
// metadata["cost_scale"].
Instance parse_instance(std::string_view json_text);
std::string serialize_instance(const Instance& instance);

Instance load_instance(const std::string& path);
void save_instance(const Instance& instance, const std::string& path);

std::string model_name(const Instance& instance);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace roundcover
