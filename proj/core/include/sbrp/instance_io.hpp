#ifndef SBRP_INSTANCE_IO_HPP
#define SBRP_INSTANCE_IO_HPP

#include <string>

#include "sbrp/instance.hpp"

namespace sbrp {

enum class InstanceFormat { kNativeJson, kBpsCsv, kEuclideanSchittekat };

// Guesses the format from the file extension: .json → native-json,
// .csv → bps-csv, anything else → euclidean text.
InstanceFormat guess_format(const std::string& path);

// Parses and validates an instance file. Throws ParseError with
// line/field context or ValidationError naming the violated invariant.
Instance load_instance(const std::string& path, InstanceFormat format);
Instance load_instance(const std::string& path);  // guess_format

// Writes the native JSON interchange form; load_instance on the result
// reproduces an identical Instance.
void save_instance(const Instance& instance, const std::string& path);
std::string instance_to_json(const Instance& instance);
Instance instance_from_json(const std::string& json_text);

}  // namespace sbrp

#endif
