#pragma once

#include <filesystem>
#include <functional>
#include <string>

#include <json.hpp>

#include "afs/errors.hpp"

namespace afs {

using Json = nlohmann::json;

// Calls fn(record, line_number) for each non-blank line of a JSONL file.
// Line numbers are 1-based. Parse failures raise DataError naming file:line.
void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const Json&, int)>& fn);

// Field accessors for JSONL records; unknown fields in the record are
// ignored, missing or mistyped required fields raise DataError with context
// ("file:line" as produced by the loaders).
std::string json_string(const Json& obj, const char* key, const std::string& context);
int json_int(const Json& obj, const char* key, const std::string& context);
double json_double(const Json& obj, const char* key, const std::string& context);

// Reads a whole JSON document (config files, persisted artifacts).
Json read_json_file(const std::filesystem::path& path);

// Writes text to a file, creating parent directories. Throws on I/O failure.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace afs
