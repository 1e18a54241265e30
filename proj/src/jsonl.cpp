#include "afs/jsonl.hpp"

#include <fstream>
#include <sstream>

namespace afs {

void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const Json&, int)>& fn) {
  std::ifstream in(path);
  if (!in) {
    throw MissingResourceError("cannot open " + path.string());
  }
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    Json record;
    try {
      record = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) +
                      ": malformed record: " + e.what());
    }
    if (!record.is_object()) {
      throw DataError(path.string() + ":" + std::to_string(lineno) +
                      ": expected a JSON object");
    }
    fn(record, lineno);
  }
}

namespace {

const Json& require_field(const Json& obj, const char* key, const std::string& context) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw DataError(context + ": missing field '" + key + "'");
  }
  return *it;
}

}  // namespace

std::string json_string(const Json& obj, const char* key, const std::string& context) {
  const Json& v = require_field(obj, key, context);
  if (!v.is_string()) {
    throw DataError(context + ": field '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

int json_int(const Json& obj, const char* key, const std::string& context) {
  const Json& v = require_field(obj, key, context);
  if (!v.is_number_integer()) {
    throw DataError(context + ": field '" + key + "' must be an integer");
  }
  return v.get<int>();
}

double json_double(const Json& obj, const char* key, const std::string& context) {
  const Json& v = require_field(obj, key, context);
  if (!v.is_number()) {
    throw DataError(context + ": field '" + key + "' must be a number");
  }
  return v.get<double>();
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw MissingResourceError("cannot open " + path.string());
  }
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot write " + path.string());
  }
  out << content;
  if (!out) {
    throw Error("write failed for " + path.string());
  }
}

}  // namespace afs
