#include "afs/sts.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include <httplib.h>

#include "afs/hash.hpp"

namespace afs {

ConstantStsProvider::ConstantStsProvider(double value) : value_(value) {
  if (value < 0.0 || value > 1.0) {
    throw ConfigError("constant STS value must lie in [0,1]");
  }
}

double ConstantStsProvider::sts(const std::string&, const std::string&) {
  return value_;
}

HttpStsProvider::HttpStsProvider(Options options) : options_(std::move(options)) {
  const std::string& url = options_.endpoint;
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("STS endpoint must be a http(s) URL: " + url);
  }
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    host_ = url;
    path_ = "/";
  } else {
    host_ = url.substr(0, path_start);
    path_ = url.substr(path_start);
  }
  if (options_.scale_divisor <= 0.0) {
    throw ConfigError("STS scale divisor must be positive");
  }
}

double HttpStsProvider::sts(const std::string& a, const std::string& b) {
  httplib::Client client(host_);
  client.set_connection_timeout(0, options_.timeout_ms * 1000);
  client.set_read_timeout(0, options_.timeout_ms * 1000);

  httplib::Params params{{options_.param_a, a}, {options_.param_b, b}};
  const std::string target = httplib::append_query_params(path_, params);

  std::string last_error;
  for (int attempt = 0; attempt <= options_.retries; ++attempt) {
    auto res = client.Get(target);
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      throw StsNetworkError("STS provider returned HTTP " +
                            std::to_string(res->status));
    }
    const char* begin = res->body.c_str();
    char* end = nullptr;
    errno = 0;
    double value = std::strtod(begin, &end);
    while (end && *end != '\0' && (*end == ' ' || *end == '\n' || *end == '\r' || *end == '\t')) {
      ++end;
    }
    if (end == begin || (end && *end != '\0') || errno == ERANGE || !std::isfinite(value)) {
      throw StsParseError("STS provider returned a non-numeric body: '" +
                          res->body + "'");
    }
    return std::clamp(value / options_.scale_divisor, 0.0, 1.0);
  }
  throw StsNetworkError("STS request to " + host_ + " failed: " + last_error);
}

std::string StsCache::pair_key(const std::string& a, const std::string& b) {
  const std::string& lo = a <= b ? a : b;
  const std::string& hi = a <= b ? b : a;
  std::uint64_t h = fnv1a64(lo);
  h = fnv1a64(std::string(1, '\x1f'), h);
  h = fnv1a64(hi, h);
  return to_hex(h);
}

StsCache::StsCache(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(path_);
  if (!in) return;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError(path_.string() + ":" + std::to_string(lineno) +
                      ": expected 'pairhash<TAB>score'");
    }
    try {
      entries_[line.substr(0, tab)] = std::stod(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw DataError(path_.string() + ":" + std::to_string(lineno) +
                      ": non-numeric score");
    }
  }
}

std::optional<double> StsCache::lookup(const std::string& key) const {
  std::shared_lock lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::size_t StsCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

void StsCache::store(const std::string& key, double score) {
  std::unique_lock lock(mutex_);
  if (entries_.count(key)) return;
  if (path_.has_parent_path()) {
    std::filesystem::create_directories(path_.parent_path());
  }
  std::ofstream out(path_, std::ios::app);
  if (!out) {
    throw Error("cannot append to STS cache " + path_.string());
  }
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), score);
  out << key << '\t' << std::string_view(buf, static_cast<std::size_t>(ptr - buf)) << '\n';
  entries_[key] = score;
}

StsScorer::StsScorer(StsCache* cache, StsProvider* provider)
    : cache_(cache), provider_(provider) {
  if (cache_ == nullptr && provider_ == nullptr) {
    throw ConfigError("STS scorer needs a cache, a provider, or both");
  }
}

double StsScorer::score(const std::string& a, const std::string& b) {
  const std::string key = StsCache::pair_key(a, b);
  if (cache_ != nullptr) {
    if (auto hit = cache_->lookup(key)) {
      return *hit;
    }
  }
  if (provider_ == nullptr) {
    throw StsCacheMissError("offline STS cache miss for pair key " + key);
  }
  double value = provider_->sts(a, b);
  if (cache_ != nullptr) {
    cache_->store(key, value);
  }
  return value;
}

}  // namespace afs
