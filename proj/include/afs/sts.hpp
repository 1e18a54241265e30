#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>

#include "afs/errors.hpp"

namespace afs {

// Remote similarity service failure; retriable.
struct StsNetworkError : Error {
  using Error::Error;
};

// Offline mode and the pair is not in the cache.
struct StsCacheMissError : MissingResourceError {
  using MissingResourceError::MissingResourceError;
};

// Provider responded with something that is not a number.
struct StsParseError : DataError {
  using DataError::DataError;
};

// Produces a similarity score in [0,1] for a text pair. Implementations
// must be symmetric: sts(a,b) == sts(b,a).
class StsProvider {
 public:
  virtual ~StsProvider() = default;
  virtual double sts(const std::string& a, const std::string& b) = 0;
};

class ConstantStsProvider : public StsProvider {
 public:
  explicit ConstantStsProvider(double value);
  double sts(const std::string& a, const std::string& b) override;

 private:
  double value_;
};

// HTTP GET provider: two text query parameters, plain-number body.
// Scores are divided by scale_divisor and clamped to [0,1].
class HttpStsProvider : public StsProvider {
 public:
  struct Options {
    std::string endpoint;          // e.g. "http://host:port/sts"
    std::string param_a = "phrase1";
    std::string param_b = "phrase2";
    int timeout_ms = 5000;
    int retries = 2;               // extra attempts after a network failure
    double scale_divisor = 1.0;
  };

  explicit HttpStsProvider(Options options);
  double sts(const std::string& a, const std::string& b) override;

 private:
  Options options_;
  std::string host_;  // scheme://host[:port]
  std::string path_;
};

// Append-only "pairhash TAB score" file. Writes go straight through to disk;
// reads are served from memory. A shared mutex serializes the single writer
// against concurrent readers.
class StsCache {
 public:
  // Loads the file if it exists; the file is created on first store.
  explicit StsCache(std::filesystem::path path);

  // Order-insensitive content key for a text pair.
  static std::string pair_key(const std::string& a, const std::string& b);

  std::optional<double> lookup(const std::string& key) const;
  void store(const std::string& key, double score);
  std::size_t size() const;

 private:
  std::filesystem::path path_;
  std::map<std::string, double> entries_;
  mutable std::shared_mutex mutex_;
};

// Cache-first scorer. A null cache queries the provider every time; a null
// provider is offline mode, where a cache miss is an error.
class StsScorer {
 public:
  StsScorer(StsCache* cache, StsProvider* provider);

  double score(const std::string& a, const std::string& b);
  bool offline() const { return provider_ == nullptr; }

 private:
  StsCache* cache_;
  StsProvider* provider_;
};

}  // namespace afs
