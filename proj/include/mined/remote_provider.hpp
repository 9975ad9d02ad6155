#pragma once

// Sentence embeddings from an HTTP service:
//   POST {endpoint}/embed  {"texts": [...]}  ->  {"vectors": [[...], ...], "dim": d}

#include <algorithm>
#include <atomic>
#include <chrono>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "mined/embeddings.hpp"
#include "mined/error.hpp"

namespace mined {

struct RemoteProviderOptions {
  std::string endpoint;
  std::chrono::milliseconds timeout{30000};
  std::size_t maxBatch = 128;
  int retries = 2;
  std::chrono::milliseconds backoff{200};
  // Defaults to "remote:" + endpoint.
  std::string providerId;
};

class RemoteProvider final : public SentenceEmbeddingProvider {
 public:
  explicit RemoteProvider(RemoteProviderOptions opts) : opts_(std::move(opts)) {
    if (opts_.endpoint.empty()) throw InvalidArgument("remote provider needs an endpoint");
    if (opts_.maxBatch == 0) throw InvalidArgument("maxBatch must be at least 1");
    while (!opts_.endpoint.empty() && opts_.endpoint.back() == '/') opts_.endpoint.pop_back();
    auto scheme = opts_.endpoint.find("://");
    auto pathStart = opts_.endpoint.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (pathStart == std::string::npos) {
      host_ = opts_.endpoint;
    } else {
      host_ = opts_.endpoint.substr(0, pathStart);
      prefix_ = opts_.endpoint.substr(pathStart);
    }
    if (opts_.providerId.empty()) opts_.providerId = "remote:" + opts_.endpoint;
  }

  std::string providerId() const override { return opts_.providerId; }
  std::size_t dimension() const override { return dim_.load(); }

  std::size_t requestCount() const { return requests_.load(); }

  std::vector<Vector> embed(std::span<const std::string> texts) const override {
    std::vector<Vector> out;
    out.reserve(texts.size());
    for (std::size_t start = 0; start < texts.size(); start += opts_.maxBatch) {
      auto batch = texts.subspan(start, std::min(opts_.maxBatch, texts.size() - start));
      auto vectors = post(batch);
      for (auto& v : vectors) out.push_back(std::move(v));
    }
    return out;
  }

 private:
  std::vector<Vector> post(std::span<const std::string> batch) const {
    nlohmann::json body;
    body["texts"] = std::vector<std::string>(batch.begin(), batch.end());
    const std::string payload = body.dump();
    const std::string path = prefix_ + "/embed";

    std::string lastError;
    for (int attempt = 0; attempt <= opts_.retries; ++attempt) {
      if (attempt > 0) std::this_thread::sleep_for(opts_.backoff * attempt);
      httplib::Client client(host_);
      auto secs = std::chrono::duration_cast<std::chrono::seconds>(opts_.timeout);
      auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(opts_.timeout - secs);
      client.set_connection_timeout(secs.count(), usecs.count());
      client.set_read_timeout(secs.count(), usecs.count());
      client.set_write_timeout(secs.count(), usecs.count());
      ++requests_;
      auto res = client.Post(path, payload, "application/json");
      if (!res) {
        lastError = "transport error: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status >= 500 || res->status == 429) {
        lastError = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status != 200) fail("HTTP " + std::to_string(res->status) + ": " + res->body);
      return parse(res->body, batch.size());
    }
    fail(lastError + " after " + std::to_string(opts_.retries + 1) + " attempts");
  }

  std::vector<Vector> parse(const std::string& text, std::size_t expected) const {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      fail(std::string("malformed JSON response: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("vectors") || !doc["vectors"].is_array() ||
        !doc.contains("dim") || !doc["dim"].is_number_unsigned()) {
      fail("response lacks \"vectors\" array or \"dim\"");
    }
    const auto dim = doc["dim"].get<std::size_t>();
    if (dim == 0) fail("response declares dim 0");
    std::size_t known = 0;
    if (!dim_.compare_exchange_strong(known, dim) && known != dim) {
      fail("dimension drift: expected " + std::to_string(known) + ", got " + std::to_string(dim));
    }
    const auto& arr = doc["vectors"];
    if (arr.size() != expected) {
      fail("expected " + std::to_string(expected) + " vectors, got " + std::to_string(arr.size()));
    }
    std::vector<Vector> out;
    out.reserve(expected);
    for (const auto& row : arr) {
      if (!row.is_array() || row.size() != dim) fail("vector length does not match dim " + std::to_string(dim));
      Vector v;
      v.reserve(dim);
      for (const auto& x : row) {
        if (!x.is_number()) fail("non-numeric vector component");
        v.push_back(x.get<float>());
      }
      out.push_back(std::move(v));
    }
    return out;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ScoringError("embedding endpoint " + opts_.endpoint + ": " + what);
  }

  RemoteProviderOptions opts_;
  std::string host_;
  std::string prefix_;
  mutable std::atomic<std::size_t> dim_{0};
  mutable std::atomic<std::size_t> requests_{0};
};

inline std::shared_ptr<const RemoteProvider> remoteProvider(RemoteProviderOptions opts) {
  return std::make_shared<RemoteProvider>(std::move(opts));
}

}  // namespace mined
