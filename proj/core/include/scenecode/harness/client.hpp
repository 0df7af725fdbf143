#pragma once

#include <memory>
#include <string>

#include "scenecode/error.hpp"
#include "scenecode/harness/replay_store.hpp"

namespace scenecode::harness {

struct ChatRequest {
  std::string model_id;
  std::string item_id;
  std::string channel;
  std::string image_ref;  // path to the rendered image
  std::string system_text;
  std::string user_text;
  int max_new_tokens = 2048;
  double temperature = 0.0;

  ReplayKey key() const;
};

struct ChatResponse {
  std::string text;
  int retries = 0;
  std::string provider;
};

class ClientError : public Error {
 public:
  using Error::Error;
};

class ModelClient {
 public:
  virtual ~ModelClient() = default;
  // Throws ClientError (or an Error subclass) on failure.
  virtual ChatResponse send(const ChatRequest& request) = 0;
};

class ReplayClient : public ModelClient {
 public:
  explicit ReplayClient(std::shared_ptr<const ReplayStore> store) : store_(std::move(store)) {}
  ChatResponse send(const ChatRequest& request) override;

 private:
  std::shared_ptr<const ReplayStore> store_;
};

enum class Provider { openai, anthropic };

struct LiveConfig {
  Provider provider = Provider::openai;
  std::string endpoint = "https://api.openai.com";  // scheme://host[:port]
  std::string path;                                 // empty: provider default
  std::string api_key_env = "OPENAI_API_KEY";       // credentials come only from here
  std::string remote_model;                         // empty: request.model_id
  int max_retries = 2;
  int timeout_seconds = 120;
};

// Generic chat-with-image call mapped onto the provider's request format.
// Retries are counted in ChatResponse::retries, never hidden.
class LiveClient : public ModelClient {
 public:
  explicit LiveClient(LiveConfig config);
  ChatResponse send(const ChatRequest& request) override;

  // Request body for a provider; exposed for tests.
  static std::string request_body(const LiveConfig& config, const ChatRequest& request,
                                  const std::string& image_base64, const std::string& media_type);
  static std::string response_text(Provider provider, const std::string& body);

 private:
  LiveConfig config_;
};

// Sends through `inner` and records every response (and failure) in `store`.
class TeeClient : public ModelClient {
 public:
  TeeClient(std::shared_ptr<ModelClient> inner, std::shared_ptr<ReplayStore> store)
      : inner_(std::move(inner)), store_(std::move(store)) {}
  ChatResponse send(const ChatRequest& request) override;

 private:
  std::shared_ptr<ModelClient> inner_;
  std::shared_ptr<ReplayStore> store_;
};

std::string base64_encode(const std::string& bytes);

}  // namespace scenecode::harness
