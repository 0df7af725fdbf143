#include "scenecode/harness/client.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <openssl/evp.h>

#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace scenecode::harness {

using nlohmann::json;

ReplayKey ChatRequest::key() const {
  return {model_id, item_id, channel, prompt_hash(system_text, user_text)};
}

ChatResponse ReplayClient::send(const ChatRequest& request) {
  try {
    return {store_->lookup(request.key()), 0, "replay"};
  } catch (const RecordedFailure& e) {
    throw ClientError(e.what());
  }
}

std::string base64_encode(const std::string& bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(bytes.data()),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

LiveClient::LiveClient(LiveConfig config) : config_(std::move(config)) {}

std::string LiveClient::request_body(const LiveConfig& config, const ChatRequest& request,
                                     const std::string& image_base64, const std::string& media_type) {
  const std::string model = config.remote_model.empty() ? request.model_id : config.remote_model;
  json body;
  body["model"] = model;
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_new_tokens;
  if (config.provider == Provider::anthropic) {
    if (!request.system_text.empty()) body["system"] = request.system_text;
    body["messages"] = json::array({{{"role", "user"},
                                     {"content", json::array({{{"type", "image"},
                                                               {"source",
                                                                {{"type", "base64"},
                                                                 {"media_type", media_type},
                                                                 {"data", image_base64}}}},
                                                              {{"type", "text"}, {"text", request.user_text}}})}}});
  } else {
    json messages = json::array();
    if (!request.system_text.empty()) messages.push_back({{"role", "system"}, {"content", request.system_text}});
    messages.push_back(
        {{"role", "user"},
         {"content", json::array({{{"type", "text"}, {"text", request.user_text}},
                                  {{"type", "image_url"},
                                   {"image_url", {{"url", "data:" + media_type + ";base64," + image_base64}}}}})}});
    body["messages"] = std::move(messages);
  }
  return body.dump();
}

std::string LiveClient::response_text(Provider provider, const std::string& body) {
  try {
    const json j = json::parse(body);
    if (provider == Provider::anthropic) {
      std::string text;
      for (const auto& block : j.at("content")) {
        if (block.value("type", "") == "text") text += block.at("text").get<std::string>();
      }
      return text;
    }
    const auto& content = j.at("choices").at(0).at("message").at("content");
    return content.is_null() ? std::string() : content.get<std::string>();
  } catch (const json::exception& e) {
    throw ClientError(std::string("unexpected response body: ") + e.what());
  }
}

ChatResponse LiveClient::send(const ChatRequest& request) {
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (!key || !*key) throw ClientError("environment variable " + config_.api_key_env + " is not set");

  std::ifstream img(request.image_ref, std::ios::binary);
  if (!img) throw ClientError("cannot read image " + request.image_ref);
  std::ostringstream bytes;
  bytes << img.rdbuf();
  const std::string ext = request.image_ref.substr(request.image_ref.find_last_of('.') + 1);
  const std::string media = (ext == "jpg" || ext == "jpeg") ? "image/jpeg" : "image/png";
  const std::string body = request_body(config_, request, base64_encode(bytes.str()), media);

  httplib::Client cli(config_.endpoint);
  cli.set_connection_timeout(config_.timeout_seconds);
  cli.set_read_timeout(config_.timeout_seconds);
  httplib::Headers headers;
  std::string path = config_.path;
  if (config_.provider == Provider::anthropic) {
    headers.emplace("x-api-key", key);
    headers.emplace("anthropic-version", "2023-06-01");
    if (path.empty()) path = "/v1/messages";
  } else {
    headers.emplace("Authorization", std::string("Bearer ") + key);
    if (path.empty()) path = "/v1/chat/completions";
  }

  ChatResponse out;
  out.provider = config_.provider == Provider::anthropic ? "anthropic" : "openai";
  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    out.retries = attempt;
    auto res = cli.Post(path, headers, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) {
      out.text = response_text(config_.provider, res->body);
      return out;
    }
    last_error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200);
    if (res->status != 429 && res->status < 500) break;
  }
  throw ClientError(last_error + " (after " + std::to_string(out.retries) + " retries)");
}

ChatResponse TeeClient::send(const ChatRequest& request) {
  try {
    ChatResponse r = inner_->send(request);
    store_->record(request.key(), r.text);
    return r;
  } catch (const ClientError& e) {
    store_->record_failure(request.key(), e.what());
    throw;
  }
}

}  // namespace scenecode::harness
