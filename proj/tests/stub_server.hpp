// Copyright 2026 the pseudoqe authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PSEUDOQE_TESTS_STUB_SERVER_HPP
#define PSEUDOQE_TESTS_STUB_SERVER_HPP

#include <httplib.h>

#include <atomic>
#include <json.hpp>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace testutil {

// In-process translation endpoint speaking the wire schema the http engine
// expects. A status script makes the first N responses fail on purpose;
// once exhausted, requests succeed with uppercased translations.
class StubServer {
 public:
  explicit StubServer(std::vector<int> status_script = {})
      : script_(std::move(status_script)) {
    server_.Post("/translate", [this](const httplib::Request& req,
                                      httplib::Response& res) {
      {
        std::lock_guard<std::mutex> lock(mu_);
        requests_.push_back(req.body);
        auth_headers_.push_back(req.get_header_value("Authorization"));
      }
      const std::size_t n = hits_.fetch_add(1);
      if (n < script_.size() && script_[n] != 200) {
        res.status = script_[n];
        res.set_content("scripted failure", "text/plain");
        return;
      }
      nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
      if (body.is_discarded() || !body.contains("q")) {
        res.status = 400;
        return;
      }
      nlohmann::json out;
      out["translations"] = nlohmann::json::array();
      for (const auto& item : body["q"]) {
        std::string s = item.get<std::string>();
        for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        out["translations"].push_back(s);
      }
      res.set_content(out.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~StubServer() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  int port() const { return port_; }
  std::string endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/translate";
  }
  std::size_t request_count() const { return hits_.load(); }
  std::vector<std::string> auth_headers() const {
    std::lock_guard<std::mutex> lock(mu_);
    return auth_headers_;
  }

 private:
  std::vector<int> script_;
  httplib::Server server_;
  std::thread thread_;
  std::atomic<std::size_t> hits_{0};
  mutable std::mutex mu_;
  std::vector<std::string> requests_;
  std::vector<std::string> auth_headers_;
  int port_ = 0;
};

}  // namespace testutil

#endif  // PSEUDOQE_TESTS_STUB_SERVER_HPP
