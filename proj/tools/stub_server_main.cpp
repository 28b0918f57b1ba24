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
//
// Stand-alone stub implementing the translation wire schema:
//   POST /translate  {"q": [...], "source": "xx", "target": "yy"}
//   -> {"translations": [...]}
// Useful for trying the http engine offline and for integration tests.

#include <httplib.h>

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <cstdio>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::json;

namespace {

std::string transform(const std::string& text, const std::string& mode) {
  if (mode == "identity") return text;
  if (mode == "upper") {
    std::string out = text;
    for (char& c : out)
      c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
  }
  // reverse token order
  std::istringstream in(text);
  std::vector<std::string> tokens;
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  std::reverse(tokens.begin(), tokens.end());
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pseudoqe stub translation server"};
  int port = 9092;
  std::string mode = "identity";
  std::string fail_script;
  app.add_option("--port", port, "Listen port (0 = pick a free one)");
  app.add_option("--mode", mode, "Translation behavior")
      ->check(CLI::IsMember({"identity", "upper", "reverse"}));
  app.add_option("--fail-script", fail_script,
                 "Comma-separated HTTP statuses for the first N requests, "
                 "e.g. 429,429,200");
  CLI11_PARSE(app, argc, argv);

  std::vector<int> script;
  std::stringstream ss(fail_script);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) script.push_back(std::stoi(item));

  httplib::Server server;
  std::atomic<std::size_t> hits{0};
  server.Post("/translate", [&](const httplib::Request& req,
                                httplib::Response& res) {
    const std::size_t n = hits.fetch_add(1);
    if (n < script.size() && script[n] != 200) {
      res.status = script[n];
      res.set_content("scripted failure", "text/plain");
      return;
    }
    json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.contains("q") || !body["q"].is_array()) {
      res.status = 400;
      res.set_content("bad request", "text/plain");
      return;
    }
    json out;
    out["translations"] = json::array();
    for (const auto& q : body["q"])
      out["translations"].push_back(transform(q.get<std::string>(), mode));
    res.set_content(out.dump(), "application/json");
  });

  if (port == 0) {
    port = server.bind_to_any_port("0.0.0.0");
    std::printf("listening on http://127.0.0.1:%d/translate\n", port);
    std::fflush(stdout);
    server.listen_after_bind();
  } else {
    std::printf("listening on http://127.0.0.1:%d/translate\n", port);
    std::fflush(stdout);
    server.listen("0.0.0.0", port);
  }
  return 0;
}
