#pragma once

#include <random>
#include <string>
#include <vector>

#include "dairy/core.hpp"

namespace support {

// POST /chat bodies: raw bytes, truncated JSON, deep nesting and objects with ill-typed fields,
// mixed with well-formed requests.
inline std::vector<std::string> chat_fuzz_payloads(std::size_t n, std::uint64_t seed) {
  using dairy::json;
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t m) { return std::uniform_int_distribution<std::size_t>(0, m - 1)(rng); };
  const std::vector<std::string> questions = {"Who founded Cargill", "Why is your system always wrong?",
                                              "How many cows are there in my farm database right now?",
                                              "something the mock has never seen", "", "   ", "\xff\xfe broken utf8"};
  const std::vector<json> odd_values = {nullptr, 1, -3.5, true, json::array(), json::object(), "sql", "MODEL", "direct",
                                        "supervised", "UNKNOWN", std::string(5000, 'x')};
  const std::vector<std::string> keys = {"session", "question", "mode", "route", "extra"};

  auto random_bytes = [&] {
    std::string s;
    for (std::size_t k = pick(200); k > 0; --k) s += static_cast<char>(pick(256));
    return s;
  };
  auto random_object = [&] {
    json j = json::object();
    for (const auto& k : keys) {
      switch (pick(4)) {
        case 0: break;
        case 1: j[k] = odd_values[pick(odd_values.size())]; break;
        default:
          j[k] = k == "question" ? json(questions[pick(questions.size())]) : json(k == "session" ? "fz" : "direct");
      }
    }
    return j.dump(-1, ' ', false, json::error_handler_t::replace);
  };

  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string body;
    switch (i % 5) {
      case 0: body = random_bytes(); break;
      case 1:
        body = random_object();
        if (!body.empty()) body.erase(pick(body.size()), 1);
        break;
      case 2: {
        const std::size_t depth = 1 + pick(300);
        body = std::string(depth, '[') + std::string(depth, ']');
        break;
      }
      default: body = random_object();
    }
    out.push_back(std::move(body));
  }
  return out;
}

}  // namespace support
