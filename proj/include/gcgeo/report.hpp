#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace gcgeo {

struct CheckItem {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Flat list of named pass/fail checks plus free-form notes (convention
// echoes, sample counts).  Serialization is deterministic: insertion order.
struct Report {
  std::string title;
  std::vector<CheckItem> items;
  std::vector<std::pair<std::string, std::string>> notes;

  explicit Report(std::string t = "") : title(std::move(t)) {}

  bool pass() const {
    for (const auto& item : items)
      if (!item.pass) return false;
    return true;
  }

  Report& add(std::string name, bool ok, std::string detail = "") {
    items.push_back({std::move(name), ok, std::move(detail)});
    return *this;
  }

  Report& note(std::string key, std::string value) {
    notes.emplace_back(std::move(key), std::move(value));
    return *this;
  }

  Report& absorb(const Report& sub) {
    for (const auto& item : sub.items)
      items.push_back({sub.title.empty() ? item.name : sub.title + ": " + item.name,
                       item.pass, item.detail});
    for (const auto& n : sub.notes) notes.push_back(n);
    return *this;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["title"] = title;
    j["pass"] = pass();
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& item : items) {
      nlohmann::ordered_json c;
      c["name"] = item.name;
      c["pass"] = item.pass;
      if (!item.detail.empty()) c["detail"] = item.detail;
      j["checks"].push_back(std::move(c));
    }
    nlohmann::ordered_json n = nlohmann::ordered_json::object();
    for (const auto& [k, v] : notes) n[k] = v;
    j["notes"] = std::move(n);
    return j;
  }
};

}  // namespace gcgeo
