#pragma once

// Pass/fail records produced by every verification suite.

#include <json.hpp>
#include <string>
#include <utility>
#include <vector>

namespace orthoq {

using json = nlohmann::ordered_json;

struct CheckResult {
  std::string check;
  std::string ref;  // relation tag, e.g. "QYB"
  bool pass = true;
  bool asserted = true;  // informational checks never fail a suite
  json witness;           // null when absent
};

class Report {
 public:
  Report() = default;
  explicit Report(std::string suite) : suite_(std::move(suite)) {}

  const std::string& suite() const { return suite_; }
  const std::vector<CheckResult>& results() const { return results_; }

  void add(std::string check, std::string ref, bool pass, json witness = nullptr) {
    results_.push_back({std::move(check), std::move(ref), pass, true, std::move(witness)});
  }
  void note(std::string check, std::string ref, bool pass, json witness = nullptr) {
    results_.push_back({std::move(check), std::move(ref), pass, false, std::move(witness)});
  }
  void merge(const Report& other) {
    for (const auto& r : other.results_) {
      CheckResult c = r;
      if (!other.suite_.empty() && other.suite_ != suite_) c.check = other.suite_ + "/" + c.check;
      results_.push_back(std::move(c));
    }
  }

  bool ok() const {
    for (const auto& r : results_)
      if (r.asserted && !r.pass) return false;
    return true;
  }
  std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& r : results_) n += (r.asserted && !r.pass) ? 1 : 0;
    return n;
  }
  const CheckResult* find(const std::string& check) const {
    for (const auto& r : results_)
      if (r.check == check) return &r;
    return nullptr;
  }

  json to_json() const {
    json arr = json::array();
    for (const auto& r : results_) {
      json j;
      j["check"] = r.check;
      j["ref"] = r.ref;
      j["status"] = r.asserted ? (r.pass ? "pass" : "fail") : (r.pass ? "info-pass" : "info-fail");
      if (!r.witness.is_null()) j["witness"] = r.witness;
      arr.push_back(std::move(j));
    }
    return arr;
  }

  std::string to_text() const {
    std::string out;
    for (const auto& r : results_) {
      const char* tag = r.asserted ? (r.pass ? "PASS" : "FAIL") : (r.pass ? "info" : "INFO");
      out += std::string(tag) + "  " + r.check + "  [" + r.ref + "]";
      if (!r.pass && !r.witness.is_null()) out += "  witness=" + r.witness.dump();
      out += "\n";
    }
    return out;
  }

 private:
  std::string suite_;
  std::vector<CheckResult> results_;
};

}  // namespace orthoq
