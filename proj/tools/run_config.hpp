#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace pcgan::cli {

/// Validation / usage problem; mapped to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Key-value configuration with precedence defaults < config file < flags.
/// Every key is declared once with its default and doc string; unknown keys
/// in the config file are rejected. The resolved config is echoed into output
/// directories together with its hash.
class RunConfig {
 public:
  void attach(CLI::App* cmd) {
    cmd_ = cmd;
    cmd->add_option("--config", config_path_, "JSON config file (keys as per flags)");
  }

  void add_string(const std::string& key, const std::string& def, const std::string& desc) {
    auto store = std::make_shared<std::string>(def);
    CLI::Option* opt = cmd_->add_option("--" + key, *store, desc);
    declare(key, nlohmann::json(def), opt, [store] { return nlohmann::json(*store); });
  }
  void add_int(const std::string& key, long def, const std::string& desc) {
    auto store = std::make_shared<long>(def);
    CLI::Option* opt = cmd_->add_option("--" + key, *store, desc);
    declare(key, nlohmann::json(def), opt, [store] { return nlohmann::json(*store); });
  }
  void add_double(const std::string& key, double def, const std::string& desc) {
    auto store = std::make_shared<double>(def);
    CLI::Option* opt = cmd_->add_option("--" + key, *store, desc);
    declare(key, nlohmann::json(def), opt, [store] { return nlohmann::json(*store); });
  }
  void add_bool(const std::string& key, bool def, const std::string& desc) {
    auto store = std::make_shared<bool>(def);
    CLI::Option* opt = cmd_->add_flag("--" + key, *store, desc);
    declare(key, nlohmann::json(def), opt, [store] { return nlohmann::json(*store); });
  }

  /// Merges defaults, then the config file, then explicitly given flags.
  void resolve() {
    values_ = defaults_;
    if (!config_path_.empty()) {
      std::ifstream in(config_path_);
      if (!in) throw UsageError("config: cannot open " + config_path_);
      nlohmann::json file;
      try {
        in >> file;
      } catch (const nlohmann::json::exception& e) {
        throw UsageError("config: " + config_path_ + ": " + e.what());
      }
      if (!file.is_object()) throw UsageError("config: " + config_path_ + ": not an object");
      for (const auto& [key, value] : file.items()) {
        if (!defaults_.contains(key)) throw UsageError("config: unknown key '" + key + "'");
        values_[key] = value;
      }
    }
    for (const Entry& e : entries_)
      if (e.opt->count() > 0) values_[e.key] = e.get();
  }

  std::string get_string(const std::string& key) const { return values_.at(key).get<std::string>(); }
  long get_int(const std::string& key) const { return values_.at(key).get<long>(); }
  double get_double(const std::string& key) const { return values_.at(key).get<double>(); }
  bool get_bool(const std::string& key) const { return values_.at(key).get<bool>(); }

  std::string require_string(const std::string& key) const {
    const std::string v = get_string(key);
    if (v.empty()) throw UsageError("missing required option --" + key);
    return v;
  }

  /// nlohmann::json objects iterate in sorted key order, so dump() is canonical.
  std::string canonical() const { return values_.dump(); }

  /// FNV-1a 64-bit over the canonical dump, as 16 hex digits.
  std::string hash_hex() const {
    uint64_t h = 1469598103934665603ull;
    for (const char c : canonical()) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }

  /// Writes the fully resolved config (plus its hash) into an output directory.
  void echo(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    nlohmann::json doc;
    doc["config"] = values_;
    doc["config_hash"] = hash_hex();
    std::ofstream out(dir / "resolved_config.json");
    if (!out) throw std::runtime_error("cannot write " + (dir / "resolved_config.json").string());
    out << doc.dump(2) << "\n";
  }

  const nlohmann::json& values() const { return values_; }

 private:
  struct Entry {
    std::string key;
    CLI::Option* opt;
    std::function<nlohmann::json()> get;
  };

  void declare(const std::string& key, nlohmann::json def, CLI::Option* opt,
               std::function<nlohmann::json()> get) {
    defaults_[key] = std::move(def);
    entries_.push_back({key, opt, std::move(get)});
  }

  CLI::App* cmd_ = nullptr;
  std::string config_path_;
  nlohmann::json defaults_ = nlohmann::json::object();
  nlohmann::json values_ = nlohmann::json::object();
  std::vector<Entry> entries_;
};

}  // namespace pcgan::cli
