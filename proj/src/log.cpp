#include "evac/log.hpp"

#include "evac/error.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>

namespace evac::log {

namespace {

std::atomic<int>& level_slot() {
  static std::atomic<int> slot = [] {
    const char* env = std::getenv("EVAC_LOG");
    if (env == nullptr || *env == '\0') return static_cast<int>(Level::Warn);
    try {
      return static_cast<int>(parse_level(env));
    } catch (const InputError&) {
      std::cerr << "[warn] ignoring unknown EVAC_LOG value '" << env << "'\n";
      return static_cast<int>(Level::Warn);
    }
  }();
  return slot;
}

const char* tag(Level level) {
  switch (level) {
    case Level::Error: return "error";
    case Level::Warn: return "warn";
    case Level::Info: return "info";
    case Level::Debug: return "debug";
  }
  return "?";
}

}  // namespace

Level parse_level(const std::string& name) {
  if (name == "error") return Level::Error;
  if (name == "warn") return Level::Warn;
  if (name == "info") return Level::Info;
  if (name == "debug") return Level::Debug;
  throw InputError("unknown log level '" + name + "'");
}

Level threshold() { return static_cast<Level>(level_slot().load()); }

void set_threshold(Level level) { level_slot().store(static_cast<int>(level)); }

void write(Level level, const std::string& message) {
  if (static_cast<int>(level) > level_slot().load()) return;
  static std::mutex mu;
  std::lock_guard lock(mu);
  std::cerr << '[' << tag(level) << "] " << message << '\n';
}

}  // namespace evac::log
