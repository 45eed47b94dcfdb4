#pragma once

// Minimal stderr logging; EVAC_LOG picks the threshold (error|warn|info|debug).

#include <string>

namespace evac::log {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

/// Threshold from EVAC_LOG, read once. Defaults to warn.
Level threshold();
void set_threshold(Level level);
/// Throws InputError for unknown names.
Level parse_level(const std::string& name);

void write(Level level, const std::string& message);

inline void error(const std::string& m) { write(Level::Error, m); }
inline void warn(const std::string& m) { write(Level::Warn, m); }
inline void info(const std::string& m) { write(Level::Info, m); }
inline void debug(const std::string& m) { write(Level::Debug, m); }

}  // namespace evac::log
