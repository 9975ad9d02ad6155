#pragma once

#include <cstddef>
#include <functional>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace mined {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition violations: out-of-range correction indices, bad config values.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed input file. line() is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : what + " (line " + std::to_string(line) + ")"),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A metric could not produce a score (provider failure, bad response).
class ScoringError : public Error {
 public:
  using Error::Error;
};

namespace detail {

struct WarningSinkState {
  std::mutex mu;
  std::function<void(std::string_view)> sink;
};

inline WarningSinkState& warningSinkState() {
  static WarningSinkState state;
  return state;
}

}  // namespace detail

/// Replaces the process-wide warning sink and returns the previous one.
/// An empty function restores the default (stderr).
inline std::function<void(std::string_view)> setWarningSink(
    std::function<void(std::string_view)> sink) {
  auto& st = detail::warningSinkState();
  std::lock_guard lock(st.mu);
  return std::exchange(st.sink, std::move(sink));
}

inline void warn(std::string_view message) {
  auto& st = detail::warningSinkState();
  std::lock_guard lock(st.mu);
  if (st.sink) {
    st.sink(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

}  // namespace mined
