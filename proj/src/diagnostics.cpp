#include "ipfe/diagnostics.hpp"

#include <iostream>
#include <mutex>

namespace ipfe {
namespace {

std::mutex& handler_mutex() {
  static std::mutex m;
  return m;
}

WarningHandler& handler() {
  static WarningHandler h = [](const std::string& msg) {
    std::cerr << "warning: " << msg << '\n';
  };
  return h;
}

} // namespace

void warn(const std::string& message) {
  std::lock_guard lock(handler_mutex());
  if (handler())
    handler()(message);
}

WarningHandler set_warning_handler(WarningHandler h) {
  std::lock_guard lock(handler_mutex());
  auto previous = std::move(handler());
  handler() = std::move(h);
  return previous;
}

WarningCapture::WarningCapture() {
  previous_ = set_warning_handler(
      [this](const std::string& msg) { messages_.push_back(msg); });
}

WarningCapture::~WarningCapture() { set_warning_handler(std::move(previous_)); }

bool WarningCapture::contains(const std::string& fragment) const {
  for (const auto& m : messages_)
    if (m.find(fragment) != std::string::npos)
      return true;
  return false;
}

} // namespace ipfe
