#pragma once

#include <functional>
#include <string>
#include <vector>

namespace ipfe {

using WarningHandler = std::function<void(const std::string&)>;

/// Emit a non-fatal warning. The default handler writes to stderr.
void warn(const std::string& message);

/// Replace the warning handler, returning the previous one.
WarningHandler set_warning_handler(WarningHandler handler);

/// RAII capture of warnings (used by tests and the config loader).
class WarningCapture {
public:
  WarningCapture();
  ~WarningCapture();
  WarningCapture(const WarningCapture&) = delete;
  WarningCapture& operator=(const WarningCapture&) = delete;

  const std::vector<std::string>& messages() const { return messages_; }
  bool contains(const std::string& fragment) const;

private:
  std::vector<std::string> messages_;
  WarningHandler previous_;
};

} // namespace ipfe
