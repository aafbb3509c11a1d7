#pragma once

#include <string>

namespace iftrace {

enum class Severity { Note, Warning, Error };

struct Diagnostic {
  std::string file;
  int line = 0;
  int col = 0;
  Severity severity = Severity::Warning;
  std::string message;
};

const char* severity_name(Severity s);

// "file:line:col: severity: message"
std::string to_string(const Diagnostic& d);

}  // namespace iftrace
