#pragma once

#include <stdexcept>
#include <string>

namespace polygame {

/// Carries a stable machine-readable code ("EmptyPolytope", "SyntaxError",
/// "PreconditionFailed", ...) plus an optional locus such as "line 3, col 7"
/// or "state s0, polytope 1". The CLI maps codes to exit codes and renders
/// errors as structured JSON on stderr.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message, std::string locus = {})
      : std::runtime_error(locus.empty() ? message : message + " (" + locus + ")"),
        code_(std::move(code)),
        locus_(std::move(locus)) {}

  const std::string& code() const noexcept { return code_; }
  const std::string& locus() const noexcept { return locus_; }

 private:
  std::string code_;
  std::string locus_;
};

}  // namespace polygame
