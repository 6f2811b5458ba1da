#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace gq {

// Root of every error thrown by the toolkit.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Input violated a documented invariant or precondition.
class ValidationError : public Error {
  public:
    using Error::Error;
};

// Model or file text could not be parsed into the expected structure.
// The offending text is retained for auditing.
class ParseError : public Error {
  public:
    ParseError(const std::string &what, std::string raw_text = {})
        : Error(what), raw_text_(std::move(raw_text)) {}

    const std::string &raw_text() const noexcept { return raw_text_; }

  private:
    std::string raw_text_;
};

class IoError : public Error {
  public:
    using Error::Error;
};

} // namespace gq
