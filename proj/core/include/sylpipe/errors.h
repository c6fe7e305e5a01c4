#ifndef SYLPIPE_ERRORS_H_
#define SYLPIPE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace sylpipe {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed input text (corpus files, six-column blocks, model files).
// line() is 1-based, or 0 when no single line is at fault.
class FormatError : public Error {
 public:
  FormatError(const std::string& message, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message
                       : message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Bad user configuration: unknown annotator names, inconsistent options.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A model file could not be found or decoded.
class ModelError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

class DecodeError : public Error {
 public:
  using Error::Error;
};

// Gold and predicted data do not line up (different syllables, token counts).
class AlignmentError : public Error {
 public:
  using Error::Error;
};

// A caller broke an operation's precondition (e.g. an illegal transition).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Raised by the pipeline when a stage fails on a sentence.
class AnnotationError : public Error {
 public:
  AnnotationError(const std::string& stage, int sentence_index,
                  const std::string& cause)
      : Error("stage '" + stage + "' failed on sentence " +
              std::to_string(sentence_index) + ": " + cause),
        stage_(stage),
        sentence_index_(sentence_index) {}
  const std::string& stage() const { return stage_; }
  int sentence_index() const { return sentence_index_; }

 private:
  std::string stage_;
  int sentence_index_;
};

}  // namespace sylpipe

#endif  // SYLPIPE_ERRORS_H_
