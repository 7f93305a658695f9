#ifndef RANDEV_ERRORS_H_
#define RANDEV_ERRORS_H_

#include <stdexcept>
#include <string>

namespace randev {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter lies outside its admissible domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Not enough bits to evaluate an estimator.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// Zero-variance input, e.g. a constant sequence fed to autocorrelation.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// File or stream failure.
class IoError : public Error {
 public:
  using Error::Error;
};

// Readable file with malformed content.
class FormatError : public IoError {
 public:
  using IoError::IoError;
};

}  // namespace randev

#endif  // RANDEV_ERRORS_H_
