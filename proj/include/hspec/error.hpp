#pragma once

#include <stdexcept>
#include <string>

namespace hspec {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// point outside the closed disk, or a kernel pole
class DomainError : public Error {
  public:
    using Error::Error;
};

// (phi')^{1/2} could not be continued along the tracking path
class BranchError : public Error {
  public:
    using Error::Error;
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

class PreconditionError : public Error {
  public:
    using Error::Error;
};

class QuadratureError : public Error {
  public:
    using Error::Error;
};

class NumericalError : public Error {
  public:
    using Error::Error;
};

}  // namespace hspec
