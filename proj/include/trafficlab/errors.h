#ifndef TRAFFICLAB_ERRORS_H
#define TRAFFICLAB_ERRORS_H

#include <stdexcept>
#include <string>

namespace trafficlab {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string &msg) : Error(msg) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string &msg) : Error(msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string &msg) : Error(msg) {}
};

// training produced NaN/inf losses
class DivergedError : public Error {
public:
    explicit DivergedError(const std::string &msg) : Error(msg) {}
};

}  // namespace trafficlab

#endif
