#pragma once

#include <stdexcept>
#include <string>

namespace sess {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// File missing, unreadable, or unwritable.
class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

/// File exists but is not a raster we can decode (corrupt or unsupported).
class FormatError : public Error {
public:
    explicit FormatError(const std::string& what) : Error(what) {}
};

/// Two rasters that must share dimensions do not.
class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& what) : Error(what) {}
};

/// A parameter or configuration value is out of its legal range.
class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what) : Error(what) {}
};

}  // namespace sess
