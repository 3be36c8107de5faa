#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wsnsel {

class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class io_error : public error {
public:
  using error::error;
};

class empty_dataset_error : public error {
public:
  using error::error;
};

class bounds_error : public error {
public:
  using error::error;
};

class parse_error : public error {
public:
  parse_error(const std::string& what, std::size_t line)
      : error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

// Violated precondition of a public operation.
class contract_error : public error {
public:
  using error::error;
};

class dimension_error : public error {
public:
  using error::error;
};

class underdetermined_error : public error {
public:
  using error::error;
};

class fold_too_small_error : public error {
public:
  using error::error;
};

}  // namespace wsnsel
