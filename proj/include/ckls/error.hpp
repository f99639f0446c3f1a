#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ckls {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class MalformedNumber : public Error {
public:
  explicit MalformedNumber(const std::string& text)
      : Error("malformed number: '" + text + "'") {}
};

class ZeroDenominator : public Error {
public:
  ZeroDenominator() : Error("zero denominator") {}
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
public:
  using Error::Error;
};

class NegativeWeight : public Error {
public:
  using Error::Error;
};

/// Raised for a rank-deficient square system. `rank` is filled in when known;
/// `cell` names the nerve cell when the failure comes from a chart fit.
class Singular : public Error {
public:
  explicit Singular(std::string what, std::size_t rank = 0, std::string cell = {})
      : Error(std::move(what)), rank_(rank), cell_(std::move(cell)) {}

  std::size_t rank() const noexcept { return rank_; }
  const std::string& cell() const noexcept { return cell_; }

private:
  std::size_t rank_;
  std::string cell_;
};

class NotACover : public Error {
public:
  explicit NotACover(std::vector<std::size_t> missing)
      : Error(describe(missing)), missing_(std::move(missing)) {}

  const std::vector<std::size_t>& missing() const noexcept { return missing_; }

private:
  static std::string describe(const std::vector<std::size_t>& missing) {
    std::string s = "charts do not cover indices {";
    for (std::size_t i = 0; i < missing.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(missing[i]);
    }
    return s + "}";
  }
  std::vector<std::size_t> missing_;
};

class BaseMismatch : public Error {
public:
  BaseMismatch() : Error("linearized elements have different base points") {}
};

class DegreeZero : public Error {
public:
  DegreeZero() : Error("differential applied to a degree-0 Koszul element") {}
};

/// The target has a nonzero constant term, which never lies in the image of
/// the linearized differential.
class ConstantObstruction : public Error {
public:
  using Error::Error;
};

class CellMismatch : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  using Error::Error;
};

}  // namespace ckls
