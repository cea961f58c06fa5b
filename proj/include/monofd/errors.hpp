#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace monofd {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularSimplex : public Error {
public:
    explicit SingularSimplex(double condition)
        : Error("singular simplex: condition number " + std::to_string(condition)),
          condition_(condition) {}
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

class RayMiss : public Error {
public:
    using Error::Error;
};

/// Errors tied to a single cloud point.
class PointError : public Error {
public:
    PointError(const std::string& what, int point)
        : Error(what + " at point " + std::to_string(point)), point_(point) {}
    int point() const noexcept { return point_; }

private:
    int point_;
};

class EmptyNeighborhood : public PointError {
public:
    explicit EmptyNeighborhood(int point) : PointError("empty search annulus", point) {}
};

class HullDegenerate : public PointError {
public:
    explicit HullDegenerate(int point) : PointError("degenerate direction hull", point) {}
};

class NoForwardSimplex : public PointError {
public:
    explicit NoForwardSimplex(int point) : PointError("no forward simplex", point) {}
};

class NoBackwardSimplex : public PointError {
public:
    explicit NoBackwardSimplex(int point) : PointError("no backward simplex", point) {}
};

class OutOfDomain : public PointError {
public:
    explicit OutOfDomain(int point) : PointError("lattice stencil leaves the grid", point) {}
};

class NotAntipodal : public Error {
public:
    NotAntipodal() : Error("simplex pair has no overlapping antipodal cone") {}
};

class LinearSolveFailure : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class TopologyError : public Error {
public:
    using Error::Error;
};

}  // namespace monofd
