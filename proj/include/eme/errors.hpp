#pragma once

#include <stdexcept>
#include <string>

namespace eme {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ModeMismatch : public Error {
public:
    using Error::Error;
};

class DegreeCapExceeded : public Error {
public:
    using Error::Error;
};

class DimensionOverflow : public Error {
public:
    using Error::Error;
};

// Thrown by the homological solver when a monomial's frequency denominator vanishes.
class ResonantDenominator : public Error {
public:
    ResonantDenominator(std::string monomial, double delta)
        : Error("resonant denominator " + std::to_string(delta) + " for monomial " + monomial),
          monomial_(std::move(monomial)), delta_(delta) {}
    const std::string& monomial() const { return monomial_; }
    double delta() const { return delta_; }

private:
    std::string monomial_;
    double delta_;
};

class ModeCollapse : public Error {
public:
    using Error::Error;
};

class InvalidModel : public Error {
public:
    using Error::Error;
};

class BathRangeError : public Error {
public:
    using Error::Error;
};

class TruncationLeak : public Error {
public:
    TruncationLeak(int mode, double population)
        : Error("truncation leak in mode " + std::to_string(mode) + ": top-level population " +
                std::to_string(population)),
          mode_(mode), population_(population) {}
    int mode() const { return mode_; }
    double population() const { return population_; }

private:
    int mode_;
    double population_;
};

} // namespace eme
