#pragma once

#include <stdexcept>
#include <string>

namespace drspp {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
  public:
    using Error::Error;
};

/// More simple paths than the caller allowed for.
class CapExceeded : public Error {
  public:
    using Error::Error;
};

/// Interval probability constraints admit no distribution.
class InfeasibleAmbiguity : public Error {
  public:
    using Error::Error;
};

class NotAcyclic : public Error {
  public:
    using Error::Error;
};

class TooManyScenarios : public Error {
  public:
    using Error::Error;
};

/// The identified partition is empty, so the posterior loss is undefined.
class PosteriorInfeasible : public Error {
  public:
    using Error::Error;
};

class MeanOutOfRange : public Error {
  public:
    using Error::Error;
};

class GenerationStalled : public Error {
  public:
    using Error::Error;
};

/// Surviving scenarios prescribe different arcs at a visited node.
class NonAnticipativityViolation : public Error {
  public:
    using Error::Error;
};

class DegenerateDenominator : public Error {
  public:
    using Error::Error;
};

/// Simplex hit its pivot budget or could not recover a nonsingular basis.
class NumericalFailure : public Error {
  public:
    using Error::Error;
};

class FormatError : public Error {
  public:
    using Error::Error;
};

} // namespace drspp
