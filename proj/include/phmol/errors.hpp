#pragma once

#include <stdexcept>
#include <string>

namespace phmol {

// Root of every error the library raises. Sweeps catch this type and turn it
// into a per-point status; everything else propagates.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class BasisMismatch : public Error {
public:
    using Error::Error;
};

class SingularSystem : public Error {
public:
    using Error::Error;
};

class ConvergenceFailure : public Error {
public:
    using Error::Error;
};

class StepSizeTooLarge : public Error {
public:
    using Error::Error;
};

// <c†c> at or below the occupation floor; g2 is 0/0 there.
class VacuumOccupation : public Error {
public:
    using Error::Error;
};

class SingularAmplitudeSystem : public Error {
public:
    using Error::Error;
};

class DegenerateCoupling : public Error {
public:
    using Error::Error;
};

} // namespace phmol
